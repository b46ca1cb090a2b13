// Copyright 2026 The ppgspoof Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "signal_core.hpp"

namespace ppgspoof {

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), ErrorKind::kParameter,
          "ks_statistic: empty sample");
  require_finite(a, "ks_statistic");
  require_finite(b, "ks_statistic");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < sa.size() || ib < sb.size()) {
    // Step past every copy of the next value in both samples.
    double x;
    if (ia == sa.size()) x = sb[ib];
    else if (ib == sb.size()) x = sa[ia];
    else x = std::min(sa[ia], sb[ib]);
    while (ia < sa.size() && sa[ia] == x) ++ia;
    while (ib < sb.size() && sb[ib] == x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }
  return d;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::kParameter,
          "pearson: inputs must have equal length >= 2");
  require_finite(x, "pearson");
  require_finite(y, "pearson");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  require(sxx > 0.0 && syy > 0.0, ErrorKind::kDegenerateInput,
          "pearson: constant input");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

EerResult far_frr_eer(std::span<const double> genuine,
                      std::span<const double> impostor) {
  require(!genuine.empty() && !impostor.empty(), ErrorKind::kParameter,
          "far_frr_eer: empty score set");
  require_finite(genuine, "far_frr_eer");
  require_finite(impostor, "far_frr_eer");
  std::vector<double> g(genuine.begin(), genuine.end());
  std::vector<double> im(impostor.begin(), impostor.end());
  std::sort(g.begin(), g.end());
  std::sort(im.begin(), im.end());
  std::vector<double> cand(g);
  cand.insert(cand.end(), im.begin(), im.end());
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  cand.push_back(cand.back() + 1.0);

  const double ng = static_cast<double>(g.size());
  const double ni = static_cast<double>(im.size());
  EerResult res;
  res.roc.reserve(cand.size());
  for (double t : cand) {
    const auto below_g = std::lower_bound(g.begin(), g.end(), t) - g.begin();
    const auto below_i = std::lower_bound(im.begin(), im.end(), t) - im.begin();
    res.roc.push_back({t, (ni - static_cast<double>(below_i)) / ni,
                       static_cast<double>(below_g) / ng});
  }
  // FAR(t0) = 1 and FRR(sentinel) = 1, so a crossing always exists; at the
  // lowest threshold FRR = 0, so k >= 1 unless FAR is already 0 there.
  std::size_t k = 0;
  while (res.roc[k].frr < res.roc[k].far) ++k;
  if (k == 0) {
    res.eer = res.roc[0].far;
    res.threshold = res.roc[0].threshold;
    return res;
  }
  const RocPoint& p = res.roc[k - 1];
  const RocPoint& q = res.roc[k];
  const double dp = p.far - p.frr;  // > 0
  const double dq = q.far - q.frr;  // <= 0
  const double lambda = dp / (dp - dq);
  res.eer = p.far + lambda * (q.far - p.far);
  res.threshold = 0.5 * (p.threshold + q.threshold);
  return res;
}

double mean(std::span<const double> v) {
  require(!v.empty(), ErrorKind::kParameter, "mean of empty sequence");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace ppgspoof
