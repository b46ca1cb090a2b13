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

// Similarity and verification-error metrics.

#pragma once

#include <span>
#include <vector>

namespace ppgspoof {

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Sample Pearson correlation; constant input raises kDegenerateInput.
double pearson(std::span<const double> x, std::span<const double> y);

struct RocPoint {
  double threshold = 0.0;
  double far = 0.0;  // impostor scores >= threshold
  double frr = 0.0;  // genuine scores < threshold
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
  std::vector<RocPoint> roc;  // ascending thresholds
};

/// Sweeps every distinct score (plus one sentinel above the maximum) as a
/// threshold. The EER is read off the first crossing FRR >= FAR with linear
/// interpolation between the two adjacent thresholds; the returned
/// threshold is their midpoint.
EerResult far_frr_eer(std::span<const double> genuine,
                      std::span<const double> impostor);

double mean(std::span<const double> v);

}  // namespace ppgspoof
