// Copyright 2026 The GPSTPS Authors.
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

#ifndef GPSTPS_STATS_HPP
#define GPSTPS_STATS_HPP

#include <span>

namespace gpstps {

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
};

/// Two-sided paired t-test with n - 1 degrees of freedom.
///
/// When every difference is identical the statistic is degenerate: p = 1 (t = 0) if the mean
/// difference is zero, otherwise p = 0 and t = +/-infinity.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Sample mean and (n - 1) standard deviation; the deviation is 0 for a single value.
double mean(std::span<const double> xs);
double sample_std(std::span<const double> xs);

}  // namespace gpstps

#endif  // GPSTPS_STATS_HPP
