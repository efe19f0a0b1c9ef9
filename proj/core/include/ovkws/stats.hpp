// Copyright (c) 2026 The ovkws Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <vector>

namespace ovkws {

struct ConfidenceInterval {
  double mean = 0.0;
  double halfwidth = 0.0;
};

// mean +- t_{(1+level)/2, n-1} * s / sqrt(n), s the sample standard
// deviation. Throws DataError("insufficient seeds") for n < 2.
ConfidenceInterval confidence_interval(std::span<const double> values, double level = 0.95);

double student_t_quantile(double p, double dof);
double mean(std::span<const double> values);
double sample_stddev(std::span<const double> values);
double median(std::vector<double> values);

}  // namespace ovkws
