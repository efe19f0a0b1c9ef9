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

#include "ovkws/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "ovkws/error.hpp"

namespace ovkws {

double mean(std::span<const double> values) {
  if (values.empty()) throw DataError("mean of an empty sample");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) throw DataError("insufficient seeds");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double student_t_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0) || !(dof > 0.0)) throw ConfigError("invalid t quantile arguments");
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
}

ConfidenceInterval confidence_interval(std::span<const double> values, double level) {
  if (values.size() < 2) throw DataError("insufficient seeds");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must be in (0, 1)");
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("non-finite accuracy");
  }
  const double n = static_cast<double>(values.size());
  const double t = student_t_quantile(0.5 + level / 2.0, n - 1.0);
  return {mean(values), t * sample_stddev(values) / std::sqrt(n)};
}

double median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  if (values.size() % 2) return values[mid];
  const double hi = values[mid];
  return 0.5 * (hi + *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid)));
}

}  // namespace ovkws
