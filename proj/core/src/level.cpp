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

#include <cmath>
#include <vector>

#include "ovkws/dsp.hpp"
#include "ovkws/error.hpp"

namespace ovkws {

LevelDb rms_level_db(std::span<const double> x) {
  if (x.empty()) throw DataError("empty operand");
  if (!all_finite(x)) throw DataError("non-finite input");
  double sum = 0.0;
  for (double v : x) sum += v * v;
  if (sum == 0.0) return LevelDb::silence();
  return LevelDb(10.0 * std::log10(sum / static_cast<double>(x.size())));
}

// Speech voltmeter after ITU-T P.56 method B: a two-stage exponential
// envelope of |x| is compared against a ladder of thresholds spaced 6.02 dB
// apart; each threshold accumulates its active-sample count (with hangover).
// The active level is the point where (active level - threshold) falls to
// the margin, linearly interpolated between adjacent thresholds.
LevelDb active_speech_level(const AudioBuffer& signal,
                            const P56Options& options) {
  validate(signal);
  const double fs = signal.sample_rate;
  if (signal.empty() ||
      static_cast<double>(signal.size()) < options.envelope_time_constant_s * fs) {
    throw DataError("signal shorter than one envelope time constant");
  }

  const int nthr = options.num_thresholds;
  const double g = std::exp(-1.0 / (fs * options.envelope_time_constant_s));
  const auto hang = static_cast<long>(std::ceil(options.hangover_s * fs));

  std::vector<double> thresholds(nthr);
  for (int j = 0; j < nthr; ++j) thresholds[j] = std::ldexp(1.0, j - nthr + 1);

  std::vector<long> active(nthr, 0);
  std::vector<long> hold(nthr, hang);
  double p = 0.0, q = 0.0, sum_sq = 0.0;

  for (double s : signal.samples) {
    p = g * p + (1.0 - g) * std::abs(s);
    q = g * q + (1.0 - g) * p;
    sum_sq += s * s;
    for (int j = 0; j < nthr; ++j) {
      if (q >= thresholds[j]) {
        ++active[j];
        hold[j] = 0;
      } else if (hold[j] < hang) {
        ++active[j];
        ++hold[j];
      } else {
        // Thresholds are increasing: all higher ones are idle too.
        for (int k = j + 1; k < nthr; ++k) {
          if (hold[k] < hang) {
            ++active[k];
            ++hold[k];
          }
        }
        break;
      }
    }
  }

  if (active[0] == 0 || sum_sq == 0.0) return LevelDb::silence();

  auto level = [&](int j) {
    return 10.0 * std::log10(sum_sq / static_cast<double>(active[j]));
  };
  auto thr_db = [&](int j) { return 20.0 * std::log10(thresholds[j]); };

  double prev_a = level(0);
  double prev_d = prev_a - thr_db(0);
  for (int j = 1; j < nthr; ++j) {
    if (active[j] == 0) return LevelDb(prev_a);
    const double a = level(j);
    const double d = a - thr_db(j);
    if (d <= options.margin_db) {
      const double t = (prev_d - options.margin_db) / (prev_d - d);
      return LevelDb(prev_a + t * (a - prev_a));
    }
    prev_a = a;
    prev_d = d;
  }
  return LevelDb(prev_a);
}

}  // namespace ovkws
