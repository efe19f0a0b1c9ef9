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

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace ovkws {

inline constexpr int kSampleRate = 16000;

// Mono sample sequence, full scale = 1.0.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  AudioBuffer() = default;
  explicit AudioBuffer(std::vector<double> s, int rate = kSampleRate)
      : samples(std::move(s)), sample_rate(rate) {}
  AudioBuffer(std::size_t n, int rate) : samples(n, 0.0), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  std::span<const double> view() const { return samples; }
};

bool all_finite(std::span<const double> x);

// Throws ovkws::DataError when the buffer violates its invariants.
void validate(const AudioBuffer& buffer);

// A level in dB relative to full scale. Silence is represented by the
// distinguished value -inf so that callers can branch on it instead of
// catching an exception.
class LevelDb {
 public:
  constexpr LevelDb() = default;
  constexpr explicit LevelDb(double db) : db_(db) {}

  static constexpr LevelDb silence() {
    return LevelDb(-std::numeric_limits<double>::infinity());
  }

  constexpr bool is_silence() const {
    return db_ == -std::numeric_limits<double>::infinity();
  }
  constexpr double value() const { return db_; }

  friend constexpr bool operator==(LevelDb, LevelDb) = default;

 private:
  double db_ = -std::numeric_limits<double>::infinity();
};

}  // namespace ovkws
