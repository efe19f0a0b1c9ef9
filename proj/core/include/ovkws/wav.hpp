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

#include <filesystem>

#include "ovkws/audio.hpp"

namespace ovkws {

enum class WavFormat { kPcm16, kFloat32 };

// Reads a mono RIFF/WAVE file (16-bit PCM or 32-bit IEEE float).
// Throws DataError on malformed headers or on multi-channel input
// ("unsupported channel count").
AudioBuffer read_wav(const std::filesystem::path& path);

// Writes a mono RIFF/WAVE file. 16-bit output clips to [-1, 1) and rounds to
// the nearest code; 32-bit float output stores the samples cast to float.
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio,
               WavFormat format = WavFormat::kFloat32);

}  // namespace ovkws
