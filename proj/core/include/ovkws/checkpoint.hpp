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
#include <map>
#include <string>

#include "ovkws/bcresnet.hpp"

namespace ovkws {

using CheckpointMeta = std::map<std::string, std::string>;

// A checkpoint is a flat little-endian float32 file holding every named
// parameter and running-statistics tensor, plus a text index next to it
// (<path>.index) listing the model config and one "name shape offset" line
// per tensor. Reloading is bit-exact.
void save_checkpoint(const std::filesystem::path& path, BcResNet<float>& model,
                     const CheckpointMeta& meta = {});
BcResNet<float> load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta = nullptr);

std::filesystem::path checkpoint_index_path(const std::filesystem::path& path);

}  // namespace ovkws
