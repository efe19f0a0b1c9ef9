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

#include "ovkws/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ovkws/error.hpp"

namespace ovkws {

namespace {

constexpr const char* kHeader = "ovkws-checkpoint 1";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_shape(const Shape& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out;
}

Shape parse_shape(const std::string& text) {
  Shape s;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) s.push_back(std::stoul(part));
  return s;
}

struct Entry {
  std::string name;
  Tensor<float>* tensor;
};

std::vector<Entry> entries(BcResNet<float>& model) {
  std::vector<Entry> out;
  for (auto* p : model.parameters()) out.push_back({p->name, &p->value});
  for (auto* b : model.buffers()) out.push_back({b->name, &b->value});
  return out;
}

}  // namespace

std::filesystem::path checkpoint_index_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".index");
}

void save_checkpoint(const std::filesystem::path& path, BcResNet<float>& model,
                     const CheckpointMeta& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream bin(path, std::ios::binary | std::ios::trunc);
  std::ofstream idx(checkpoint_index_path(path), std::ios::trunc);
  if (!bin || !idx) throw DataError("cannot write checkpoint " + path.string());
  const auto& cfg = model.config();
  idx << kHeader << "\n";
  idx << "tau " << format_double(cfg.tau) << "\n";
  idx << "in_channels " << cfg.in_channels << "\n";
  idx << "num_classes " << cfg.num_classes << "\n";
  idx << "mel_bins " << cfg.mel_bins << "\n";
  idx << "sub_bands " << cfg.sub_bands << "\n";
  idx << "dropout " << format_double(cfg.dropout) << "\n";
  for (const auto& [k, v] : meta) {
    if (k.find_first_of(" \n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw ConfigError("checkpoint metadata must be single-line, key without spaces");
    }
    idx << "meta " << k << " " << v << "\n";
  }
  std::size_t offset = 0;
  for (const auto& e : entries(model)) {
    idx << "tensor " << e.name << " " << join_shape(e.tensor->shape) << " " << offset << "\n";
    bin.write(reinterpret_cast<const char*>(e.tensor->ptr()),
              static_cast<std::streamsize>(e.tensor->numel() * sizeof(float)));
    offset += e.tensor->numel() * sizeof(float);
  }
  if (!bin || !idx) throw DataError("short write to checkpoint " + path.string());
}

BcResNet<float> load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta) {
  std::ifstream idx(checkpoint_index_path(path));
  if (!idx) throw DataError("missing checkpoint index for " + path.string());
  std::string line;
  if (!std::getline(idx, line) || line != kHeader) {
    throw DataError("not a checkpoint index: " + checkpoint_index_path(path).string());
  }
  ModelConfig cfg;
  struct Loc {
    Shape shape;
    std::size_t offset;
  };
  std::map<std::string, Loc> locs;
  while (std::getline(idx, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "tau") ls >> cfg.tau;
    else if (key == "in_channels") ls >> cfg.in_channels;
    else if (key == "num_classes") ls >> cfg.num_classes;
    else if (key == "mel_bins") ls >> cfg.mel_bins;
    else if (key == "sub_bands") ls >> cfg.sub_bands;
    else if (key == "dropout") ls >> cfg.dropout;
    else if (key == "meta") {
      std::string k, v;
      ls >> k;
      std::getline(ls >> std::ws, v);
      if (meta) (*meta)[k] = v;
    } else if (key == "tensor") {
      std::string name, shape;
      std::size_t offset = 0;
      ls >> name >> shape >> offset;
      locs[name] = {parse_shape(shape), offset};
    } else {
      throw DataError("unknown checkpoint index entry: " + key);
    }
    if (ls.fail()) throw DataError("malformed checkpoint index line: " + line);
  }

  BcResNet<float> model(cfg, 0);
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw DataError("cannot open checkpoint " + path.string());
  for (const auto& e : entries(model)) {
    auto it = locs.find(e.name);
    if (it == locs.end()) throw DataError("checkpoint lacks tensor " + e.name);
    if (it->second.shape != e.tensor->shape) {
      throw DataError("checkpoint tensor " + e.name + " has shape " +
                      shape_string(it->second.shape) + ", model expects " +
                      shape_string(e.tensor->shape));
    }
    bin.seekg(static_cast<std::streamoff>(it->second.offset));
    bin.read(reinterpret_cast<char*>(e.tensor->ptr()),
             static_cast<std::streamsize>(e.tensor->numel() * sizeof(float)));
    if (!bin) throw DataError("truncated checkpoint " + path.string());
  }
  return model;
}

}  // namespace ovkws
