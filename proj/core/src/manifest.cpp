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

#include <fstream>

#include <nlohmann/json.hpp>

#include "ovkws/dataset.hpp"
#include "ovkws/error.hpp"

namespace ovkws {

using json = nlohmann::ordered_json;

std::string manifest_line(const UtteranceRecord& r) {
  json j;
  j["utt_id"] = r.utt_id;
  j["class"] = class_name(r.label);
  j["label"] = r.label;
  j["word"] = r.word;
  j["source"] = r.source;
  j["speaker"] = r.speaker;
  j["subject"] = r.subject;
  j["set"] = split_name(r.split);
  j["partition"] = r.partition;
  j["noise"] = noise_type_name(r.noise);
  j["snr_db"] = r.snr_db;
  j["alpha"] = r.alpha;
  j["seed"] = r.seed;
  for (Mic m : kAllMics) j[std::string(mic_name(m))] = r.path(m);
  return j.dump();
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write manifest " + path.string());
  for (const auto& r : manifest) out << manifest_line(r) << '\n';
  if (!out) throw DataError("short write to " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  Manifest manifest;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      UtteranceRecord r;
      r.utt_id = j.at("utt_id").get<std::string>();
      r.label = j.at("label").get<int>();
      if (r.label < 0 || r.label >= kNumClasses) throw DataError("label out of range");
      r.word = j.value("word", "");
      r.source = j.value("source", "");
      r.speaker = j.value("speaker", "");
      r.subject = j.value("subject", "");
      r.split = parse_split(j.at("set").get<std::string>());
      r.partition = j.at("partition").get<int>();
      r.noise = parse_noise_type(j.at("noise").get<std::string>());
      r.snr_db = j.at("snr_db").get<double>();
      r.alpha = j.value("alpha", 0.0);
      r.seed = j.value("seed", std::uint64_t{0});
      for (Mic m : kAllMics) {
        r.paths[static_cast<int>(m)] = j.at(std::string(mic_name(m))).get<std::string>();
      }
      manifest.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return manifest;
}

}  // namespace ovkws
