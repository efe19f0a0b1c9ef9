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

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ovkws/error.hpp"
#include "ovkws/tf_lab.hpp"
#include "ovkws/wav.hpp"

namespace ovkws {
namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& wav_path) {
  auto p = wav_path;
  p.replace_extension(".txt");
  return p;
}

std::string hrtf_file(int loudspeaker, Mic m) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "hrtf_%02d_%c.wav", loudspeaker, mic_code(m));
  return buf;
}

std::string ovtf_file(Mic m) { return std::string("ovtf_") + mic_code(m) + ".wav"; }

}  // namespace

void save_ir(const std::filesystem::path& wav_path, const ImpulseResponse& ir,
             const IrMetadata& meta) {
  write_wav(wav_path, AudioBuffer(ir.taps, ir.sample_rate), WavFormat::kFloat32);
  std::ofstream side(sidecar_path(wav_path));
  if (!side) throw DataError("cannot write sidecar for " + wav_path.string());
  side << "subject_id=" << meta.subject_id << '\n'
       << "mic_id=" << mic_name(meta.mic) << '\n'
       << "loudspeaker=" << meta.loudspeaker << '\n'
       << "kind=" << (meta.kind == IrKind::kHrtf ? "hrtf" : "own_voice") << '\n';
}

ImpulseResponse load_ir(const std::filesystem::path& wav_path,
                        IrMetadata* meta) {
  const AudioBuffer audio = read_wav(wav_path);
  ImpulseResponse ir{audio.samples, audio.sample_rate, IrKind::kOwnVoice};

  std::ifstream side(sidecar_path(wav_path));
  if (!side) throw DataError("missing sidecar for " + wav_path.string());
  std::map<std::string, std::string> kv;
  for (std::string line; std::getline(side, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!kv.contains("kind") || !kv.contains("mic_id")) {
    throw DataError("incomplete sidecar for " + wav_path.string());
  }
  ir.kind = kv["kind"] == "hrtf" ? IrKind::kHrtf : IrKind::kOwnVoice;
  if (meta != nullptr) {
    meta->subject_id = kv["subject_id"];
    meta->mic = parse_mic(kv["mic_id"]);
    meta->loudspeaker = kv.contains("loudspeaker") ? std::stoi(kv["loudspeaker"]) : 0;
    meta->kind = ir.kind;
  }
  return ir;
}

void save_tf_set(const std::filesystem::path& dir,
                 const TransferFunctionSet& tfs) {
  tfs.validate();
  std::filesystem::create_directories(dir);
  for (Mic m : kAllMics) {
    save_ir(dir / ovtf_file(m), tfs.own_voice(m),
            {tfs.subject_id, m, 0, IrKind::kOwnVoice});
  }
  for (int l = 1; l <= kNumLoudspeakers; ++l) {
    for (Mic m : kAllMics) {
      save_ir(dir / hrtf_file(l, m), tfs.head_related(l, m),
              {tfs.subject_id, m, l, IrKind::kHrtf});
    }
  }
}

TransferFunctionSet load_tf_set(const std::filesystem::path& dir) {
  TransferFunctionSet tfs;
  tfs.subject_id = dir.filename().string();
  for (Mic m : kAllMics) {
    const auto path = dir / ovtf_file(m);
    if (!std::filesystem::exists(path)) {
      throw DataError("missing own-voice IR " + path.string());
    }
    IrMetadata meta;
    tfs.ovtf[static_cast<int>(m)] = load_ir(path, &meta);
    if (!meta.subject_id.empty()) tfs.subject_id = meta.subject_id;
  }
  for (int l = 1; l <= kNumLoudspeakers; ++l) {
    for (Mic m : kAllMics) {
      const auto path = dir / hrtf_file(l, m);
      if (!std::filesystem::exists(path)) {
        throw DataError("missing HRTF entry " + path.string());
      }
      tfs.hrtf[l - 1][static_cast<int>(m)] = load_ir(path);
    }
  }
  tfs.validate();
  return tfs;
}

}  // namespace ovkws
