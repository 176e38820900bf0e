/* Copyright 2026 The MCUBench Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "mcubench/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "mcubench/errors.hpp"

namespace mcubench::fixture {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff),
               static_cast<char>((v >> 24) & 0xff)};
  out.append(b, 4);
}

void put_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

std::uint32_t get_u32(const char* p) {
  auto b = [p](int i) { return static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[i])); };
  return b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
}

float get_f32(const char* p) {
  std::uint32_t bits = get_u32(p);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

constexpr std::size_t kHeaderLen = 24;

}  // namespace

std::string serialize(const Fixture& fixture) {
  std::string out;
  out.reserve(kHeaderLen + fixture.tensor.size() * 4);
  put_u32(out, kFixtureMagic);
  put_u32(out, static_cast<std::uint32_t>(fixture.use_case));
  put_u32(out, static_cast<std::uint32_t>(fixture.tensor.size()));
  put_f32(out, fixture.label);
  put_u32(out, fixture.central_begin);
  put_u32(out, fixture.central_end);
  for (float v : fixture.tensor) put_f32(out, v);
  return out;
}

Fixture deserialize(const std::string& bytes) {
  if (bytes.size() < kHeaderLen)
    throw ContractError("fixture: truncated header");
  if (get_u32(bytes.data()) != kFixtureMagic)
    throw ContractError("fixture: bad magic");
  std::uint32_t bench_id = get_u32(bytes.data() + 4);
  if (bench_id > 3) throw ContractError("fixture: unknown benchmark id");
  std::uint32_t tensor_len = get_u32(bytes.data() + 8);
  if (bytes.size() != kHeaderLen + static_cast<std::size_t>(tensor_len) * 4)
    throw ContractError("fixture: length field disagrees with payload size");

  Fixture f;
  f.use_case = static_cast<scoring::UseCase>(bench_id);
  f.label = get_f32(bytes.data() + 12);
  f.central_begin = get_u32(bytes.data() + 16);
  f.central_end = get_u32(bytes.data() + 20);
  f.tensor.resize(tensor_len);
  for (std::uint32_t i = 0; i < tensor_len; ++i)
    f.tensor[i] = get_f32(bytes.data() + kHeaderLen + 4 * i);

  if (f.use_case == scoring::UseCase::kAd) {
    if (tensor_len == 0 || tensor_len % kAdWindowLen != 0)
      throw ContractError("fixture: ad tensor must be whole windows");
    std::size_t windows = tensor_len / kAdWindowLen;
    if (f.central_begin >= f.central_end || f.central_end > windows)
      throw ContractError("fixture: ad central span out of bounds");
  }
  return f;
}

void write_file(const std::filesystem::path& path, const Fixture& fixture) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError("cannot open fixture for writing: " + path.string());
  std::string bytes = serialize(fixture);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw StoreError("short write: " + path.string());
}

Fixture read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open fixture: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

std::vector<std::filesystem::path> list_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) return files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bin")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Fixture make_classifier_fixture(const scoring::BenchmarkProfile& profile,
                                std::uint32_t label, std::uint32_t predicted,
                                std::uint64_t seed) {
  if (profile.n_classes == 0)
    throw ContractError("classifier fixture for a non-classifier benchmark");
  if (label >= profile.n_classes || predicted >= profile.n_classes)
    throw ContractError("classifier fixture: class index out of range");

  Fixture f;
  f.use_case = profile.use_case;
  f.label = static_cast<float>(label);
  f.tensor.resize(scoring::input_tensor_len(profile));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> noise(-0.5f, 0.5f);
  for (float& v : f.tensor) v = noise(rng);
  // Leading logits: the stub kernel argmaxes these, so pin the peak.
  for (std::uint32_t k = 0; k < profile.n_classes; ++k)
    f.tensor[k] = (k == predicted) ? 4.0f : noise(rng);
  return f;
}

Fixture make_ad_fixture(const std::vector<double>& window_mses,
                        std::uint32_t central_begin, std::uint32_t central_end,
                        bool anomalous) {
  if (window_mses.empty()) throw ContractError("ad fixture: no windows");
  if (central_begin >= central_end || central_end > window_mses.size())
    throw ContractError("ad fixture: bad central span");
  Fixture f;
  f.use_case = scoring::UseCase::kAd;
  f.label = anomalous ? 1.0f : 0.0f;
  f.central_begin = central_begin;
  f.central_end = central_end;
  f.tensor.resize(window_mses.size() * kAdWindowLen);
  for (std::size_t w = 0; w < window_mses.size(); ++w) {
    if (window_mses[w] < 0.0) throw ContractError("ad fixture: negative mse");
    // Constant-valued window: zero-reconstruction MSE is exactly value^2.
    float v = static_cast<float>(std::sqrt(window_mses[w]));
    std::fill_n(f.tensor.begin() + static_cast<std::ptrdiff_t>(w * kAdWindowLen),
                kAdWindowLen, v);
  }
  return f;
}

void generate_dataset(const std::filesystem::path& dir, const DatasetSpec& spec) {
  if (spec.count == 0) throw ContractError("generate_dataset: count must be >= 1");
  const auto& profile = scoring::profile_for(spec.use_case);
  std::filesystem::create_directories(dir);

  std::mt19937_64 rng(spec.seed);
  for (std::uint32_t i = 0; i < spec.count; ++i) {
    Fixture f;
    if (profile.metric_kind == scoring::MetricKind::kTop1) {
      std::uint32_t label = i % profile.n_classes;
      bool correct = i < spec.correct;
      std::uint32_t predicted = correct ? label : (label + 1) % profile.n_classes;
      f = make_classifier_fixture(profile, label, predicted, spec.seed ^ (i * 0x9e3779b9ull));
    } else {
      // 10 s clip proportions: 25 windows with the central 16 scored (64%).
      constexpr std::uint32_t kWindows = 25;
      constexpr std::uint32_t kCentral = 16;
      constexpr std::uint32_t kBegin = (kWindows - kCentral) / 2;
      bool anomalous = i < spec.anomalous;
      std::uniform_real_distribution<double> jitter(0.8, 1.2);
      double base = anomalous ? 4.0 : 1.0;
      std::vector<double> mses(kWindows);
      for (auto& m : mses) m = base * jitter(rng);
      f = make_ad_fixture(mses, kBegin, kBegin + kCentral, anomalous);
    }
    char name[32];
    std::snprintf(name, sizeof(name), "stim_%04u.bin", i);
    write_file(dir / name, f);
  }
}

}  // namespace mcubench::fixture
