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

#include <doctest.h>

#include <random>

#include "mcubench/errors.hpp"
#include "test_util.hpp"

using namespace mcubench;
using namespace mcubench::fixture;

TEST_CASE("decode is the identity on the encoded tensor") {
  Fixture f;
  f.use_case = scoring::UseCase::kKws;
  f.tensor = {0.5f, 0.25f};
  CHECK(deserialize(serialize(f)).tensor == std::vector<float>{0.5f, 0.25f});
}

TEST_CASE("fixture bytes round-trip") {
  Fixture f;
  f.use_case = scoring::UseCase::kAd;
  f.tensor.assign(2 * kAdWindowLen, 0.5f);
  f.label = 1.0f;
  f.central_begin = 0;
  f.central_end = 2;

  Fixture back = deserialize(serialize(f));
  CHECK(back.use_case == f.use_case);
  CHECK(back.tensor == f.tensor);
  CHECK(back.label == f.label);
  CHECK(back.central_begin == f.central_begin);
  CHECK(back.central_end == f.central_end);
}

TEST_CASE("fixture decode rejects malformed bytes") {
  Fixture f;
  f.use_case = scoring::UseCase::kIc;
  f.tensor.assign(4, 1.0f);
  std::string bytes = serialize(f);

  CHECK_THROWS_AS(deserialize(bytes.substr(0, 10)), ContractError);   // header cut
  CHECK_THROWS_AS(deserialize(bytes.substr(0, bytes.size() - 2)), ContractError);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(deserialize(bad_magic), ContractError);
  std::string bad_bench = bytes;
  bad_bench[4] = 9;
  CHECK_THROWS_AS(deserialize(bad_bench), ContractError);
}

TEST_CASE("ad fixtures must hold whole windows with a valid central span") {
  Fixture f;
  f.use_case = scoring::UseCase::kAd;
  f.tensor.assign(kAdWindowLen + 1, 0.0f);  // ragged
  f.central_begin = 0;
  f.central_end = 1;
  CHECK_THROWS_AS(deserialize(serialize(f)), ContractError);

  f.tensor.assign(kAdWindowLen, 0.0f);
  f.central_end = 2;  // beyond the single window
  CHECK_THROWS_AS(deserialize(serialize(f)), ContractError);
}

TEST_CASE("generated classifier fixtures decode back to their source tensor") {
  const auto& profile = scoring::profile_for(scoring::UseCase::kIc);
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    std::uint32_t label = std::uniform_int_distribution<std::uint32_t>(0, 9)(rng);
    std::uint32_t predicted = std::uniform_int_distribution<std::uint32_t>(0, 9)(rng);
    Fixture f = make_classifier_fixture(profile, label, predicted, rng());
    Fixture back = deserialize(serialize(f));
    CHECK(back.tensor == f.tensor);
    CHECK(back.label_class() == label);
    // The stub kernel argmaxes the leading logits; the peak must be unique.
    for (std::uint32_t k = 0; k < profile.n_classes; ++k) {
      if (k != predicted) CHECK(f.tensor[k] < f.tensor[predicted]);
    }
  }
}

TEST_CASE("ad fixtures realize the requested per-window MSEs") {
  std::vector<double> mses{1.0, 4.0, 0.25, 2.25};
  Fixture f = make_ad_fixture(mses, 1, 3, true);
  CHECK(f.ad_window_count() == 4);
  CHECK(f.anomalous());
  for (std::size_t w = 0; w < mses.size(); ++w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < kAdWindowLen; ++i) {
      double v = f.tensor[w * kAdWindowLen + i];
      acc += v * v;
    }
    CHECK(acc / kAdWindowLen == doctest::Approx(mses[w]).epsilon(1e-6));
  }
}

TEST_CASE("generate_dataset writes a sorted deterministic directory") {
  testutil::TempDir dir("fixtures");
  DatasetSpec spec;
  spec.use_case = scoring::UseCase::kVww;
  spec.count = 10;
  spec.correct = 7;
  spec.seed = 3;
  generate_dataset(dir.path(), spec);

  auto files = list_dir(dir.path());
  REQUIRE(files.size() == 10);
  CHECK(files.front().filename() == "stim_0000.bin");
  CHECK(files.back().filename() == "stim_0009.bin");

  testutil::TempDir dir2("fixtures");
  generate_dataset(dir2.path(), spec);
  for (std::size_t i = 0; i < files.size(); ++i) {
    CHECK(testutil::slurp(files[i]) ==
          testutil::slurp(list_dir(dir2.path())[i]));
  }
}
