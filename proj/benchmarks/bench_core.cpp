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
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mcubench/dut_sim.hpp"
#include "mcubench/emon.hpp"
#include "mcubench/fixture.hpp"
#include "mcubench/protocol.hpp"
#include "mcubench/scoring.hpp"

namespace {

using namespace mcubench;

void BM_ProtocolRoundTrip(benchmark::State& state) {
  protocol::LoadChunkCmd chunk;
  chunk.offset = 4096;
  chunk.payload.resize(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < chunk.payload.size(); ++i)
    chunk.payload[i] = static_cast<std::uint8_t>(i * 131);
  protocol::Command cmd = chunk;
  for (auto _ : state) {
    std::string line = protocol::encode(cmd);
    auto parsed = protocol::parse_line(line);
    benchmark::DoNotOptimize(parsed);
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(chunk.payload.size()));
}
BENCHMARK(BM_ProtocolRoundTrip)->Arg(64)->Arg(512);

void BM_ChunkInput(benchmark::State& state) {
  std::string data(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) {
    auto cmds = protocol::chunk_input(data, 512);
    benchmark::DoNotOptimize(cmds);
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ChunkInput)->Arg(1 << 12)->Arg(1 << 16);

void BM_AucRoc(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::vector<bool> labels(n);
  std::uniform_int_distribution<int> level(0, 255);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = level(rng) / 16.0;
    labels[i] = (i % 3) == 0;
  }
  for (auto _ : state) {
    double auc = scoring::auc_roc(scores, labels);
    benchmark::DoNotOptimize(auc);
  }
}
BENCHMARK(BM_AucRoc)->Arg(256)->Arg(4096);

void BM_TraceIntegration(benchmark::State& state) {
  emon::PiecewisePower profile(5.0, 2.0);
  for (int k = 0; k < 100; ++k)
    profile.add_step(0.1 * k, (k % 2) ? 30.0 : 5.0, 2.0);
  emon::EnergyTrace trace =
      emon::simulate_trace(profile, {}, static_cast<double>(state.range(0)),
                           3.0, 10.0);
  emon::Window window{0.5, 9.5};
  for (auto _ : state) {
    double joules = emon::integrate_joules(trace, window, emon::Channel::kDut);
    benchmark::DoNotOptimize(joules);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(trace.samples.size()));
}
BENCHMARK(BM_TraceIntegration)->Arg(1000)->Arg(10000);

void BM_DutInferCommand(benchmark::State& state) {
  dut::DutConfig config;
  config.use_case = scoring::UseCase::kIc;
  config.kernel = dut::make_kernel(scoring::profile_for(scoring::UseCase::kIc),
                                   1000, {30.0, 5.0});
  dut::DutSession session(config);
  std::string bytes = fixture::serialize(fixture::make_classifier_fixture(
      scoring::profile_for(scoring::UseCase::kIc), 3, 3, 1));
  for (const auto& cmd : protocol::chunk_input(bytes, 512)) session.handle(cmd);
  session.handle(protocol::SetTensorCmd{});

  for (auto _ : state) {
    auto rsp = session.handle_line("infer 10 0\n");
    benchmark::DoNotOptimize(rsp);
    session.drain_events();
  }
}
BENCHMARK(BM_DutInferCommand);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
