// Copyright 2026 The Scaloforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Serial reference kernels against their OpenMP counterparts on the default
// long-window scalogram configuration (10 s, 48 kHz).

#include <benchmark/benchmark.h>

#include <vector>

#include "scaloforge/features.hpp"
#include "scaloforge/kernels.hpp"
#include "scaloforge/oracle.hpp"
#include "scaloforge/signal_io.hpp"

namespace {

using scaloforge::Exec;

struct Fixture {
  static constexpr int kRate = 48000;
  std::vector<double> signal;
  scaloforge::FeatureConfig config = scaloforge::FeatureConfig::scalogram();
  scaloforge::FeatureExtractor extractor{config, kRate};
  scaloforge::Spectrogram spec;

  Fixture() {
    scaloforge::SynthSpec s;
    s.kind = scaloforge::SignalKind::white_noise;
    s.duration = 10.0;
    s.rate = kRate;
    s.seed = 11;
    signal = scaloforge::synth_signal(s).channels[0];
    spec = scaloforge::stft_magnitude(signal, kRate, config.stft, Exec::serial);
  }

  static Fixture& get() {
    static Fixture f;
    return f;
  }
};

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_Stft(benchmark::State& state) {
  Fixture& f = Fixture::get();
  for (auto _ : state) {
    auto s = scaloforge::stft_magnitude(f.signal, Fixture::kRate, f.config.stft, exec_of(state));
    benchmark::DoNotOptimize(s.magnitudes.data());
  }
}
BENCHMARK(BM_Stft)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_FilterbankEnergy(benchmark::State& state) {
  Fixture& f = Fixture::get();
  for (auto _ : state) {
    auto e = scaloforge::apply_filterbank(f.spec, f.extractor.filters(), exec_of(state));
    benchmark::DoNotOptimize(e.data.data());
  }
}
BENCHMARK(BM_FilterbankEnergy)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_WaveletConvolution(benchmark::State& state) {
  Fixture& f = Fixture::get();
  const auto& bank = f.extractor.bank();
  const std::size_t j = bank.centers.size() - 60;
  const auto w = scaloforge::oracle::synthesize_wavelet(bank.centers[j], bank.bandwidths[j], Fixture::kRate);
  for (auto _ : state) {
    auto e = scaloforge::oracle::convolve_energy(f.signal, w, f.config.stft, Fixture::kRate, exec_of(state));
    benchmark::DoNotOptimize(e.data());
  }
}
BENCHMARK(BM_WaveletConvolution)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
