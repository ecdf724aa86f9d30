/*
 * Copyright 2026 The dvfsleak Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference against OpenMP version for each parallel kernel.

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "dvfsleak/analysis.hpp"
#include "dvfsleak/attacks.hpp"
#include "dvfsleak/experiment.hpp"
#include "dvfsleak/preset_io.hpp"
#include "dvfsleak/workload.hpp"

namespace dvfsleak {
namespace {

DevicePreset preset(const std::string &name) {
    return PresetCatalog::from_environment().load(name);
}

template <ActivityFactor (*Fn)(const Workload &, std::uint64_t)>
void BM_Decompose(benchmark::State &state) {
    const Workload w = build_instruction_loop(InstructionKind::Mul, 3);
    const auto ticks = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(Fn(w, ticks));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Decompose<decompose_components_serial>)->Name("decompose/serial")->Arg(1 << 20);
BENCHMARK(BM_Decompose<decompose_components>)->Name("decompose/parallel")->Arg(1 << 20);

template <bool Parallel>
void BM_Sweep(benchmark::State &state) {
    const DevicePreset p = preset("m1-mini");
    const SweepFamily &fam = sweep_family("shift-b");
    const std::vector<SweepPoint> points = sweep_points(fam, fam.default_params);
    SweepOptions opts;
    opts.duration = 300.0;
    opts.tail = 50.0;
    opts.noise.seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? sweep(p, points, opts) : sweep_serial(p, points, opts));
}
BENCHMARK(BM_Sweep<false>)->Name("sweep/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep<true>)->Name("sweep/parallel")->Unit(benchmark::kMillisecond);

template <bool Parallel>
void BM_FingerprintTrain(benchmark::State &state) {
    const DevicePreset p = preset("m1-mini");
    const std::vector<WebsiteProfile> profiles = generate_website_catalog(2026, 40);
    NoiseModel noise;
    noise.seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? fingerprint_train(profiles, p, noise)
                                          : fingerprint_train_serial(profiles, p, noise));
}
BENCHMARK(BM_FingerprintTrain<false>)->Name("fingerprint_train/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FingerprintTrain<true>)->Name("fingerprint_train/parallel")->Unit(benchmark::kMillisecond);

template <bool Parallel>
void BM_StealImage(benchmark::State &state) {
    const DevicePreset p = preset("rx6600");
    TargetImage img{16, 16, {}};
    for (std::size_t i = 0; i < 256; ++i)
        img.pixels.push_back(i % 3 ? PixelColor::white() : PixelColor::black());
    NoiseModel noise;
    noise.seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? steal_image(p, img, noise)
                                          : steal_image_serial(p, img, noise));
}
BENCHMARK(BM_StealImage<false>)->Name("steal_image/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StealImage<true>)->Name("steal_image/parallel")->Unit(benchmark::kMillisecond);

} // namespace
} // namespace dvfsleak

BENCHMARK_MAIN();
