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

#ifndef DVFSLEAK_EXPERIMENT_HPP
#define DVFSLEAK_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dvfsleak/attacks.hpp"
#include "dvfsleak/kv_config.hpp"
#include "dvfsleak/simulator.hpp"
#include "dvfsleak/workload.hpp"

namespace dvfsleak {

/// `name` or `name:key=value,key=value`.
struct WorkloadSpec {
    std::string name;
    std::map<std::string, std::string> params;

    std::string to_string() const;
};

/// Throws ConfigError on malformed text.
WorkloadSpec parse_workload_spec(const std::string &text);

/// Resolves a spec against the workload registry. Throws ConfigError for
/// unknown names/parameters and InvalidArgument for out-of-range values.
Workload build_workload(const WorkloadSpec &spec);

/// Registry names with a one-line description each.
std::vector<std::pair<std::string, std::string>> workload_registry();

/// A workload family swept over one integer parameter. `x` maps a built
/// workload to the activity value the sweep is correlated against, in bits.
struct SweepFamily {
    std::string name;
    std::string param;
    std::vector<double> default_params;
    std::function<Workload(double)> build;
    std::function<double(const Workload &)> x;
};

/// Throws ConfigError for an unknown family.
const SweepFamily &sweep_family(const std::string &name);
std::vector<std::string> sweep_family_names();

/// Points {family.x(w), w} for each parameter value.
std::vector<SweepPoint> sweep_points(const SweepFamily &family,
                                     const std::vector<double> &params);

/// Parsed `--noise` value: "default", "none", or "power,temp,jitter".
NoiseModel parse_noise(const std::string &text, std::uint64_t seed);

/// Everything a CLI command needs; every field can come from the config
/// file or a flag.
struct ExperimentConfig {
    std::string preset;
    std::string workload;
    double duration = 2000.0;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> clamp;
    NoiseModel noise;

    std::string sweep_family;
    std::vector<double> sweep_params;
    double sweep_tail = 200.0;

    std::string image;
    std::string links;
    std::string catalog;
    std::string train_preset = "m1-mini-gpu";
    std::string test_preset = "m1-air-gpu";
    PixelAttackOptions pixel;
    FingerprintOptions fingerprint;

    std::string out;
};

/// Reads the `[experiment]`, `[noise]`, `[sweep]`, `[attack]` and
/// `[output]` sections. Relative paths are resolved against the config
/// file's directory. Throws ConfigError with line numbers.
ExperimentConfig load_experiment_config(const std::filesystem::path &path);
ExperimentConfig experiment_from_config(const KvConfig &cfg,
                                        const std::filesystem::path &base_dir = {});

} // namespace dvfsleak

#endif // DVFSLEAK_EXPERIMENT_HPP
