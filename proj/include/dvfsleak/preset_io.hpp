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

#ifndef DVFSLEAK_PRESET_IO_HPP
#define DVFSLEAK_PRESET_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "dvfsleak/kv_config.hpp"
#include "dvfsleak/model.hpp"

namespace dvfsleak {

/// Environment variable that overrides the preset catalog directory.
inline constexpr const char *kCatalogEnvVar = "DVFSLEAK_CATALOG";

/// Builds a preset from parsed sections. Throws ConfigError with the
/// offending line, or when the result violates a preset invariant.
DevicePreset preset_from_config(const KvConfig &cfg);

/// Loads `<dir>/<name>.preset`, resolving `extends = <base>` against
/// `<dir>/<base>.base`.
DevicePreset load_preset_file(const std::filesystem::path &path);

/// Writes a preset back out in the catalog format (no `extends`).
std::string format_preset(const DevicePreset &preset);

/// Directory of `*.preset` files.
class PresetCatalog {
public:
    explicit PresetCatalog(std::filesystem::path dir);

    /// `$DVFSLEAK_CATALOG` if set, otherwise the catalog shipped with the
    /// source tree.
    static PresetCatalog from_environment();

    const std::filesystem::path &directory() const noexcept { return dir_; }
    /// Sorted preset names.
    std::vector<std::string> names() const;
    bool contains(const std::string &name) const;
    /// Throws ConfigError for an unknown name.
    DevicePreset load(const std::string &name) const;

private:
    std::filesystem::path dir_;
};

} // namespace dvfsleak

#endif // DVFSLEAK_PRESET_IO_HPP
