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

#ifndef DVFSLEAK_TRACE_IO_HPP
#define DVFSLEAK_TRACE_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dvfsleak/simulator.hpp"

namespace dvfsleak {

/// Header line of the trace CSV format.
inline constexpr const char *kTraceHeader = "t_s,frequency_hz,power_w,temp_c,pstate";

/// One header line, then one row per sample. Reals are written in their
/// shortest round-trip form, so a write/read cycle is lossless.
void write_trace_csv(std::ostream &out, const Trace &trace);
std::string format_trace_csv(const Trace &trace);

/// Parses the format written above. `dt` is taken from the first two
/// samples (kDefaultDt for shorter traces); preset_name/workload_desc are
/// left empty. Throws ConfigError with the offending line on malformed
/// input or non-uniform spacing.
Trace read_trace_csv(std::istream &in, const std::string &source);
Trace load_trace_csv(const std::filesystem::path &path);

/// Samples `trace` on the grid k * dt (k = 0, 1, ... while k * dt does
/// not pass the last sample), each point taking the value of the latest
/// sample at or before it. Throws InvalidArgument if dt < trace.dt.
Trace resample_hold_last(const Trace &trace, double dt);

/// Long-format rows `trace_id,t,channel,value` for the frequency, power
/// and temperature channels of every trace, all resampled to the coarsest
/// dt among them. Throws InvalidArgument for an empty list or an empty
/// trace.
std::string format_long_csv(const std::vector<std::pair<std::string, Trace>> &traces);

/// Writes `content` to a temporary sibling, then renames it over `path`.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

} // namespace dvfsleak

#endif // DVFSLEAK_TRACE_IO_HPP
