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

#ifndef DVFSLEAK_KV_CONFIG_HPP
#define DVFSLEAK_KV_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dvfsleak {

/// One `key = value` entry and the line it came from.
struct KvEntry {
    std::string value;
    std::size_t line = 0;
};

/// Named section of a flat key-value file. Keys before the first
/// `[header]` belong to the section with an empty name.
class KvSection {
public:
    KvSection(std::string source, std::string name, std::size_t line)
        : source_(std::move(source)), name_(std::move(name)), line_(line) {}

    const std::string &name() const noexcept { return name_; }
    std::size_t line() const noexcept { return line_; }
    const std::string &source() const noexcept { return source_; }

    bool has(const std::string &key) const { return entries_.count(key) != 0; }
    /// Throws ConfigError on a duplicate key.
    void set(const std::string &key, KvEntry entry);
    /// Inserts or overwrites.
    void put(const std::string &key, KvEntry entry) { entries_[key] = std::move(entry); }

    /// The typed accessors throw ConfigError (with the entry's line) when
    /// the key is missing or the value does not parse.
    const std::string &get_string(const std::string &key) const;
    double get_double(const std::string &key) const;
    std::int64_t get_int(const std::string &key) const;
    bool get_bool(const std::string &key) const;
    /// Comma-separated list of reals.
    std::vector<double> get_doubles(const std::string &key) const;

    std::string get_string(const std::string &key, const std::string &fallback) const;
    double get_double(const std::string &key, double fallback) const;
    std::int64_t get_int(const std::string &key, std::int64_t fallback) const;
    bool get_bool(const std::string &key, bool fallback) const;

    std::size_t line_of(const std::string &key) const;
    /// Throws ConfigError for the first key not in `allowed`.
    void reject_unknown(const std::vector<std::string> &allowed) const;
    const std::map<std::string, KvEntry> &entries() const noexcept { return entries_; }

private:
    const KvEntry &entry(const std::string &key) const;

    std::string source_;
    std::string name_;
    std::size_t line_;
    std::map<std::string, KvEntry> entries_;
};

/// Parsed file: sections in file order. `#` and `;` start comments.
class KvConfig {
public:
    static KvConfig parse(const std::string &text, const std::string &source);
    static KvConfig load(const std::filesystem::path &path);

    /// Sections of `base` with every key of `top` laid over them; sections
    /// only present in `top` are appended. Reports `top`'s source.
    static KvConfig overlay(const KvConfig &base, const KvConfig &top);

    const std::string &source() const noexcept { return source_; }
    const std::vector<KvSection> &sections() const noexcept { return sections_; }
    /// First section called `name`, or nullptr.
    const KvSection *find(const std::string &name) const;
    /// Like find() but throws ConfigError when absent.
    const KvSection &require(const std::string &name) const;

private:
    std::string source_;
    std::vector<KvSection> sections_;
};

} // namespace dvfsleak

#endif // DVFSLEAK_KV_CONFIG_HPP
