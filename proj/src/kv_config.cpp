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

#include "dvfsleak/kv_config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "dvfsleak/error.hpp"

namespace dvfsleak {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string strip_comment(const std::string &line) {
    const auto pos = line.find_first_of("#;");
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::optional<double> parse_real(const std::string &text) {
    if (text.empty())
        return std::nullopt;
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (errno != 0 || end != text.c_str() + text.size())
        return std::nullopt;
    return v;
}

} // namespace

void KvSection::set(const std::string &key, KvEntry entry) {
    if (auto it = entries_.find(key); it != entries_.end())
        throw ConfigError(source_, entry.line,
                          fmt::format("duplicate key '{}' (first on line {})",
                                      key, it->second.line));
    entries_.emplace(key, std::move(entry));
}

const KvEntry &KvSection::entry(const std::string &key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw ConfigError(source_, line_,
                          fmt::format("section [{}] is missing key '{}'", name_, key));
    return it->second;
}

std::size_t KvSection::line_of(const std::string &key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? line_ : it->second.line;
}

const std::string &KvSection::get_string(const std::string &key) const {
    return entry(key).value;
}

double KvSection::get_double(const std::string &key) const {
    const KvEntry &e = entry(key);
    if (auto v = parse_real(e.value))
        return *v;
    throw ConfigError(source_, e.line,
                      fmt::format("key '{}': '{}' is not a number", key, e.value));
}

std::int64_t KvSection::get_int(const std::string &key) const {
    const KvEntry &e = entry(key);
    std::int64_t v = 0;
    const char *b = e.value.data();
    const char *end = b + e.value.size();
    auto [ptr, ec] = std::from_chars(b, end, v);
    if (ec != std::errc{} || ptr != end || e.value.empty())
        throw ConfigError(source_, e.line,
                          fmt::format("key '{}': '{}' is not an integer", key, e.value));
    return v;
}

bool KvSection::get_bool(const std::string &key) const {
    const KvEntry &e = entry(key);
    if (e.value == "true" || e.value == "yes" || e.value == "1")
        return true;
    if (e.value == "false" || e.value == "no" || e.value == "0")
        return false;
    throw ConfigError(source_, e.line,
                      fmt::format("key '{}': '{}' is not a boolean", key, e.value));
}

std::vector<double> KvSection::get_doubles(const std::string &key) const {
    const KvEntry &e = entry(key);
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        auto v = parse_real(t);
        if (!v)
            throw ConfigError(source_, e.line,
                              fmt::format("key '{}': '{}' is not a number", key, t));
        out.push_back(*v);
    }
    if (out.empty())
        throw ConfigError(source_, e.line, fmt::format("key '{}' is empty", key));
    return out;
}

std::string KvSection::get_string(const std::string &key,
                                  const std::string &fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double KvSection::get_double(const std::string &key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t KvSection::get_int(const std::string &key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool KvSection::get_bool(const std::string &key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

void KvSection::reject_unknown(const std::vector<std::string> &allowed) const {
    for (const auto &[key, e] : entries_)
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(source_, e.line,
                              fmt::format("unknown key '{}' in section [{}]", key, name_));
}

KvConfig KvConfig::parse(const std::string &text, const std::string &source) {
    KvConfig cfg;
    cfg.source_ = source;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(source, lineno, "unterminated section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty())
                throw ConfigError(source, lineno, "empty section name");
            cfg.sections_.emplace_back(source, name, lineno);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source, lineno,
                              fmt::format("expected 'key = value', got '{}'", line));
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError(source, lineno, "empty key");
        if (cfg.sections_.empty())
            cfg.sections_.emplace_back(source, "", 0);
        cfg.sections_.back().set(key, KvEntry{trim(line.substr(eq + 1)), lineno});
    }
    return cfg;
}

KvConfig KvConfig::load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string(), 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

KvConfig KvConfig::overlay(const KvConfig &base, const KvConfig &top) {
    KvConfig out;
    out.source_ = top.source_;
    for (const KvSection &s : base.sections_) {
        KvSection copy(top.source_, s.name(), 0);
        for (const auto &[k, e] : s.entries())
            copy.put(k, KvEntry{e.value, 0});
        out.sections_.push_back(std::move(copy));
    }
    for (const KvSection &s : top.sections_) {
        auto it = std::find_if(out.sections_.begin(), out.sections_.end(),
                               [&](const KvSection &o) { return o.name() == s.name(); });
        if (it == out.sections_.end()) {
            out.sections_.push_back(s);
            continue;
        }
        for (const auto &[k, e] : s.entries())
            it->put(k, e);
    }
    return out;
}

const KvSection *KvConfig::find(const std::string &name) const {
    for (const auto &s : sections_)
        if (s.name() == name)
            return &s;
    return nullptr;
}

const KvSection &KvConfig::require(const std::string &name) const {
    if (const KvSection *s = find(name))
        return *s;
    throw ConfigError(source_, 0, fmt::format("missing section [{}]", name));
}

} // namespace dvfsleak
