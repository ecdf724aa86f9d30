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

#ifndef DVFSLEAK_ERROR_HPP
#define DVFSLEAK_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dvfsleak {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A configuration file or flag could not be parsed or resolved.
/// `line()` is 0 when the problem is not tied to a specific line.
class ConfigError : public Error {
public:
    ConfigError(const std::string &source, std::size_t line,
                const std::string &what)
        : Error(format(source, line, what)), source_(source), line_(line) {}

    const std::string &source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string &source, std::size_t line,
                              const std::string &what) {
        std::string out = source;
        if (line != 0)
            out += ":" + std::to_string(line);
        if (!out.empty())
            out += ": ";
        return out + what;
    }

    std::string source_;
    std::size_t line_;
};

/// No steady-state window could be found in a trace.
class NotConvergedError : public Error {
public:
    using Error::Error;
};

/// The black/white timing separation was below the configured floor.
class CalibrationFailedError : public Error {
public:
    using Error::Error;
};

/// Pearson correlation requested on an input with zero variance.
class UndefinedCorrelationError : public Error {
public:
    using Error::Error;
};

} // namespace dvfsleak

#endif // DVFSLEAK_ERROR_HPP
