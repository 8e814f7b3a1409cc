/*
 * Copyright 2026 The dflsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DFLSIM_ERRORS_HPP_
#define DFLSIM_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dflsim {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (shapes, ranges, empty inputs).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// An iterative numeric routine did not converge.
class NumericFailureError : public Error {
 public:
  NumericFailureError(const std::string& what, std::size_t iterations)
      : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

// Malformed on-disk data (IDX magic, truncated payloads).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Two inputs that must agree do not (e.g. image and label counts).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Configuration document failed validation. `location` is a JSON pointer.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& location, const std::string& message)
      : Error(location.empty() ? message : location + ": " + message),
        location_(location) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

// Reading or writing an output or input file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

// A simulation run aborted; the message names the round and client.
class RunError : public Error {
 public:
  using Error::Error;
};

}  // namespace dflsim

#endif  // DFLSIM_ERRORS_HPP_
