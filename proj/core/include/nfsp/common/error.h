// Copyright 2026 The NFSP-PPO Authors.
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

#ifndef NFSP_COMMON_ERROR_H_
#define NFSP_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace nfsp {

// Raised for malformed or out-of-range configuration. The command-line tool
// maps it to exit status 1; every other exception maps to status 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when an operation needs data that is not there yet (an empty
// reservoir, a missing checkpoint).
class MissingDataError : public std::runtime_error {
 public:
  explicit MissingDataError(const std::string& what)
      : std::runtime_error(what) {}
};

// Raised when a loss or gradient contains NaN or infinity.
class NonFiniteError : public std::runtime_error {
 public:
  explicit NonFiniteError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace nfsp

#endif  // NFSP_COMMON_ERROR_H_
