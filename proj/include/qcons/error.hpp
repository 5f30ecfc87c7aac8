/*
 Copyright 2026 The qcons Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef QCONS_ERROR_HPP
#define QCONS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qcons {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |sin(theta)| too small: the observability matrix is (numerically) singular.
class DegenerateFrequencyError : public Error {
 public:
  using Error::Error;
};

class InvalidOrderError : public Error {
 public:
  using Error::Error;
};

class WindowMismatchError : public Error {
 public:
  using Error::Error;
};

class AsymmetricWeightsError : public Error {
 public:
  using Error::Error;
};

class NegativeWeightError : public Error {
 public:
  using Error::Error;
};

/// Two independent computations of the same fact disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class OutOfOrderError : public Error {
 public:
  using Error::Error;
};

/// No admissible epsilon was found; what() names the first failing inequality.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class NonpositiveBoundError : public Error {
 public:
  using Error::Error;
};

/// Topology outside the supported class (e.g. complex Laplacian spectrum for m >= 2).
class UnsupportedTopologyError : public Error {
 public:
  using Error::Error;
};

class NumericOverflowError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace qcons

#endif  // QCONS_ERROR_HPP
