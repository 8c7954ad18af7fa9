// Copyright 2026 The relaxopt Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relaxopt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: mismatched sizes, non-finite inputs, violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A time step produced a non-finite value.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, std::size_t stage, const std::string& what)
      : Error("divergence at step " + std::to_string(step) + ", stage " +
              std::to_string(stage) + ": " + what),
        step_(step),
        stage_(stage) {}

  std::size_t step() const { return step_; }
  std::size_t stage() const { return stage_; }

 private:
  std::size_t step_;
  std::size_t stage_;
};

/// A tableau weight is zero, so the weight-normalised adjoint coefficients
/// do not exist. Callers fall back to the xi-form sweep.
class ZeroWeightError : public Error {
 public:
  ZeroWeightError(const std::string& family, std::size_t index)
      : Error("zero weight " + family + "[" + std::to_string(index) + "]"),
        family_(family),
        index_(index) {}

  const std::string& family() const { return family_; }
  std::size_t index() const { return index_; }

 private:
  std::string family_;
  std::size_t index_;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace relaxopt
