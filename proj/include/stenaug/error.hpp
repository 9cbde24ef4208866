// Copyright 2026 The stenaug Authors
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

#include <stdexcept>
#include <string>

namespace stenaug {

/// Base class for all toolkit errors. Subtypes distinguish failures the
/// harness treats differently (exit codes, strict modes, JSON error kinds).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class FileNotFoundError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "file_not_found"; }
};

/// Input exists but is not in a form the toolkit accepts (bit depth,
/// color type, non-PNG payload).
class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unsupported_format"; }
};

/// Malformed structured input (manifest, CSV, matrix file, config file).
/// Messages carry the offending line number where one exists.
class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse_error"; }
};

/// Parameter outside its documented domain (negative sigma, rate > 1,
/// unknown preset or symbol, ...).
class ValueError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "value_error"; }
};

/// Geometric constraint violated (pad target below source size, shift
/// magnitude at or above the image extent).
class DimensionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension_error"; }
};

/// Signed-rank test invoked on all-zero differences: no evidence either way.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate_sample"; }
};

/// Paired comparison with misaligned keys between the two result sets.
class PairingError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "pairing_error"; }
};

}  // namespace stenaug
