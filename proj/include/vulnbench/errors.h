// Copyright 2026 The VulnBench Authors
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

#ifndef VULNBENCH_ERRORS_H_
#define VULNBENCH_ERRORS_H_

#include <stdexcept>
#include <string>

namespace vulnbench {

// Base for every error raised by the library. Callers that only need to
// report a failure can catch this; the subclasses exist for callers that
// react differently (retry on transport, abort on protocol, etc.).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (bad fraction, zero batch size, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input text: Solidity source, JSON Lines, CSV, config files.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Network-level failure, or an HTTP status that retries did not clear.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what, int status = 0)
      : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// The endpoint answered, but not with the expected JSON shape.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace vulnbench

#endif  // VULNBENCH_ERRORS_H_
