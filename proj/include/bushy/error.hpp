// Copyright 2026 The Bushy Authors
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

#ifndef BUSHY_ERROR_HPP_
#define BUSHY_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace bushy {

enum class ErrorKind {
  kInvalidInput,   // malformed data or schema violation
  kPrecondition,   // a stated hypothesis of an operation does not hold
  kInconclusive,   // finite data is too shallow to decide
  kInternal,       // a produced certificate failed its own re-check
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace bushy

#endif  // BUSHY_ERROR_HPP_
