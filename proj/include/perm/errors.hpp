// Copyright 2026 The Permanent Engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace perm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed matrix or sample-set text.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Shape mismatch: non-square declaration, wrong row length, empty matrix.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// The requested algorithm cannot handle a matrix of this order.
class OrderTooLarge : public Error {
  public:
    using Error::Error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

}  // namespace perm
