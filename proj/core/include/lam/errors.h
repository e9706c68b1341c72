/* Copyright 2026 The LAM Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef LAM_ERRORS_H_
#define LAM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace lam {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values, out-of-range ids, bad arguments.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Inputs that are well-formed but carry no usable signal (e.g. an all-ignore
// label map passed to a loss).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated files. Messages name the byte offset.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A metric with no defined classes.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace lam

#endif  // LAM_ERRORS_H_
