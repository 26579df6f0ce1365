/*
 * Copyright 2026 The slowpool authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SLOWPOOL_ERRORS_HPP
#define SLOWPOOL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace slowpool {

/// Base class for all slowpool domain errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// simkernel
class PastEventError : public Error {
 public:
  using Error::Error;
};
class BadRangeError : public Error {
 public:
  using Error::Error;
};

// netmodel
class MalformedError : public Error {
 public:
  MalformedError(const std::string& field, const std::string& reason)
      : Error(field + ": " + reason), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};
class NonZeroHostBitsError : public Error {
 public:
  using Error::Error;
};
class BlockExhaustedError : public Error {
 public:
  using Error::Error;
};

// server
class NotTransferringError : public Error {
 public:
  using Error::Error;
};
class NotInPoolError : public Error {
 public:
  using Error::Error;
};
class BadParamError : public Error {
 public:
  using Error::Error;
};

// metrics / io
class EmptySampleError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};
class MissingFileError : public Error {
 public:
  using Error::Error;
};

// wire
class BindError : public Error {
 public:
  using Error::Error;
};
class NonLoopbackRefusedError : public Error {
 public:
  using Error::Error;
};

}  // namespace slowpool

#endif  // SLOWPOOL_ERRORS_HPP
