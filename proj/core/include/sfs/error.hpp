// Copyright 2026 The SFS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SFS_ERROR_HPP_
#define SFS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace sfs {

// Error categories. Each maps to a distinct CLI exit code.
enum class ErrorKind {
  kDomain = 1,            // invalid argument or violated precondition
  kUnsupported = 2,       // operation not available for this target
  kDriftSingularity = 3,  // nonpositive drift denominator
  kNonFinite = 4,         // particle state left the reals
  kConfig = 5,            // malformed configuration
  kUnknownTarget = 6,
  kIo = 7,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorKind::kDomain, what) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what)
      : Error(ErrorKind::kUnsupported, what) {}
};

// Thrown when the m-sample denominator of the drift ratio is not positive.
// Carries the location so the sampler can attach (particle, step) context.
class DriftSingularityError : public Error {
 public:
  DriftSingularityError(const std::string& what, double t, long step = -1,
                        long particle = -1)
      : Error(ErrorKind::kDriftSingularity, what),
        t_(t),
        step_(step),
        particle_(particle) {}

  double t() const { return t_; }
  long step() const { return step_; }
  long particle() const { return particle_; }

 private:
  double t_;
  long step_;
  long particle_;
};

class NonFiniteStateError : public Error {
 public:
  NonFiniteStateError(const std::string& what, long step, long particle)
      : Error(ErrorKind::kNonFinite, what), step_(step), particle_(particle) {}

  long step() const { return step_; }
  long particle() const { return particle_; }

 private:
  long step_;
  long particle_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

class UnknownTargetError : public Error {
 public:
  explicit UnknownTargetError(const std::string& what)
      : Error(ErrorKind::kUnknownTarget, what) {}
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::string path)
      : Error(ErrorKind::kIo, what), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace sfs

#endif  // SFS_ERROR_HPP_
