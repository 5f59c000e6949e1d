// Copyright 2026 The mfnoise Authors. All Rights Reserved.
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

#ifndef MFNOISE_ERRORS_HPP_
#define MFNOISE_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mfnoise {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an iteration produces NaN/Inf or an iterative solver fails to
// converge. `iteration()` is the failing step, or -1 when not applicable.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what, std::int64_t iteration = -1)
      : std::runtime_error(what), iteration_(iteration) {}
  std::int64_t iteration() const { return iteration_; }

 private:
  std::int64_t iteration_;
};

// Operation only defined for rank-1 factor pairs.
class UnsupportedRank : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Noise level too large for the smoothed problem to have the closed-form
// optima (optimum collapses onto the origin or beyond).
class DegenerateNoise : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// ||Y|| = 0 so ||X|| / ||Y|| is undefined.
class UndefinedRatio : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

}  // namespace mfnoise

#endif  // MFNOISE_ERRORS_HPP_
