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

// Dense row-major matrices, a reproducible PRNG, and the two small
// factorizations (symmetric eigen, thin SVD) the rest of the library needs.
// Everything here targets matrices of at most a few hundred entries per side.

#ifndef MFNOISE_CORE_HPP_
#define MFNOISE_CORE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace mfnoise {

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Mat(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  // Mat{{1, 2}, {3, 4}}
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  // n x 1 column vector.
  static Mat column(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  std::vector<double> col(std::size_t j) const;
  void set_col(std::size_t j, std::span<const double> values);

  bool all_finite() const;

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat matmul(const Mat& a, const Mat& b);
// a^T b without materializing the transpose.
Mat matmul_tn(const Mat& a, const Mat& b);
// a b^T without materializing the transpose.
Mat matmul_nt(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
double frobenius_norm(const Mat& a);
double frobenius_norm_sq(const Mat& a);
// Frobenius inner product <a, b> = tr(a^T b).
double inner(const Mat& a, const Mat& b);
// d <- d + c * e
void scale_add(Mat& d, double c, const Mat& e);
Mat scaled(const Mat& a, double c);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat outer_product(std::span<const double> u, std::span<const double> v);
double trace(const Mat& a);
// Determinant for n <= 3 only.
double det_small(const Mat& a);

// splitmix64 step: advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);
// Per-run seed derivation: splitmix64 applied to (master ^ index).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

// xoshiro256++ seeded by splitmix64 expansion of a 64-bit seed, plus a
// one-sample cache for the polar Box-Muller transform. Not thread-safe; one
// instance belongs to one run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // N(mean, sigma^2). sigma == 0 returns mean exactly and draws nothing.
  double gaussian(double mean, double sigma);
  // Fills `out` in row-major order with N(0, sigma^2) draws.
  void fill_gaussian(Mat& out, double sigma);

  const std::array<std::uint64_t, 4>& state() const { return s_; }

 private:
  std::array<std::uint64_t, 4> s_{};
  std::optional<double> spare_;
};

struct EigenDecomp {
  std::vector<double> values;  // ascending
  Mat vectors;                 // column i pairs with values[i]
};

// Cyclic Jacobi. Iterates until every off-diagonal magnitude is at most
// tol * ||s||_F. Throws InvalidArgument for non-symmetric or n > 256 input,
// NumericalFailure after 100 sweeps.
EigenDecomp sym_eigen(const Mat& s, double tol = 1e-15);

struct Svd {
  Mat u;                  // m x k, orthonormal columns
  std::vector<double> s;  // k = min(m, n), descending, nonnegative
  Mat v;                  // n x k, orthonormal columns
};

// One-sided (Hestenes) Jacobi thin SVD. Columns of U belonging to zero
// singular values are completed by Gram-Schmidt so U stays orthonormal.
// Requires min(rows, cols) <= 32.
Svd svd_small(const Mat& a);

}  // namespace mfnoise

#endif  // MFNOISE_CORE_HPP_
