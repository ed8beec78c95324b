#pragma once

// Dense exact linear algebra over the prime field F_p (default p = 2).
// All solvers are deterministic: pivoting is leftmost-first and particular
// solutions set every free variable to zero, so solve() is a linear
// function of its right-hand side.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace soatk::fp {

bool is_prime(unsigned p);

class Mat {
 public:
  Mat() : rows_(0), cols_(0), p_(2) {}
  Mat(std::size_t rows, std::size_t cols, unsigned p);

  static Mat zero(std::size_t rows, std::size_t cols, unsigned p);
  static Mat identity(std::size_t n, unsigned p);
  static Mat from_rows(const std::vector<std::vector<unsigned>>& rows, unsigned p);
  static Mat column(const std::vector<unsigned>& entries, unsigned p);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  unsigned p() const { return p_; }

  unsigned at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, unsigned v) { data_[i * cols_ + j] = static_cast<std::uint8_t>(v % p_); }

  bool operator==(const Mat& o) const;
  bool operator!=(const Mat& o) const { return !(*this == o); }

  Mat operator+(const Mat& o) const;
  Mat operator-(const Mat& o) const;
  Mat operator*(const Mat& o) const;
  Mat scaled(unsigned c) const;
  Mat transpose() const;

  bool is_zero() const;
  bool is_identity() const;

  Mat col(std::size_t j) const;
  Mat row(std::size_t i) const;
  std::vector<unsigned> col_vec(std::size_t j) const;

  /// [this | o] side by side.
  Mat hcat(const Mat& o) const;
  /// [this; o] stacked.
  Mat vcat(const Mat& o) const;
  /// Block diagonal [this 0; 0 o].
  Mat dsum(const Mat& o) const;

  std::size_t rank() const;
  /// Columns form a basis of the kernel; canonical (rref-derived).
  Mat kernel_basis() const;
  /// Column space basis: the subset of columns at pivot positions of rref.
  std::vector<std::size_t> pivot_columns() const;

  std::string to_string() const;

 private:
  std::size_t rows_, cols_;
  unsigned p_;
  std::vector<std::uint8_t> data_;
};

/// Row-reduced echelon data for A, reusable for many right-hand sides.
/// solve() returns the canonical particular solution (free variables zero),
/// which is linear in b on the image of A.
class Solver {
 public:
  explicit Solver(Mat a);

  const Mat& matrix() const { return a_; }
  std::size_t rank() const { return pivots_.size(); }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  /// Solve A x = b for a single column b.
  std::optional<Mat> solve(const Mat& b) const;
  /// Solve A X = B columnwise; nullopt if any column is unsolvable.
  std::optional<Mat> solve_matrix(const Mat& b) const;
  bool in_image(const Mat& b) const { return solve(b).has_value(); }

 private:
  Mat a_;
  Mat r_;  // rref of a_
  Mat e_;  // row-operation matrix with e_ * a_ = r_
  std::vector<std::size_t> pivots_;
};

/// Enumerate all p^n column vectors of height n, in lexicographic order of
/// the coefficient string (last coordinate fastest). Caller must keep n tiny.
std::vector<Mat> all_columns(std::size_t n, unsigned p);

}  // namespace soatk::fp
