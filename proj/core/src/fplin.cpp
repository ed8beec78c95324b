#include "soatk/fplin.hpp"

#include <sstream>
#include <stdexcept>

namespace soatk::fp {

bool is_prime(unsigned p) {
  if (p < 2) return false;
  for (unsigned d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

namespace {

unsigned inv_mod(unsigned a, unsigned p) {
  // p is prime and a != 0 mod p; Fermat.
  unsigned r = 1, b = a % p, e = p - 2;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

struct Rref {
  Mat r;
  Mat e;
  std::vector<std::size_t> pivots;
};

Rref rref_of(const Mat& a) {
  const unsigned p = a.p();
  Mat r = a;
  Mat e = Mat::identity(a.rows(), p);
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t sel = row;
    while (sel < a.rows() && r.at(sel, col) == 0) ++sel;
    if (sel == a.rows()) continue;
    if (sel != row) {
      for (std::size_t j = 0; j < r.cols(); ++j) {
        unsigned t = r.at(row, j);
        r.set(row, j, r.at(sel, j));
        r.set(sel, j, t);
      }
      for (std::size_t j = 0; j < e.cols(); ++j) {
        unsigned t = e.at(row, j);
        e.set(row, j, e.at(sel, j));
        e.set(sel, j, t);
      }
    }
    const unsigned inv = inv_mod(r.at(row, col), p);
    if (inv != 1) {
      for (std::size_t j = 0; j < r.cols(); ++j) r.set(row, j, r.at(row, j) * inv % p);
      for (std::size_t j = 0; j < e.cols(); ++j) e.set(row, j, e.at(row, j) * inv % p);
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == row) continue;
      const unsigned c = r.at(i, col);
      if (c == 0) continue;
      for (std::size_t j = 0; j < r.cols(); ++j)
        r.set(i, j, (r.at(i, j) + (p - c) * r.at(row, j)) % p);
      for (std::size_t j = 0; j < e.cols(); ++j)
        e.set(i, j, (e.at(i, j) + (p - c) * e.at(row, j)) % p);
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(r), std::move(e), std::move(pivots)};
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols, unsigned p)
    : rows_(rows), cols_(cols), p_(p), data_(rows * cols, 0) {
  if (!is_prime(p)) throw std::invalid_argument("fp::Mat: p must be prime");
}

Mat Mat::zero(std::size_t rows, std::size_t cols, unsigned p) { return Mat(rows, cols, p); }

Mat Mat::identity(std::size_t n, unsigned p) {
  Mat m(n, n, p);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

Mat Mat::from_rows(const std::vector<std::vector<unsigned>>& rows, unsigned p) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  Mat m(r, c, p);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw std::invalid_argument("fp::Mat: ragged rows");
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

Mat Mat::column(const std::vector<unsigned>& entries, unsigned p) {
  Mat m(entries.size(), 1, p);
  for (std::size_t i = 0; i < entries.size(); ++i) m.set(i, 0, entries[i]);
  return m;
}

bool Mat::operator==(const Mat& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && p_ == o.p_ && data_ == o.data_;
}

Mat Mat::operator+(const Mat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_ || p_ != o.p_)
    throw std::invalid_argument("fp::Mat::+: shape/field mismatch");
  Mat m(rows_, cols_, p_);
  for (std::size_t k = 0; k < data_.size(); ++k)
    m.data_[k] = static_cast<std::uint8_t>((data_[k] + o.data_[k]) % p_);
  return m;
}

Mat Mat::operator-(const Mat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_ || p_ != o.p_)
    throw std::invalid_argument("fp::Mat::-: shape/field mismatch");
  Mat m(rows_, cols_, p_);
  for (std::size_t k = 0; k < data_.size(); ++k)
    m.data_[k] = static_cast<std::uint8_t>((data_[k] + p_ - o.data_[k]) % p_);
  return m;
}

Mat Mat::operator*(const Mat& o) const {
  if (cols_ != o.rows_ || p_ != o.p_)
    throw std::invalid_argument("fp::Mat::*: shape/field mismatch");
  Mat m(rows_, o.cols_, p_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const unsigned a = at(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j)
        m.data_[i * o.cols_ + j] =
            static_cast<std::uint8_t>((m.data_[i * o.cols_ + j] + a * o.at(k, j)) % p_);
    }
  return m;
}

Mat Mat::scaled(unsigned c) const {
  Mat m(rows_, cols_, p_);
  for (std::size_t k = 0; k < data_.size(); ++k)
    m.data_[k] = static_cast<std::uint8_t>(data_[k] * (c % p_) % p_);
  return m;
}

Mat Mat::transpose() const {
  Mat m(cols_, rows_, p_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m.set(j, i, at(i, j));
  return m;
}

bool Mat::is_zero() const {
  for (auto v : data_)
    if (v != 0) return false;
  return true;
}

bool Mat::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (at(i, j) != (i == j ? 1u : 0u)) return false;
  return true;
}

Mat Mat::col(std::size_t j) const {
  Mat m(rows_, 1, p_);
  for (std::size_t i = 0; i < rows_; ++i) m.set(i, 0, at(i, j));
  return m;
}

Mat Mat::row(std::size_t i) const {
  Mat m(1, cols_, p_);
  for (std::size_t j = 0; j < cols_; ++j) m.set(0, j, at(i, j));
  return m;
}

std::vector<unsigned> Mat::col_vec(std::size_t j) const {
  std::vector<unsigned> v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = at(i, j);
  return v;
}

Mat Mat::hcat(const Mat& o) const {
  if (rows_ != o.rows_ || p_ != o.p_) throw std::invalid_argument("fp::Mat::hcat: mismatch");
  Mat m(rows_, cols_ + o.cols_, p_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) m.set(i, j, at(i, j));
    for (std::size_t j = 0; j < o.cols_; ++j) m.set(i, cols_ + j, o.at(i, j));
  }
  return m;
}

Mat Mat::vcat(const Mat& o) const {
  if (cols_ != o.cols_ || p_ != o.p_) throw std::invalid_argument("fp::Mat::vcat: mismatch");
  Mat m(rows_ + o.rows_, cols_, p_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m.set(i, j, at(i, j));
  for (std::size_t i = 0; i < o.rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m.set(rows_ + i, j, o.at(i, j));
  return m;
}

Mat Mat::dsum(const Mat& o) const {
  if (p_ != o.p_) throw std::invalid_argument("fp::Mat::dsum: field mismatch");
  Mat m(rows_ + o.rows_, cols_ + o.cols_, p_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m.set(i, j, at(i, j));
  for (std::size_t i = 0; i < o.rows_; ++i)
    for (std::size_t j = 0; j < o.cols_; ++j) m.set(rows_ + i, cols_ + j, o.at(i, j));
  return m;
}

std::size_t Mat::rank() const { return rref_of(*this).pivots.size(); }

Mat Mat::kernel_basis() const {
  const Rref rr = rref_of(*this);
  std::vector<bool> is_pivot(cols_, false);
  for (auto c : rr.pivots) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t j = 0; j < cols_; ++j)
    if (!is_pivot[j]) free_cols.push_back(j);
  Mat k(cols_, free_cols.size(), p_);
  for (std::size_t fi = 0; fi < free_cols.size(); ++fi) {
    const std::size_t f = free_cols[fi];
    k.set(f, fi, 1);
    for (std::size_t pi = 0; pi < rr.pivots.size(); ++pi) {
      const unsigned v = rr.r.at(pi, f);
      if (v) k.set(rr.pivots[pi], fi, (p_ - v) % p_);
    }
  }
  return k;
}

std::vector<std::size_t> Mat::pivot_columns() const { return rref_of(*this).pivots; }

std::string Mat::to_string() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_ << " mod " << p_ << "\n";
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << at(i, j);
    os << "\n";
  }
  return os.str();
}

Solver::Solver(Mat a) : a_(std::move(a)), r_(), e_() {
  Rref rr = rref_of(a_);
  r_ = std::move(rr.r);
  e_ = std::move(rr.e);
  pivots_ = std::move(rr.pivots);
}

std::optional<Mat> Solver::solve(const Mat& b) const {
  if (b.rows() != a_.rows() || b.cols() != 1 || b.p() != a_.p())
    throw std::invalid_argument("fp::Solver::solve: bad rhs");
  const Mat c = e_ * b;
  for (std::size_t i = pivots_.size(); i < c.rows(); ++i)
    if (c.at(i, 0) != 0) return std::nullopt;
  Mat x(a_.cols(), 1, a_.p());
  for (std::size_t pi = 0; pi < pivots_.size(); ++pi) x.set(pivots_[pi], 0, c.at(pi, 0));
  return x;
}

std::optional<Mat> Solver::solve_matrix(const Mat& b) const {
  if (b.rows() != a_.rows() || b.p() != a_.p())
    throw std::invalid_argument("fp::Solver::solve_matrix: bad rhs");
  Mat x(a_.cols(), b.cols(), a_.p());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto xj = solve(b.col(j));
    if (!xj) return std::nullopt;
    for (std::size_t i = 0; i < x.rows(); ++i) x.set(i, j, xj->at(i, 0));
  }
  return x;
}

std::vector<Mat> all_columns(std::size_t n, unsigned p) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= p;
    if (total > 4u * 1000u * 1000u) throw std::runtime_error("fp::all_columns: space too large");
  }
  std::vector<Mat> out;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    Mat v(n, 1, p);
    std::size_t c = code;
    for (std::size_t i = n; i-- > 0;) {
      v.set(i, 0, static_cast<unsigned>(c % p));
      c /= p;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace soatk::fp
