#include <doctest.h>

#include "soatk/fplin.hpp"

using soatk::fp::Mat;
using soatk::fp::Solver;

TEST_CASE("arithmetic mod 2 and mod 3") {
  Mat a = Mat::from_rows({{1, 1}, {0, 1}}, 2);
  Mat b = Mat::from_rows({{1, 0}, {1, 1}}, 2);
  CHECK((a * b) == Mat::from_rows({{0, 1}, {1, 1}}, 2));
  CHECK((a + a).is_zero());

  Mat c = Mat::from_rows({{2, 1}, {1, 2}}, 3);
  CHECK((c * c) == Mat::from_rows({{2, 1}, {1, 2}}, 3));
  CHECK(c.transpose() == c);
}

TEST_CASE("rank, kernel, pivots") {
  Mat a = Mat::from_rows({{1, 0, 1}, {0, 1, 1}, {1, 1, 0}}, 2);
  CHECK(a.rank() == 2);
  Mat k = a.kernel_basis();
  REQUIRE(k.cols() == 1);
  CHECK((a * k).is_zero());
  CHECK(a.pivot_columns() == std::vector<std::size_t>{0, 1});

  CHECK(Mat::identity(4, 2).rank() == 4);
  CHECK(Mat::zero(3, 5, 2).kernel_basis().cols() == 5);
}

TEST_CASE("solver finds canonical particular solutions") {
  Mat a = Mat::from_rows({{1, 1, 0}, {0, 0, 1}}, 2);
  Solver s(a);
  auto x = s.solve(Mat::column({1, 1}, 2));
  REQUIRE(x.has_value());
  CHECK((a * *x) == Mat::column({1, 1}, 2));
  // Free variable (third... second column) stays zero: canonical choice.
  CHECK(x->at(1, 0) == 0);

  // Linearity of the canonical solve on the image.
  auto x1 = s.solve(Mat::column({1, 0}, 2));
  auto x2 = s.solve(Mat::column({0, 1}, 2));
  REQUIRE(x1.has_value());
  REQUIRE(x2.has_value());
  CHECK((*x1 + *x2) == *x);

  Mat bad = Mat::from_rows({{1}, {1}, {0}}, 2);
  Solver s2(Mat::from_rows({{1}, {1}, {1}}, 2));
  CHECK_FALSE(s2.solve(bad.col(0).vcat(Mat::zero(0, 1, 2))).has_value());
}

TEST_CASE("solver over F_3 with scaling") {
  Mat a = Mat::from_rows({{2, 0}, {0, 2}}, 3);
  Solver s(a);
  auto x = s.solve(Mat::column({1, 2}, 3));
  REQUIRE(x.has_value());
  CHECK((a * *x) == Mat::column({1, 2}, 3));
}

TEST_CASE("block helpers") {
  Mat a = Mat::identity(2, 2);
  Mat b = Mat::zero(2, 1, 2);
  CHECK(a.hcat(b).cols() == 3);
  CHECK(a.vcat(a).rows() == 4);
  Mat d = a.dsum(Mat::identity(1, 2));
  CHECK(d.is_identity());
}

TEST_CASE("all_columns enumerates the whole space in order") {
  auto cols = soatk::fp::all_columns(2, 2);
  REQUIRE(cols.size() == 4);
  CHECK(cols[0].is_zero());
  CHECK(cols[1] == Mat::column({0, 1}, 2));
  CHECK(cols[3] == Mat::column({1, 1}, 2));
}
