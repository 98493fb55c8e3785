#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nkflag/forms.hpp"
#include "nkflag/su3.hpp"

using namespace nkflag;

namespace {
Vec8 unit(int i) { return Vec8::Unit(i); }

// m-indexed dual monomials on the 6-dimensional complement, 1-based labels.
AltForm mono(std::initializer_list<int> mids) {
  std::vector<int> idx;
  for (int m : mids) idx.push_back(m - 1);  // m_k is complement coordinate k-1
  return AltForm::monomial(Space::kComplement6, idx, 1.0);
}

AltForm wedge(const AltForm& a, const AltForm& b) { return a.wedge(b); }
double ev(const AltForm& f, const std::vector<Vec8>& v) {
  return f.evaluate(v);
}
}  // namespace

TEST_CASE("determinant convention for evaluation") {
  const AltForm m14 = mono({1, 4});
  CHECK(ev(m14, {unit(2), unit(5)}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ev(m14, {unit(5), unit(2)}) == doctest::Approx(-1.0).epsilon(1e-15));
  // Degenerate arguments annihilate.
  CHECK(ev(m14, {unit(2), unit(2)}) == doctest::Approx(0.0));

  const AltForm top = mono({1, 2, 3, 4, 5, 6});
  CHECK(ev(top, {unit(2), unit(3), unit(4), unit(5), unit(6), unit(7)}) ==
        doctest::Approx(1.0).epsilon(1e-15));
  // One transposition flips the sign.
  CHECK(ev(top, {unit(3), unit(2), unit(4), unit(5), unit(6), unit(7)}) ==
        doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("evaluation is multilinear") {
  const AltForm m14 = mono({1, 4});
  const Vec8 x = 2.0 * unit(2) + 3.0 * unit(5);
  const Vec8 y = -1.0 * unit(2) + 5.0 * unit(5);
  // det [[2,-1],[3,5]] = 13.
  CHECK(ev(m14, {x, y}) == doctest::Approx(13.0).epsilon(1e-14));
}

TEST_CASE("wedge product is graded and matches index concatenation") {
  const AltForm a = mono({1});
  const AltForm b = mono({4});
  CHECK((wedge(a, b) - mono({1, 4})).max_abs_coefficient() < 1e-15);
  CHECK((wedge(b, a) + mono({1, 4})).max_abs_coefficient() < 1e-15);
  // (m1^m4) ^ (m2^m5) = + m1^m2^m4^m5 reordering sign check.
  const AltForm w = wedge(mono({1, 4}), mono({2, 5}));
  CHECK(std::abs(ev(w, {unit(2), unit(3), unit(5), unit(6)}) - (-1.0)) <
        1e-14);
  // Even-degree forms commute.
  CHECK((wedge(mono({1, 4}), mono({2, 5})) - wedge(mono({2, 5}), mono({1, 4})))
            .max_abs_coefficient() < 1e-15);
}

TEST_CASE("interior product contracts the first slot") {
  const AltForm m14 = mono({1, 4});
  Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
  v[0] = 1.0;  // m1 direction in complement coordinates
  const AltForm c = m14.interior(v);
  CHECK(c.degree() == 1);
  CHECK(std::abs(ev(c, {unit(5)}) - 1.0) < 1e-15);
}

TEST_CASE("structure equations for the coframe") {
  const double s3 = std::sqrt(3.0);
  auto d1 = [](int i) {
    return AltForm::dual(Space::kFull8, i);
  };
  auto w2 = [&](int i, int j) { return wedge(d1(i), d1(j)); };
  // Global indices: 0 h1, 1 h2, 2..7 m1..m6.
  struct Eq {
    int lhs;
    AltForm rhs;
  };
  const std::vector<Eq> eqs = {
      {0, -1.0 * w2(2, 5) - w2(3, 6) - 2.0 * w2(4, 7)},
      {1, s3 * w2(2, 5) - s3 * w2(3, 6)},
      {2, w2(0, 5) - s3 * w2(1, 5) + w2(3, 4) + w2(6, 7)},
      {3, w2(0, 6) + s3 * w2(1, 6) - w2(2, 4) - w2(5, 7)},
      {4, 2.0 * w2(0, 7) + w2(2, 3) - w2(5, 6)},
      {5, -1.0 * w2(0, 2) + s3 * w2(1, 2) + w2(3, 7) + w2(4, 6)},
      {6, -1.0 * w2(0, 3) - s3 * w2(1, 3) - w2(2, 7) - w2(4, 5)},
      {7, -2.0 * w2(0, 4) + w2(2, 6) - w2(3, 5)},
  };
  for (const auto& eq : eqs) {
    const AltForm d = d1(eq.lhs).ce_differential();
    CHECK(d.max_coefficient_difference(eq.rhs) < 1e-13);
  }
}

TEST_CASE("the differential squares to zero on the coframe") {
  for (int i = 0; i < 8; ++i) {
    const AltForm dd =
        AltForm::dual(Space::kFull8, i).ce_differential().ce_differential();
    CHECK(dd.max_abs_coefficient() < 1e-13);
  }
}

TEST_CASE("differential is an antiderivation on products") {
  const AltForm a = AltForm::dual(Space::kFull8, 2);  // m1 dual
  const AltForm b = AltForm::dual(Space::kFull8, 5);  // m4 dual
  const AltForm lhs = wedge(a, b).ce_differential();
  const AltForm rhs = wedge(a.ce_differential(), b) -
                      wedge(a, b.ce_differential());
  CHECK(lhs.max_coefficient_difference(rhs) < 1e-13);
}

TEST_CASE("complement forms extend to the full space consistently") {
  const AltForm small = mono({1, 4}) + 2.0 * mono({2, 5});
  const AltForm big = small.extend();
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec8 x = su3::project_m(rng.random_algebra());
    const Vec8 y = su3::project_m(rng.random_algebra());
    CHECK(std::abs(ev(small, {x, y}) - ev(big, {x, y})) < 1e-12);
  }
}

TEST_CASE("arity and space mismatches are rejected") {
  const AltForm m14 = mono({1, 4});
  CHECK_THROWS_AS(ev(m14, {unit(2)}), ArityMismatch);
  const AltForm full = AltForm::dual(Space::kFull8, 0);
  CHECK_THROWS_AS(wedge(m14, full), SpaceMismatch);
  CHECK_THROWS_AS(m14.max_coefficient_difference(full), SpaceMismatch);
}
