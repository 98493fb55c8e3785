#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "nkflag/cartan.hpp"
#include "nkflag/errors.hpp"
#include "nkflag/frames.hpp"
#include "nkflag/nk.hpp"
#include "nkflag/su3.hpp"

using namespace nkflag;
using cartan::FramedPatch;
using frames::LagrangianPlane;

namespace {

Vec8 unit(int i) { return Vec8::Unit(i); }
const double kS2 = std::sqrt(2.0);
const double kS3 = std::sqrt(3.0);

double maxdiff(const Mat3c& a, const Mat3c& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Ad(g) on coefficient vectors.
Vec8 ad_vec(const Mat3c& g, const Vec8& x) {
  return su3::decompose(g * su3::from_coeffs(x) * g.adjoint());
}

// Ad(g) restricted to the complement, as a 6x6 matrix.
Mat6 ad_m_matrix(const Mat3c& g) {
  Mat6 M;
  for (int k = 0; k < 6; ++k) M.col(k) = su3::m_part(ad_vec(g, unit(2 + k)));
  return M;
}

// The diagonal torus element of the group whose induced block rotations on
// (m1,m4), (m2,m5), (m3,m6) have angles (t1, t2, t1+t2): with x = (t1+t2)/2
// and y = (t2-t1)/6 it is exp(x h1 + sqrt(3) y h2).
Mat3c torus_group_element(double t1, double t2) {
  const double x = 0.5 * (t1 + t2), y = (t2 - t1) / 6.0;
  Mat3c g = Mat3c::Zero();
  g(0, 0) = std::polar(1.0, y - x);
  g(1, 1) = std::polar(1.0, -2.0 * y);
  g(2, 2) = std::polar(1.0, x + y);
  return g;
}

// Searches for a group element (signed permutation times torus) whose
// adjoint action on the complement equals the stabilizer representation of
// e.  Returns identity-anchored failure as nullopt-like flag via ok.
struct Realization {
  bool ok = false;
  Mat3c g = Mat3c::Identity();
};
Realization realize_by_translation(const nk::IsotropyElement& e) {
  Realization out;
  const Mat6 want = nk::iso_rep(e);
  const auto& sp = nk::signed_permutations();
  for (int wi = 0; wi < 24; ++wi) {
    const Mat3c w = sp[wi].cast<std::complex<double>>();
    const Mat6 T = want * ad_m_matrix(w).transpose();
    const double t1 = std::atan2(T(3, 0), T(0, 0));
    const double t2 = std::atan2(T(4, 1), T(1, 1));
    if ((T - nk::iso_torus(t1, t2)).cwiseAbs().maxCoeff() < 1e-10) {
      out.ok = true;
      out.g = torus_group_element(t1, t2) * w;
      return out;
    }
  }
  return out;
}

// Same search against the composition with complex conjugation (an isometry
// of the coset space fixing the base point that is not a translation).
bool realizable_by_conjugation(const nk::IsotropyElement& e) {
  const Mat6 want = nk::iso_rep(e);
  Mat6 tau = Mat6::Identity();
  tau(3, 3) = tau(4, 4) = tau(5, 5) = -1.0;
  const auto& sp = nk::signed_permutations();
  for (int wi = 0; wi < 24; ++wi) {
    const Mat3c w = sp[wi].cast<std::complex<double>>();
    const Mat6 T = want * (ad_m_matrix(w) * tau).transpose();
    const double t1 = std::atan2(T(3, 0), T(0, 0));
    const double t2 = std::atan2(T(4, 1), T(1, 1));
    if ((T - nk::iso_torus(t1, t2)).cwiseAbs().maxCoeff() < 1e-10) return true;
  }
  return false;
}

// d exp: the right logarithmic derivative of u -> exp(A(u)) in direction V
// at A, i.e. sum_k (-ad_A)^k(V) / (k+1)!.
Vec8 dexp_right(const Vec8& A, const Vec8& V) {
  Vec8 out = Vec8::Zero(), term = V;
  double fact = 1.0;
  for (int k = 0; k <= 26; ++k) {
    out += term / fact / double(k + 1);
    term = -su3::bracket8(A, term);
    fact *= double(k + 1);
  }
  return out;
}

// Exactly flat 2-parameter field: the pullback of the group's canonical form
// under (u1, u2) -> exp(u1 X + u2 Y).
struct FlatField {
  Vec8 X = 0.8 * unit(2) + 0.3 * unit(0) + 0.2 * unit(7);
  Vec8 Y = 0.6 * unit(4) - 0.4 * unit(1) + 0.3 * unit(5);
  std::array<Vec8, 3> operator()(const Eigen::Vector3d& u) const {
    const Vec8 A = u(0) * X + u(1) * Y;
    return {dexp_right(A, X), dexp_right(A, Y), Vec8::Zero()};
  }
};

const std::array<Vec8, 3> kGenS3 = {(unit(2) + unit(3)) / kS2,
                                    (-unit(5) + unit(6)) / kS2,
                                    (unit(7) - kS3 * unit(1)) / 2.0};

std::array<Vec8, 3> gen_rp3() {
  Vec8 y1 = kS2 * unit(0) + (unit(2) + unit(3)) / kS2;
  Vec8 y2 = kS2 * unit(1) + (unit(2) - unit(3)) / std::sqrt(6.0) +
            std::sqrt(2.0 / 3.0) * unit(7);
  Vec8 y3 = (unit(4) - unit(5) + unit(6)) / kS3;
  return {y1, y2, y3};
}

LagrangianPlane plane_rp3() {
  return LagrangianPlane::from_m_span(
      unit(2) + unit(3), (unit(2) - unit(3)) / kS3 + 2.0 / kS3 * unit(7),
      unit(4) - unit(5) + unit(6));
}

}  // namespace

TEST_CASE("one-parameter patches have no flatness defect by degree") {
  const std::array<Vec8, 3> a{0.7 * unit(2), Vec8::Zero(), Vec8::Zero()};
  const auto F = FramedPatch::constant(1, {5, 1, 1}, {0.1, 0.1, 0.1}, a);
  const auto r = cartan::mc_residual(F);
  CHECK(r.max_residual == 0.0);
  CHECK(r.mean_residual == 0.0);
}

TEST_CASE("constant commuting-free slots fail flatness by exactly the bracket "
          "norm") {
  const std::array<Vec8, 3> a{unit(2), unit(3), Vec8::Zero()};
  const auto F = FramedPatch::constant(2, {6, 5, 1}, {0.2, 0.3, 0.1}, a);
  const auto r = cartan::mc_residual(F);
  // d alpha = 0, so the residual is |[m1, m2]| = |-m3| = 1 at every node.
  CHECK(r.max_residual == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.mean_residual == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact-pullback fields have flatness residual of quadratic order "
          "in the grid spacing") {
  FlatField field;
  const auto F1 = FramedPatch::sample(2, {5, 5, 1}, {0.05, 0.05, 0.05}, field);
  const auto F2 =
      FramedPatch::sample(2, {9, 9, 1}, {0.025, 0.025, 0.025}, field);
  const auto r1 = cartan::mc_residual(F1);
  const auto r2 = cartan::mc_residual(F2);
  CHECK(r1.max_residual < 1e-3);
  CHECK(r1.max_residual > 1e-5);  // pure discretization error, not zero
  const double ratio = r1.max_residual / r2.max_residual;
  CHECK(ratio > 3.2);
  CHECK(ratio < 4.8);
  const double mean_ratio = r1.mean_residual / r2.mean_residual;
  CHECK(mean_ratio > 3.2);
  CHECK(mean_ratio < 4.8);
}

TEST_CASE("flatness residual requires three nodes per participating axis") {
  const std::array<Vec8, 3> a{unit(2), unit(3), Vec8::Zero()};
  CHECK_THROWS_AS(
      cartan::mc_residual(FramedPatch::constant(2, {2, 5, 1}, {0.1, 0.1, 0.1}, a)),
      GridTooSmall);
  CHECK_THROWS_AS(
      cartan::mc_residual(FramedPatch::constant(3, {3, 3, 2}, {0.1, 0.1, 0.1}, a)),
      GridTooSmall);
}

TEST_CASE("the constant first-torus generator integrates to the "
          "three-symmetry group element exactly") {
  auto alpha = [](double) -> Vec8 { return unit(0); };
  const double T = 2.0 * M_PI / 3.0;
  const Mat3c want = su3::exp_coeffs(T * unit(0));
  for (int steps : {7, 24}) {
    const auto res =
        cartan::integrate_path(alpha, Mat3c::Identity(), T, steps);
    // Per-step exponential updates reproduce constant-generator paths with
    // no truncation error at any step count.
    CHECK(maxdiff(res.endpoint, want) < 1e-13);
    CHECK(res.unitarity_defect < 1e-13);
  }
  // The endpoint is the three-symmetry generator: conjugation by it has
  // order three on the algebra.
  const Mat3c g = cartan::integrate_path(alpha, Mat3c::Identity(), T, 24)
                      .endpoint;
  const Mat8 D = su3::adjoint_matrix(g);
  CHECK((D * D * D - Mat8::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((D - Mat8::Identity()).cwiseAbs().maxCoeff() > 0.5);
}

TEST_CASE("the zero form integrates to the constant initial frame") {
  Rng rng(11);
  const Mat3c g0 = rng.haar_su3();
  auto alpha = [](double) -> Vec8 { return Vec8::Zero(); };
  const auto res = cartan::integrate_path(alpha, g0, 3.0, 50);
  CHECK(maxdiff(res.endpoint, g0) < 1e-14);
  CHECK(res.unitarity_defect < 1e-13);
}

TEST_CASE("oversized steps are rejected, with the bound checked at the "
          "evaluation nodes") {
  auto alpha = [](double) -> Vec8 { return 10.0 * unit(2); };
  CHECK_THROWS_AS(
      cartan::integrate_path(alpha, Mat3c::Identity(), 1.0, 10), StepTooLarge);
  // 21 steps puts ||alpha|| h just under the bound.
  CHECK_NOTHROW(cartan::integrate_path(alpha, Mat3c::Identity(), 1.0, 21));
}

TEST_CASE("step halving divides the endpoint error by sixteen on a "
          "non-constant generator") {
  auto alpha = [](double t) -> Vec8 {
    return std::cos(t) * unit(2) + std::sin(t) * unit(3);
  };
  const Mat3c g0 = Mat3c::Identity();
  const Mat3c ref = cartan::integrate_path(alpha, g0, 2.0, 4096).endpoint;
  const double e32 =
      maxdiff(cartan::integrate_path(alpha, g0, 2.0, 32).endpoint, ref);
  const double e64 =
      maxdiff(cartan::integrate_path(alpha, g0, 2.0, 64).endpoint, ref);
  const double e128 =
      maxdiff(cartan::integrate_path(alpha, g0, 2.0, 128).endpoint, ref);
  CHECK(e32 > 1e-9);  // genuinely in the truncation-dominated regime
  CHECK(e32 / e64 > 14.5);
  CHECK(e32 / e64 < 17.5);
  CHECK(e64 / e128 > 14.5);
  CHECK(e64 / e128 < 17.5);
  // Structural unitarity: the defect before the final projection stays at
  // rounding level even over many steps.
  const auto res = cartan::integrate_path(alpha, g0, 2.0, 100);
  CHECK(res.unitarity_defect < 1e-12);
  CHECK((res.endpoint.adjoint() * res.endpoint - Mat3c::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("development reproduces ordered-exponential maps exactly along "
          "lattice paths") {
  const Vec8 X = 0.7 * unit(2) + 0.25 * unit(0);
  const Vec8 Y = 0.6 * unit(4) - 0.35 * unit(1) + 0.3 * unit(5);
  const Vec8 Z = 0.5 * unit(6) + 0.25 * unit(0);
  Rng rng(5);
  const Mat3c anchor = rng.haar_su3();
  // alpha of (u1,u2,u3) -> anchor exp(u1 X) exp(u2 Y) exp(u3 Z): constant in
  // the travel coordinate on every axis-ordered lattice segment, so the
  // two-node steps and the linear interpolation are both exact.
  auto field = [&](const Eigen::Vector3d& u) {
    const Mat3c gz = su3::exp_coeffs(-u(2) * Z);
    const Mat3c gy = su3::exp_coeffs(-u(1) * Y);
    return std::array<Vec8, 3>{ad_vec(gz, ad_vec(gy, X)), ad_vec(gz, Y), Z};
  };
  const auto F =
      FramedPatch::sample(3, {4, 4, 4}, {0.11, 0.13, 0.09}, field, anchor);
  for (const std::array<int, 3> node :
       {std::array<int, 3>{3, 2, 1}, {0, 3, 3}, {3, 3, 3}, {1, 0, 2}}) {
    const Mat3c want = anchor * su3::exp_coeffs(node[0] * 0.11 * X) *
                       su3::exp_coeffs(node[1] * 0.13 * Y) *
                       su3::exp_coeffs(node[2] * 0.09 * Z);
    CHECK(maxdiff(cartan::develop_to_node(F, node), want) < 1e-12);
  }
  CHECK(maxdiff(cartan::develop_to_node(F, {0, 0, 0}), anchor) < 1e-14);
  CHECK_THROWS_AS(cartan::develop_to_node(F, {4, 0, 0}), Error);
}

TEST_CASE("a flat square loop has holonomy at rounding level") {
  FlatField field;
  const double L = 0.4;
  const int N = 200;
  Mat3c g = Mat3c::Identity();
  auto run = [&](const std::function<Vec8(double)>& a) {
    g = cartan::integrate_path(a, g, L, N).endpoint;
  };
  run([&](double t) -> Vec8 { return field({t, 0, 0})[0]; });
  run([&](double t) -> Vec8 { return field({L, t, 0})[1]; });
  run([&](double t) -> Vec8 { return -field({L - t, L, 0})[0]; });
  run([&](double t) -> Vec8 { return -field({0, L - t, 0})[1]; });
  CHECK(maxdiff(g, Mat3c::Identity()) < 1e-9);  // claim level: 1e-6
}

TEST_CASE("a connection recovered from frame samples by differencing "
          "re-integrates to the sampled path") {
  const Vec8 X = 0.9 * unit(2) + 0.4 * unit(1);
  const Vec8 Y = 0.7 * unit(6) - 0.5 * unit(0) + 0.3 * unit(3);
  auto g_at = [&](double t) {
    return su3::exp_coeffs(0.8 * std::sin(t) * X + 0.5 * (1 - std::cos(t)) * Y);
  };
  // Five-point differencing of the sampled frames at the integration step.
  const double h = 1e-3;
  auto alpha_hat = [&](double t) {
    const Mat3c d = (-g_at(t + 2 * h) + 8.0 * g_at(t + h) - 8.0 * g_at(t - h) +
                     g_at(t - 2 * h)) /
                    (12.0 * h);
    return su3::decompose(g_at(t).adjoint() * d, 1e-5);
  };
  const auto res = cartan::integrate_path(alpha_hat, g_at(0.0), 1.0, 1000);
  CHECK(maxdiff(res.endpoint, g_at(1.0)) < 1e-7);
}

TEST_CASE("paths integrated inside an orbit subalgebra keep the normalized "
          "plane invariants constant") {
  struct Case {
    std::array<Vec8, 3> gen;
    double step;
  };
  const std::array<Vec8, 3> rp3 = gen_rp3();
  for (const auto& made : {Case{kGenS3, 0.35}, Case{rp3, 0.3}}) {
    const auto& Yg = made.gen;
    auto alpha = [&](double t) -> Vec8 {
      return std::cos(t) * Yg[0] + std::sin(t) * Yg[1];
    };
    const auto nf0 = frames::normalize_plane(
        LagrangianPlane::from_m_span(Yg[0], Yg[1], Yg[2]));
    for (int j = 1; j <= 5; ++j) {
      const Mat3c g =
          cartan::integrate_path(alpha, Mat3c::Identity(), made.step * j, 400)
              .endpoint;
      const Mat8 A = su3::adjoint_matrix(g);
      // Tangent plane of the orbit at the moved point, pulled back to the
      // base point: the complement part of Ad(g^{-1}) applied to the span.
      const Vec8 a0 = A.transpose() * Yg[0];
      const Vec8 a1 = A.transpose() * Yg[1];
      const Vec8 a2 = A.transpose() * Yg[2];
      const auto nf = frames::normalize_plane(LagrangianPlane::from_m_span(
          su3::project_m(a0), su3::project_m(a1), su3::project_m(a2)));
      CHECK(nf.k3 == nf0.k3);
      CHECK(std::abs(nf.theta - nf0.theta) < 1e-8);
      CHECK(std::abs(nf.beta - nf0.beta) < 1e-8);
      CHECK(std::abs(nf.phi - nf0.phi) < 1e-8);
    }
  }
}

TEST_CASE("left translation is detected as congruence and the witness is "
          "recovered") {
  Rng rng(77);
  const Mat3c g0 = rng.haar_su3();
  // A genuinely varying field of special Lagrangian frames.
  auto field = [](const Eigen::Vector3d& u) {
    const auto f = frames::frame_from_angles(0.3 + 0.2 * u(0),
                                             0.8 + 0.1 * u(1),
                                             0.4 + 0.15 * u(2));
    return std::array<Vec8, 3>{f[0], f[1], f[2]};
  };
  const auto F1 =
      FramedPatch::sample(3, {4, 4, 4}, {0.07, 0.07, 0.07}, field);
  auto F2 = F1;
  F2.anchor = g0 * F1.anchor;
  const auto rep = cartan::congruence_test(F1, F2);
  CHECK(rep.congruent);
  CHECK(rep.invariant_mismatch < 1e-12);
  CHECK(rep.witness_spread < 1e-10);
  CHECK(maxdiff(rep.witness, g0) < 1e-9);
}

TEST_CASE("patches over distinct orbit planes are not congruent") {
  auto constant_plane_patch = [](const LagrangianPlane& p) {
    std::array<Vec8, 3> a;
    for (int i = 0; i < 3; ++i) a[i] = su3::from_m_part(p.basis().col(i));
    return FramedPatch::constant(3, {3, 3, 3}, {0.05, 0.05, 0.05}, a);
  };
  const auto Fs3 = constant_plane_patch(LagrangianPlane::from_m_span(
      unit(2) + unit(3), -unit(5) + unit(6), unit(7)));
  const auto Ff = constant_plane_patch(LagrangianPlane::from_m_span(
      unit(4), unit(5), unit(6)));
  const auto rep = cartan::congruence_test(Fs3, Ff);
  CHECK_FALSE(rep.congruent);
  CHECK(rep.invariant_mismatch > 0.5);
}

TEST_CASE("the order-three plane stabilizer element acts as a congruence "
          "with itself as witness") {
  const auto p = plane_rp3();
  const auto rep = frames::stabilizer(p);
  REQUIRE(rep.discrete_order == 6);

  // Pick an order-three element (in the chart picture) and realize it as an
  // actual group element.
  Realization gamma;
  for (const auto& e : rep.elements) {
    if (e.sigma < 0) continue;
    const Mat3c C = nk::iso_chart_matrix(e);
    if (maxdiff(C * C * C, Mat3c::Identity()) > 1e-9) continue;
    if (maxdiff(C, Mat3c::Identity()) < 1e-9) continue;
    gamma = realize_by_translation(e);
    if (gamma.ok) {
      // The realization induces exactly the stabilizer representation.
      CHECK((ad_m_matrix(gamma.g) - nk::iso_rep(e)).cwiseAbs().maxCoeff() <
            1e-12);
      break;
    }
  }
  REQUIRE(gamma.ok);
  // Genuine order three in the group.
  CHECK(maxdiff(gamma.g * gamma.g * gamma.g, Mat3c::Identity()) < 1e-12);
  CHECK(maxdiff(gamma.g, Mat3c::Identity()) > 0.5);
  // It maps the plane to itself.
  const Mat6 R = ad_m_matrix(gamma.g);
  const auto q = LagrangianPlane::from_m_span(
      su3::from_m_part(R * p.basis().col(0)),
      su3::from_m_part(R * p.basis().col(1)),
      su3::from_m_part(R * p.basis().col(2)));
  CHECK(p.distance_to(q) < 1e-12);

  // Translating a framed patch over the plane by it is a congruence whose
  // recovered witness is the element itself.
  std::array<Vec8, 3> a;
  for (int i = 0; i < 3; ++i) a[i] = su3::from_m_part(p.basis().col(i));
  const auto F1 = FramedPatch::constant(3, {3, 3, 3}, {0.06, 0.06, 0.06}, a);
  auto F2 = F1;
  F2.anchor = gamma.g * F1.anchor;
  const auto crep = cartan::congruence_test(F1, F2);
  CHECK(crep.congruent);
  CHECK(maxdiff(crep.witness, gamma.g) < 1e-9);
}

TEST_CASE("the six plane stabilizer elements split three and three between "
          "translation and conjugation realizations") {
  const auto rep = frames::stabilizer(plane_rp3());
  REQUIRE(rep.discrete_order == 6);
  int by_translation = 0, by_conjugation = 0, both = 0;
  for (const auto& e : rep.elements) {
    const bool tr = e.sigma < 0 || realize_by_translation(e).ok;
    const bool cj = realizable_by_conjugation(e);
    by_translation += tr;
    by_conjugation += cj;
    both += tr && cj;
  }
  // The chart group D U(1)^2 sees both kinds of isometry; only half of this
  // plane's stabilizer consists of translations (the order-three subgroup),
  // the other half needs the conjugation isometry.
  CHECK(by_translation == 3);
  CHECK(by_conjugation == 3);
  CHECK(both == 0);
}

TEST_CASE("congruence requires identical three-parameter domains") {
  const std::array<Vec8, 3> a{unit(4), unit(5), unit(6)};
  const auto F3 = FramedPatch::constant(3, {3, 3, 3}, {0.1, 0.1, 0.1}, a);
  const auto F2d = FramedPatch::constant(2, {3, 3, 1}, {0.1, 0.1, 0.1}, a);
  CHECK_THROWS_AS(cartan::congruence_test(F2d, F2d), DomainMismatch);
  const auto F3b = FramedPatch::constant(3, {3, 3, 4}, {0.1, 0.1, 0.1}, a);
  CHECK_THROWS_AS(cartan::congruence_test(F3, F3b), DomainMismatch);
  auto F3c = F3;
  F3c.spacing = {0.1, 0.2, 0.1};
  CHECK_THROWS_AS(cartan::congruence_test(F3, F3c), DomainMismatch);
}
