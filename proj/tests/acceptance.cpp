// Acceptance gate: twelve end-to-end criteria covering the algebra, the
// differential system, the nearly Kaehler identities, the normal-form
// machinery, second fundamental forms, induced curvature, orbit types, path
// development, and the classification scan.  One line per criterion; the
// process exits nonzero if any criterion fails.
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nkflag/cartan.hpp"
#include "nkflag/errors.hpp"
#include "nkflag/forms.hpp"
#include "nkflag/frames.hpp"
#include "nkflag/nk.hpp"
#include "nkflag/su3.hpp"
#include "nkflag/submanifold.hpp"

namespace {

using namespace nkflag;
using frames::LagrangianPlane;
using submanifold::AngleDerivatives;
using submanifold::ConstantFrame;
using submanifold::OrbitGeometry;

const double kS2 = std::sqrt(2.0);
const double kS3 = std::sqrt(3.0);

Vec8 unit(int i) { return Vec8::Unit(i); }

int g_failures = 0;

void line(int k, bool pass, const std::string& text) {
  std::printf("CRITERION %2d: %s — %s\n", k, pass ? "PASS" : "FAIL",
              text.c_str());
  if (!pass) ++g_failures;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double maxdiff(const Mat3c& a, const Mat3c& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

std::array<Vec8, 3> gen_f12r3() { return {unit(2), unit(3), unit(4)}; }
std::array<Vec8, 3> gen_s3() {
  return {unit(2) + unit(3), -unit(5) + unit(6), unit(7) - kS3 * unit(1)};
}
std::array<Vec8, 3> gen_rp3() {
  Vec8 y1 = kS2 * unit(0) + (unit(2) + unit(3)) / kS2;
  Vec8 y2 = kS2 * unit(1) + (unit(2) - unit(3)) / std::sqrt(6.0) +
            std::sqrt(2.0 / 3.0) * unit(7);
  Vec8 y3 = (unit(4) - unit(5) + unit(6)) / kS3;
  return {y1, y2, y3};
}

LagrangianPlane plane_of(const std::array<Vec8, 3>& g) {
  return LagrangianPlane::from_m_span(g[0], g[1], g[2]);
}

LagrangianPlane random_special_plane(Rng& rng) {
  const auto f = frames::frame_from_angles(rng.uniform(0.0, M_PI),
                                           rng.uniform(0.0, M_PI / 2),
                                           rng.uniform(0.0, M_PI));
  const auto p = LagrangianPlane::from_orthonormal(f[0], f[1], f[2]);
  nk::IsotropyElement e;
  e.t1 = rng.uniform(-M_PI, M_PI);
  e.t2 = rng.uniform(-M_PI, M_PI);
  e.sigma = int(rng.uniform(0.0, 24.0)) % 24;
  return frames::symmetry_action(e, p);
}

// ---------------------------------------------------------------------------

void criterion_1() {
  double dev = 0.0;
  const auto& B = su3::basis();
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      dev = std::max(dev, std::abs(-su3::killing(B[i], B[j]) / 12.0 -
                                   (i == j ? 1.0 : 0.0)));
  line(1, dev < 1e-13,
       "basis orthonormality: Gram matrix of (h1, h2, m1..m6) under "
       "-(1/12) of the trace form is the identity (max deviation " +
           num(dev) + ", tolerance 1e-13)");
}

void criterion_2() {
  using M = std::vector<std::pair<std::vector<int>, double>>;
  const std::array<M, 8> table = {
      M{{{2, 5}, -1.0}, {{3, 6}, -1.0}, {{4, 7}, -2.0}},
      M{{{2, 5}, kS3}, {{3, 6}, -kS3}},
      M{{{0, 5}, 1.0}, {{1, 5}, -kS3}, {{3, 4}, 1.0}, {{6, 7}, 1.0}},
      M{{{0, 6}, 1.0}, {{1, 6}, kS3}, {{2, 4}, -1.0}, {{5, 7}, -1.0}},
      M{{{0, 7}, 2.0}, {{2, 3}, 1.0}, {{5, 6}, -1.0}},
      M{{{0, 2}, -1.0}, {{1, 2}, kS3}, {{3, 7}, 1.0}, {{4, 6}, 1.0}},
      M{{{0, 3}, -1.0}, {{1, 3}, -kS3}, {{2, 7}, -1.0}, {{4, 5}, -1.0}},
      M{{{0, 4}, -2.0}, {{2, 6}, 1.0}, {{3, 5}, -1.0}},
  };
  double dev = 0.0;
  for (int i = 0; i < 8; ++i) {
    AltForm want(Space::kFull8, 2);
    for (const auto& term : table[i])
      want = want + AltForm::monomial(Space::kFull8, term.first, term.second);
    dev = std::max(dev, AltForm::dual(Space::kFull8, i)
                            .ce_differential()
                            .max_coefficient_difference(want));
  }
  line(2, dev < 1e-13,
       "all eight structure equations of the coframe reproduced "
       "coefficient-exactly by the algebraic differential (max deviation " +
           num(dev) + ", tolerance 1e-13)");
}

void criterion_3() {
  const double d1 =
      nk::omega_nk().extend().ce_differential().max_coefficient_difference(
          3.0 * nk::re_upsilon().extend());
  const double d2 =
      nk::im_upsilon().extend().ce_differential().max_coefficient_difference(
          -2.0 * nk::omega_nk().wedge(nk::omega_nk()).extend());
  const double d3 =
      nk::omega_k(2.0).extend().ce_differential().max_abs_coefficient();
  const double dev = std::max({d1, d2, d3});
  line(3, dev < 1e-13,
       "d omega = 3 Re Upsilon, d Im Upsilon = -2 omega ^ omega, and the "
       "weight-2 compatible two-form is closed (max deviation " + num(dev) +
           ", tolerance 1e-13)");
}

void criterion_4() {
  Rng rng(41);
  double nabla_dev = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Vec8 x = rng.random_m_direction();
    nabla_dev = std::max(nabla_dev, nk::nabla_g_J(x, x).norm());
  }

  // The torsion of the canonical connection couples to J as the real part
  // of the complex volume form with coefficient one; the companion exterior
  // identity d omega = 3 Re Upsilon carries the factor three.
  AltForm coupled(Space::kComplement6, 3);
  const Mat6& J = nk::J_nk();
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      for (int k = j + 1; k < 6; ++k) {
        const Vec6 br = su3::m_part(
            su3::project_m(su3::bracket8(unit(2 + i), unit(2 + j))));
        const double c = br.dot(J.col(k));
        if (std::abs(c) > 1e-15)
          coupled =
              coupled + AltForm::monomial(Space::kComplement6, {i, j, k}, c);
      }
  const double couple_dev =
      coupled.max_coefficient_difference(nk::re_upsilon());
  const double domega_dev =
      nk::omega_nk().extend().ce_differential().max_coefficient_difference(
          3.0 * nk::re_upsilon().extend());
  const bool pass =
      nabla_dev < 1e-12 && couple_dev < 1e-13 && domega_dev < 1e-13;
  line(4, pass,
       "(nabla_X J) X = 0 over 1000 random directions (max " +
           num(nabla_dev) +
           ", tolerance 1e-12); the skew torsion couples as g([x,y]_m, Jz) "
           "= Re Upsilon coefficient-exactly (deviation " +
           num(couple_dev) +
           ") while its exterior companion d omega = 3 Re Upsilon carries "
           "the factor three (deviation " +
           num(domega_dev) + ", tolerance 1e-13)");
}

void criterion_5() {
  const auto ts = nk::three_symmetry_report();
  const double dev =
      std::max({ts.cube_residual, ts.fixes_h_residual, ts.j_residual});
  line(5, dev < 1e-12,
       "the order-three symmetry cubes to the identity, fixes the torus "
       "directions, and recovers J as (delta - delta^2)/sqrt(3) (max "
       "deviation " + num(dev) + ", tolerance 1e-12)");
}

void criterion_6() {
  Rng rng(66);
  double dev = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto p = random_special_plane(rng);
    const auto nf = frames::normalize_plane(p);
    dev = std::max(dev, nf.residual);
    dev = std::max(dev, std::abs(std::cos(nf.alpha - nf.theta)));
    const frames::Mat63 Bn = frames::normal_basis(nf);
    const auto q = LagrangianPlane::from_m_span(
        su3::from_m_part(Bn.col(0)), su3::from_m_part(Bn.col(1)),
        su3::from_m_part(Bn.col(2)));
    dev = std::max(dev, q.distance_to(p));
    const auto nf2 = frames::normalize_plane(q);
    dev = std::max({dev, std::abs(nf2.theta - nf.theta),
                    std::abs(nf2.beta - nf.beta),
                    std::abs(nf2.phi - nf.phi)});
  }
  line(6, dev < 1e-9,
       "1000 random special Lagrangian planes: the normal form reproduces "
       "the plane, is idempotent, and locks the phase cos(alpha - theta) = "
       "0 (max deviation " + num(dev) + ", tolerance 1e-9)");
}

void criterion_7() {
  ConstantFrame f_coord;
  f_coord.theta = M_PI / 2;
  f_coord.beta = M_PI / 2;
  f_coord.phi = 0.0;
  ConstantFrame f_round;
  f_round.theta = 0.0;
  f_round.beta = M_PI / 2;
  f_round.phi = 3 * M_PI / 4;
  f_round.l(1, 2) = -kS3;
  const double tg_dev = std::max(submanifold::sff_generic(f_coord).norm(),
                                 submanifold::sff_generic(f_round).norm());

  ConstantFrame f_tw;
  f_tw.theta = M_PI / 2;
  f_tw.beta = std::asin(-1.0 / kS3);
  f_tw.phi = M_PI / 4;
  f_tw.l(0, 0) = kS2;
  f_tw.l(1, 1) = -kS2;
  const auto h = submanifold::sff_generic(f_tw);
  double pat_dev = std::abs(h.h[0][0][0] - kS2);
  pat_dev = std::max(pat_dev, std::abs(h.h[0][1][1] + kS2));
  pat_dev = std::max(pat_dev, std::abs(h.h[1][0][1] + kS2));
  pat_dev = std::max(pat_dev, std::abs(h.h[1][1][0] + kS2));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const bool listed = (i == 0 && j == 0 && k == 0) ||
                            (i == 0 && j == 1 && k == 1) ||
                            (i == 1 && j == 0 && k == 1) ||
                            (i == 1 && j == 1 && k == 0);
        if (!listed) pat_dev = std::max(pat_dev, std::abs(h.h[i][j][k]));
      }
  pat_dev = std::max(pat_dev, h.max_symmetry_defect());
  pat_dev = std::max(pat_dev, h.max_trace_defect());

  Rng rng(77);
  double agree_dev = 0.0;
  for (int t = 0; t < 50; ++t) {
    ConstantFrame f;
    f.theta = rng.uniform(-M_PI, M_PI);
    f.beta = rng.uniform(-M_PI / 2, M_PI / 2);
    f.phi = rng.uniform(0.0, M_PI);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 3; ++c) f.l(r, c) = rng.uniform(-2.0, 2.0);
    agree_dev = std::max(agree_dev,
                         submanifold::sff_generic(f).max_difference(
                             submanifold::sff_closed_form(f, {})));
  }

  auto field = [](const Eigen::Vector3d& u) {
    ConstantFrame f;
    f.theta = 0.8 + 0.15 * u[0] + 0.10 * u[1] - 0.05 * u[2];
    f.beta = 0.6 - 0.07 * u[0] + 0.10 * u[2];
    f.phi = 0.5 + 0.12 * u[1] + 0.06 * u[2];
    return f;
  };
  AngleDerivatives d;
  d.dtheta = Eigen::Vector3d(0.15, 0.10, -0.05);
  d.dbeta = Eigen::Vector3d(-0.07, 0.0, 0.10);
  d.dphi = Eigen::Vector3d(0.0, 0.12, 0.06);
  const Eigen::Vector3d center(0.2, -0.1, 0.3);
  const auto exact = submanifold::sff_closed_form(field(center), d);
  auto err_at = [&](double step) {
    const auto P = submanifold::PatchFrame::sample(
        field, center - step * Eigen::Vector3d::Ones(), step, {3, 3, 3});
    return submanifold::sff_generic(P, {1, 1, 1}).max_difference(exact);
  };
  const double ratio = err_at(0.08) / err_at(0.04);

  const bool pass = tg_dev < 1e-12 && pat_dev < 1e-10 && agree_dev < 1e-9 &&
                    ratio > 3.0 && ratio < 5.0;
  line(7, pass,
       "second fundamental forms: the coordinate and round orbits are "
       "totally geodesic (max " + num(tg_dev) +
           ", tolerance 1e-12); the twisted orbit carries the symmetric "
           "trace-free pattern h_11^1 = sqrt(2), h_12^2 orbit = -sqrt(2) "
           "(deviation " + num(pat_dev) +
           ", tolerance 1e-10); generic and closed-form computations agree "
           "on random constant frames (max " + num(agree_dev) +
           ", tolerance 1e-9) and sampled patches converge at second order "
           "(error ratio " + num(ratio) + " for halved spacing)");
}

void criterion_8() {
  Rng rng(88);
  OrbitGeometry coord(gen_f12r3());
  double sec_dev = 0.0;
  for (int t = 0; t < 100; ++t) {
    Eigen::Vector3d x, y;
    for (int i = 0; i < 3; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
    }
    sec_dev = std::max(sec_dev, std::abs(coord.sectional(x, y) - 0.25));
  }

  OrbitGeometry round(gen_s3());
  const Eigen::Vector3d rev = round.relative_eigenvalues();
  double metric_dev = std::max({std::abs(rev[0] - 0.25),
                                std::abs(rev[1] - 1.0),
                                std::abs(rev[2] - 1.0)});
  metric_dev = std::max(metric_dev, std::abs(round.fiber_metric_ratio() - 0.25));

  OrbitGeometry twisted(gen_rp3());
  const Eigen::Vector3d tev = twisted.relative_eigenvalues();
  metric_dev = std::max({metric_dev, std::abs(tev[0] - 1.0 / 3.0),
                         std::abs(tev[1] - 1.0 / 3.0),
                         std::abs(tev[2] - 1.0)});
  metric_dev = std::max(metric_dev, std::abs(twisted.fiber_metric_ratio() - 3.0));

  double ref_dev = 0.0;
  OrbitGeometry round_ref = round.bi_invariant_reference();
  OrbitGeometry twisted_ref = twisted.bi_invariant_reference();
  for (int t = 0; t < 100; ++t) {
    Eigen::Vector3d x, y;
    for (int i = 0; i < 3; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
    }
    ref_dev = std::max(ref_dev, std::abs(round_ref.sectional(x, y) - 1.0));
    ref_dev = std::max(ref_dev, std::abs(twisted_ref.sectional(x, y) - 0.25));
  }

  double hol_dev = 0.0;
  for (int t = 0; t < 100; ++t) {
    Vec6 x = Vec6::Zero();
    x[0] = rng.normal();
    x[1] = rng.normal();
    x[3] = rng.normal();
    x[4] = rng.normal();
    x.normalize();
    hol_dev = std::max(
        hol_dev, std::abs(submanifold::base_holomorphic_sectional(x) - 4.0));
  }

  const bool pass = sec_dev < 1e-9 && metric_dev < 1e-10 && ref_dev < 1e-9 &&
                    hol_dev < 1e-9;
  line(8, pass,
       "induced curvature: the coordinate orbit has constant sectional "
       "curvature of magnitude 1/4 over 100 random planes (spread " +
           num(sec_dev) +
           ", tolerance 1e-9; the value is +1/4 in the commutator "
           "convention, -1/4 in the opposite); the round and twisted orbit "
           "metrics carry eigenvalue ratios 1/4 and 3 against their "
           "bi-invariant references (deviation " + num(metric_dev) +
           ", tolerance 1e-10; reference curvatures 1 and 1/4, spread " +
           num(ref_dev) +
           "); the projective base has holomorphic sectional curvature of "
           "magnitude 4 (deviation " + num(hol_dev) + ", tolerance 1e-9)");
}

void criterion_9() {
  const auto shape = submanifold::cp2_shape_operator(gen_rp3());
  const double dev =
      std::max({std::abs(shape.eigenvalues[0] - 4.0 * kS2),
                std::abs(shape.eigenvalues[1] + kS2),
                std::abs(shape.eigenvalues[2] - 1.0 / kS2)});
  const double align_dev = std::abs(shape.structure_alignment - 1.0);
  line(9, dev < 1e-9 && align_dev < 1e-9,
       "the projected twisted orbit is a hypersurface with principal "
       "curvatures 4 sqrt(2), -sqrt(2), 1/sqrt(2) up to a global "
       "orientation sign (max deviation " + num(dev) +
           ", tolerance 1e-9), and the 4 sqrt(2) direction is the "
           "structure vector J nu (alignment defect " + num(align_dev) +
           ")");
}

void criterion_10() {
  const auto st_round = frames::stabilizer(plane_of(gen_s3()));
  const bool round_ok =
      st_round.continuous_dim == 1 &&
      std::abs(st_round.h_generator.normalized()[0]) < 1e-8;

  const auto st_coord = frames::stabilizer(plane_of(gen_f12r3()));
  const bool coord_ok =
      st_coord.discrete_order == 24 && st_coord.label == "D";

  const auto st_tw = frames::stabilizer(plane_of(gen_rp3()));
  const bool tw_ok = st_tw.discrete_order == 3 && st_tw.label == "Z3";

  line(10, round_ok && coord_ok && tw_ok,
       "orbit types: the round orbit has a one-dimensional stabilizer "
       "along the second torus direction (" +
           std::string(round_ok ? "confirmed" : "violated") +
           "); the coordinate orbit the 24-element signed-permutation "
           "group (" + std::string(coord_ok ? "confirmed" : "violated") +
           "); the twisted orbit an order-three stabilizer (measured "
           "discrete order " + std::to_string(st_tw.discrete_order) +
           ", expected 3: the order-three cycle extends by three "
           "involutions that are symmetries of the plane, so the plane "
           "stabilizer is the six-element dihedral group and the "
           "order-three count is not attained)");
}

void criterion_11() {
  // The path confined to the first torus direction with time-varying
  // coefficient: alpha(t) = cos(t) h1, exact endpoint exp(sin(T) h1).  (A
  // constant coefficient integrates to quadrature exactness and shows no
  // truncation order at all.)
  auto alpha = [](double t) -> Vec8 { return std::cos(t) * unit(0); };
  const double T = 2.0;
  const Mat3c ref = su3::exp_coeffs(std::sin(T) * unit(0));
  auto err = [&](int n) {
    return maxdiff(
        cartan::integrate_path(alpha, Mat3c::Identity(), T, n).endpoint, ref);
  };
  const double e32 = err(32), e64 = err(64), e128 = err(128);
  const double r1 = e32 / e64, r2 = e64 / e128;
  const bool order_ok = r1 > 14.0 && r1 < 18.0 && r2 > 14.0 && r2 < 18.0;

  auto alpha_const = [](double) -> Vec8 { return unit(0); };
  const double const_dev =
      maxdiff(cartan::integrate_path(alpha_const, Mat3c::Identity(),
                                     2.0 * M_PI / 3.0, 48)
                  .endpoint,
              su3::exp_coeffs((2.0 * M_PI / 3.0) * unit(0)));

  Rng rng(111);
  const Mat3c g0 = rng.haar_su3();
  auto field = [](const Eigen::Vector3d& u) {
    const auto f = frames::frame_from_angles(
        0.3 + 0.2 * u(0), 0.8 + 0.1 * u(1), 0.4 + 0.15 * u(2));
    return std::array<Vec8, 3>{f[0], f[1], f[2]};
  };
  const auto F1 =
      cartan::FramedPatch::sample(3, {4, 4, 4}, {0.07, 0.07, 0.07}, field);
  auto F2 = F1;
  F2.anchor = g0 * F1.anchor;
  const auto c = cartan::congruence_test(F1, F2);
  const double witness_dev = maxdiff(c.witness, g0);

  // Flat loop: develop the pullback connection of an exact group-valued map
  // around a contractible square.
  const Vec8 X = 0.8 * unit(2) + 0.3 * unit(0) + 0.2 * unit(7);
  const Vec8 Y = 0.6 * unit(4) - 0.4 * unit(1) + 0.3 * unit(5);
  auto dexp_right = [](const Vec8& A, const Vec8& V) {
    Vec8 out = Vec8::Zero(), term = V;
    double fact = 1.0;
    for (int k = 0; k <= 26; ++k) {
      out += term / fact / double(k + 1);
      term = -su3::bracket8(A, term);
      fact *= double(k + 1);
    }
    return out;
  };
  auto pull = [&](double u1, double u2, const Vec8& V) -> Vec8 {
    return dexp_right(u1 * X + u2 * Y, V);
  };
  const double L = 0.4;
  const int N = 200;
  Mat3c g = Mat3c::Identity();
  auto run = [&](const std::function<Vec8(double)>& a) {
    g = cartan::integrate_path(a, g, L, N).endpoint;
  };
  run([&](double t) -> Vec8 { return pull(t, 0, X); });
  run([&](double t) -> Vec8 { return pull(L, t, Y); });
  run([&](double t) -> Vec8 { return -pull(L - t, L, X); });
  run([&](double t) -> Vec8 { return -pull(0, L - t, Y); });
  const double hol_dev = maxdiff(g, Mat3c::Identity());

  const bool pass = order_ok && const_dev < 1e-12 && witness_dev < 1e-9 &&
                    hol_dev < 1e-6;
  line(11, pass,
       "path development: fourth-order convergence on the first-torus-"
       "direction path with cosine coefficient (halving ratios " + num(r1) +
           ", " + num(r2) +
           ", window 16 +/- 2; the constant-coefficient path integrates "
           "exactly, deviation " + num(const_dev) +
           "); left-translation congruence recovers the witness element "
           "(deviation " + num(witness_dev) +
           ", tolerance 1e-9); flat-loop holonomy vanishes (deviation " +
           num(hol_dev) + ", tolerance 1e-6)");
}

void criterion_12() {
  submanifold::ScanConfig cfg;
  cfg.workers = 4;
  const auto res = submanifold::homogeneous_scan(cfg);
  const bool families_ok =
      res.families == std::vector<std::string>{"f12r3", "rp3", "s3"};
  std::string fams;
  for (const auto& f : res.families) fams += (fams.empty() ? "" : ", ") + f;
  line(12, families_ok && res.anomalies == 0,
       "the default scan over the angle grid and connection coefficients "
       "finds exactly the three known families — the coordinate orbit, the "
       "round orbit, and the twisted orbit (found: " + fams + "; " +
           std::to_string(res.hits.size()) + " refined solutions, " +
           std::to_string(res.anomalies) + " unexplained)");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  std::printf("ACCEPTANCE: %d/12 criteria passed\n", 12 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
