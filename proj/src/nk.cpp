#include "nkflag/nk.hpp"

#include <cmath>

namespace nkflag {
namespace nk {
namespace {

constexpr double kSqrt3 = 1.7320508075688772935274463415059;

Mat6 make_J_nk() {
  Mat6 J = Mat6::Zero();
  // m1 -> m4, m2 -> m5, m3 -> -m6 and J^2 = -1.
  J(3, 0) = 1.0;
  J(4, 1) = 1.0;
  J(5, 2) = -1.0;
  J(0, 3) = -1.0;
  J(1, 4) = -1.0;
  J(2, 5) = 1.0;
  return J;
}

Mat6 make_J_k() {
  Mat6 J = make_J_nk();
  // Flip the (m3,m6) block.
  J(5, 2) = 1.0;
  J(2, 5) = -1.0;
  return J;
}

}  // namespace

const Mat6& J_nk() {
  static const Mat6 J = make_J_nk();
  return J;
}

const Mat6& J_k() {
  static const Mat6 J = make_J_k();
  return J;
}

Vec8 apply_m_operator(const Mat6& Op, const Vec8& x) {
  su3::require_in_m(x);
  return su3::from_m_part(Op * su3::m_part(x));
}

MetricTensor::MetricTensor(double a, double b, double c) : c1(a), c2(b), c3(c) {
  if (a <= 0.0 || b <= 0.0 || c <= 0.0) {
    throw DomainMismatch("metric block scalars must be strictly positive");
  }
}

Mat6 MetricTensor::matrix() const {
  Mat6 G = Mat6::Zero();
  G(0, 0) = G(3, 3) = c1;
  G(1, 1) = G(4, 4) = c2;
  G(2, 2) = G(5, 5) = c3;
  return G;
}

double MetricTensor::eval(const Vec6& x, const Vec6& y) const {
  return x.dot(matrix() * y);
}

AltForm weighted_two_form(double a, double b, double c) {
  // Indices on the complement: 0..5 = m1..m6.
  return AltForm::monomial(Space::kComplement6, {0, 3}, a) +
         AltForm::monomial(Space::kComplement6, {1, 4}, b) +
         AltForm::monomial(Space::kComplement6, {2, 5}, c);
}

AltForm omega_nk() { return weighted_two_form(1.0, 1.0, -1.0); }

AltForm omega_k(double c3) { return weighted_two_form(1.0, 1.0, c3); }

AltForm re_upsilon() {
  return AltForm::monomial(Space::kComplement6, {3, 4, 5}, 1.0) +
         AltForm::monomial(Space::kComplement6, {0, 1, 5}, -1.0) +
         AltForm::monomial(Space::kComplement6, {0, 2, 4}, -1.0) +
         AltForm::monomial(Space::kComplement6, {1, 2, 3}, 1.0);
}

AltForm im_upsilon() {
  return AltForm::monomial(Space::kComplement6, {0, 1, 2}, -1.0) +
         AltForm::monomial(Space::kComplement6, {0, 4, 5}, -1.0) +
         AltForm::monomial(Space::kComplement6, {1, 3, 5}, 1.0) +
         AltForm::monomial(Space::kComplement6, {2, 3, 4}, 1.0);
}

AltForm vol_m() {
  return AltForm::monomial(Space::kComplement6, {0, 1, 2, 3, 4, 5}, 1.0);
}

AltForm omega_cp2() {
  return AltForm::monomial(Space::kComplement6, {0, 3}, 1.0) +
         AltForm::monomial(Space::kComplement6, {1, 4}, -1.0);
}

AltForm torsion_three_form() { return im_upsilon() * (-1.0); }

Vec8 torsion(const Vec8& x, const Vec8& y) {
  su3::require_in_m(x);
  su3::require_in_m(y);
  return -su3::project_m(su3::bracket8(x, y));
}

Vec8 curvature_h(const Vec8& x, const Vec8& y) {
  su3::require_in_m(x);
  su3::require_in_m(y);
  return -su3::project_h(su3::bracket8(x, y));
}

Vec8 curvature_op(const Vec8& x, const Vec8& y, const Vec8& z) {
  return su3::bracket8(curvature_h(x, y), z);
}

Vec8 nabla_g_J(const Vec8& x, const Vec8& y) {
  const Mat6& J = J_nk();
  Vec8 t_xJy = torsion(x, apply_m_operator(J, y));
  Vec8 Jt_xy = apply_m_operator(J, torsion(x, y));
  return -0.5 * t_xJy + 0.5 * Jt_xy;
}

Mat8 three_symmetry() {
  Vec8 h1 = Vec8::Zero();
  h1[0] = 2.0943951023931954923084289221863;  // 2*pi/3
  return su3::adjoint_matrix(su3::exp_coeffs(h1));
}

ThreeSymmetryReport three_symmetry_report() {
  Mat8 d = three_symmetry();
  ThreeSymmetryReport r;
  r.cube_residual = (d * d * d - Mat8::Identity()).cwiseAbs().maxCoeff();
  r.fixes_h_residual =
      std::max((d.col(0) - Mat8::Identity().col(0)).cwiseAbs().maxCoeff(),
               (d.col(1) - Mat8::Identity().col(1)).cwiseAbs().maxCoeff());
  Mat8 j8 = (d - d * d) / kSqrt3;
  r.j_residual = (j8.block<6, 6>(2, 2) - J_nk()).cwiseAbs().maxCoeff();
  return r;
}

const std::array<Eigen::Matrix3d, 24>& signed_permutations() {
  static const std::array<Eigen::Matrix3d, 24> table = [] {
    std::array<Eigen::Matrix3d, 24> out;
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                             {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    int count = 0;
    for (const auto& p : perms) {
      for (int s = 0; s < 8; ++s) {
        Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
        for (int r = 0; r < 3; ++r) {
          double sign = (s >> r) & 1 ? -1.0 : 1.0;
          M(r, p[r]) = sign;
        }
        if (M.determinant() > 0.5) out[count++] = M;
      }
    }
    return out;
  }();
  return table;
}

IsotropyElement IsotropyElement::torus_xy(double x, double y) {
  IsotropyElement e;
  e.t1 = x - 3.0 * y;
  e.t2 = x + 3.0 * y;
  return e;
}

IsotropyElement IsotropyElement::identity() { return IsotropyElement{}; }

Mat6 iso_torus(double t1, double t2) {
  // Block angles (t1, t2, t1+t2) = (x-3y, x+3y, 2x); the chart coordinate on
  // the third block is conjugate-linear, so its chart phase is e^{-i(t1+t2)}.
  Mat6 M = Mat6::Zero();
  const double angles[3] = {t1, t2, t1 + t2};
  for (int b = 0; b < 3; ++b) {
    double c = std::cos(angles[b]), s = std::sin(angles[b]);
    M(b, b) = c;
    M(b + 3, b) = s;
    M(b, b + 3) = -s;
    M(b + 3, b + 3) = c;
  }
  return M;
}

Mat6 iso_torus_xy(double x, double y) {
  return iso_torus(x - 3.0 * y, x + 3.0 * y);
}

Mat6 iso_sigma(const Eigen::Matrix3d& sigma) {
  Mat6 P = Mat6::Zero();
  P.block<3, 3>(0, 0) = sigma;
  const Mat6& J = J_nk();
  return P - J * P * J;
}

Mat6 iso_rep(const IsotropyElement& e) {
  Mat6 M = iso_torus(e.t1, e.t2);
  if (e.sigma >= 0) M = M * iso_sigma(signed_permutations()[e.sigma]);
  return M;
}

Mat3c iso_chart_matrix(const IsotropyElement& e) {
  constexpr cplx I{0.0, 1.0};
  Vec3c d;
  d << std::exp(I * e.t1), std::exp(I * e.t2), std::exp(-I * (e.t1 + e.t2));
  Mat3c M = d.asDiagonal();
  if (e.sigma >= 0) {
    M = M * signed_permutations()[e.sigma].cast<cplx>();
  }
  return M;
}

}  // namespace nk
}  // namespace nkflag
