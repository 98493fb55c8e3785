#pragma once
// The nearly Kähler structure on the flag manifold model: the two almost
// complex structures on m, the fundamental and volume forms, the complex
// volume form, torsion and curvature of the naturally reductive connection,
// the Levi-Civita difference tensor acting on J, the order-3 automorphism,
// and the isotropy representation of the stabilizer D·U(1)^2 of the ambient
// symmetry group.
#include <array>
#include <optional>

#include "nkflag/forms.hpp"
#include "nkflag/su3.hpp"

namespace nkflag {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

namespace nk {

// ---- Almost complex structures on m (coordinates m1..m6) ----

// The nearly Kähler structure: m1->m4, m2->m5, m3->-m6 (and J^2 = -1).
const Mat6& J_nk();
// The Kähler-compatible structure: same on the first two blocks, opposite
// sign on the (m3,m6) block.
const Mat6& J_k();

// Apply a 6x6 operator on m to the m-part of an 8-vector (h-part must vanish).
Vec8 apply_m_operator(const Mat6& Op, const Vec8& x);

// ---- Block-diagonal metrics on m ----

// Inner product with block scalars (c1,c2,c3) on m1+m4, m2+m5, m3+m6.
// (1,1,1) is the naturally reductive metric; (1,1,2) the Kähler-Einstein one.
struct MetricTensor {
  double c1 = 1.0, c2 = 1.0, c3 = 1.0;
  MetricTensor() = default;
  MetricTensor(double a, double b, double c);
  Mat6 matrix() const;
  double eval(const Vec6& x, const Vec6& y) const;
};

// ---- Standard forms ----

// a m^14 + b m^25 + c m^36 on the complement.
AltForm weighted_two_form(double a, double b, double c);
// Fundamental 2-form of the nearly Kähler structure: weights (1,1,-1).
AltForm omega_nk();
// Fundamental 2-form compatible with J_k and the metric (1,1,c3).
AltForm omega_k(double c3);
// Real and imaginary parts of the complex volume form on m.
AltForm re_upsilon();
AltForm im_upsilon();
// Volume form m^123456.
AltForm vol_m();
// Kähler form of the projective base on the m1+m2 block: m^14 - m^25.
AltForm omega_cp2();
// Torsion 3-form g(T(x,y),z) of the naturally reductive connection.
AltForm torsion_three_form();

// ---- Torsion / curvature of the naturally reductive connection ----

// T(x,y) = -[x,y]_m for x,y in m.  Throws NotInM on h-components.
Vec8 torsion(const Vec8& x, const Vec8& y);
// R(x,y) = -[x,y]_h in h for x,y in m.
Vec8 curvature_h(const Vec8& x, const Vec8& y);
// The curvature operator z -> [ -[x,y]_h, z ].
Vec8 curvature_op(const Vec8& x, const Vec8& y, const Vec8& z);

// Levi-Civita action on J at the base point:
// (nabla^g_x J) y = -1/2 T(x, Jy) + 1/2 J T(x,y).
Vec8 nabla_g_J(const Vec8& x, const Vec8& y);

// ---- Order-3 symmetry ----

// delta = Ad(exp((2pi/3) h1)) as an 8x8 matrix.
Mat8 three_symmetry();

// Residuals of delta^3 = id, delta|_h = id, and (delta - delta^2)/sqrt(3) =
// J_nk on m; all should vanish to machine precision.
struct ThreeSymmetryReport {
  double cube_residual;
  double fixes_h_residual;
  double j_residual;
};
ThreeSymmetryReport three_symmetry_report();

// ---- Isotropy representation of D·U(1)^2 ----

// The 24 signed permutation matrices of determinant +1, in a fixed
// deterministic order.
const std::array<Eigen::Matrix3d, 24>& signed_permutations();

// An element of the stabilizer: a signed permutation (by table index) times
// the 2-torus element with block angles (t1, t2).  The induced rotations on
// (m1,m4),(m2,m5),(m3,m6) have angles (t1, t2, t1+t2), i.e. (x-3y, x+3y, 2x)
// in the parametrization t1 = x-3y, t2 = x+3y; in the complex chart the
// phases are (e^{i t1}, e^{i t2}, e^{-i(t1+t2)}) because the third chart
// coordinate is conjugate-linear.
struct IsotropyElement {
  double t1 = 0.0;
  double t2 = 0.0;
  int sigma = -1;  // index into signed_permutations(), -1 = identity

  static IsotropyElement torus_xy(double x, double y);
  static IsotropyElement identity();
};

// rho of a torus element in the (x,y) parametrization: block rotations with
// angles (x-3y, x+3y, 2x) on (m1,m4), (m2,m5), (m3,m6).
Mat6 iso_torus_xy(double x, double y);
// Same torus element addressed by the block angles t1 = x-3y, t2 = x+3y.
Mat6 iso_torus(double t1, double t2);
// rho(sigma) = sigma - J sigma J for a signed permutation acting on
// span{m1,m2,m3} (the complex-linear extension in the chart).
Mat6 iso_sigma(const Eigen::Matrix3d& sigma);
// Full element: iso_torus(t1,t2) * iso_sigma(sigma).
Mat6 iso_rep(const IsotropyElement& e);

// The corresponding 3x3 special unitary chart matrix
// diag(e^{i t1}, e^{i t2}, e^{-i(t1+t2)}) * sigma.
Mat3c iso_chart_matrix(const IsotropyElement& e);

}  // namespace nk
}  // namespace nkflag
