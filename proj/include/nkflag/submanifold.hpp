#pragma once
// Framed Lagrangian orbits: moving-frame covariant derivatives of the
// canonical connection, second fundamental forms (computed directly and from
// the closed-form component list), induced orbit metrics with their
// curvature, the projection to the projective base together with its complex
// structure, the shape operator of the projected hypersurface orbit, and the
// grid search for constant frames whose span closes under the bracket.
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "nkflag/frames.hpp"
#include "nkflag/nk.hpp"

namespace nkflag {
namespace submanifold {

// ---- Frames ----

// A constant moving frame: tangent vectors e_i from the angle family plus
// torus-valued connection coefficients omega_h(e_i) = l(0,i) h1 + l(1,i) h2.
struct ConstantFrame {
  double theta = 0.0, beta = 0.0, phi = 0.0;
  Eigen::Matrix<double, 2, 3> l = Eigen::Matrix<double, 2, 3>::Zero();

  std::array<Vec8, 3> vectors() const;          // e_i plus the h-parts
  std::array<Vec8, 3> tangent_vectors() const;  // the m-parts e_i alone
};

// Angle and connection fields sampled on a uniform grid over a box; the
// moving frame varies from node to node.
struct PatchFrame {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double spacing = 0.1;
  std::array<int, 3> shape{1, 1, 1};
  std::vector<ConstantFrame> nodes;  // index (i*shape[1] + j)*shape[2] + k

  int index(int i, int j, int k) const;
  const ConstantFrame& at(int i, int j, int k) const;
  Eigen::Vector3d point(int i, int j, int k) const;
  static PatchFrame sample(
      const std::function<ConstantFrame(const Eigen::Vector3d&)>& field,
      const Eigen::Vector3d& origin, double spacing, std::array<int, 3> shape);
};

// ---- Covariant derivative of the canonical connection ----

// nabla_X Y in the moving frame: the directional derivative of omega_m(Y)
// along X plus ad(omega_h(X)) applied to omega_m(Y).
Vec8 canonical_derivative(const Vec8& omega_h_X, const Vec8& omega_m_Y,
                          const Vec8& d_omega_m_Y);

// Central-difference derivative of omega_m(e_j) along a grid axis; throws
// BoundaryPoint at the patch boundary.
Vec8 patch_frame_derivative(const PatchFrame& P, const std::array<int, 3>& node,
                            int axis, int frame_index);

// ---- Second fundamental form ----

// Components h[i][j][k] = g(nabla_{e_i} e_j, J e_k).  Computed slot by slot;
// total symmetry and tracelessness are measured, never assumed.
struct SecondFundamentalForm {
  std::array<std::array<std::array<double, 3>, 3>, 3> h{};

  double norm() const;                 // Frobenius norm of all 27 slots
  double max_abs() const;
  double max_symmetry_defect() const;  // max over index permutations
  double max_trace_defect() const;     // max_k |sum_i h[i][i][k]|
  double max_difference(const SecondFundamentalForm& o) const;
};

// From the covariant derivative directly (d-term zero for constant frames).
SecondFundamentalForm sff_generic(const std::array<Vec8, 3>& frame_vectors);
SecondFundamentalForm sff_generic(const ConstantFrame& F);
// Patch version: the d-term comes from central differences at the node.
SecondFundamentalForm sff_generic(const PatchFrame& P,
                                  const std::array<int, 3>& node);

// Directional derivatives e_k(theta), e_k(beta), e_k(phi) of the angle
// fields along the frame directions (zero for constant frames).
struct AngleDerivatives {
  Eigen::Vector3d dtheta = Eigen::Vector3d::Zero();
  Eigen::Vector3d dbeta = Eigen::Vector3d::Zero();
  Eigen::Vector3d dphi = Eigen::Vector3d::Zero();
};

// The closed-form component list evaluated literally.
SecondFundamentalForm sff_closed_form(const ConstantFrame& F,
                                      const AngleDerivatives& d);

// On the branch beta = pi/2, theta = 0 the structure equations force four
// connection constraints; this reports their violations (all should vanish
// for a frame that closes under the bracket on that branch).
struct ConstraintReport {
  bool applicable = false;  // true iff beta = pi/2 and theta = 0 (mod pi)
  double l11 = 0, l12 = 0, l13 = 0;
  double l23_weighted = 0;  // l23 * (sin^2 phi - cos^2 phi)
  double max_violation() const;
};
ConstraintReport closed_form_constraints(const ConstantFrame& F,
                                         double tol = 1e-9);

// ---- Induced orbit geometry ----

// Distance of the span of three algebra vectors from closing under the
// bracket: max over pairs of the component of [Y_i, Y_j] orthogonal to the
// span.
double span_closure_residual(const std::array<Vec8, 3>& Y);

// A 3-dimensional subalgebra with the induced left-invariant metric: Koszul
// connection, curvature tensor, sectional curvatures, and the metric's
// eigenstructure relative to the bi-invariant reference.
class OrbitGeometry {
 public:
  // Induced metric = ambient inner product of the m-projections.
  explicit OrbitGeometry(const std::array<Vec8, 3>& Y, double tol = 1e-10);
  // Same subalgebra with a caller-supplied inner product on the generators.
  OrbitGeometry(const std::array<Vec8, 3>& Y, const Eigen::Matrix3d& gram,
                double tol);

  const Eigen::Matrix3d& gram() const { return gram_; }
  double closure_residual() const { return closure_residual_; }
  double structure_constant(int k, int i, int j) const { return c_[k][i][j]; }

  // Sectional curvature of the plane spanned by x, y (generator coords),
  // convention R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z -
  // nabla_[X,Y] Z, sec = <R(x,y)y, x> / (|x|^2 |y|^2 - <x,y>^2).
  double sectional(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const;

  // Eigenvalues of the metric relative to the full bi-invariant Gram of the
  // generators, ascending.
  Eigen::Vector3d relative_eigenvalues() const;
  Eigen::Matrix3d relative_eigenvectors() const;
  // The isolated relative eigenvalue over the doubly degenerate one (1 when
  // all three coincide).
  double fiber_metric_ratio() const;

  // The same subalgebra re-metrized with the bi-invariant Gram.
  OrbitGeometry bi_invariant_reference() const;
  // Full bi-invariant Gram (ambient inner product of the whole generators).
  const Eigen::Matrix3d& bi_invariant_gram() const { return gram_bi_; }

 private:
  void build(double tol);
  std::array<Vec8, 3> Y_;
  Eigen::Matrix3d gram_;
  Eigen::Matrix3d gram_bi_;
  double closure_residual_ = 0.0;
  double c_[3][3][3] = {};      // [Y_i,Y_j] = c[k][i][j] Y_k
  double gamma_[3][3][3] = {};  // nabla_{Y_i} Y_j = gamma[l][i][j] Y_l
  double riem_[3][3][3][3] = {};  // R(Y_i,Y_j)Y_k = riem[l][i][j][k] Y_l
};

// ---- Projection to the projective base ----

// The complex structure of the base on the (m1,m2,m4,m5) block of m (zero on
// the (m3,m6) block): m1 -> m4, m2 -> -m5.
const Mat6& base_complex_structure();

struct TwistorReport {
  int image_dim = 0;       // rank of the projection onto the base block
  int fiber_dim = 0;       // dimension of the intersection with the fiber
  bool complex_image = false;  // image invariant under the base structure
  double complex_defect = 0.0;  // distance from invariance
};
TwistorReport twistor_project(const frames::LagrangianPlane& p);
TwistorReport twistor_project(const std::array<Vec8, 3>& generators);

// Holomorphic sectional curvature of the base at a unit direction x in the
// (m1,m2,m4,m5) block: the plane (x, Jx) under the symmetric-space curvature
// R(X,Y)Z = -[[X,Y],Z].
double base_holomorphic_sectional(const Vec6& x_base);

// ---- Shape operator of the projected hypersurface orbit ----

struct ShapeOperatorReport {
  Eigen::Vector3d eigenvalues;   // ordered by descending magnitude, oriented
                                 // so the largest is positive
  Eigen::Matrix3d eigenvectors;  // columns, coordinates in the frame of the
                                 // projected generators
  Vec6 normal = Vec6::Zero();    // oriented unit normal, base-block coords
  double trace = 0.0;
  double structure_alignment = 0.0;  // |<top eigenvector, J normal>|
};

// Shape operator of the 3-dimensional projected orbit of a subalgebra, via
// the canonical connection of the base as a symmetric space.  Throws
// ProjectionDegenerate when the projection is not a hypersurface.
ShapeOperatorReport cp2_shape_operator(const std::array<Vec8, 3>& Y);

// ---- Grid search for closing frames ----

struct ScanConfig {
  int grid_n = 9;          // points per angle axis
  double l_range = 2.0;    // connection coefficients in [-l_range, l_range]
  double l_step = 0.5;     // grid step for the connection coefficients
  double keep_threshold = 1.0;  // squared-residual cutoff before refinement
  int workers = 1;
};

struct ScanHit {
  double theta = 0, beta = 0, phi = 0;  // refined parameters
  Eigen::Matrix<double, 2, 3> l = Eigen::Matrix<double, 2, 3>::Zero();
  double residual = 0.0;       // closure residual after refinement
  std::string family;          // "f12r3" | "s3" | "rp3" | "anomaly"
  std::string stabilizer_label;
  frames::NormalForm normal_form;  // of the refined tangent plane
};

struct ScanResult {
  ScanConfig config;
  std::vector<ScanHit> hits;          // deduplicated solutions, stable order
  std::vector<std::string> families;  // distinct non-anomalous labels, sorted
  int anomalies = 0;
  long long cells_evaluated = 0;
  long long candidates_refined = 0;
};

// Sweeps all angle cells and connection grids, refines near-closures to
// machine precision, classifies every solution by congruence of its tangent
// plane and its stabilizer signature.  Result is byte-identical for any
// worker count.
ScanResult homogeneous_scan(const ScanConfig& cfg);

}  // namespace submanifold
}  // namespace nkflag
