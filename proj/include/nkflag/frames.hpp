#pragma once
// Lagrangian 3-planes in m, the chart onto complex 3-space, the normal-form
// (angle) reduction, and stabilizer / congruence computation under the
// isotropy group D·U(1)^2.
//
// Chart: a vector with m-coordinates (c1..c6) maps to
//   z1 = c1 + i c4,  z2 = c2 + i c5,  z3 = c3 - i c6,
// under which J_nk is multiplication by i and the isotropy torus acts as
// diag(e^{i t1}, e^{i t2}, e^{-i(t1+t2)}).  A Lagrangian plane is the real
// span of the columns of a unitary 3x3 matrix U, and S = U U^T is a
// symmetric unitary matrix depending only on the plane.
#include <optional>
#include <string>
#include <vector>

#include "nkflag/nk.hpp"

namespace nkflag {
namespace frames {

using Mat63 = Eigen::Matrix<double, 6, 3>;

// ---- Chart ----
Vec3c m_to_chart(const Vec6& v);
Vec6 chart_to_m(const Vec3c& z);
// diag(e^{i t1}, e^{i t2}, e^{-i(t1+t2)}).
Mat3c chart_torus(double t1, double t2);

// ---- Planes ----

class LagrangianPlane {
 public:
  // From three 8-vectors lying in m, already orthonormal (checked, throws
  // NotOrthonormal / NotInM / NotLagrangian).
  static LagrangianPlane from_orthonormal(const Vec8& v1, const Vec8& v2,
                                          const Vec8& v3, double tol = 1e-9);
  // From the m-parts of three 8-vectors: orthonormalizes the span (throws
  // ProjectionDegenerate if the span has rank < 3, NotLagrangian if the
  // resulting plane is not Lagrangian).
  static LagrangianPlane from_m_span(const Vec8& v1, const Vec8& v2,
                                     const Vec8& v3, double tol = 1e-9);
  // From a unitary chart matrix (columns' real span).
  static LagrangianPlane from_chart(const Mat3c& U, double tol = 1e-9);

  const Mat63& basis() const { return B_; }
  Vec8 basis_vector(int i) const;
  // Chart matrix whose columns are the chart images of the basis.
  Mat3c chart_matrix() const;
  // S = U U^T, the plane's symmetric unitary invariant.
  Mat3c s_matrix() const;
  // Orthogonal projector onto the plane in m-coordinates.
  Mat6 projector() const;
  // Frobenius distance of projectors (0 iff equal planes).
  double distance_to(const LagrangianPlane& o) const;

 private:
  explicit LagrangianPlane(const Mat63& B) : B_(B) {}
  Mat63 B_;  // columns orthonormal, span Lagrangian
};

// Tests on an orthonormal triple of m-vectors (throws NotOrthonormal).
bool is_lagrangian(const Vec8& v1, const Vec8& v2, const Vec8& v3,
                   double tol = 1e-9);
// Additionally requires the Lagrangian condition; tests Re Upsilon = 0 on the
// triple (equivalently |Im Upsilon| = 1).
bool is_special(const Vec8& v1, const Vec8& v2, const Vec8& v3,
                double tol = 1e-9);
bool is_special(const LagrangianPlane& p, double tol = 1e-9);

// ---- Moving frame from angles ----

// The orthonormal frame (e1,e2,e3) of the angle family:
//   e1 = -sin(t)*v1 + cos(t)*v2,
//   e2 =  sin(b)*v1' + cos(b)*w,
//   e3 =  cos(b)*v2' + sin(b)*w',
// where v1 = cos(f)m1+sin(f)m2, v2 = cos(f)m4+sin(f)m5, v1',v2' their
// orthogonal partners, w = cos(t)m3+sin(t)m6, w' = -sin(t)m3+cos(t)m6.
// The plane of this frame corresponds to the chart normal form with
// alpha = theta + pi/2 (a special Lagrangian plane).
std::array<Vec8, 3> frame_from_angles(double theta, double beta, double phi);

// Chart normal form with independent alpha:
//   col1 = e^{i a} u, col2 = sin(b) u' + cos(b) e^{-i t} k,
//   col3 = i (cos(b) u' - sin(b) e^{-i t} k),
// u = (cos f, sin f, 0), u' = (-sin f, cos f, 0), k = (0,0,1).
Mat3c normal_form_chart(double alpha, double beta, double phi, double theta);

// ---- Normalization ----

struct NormalForm {
  double t1 = 0.0, t2 = 0.0;   // torus part of the normalizing element
  double alpha = 0.0;          // phase of the first frame vector
  double beta = 0.0, phi = 0.0, theta = 0.0;
  int k3 = 1;                  // 1 generic; 2 on the beta = pi/2 stratum
                               // (chart third row rank drops to one)
  bool deg_phi = false;        // u-direction degenerate (phi in {0, pi/2})
  bool deg_circle = false;     // torus normalization has a circle of choices
  double residual = 0.0;       // plane reconstruction distance

  nk::IsotropyElement isotropy() const;  // the torus element applied
};

// Angle normalization: finds torus (t1,t2) and angles so that
// chart_torus(t1,t2) * (plane) = normal_form_chart(alpha,beta,phi,theta)
// as planes, with angles reduced to theta in [0,pi), beta in [0,pi/2],
// phi in [0,pi), alpha in [0,pi).  Deterministic (lexicographic minimum over
// the residual symmetry orbit).  Throws NotLagrangian.
NormalForm normalize_plane(const LagrangianPlane& p, double tol = 1e-7);

// The orthonormal basis of the input plane matching the normal form: column i
// is the m-vector of chart_torus(-t1,-t2) * normal_form_chart(...) column i.
Mat63 normal_basis(const NormalForm& nf);

// Rank of the differential of (theta,beta,phi) -> plane at an interior point
// (expected 3: the family is a slice of minimal dimension).
int slice_rank(double theta, double beta, double phi, double fd_step = 1e-5);

// ---- Symmetry action, congruence, stabilizer ----

LagrangianPlane symmetry_action(const nk::IsotropyElement& e,
                                const LagrangianPlane& p);

// Searches D·U(1)^2 for gamma with gamma * p1 = p2 (exact torus congruence
// solve per signed permutation).  Returns the first witness in deterministic
// order, or nullopt.
std::optional<nk::IsotropyElement> planes_congruent(const LagrangianPlane& p1,
                                                    const LagrangianPlane& p2,
                                                    double tol = 1e-8);

struct OrbitTypeReport {
  int continuous_dim = 0;            // dim of {X in h : ad(X) plane = plane}
  Eigen::Vector2d h_generator{0, 0}; // (x,y): X = x h1 + y h2, if dim >= 1
  int discrete_order = 0;            // isolated stabilizer elements
  int components = 0;                // connected components of the stabilizer
  std::string label;                 // trivial / Z3 / D / torus-line / anomaly…
  std::vector<nk::IsotropyElement> elements;  // isolated elements (sigma, t)
  // Killing pairings B([e_j,e_k]_h, h_i), a congruence-covariant report field
  // (rows: h1,h2; columns: pairs (1,2),(1,3),(2,3)).
  Eigen::Matrix<double, 2, 3> bracket_torus_pairings;
};

OrbitTypeReport stabilizer(const LagrangianPlane& p, double tol = 1e-8);

}  // namespace frames
}  // namespace nkflag
