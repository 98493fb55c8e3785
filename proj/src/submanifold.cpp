#include "nkflag/submanifold.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "nkflag/errors.hpp"
#include "nkflag/su3.hpp"

namespace nkflag {
namespace submanifold {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

Vec8 unit8(int i) { return Vec8::Unit(i); }

// g-indices of the base block (m1,m2,m4,m5) and of the stabilizer algebra
// u(2) of the base point (h1,h2,m3,m6).
constexpr std::array<int, 4> kBaseIdx{2, 3, 5, 6};
constexpr std::array<int, 4> kStabIdx{0, 1, 4, 7};

Vec8 base_block_part(const Vec8& x) {
  Vec8 out = Vec8::Zero();
  for (int r : kBaseIdx) out[r] = x[r];
  return out;
}

Vec8 stab_block_part(const Vec8& x) {
  Vec8 out = Vec8::Zero();
  for (int r : kStabIdx) out[r] = x[r];
  return out;
}

}  // namespace

// ---- Frames ----

std::array<Vec8, 3> ConstantFrame::vectors() const {
  auto e = frames::frame_from_angles(theta, beta, phi);
  for (int i = 0; i < 3; ++i) e[i] += l(0, i) * unit8(0) + l(1, i) * unit8(1);
  return e;
}

std::array<Vec8, 3> ConstantFrame::tangent_vectors() const {
  return frames::frame_from_angles(theta, beta, phi);
}

int PatchFrame::index(int i, int j, int k) const {
  return (i * shape[1] + j) * shape[2] + k;
}

const ConstantFrame& PatchFrame::at(int i, int j, int k) const {
  return nodes[index(i, j, k)];
}

Eigen::Vector3d PatchFrame::point(int i, int j, int k) const {
  return origin + spacing * Eigen::Vector3d(i, j, k);
}

PatchFrame PatchFrame::sample(
    const std::function<ConstantFrame(const Eigen::Vector3d&)>& field,
    const Eigen::Vector3d& origin, double spacing, std::array<int, 3> shape) {
  PatchFrame P;
  P.origin = origin;
  P.spacing = spacing;
  P.shape = shape;
  P.nodes.resize(static_cast<size_t>(shape[0]) * shape[1] * shape[2]);
  for (int i = 0; i < shape[0]; ++i)
    for (int j = 0; j < shape[1]; ++j)
      for (int k = 0; k < shape[2]; ++k)
        P.nodes[P.index(i, j, k)] = field(P.point(i, j, k));
  return P;
}

// ---- Covariant derivative ----

Vec8 canonical_derivative(const Vec8& omega_h_X, const Vec8& omega_m_Y,
                          const Vec8& d_omega_m_Y) {
  return d_omega_m_Y + su3::bracket8(omega_h_X, omega_m_Y);
}

Vec8 patch_frame_derivative(const PatchFrame& P, const std::array<int, 3>& node,
                            int axis, int frame_index) {
  std::array<int, 3> lo = node, hi = node;
  lo[axis] -= 1;
  hi[axis] += 1;
  if (lo[axis] < 0 || hi[axis] >= P.shape[axis]) {
    std::ostringstream os;
    os << "central difference along axis " << axis << " impossible at node ("
       << node[0] << "," << node[1] << "," << node[2] << ")";
    throw BoundaryPoint(os.str());
  }
  const Vec8 ep = su3::project_m(
      P.at(hi[0], hi[1], hi[2]).tangent_vectors()[frame_index]);
  const Vec8 em = su3::project_m(
      P.at(lo[0], lo[1], lo[2]).tangent_vectors()[frame_index]);
  return (ep - em) / (2.0 * P.spacing);
}

// ---- Second fundamental form ----

double SecondFundamentalForm::norm() const {
  double s = 0;
  for (const auto& a : h)
    for (const auto& b : a)
      for (double v : b) s += v * v;
  return std::sqrt(s);
}

double SecondFundamentalForm::max_abs() const {
  double s = 0;
  for (const auto& a : h)
    for (const auto& b : a)
      for (double v : b) s = std::max(s, std::abs(v));
  return s;
}

double SecondFundamentalForm::max_symmetry_defect() const {
  double s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        s = std::max(s, std::abs(h[i][j][k] - h[j][i][k]));
        s = std::max(s, std::abs(h[i][j][k] - h[i][k][j]));
      }
  return s;
}

double SecondFundamentalForm::max_trace_defect() const {
  double s = 0;
  for (int k = 0; k < 3; ++k) {
    double t = h[0][0][k] + h[1][1][k] + h[2][2][k];
    s = std::max(s, std::abs(t));
  }
  return s;
}

double SecondFundamentalForm::max_difference(
    const SecondFundamentalForm& o) const {
  double s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        s = std::max(s, std::abs(h[i][j][k] - o.h[i][j][k]));
  return s;
}

SecondFundamentalForm sff_generic(const std::array<Vec8, 3>& frame_vectors) {
  SecondFundamentalForm out;
  std::array<Vec8, 3> omh, omm, jm;
  for (int i = 0; i < 3; ++i) {
    omh[i] = su3::project_h(frame_vectors[i]);
    omm[i] = su3::project_m(frame_vectors[i]);
    jm[i] = nk::apply_m_operator(nk::J_nk(), omm[i]);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Vec8 nab = canonical_derivative(omh[i], omm[j], Vec8::Zero());
      for (int k = 0; k < 3; ++k) out.h[i][j][k] = nab.dot(jm[k]);
    }
  return out;
}

SecondFundamentalForm sff_generic(const ConstantFrame& F) {
  return sff_generic(F.vectors());
}

SecondFundamentalForm sff_generic(const PatchFrame& P,
                                  const std::array<int, 3>& node) {
  const ConstantFrame& F = P.at(node[0], node[1], node[2]);
  auto X = F.vectors();
  SecondFundamentalForm out;
  std::array<Vec8, 3> omh, omm, jm;
  for (int i = 0; i < 3; ++i) {
    omh[i] = su3::project_h(X[i]);
    omm[i] = su3::project_m(X[i]);
    jm[i] = nk::apply_m_operator(nk::J_nk(), omm[i]);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Vec8 d = patch_frame_derivative(P, node, i, j);
      const Vec8 nab = canonical_derivative(omh[i], omm[j], d);
      for (int k = 0; k < 3; ++k) out.h[i][j][k] = nab.dot(jm[k]);
    }
  return out;
}

SecondFundamentalForm sff_closed_form(const ConstantFrame& F,
                                      const AngleDerivatives& d) {
  const double st = std::sin(F.theta), ct = std::cos(F.theta);
  const double sb = std::sin(F.beta), cb = std::cos(F.beta);
  const double sp = std::sin(F.phi), cp = std::cos(F.phi);
  const double w = sp * sp - cp * cp;  // -cos(2 phi)
  const double spcp = sp * cp;

  SecondFundamentalForm out;
  auto& h = out.h;
  for (int k = 0; k < 3; ++k) {
    const double l1 = F.l(0, k), l2 = F.l(1, k), dt = d.dtheta[k];
    h[k][0][0] = dt + l1 + kSqrt3 * l2 * w;
    h[k][1][1] = -dt * cb * cb + l1 * (sb * sb - 2 * cb * cb) -
                 kSqrt3 * l2 * sb * sb * w;
    h[k][2][2] = -dt * sb * sb + l1 * (cb * cb - 2 * sb * sb) -
                 kSqrt3 * l2 * cb * cb * w;
  }
  h[0][0][1] = d.dphi[0] * ct * sb - 2 * kSqrt3 * F.l(1, 0) * st * sb * spcp;
  h[0][0][2] = d.dphi[0] * st * cb + 2 * kSqrt3 * F.l(1, 0) * ct * cb * spcp;
  h[1][1][0] = d.dphi[1] * sb * ct - 2 * kSqrt3 * F.l(1, 1) * st * sb * spcp;
  h[2][2][0] = d.dphi[2] * cb * st + 2 * kSqrt3 * F.l(1, 2) * ct * cb * spcp;
  h[1][2][0] = d.dphi[1] * cb * st + 2 * kSqrt3 * F.l(1, 1) * ct * cb * spcp;
  h[2][0][1] = d.dphi[2] * ct * sb - 2 * kSqrt3 * F.l(1, 2) * st * sb * spcp;
  h[0][1][2] = -d.dbeta[0];
  h[1][1][2] = -d.dbeta[1];
  h[2][2][1] = -d.dbeta[2];
  // The remaining slots are the j<->k mirrors of the off-diagonal ones.
  h[0][1][0] = h[0][0][1];
  h[0][2][0] = h[0][0][2];
  h[1][0][1] = h[1][1][0];
  h[2][0][2] = h[2][2][0];
  h[1][0][2] = h[1][2][0];
  h[2][1][0] = h[2][0][1];
  h[0][2][1] = h[0][1][2];
  h[1][2][1] = h[1][1][2];
  h[2][1][2] = h[2][2][1];
  return out;
}

double ConstraintReport::max_violation() const {
  return std::max(std::max(std::abs(l11), std::abs(l12)),
                  std::max(std::abs(l13), std::abs(l23_weighted)));
}

ConstraintReport closed_form_constraints(const ConstantFrame& F, double tol) {
  ConstraintReport r;
  const double db = std::remainder(F.beta - M_PI / 2, 2 * M_PI);
  const double dt = std::remainder(F.theta, M_PI);
  r.applicable = std::abs(db) < tol && std::abs(dt) < tol;
  r.l11 = F.l(0, 0);
  r.l12 = F.l(0, 1);
  r.l13 = F.l(0, 2);
  const double sp = std::sin(F.phi), cp = std::cos(F.phi);
  r.l23_weighted = F.l(1, 2) * (sp * sp - cp * cp);
  return r;
}

// ---- Induced orbit geometry ----

double span_closure_residual(const std::array<Vec8, 3>& Y) {
  Eigen::MatrixXd M(8, 3);
  for (int i = 0; i < 3; ++i) M.col(i) = Y[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  int rank = 0;
  const double smax = svd.singularValues()(0);
  for (int i = 0; i < 3; ++i)
    if (svd.singularValues()(i) > 1e-12 * std::max(1.0, smax)) ++rank;
  const auto U = svd.matrixU().leftCols(rank);
  double worst = 0;
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& p : pairs) {
    const Vec8 b = su3::bracket8(Y[p[0]], Y[p[1]]);
    worst = std::max(worst, (b - U * (U.transpose() * b)).norm());
  }
  return worst;
}

OrbitGeometry::OrbitGeometry(const std::array<Vec8, 3>& Y, double tol)
    : Y_(Y) {
  for (int i = 0; i < 3; ++i) {
    const Vec8 mi = su3::project_m(Y[i]);
    for (int j = 0; j < 3; ++j) {
      gram_(i, j) = mi.dot(su3::project_m(Y[j]));
      gram_bi_(i, j) = Y[i].dot(Y[j]);
    }
  }
  build(tol);
}

OrbitGeometry::OrbitGeometry(const std::array<Vec8, 3>& Y,
                             const Eigen::Matrix3d& gram, double tol)
    : Y_(Y), gram_(gram) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gram_bi_(i, j) = Y[i].dot(Y[j]);
  build(tol);
}

void OrbitGeometry::build(double tol) {
  Eigen::Matrix<double, 8, 3> M;
  for (int i = 0; i < 3; ++i) M.col(i) = Y_[i];
  const auto solver = M.colPivHouseholderQr();
  closure_residual_ = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Vec8 b = su3::bracket8(Y_[i], Y_[j]);
      const Eigen::Vector3d c = solver.solve(b);
      closure_residual_ = std::max(closure_residual_, (M * c - b).norm());
      for (int k = 0; k < 3; ++k) {
        c_[k][i][j] = c[k];
        c_[k][j][i] = -c[k];
      }
    }
  if (closure_residual_ > tol) {
    std::ostringstream os;
    os << "span does not close under the bracket: residual "
       << closure_residual_;
    throw NotASubalgebra(os.str());
  }

  // Koszul: 2 <nabla_i j, k> = <[i,j],k> - <[j,k],i> + <[k,i],j>.
  auto bm = [&](int i, int j, int k) {
    double s = 0;
    for (int m = 0; m < 3; ++m) s += c_[m][i][j] * gram_(m, k);
    return s;
  };
  const Eigen::LDLT<Eigen::Matrix3d> gl(gram_);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d rhs;
      for (int k = 0; k < 3; ++k)
        rhs[k] = 0.5 * (bm(i, j, k) - bm(j, k, i) + bm(k, i, j));
      const Eigen::Vector3d g = gl.solve(rhs);
      for (int lidx = 0; lidx < 3; ++lidx) gamma_[lidx][i][j] = g[lidx];
    }

  // R(Y_i,Y_j)Y_k = nabla_i nabla_j Y_k - nabla_j nabla_i Y_k -
  // nabla_{[Y_i,Y_j]} Y_k.
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          double s = 0;
          for (int m = 0; m < 3; ++m)
            s += gamma_[m][j][k] * gamma_[l][i][m] -
                 gamma_[m][i][k] * gamma_[l][j][m] -
                 c_[m][i][j] * gamma_[l][m][k];
          riem_[l][i][j][k] = s;
        }
}

double OrbitGeometry::sectional(const Eigen::Vector3d& x,
                                const Eigen::Vector3d& y) const {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  for (int l = 0; l < 3; ++l) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          s += x[i] * y[j] * y[k] * riem_[l][i][j][k];
    r[l] = s;
  }
  const double num = r.dot(gram_ * x);
  const double xx = x.dot(gram_ * x), yy = y.dot(gram_ * y),
               xy = x.dot(gram_ * y);
  return num / (xx * yy - xy * xy);
}

Eigen::Vector3d OrbitGeometry::relative_eigenvalues() const {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> es(gram_,
                                                               gram_bi_);
  return es.eigenvalues();
}

Eigen::Matrix3d OrbitGeometry::relative_eigenvectors() const {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> es(gram_,
                                                               gram_bi_);
  return es.eigenvectors();
}

double OrbitGeometry::fiber_metric_ratio() const {
  const Eigen::Vector3d lam = relative_eigenvalues();
  const double lo = lam[1] - lam[0], hi = lam[2] - lam[1];
  if (lo > hi) return lam[0] / lam[2];
  return lam[2] / lam[0];
}

OrbitGeometry OrbitGeometry::bi_invariant_reference() const {
  return OrbitGeometry(Y_, gram_bi_, std::max(1e-8, closure_residual_ * 10));
}

// ---- Projection to the projective base ----

const Mat6& base_complex_structure() {
  static const Mat6 J = [] {
    Mat6 J = Mat6::Zero();
    // m1 -> m4, m2 -> -m5, m4 -> -m1, m5 -> m2 (m-coordinates 0..5).
    J(3, 0) = 1;
    J(4, 1) = -1;
    J(0, 3) = -1;
    J(1, 4) = 1;
    return J;
  }();
  return J;
}

namespace {

TwistorReport twistor_core(const frames::Mat63& Mm) {
  // Rows of the base block inside m-coordinates.
  constexpr std::array<int, 4> rows{0, 1, 3, 4};
  Eigen::Matrix<double, 4, 3> A;
  for (int r = 0; r < 4; ++r) A.row(r) = Mm.row(rows[r]);
  Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(A, Eigen::ComputeFullU);
  const double smax = svd.singularValues()(0);
  int rank = 0;
  for (int i = 0; i < 3; ++i)
    if (svd.singularValues()(i) > 1e-9 * std::max(1.0, smax)) ++rank;

  TwistorReport rep;
  rep.image_dim = rank;
  rep.fiber_dim = 3 - rank;
  if (rank > 0) {
    const auto U = svd.matrixU().leftCols(rank);
    const Eigen::Matrix4d P = U * U.transpose();
    Eigen::Matrix4d J4 = Eigen::Matrix4d::Zero();
    // The base complex structure in (m1,m2,m4,m5) coordinates.
    J4(2, 0) = 1;
    J4(3, 1) = -1;
    J4(0, 2) = -1;
    J4(1, 3) = 1;
    rep.complex_defect =
        ((Eigen::Matrix4d::Identity() - P) * J4 * P).norm();
  }
  rep.complex_image = rank > 0 && rep.complex_defect < 1e-8;
  return rep;
}

}  // namespace

TwistorReport twistor_project(const frames::LagrangianPlane& p) {
  return twistor_core(p.basis());
}

TwistorReport twistor_project(const std::array<Vec8, 3>& generators) {
  frames::Mat63 Mm;
  for (int i = 0; i < 3; ++i) Mm.col(i) = su3::m_part(generators[i]);
  return twistor_core(Mm);
}

double base_holomorphic_sectional(const Vec6& x_base) {
  const Vec8 X = su3::from_m_part(x_base);
  const Vec6 jx = base_complex_structure() * x_base;
  const Vec8 Y = su3::from_m_part(jx);
  // Symmetric-space curvature R(X,Y)Z = -[[X,Y],Z].
  const Vec8 R = -su3::bracket8(su3::bracket8(X, Y), Y);
  const double xx = X.dot(X), yy = Y.dot(Y), xy = X.dot(Y);
  return R.dot(X) / (xx * yy - xy * xy);
}

// ---- Shape operator of the projected hypersurface orbit ----

ShapeOperatorReport cp2_shape_operator(const std::array<Vec8, 3>& Y) {
  Eigen::Matrix<double, 4, 3> A;
  for (int i = 0; i < 3; ++i)
    for (int r = 0; r < 4; ++r) A(r, i) = Y[i][kBaseIdx[r]];
  Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(
      A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues()(2);
  if (smin < 1e-8) {
    std::ostringstream os;
    os << "projected generators do not span a hypersurface: smallest "
          "singular value "
       << smin;
    throw ProjectionDegenerate(os.str());
  }

  // Unit normal within the base block.
  Eigen::Vector4d nu4 = svd.matrixU().col(3);

  std::array<Vec8, 3> fs;
  for (int i = 0; i < 3; ++i) fs[i] = base_block_part(Y[i]);
  Eigen::Matrix3d Gf;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Gf(i, j) = fs[i].dot(fs[j]);
  const Eigen::LDLT<Eigen::Matrix3d> gl(Gf);

  auto build_S = [&](const Eigen::Vector4d& nu) {
    Vec8 nu8 = Vec8::Zero();
    for (int r = 0; r < 4; ++r) nu8[kBaseIdx[r]] = nu[r];
    Eigen::Matrix3d S;
    for (int i = 0; i < 3; ++i) {
      const Vec8 Sv = -su3::bracket8(stab_block_part(Y[i]), nu8);
      Eigen::Vector3d rhs;
      for (int j = 0; j < 3; ++j) rhs[j] = Sv.dot(fs[j]);
      S.col(i) = gl.solve(rhs);
    }
    return S;
  };

  Eigen::Matrix3d S = build_S(nu4);
  Eigen::EigenSolver<Eigen::Matrix3d> es(S);
  Eigen::Vector3d lam = es.eigenvalues().real();
  Eigen::Matrix3d vec = es.eigenvectors().real();

  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(lam[a]) != std::abs(lam[b]))
      return std::abs(lam[a]) > std::abs(lam[b]);
    return lam[a] > lam[b];
  });

  // Orient the normal so the extreme curvature is positive.
  if (lam[order[0]] < 0) {
    nu4 = -nu4;
    S = -S;
    lam = -lam;
  }

  ShapeOperatorReport rep;
  for (int i = 0; i < 3; ++i) {
    rep.eigenvalues[i] = lam[order[i]];
    rep.eigenvectors.col(i) = vec.col(order[i]);
  }
  rep.trace = S.trace();

  Vec6 nu6 = Vec6::Zero();
  // m-coordinates of the base block rows.
  constexpr std::array<int, 4> mrows{0, 1, 3, 4};
  for (int r = 0; r < 4; ++r) nu6[mrows[r]] = nu4[r];
  rep.normal = nu6;

  // Alignment of the extreme-curvature direction with J(normal).
  Vec8 top = Vec8::Zero();
  for (int j = 0; j < 3; ++j) top += rep.eigenvectors(j, 0) * fs[j];
  const Vec6 jnu = base_complex_structure() * nu6;
  rep.structure_alignment =
      std::abs(su3::m_part(top).dot(jnu)) / (top.norm() * jnu.norm());
  return rep;
}

// ---- Grid search ----

namespace {

struct RawHit {
  long long cell = 0;
  long long combo = 0;
  double theta = 0, beta = 0, phi = 0;
  std::array<double, 6> l{};  // l1_1,l1_2,l1_3,l2_1,l2_2,l2_3
  double residual = 0;
};

// Closure residual vector (three pairwise brackets, each projected off the
// span) as a flat 24-vector.
Eigen::VectorXd closure_residual_vector(const Eigen::VectorXd& x) {
  auto e = frames::frame_from_angles(x[0], x[1], x[2]);
  Eigen::Matrix<double, 8, 3> X;
  for (int i = 0; i < 3; ++i)
    X.col(i) = e[i] + x[3 + i] * Vec8::Unit(0) + x[6 + i] * Vec8::Unit(1);
  const Eigen::Matrix3d G = X.transpose() * X;
  const Eigen::LDLT<Eigen::Matrix3d> gl(G);
  Eigen::VectorXd out(24);
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int p = 0; p < 3; ++p) {
    const Vec8 v = su3::bracket8(X.col(pairs[p][0]), X.col(pairs[p][1]));
    const Eigen::Vector3d c = gl.solve(X.transpose() * v);
    out.segment<8>(8 * p) = v - X * c;
  }
  return out;
}

// Levenberg-Marquardt on the closure residual; returns the refined parameter
// vector and the final residual norm.
std::pair<Eigen::VectorXd, double> refine_candidate(Eigen::VectorXd x) {
  Eigen::VectorXd F = closure_residual_vector(x);
  double fn = F.norm();
  double lambda = 1e-3;
  for (int iter = 0; iter < 80 && fn > 1e-12; ++iter) {
    Eigen::MatrixXd J(24, 9);
    const double h = 1e-7;
    for (int c = 0; c < 9; ++c) {
      Eigen::VectorXd xp = x;
      xp[c] += h;
      J.col(c) = (closure_residual_vector(xp) - F) / h;
    }
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * F;
    bool improved = false;
    for (int tries = 0; tries < 8; ++tries) {
      const Eigen::VectorXd delta =
          (A + lambda * Eigen::MatrixXd::Identity(9, 9)).ldlt().solve(-g);
      const Eigen::VectorXd xn = x + delta;
      const Eigen::VectorXd Fn = closure_residual_vector(xn);
      if (Fn.norm() < fn) {
        x = xn;
        F = Fn;
        fn = Fn.norm();
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        break;
      }
      lambda *= 5.0;
    }
    if (!improved) break;
  }
  return {x, fn};
}

}  // namespace

ScanResult homogeneous_scan(const ScanConfig& cfg) {
  ScanResult result;
  result.config = cfg;
  const int N = cfg.grid_n;
  const int L = static_cast<int>(std::lround(2 * cfg.l_range / cfg.l_step)) + 1;
  std::vector<double> lv(L);
  for (int i = 0; i < L; ++i) lv[i] = -cfg.l_range + i * cfg.l_step;
  const long long combos_per_cell = [&] {
    long long c = 1;
    for (int i = 0; i < 6; ++i) c *= L;
    return c;
  }();
  const long long ncells = static_cast<long long>(N) * N * N;
  result.cells_evaluated = ncells;

  const int workers = std::max(1, cfg.workers);
  std::vector<std::vector<RawHit>> per_worker(workers);
  std::vector<long long> refined_counts(workers, 0);

  auto run_worker = [&](int w) {
    std::vector<double> res2(combos_per_cell);
    std::vector<RawHit>& hits = per_worker[w];
    for (long long cell = w; cell < ncells; cell += workers) {
      const int it = static_cast<int>(cell / (N * N));
      const int ib = static_cast<int>((cell / N) % N);
      const int ip = static_cast<int>(cell % N);
      const double theta = it * M_PI / N;
      const double beta = ib * (M_PI / 2) / (N - 1);
      const double phi = ip * M_PI / N;

      const auto e = frames::frame_from_angles(theta, beta, phi);
      const Vec8 h1 = Vec8::Unit(0), h2 = Vec8::Unit(1);
      Vec8 B[3];
      const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
      for (int p = 0; p < 3; ++p)
        B[p] = su3::bracket8(e[pairs[p][0]], e[pairs[p][1]]);
      Vec8 H[2][3];
      for (int j = 0; j < 3; ++j) {
        H[0][j] = su3::bracket8(h1, e[j]);
        H[1][j] = su3::bracket8(h2, e[j]);
      }

      // Residual of the best rank-3 projection for every l-combination.
      long long idx = 0;
      for (int a0 = 0; a0 < L; ++a0)
        for (int a1 = 0; a1 < L; ++a1)
          for (int a2 = 0; a2 < L; ++a2)
            for (int b0 = 0; b0 < L; ++b0)
              for (int b1 = 0; b1 < L; ++b1)
                for (int b2 = 0; b2 < L; ++b2, ++idx) {
                  const double l1[3] = {lv[a0], lv[a1], lv[a2]};
                  const double l2[3] = {lv[b0], lv[b1], lv[b2]};
                  Eigen::Matrix3d G;
                  for (int r = 0; r < 3; ++r)
                    for (int c = r; c < 3; ++c) {
                      G(r, c) = (r == c ? 1.0 : 0.0) + l1[r] * l1[c] +
                                l2[r] * l2[c];
                      G(c, r) = G(r, c);
                    }
                  const Eigen::Matrix3d Gi = G.inverse();
                  double total = 0;
                  for (int p = 0; p < 3; ++p) {
                    const int i = pairs[p][0], j = pairs[p][1];
                    const Vec8 v = B[p] + l1[i] * H[0][j] - l1[j] * H[0][i] +
                                   l2[i] * H[1][j] - l2[j] * H[1][i];
                    Eigen::Vector3d d;
                    for (int k = 0; k < 3; ++k)
                      d[k] = e[k].dot(v) + l1[k] * v[0] + l2[k] * v[1];
                    total += v.squaredNorm() - d.dot(Gi * d);
                  }
                  res2[idx] = total;
                }

      // Keep sub-threshold local minima of the l-grid.
      std::vector<std::pair<double, long long>> cands;
      const long long strides[6] = {
          combos_per_cell / L, combos_per_cell / (L * L),
          combos_per_cell / (L * L * L),
          static_cast<long long>(L) * L, L, 1};
      for (long long i = 0; i < combos_per_cell; ++i) {
        if (res2[i] >= cfg.keep_threshold) continue;
        bool minimal = true;
        long long rem = i;
        int digits[6];
        for (int d6 = 0; d6 < 6; ++d6) {
          digits[d6] = static_cast<int>(rem / strides[d6]);
          rem %= strides[d6];
        }
        for (int d6 = 0; d6 < 6 && minimal; ++d6) {
          if (digits[d6] > 0 && res2[i - strides[d6]] < res2[i])
            minimal = false;
          if (digits[d6] + 1 < L && res2[i + strides[d6]] < res2[i])
            minimal = false;
        }
        if (minimal) cands.emplace_back(res2[i], i);
      }
      std::sort(cands.begin(), cands.end());
      if (cands.size() > 40) cands.resize(40);
      std::sort(cands.begin(), cands.end(),
                [](const auto& a, const auto& b) { return a.second < b.second; });

      for (const auto& [r2, idx2] : cands) {
        (void)r2;
        long long rem = idx2;
        int digits[6];
        for (int d6 = 0; d6 < 6; ++d6) {
          digits[d6] = static_cast<int>(rem / strides[d6]);
          rem %= strides[d6];
        }
        Eigen::VectorXd x(9);
        x << theta, beta, phi, lv[digits[0]], lv[digits[1]], lv[digits[2]],
            lv[digits[3]], lv[digits[4]], lv[digits[5]];
        ++refined_counts[w];
        auto [xr, fn] = refine_candidate(x);
        if (fn > 1e-9) continue;
        RawHit hit;
        hit.cell = cell;
        hit.combo = idx2;
        hit.theta = xr[0];
        hit.beta = xr[1];
        hit.phi = xr[2];
        for (int q = 0; q < 6; ++q) hit.l[q] = xr[3 + q];
        hit.residual = fn;
        hits.push_back(hit);
      }
    }
  };

  if (workers == 1) {
    run_worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_worker, w);
    for (auto& t : pool) t.join();
  }
  for (long long c : refined_counts) result.candidates_refined += c;

  std::vector<RawHit> all;
  for (auto& v : per_worker)
    all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end(), [](const RawHit& a, const RawHit& b) {
    if (a.cell != b.cell) return a.cell < b.cell;
    return a.combo < b.combo;
  });

  // Reference planes of the three families.
  const auto mk_plane = [](const Vec8& a, const Vec8& b, const Vec8& c) {
    return frames::LagrangianPlane::from_m_span(a, b, c);
  };
  const Vec8 m1 = Vec8::Unit(2), m2 = Vec8::Unit(3), m3 = Vec8::Unit(4),
             m4 = Vec8::Unit(5), m5 = Vec8::Unit(6), m6 = Vec8::Unit(7);
  const auto ref_f12r3 = mk_plane(m1, m2, m3);
  const auto ref_s3 = mk_plane(m1 + m2, -m4 + m5, m6);
  const auto ref_rp3 =
      mk_plane(m1 + m2, (m1 - m2) / kSqrt3 + 2.0 / kSqrt3 * m6,
               m3 - m4 + m5);

  std::map<std::tuple<std::string, long long, long long, long long, int>,
           size_t>
      seen;
  for (const RawHit& rh : all) {
    const auto e = frames::frame_from_angles(rh.theta, rh.beta, rh.phi);
    const auto plane =
        frames::LagrangianPlane::from_orthonormal(e[0], e[1], e[2]);
    std::string family = "anomaly";
    if (frames::planes_congruent(plane, ref_f12r3))
      family = "f12r3";
    else if (frames::planes_congruent(plane, ref_s3))
      family = "s3";
    else if (frames::planes_congruent(plane, ref_rp3))
      family = "rp3";
    const auto nf = frames::normalize_plane(plane);
    const auto key = std::make_tuple(
        family, static_cast<long long>(std::llround(nf.theta * 1e6)),
        static_cast<long long>(std::llround(nf.beta * 1e6)),
        static_cast<long long>(std::llround(nf.phi * 1e6)), nf.k3);
    if (seen.count(key)) continue;
    ScanHit hit;
    hit.theta = rh.theta;
    hit.beta = rh.beta;
    hit.phi = rh.phi;
    for (int q = 0; q < 3; ++q) {
      hit.l(0, q) = rh.l[q];
      hit.l(1, q) = rh.l[3 + q];
    }
    {
      ConstantFrame cf;
      cf.theta = rh.theta;
      cf.beta = rh.beta;
      cf.phi = rh.phi;
      cf.l = hit.l;
      hit.residual = span_closure_residual(cf.vectors());
    }
    hit.family = family;
    hit.normal_form = nf;
    hit.stabilizer_label = frames::stabilizer(plane).label;
    seen[key] = result.hits.size();
    result.hits.push_back(std::move(hit));
  }

  for (const auto& h : result.hits) {
    if (h.family == "anomaly") {
      ++result.anomalies;
    } else if (std::find(result.families.begin(), result.families.end(),
                         h.family) == result.families.end()) {
      result.families.push_back(h.family);
    }
  }
  std::sort(result.families.begin(), result.families.end());
  return result;
}

}  // namespace submanifold
}  // namespace nkflag
