#include "nkflag/frames.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nkflag/errors.hpp"

namespace nkflag {
namespace frames {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;
const cplx kI(0.0, 1.0);

double mod_pos(double a, double m) {
  double r = std::fmod(a, m);
  if (r < 0) r += m;
  return r;
}

// Wrap to [-pi, pi).
double wrap_angle(double a) {
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r - kPi;
}

Mat63 chart_cols_to_m(const Mat3c& U) {
  Mat63 B;
  for (int c = 0; c < 3; ++c) B.col(c) = chart_to_m(U.col(c));
  return B;
}

Mat6 projector_of_m_cols(const Mat63& M) {
  Eigen::Matrix3d G = M.transpose() * M;
  return M * G.ldlt().solve(M.transpose());
}

// Distance between the real spans of the columns of two chart matrices.
double subspace_distance(const Mat3c& A, const Mat3c& B) {
  return (projector_of_m_cols(chart_cols_to_m(A)) -
          projector_of_m_cols(chart_cols_to_m(B)))
      .norm();
}

const AltForm& omega_form() {
  static const AltForm om = nk::omega_nk();
  return om;
}

const AltForm& re_upsilon_form() {
  static const AltForm f = nk::re_upsilon();
  return f;
}

double max_omega_pair(const Mat63& B) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      std::vector<Vec8> args{su3::from_m_part(B.col(i)),
                             su3::from_m_part(B.col(j))};
      worst = std::max(worst, std::abs(omega_form().evaluate(args)));
    }
  return worst;
}

double re_upsilon_value(const Mat63& B) {
  std::vector<Vec8> args{su3::from_m_part(B.col(0)), su3::from_m_part(B.col(1)),
                         su3::from_m_part(B.col(2))};
  return re_upsilon_form().evaluate(args);
}

// ad(h_a)|_m as a 6x6 matrix in m-coordinates (a = 0 for h1, 1 for h2).
Mat6 ad6_h(int a) {
  Mat6 A;
  for (int j = 0; j < 6; ++j) {
    A.col(j) = su3::m_part(su3::bracket8(Vec8::Unit(a), Vec8::Unit(2 + j)));
  }
  return A;
}

}  // namespace

// ---- Chart ----

Vec3c m_to_chart(const Vec6& v) {
  Vec3c z;
  z << cplx(v(0), v(3)), cplx(v(1), v(4)), cplx(v(2), -v(5));
  return z;
}

Vec6 chart_to_m(const Vec3c& z) {
  Vec6 v;
  v << z(0).real(), z(1).real(), z(2).real(), z(0).imag(), z(1).imag(),
      -z(2).imag();
  return v;
}

Mat3c chart_torus(double t1, double t2) {
  Mat3c T = Mat3c::Zero();
  T(0, 0) = std::exp(kI * t1);
  T(1, 1) = std::exp(kI * t2);
  T(2, 2) = std::exp(-kI * (t1 + t2));
  return T;
}

// ---- Planes ----

LagrangianPlane LagrangianPlane::from_orthonormal(const Vec8& v1,
                                                  const Vec8& v2,
                                                  const Vec8& v3, double tol) {
  const std::array<Vec8, 3> vs{v1, v2, v3};
  Mat63 B;
  for (int i = 0; i < 3; ++i) {
    su3::require_in_m(vs[i], tol);
    B.col(i) = su3::m_part(vs[i]);
  }
  if ((B.transpose() * B - Eigen::Matrix3d::Identity()).norm() > 10 * tol)
    throw NotOrthonormal("plane basis is not orthonormal");
  if (max_omega_pair(B) > 10 * tol)
    throw NotLagrangian("the fundamental 2-form does not vanish on the span");
  return LagrangianPlane(B);
}

LagrangianPlane LagrangianPlane::from_m_span(const Vec8& v1, const Vec8& v2,
                                             const Vec8& v3, double tol) {
  Mat63 Braw;
  Braw.col(0) = su3::m_part(v1);
  Braw.col(1) = su3::m_part(v2);
  Braw.col(2) = su3::m_part(v3);
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 6, 3>> qr(Braw);
  qr.setThreshold(std::max(tol, 1e-12));
  if (qr.rank() < 3)
    throw ProjectionDegenerate("m-parts span fewer than three dimensions");
  Mat63 Q = qr.householderQ() * Mat63::Identity();
  if (max_omega_pair(Q) > std::max(10 * tol, 1e-7))
    throw NotLagrangian("the fundamental 2-form does not vanish on the span");
  return LagrangianPlane(Q);
}

LagrangianPlane LagrangianPlane::from_chart(const Mat3c& U, double tol) {
  if ((U.adjoint() * U - Mat3c::Identity()).norm() > std::max(10 * tol, 1e-8))
    throw NotOrthonormal("chart matrix is not unitary");
  return LagrangianPlane(chart_cols_to_m(U));
}

Vec8 LagrangianPlane::basis_vector(int i) const {
  return su3::from_m_part(B_.col(i));
}

Mat3c LagrangianPlane::chart_matrix() const {
  Mat3c U;
  for (int c = 0; c < 3; ++c) U.col(c) = m_to_chart(B_.col(c));
  return U;
}

Mat3c LagrangianPlane::s_matrix() const {
  const Mat3c U = chart_matrix();
  return U * U.transpose();
}

Mat6 LagrangianPlane::projector() const { return B_ * B_.transpose(); }

double LagrangianPlane::distance_to(const LagrangianPlane& o) const {
  return (projector() - o.projector()).norm();
}

// ---- Predicates ----

bool is_lagrangian(const Vec8& v1, const Vec8& v2, const Vec8& v3, double tol) {
  const std::array<Vec8, 3> vs{v1, v2, v3};
  Mat63 B;
  for (int i = 0; i < 3; ++i) {
    su3::require_in_m(vs[i], tol);
    B.col(i) = su3::m_part(vs[i]);
  }
  if ((B.transpose() * B - Eigen::Matrix3d::Identity()).norm() > 10 * tol)
    throw NotOrthonormal("triple is not orthonormal");
  return max_omega_pair(B) < tol;
}

bool is_special(const Vec8& v1, const Vec8& v2, const Vec8& v3, double tol) {
  if (!is_lagrangian(v1, v2, v3, tol))
    throw NotLagrangian("triple does not span a Lagrangian plane");
  Mat63 B;
  B.col(0) = su3::m_part(v1);
  B.col(1) = su3::m_part(v2);
  B.col(2) = su3::m_part(v3);
  return std::abs(re_upsilon_value(B)) < tol;
}

bool is_special(const LagrangianPlane& p, double tol) {
  return std::abs(re_upsilon_value(p.basis())) < tol;
}

// ---- Moving frame from angles ----

std::array<Vec8, 3> frame_from_angles(double theta, double beta, double phi) {
  auto mv = [](int i) { return Vec8(Vec8::Unit(2 + i)); };
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cb = std::cos(beta), sb = std::sin(beta);
  const double cf = std::cos(phi), sf = std::sin(phi);
  const Vec8 v1 = cf * mv(0) + sf * mv(1);
  const Vec8 v2 = cf * mv(3) + sf * mv(4);
  const Vec8 v1p = -sf * mv(0) + cf * mv(1);
  const Vec8 v2p = -sf * mv(3) + cf * mv(4);
  const Vec8 w = ct * mv(2) + st * mv(5);
  const Vec8 wp = -st * mv(2) + ct * mv(5);
  return {Vec8(-st * v1 + ct * v2), Vec8(sb * v1p + cb * w),
          Vec8(cb * v2p + sb * wp)};
}

Mat3c normal_form_chart(double alpha, double beta, double phi, double theta) {
  Vec3c u, up, k;
  u << cplx(std::cos(phi), 0), cplx(std::sin(phi), 0), cplx(0, 0);
  up << cplx(-std::sin(phi), 0), cplx(std::cos(phi), 0), cplx(0, 0);
  k << cplx(0, 0), cplx(0, 0), cplx(1, 0);
  const cplx eth = std::exp(-kI * theta);
  Mat3c U;
  U.col(0) = std::exp(kI * alpha) * u;
  U.col(1) = cplx(std::sin(beta), 0) * up + cplx(std::cos(beta), 0) * eth * k;
  U.col(2) =
      kI * (cplx(std::cos(beta), 0) * up - cplx(std::sin(beta), 0) * eth * k);
  return U;
}

// ---- Normalization ----

nk::IsotropyElement NormalForm::isotropy() const {
  nk::IsotropyElement e;
  e.t1 = t1;
  e.t2 = t2;
  e.sigma = -1;
  return e;
}

namespace {

struct RawAngles {
  double t1, t2, al, b, ph, th;
};

// Residual symmetries of the normal form, used to reduce the angle ranges:
// adding pi to beta, reflecting beta through pi/2 while shifting theta by pi,
// shifting theta by pi while compensating alpha and the torus, and the
// quarter shift exchanging the roles of the last two frame vectors.
RawAngles reduce_generic(RawAngles c) {
  c.b = mod_pos(c.b, kTwoPi);
  if (c.b >= kPi) c.b -= kPi;
  if (c.b > kPi / 2) {
    c.b = kPi - c.b;
    c.th += kPi;
  }
  c.th = mod_pos(c.th, kTwoPi);
  if (c.th >= kPi) {
    c.th -= kPi;
    c.al -= kPi;
    c.t1 -= kPi;
    c.t2 -= kPi;
  }
  c.al = mod_pos(c.al, kPi);
  return c;
}

RawAngles quarter_shift(RawAngles c) {
  return {c.t1 + kPi / 2, c.t2 + kPi / 2, c.al + kPi / 2,
          kPi / 2 - c.b,  c.ph,           c.th + kPi / 2};
}

}  // namespace

NormalForm normalize_plane(const LagrangianPlane& p, double tol) {
  const Mat3c U = p.chart_matrix();

  // The rank of the real span of the chart's third row decides the stratum:
  // rank two generically, rank one exactly on the beta = pi/2 orbit stratum.
  Eigen::Matrix<double, 2, 3> M3;
  for (int c = 0; c < 3; ++c) {
    M3(0, c) = U(2, c).real();
    M3(1, c) = U(2, c).imag();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> row_svd(M3, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = row_svd.singularValues();
  const Eigen::Matrix3d V3 = row_svd.matrixV();
  const bool generic = sv(1) > 1e-7 * std::max(1.0, sv(0));

  struct Cand {
    RawAngles a;
    double res;
    std::array<double, 3> key;
  };
  std::vector<Cand> found;
  auto r9 = [](double x) { return std::round(x * 1e9) / 1e9; };
  auto push_checked = [&](const RawAngles& c0, bool key_uses_phi) {
    const auto dist = [&](const RawAngles& c) {
      const Mat3c R =
          chart_torus(-c.t1, -c.t2) * normal_form_chart(c.al, c.b, c.ph, c.th);
      return subspace_distance(R, U);
    };
    double d = dist(c0);
    if (d > tol) return;
    // Angles live in [0, pi); an input perturbation of size eps can move a
    // representative from 0 to pi - eps, which would flip both the
    // lexicographic selection and the reported angles across the seam.  Snap
    // values within 1e-8 of the top of the range down to the equivalent
    // representative at 0 (shifting the torus part along with theta), keeping
    // the snap only when the reconstruction still verifies.
    RawAngles c = c0;
    constexpr double kSeam = 1e-8;
    if (c.th > kPi - kSeam) {
      c.th = 0.0;
      c.t1 -= kPi;
      c.t2 -= kPi;
    }
    if (c.ph > kPi - kSeam) c.ph = 0.0;
    if (c.al > kPi - kSeam) c.al = 0.0;
    if (c.th != c0.th || c.ph != c0.ph || c.al != c0.al) {
      const double ds = dist(c);
      if (ds <= tol) {
        d = ds;
      } else {
        c = c0;
      }
    }
    const std::array<double, 3> key =
        key_uses_phi ? std::array<double, 3>{r9(c.th), r9(c.ph), r9(c.al)}
                     : std::array<double, 3>{r9(c.th), r9(c.b), r9(c.al)};
    found.push_back({c, d, key});
  };

  bool deg_phi = false;
  bool deg_circle = false;

  if (generic) {
    // First frame vector: the unique direction of the plane with vanishing
    // third chart coordinate.
    const Eigen::Vector3d kappa = V3.col(2);
    Vec3c e1 = U * kappa.cast<cplx>();
    e1 /= e1.norm();
    if (std::abs(e1(2)) > 1e-8)
      throw Error("normalize_plane: first frame vector escapes the row kernel");
    const cplx z1 = e1(0), z2 = e1(1);
    const double phi = std::atan2(std::abs(z2), std::abs(z1));
    deg_phi = std::min(std::abs(z1), std::abs(z2)) < 1e-8;
    const double t1 = std::abs(z1) < 1e-8 ? 0.0 : -std::arg(z1);
    const double t2 = std::abs(z2) < 1e-8 ? 0.0 : -std::arg(z2);
    const Mat3c T0 = chart_torus(t1, t2);

    // Orthonormal completion of the rotated first vector inside the plane,
    // computed over the reals in m-coordinates.
    const Mat3c Vm = T0 * U;
    Vec6 m1v = chart_to_m(Vec3c(T0 * e1));
    m1v.normalize();
    std::vector<Vec6> qs;
    for (int c = 0; c < 3; ++c) {
      Vec6 mvv = chart_to_m(Vm.col(c));
      mvv -= mvv.dot(m1v) * m1v;
      for (const auto& q : qs) mvv -= mvv.dot(q) * q;
      if (mvv.norm() > 1e-7) qs.push_back(mvv.normalized());
    }
    if (qs.size() != 2)
      throw Error("normalize_plane: orthonormal completion degenerated");
    const Vec3c q2 = m_to_chart(qs[0]);
    const Vec3c q3 = m_to_chart(qs[1]);

    const Eigen::Vector3d up(-std::sin(phi), std::cos(phi), 0.0);
    auto bdot = [](const Vec3c& z, const Eigen::Vector3d& r) {
      return z(0) * r(0) + z(1) * r(1) + z(2) * r(2);
    };
    // The plane's trace in the (u', k)-coordinates of the last two frame
    // vectors; unitary because e1 exhausts the u-direction.
    Eigen::Matrix2cd M;
    M(0, 0) = bdot(q2, up);
    M(0, 1) = bdot(q3, up);
    M(1, 0) = q2(2);
    M(1, 1) = q3(2);

    const double psi = std::arg(M.determinant());
    const double p0 = kPi - 2.0 * psi;
    const cplx A = std::conj(M(0, 0)) * std::conj(M(0, 0));
    const cplx B = std::conj(M(1, 0)) * std::conj(M(1, 0));
    const cplx e0 = std::exp(-kI * (p0 / 2.0));
    const cplx P = e0 * A;
    const cplx Q = e0 * B;
    const double tt0 =
        std::atan2(-(P.imag() + Q.imag()), Q.real() - P.real());

    for (const double tt : {tt0, tt0 + kPi}) {
      const double pp = p0 / 2 + tt;
      const double qq = p0 / 2 - tt;
      Eigen::Matrix2cd D = Eigen::Matrix2cd::Zero();
      D(0, 0) = std::exp(-kI * pp);
      D(1, 1) = std::exp(-kI * qq);
      const Eigen::Matrix2cd W = M.adjoint() * D * M.conjugate();
      if (W.imag().norm() > 1e-7) continue;
      const double rho = 0.5 * std::atan2(W(0, 1).real(), W(0, 0).real());
      Eigen::Matrix2d O;
      O << std::cos(rho), -std::sin(rho), std::sin(rho), std::cos(rho);
      Eigen::Matrix2cd D2 = Eigen::Matrix2cd::Zero();
      D2(0, 0) = std::exp(kI * (pp / 2));
      D2(1, 1) = std::exp(kI * (qq / 2));
      const Eigen::Matrix2cd K = D2 * M * O.cast<cplx>();
      if (std::hypot(K(0, 0).imag(), K(1, 0).imag()) > 1e-6) continue;
      if (std::hypot(K(0, 1).real(), K(1, 1).real()) > 1e-6) continue;
      const Eigen::Vector2d r1(K(0, 0).real(), K(1, 0).real());
      const Eigen::Vector2d r2(K(0, 1).imag(), K(1, 1).imag());
      const Eigen::Vector2d rot(r1(1), -r1(0));
      if (std::min((r2 - rot).norm(), (r2 + rot).norm()) > 1e-6) continue;
      const double beta = std::atan2(r1(0), r1(1));
      const double s = pp / 2;
      const double th = qq / 2 + pp;
      RawAngles cc{t1 + s, t2 + s, s, beta, phi, th};
      for (int j = 0; j < 4; ++j) {
        push_checked(reduce_generic(cc), /*key_uses_phi=*/false);
        cc = quarter_shift(cc);
      }
    }
  } else {
    // Rank-one stratum: the plane contains the complex line through the third
    // chart axis; beta = pi/2 and the torus acts on a residual circle.
    const Eigen::Vector3d kap1 = V3.col(1), kap2 = V3.col(2);
    const Vec3c f1 = U * kap1.cast<cplx>();
    const Vec3c f2 = U * kap2.cast<cplx>();
    if (std::abs(f1(2)) > 1e-7 || std::abs(f2(2)) > 1e-7)
      throw Error("normalize_plane: kernel vectors escape the row kernel");
    Vec3c e3 = U * Eigen::Vector3d(V3.col(0)).cast<cplx>();
    e3 /= e3.norm();
    const cplx eta = e3(2);
    if (std::abs(std::abs(eta) - 1.0) > 1e-7)
      throw Error("normalize_plane: third frame vector is not axis-aligned");

    Eigen::Matrix2cd A2;
    A2(0, 0) = f1(0);
    A2(1, 0) = f1(1);
    A2(0, 1) = f2(0);
    A2(1, 1) = f2(1);
    const Eigen::Matrix2cd S2 = A2 * A2.transpose();
    const cplx s11 = S2(0, 0), s22 = S2(1, 1);
    const cplx dS = S2.determinant();
    const cplx chat = dS * std::conj(s22) - s11;

    std::vector<cplx> a_candidates;
    if (std::abs(chat) < 1e-9) {
      deg_circle = true;
      a_candidates.push_back(cplx(1.0, 0.0));
    } else {
      const cplx v = kI * chat / std::abs(chat);
      a_candidates.push_back(v);
      a_candidates.push_back(-v);
    }
    for (const cplx a : a_candidates) {
      const cplx den = s22 - a * dS;
      const cplx num = cplx(1.0, 0.0) - a * s11;
      cplx b;
      if (std::abs(den) > 1e-9)
        b = num / den;
      else if (std::abs(num) < 1e-9)
        b = cplx(1.0, 0.0);
      else
        continue;
      if (std::abs(std::abs(b) - 1.0) > 1e-6) continue;
      const double t1r = std::arg(a) / 2;
      const double t2r = std::arg(b) / 2;
      for (const double d1 : {0.0, kPi}) {
        for (const double d2 : {0.0, kPi}) {
          const double t1c = t1r + d1;
          const double t2c = t2r + d2;
          Eigen::Matrix2cd T2 = Eigen::Matrix2cd::Zero();
          T2(0, 0) = std::exp(kI * t1c);
          T2(1, 1) = std::exp(kI * t2c);
          const Eigen::Matrix2cd S2p = T2 * S2 * T2;
          const Eigen::Matrix2d X = S2p.real();
          const Eigen::Matrix2d Y = S2p.imag();
          const bool use_x =
              std::abs(X(0, 1)) + std::abs(X(0, 0) - X(1, 1)) > 1e-9;
          Eigen::Matrix2d sym = use_x ? X : Y;
          sym = 0.5 * (sym + sym.transpose().eval());
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(sym);
          const Eigen::Matrix2d O2 = eig.eigenvectors();
          cplx lam[2];
          for (int j = 0; j < 2; ++j) {
            const Eigen::Vector2cd oj = O2.col(j).cast<cplx>();
            lam[j] = oj.transpose() * S2p * oj;
          }
          const int j1 =
              std::abs(lam[0] - cplx(1, 0)) <= std::abs(lam[1] - cplx(1, 0))
                  ? 0
                  : 1;
          if (std::abs(lam[j1] - cplx(1, 0)) > 1e-7) continue;
          const Eigen::Vector2d uv = O2.col(1 - j1);
          const cplx lam2 = lam[1 - j1];
          const cplx etap = std::exp(-kI * (t1c + t2c)) * eta;
          double th = -std::arg(kI * etap);
          double al = std::arg(lam2) / 2;
          double ph = std::atan2(uv(1), uv(0));
          th = mod_pos(th, kPi);
          ph = mod_pos(ph, kPi);
          al = mod_pos(al, kPi);
          push_checked(RawAngles{t1c, t2c, al, kPi / 2, ph, th},
                       /*key_uses_phi=*/true);
        }
      }
    }
  }

  const Cand* best = nullptr;
  for (const auto& c : found)
    if (!best || c.key < best->key) best = &c;
  if (!best) throw Error("normalize_plane: no normal-form candidate verified");

  NormalForm nf;
  nf.t1 = mod_pos(best->a.t1, kTwoPi);
  nf.t2 = mod_pos(best->a.t2, kTwoPi);
  nf.alpha = best->a.al;
  nf.beta = best->a.b;
  nf.phi = best->a.ph;
  nf.theta = best->a.th;
  nf.k3 = generic ? 1 : 2;
  nf.deg_phi = deg_phi;
  nf.deg_circle = deg_circle;
  nf.residual = best->res;
  return nf;
}

Mat63 normal_basis(const NormalForm& nf) {
  const Mat3c R = chart_torus(-nf.t1, -nf.t2) *
                  normal_form_chart(nf.alpha, nf.beta, nf.phi, nf.theta);
  return chart_cols_to_m(R);
}

int slice_rank(double theta, double beta, double phi, double fd_step) {
  auto proj = [](double t, double b, double f) {
    const auto fr = frame_from_angles(t, b, f);
    Mat63 B;
    for (int i = 0; i < 3; ++i) B.col(i) = su3::m_part(fr[i]);
    return projector_of_m_cols(B);
  };
  const double prm[3] = {theta, beta, phi};
  Eigen::Matrix<double, 36, 3> Jm;
  for (int i = 0; i < 3; ++i) {
    double hi[3] = {prm[0], prm[1], prm[2]};
    double lo[3] = {prm[0], prm[1], prm[2]};
    hi[i] += fd_step;
    lo[i] -= fd_step;
    const Mat6 D =
        (proj(hi[0], hi[1], hi[2]) - proj(lo[0], lo[1], lo[2])) / (2 * fd_step);
    Jm.col(i) = Eigen::Map<const Eigen::Matrix<double, 36, 1>>(D.data());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jm);
  const Eigen::VectorXd s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-6 * std::max(1.0, s(0))) ++rank;
  return rank;
}

// ---- Symmetry action, congruence, stabilizer ----

LagrangianPlane symmetry_action(const nk::IsotropyElement& e,
                                const LagrangianPlane& p) {
  return LagrangianPlane::from_chart(nk::iso_chart_matrix(e) *
                                     p.chart_matrix());
}

namespace {

// Integer coefficients of (t1,t2) in tau_j + tau_k, where the torus phases on
// the chart are tau = (t1, t2, -(t1+t2)).
Eigen::Vector2i phase_row(int j, int k) {
  static const int table[3][3][2] = {{{2, 0}, {1, 1}, {0, -1}},
                                     {{1, 1}, {0, 2}, {-1, 0}},
                                     {{0, -1}, {-1, 0}, {-2, -2}}};
  return Eigen::Vector2i(table[j][k][0], table[j][k][1]);
}

struct TorusSolutions {
  bool feasible = false;
  int cont_dim = 0;
  std::vector<Eigen::Vector2d> points;  // isolated solutions/representatives
  Eigen::Vector2d dir = Eigen::Vector2d::Zero();  // family direction if cont
};

// All torus elements T with T * Ssrc * T = Star, acting entrywise by
// e^{i(tau_j + tau_k)}: an exact integer congruence system in (t1,t2).
TorusSolutions solve_torus(const Mat3c& Ssrc, const Mat3c& Star) {
  TorusSolutions out;
  std::vector<Eigen::Vector2i> rows;
  std::vector<double> rhs;
  for (int j = 0; j < 3; ++j) {
    for (int k = j; k < 3; ++k) {
      const cplx a = Ssrc(j, k), b = Star(j, k);
      const double ma = std::abs(a), mb = std::abs(b);
      if (ma <= 1e-7 && mb <= 1e-7) continue;
      if (std::abs(ma - mb) > 1e-7) return out;  // moduli are torus-invariant
      if (ma <= 1e-7 || mb <= 1e-7) return out;
      rows.push_back(phase_row(j, k));
      rhs.push_back(std::arg(b * std::conj(a)));
    }
  }
  auto satisfies_all = [&](const Eigen::Vector2d& t) {
    for (size_t i = 0; i < rows.size(); ++i) {
      const double r =
          wrap_angle(rows[i](0) * t(0) + rows[i](1) * t(1) - rhs[i]);
      if (std::abs(r) > 1e-7) return false;
    }
    return true;
  };
  auto push_point = [&](Eigen::Vector2d t) {
    t(0) = mod_pos(t(0), kTwoPi);
    t(1) = mod_pos(t(1), kTwoPi);
    for (const auto& u : out.points)
      if (std::abs(wrap_angle(t(0) - u(0))) +
              std::abs(wrap_angle(t(1) - u(1))) <
          1e-8)
        return;
    out.points.push_back(t);
  };

  // Integer rank of the phase rows.
  long det = 0;
  size_t ia = 0, ib = 0;
  for (size_t i = 0; i < rows.size() && det == 0; ++i) {
    for (size_t j = i + 1; j < rows.size(); ++j) {
      const long d = static_cast<long>(rows[i](0)) * rows[j](1) -
                     static_cast<long>(rows[i](1)) * rows[j](0);
      if (d != 0) {
        ia = i;
        ib = j;
        det = d;
        break;
      }
    }
  }

  if (det != 0) {
    const long ad = std::labs(det);
    for (long k1 = -ad; k1 <= ad; ++k1) {
      for (long k2 = -ad; k2 <= ad; ++k2) {
        const double r1 = rhs[ia] + kTwoPi * static_cast<double>(k1);
        const double r2 = rhs[ib] + kTwoPi * static_cast<double>(k2);
        const Eigen::Vector2d t(
            (rows[ib](1) * r1 - rows[ia](1) * r2) / static_cast<double>(det),
            (-rows[ib](0) * r1 + rows[ia](0) * r2) / static_cast<double>(det));
        if (satisfies_all(t)) push_point(t);
      }
    }
    out.feasible = !out.points.empty();
    out.cont_dim = 0;
    return out;
  }

  if (!rows.empty()) {
    // All rows parallel: the solutions, if any, form cosets of a circle.
    const Eigen::Vector2i c0 = rows[0];
    const int g = std::gcd(std::abs(c0(0)), std::abs(c0(1)));
    const Eigen::Vector2i prim(c0(0) / g, c0(1) / g);
    auto row_multiple = [&](const Eigen::Vector2i& r) {
      return prim(0) != 0 ? r(0) / prim(0) : r(1) / prim(1);
    };
    const int k0 = row_multiple(c0);  // = g up to the sign convention of prim
    const double prim2 = prim.squaredNorm();
    for (int j = -std::abs(k0); j <= std::abs(k0); ++j) {
      const double u = (rhs[0] + kTwoPi * j) / k0;
      bool ok = true;
      for (size_t i = 0; i < rows.size(); ++i) {
        if (std::abs(wrap_angle(row_multiple(rows[i]) * u - rhs[i])) > 1e-7) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      push_point(Eigen::Vector2d(prim(0) * u / prim2, prim(1) * u / prim2));
    }
    out.feasible = !out.points.empty();
    out.cont_dim = out.feasible ? 1 : 0;
    out.dir = Eigen::Vector2d(-prim(1), prim(0));
    return out;
  }

  // No constraints at all: the full torus works.
  out.feasible = true;
  out.cont_dim = 2;
  out.points.push_back(Eigen::Vector2d::Zero());
  return out;
}

}  // namespace

std::optional<nk::IsotropyElement> planes_congruent(const LagrangianPlane& p1,
                                                    const LagrangianPlane& p2,
                                                    double tol) {
  const Mat3c S1 = p1.s_matrix();
  const Mat3c S2 = p2.s_matrix();
  const auto& sigmas = nk::signed_permutations();
  for (int si = 0; si < static_cast<int>(sigmas.size()); ++si) {
    const Mat3c sc = sigmas[si].cast<cplx>();
    const Mat3c Ss = sc * S1 * sc.transpose();
    const TorusSolutions sol = solve_torus(Ss, S2);
    if (!sol.feasible) continue;
    for (const auto& t : sol.points) {
      nk::IsotropyElement e;
      e.t1 = t(0);
      e.t2 = t(1);
      e.sigma = si;
      if (symmetry_action(e, p1).distance_to(p2) < std::max(tol, 1e-8))
        return e;
    }
  }
  return std::nullopt;
}

OrbitTypeReport stabilizer(const LagrangianPlane& p, double tol) {
  OrbitTypeReport rep;
  const Mat3c S = p.s_matrix();
  const auto& sigmas = nk::signed_permutations();

  struct Family {
    int si;
    Eigen::Vector2d t0;
    Eigen::Vector2d dir;
  };
  std::vector<Family> families;
  std::vector<Mat6> kept_reps;
  const double wtol = std::max(tol, 1e-8);

  for (int si = 0; si < static_cast<int>(sigmas.size()); ++si) {
    const Mat3c sc = sigmas[si].cast<cplx>();
    const Mat3c Ss = sc * S * sc.transpose();
    const TorusSolutions sol = solve_torus(Ss, S);
    if (!sol.feasible) continue;
    for (const auto& t : sol.points) {
      nk::IsotropyElement e;
      e.t1 = t(0);
      e.t2 = t(1);
      e.sigma = si;
      if (symmetry_action(e, p).distance_to(p) >= wtol) continue;
      if (sol.cont_dim == 0) {
        const Mat6 r = nk::iso_rep(e);
        bool dup = false;
        for (const auto& kr : kept_reps) {
          if ((r - kr).norm() < 1e-6) {
            dup = true;
            break;
          }
        }
        if (!dup) {
          kept_reps.push_back(r);
          rep.elements.push_back(e);
        }
      } else {
        families.push_back({si, t, sol.dir});
      }
    }
  }

  // Continuous stabilizer: directions X = x h1 + y h2 with ad(X) mapping the
  // plane into itself, found as the kernel of the normal-projected action.
  const Mat6 Pperp = Mat6::Identity() - p.projector();
  Eigen::Matrix<double, 18, 2> N;
  for (int a = 0; a < 2; ++a) {
    const Eigen::Matrix<double, 6, 3> Mcol = Pperp * ad6_h(a) * p.basis();
    N.col(a) = Eigen::Map<const Eigen::Matrix<double, 18, 1>>(Mcol.data());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(N, Eigen::ComputeFullV);
  const Eigen::VectorXd sn = svd.singularValues();
  int cdim = 0;
  for (int i = 0; i < sn.size(); ++i)
    if (sn(i) < 1e-7 * std::max(1.0, sn(0))) ++cdim;
  rep.continuous_dim = cdim;
  if (cdim >= 1) {
    Eigen::Vector2d g = svd.matrixV().col(1);
    int imax = std::abs(g(0)) >= std::abs(g(1)) ? 0 : 1;
    if (std::abs(g(imax)) > 0) g /= g(imax);
    rep.h_generator = g;
  }

  if (rep.continuous_dim == 0) {
    rep.discrete_order = static_cast<int>(rep.elements.size());
    rep.components = rep.discrete_order;
  } else {
    // Every element lies on a circle; count distinct circles as components.
    rep.discrete_order = 0;
    std::vector<Family> comps;
    for (const auto& f : families) {
      bool dup = false;
      for (const auto& c : comps) {
        if (c.si != f.si) continue;
        for (int s = 0; s < 200 && !dup; ++s) {
          const Eigen::Vector2d t = f.t0 + (kTwoPi * s / 200.0) * f.dir;
          const double d = std::abs(wrap_angle(t(0) - c.t0(0))) +
                           std::abs(wrap_angle(t(1) - c.t0(1)));
          if (d < 0.1) dup = true;
        }
        if (dup) break;
      }
      if (!dup) comps.push_back(f);
    }
    rep.components = std::max<int>(1, static_cast<int>(comps.size()));
    rep.elements.clear();
    for (const auto& f : comps) {
      nk::IsotropyElement e;
      e.t1 = f.t0(0);
      e.t2 = f.t0(1);
      e.sigma = f.si;
      rep.elements.push_back(e);
    }
  }

  bool has_order3 = false;
  for (const auto& e : rep.elements) {
    const Mat6 r = nk::iso_rep(e);
    if ((r * r * r - Mat6::Identity()).norm() < 1e-6 &&
        (r - Mat6::Identity()).norm() > 1e-6) {
      has_order3 = true;
      break;
    }
  }

  if (rep.continuous_dim >= 1)
    rep.label = "torus-line";
  else if (rep.discrete_order == 24)
    rep.label = "D";
  else if (rep.discrete_order == 3 ||
           (rep.discrete_order == 6 && has_order3))
    rep.label = "Z3";
  else if (rep.discrete_order == 1)
    rep.label = "trivial";
  else
    rep.label = "anomaly:order-" + std::to_string(rep.discrete_order);

  for (int col = 0; col < 3; ++col) {
    const int j = col == 0 ? 0 : (col == 1 ? 0 : 1);
    const int k = col == 0 ? 1 : 2;
    const Vec8 br = su3::bracket8(p.basis_vector(j), p.basis_vector(k));
    for (int a = 0; a < 2; ++a)
      rep.bracket_torus_pairings(a, col) = su3::killing8(br, Vec8::Unit(a));
  }

  return rep;
}

}  // namespace frames
}  // namespace nkflag
