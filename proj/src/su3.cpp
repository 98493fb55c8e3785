#include "nkflag/su3.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

namespace nkflag {
namespace su3 {
namespace {

constexpr cplx I{0.0, 1.0};

std::array<Mat3c, 8> make_basis() {
  std::array<Mat3c, 8> b;
  const double s3 = std::sqrt(3.0);
  // h1 = diag(-i, 0, i)
  b[0] = Mat3c::Zero();
  b[0](0, 0) = -I;
  b[0](2, 2) = I;
  // h2 = diag(i/sqrt3, -2i/sqrt3, i/sqrt3)
  b[1] = Mat3c::Zero();
  b[1](0, 0) = I / s3;
  b[1](1, 1) = -2.0 * I / s3;
  b[1](2, 2) = I / s3;
  // m1 : real rotation generator in the (1,2) block
  b[2] = Mat3c::Zero();
  b[2](0, 1) = -1.0;
  b[2](1, 0) = 1.0;
  // m2 : real rotation generator in the (2,3) block
  b[3] = Mat3c::Zero();
  b[3](1, 2) = -1.0;
  b[3](2, 1) = 1.0;
  // m3 : real rotation generator in the (1,3) block
  b[4] = Mat3c::Zero();
  b[4](0, 2) = -1.0;
  b[4](2, 0) = 1.0;
  // m4 : imaginary symmetric generator in the (1,2) block
  b[5] = Mat3c::Zero();
  b[5](0, 1) = I;
  b[5](1, 0) = I;
  // m5 : imaginary symmetric generator in the (2,3) block
  b[6] = Mat3c::Zero();
  b[6](1, 2) = I;
  b[6](2, 1) = I;
  // m6 : imaginary symmetric generator in the (1,3) block
  b[7] = Mat3c::Zero();
  b[7](0, 2) = I;
  b[7](2, 0) = I;
  return b;
}

// Structure constants computed once from the matrices themselves, then used
// for all coefficient-space brackets.
std::vector<StructureEntry> make_structure_constants() {
  std::vector<StructureEntry> out;
  const auto& b = basis();
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      if (i == j) continue;
      Mat3c br = bracket(b[i], b[j]);
      for (int k = 0; k < kDim; ++k) {
        double c = -0.5 * (br * b[k]).trace().real();
        if (std::abs(c) > 1e-12) out.push_back({i, j, k, c});
      }
    }
  }
  return out;
}

}  // namespace

const std::array<Mat3c, 8>& basis() {
  static const std::array<Mat3c, 8> b = make_basis();
  return b;
}

const std::array<const char*, 8>& basis_names() {
  static const std::array<const char*, 8> n{"h1", "h2", "m1", "m2",
                                            "m3", "m4", "m5", "m6"};
  return n;
}

const std::vector<StructureEntry>& structure_constants() {
  static const std::vector<StructureEntry> c = make_structure_constants();
  return c;
}

Vec8 decompose(const Mat3c& M, double tol) {
  // Membership test: anti-Hermitian and traceless.
  double herm = (M + M.adjoint()).cwiseAbs().maxCoeff();
  double tr = std::abs(M.trace());
  if (herm > tol || tr > tol) {
    std::ostringstream os;
    os << "matrix is not in the algebra: anti-hermiticity residual " << herm
       << ", trace magnitude " << tr;
    throw AdDecompositionError(os.str());
  }
  const auto& b = basis();
  Vec8 c;
  for (int k = 0; k < kDim; ++k) c[k] = -0.5 * (M * b[k]).trace().real();
  double recon = (from_coeffs(c) - M).cwiseAbs().maxCoeff();
  if (recon > tol) {
    std::ostringstream os;
    os << "matrix is not spanned by the basis: reconstruction residual "
       << recon;
    throw AdDecompositionError(os.str());
  }
  return c;
}

Mat3c from_coeffs(const Vec8& c) {
  const auto& b = basis();
  Mat3c M = Mat3c::Zero();
  for (int k = 0; k < kDim; ++k) M += c[k] * b[k];
  return M;
}

Vec8 bracket8(const Vec8& x, const Vec8& y) {
  Vec8 out = Vec8::Zero();
  for (const auto& e : structure_constants()) out[e.k] += e.val * x[e.i] * y[e.j];
  return out;
}

double killing(const Mat3c& X, const Mat3c& Y) {
  return 6.0 * (X * Y).trace().real();
}

double killing8(const Vec8& x, const Vec8& y) { return -12.0 * x.dot(y); }

double inner(const Mat3c& X, const Mat3c& Y) {
  return -0.5 * (X * Y).trace().real();
}

Vec8 project_h(const Vec8& x) {
  Vec8 out = Vec8::Zero();
  out[0] = x[0];
  out[1] = x[1];
  return out;
}

Vec8 project_m(const Vec8& x) {
  Vec8 out = x;
  out[0] = 0.0;
  out[1] = 0.0;
  return out;
}

Eigen::Matrix<double, 6, 1> m_part(const Vec8& x) {
  return x.segment<6>(2);
}

Vec8 from_m_part(const Eigen::Matrix<double, 6, 1>& v) {
  Vec8 out = Vec8::Zero();
  out.segment<6>(2) = v;
  return out;
}

void require_in_m(const Vec8& x, double tol) {
  double res = std::max(std::abs(x[0]), std::abs(x[1]));
  if (res > tol) {
    std::ostringstream os;
    os << "vector has torus component of magnitude " << res;
    throw NotInM(os.str());
  }
}

Mat3c exp_anti_hermitian(const Mat3c& X) {
  // X = iH with H Hermitian; exp(X) = V diag(e^{i lambda}) V^*.
  Mat3c H = -I * X;
  Eigen::SelfAdjointEigenSolver<Mat3c> es(H);
  Vec3c phases;
  for (int k = 0; k < 3; ++k) {
    phases[k] = std::exp(I * es.eigenvalues()[k]);
  }
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

Mat3c exp_coeffs(const Vec8& c) { return exp_anti_hermitian(from_coeffs(c)); }

Mat8 adjoint_matrix(const Mat3c& g, double tol) {
  double unit = (g * g.adjoint() - Mat3c::Identity()).cwiseAbs().maxCoeff();
  double det = std::abs(g.determinant() - 1.0);
  if (unit > tol || det > tol) {
    std::ostringstream os;
    os << "matrix is not special unitary: unitarity residual " << unit
       << ", determinant offset " << det;
    throw AdDecompositionError(os.str());
  }
  const auto& b = basis();
  Mat8 A;
  for (int k = 0; k < kDim; ++k) {
    Mat3c conj = g * b[k] * g.adjoint();
    A.col(k) = decompose(conj, std::max(tol, 1e-9));
  }
  return A;
}

double reductive_residual() {
  const auto& b = basis();
  double worst = 0.0;
  // [h,h] stays in h (it is abelian), [h,m] stays in m.
  for (int i : kTorusIdx) {
    for (int j : kTorusIdx) {
      worst = std::max(worst, bracket(b[i], b[j]).cwiseAbs().maxCoeff());
    }
    for (int j : kComplementIdx) {
      Vec8 c = decompose(bracket(b[i], b[j]));
      worst = std::max(worst, std::max(std::abs(c[0]), std::abs(c[1])));
    }
  }
  return worst;
}

}  // namespace su3

double Rng::uniform() {
  // 53-bit mantissa draw.
  return (gen_() >> 11) * (1.0 / 9007199254740992.0);
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 1e-300);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  cached_ = r * std::sin(a);
  have_cached_ = true;
  return r * std::cos(a);
}

Vec8 Rng::random_m_direction() {
  Eigen::Matrix<double, 6, 1> v;
  for (int k = 0; k < 6; ++k) v[k] = normal();
  v.normalize();
  return su3::from_m_part(v);
}

Vec8 Rng::random_algebra() {
  Vec8 c;
  for (int k = 0; k < 8; ++k) c[k] = normal();
  return c;
}

Mat3c Rng::haar_u3() {
  Mat3c Z;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) Z(r, c) = cplx(normal(), normal());
  }
  Eigen::HouseholderQR<Mat3c> qr(Z);
  Mat3c Q = qr.householderQ();
  Mat3c R = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so the distribution is Haar.
  for (int c = 0; c < 3; ++c) {
    cplx d = R(c, c);
    Q.col(c) *= d / std::abs(d);
  }
  return Q;
}

Mat3c Rng::haar_su3() {
  Mat3c Q = haar_u3();
  cplx det = Q.determinant();
  // Divide one column by the determinant phase.
  Q.col(0) /= det;
  return Q;
}

}  // namespace nkflag
