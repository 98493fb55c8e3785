#pragma once
// Core linear algebra of su(3) in a fixed real orthonormal basis.
//
// Basis (indices 0..7): h1, h2 span the diagonal torus directions; m1..m6 span
// the reductive complement m.  The basis is orthonormal for the inner product
// <X,Y> = -tr(XY)/2, which equals -(1/12) of the Killing form B(X,Y) = 6 tr(XY).
#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nkflag/errors.hpp"

namespace nkflag {

using cplx = std::complex<double>;
using Mat3c = Eigen::Matrix3cd;
using Vec3c = Eigen::Vector3cd;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

namespace su3 {

inline constexpr int kDim = 8;
// Indices of the torus block and of the complement block inside 0..7.
inline constexpr std::array<int, 2> kTorusIdx{0, 1};
inline constexpr std::array<int, 6> kComplementIdx{2, 3, 4, 5, 6, 7};

// The eight basis matrices, in order h1, h2, m1..m6.
const std::array<Mat3c, 8>& basis();

// Human-readable names "h1","h2","m1",...,"m6".
const std::array<const char*, 8>& basis_names();

// Coefficients of an algebra element in the basis: c_k = -Re tr(M b_k)/2.
// Throws AdDecompositionError if M is not anti-Hermitian traceless within tol,
// or if the reconstruction from the coefficients misses M by more than tol.
Vec8 decompose(const Mat3c& M, double tol = 1e-9);

// Linear combination of basis matrices.
Mat3c from_coeffs(const Vec8& c);

// Matrix commutator.
inline Mat3c bracket(const Mat3c& A, const Mat3c& B) { return A * B - B * A; }

// Commutator expressed in coefficients, via precomputed structure constants.
Vec8 bracket8(const Vec8& x, const Vec8& y);

// Killing form B(X,Y) = 6 tr(XY) (real for anti-Hermitian arguments).
double killing(const Mat3c& X, const Mat3c& Y);
double killing8(const Vec8& x, const Vec8& y);

// Invariant inner product <X,Y> = -tr(XY)/2 = -(1/12) B; the basis is
// orthonormal for it, so in coefficients it is the Euclidean dot product.
double inner(const Mat3c& X, const Mat3c& Y);
inline double inner8(const Vec8& x, const Vec8& y) { return x.dot(y); }

// Projections onto the torus block h and the complement block m.
Vec8 project_h(const Vec8& x);
Vec8 project_m(const Vec8& x);

// The m-part of x as a 6-vector (coefficients of m1..m6), and back.
Eigen::Matrix<double, 6, 1> m_part(const Vec8& x);
Vec8 from_m_part(const Eigen::Matrix<double, 6, 1>& v);

// Throws NotInM unless the torus component of x is below tol.
void require_in_m(const Vec8& x, double tol = 1e-9);

// Matrix exponential of an anti-Hermitian matrix via a Hermitian
// eigendecomposition (exact unitary result up to roundoff).
Mat3c exp_anti_hermitian(const Mat3c& X);

// Group element exp(from_coeffs(c)).
Mat3c exp_coeffs(const Vec8& c);

// The 8x8 real matrix of conjugation X -> g X g^{-1} in the fixed basis.
// Throws AdDecompositionError if g fails to be special unitary within tol or
// conjugation fails to preserve the algebra.
Mat8 adjoint_matrix(const Mat3c& g, double tol = 1e-8);

// Structure constants as a sparse list: [b_i, b_j] = sum_k c(i,j,k) b_k.
struct StructureEntry {
  int i, j, k;
  double val;
};
const std::vector<StructureEntry>& structure_constants();

// Verifies the reductive-decomposition containments [h,h] subset h,
// [h,m] subset m, and that [m,m] has both h- and m-components somewhere.
// Returns the maximum residual of the two containments.
double reductive_residual();

}  // namespace su3

// Deterministic random source.  Distributions are hand-rolled on top of
// std::mt19937_64 so streams are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0,1).
  double uniform();
  // Uniform in [a,b).
  double uniform(double a, double b);
  // Standard normal via Box-Muller (uses two uniforms per pair, cached).
  double normal();
  // Uniformly random unit-norm element of m (as an 8-vector).
  Vec8 random_m_direction();
  // Random algebra element with independent standard-normal coefficients.
  Vec8 random_algebra();
  // Haar-distributed special unitary 3x3 matrix.
  Mat3c haar_su3();
  // Haar-distributed unitary 3x3 matrix.
  Mat3c haar_u3();

 private:
  std::mt19937_64 gen_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace nkflag
