#include "nkflag/cartan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nkflag/errors.hpp"
#include "nkflag/frames.hpp"

namespace nkflag {
namespace cartan {

namespace {

constexpr double kGaussOffset = 0.28867513459481287;  // sqrt(3)/6

Mat3c exp_coeff(const Vec8& omega) {
  return su3::exp_anti_hermitian(su3::from_coeffs(omega));
}

// One fourth-order step for g' = g alpha(t) over [t, t+h]: two-node update
// Omega = (h/2)(A1 + A2) + (sqrt(3) h^2 / 12) [A1, A2].  (The commutator
// orientation belongs to the right-multiplication equation; the inverse
// path solves the left-multiplication one with the opposite sign.)
Vec8 step_update(const Vec8& A1, const Vec8& A2, double h) {
  return 0.5 * h * (A1 + A2) +
         (std::sqrt(3.0) * h * h / 12.0) * su3::bracket8(A1, A2);
}

double unitarity(const Mat3c& g) {
  return (g.adjoint() * g - Mat3c::Identity()).cwiseAbs().maxCoeff();
}

Mat3c polar_project(const Mat3c& g) {
  Eigen::JacobiSVD<Mat3c> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

int FramedPatch::index(int i, int j, int k) const {
  return (i * shape[1] + j) * shape[2] + k;
}

const std::array<Vec8, 3>& FramedPatch::at(int i, int j, int k) const {
  return alpha[index(i, j, k)];
}

std::array<Vec8, 3>& FramedPatch::at(int i, int j, int k) {
  return alpha[index(i, j, k)];
}

FramedPatch FramedPatch::sample(
    int dim, const std::array<int, 3>& shape,
    const std::array<double, 3>& spacing,
    const std::function<std::array<Vec8, 3>(const Eigen::Vector3d&)>& field,
    const Mat3c& anchor) {
  FramedPatch F;
  F.dim = dim;
  F.shape = shape;
  for (int a = dim; a < 3; ++a) F.shape[a] = 1;
  F.spacing = spacing;
  F.anchor = anchor;
  F.alpha.resize(static_cast<size_t>(F.shape[0]) * F.shape[1] * F.shape[2]);
  for (int i = 0; i < F.shape[0]; ++i)
    for (int j = 0; j < F.shape[1]; ++j)
      for (int k = 0; k < F.shape[2]; ++k) {
        const Eigen::Vector3d u(i * spacing[0], j * spacing[1],
                                k * spacing[2]);
        F.at(i, j, k) = field(u);
      }
  return F;
}

FramedPatch FramedPatch::constant(int dim, const std::array<int, 3>& shape,
                                  const std::array<double, 3>& spacing,
                                  const std::array<Vec8, 3>& alpha,
                                  const Mat3c& anchor) {
  return sample(
      dim, shape, spacing,
      [&](const Eigen::Vector3d&) { return alpha; }, anchor);
}

McResidual mc_residual(const FramedPatch& F) {
  McResidual out;
  if (F.dim < 2) return out;
  for (int a = 0; a < F.dim; ++a)
    if (F.shape[a] < 3) {
      std::ostringstream os;
      os << "axis " << a << " has " << F.shape[a]
         << " nodes; at least 3 are needed for central differences";
      throw GridTooSmall(os.str());
    }

  double sum = 0;
  long long count = 0;
  std::array<int, 3> n = F.shape;
  for (int a = 0; a < F.dim; ++a)
    for (int b = a + 1; b < F.dim; ++b) {
      std::array<int, 3> lo{0, 0, 0}, hi{n[0], n[1], n[2]};
      lo[a] = 1;
      hi[a] = n[a] - 1;
      lo[b] = 1;
      hi[b] = n[b] - 1;
      for (int i = lo[0]; i < hi[0]; ++i)
        for (int j = lo[1]; j < hi[1]; ++j)
          for (int k = lo[2]; k < hi[2]; ++k) {
            std::array<int, 3> p{i, j, k}, pa = p, ma = p, pb = p, mb = p;
            pa[a] += 1;
            ma[a] -= 1;
            pb[b] += 1;
            mb[b] -= 1;
            const Vec8 dadb =
                (F.at(pa[0], pa[1], pa[2])[b] - F.at(ma[0], ma[1], ma[2])[b]) /
                (2.0 * F.spacing[a]);
            const Vec8 dbda =
                (F.at(pb[0], pb[1], pb[2])[a] - F.at(mb[0], mb[1], mb[2])[a]) /
                (2.0 * F.spacing[b]);
            const auto& al = F.at(i, j, k);
            const double r =
                (dadb - dbda + su3::bracket8(al[a], al[b])).norm();
            out.max_residual = std::max(out.max_residual, r);
            sum += r;
            ++count;
          }
    }
  if (count > 0) out.mean_residual = sum / static_cast<double>(count);
  return out;
}

IntegrationResult integrate_path(const std::function<Vec8(double)>& alpha,
                                 const Mat3c& g0, double T, int steps) {
  if (steps < 1) throw Error("integration needs at least one step");
  const double h = T / steps;
  Mat3c g = g0;
  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    const Vec8 A1 = alpha(t + h * (0.5 - kGaussOffset));
    const Vec8 A2 = alpha(t + h * (0.5 + kGaussOffset));
    const double load = std::max(A1.norm(), A2.norm()) * std::abs(h);
    if (load >= 0.5) {
      std::ostringstream os;
      os << "step size too large: ||alpha|| h = " << load << " at t = " << t;
      throw StepTooLarge(os.str());
    }
    g = g * exp_coeff(step_update(A1, A2, h));
  }
  IntegrationResult out;
  out.unitarity_defect = unitarity(g);
  out.endpoint = polar_project(g);
  return out;
}

Mat3c develop_to_node(const FramedPatch& F, const std::array<int, 3>& node) {
  for (int a = 0; a < 3; ++a)
    if (node[a] < 0 || node[a] >= F.shape[a])
      throw Error("development target outside the patch");
  Mat3c g = F.anchor;
  std::array<int, 3> cur{0, 0, 0};
  for (int a = 0; a < F.dim; ++a) {
    const double h = F.spacing[a];
    while (cur[a] < node[a]) {
      std::array<int, 3> nxt = cur;
      nxt[a] += 1;
      const Vec8 A0 = F.at(cur[0], cur[1], cur[2])[a];
      const Vec8 A1 = F.at(nxt[0], nxt[1], nxt[2])[a];
      // Linear interpolation of alpha within the segment at the two nodes.
      const double c1 = 0.5 - kGaussOffset, c2 = 0.5 + kGaussOffset;
      const Vec8 Ac1 = (1 - c1) * A0 + c1 * A1;
      const Vec8 Ac2 = (1 - c2) * A0 + c2 * A1;
      g = g * exp_coeff(step_update(Ac1, Ac2, h));
      cur = nxt;
    }
  }
  return polar_project(g);
}

CongruenceReport congruence_test(const FramedPatch& F1, const FramedPatch& F2,
                                 double tol) {
  if (F1.dim != 3 || F2.dim != 3)
    throw DomainMismatch("congruence test needs 3-parameter patches");
  if (F1.shape != F2.shape || F1.spacing != F2.spacing)
    throw DomainMismatch("patches live on different grids");

  CongruenceReport rep;
  double mismatch = 0;
  for (int i = 0; i < F1.shape[0]; ++i)
    for (int j = 0; j < F1.shape[1]; ++j)
      for (int k = 0; k < F1.shape[2]; ++k) {
        const auto& a1 = F1.at(i, j, k);
        const auto& a2 = F2.at(i, j, k);
        // Torus components of alpha must agree slot by slot.
        for (int a = 0; a < 3; ++a)
          for (int t = 0; t < 2; ++t)
            mismatch = std::max(mismatch, std::abs(a1[a][t] - a2[a][t]));
        // Normalized tangent-plane angles must agree.
        const auto p1 = frames::LagrangianPlane::from_m_span(
            su3::project_m(a1[0]), su3::project_m(a1[1]),
            su3::project_m(a1[2]));
        const auto p2 = frames::LagrangianPlane::from_m_span(
            su3::project_m(a2[0]), su3::project_m(a2[1]),
            su3::project_m(a2[2]));
        const auto n1 = frames::normalize_plane(p1);
        const auto n2 = frames::normalize_plane(p2);
        if (n1.k3 != n2.k3) {
          mismatch = std::max(mismatch, 1.0);
        } else {
          mismatch = std::max(
              {mismatch, std::abs(n1.theta - n2.theta),
               std::abs(n1.beta - n2.beta), std::abs(n1.phi - n2.phi)});
        }
      }
  rep.invariant_mismatch = mismatch;

  // Witness from ten deterministic sample nodes.
  const long long total = static_cast<long long>(F1.shape[0]) * F1.shape[1] *
                          F1.shape[2];
  bool have = false;
  for (int s = 0; s < 10; ++s) {
    const long long flat = (total - 1) * s / 9;
    std::array<int, 3> node;
    node[2] = static_cast<int>(flat % F1.shape[2]);
    node[1] = static_cast<int>((flat / F1.shape[2]) % F1.shape[1]);
    node[0] = static_cast<int>(flat / (F1.shape[1] * F1.shape[2]));
    const Mat3c g1 = develop_to_node(F1, node);
    const Mat3c g2 = develop_to_node(F2, node);
    const Mat3c w = g2 * g1.adjoint();
    if (!have) {
      rep.witness = w;
      have = true;
    } else {
      rep.witness_spread = std::max(
          rep.witness_spread, (w - rep.witness).cwiseAbs().maxCoeff());
    }
  }
  rep.congruent = mismatch < tol && rep.witness_spread < std::max(tol, 1e-8);
  return rep;
}

}  // namespace cartan
}  // namespace nkflag
