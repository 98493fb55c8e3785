#pragma once
// Reconstruction from frame data: flatness residual of sampled
// algebra-valued derivative data, geometric path integration of the frame
// equation, development of a patch to group elements, and the congruence
// test with its group-element witness.
#include <array>
#include <functional>
#include <vector>

#include "nkflag/su3.hpp"

namespace nkflag {
namespace cartan {

// Connection data of a framed immersion sampled on a uniform grid: the
// algebra values alpha(d/du_a) at every node, for a <= dim, together with
// the frame at the origin node.
struct FramedPatch {
  int dim = 1;                           // number of parameters (1, 2, or 3)
  std::array<int, 3> shape{1, 1, 1};     // nodes per axis (1 beyond dim)
  std::array<double, 3> spacing{0.1, 0.1, 0.1};
  Mat3c anchor = Mat3c::Identity();      // frame at the origin node
  std::vector<std::array<Vec8, 3>> alpha;  // per node, per axis

  int index(int i, int j, int k) const;
  const std::array<Vec8, 3>& at(int i, int j, int k) const;
  std::array<Vec8, 3>& at(int i, int j, int k);

  // Samples a callable alpha field over the grid.
  static FramedPatch sample(
      int dim, const std::array<int, 3>& shape,
      const std::array<double, 3>& spacing,
      const std::function<std::array<Vec8, 3>(const Eigen::Vector3d&)>& field,
      const Mat3c& anchor = Mat3c::Identity());
  // A patch with the same alpha values at every node.
  static FramedPatch constant(int dim, const std::array<int, 3>& shape,
                              const std::array<double, 3>& spacing,
                              const std::array<Vec8, 3>& alpha,
                              const Mat3c& anchor = Mat3c::Identity());
};

// Structure-equation residual d alpha(d_a, d_b) + [alpha(d_a), alpha(d_b)]
// by central differences over interior nodes, max and mean over all pairs.
// Zero for a single-parameter patch; throws GridTooSmall when a
// participating axis has fewer than three nodes.
struct McResidual {
  double max_residual = 0.0;
  double mean_residual = 0.0;
};
McResidual mc_residual(const FramedPatch& F);

// Integrates g' = g alpha(t) from g0 over [0, T] with a two-stage
// fourth-order geometric step (per-step exact exponential of the two-node
// update), then projects the endpoint back to the unitary group.  Throws
// StepTooLarge when ||alpha|| h >= 0.5 at an evaluation node.
struct IntegrationResult {
  Mat3c endpoint = Mat3c::Identity();
  double unitarity_defect = 0.0;  // before the final projection
};
IntegrationResult integrate_path(const std::function<Vec8(double)>& alpha,
                                 const Mat3c& g0, double T, int steps);

// Develops the patch from the origin node to a grid node along axis-ordered
// lattice segments (alpha interpolated linearly within each segment).
Mat3c develop_to_node(const FramedPatch& F, const std::array<int, 3>& node);

// Congruence of two 3-parameter patches over the same domain: the
// normalized tangent-plane angles and the torus components of alpha must
// agree pointwise; the witness g with g . (first) = (second) is read off as
// develop_2(p) develop_1(p)^{-1} and validated at ten sample nodes.
// Throws DomainMismatch when the domains differ.
struct CongruenceReport {
  bool congruent = false;
  double invariant_mismatch = 0.0;  // max pointwise field difference
  double witness_spread = 0.0;      // max deviation across sample nodes
  Mat3c witness = Mat3c::Identity();
};
CongruenceReport congruence_test(const FramedPatch& F1, const FramedPatch& F2,
                                 double tol = 1e-7);

}  // namespace cartan
}  // namespace nkflag
