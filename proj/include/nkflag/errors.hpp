#pragma once
#include <stdexcept>
#include <string>

namespace nkflag {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A tangent argument was expected to lie in the reductive complement m but has
// a component along the torus directions h1, h2 above tolerance.
struct NotInM : Error {
  explicit NotInM(const std::string& what) : Error(what) {}
};

// Two multivectors or forms live over different model spaces (full algebra vs
// the six-dimensional complement) and cannot be combined.
struct SpaceMismatch : Error {
  explicit SpaceMismatch(const std::string& what) : Error(what) {}
};

// A form was evaluated on the wrong number of vectors.
struct ArityMismatch : Error {
  explicit ArityMismatch(const std::string& what) : Error(what) {}
};

// A frame expected to be orthonormal fails the Gram test.
struct NotOrthonormal : Error {
  explicit NotOrthonormal(const std::string& what) : Error(what) {}
};

// A 3-plane fails the vanishing test for the fundamental 2-form.
struct NotLagrangian : Error {
  explicit NotLagrangian(const std::string& what) : Error(what) {}
};

// A span expected to close under the bracket does not.
struct NotASubalgebra : Error {
  explicit NotASubalgebra(const std::string& what) : Error(what) {}
};

// Conjugation by a supplied matrix does not preserve the algebra, so the
// induced 8x8 action cannot be formed.
struct AdDecompositionError : Error {
  explicit AdDecompositionError(const std::string& what) : Error(what) {}
};

// A field or path argument is defined over the wrong parameter domain.
struct DomainMismatch : Error {
  explicit DomainMismatch(const std::string& what) : Error(what) {}
};

// A single integration step moves farther than the trust radius of the
// log-coordinate update.
struct StepTooLarge : Error {
  explicit StepTooLarge(const std::string& what) : Error(what) {}
};

// A sampled field has too few points to form the requested finite-difference
// stencil.
struct GridTooSmall : Error {
  explicit GridTooSmall(const std::string& what) : Error(what) {}
};

// A projection used to build a frame or chart is numerically rank-deficient.
struct ProjectionDegenerate : Error {
  explicit ProjectionDegenerate(const std::string& what) : Error(what) {}
};

// A normal-form parameter sits on the boundary between strata where a chart
// breaks down.
struct BoundaryPoint : Error {
  explicit BoundaryPoint(const std::string& what) : Error(what) {}
};

// The command line named an example that does not exist.
struct UnknownExample : Error {
  explicit UnknownExample(const std::string& what) : Error(what) {}
};

}  // namespace nkflag
