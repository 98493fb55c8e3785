#pragma once
// Alternating multilinear forms on the 8-dimensional algebra and on the
// 6-dimensional complement m, with wedge product, interior product, and the
// Chevalley-Eilenberg differential driven by the structure constants.
//
// Convention: a basis p-form e^{i1...ip} (ascending indices) evaluates on
// vectors (v1,...,vp) as the p x p determinant det(v_b[i_a]) -- no 1/p!
// factors anywhere.  Wedge of basis forms is index concatenation with the
// permutation sign.
#include <cstdint>
#include <map>
#include <vector>

#include "nkflag/su3.hpp"

namespace nkflag {

enum class Space : std::uint8_t {
  kFull8,        // forms on g*, indices 0..7 meaning h1,h2,m1..m6
  kComplement6,  // forms on m*, indices 0..5 meaning m1..m6
};

class AltForm {
 public:
  using Key = std::vector<std::uint8_t>;  // strictly increasing index tuple

  AltForm(Space space, int degree);

  // 0-form (scalar).
  static AltForm scalar(Space space, double value);
  // Dual basis 1-form e^{index} on the given space.
  static AltForm dual(Space space, int index);
  // Basis monomial with a coefficient; indices need not be sorted, the sign
  // of the sorting permutation is absorbed (repeated index => zero form).
  static AltForm monomial(Space space, std::vector<int> indices, double coeff);

  Space space() const { return space_; }
  int degree() const { return degree_; }
  bool is_zero(double tol = 0.0) const;

  // Coefficient of an ascending index tuple (0 if absent).
  double coefficient(const Key& k) const;
  const std::map<Key, double>& terms() const { return terms_; }

  AltForm operator+(const AltForm& o) const;
  AltForm operator-(const AltForm& o) const;
  AltForm operator*(double s) const;
  friend AltForm operator*(double s, const AltForm& f) { return f * s; }

  // Graded-commutative wedge product; throws SpaceMismatch across spaces.
  AltForm wedge(const AltForm& o) const;

  // Evaluation on degree() many vectors; throws ArityMismatch otherwise.
  // Full-space forms take 8-vectors; complement forms take 6-vectors (the
  // overload taking 8-vectors evaluates on their m-parts after checking the
  // arguments lie in m).
  double evaluate(const std::vector<Eigen::VectorXd>& vectors) const;
  double evaluate(const std::vector<Vec8>& vectors) const;

  // Interior product with a vector in the first slot.
  AltForm interior(const Eigen::VectorXd& v) const;

  // Extension by zero from m* to g* (shifts indices by 2); identity on
  // full-space forms.
  AltForm extend() const;

  // Chevalley-Eilenberg differential d(alpha)(X,Y,...) built from the
  // structure constants; complement forms are extended by zero first.
  AltForm ce_differential() const;

  // Largest absolute coefficient difference with another form (for equality
  // tests); throws SpaceMismatch / ArityMismatch on shape differences.
  double max_coefficient_difference(const AltForm& o) const;
  double max_abs_coefficient() const;

  // Drops coefficients below tol.
  AltForm pruned(double tol = 1e-15) const;

 private:
  void add_term(const Key& k, double c);
  int space_dim() const { return space_ == Space::kFull8 ? 8 : 6; }

  Space space_;
  int degree_;
  std::map<Key, double> terms_;
};

}  // namespace nkflag
