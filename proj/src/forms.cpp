#include "nkflag/forms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nkflag {
namespace {

// Sorts indices ascending, returns the permutation sign, or 0 on repeats.
int sort_sign(std::vector<std::uint8_t>& idx) {
  int sign = 1;
  for (size_t a = 0; a + 1 < idx.size(); ++a) {
    for (size_t b = 0; b + 1 < idx.size() - a; ++b) {
      if (idx[b] > idx[b + 1]) {
        std::swap(idx[b], idx[b + 1]);
        sign = -sign;
      } else if (idx[b] == idx[b + 1]) {
        return 0;
      }
    }
  }
  return sign;
}

}  // namespace

AltForm::AltForm(Space space, int degree) : space_(space), degree_(degree) {
  int n = space_dim();
  if (degree < 0 || degree > n) {
    std::ostringstream os;
    os << "form degree " << degree << " outside [0," << n << "]";
    throw ArityMismatch(os.str());
  }
}

AltForm AltForm::scalar(Space space, double value) {
  AltForm f(space, 0);
  if (value != 0.0) f.terms_[{}] = value;
  return f;
}

AltForm AltForm::dual(Space space, int index) {
  AltForm f(space, 1);
  f.terms_[{static_cast<std::uint8_t>(index)}] = 1.0;
  return f;
}

AltForm AltForm::monomial(Space space, std::vector<int> indices, double coeff) {
  AltForm f(space, static_cast<int>(indices.size()));
  std::vector<std::uint8_t> key(indices.begin(), indices.end());
  for (int i : indices) {
    if (i < 0 || i >= f.space_dim()) {
      throw ArityMismatch("monomial index outside the space dimension");
    }
  }
  int sign = sort_sign(key);
  if (sign != 0 && coeff != 0.0) f.terms_[key] = sign * coeff;
  return f;
}

bool AltForm::is_zero(double tol) const {
  for (const auto& [k, c] : terms_) {
    if (std::abs(c) > tol) return false;
  }
  return true;
}

double AltForm::coefficient(const Key& k) const {
  auto it = terms_.find(k);
  return it == terms_.end() ? 0.0 : it->second;
}

void AltForm::add_term(const Key& k, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

AltForm AltForm::operator+(const AltForm& o) const {
  if (space_ != o.space_) throw SpaceMismatch("adding forms over different spaces");
  if (degree_ != o.degree_) throw ArityMismatch("adding forms of different degree");
  AltForm out = *this;
  for (const auto& [k, c] : o.terms_) out.add_term(k, c);
  return out;
}

AltForm AltForm::operator-(const AltForm& o) const { return *this + o * (-1.0); }

AltForm AltForm::operator*(double s) const {
  AltForm out(space_, degree_);
  if (s == 0.0) return out;
  for (const auto& [k, c] : terms_) out.terms_[k] = c * s;
  return out;
}

AltForm AltForm::wedge(const AltForm& o) const {
  if (space_ != o.space_) throw SpaceMismatch("wedging forms over different spaces");
  int n = space_dim();
  if (degree_ + o.degree_ > n) return AltForm(space_, 0);  // zero by degree
  AltForm out(space_, degree_ + o.degree_);
  for (const auto& [ka, ca] : terms_) {
    for (const auto& [kb, cb] : o.terms_) {
      std::vector<std::uint8_t> key;
      key.reserve(ka.size() + kb.size());
      key.insert(key.end(), ka.begin(), ka.end());
      key.insert(key.end(), kb.begin(), kb.end());
      int sign = sort_sign(key);
      if (sign != 0) out.add_term(key, sign * ca * cb);
    }
  }
  return out;
}

double AltForm::evaluate(const std::vector<Eigen::VectorXd>& vectors) const {
  if (static_cast<int>(vectors.size()) != degree_) {
    std::ostringstream os;
    os << "evaluating a degree-" << degree_ << " form on " << vectors.size()
       << " vectors";
    throw ArityMismatch(os.str());
  }
  int n = space_dim();
  for (const auto& v : vectors) {
    if (v.size() != n) {
      std::ostringstream os;
      os << "vector dimension " << v.size() << " does not match the form space "
         << n;
      throw SpaceMismatch(os.str());
    }
  }
  if (degree_ == 0) return coefficient({});
  double total = 0.0;
  Eigen::MatrixXd M(degree_, degree_);
  for (const auto& [k, c] : terms_) {
    for (int a = 0; a < degree_; ++a) {
      for (int b = 0; b < degree_; ++b) M(a, b) = vectors[b][k[a]];
    }
    total += c * M.determinant();
  }
  return total;
}

double AltForm::evaluate(const std::vector<Vec8>& vectors) const {
  std::vector<Eigen::VectorXd> vv;
  vv.reserve(vectors.size());
  if (space_ == Space::kFull8) {
    for (const auto& v : vectors) vv.emplace_back(v);
  } else {
    for (const auto& v : vectors) {
      su3::require_in_m(v);
      vv.emplace_back(su3::m_part(v));
    }
  }
  return evaluate(vv);
}

AltForm AltForm::interior(const Eigen::VectorXd& v) const {
  if (v.size() != space_dim()) {
    throw SpaceMismatch("interior-product vector dimension mismatch");
  }
  if (degree_ == 0) return AltForm(space_, 0);
  AltForm out(space_, degree_ - 1);
  for (const auto& [k, c] : terms_) {
    for (size_t pos = 0; pos < k.size(); ++pos) {
      double comp = v[k[pos]];
      if (comp == 0.0) continue;
      Key rest;
      rest.reserve(k.size() - 1);
      for (size_t q = 0; q < k.size(); ++q) {
        if (q != pos) rest.push_back(k[q]);
      }
      double sign = (pos % 2 == 0) ? 1.0 : -1.0;
      out.add_term(rest, sign * c * comp);
    }
  }
  return out;
}

AltForm AltForm::extend() const {
  if (space_ == Space::kFull8) return *this;
  AltForm out(Space::kFull8, degree_);
  for (const auto& [k, c] : terms_) {
    Key shifted = k;
    for (auto& i : shifted) i = static_cast<std::uint8_t>(i + 2);
    out.terms_[shifted] = c;
  }
  return out;
}

AltForm AltForm::ce_differential() const {
  if (space_ == Space::kComplement6) return extend().ce_differential();
  // d(e^k) = -sum_{i<j} c^k_{ij} e^i ^ e^j, extended as a graded derivation.
  static const std::array<AltForm, 8>* dual_derivs = [] {
    auto* arr = new std::array<AltForm, 8>{
        AltForm(Space::kFull8, 2), AltForm(Space::kFull8, 2),
        AltForm(Space::kFull8, 2), AltForm(Space::kFull8, 2),
        AltForm(Space::kFull8, 2), AltForm(Space::kFull8, 2),
        AltForm(Space::kFull8, 2), AltForm(Space::kFull8, 2)};
    for (const auto& e : su3::structure_constants()) {
      if (e.i < e.j) {
        (*arr)[e.k].add_term({static_cast<std::uint8_t>(e.i),
                              static_cast<std::uint8_t>(e.j)},
                             -e.val);
      }
    }
    return arr;
  }();
  AltForm out(Space::kFull8, degree_ + 1);
  if (degree_ + 1 > 8) return AltForm(Space::kFull8, 0);
  for (const auto& [k, c] : terms_) {
    for (size_t t = 0; t < k.size(); ++t) {
      // c * (-1)^t * e^{k_0} ^ ... ^ d(e^{k_t}) ^ ... ^ e^{k_last}
      AltForm piece = AltForm::scalar(Space::kFull8, (t % 2 == 0) ? c : -c);
      for (size_t q = 0; q < k.size(); ++q) {
        piece = piece.wedge(q == t ? (*dual_derivs)[k[q]]
                                   : AltForm::dual(Space::kFull8, k[q]));
      }
      for (const auto& [pk, pc] : piece.terms_) out.add_term(pk, pc);
    }
  }
  return out;
}

double AltForm::max_coefficient_difference(const AltForm& o) const {
  if (space_ != o.space_) throw SpaceMismatch("comparing forms over different spaces");
  if (degree_ != o.degree_) throw ArityMismatch("comparing forms of different degree");
  double worst = 0.0;
  for (const auto& [k, c] : terms_) {
    worst = std::max(worst, std::abs(c - o.coefficient(k)));
  }
  for (const auto& [k, c] : o.terms_) {
    worst = std::max(worst, std::abs(c - coefficient(k)));
  }
  return worst;
}

double AltForm::max_abs_coefficient() const {
  double worst = 0.0;
  for (const auto& [k, c] : terms_) worst = std::max(worst, std::abs(c));
  return worst;
}

AltForm AltForm::pruned(double tol) const {
  AltForm out(space_, degree_);
  for (const auto& [k, c] : terms_) {
    if (std::abs(c) > tol) out.terms_[k] = c;
  }
  return out;
}

}  // namespace nkflag
