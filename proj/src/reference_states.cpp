#include "entwit/reference_states.hpp"

#include <cmath>

#include "entwit/error.hpp"

namespace entwit::reference {

BipartiteVector shifted_maximally_entangled(int n, int shift) {
  if (n < 1) throw ValidationError("dimension must be positive");
  CMatrix d = CMatrix::Zero(n, n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) d(i, ((i + shift) % n + n) % n) = amp;
  return BipartiteVector(std::move(d));
}

DensityOperator shifted_basis_state(std::span<const double> q) {
  const int n = static_cast<int>(q.size());
  std::vector<MixtureTerm> terms;
  for (int k = 0; k < n; ++k) terms.push_back({q[k], shifted_maximally_entangled(n, k)});
  return DensityOperator::from_mixture(terms);
}

std::vector<MixtureTerm> cyclic_terms(double q1, double q2, double q3) {
  const Dims d{3, 3};
  std::vector<MixtureTerm> terms{{q1, shifted_maximally_entangled(3, 0)},
                                 {q2, shifted_maximally_entangled(3, 1)}};
  for (int i = 0; i < 3; ++i) terms.push_back({q3 / 3.0, BipartiteVector::basis(d, i, (i + 2) % 3)});
  return terms;
}

DensityOperator cyclic_state(double q1, double q2, double q3) {
  return DensityOperator::from_mixture(cyclic_terms(q1, q2, q3));
}

std::vector<DensityOperator> cyclic_components() {
  const Dims d{3, 3};
  std::vector<MixtureTerm> third;
  for (int i = 0; i < 3; ++i) third.push_back({1.0 / 3.0, BipartiteVector::basis(d, i, (i + 2) % 3)});
  return {DensityOperator::pure(shifted_maximally_entangled(3, 0)),
          DensityOperator::pure(shifted_maximally_entangled(3, 1)), DensityOperator::from_mixture(third)};
}

Condition cyclic_ppt_condition(double q1, double q2, double q3, double tol) {
  const double gap = q1 * q2 * q3 - q1 * q1 * q1 - q2 * q2 * q2;
  if (std::abs(gap) <= tol) return Condition::boundary;
  return gap > 0.0 ? Condition::holds : Condition::violated;
}

SequenceMixture inverse_linear_mixture(std::array<double, 3> p) {
  return SequenceMixture::validated({{p[0], SequenceVector::inverse_linear(0)},
                                     {p[1], SequenceVector::inverse_linear(1)},
                                     {p[2], SequenceVector::inverse_linear(2)}});
}

}  // namespace entwit::reference
