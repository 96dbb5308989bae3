#pragma once

// Families of states with known entanglement structure, used by the
// reproduction command and the tests.

#include <array>
#include <vector>

#include "entwit/bipartite.hpp"

namespace entwit::reference {

/// (1/sqrt n) sum_i |i, (i + shift) mod n>.
BipartiteVector shifted_maximally_entangled(int n, int shift);

/// sum_k q_k |w_k><w_k| over the n shifted maximally entangled vectors.
DensityOperator shifted_basis_state(std::span<const double> q);

/// The 3x3 cyclic family: rho_1, rho_2 projectors on the shift-0 and shift-1
/// maximally entangled vectors, rho_3 = (1/3)(|02><02| + |10><10| + |21><21|).
std::vector<DensityOperator> cyclic_components();

/// q1 rho_1 + q2 rho_2 + q3 rho_3 as an explicit pure-state mixture.
std::vector<MixtureTerm> cyclic_terms(double q1, double q2, double q3);
DensityOperator cyclic_state(double q1, double q2, double q3);

enum class Condition { holds, violated, boundary };

/// PPT condition of the cyclic family: q1 q2 q3 >= q1^3 + q2^3, with
/// equality within tol reported as boundary.
Condition cyclic_ppt_condition(double q1, double q2, double q3, double tol = 1e-9);

/// p1 |w1><w1| + p2 |w2><w2| + p3 |w3><w3| with w_k the inverse-linear
/// weighted shift by k - 1.
SequenceMixture inverse_linear_mixture(std::array<double, 3> p);

}  // namespace entwit::reference
