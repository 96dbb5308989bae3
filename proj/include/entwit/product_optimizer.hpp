#pragma once

// Maximisation of <alpha (x) beta| T |alpha (x) beta> over unit product vectors.
//
// Every separable expectation sup Tr(T sigma) reduces to this search: the
// expectation is linear in sigma and the separable set is the convex hull of
// pure product states, so the supremum is attained on one of them.

#include <cstdint>
#include <vector>

#include "entwit/bipartite.hpp"

namespace entwit {

struct OptimizerConfig {
  int restarts = 64;
  int max_iters = 500;
  /// A restart stops once a full alpha/beta sweep improves by less than this.
  double convergence_tol = 1e-12;
  std::uint64_t seed = 0;
  double hermitian_tol = kInputTol;
  /// Keep the objective after every half-step (for diagnostics and tests).
  bool record_trace = false;

  void validate() const;
};

struct RestartSummary {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  CVector alpha;
  CVector beta;
  std::vector<double> trace;
};

struct ProductMaxResult {
  double value = 0.0;
  CVector alpha;
  CVector beta;
  int restarts_used = 0;
  int best_restart = 0;
  std::vector<RestartSummary> restarts;

  bool all_converged() const;
};

/// <alpha (x) beta| T |alpha (x) beta>, real part.
double product_expectation(const CMatrix& T, const Dims& dims, const CVector& alpha, const CVector& beta);

/// M(i,k) = <i (x) beta| T |k (x) beta>.
CMatrix contract_second(const CMatrix& T, const Dims& dims, const CVector& beta);
/// M(j,l) = <alpha (x) j| T |alpha (x) l>.
CMatrix contract_first(const CMatrix& T, const Dims& dims, const CVector& alpha);

/// Top eigenvector of a Hermitian matrix with a deterministic choice inside a
/// degenerate top eigenspace: the candidate whose absolute components are
/// lexicographically largest, phase-fixed so its first nonzero entry is real positive.
CVector top_eigenvector(const CMatrix& m, double* eigenvalue = nullptr);

/// Alternating top-eigenvector (see-saw) iteration with seeded multi-start.
/// Restart r draws its start from seed_seq{seed, r}, so the result does not
/// depend on the order restarts run in; ties keep the lowest restart index.
ProductMaxResult seesaw_max(const CMatrix& T, const Dims& dims, const OptimizerConfig& cfg = {});

/// Exhaustive maximum over real unit vectors on angular grids (dims <= 3 each,
/// real-symmetric T). Independent check on seesaw_max for small instances.
double grid_oracle_max(const RMatrix& T, const Dims& dims, int resolution);

}  // namespace entwit
