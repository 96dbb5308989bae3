#pragma once

// Separating-hyperplane witness search.
//
// A feature map L(T) = (Tr(rho_1 T), ..., Tr(rho_n T)) sends states to R^n.
// A functional f with f.L(rho) > 1 >= f.L(sigma) for every separable sigma
// gives the witness W = I - sum_i f_i rho_i. The search finds f by a
// cutting-plane loop: an LP over the feature vectors collected so far,
// then the product optimizer as separation oracle for the LP's f.

#include <optional>
#include <string>
#include <vector>

#include "entwit/bipartite.hpp"
#include "entwit/product_optimizer.hpp"
#include "entwit/witness.hpp"

namespace entwit {

class FeatureMap {
 public:
  /// Components must share dims and satisfy rho_i rho_j = 0 (i != j) within tol.
  explicit FeatureMap(std::vector<DensityOperator> components, double tol = kInputTol);

  const std::vector<DensityOperator>& components() const { return components_; }
  const Dims& dims() const { return dims_; }
  int size() const { return static_cast<int>(components_.size()); }

  /// T_f = sum_i f_i rho_i.
  CMatrix combination(const RVector& f) const;

  /// Projector onto the span of the components' ranges.
  CMatrix support_projector(double tol = kInputTol) const;

 private:
  std::vector<DensityOperator> components_;
  Dims dims_;
};

RVector feature_vector(const FeatureMap& map, const DensityOperator& rho);
/// Feature vector of the pure product state |alpha beta>.
RVector feature_vector(const FeatureMap& map, const CVector& alpha, const CVector& beta);

/// W = I - sum_i f_i rho_i as a finite-rank witness.
FiniteRankWitness plane_witness(const FeatureMap& map, const RVector& f);

struct SearchConfig {
  OptimizerConfig oracle;
  int max_rounds = 200;
  /// Oracle values above 1 + cut_tol add a cut.
  double cut_tol = 1e-6;
  /// Tolerance on the final certified separable maximum.
  double cert_tol = kCertTol;
  /// |f_i| <= box in the LP.
  double box = 100.0;
  int initial_samples = 200;
  /// f.L(rho) must exceed 1 by more than this.
  double violation_tol = 1e-9;
};

struct SearchRound {
  int round = 0;
  double lp_value = 0.0;
  double oracle_max = 0.0;
  int cuts_added = 0;
  RVector f;
};

struct SeparatingResult {
  RVector coefficients;
  /// Certified separable maximum of f.L(sigma) after rescaling (target 1).
  double separable_max = 0.0;
  /// f.L(rho) - 1.
  double violation = 0.0;
  /// Tr(W rho).
  double witness_value = 0.0;
  /// Tr(Pi rho) for Pi the projector onto the components' span.
  double component_mass = 0.0;
  /// Both sides of (1 - mass) / mass < -Tr(W' rho'), with rho' the compression to the span.
  double remainder_ratio = 0.0;
  double reduced_witness_value = 0.0;
  int cuts = 0;
  FiniteRankWitness witness;
  Certification certification;
};

struct SearchOutcome {
  std::optional<SeparatingResult> result;
  std::string failure;
  std::vector<SearchRound> trace;
  std::vector<std::string> notes;
  double box = 0.0;

  bool success() const { return result.has_value(); }
};

SearchOutcome search(const FeatureMap& map, const DensityOperator& rho, const SearchConfig& cfg = {});

struct PlaneCheck {
  double separable_max = 0.0;
  bool tangent = false;
  CVector alpha;
  CVector beta;
};

/// Separable maximum of f.L(sigma) via the product optimizer; tangent when it is 1 within tol.
PlaneCheck check_plane(const FeatureMap& map, const RVector& f, const OptimizerConfig& cfg = {},
                       double tol = kCertTol);

}  // namespace entwit
