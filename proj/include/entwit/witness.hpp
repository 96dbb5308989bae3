#pragma once

// Finite-rank entanglement witnesses W = alpha I + sum_k lambda_k |w_k><w_k|.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entwit/bipartite.hpp"
#include "entwit/criteria.hpp"
#include "entwit/product_optimizer.hpp"

namespace entwit {

/// Default tolerance on the separable infimum for a certificate.
inline constexpr double kCertTol = 1e-4;

struct WitnessTerm {
  double lambda = 0.0;
  BipartiteVector omega;
};

/// Numerical certificate: inf over product states of <ab|W|ab>. A see-saw
/// infimum is an upper bound on the true infimum, not a proof.
struct Certification {
  double infimum = 0.0;
  std::string method = "seesaw";
  int restarts = 0;
  double tolerance = kCertTol;
  std::uint64_t seed = 0;
  bool certified = false;
};

class FiniteRankWitness {
 public:
  /// Terms must share `dims` and be orthonormal within `tol`.
  FiniteRankWitness(Dims dims, double alpha, std::vector<WitnessTerm> terms, double tol = kInputTol);

  const Dims& dims() const { return dims_; }
  double alpha() const { return alpha_; }
  const std::vector<WitnessTerm>& terms() const { return terms_; }
  const std::optional<Certification>& certification() const { return certification_; }

  FiniteRankWitness with_certification(Certification c) const;

  /// R = sum_k lambda_k |w_k><w_k|.
  CMatrix finite_rank_part() const;
  CMatrix dense() const;

  /// Decided from the spectrum of R on its range: the eigenvalues of W are
  /// alpha + lambda_k, plus alpha itself when the w_k do not span.
  bool is_non_positive(double tol = kReportTol) const;
  bool range_is_proper() const { return static_cast<int>(terms_.size()) < dims_.total(); }

  /// alpha >= 0 and W not positive.
  bool has_witness_form(double tol = kReportTol) const;

  /// Same operator on a larger space, identity part extended, R padded with zeros.
  FiniteRankWitness embedded(const Dims& larger) const;

 private:
  Dims dims_;
  double alpha_;
  std::vector<WitnessTerm> terms_;
  std::optional<Certification> certification_;
};

/// c_T = sum_k |lambda_k| ||D_k||^2, an upper bound on |Tr(T sigma)| over separable sigma.
double c_bound(std::span<const WitnessTerm> terms);

struct ConstructedWitness {
  FiniteRankWitness witness;
  bool is_witness = false;
};

/// Orthonormal pure decomposition: the stored mixture when its vectors are
/// orthonormal, otherwise the eigendecomposition.
std::vector<MixtureTerm> orthonormal_decomposition(const DensityOperator& rho, double tol = kInputTol);

/// W = c_{rho1} I - rho1 for rho1 = sum_k a_k |w_k><w_k| with orthonormal w_k.
/// A positive W is returned with is_witness = false.
ConstructedWitness special_witness(std::span<const MixtureTerm> rho1, double tol = kReportTol);
ConstructedWitness special_witness(const DensityOperator& rho1, double tol = kReportTol);

/// Whether W = c_{rho1} I - rho1 detects p rho1 + (1-p) rho2:
/// c_{rho1} < p ||rho1||_2^2 + (1-p) Tr(rho1 rho2).
bool special_witness_detects(const DensityOperator& rho1, const DensityOperator& rho2, double p,
                             double tol = kReportTol);

struct CorollaryResult {
  FiniteRankWitness witness;
  /// Tr(W rho) = ||D_k0||^2 - p_k0.
  double margin = 0.0;
  Verdict verdict = Verdict::not_detected;
};

/// W = ||D_k0||^2 I - |w_k0><w_k0| for an orthonormal mixture; k0 is 0-based.
CorollaryResult corollary_witness(std::span<const MixtureTerm> rho, std::size_t k0, double tol = kReportTol);

/// alpha Tr(rho) + sum_k lambda_k <w_k|rho|w_k>.
double evaluate(const FiniteRankWitness& w, const DensityOperator& rho);

CriterionReport witness_report(const FiniteRankWitness& w, const DensityOperator& rho, double tol = kReportTol);

/// Runs seesaw_max on -R and records alpha - max as the separable infimum.
Certification certify(const FiniteRankWitness& w, const OptimizerConfig& cfg = {}, double tol = kCertTol);

// Witnesses whose vectors are infinite weighted shifts.

struct SequenceWitnessTerm {
  double lambda = 0.0;
  SequenceVector omega;
};

class SequenceWitness {
 public:
  SequenceWitness(double alpha, std::vector<SequenceWitnessTerm> terms, double tol = kInputTol);

  double alpha() const { return alpha_; }
  const std::vector<SequenceWitnessTerm>& terms() const { return terms_; }
  int max_shift() const;

  bool is_non_positive(double tol = kReportTol) const;

  /// Compression P W P restricted to the truncated space.
  FiniteRankWitness truncated(const TruncationSpec& spec) const;

 private:
  double alpha_;
  std::vector<SequenceWitnessTerm> terms_;
};

double c_bound(std::span<const SequenceWitnessTerm> terms);

struct ConstructedSequenceWitness {
  SequenceWitness witness;
  bool is_witness = false;
};

ConstructedSequenceWitness special_witness(const SequenceMixture& rho1, double tol = kReportTol);

struct SequenceCorollaryResult {
  SequenceWitness witness;
  double margin = 0.0;
  Verdict verdict = Verdict::not_detected;
};

SequenceCorollaryResult corollary_witness(const SequenceMixture& rho, std::size_t k0, double tol = kReportTol);

/// Tr(W rho_spec) with rho_spec = truncate_normalize(rho, spec), evaluated
/// in closed form from the shifted-diagonal structure. No spec means the
/// untruncated value.
double evaluate(const SequenceWitness& w, const SequenceMixture& rho,
                const std::optional<TruncationSpec>& spec = std::nullopt);

}  // namespace entwit
