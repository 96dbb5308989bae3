#pragma once

// Bipartite vectors, density operators and local truncation on H (x) K.
//
// Product basis convention: |ij> has flat index i * dim_b + j (row-major), so a
// vector's amplitudes reshape directly into its dim_a x dim_b coefficient
// matrix D with |w> = sum_ij d_ij |ij>.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace entwit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Default tolerance for validating Hermiticity, trace and positivity of inputs.
inline constexpr double kInputTol = 1e-9;

struct Dims {
  int a = 1;
  int b = 1;

  int total() const { return a * b; }
  int index(int i, int j) const { return i * b + j; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Throws DimensionMismatch naming the first axis on which the two disagree.
void require_same_dims(const Dims& expected, const Dims& actual);

class BipartiteVector {
 public:
  /// Takes the coefficient matrix directly; rows index the first factor.
  explicit BipartiteVector(CMatrix coeffs);

  /// Reshapes a flat product-basis vector of length dims.total().
  static BipartiteVector from_flat(const Dims& dims, const CVector& flat);
  static BipartiteVector basis(const Dims& dims, int i, int j);
  static BipartiteVector product(const CVector& alpha, const CVector& beta);

  Dims dims() const { return {static_cast<int>(coeffs_.rows()), static_cast<int>(coeffs_.cols())}; }
  const CMatrix& coeffs() const { return coeffs_; }
  CVector flatten() const;

  double norm() const { return coeffs_.norm(); }
  BipartiteVector normalized() const;

  /// Same amplitudes placed in the leading block of a larger space.
  BipartiteVector embedded(const Dims& larger) const;

 private:
  CMatrix coeffs_;
};

/// <alpha (x) beta | w> = <alpha| D |conj(beta)>, conjugation entrywise in the fixed basis.
Complex product_overlap(const BipartiteVector& omega, const CVector& alpha, const CVector& beta);

/// Largest singular value of the coefficient matrix.
double coefficient_operator_norm(const BipartiteVector& omega);

struct MixtureTerm {
  double weight = 0.0;
  BipartiteVector vector;
};

class DensityOperator {
 public:
  /// Validates Hermiticity, unit trace and positivity within `tol`.
  static DensityOperator validated(const Dims& dims, CMatrix matrix, double tol = kInputTol);

  /// Builds sum_i p_i |w_i><w_i| and keeps the decomposition for realignment.
  static DensityOperator from_mixture(std::span<const MixtureTerm> terms, double tol = kInputTol);

  static DensityOperator pure(const BipartiteVector& omega);

  const Dims& dims() const { return dims_; }
  const CMatrix& matrix() const { return matrix_; }

  /// Pure-state decomposition the operator was assembled from, when known.
  const std::optional<std::vector<MixtureTerm>>& decomposition() const { return decomposition_; }

  /// Pure-state decomposition: the stored one, or an eigendecomposition.
  /// Eigenvalues below -tol abort with ValidationError; those in [-tol, tol] are dropped.
  std::vector<MixtureTerm> pure_decomposition(double tol = kInputTol) const;

  double trace() const { return matrix_.trace().real(); }

 private:
  DensityOperator(Dims dims, CMatrix matrix, std::optional<std::vector<MixtureTerm>> decomposition)
      : dims_(dims), matrix_(std::move(matrix)), decomposition_(std::move(decomposition)) {}

  Dims dims_;
  CMatrix matrix_;
  std::optional<std::vector<MixtureTerm>> decomposition_;
};

/// Alias kept for the mixture assembly operation.
DensityOperator assemble_mixture(std::span<const MixtureTerm> terms, double tol = kInputTol);

/// Leading rows x cols block of the two local factors: P_k (x) Q_l.
struct TruncationSpec {
  std::int64_t rows = 1;
  std::int64_t cols = 1;

  void validate() const;
};

/// Compression P rho P onto the leading rows x cols product subspace, renormalised.
DensityOperator truncate_normalize(const DensityOperator& rho, const TruncationSpec& spec,
                                   double tol = kInputTol);

enum class WeightFamily { inverse_linear, geometric };

/// Infinite weighted shift sum_i c_i |(i+s) i>, unit norm.
/// inverse_linear: c_i = 1/(i+1); geometric: c_i = r^i with |r| < 1.
class SequenceVector {
 public:
  static SequenceVector inverse_linear(int shift);
  static SequenceVector geometric(double ratio, int shift);

  WeightFamily family() const { return family_; }
  double ratio() const { return ratio_; }
  int shift() const { return shift_; }

  /// Scalar making sum_i (normalizer * c_i)^2 = 1.
  double normalizer() const { return normalizer_; }
  double raw_weight(std::int64_t i) const;
  double weight(std::int64_t i) const { return normalizer_ * raw_weight(i); }

  /// sum_{i >= count} weight(i)^2, closed form.
  double tail_sq_norm(std::int64_t count) const;
  double partial_sq_norm(std::int64_t count) const;

  /// Smallest count with tail_sq_norm(count) < tail.
  std::int64_t terms_for_tail(double tail) const;

  /// Number of weights whose basis vector |(i+s) i> lies inside the truncation.
  std::int64_t terms_kept(const TruncationSpec& spec) const;

  /// P w without renormalisation, as a dense rows x cols coefficient matrix.
  BipartiteVector truncated(const TruncationSpec& spec) const;

  bool same_family(const SequenceVector& other) const {
    return family_ == other.family_ && ratio_ == other.ratio_;
  }

 private:
  SequenceVector(WeightFamily family, double ratio, int shift);

  WeightFamily family_;
  double ratio_;
  int shift_;
  double normalizer_;
};

/// Exact operator norm of the shifted-diagonal coefficient operator: sup_i |weight(i)|.
double shift_family_norm(const SequenceVector& v);
/// Its square, from the closed form rather than by squaring the norm.
double shift_family_sq_norm(const SequenceVector& v);

/// <P a | P b> for both vectors compressed by `spec` (or untruncated when empty).
double sequence_overlap(const SequenceVector& a, const SequenceVector& b,
                        const std::optional<TruncationSpec>& spec = std::nullopt);

struct SequenceTerm {
  double weight = 0.0;
  SequenceVector vector;
};

/// sum_k p_k |w_k><w_k| over weighted-shift vectors.
class SequenceMixture {
 public:
  static SequenceMixture validated(std::vector<SequenceTerm> terms, double tol = kInputTol);

  const std::vector<SequenceTerm>& terms() const { return terms_; }
  int max_shift() const;

  /// Truncation (N + max_shift, N) with N the smallest count giving each term a
  /// discarded tail below `tail`.
  TruncationSpec tail_rule_spec(double tail = 1e-10) const;

  /// Tr(P rho P), structured (no dense matrices).
  double compressed_trace(const TruncationSpec& spec) const;

 private:
  explicit SequenceMixture(std::vector<SequenceTerm> terms) : terms_(std::move(terms)) {}
  std::vector<SequenceTerm> terms_;
};

DensityOperator truncate_normalize(const SequenceMixture& rho, const TruncationSpec& spec,
                                   double tol = kInputTol);

}  // namespace entwit
