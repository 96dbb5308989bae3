#include "entwit/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/trigamma.hpp>

#include "entwit/error.hpp"

namespace entwit {

namespace {

// Largest product dimension we are willing to densify.
constexpr std::int64_t kMaxDenseDim = 1 << 22;

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void check_weights(std::span<const double> weights, double tol) {
  double sum = 0.0;
  for (double w : weights) {
    if (w < -tol) throw ValidationError("negative mixture weight " + format_number(w));
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw ValidationError("weights sum " + format_number(sum) + " ≠ 1");
  }
}

}  // namespace

void require_same_dims(const Dims& expected, const Dims& actual) {
  if (expected.a != actual.a) throw DimensionMismatch("dim_a", expected.a, actual.a);
  if (expected.b != actual.b) throw DimensionMismatch("dim_b", expected.b, actual.b);
}

BipartiteVector::BipartiteVector(CMatrix coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() < 1 || coeffs_.cols() < 1) {
    throw ValidationError("bipartite vector needs positive local dimensions");
  }
}

BipartiteVector BipartiteVector::from_flat(const Dims& dims, const CVector& flat) {
  if (flat.size() != dims.total()) throw DimensionMismatch("product", dims.total(), flat.size());
  CMatrix d(dims.a, dims.b);
  for (int i = 0; i < dims.a; ++i)
    for (int j = 0; j < dims.b; ++j) d(i, j) = flat(dims.index(i, j));
  return BipartiteVector(std::move(d));
}

BipartiteVector BipartiteVector::basis(const Dims& dims, int i, int j) {
  CMatrix d = CMatrix::Zero(dims.a, dims.b);
  d(i, j) = 1.0;
  return BipartiteVector(std::move(d));
}

BipartiteVector BipartiteVector::product(const CVector& alpha, const CVector& beta) {
  return BipartiteVector(alpha * beta.transpose());
}

CVector BipartiteVector::flatten() const {
  const Dims d = dims();
  CVector flat(d.total());
  for (int i = 0; i < d.a; ++i)
    for (int j = 0; j < d.b; ++j) flat(d.index(i, j)) = coeffs_(i, j);
  return flat;
}

BipartiteVector BipartiteVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw ValidationError("cannot normalise the zero vector");
  return BipartiteVector(coeffs_ / n);
}

BipartiteVector BipartiteVector::embedded(const Dims& larger) const {
  const Dims d = dims();
  if (larger.a < d.a) throw DimensionMismatch("dim_a", d.a, larger.a);
  if (larger.b < d.b) throw DimensionMismatch("dim_b", d.b, larger.b);
  CMatrix big = CMatrix::Zero(larger.a, larger.b);
  big.topLeftCorner(d.a, d.b) = coeffs_;
  return BipartiteVector(std::move(big));
}

Complex product_overlap(const BipartiteVector& omega, const CVector& alpha, const CVector& beta) {
  const Dims d = omega.dims();
  if (alpha.size() != d.a) throw DimensionMismatch("dim_a", d.a, alpha.size());
  if (beta.size() != d.b) throw DimensionMismatch("dim_b", d.b, beta.size());
  return alpha.dot(omega.coeffs() * beta.conjugate());
}

double coefficient_operator_norm(const BipartiteVector& omega) {
  Eigen::JacobiSVD<CMatrix> svd(omega.coeffs());
  return svd.singularValues()(0);
}

DensityOperator DensityOperator::validated(const Dims& dims, CMatrix matrix, double tol) {
  if (matrix.rows() != dims.total()) throw DimensionMismatch("rows", dims.total(), matrix.rows());
  if (matrix.cols() != dims.total()) throw DimensionMismatch("cols", dims.total(), matrix.cols());
  const double asym = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol) throw ValidationError("density operator not Hermitian (deviation " + format_number(asym) + ")");
  const double tr = matrix.trace().real();
  if (std::abs(tr - 1.0) > tol) throw ValidationError("density operator trace " + format_number(tr) + " ≠ 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(matrix, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  if (lo < -tol) throw ValidationError("density operator not positive (min eigenvalue " + format_number(lo) + ")");
  return DensityOperator(dims, std::move(matrix), std::nullopt);
}

DensityOperator DensityOperator::from_mixture(std::span<const MixtureTerm> terms, double tol) {
  if (terms.empty()) throw ValidationError("mixture has no terms");
  const Dims dims = terms.front().vector.dims();
  std::vector<double> weights;
  CMatrix rho = CMatrix::Zero(dims.total(), dims.total());
  for (const auto& t : terms) {
    require_same_dims(dims, t.vector.dims());
    const double n2 = t.vector.coeffs().squaredNorm();
    if (std::abs(n2 - 1.0) > tol) throw ValidationError("mixture vector norm^2 " + format_number(n2) + " ≠ 1");
    weights.push_back(t.weight);
    const CVector v = t.vector.flatten();
    rho += t.weight * (v * v.adjoint());
  }
  check_weights(weights, tol);
  DensityOperator out = validated(dims, std::move(rho), tol);
  out.decomposition_ = std::vector<MixtureTerm>(terms.begin(), terms.end());
  return out;
}

DensityOperator DensityOperator::pure(const BipartiteVector& omega) {
  const MixtureTerm term{1.0, omega};
  return from_mixture(std::span<const MixtureTerm>(&term, 1));
}

std::vector<MixtureTerm> DensityOperator::pure_decomposition(double tol) const {
  if (decomposition_) return *decomposition_;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(matrix_);
  std::vector<MixtureTerm> out;
  for (Eigen::Index k = eig.eigenvalues().size() - 1; k >= 0; --k) {
    const double p = eig.eigenvalues()(k);
    if (p < -tol) throw ValidationError("negative eigenvalue " + format_number(p) + " in density operator");
    if (p <= tol) continue;
    out.push_back({p, BipartiteVector::from_flat(dims_, eig.eigenvectors().col(k))});
  }
  return out;
}

DensityOperator assemble_mixture(std::span<const MixtureTerm> terms, double tol) {
  return DensityOperator::from_mixture(terms, tol);
}

void TruncationSpec::validate() const {
  if (rows < 1 || cols < 1) throw ValidationError("truncation must keep at least one row and one column");
}

DensityOperator truncate_normalize(const DensityOperator& rho, const TruncationSpec& spec, double tol) {
  spec.validate();
  const Dims from = rho.dims();
  if (spec.rows > from.a) throw DimensionMismatch("dim_a", from.a, spec.rows);
  if (spec.cols > from.b) throw DimensionMismatch("dim_b", from.b, spec.cols);
  const Dims to{static_cast<int>(spec.rows), static_cast<int>(spec.cols)};

  if (const auto& terms = rho.decomposition()) {
    std::vector<MixtureTerm> kept;
    double trace = 0.0;
    for (const auto& t : *terms) {
      BipartiteVector p(t.vector.coeffs().topLeftCorner(to.a, to.b));
      const double n2 = p.coeffs().squaredNorm();
      trace += t.weight * n2;
      if (t.weight * n2 > 0.0) kept.push_back({t.weight * n2, p.normalized()});
    }
    if (trace <= tol) throw TruncationError();
    for (auto& t : kept) t.weight /= trace;
    return DensityOperator::from_mixture(kept, tol);
  }

  std::vector<int> idx;
  for (int i = 0; i < to.a; ++i)
    for (int j = 0; j < to.b; ++j) idx.push_back(from.index(i, j));
  CMatrix c(to.total(), to.total());
  for (int r = 0; r < to.total(); ++r)
    for (int s = 0; s < to.total(); ++s) c(r, s) = rho.matrix()(idx[r], idx[s]);
  const double trace = c.trace().real();
  if (trace <= tol) throw TruncationError();
  return DensityOperator::validated(to, c / trace, tol);
}

SequenceVector::SequenceVector(WeightFamily family, double ratio, int shift)
    : family_(family), ratio_(ratio), shift_(shift) {
  if (shift < 0) throw ValidationError("row shift must be nonnegative");
  if (family == WeightFamily::inverse_linear) {
    normalizer_ = std::sqrt(6.0) / std::numbers::pi;
  } else {
    if (!(std::abs(ratio) < 1.0)) throw ValidationError("geometric ratio must satisfy |r| < 1");
    normalizer_ = std::sqrt(1.0 - ratio * ratio);
  }
}

SequenceVector SequenceVector::inverse_linear(int shift) {
  return SequenceVector(WeightFamily::inverse_linear, 0.0, shift);
}

SequenceVector SequenceVector::geometric(double ratio, int shift) {
  return SequenceVector(WeightFamily::geometric, ratio, shift);
}

double SequenceVector::raw_weight(std::int64_t i) const {
  if (family_ == WeightFamily::inverse_linear) return 1.0 / static_cast<double>(i + 1);
  return std::pow(ratio_, static_cast<double>(i));
}

double SequenceVector::tail_sq_norm(std::int64_t count) const {
  if (count <= 0) return 1.0;
  if (family_ == WeightFamily::inverse_linear) {
    // sum_{m > count} 1/m^2 = trigamma(count + 1)
    return 6.0 / (std::numbers::pi * std::numbers::pi) *
           boost::math::trigamma(static_cast<double>(count) + 1.0);
  }
  return std::pow(ratio_ * ratio_, static_cast<double>(count));
}

double SequenceVector::partial_sq_norm(std::int64_t count) const {
  if (count <= 0) return 0.0;
  if (count <= 4096) {
    double s = 0.0;
    for (std::int64_t i = count - 1; i >= 0; --i) s += weight(i) * weight(i);
    return s;
  }
  return 1.0 - tail_sq_norm(count);
}

std::int64_t SequenceVector::terms_for_tail(double tail) const {
  if (tail >= 1.0) return 0;
  std::int64_t lo = 0;
  std::int64_t hi = 1;
  while (tail_sq_norm(hi) >= tail) {
    lo = hi;
    hi *= 2;
    if (hi > (std::int64_t{1} << 62)) throw ValidationError("tail bound unreachable");
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (tail_sq_norm(mid) < tail) hi = mid; else lo = mid;
  }
  return hi;
}

std::int64_t SequenceVector::terms_kept(const TruncationSpec& spec) const {
  return std::max<std::int64_t>(0, std::min(spec.cols, spec.rows - shift_));
}

BipartiteVector SequenceVector::truncated(const TruncationSpec& spec) const {
  spec.validate();
  if (spec.rows * spec.cols > kMaxDenseDim) {
    throw ValidationError("truncation " + std::to_string(spec.rows) + "x" + std::to_string(spec.cols) +
                          " too large for a dense representation");
  }
  CMatrix d = CMatrix::Zero(spec.rows, spec.cols);
  const std::int64_t kept = terms_kept(spec);
  for (std::int64_t i = 0; i < kept; ++i) d(i + shift_, i) = weight(i);
  return BipartiteVector(std::move(d));
}

double shift_family_norm(const SequenceVector& v) {
  // Both families are nonincreasing in |c_i|, so the supremum sits at i = 0.
  return std::abs(v.weight(0));
}

double shift_family_sq_norm(const SequenceVector& v) {
  // Evaluated from the closed form so that 6/pi^2 comes out exactly.
  if (v.family() == WeightFamily::inverse_linear) return 6.0 / (std::numbers::pi * std::numbers::pi);
  return 1.0 - v.ratio() * v.ratio();
}

double sequence_overlap(const SequenceVector& a, const SequenceVector& b,
                        const std::optional<TruncationSpec>& spec) {
  if (a.shift() != b.shift()) return 0.0;
  const std::int64_t unbounded = std::numeric_limits<std::int64_t>::max();
  const std::int64_t m = spec ? std::min(a.terms_kept(*spec), b.terms_kept(*spec)) : unbounded;
  if (a.same_family(b)) return m == unbounded ? 1.0 : a.partial_sq_norm(m);
  // Mixed families: at least one side is geometric, so the series converges fast.
  double s = 0.0;
  for (std::int64_t i = 0; i < m; ++i) {
    const double term = a.weight(i) * b.weight(i);
    s += term;
    if (std::abs(term) < 1e-20 && i > 16) break;
  }
  return s;
}

SequenceMixture SequenceMixture::validated(std::vector<SequenceTerm> terms, double tol) {
  if (terms.empty()) throw ValidationError("mixture has no terms");
  std::vector<double> weights;
  for (const auto& t : terms) weights.push_back(t.weight);
  check_weights(weights, tol);
  return SequenceMixture(std::move(terms));
}

int SequenceMixture::max_shift() const {
  int s = 0;
  for (const auto& t : terms_) s = std::max(s, t.vector.shift());
  return s;
}

TruncationSpec SequenceMixture::tail_rule_spec(double tail) const {
  std::int64_t n = 1;
  for (const auto& t : terms_) n = std::max(n, t.vector.terms_for_tail(tail));
  return {n + max_shift(), n};
}

double SequenceMixture::compressed_trace(const TruncationSpec& spec) const {
  double tr = 0.0;
  for (const auto& t : terms_) tr += t.weight * t.vector.partial_sq_norm(t.vector.terms_kept(spec));
  return tr;
}

DensityOperator truncate_normalize(const SequenceMixture& rho, const TruncationSpec& spec, double tol) {
  spec.validate();
  const double trace = rho.compressed_trace(spec);
  if (trace <= tol) throw TruncationError();
  std::vector<MixtureTerm> kept;
  for (const auto& t : rho.terms()) {
    const BipartiteVector p = t.vector.truncated(spec);
    const double n2 = p.coeffs().squaredNorm();
    if (t.weight * n2 > 0.0) kept.push_back({t.weight * n2 / trace, p.normalized()});
  }
  return DensityOperator::from_mixture(kept, tol);
}

}  // namespace entwit
