#include "entwit/witness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "entwit/error.hpp"

namespace entwit {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

bool vectors_orthonormal(std::span<const MixtureTerm> terms, double tol) {
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i; j < terms.size(); ++j) {
      const Complex g = (terms[i].vector.coeffs().conjugate().cwiseProduct(terms[j].vector.coeffs())).sum();
      const double want = i == j ? 1.0 : 0.0;
      if (std::abs(g - want) > tol) return false;
    }
  return true;
}

double squared(double x) { return x * x; }

}  // namespace

FiniteRankWitness::FiniteRankWitness(Dims dims, double alpha, std::vector<WitnessTerm> terms, double tol)
    : dims_(dims), alpha_(alpha), terms_(std::move(terms)) {
  if (dims_.a < 1 || dims_.b < 1) throw ValidationError("witness needs positive local dimensions");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    require_same_dims(dims_, terms_[i].omega.dims());
    for (std::size_t j = i; j < terms_.size(); ++j) {
      const Complex g =
          (terms_[i].omega.coeffs().conjugate().cwiseProduct(terms_[j].omega.coeffs())).sum();
      const double want = i == j ? 1.0 : 0.0;
      if (std::abs(g - want) > tol) {
        throw ValidationError("witness vectors " + std::to_string(i) + " and " + std::to_string(j) +
                              " are not orthonormal (overlap " + num(std::abs(g)) + ")");
      }
    }
  }
}

FiniteRankWitness FiniteRankWitness::with_certification(Certification c) const {
  FiniteRankWitness out = *this;
  out.certification_ = std::move(c);
  return out;
}

CMatrix FiniteRankWitness::finite_rank_part() const {
  CMatrix r = CMatrix::Zero(dims_.total(), dims_.total());
  for (const auto& t : terms_) {
    const CVector v = t.omega.flatten();
    r += t.lambda * (v * v.adjoint());
  }
  return r;
}

CMatrix FiniteRankWitness::dense() const {
  CMatrix w = finite_rank_part();
  w.diagonal().array() += alpha_;
  return w;
}

bool FiniteRankWitness::is_non_positive(double tol) const {
  double lowest = range_is_proper() || terms_.empty() ? alpha_ : std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) lowest = std::min(lowest, alpha_ + t.lambda);
  return lowest < -tol;
}

bool FiniteRankWitness::has_witness_form(double tol) const { return alpha_ >= -tol && is_non_positive(tol); }

FiniteRankWitness FiniteRankWitness::embedded(const Dims& larger) const {
  std::vector<WitnessTerm> big;
  for (const auto& t : terms_) big.push_back({t.lambda, t.omega.embedded(larger)});
  return FiniteRankWitness(larger, alpha_, std::move(big));
}

double c_bound(std::span<const WitnessTerm> terms) {
  double c = 0.0;
  for (const auto& t : terms) c += std::abs(t.lambda) * squared(coefficient_operator_norm(t.omega));
  return c;
}

std::vector<MixtureTerm> orthonormal_decomposition(const DensityOperator& rho, double tol) {
  if (const auto& d = rho.decomposition(); d && vectors_orthonormal(*d, tol)) return *d;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho.matrix());
  std::vector<MixtureTerm> out;
  for (Eigen::Index k = eig.eigenvalues().size() - 1; k >= 0; --k) {
    const double p = eig.eigenvalues()(k);
    if (p <= tol) continue;
    out.push_back({p, BipartiteVector::from_flat(rho.dims(), eig.eigenvectors().col(k))});
  }
  return out;
}

ConstructedWitness special_witness(std::span<const MixtureTerm> rho1, double tol) {
  if (rho1.empty()) throw ValidationError("special witness needs a nonempty decomposition");
  std::vector<WitnessTerm> terms;
  for (const auto& t : rho1) terms.push_back({-t.weight, t.vector});
  std::vector<WitnessTerm> weighted;
  for (const auto& t : rho1) weighted.push_back({t.weight, t.vector});
  const double c = c_bound(weighted);
  FiniteRankWitness w(rho1.front().vector.dims(), c, std::move(terms));
  const bool ok = w.has_witness_form(tol);
  return {std::move(w), ok};
}

ConstructedWitness special_witness(const DensityOperator& rho1, double tol) {
  const auto terms = orthonormal_decomposition(rho1);
  return special_witness(terms, tol);
}

bool special_witness_detects(const DensityOperator& rho1, const DensityOperator& rho2, double p, double tol) {
  require_same_dims(rho1.dims(), rho2.dims());
  const auto terms = orthonormal_decomposition(rho1);
  std::vector<WitnessTerm> weighted;
  for (const auto& t : terms) weighted.push_back({t.weight, t.vector});
  const double c = c_bound(weighted);
  const double purity = (rho1.matrix() * rho1.matrix()).trace().real();
  const double cross = (rho1.matrix() * rho2.matrix()).trace().real();
  return c < p * purity + (1.0 - p) * cross - tol;
}

CorollaryResult corollary_witness(std::span<const MixtureTerm> rho, std::size_t k0, double tol) {
  if (k0 >= rho.size()) {
    throw ValidationError("k0 index " + std::to_string(k0) + " out of range for " + std::to_string(rho.size()) +
                          " terms");
  }
  if (!vectors_orthonormal(rho, kInputTol)) throw ValidationError("corollary witness needs an orthonormal mixture");
  const auto& term = rho[k0];
  const double norm2 = squared(coefficient_operator_norm(term.vector));
  FiniteRankWitness w(term.vector.dims(), norm2, {{-1.0, term.vector}});
  const double margin = norm2 - term.weight;
  return {std::move(w), margin, verdict_below(margin, tol)};
}

double evaluate(const FiniteRankWitness& w, const DensityOperator& rho) {
  require_same_dims(w.dims(), rho.dims());
  double v = w.alpha() * rho.trace();
  for (const auto& t : w.terms()) {
    const CVector x = t.omega.flatten();
    v += t.lambda * x.dot(rho.matrix() * x).real();
  }
  return v;
}

CriterionReport witness_report(const FiniteRankWitness& w, const DensityOperator& rho, double tol) {
  CriterionReport r;
  r.criterion = "witness";
  r.margin = evaluate(w, rho);
  r.tolerance = tol;
  r.verdict = verdict_below(r.margin, tol);
  r.dims = rho.dims();
  r.metadata = {{"dim_a", std::to_string(rho.dims().a)},
                {"dim_b", std::to_string(rho.dims().b)},
                {"tolerance", num(tol)},
                {"alpha", num(w.alpha())},
                {"rank", std::to_string(w.terms().size())}};
  return r;
}

Certification certify(const FiniteRankWitness& w, const OptimizerConfig& cfg, double tol) {
  Certification c;
  c.restarts = cfg.restarts;
  c.seed = cfg.seed;
  c.tolerance = tol;
  if (w.terms().empty()) {
    c.infimum = w.alpha();
  } else {
    const ProductMaxResult m = seesaw_max(-w.finite_rank_part(), w.dims(), cfg);
    c.infimum = w.alpha() - m.value;
  }
  c.certified = c.infimum >= -tol;
  return c;
}

SequenceWitness::SequenceWitness(double alpha, std::vector<SequenceWitnessTerm> terms, double tol)
    : alpha_(alpha), terms_(std::move(terms)) {
  for (std::size_t i = 0; i < terms_.size(); ++i)
    for (std::size_t j = i + 1; j < terms_.size(); ++j) {
      const double g = sequence_overlap(terms_[i].omega, terms_[j].omega);
      if (std::abs(g) > tol) {
        throw ValidationError("witness vectors " + std::to_string(i) + " and " + std::to_string(j) +
                              " are not orthonormal (overlap " + num(g) + ")");
      }
    }
}

int SequenceWitness::max_shift() const {
  int s = 0;
  for (const auto& t : terms_) s = std::max(s, t.omega.shift());
  return s;
}

bool SequenceWitness::is_non_positive(double tol) const {
  // Finitely many vectors never span an infinite-dimensional space.
  double lowest = alpha_;
  for (const auto& t : terms_) lowest = std::min(lowest, alpha_ + t.lambda);
  return lowest < -tol;
}

FiniteRankWitness SequenceWitness::truncated(const TruncationSpec& spec) const {
  spec.validate();
  const Dims dims{static_cast<int>(spec.rows), static_cast<int>(spec.cols)};
  std::vector<WitnessTerm> terms;
  for (const auto& t : terms_) {
    const BipartiteVector p = t.omega.truncated(spec);
    const double n2 = p.coeffs().squaredNorm();
    if (n2 > 0.0) terms.push_back({t.lambda * n2, p.normalized()});
  }
  return FiniteRankWitness(dims, alpha_, std::move(terms));
}

double c_bound(std::span<const SequenceWitnessTerm> terms) {
  double c = 0.0;
  for (const auto& t : terms) c += std::abs(t.lambda) * shift_family_sq_norm(t.omega);
  return c;
}

namespace {

void require_orthonormal(const SequenceMixture& rho) {
  const auto& ts = rho.terms();
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i + 1; j < ts.size(); ++j)
      if (std::abs(sequence_overlap(ts[i].vector, ts[j].vector)) > kInputTol) {
        throw ValidationError("sequence mixture terms are not orthonormal");
      }
}

}  // namespace

ConstructedSequenceWitness special_witness(const SequenceMixture& rho1, double tol) {
  require_orthonormal(rho1);
  std::vector<SequenceWitnessTerm> terms;
  std::vector<SequenceWitnessTerm> weighted;
  for (const auto& t : rho1.terms()) {
    terms.push_back({-t.weight, t.vector});
    weighted.push_back({t.weight, t.vector});
  }
  SequenceWitness w(c_bound(weighted), std::move(terms));
  const bool ok = w.alpha() >= -tol && w.is_non_positive(tol);
  return {std::move(w), ok};
}

SequenceCorollaryResult corollary_witness(const SequenceMixture& rho, std::size_t k0, double tol) {
  const auto& ts = rho.terms();
  if (k0 >= ts.size()) {
    throw ValidationError("k0 index " + std::to_string(k0) + " out of range for " + std::to_string(ts.size()) +
                          " terms");
  }
  require_orthonormal(rho);
  const double norm2 = shift_family_sq_norm(ts[k0].vector);
  SequenceWitness w(norm2, {{-1.0, ts[k0].vector}});
  const double margin = norm2 - ts[k0].weight;
  return {std::move(w), margin, verdict_below(margin, tol)};
}

double evaluate(const SequenceWitness& w, const SequenceMixture& rho, const std::optional<TruncationSpec>& spec) {
  const double trace = spec ? rho.compressed_trace(*spec) : 1.0;
  if (trace <= kInputTol) throw TruncationError();
  double v = w.alpha();
  for (const auto& t : w.terms()) {
    double e = 0.0;
    for (const auto& m : rho.terms()) e += m.weight * squared(sequence_overlap(t.omega, m.vector, spec));
    v += t.lambda * e / trace;
  }
  return v;
}

}  // namespace entwit
