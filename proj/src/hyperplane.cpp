#include "entwit/hyperplane.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "entwit/error.hpp"
#include "entwit/linprog.hpp"

namespace entwit {

FeatureMap::FeatureMap(std::vector<DensityOperator> components, double tol)
    : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("feature map needs at least one component");
  dims_ = components_.front().dims();
  for (std::size_t i = 0; i < components_.size(); ++i) {
    require_same_dims(dims_, components_[i].dims());
    for (std::size_t j = i + 1; j < components_.size(); ++j) {
      const double overlap = (components_[i].matrix() * components_[j].matrix()).cwiseAbs().maxCoeff();
      if (overlap > tol) {
        throw ValidationError("feature map components " + std::to_string(i) + " and " + std::to_string(j) +
                              " are not orthogonal");
      }
    }
  }
}

CMatrix FeatureMap::combination(const RVector& f) const {
  if (f.size() != size()) throw DimensionMismatch("feature", size(), f.size());
  CMatrix t = CMatrix::Zero(dims_.total(), dims_.total());
  for (int i = 0; i < size(); ++i) t += f(i) * components_[i].matrix();
  return t;
}

CMatrix FeatureMap::support_projector(double tol) const {
  CMatrix p = CMatrix::Zero(dims_.total(), dims_.total());
  for (const auto& c : components_) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(c.matrix());
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
      if (eig.eigenvalues()(k) > tol) p += eig.eigenvectors().col(k) * eig.eigenvectors().col(k).adjoint();
    }
  }
  return p;
}

RVector feature_vector(const FeatureMap& map, const DensityOperator& rho) {
  require_same_dims(map.dims(), rho.dims());
  RVector v(map.size());
  for (int i = 0; i < map.size(); ++i) {
    v(i) = (map.components()[i].matrix() * rho.matrix()).trace().real();
  }
  return v;
}

RVector feature_vector(const FeatureMap& map, const CVector& alpha, const CVector& beta) {
  RVector v(map.size());
  for (int i = 0; i < map.size(); ++i) {
    v(i) = product_expectation(map.components()[i].matrix(), map.dims(), alpha, beta);
  }
  return v;
}

FiniteRankWitness plane_witness(const FeatureMap& map, const RVector& f) {
  if (f.size() != map.size()) throw DimensionMismatch("feature", map.size(), f.size());
  std::vector<WitnessTerm> terms;
  for (int i = 0; i < map.size(); ++i) {
    if (f(i) == 0.0) continue;
    for (const auto& t : orthonormal_decomposition(map.components()[i])) {
      terms.push_back({-f(i) * t.weight, t.vector});
    }
  }
  return FiniteRankWitness(map.dims(), 1.0, std::move(terms));
}

PlaneCheck check_plane(const FeatureMap& map, const RVector& f, const OptimizerConfig& cfg, double tol) {
  const ProductMaxResult m = seesaw_max(map.combination(f), map.dims(), cfg);
  return {m.value, std::abs(m.value - 1.0) <= tol, m.alpha, m.beta};
}

SearchOutcome search(const FeatureMap& map, const DensityOperator& rho, const SearchConfig& cfg) {
  const int n = map.size();
  SearchOutcome out;
  out.box = cfg.box;
  const RVector target = feature_vector(map, rho);

  const CMatrix proj = map.support_projector();
  const double mass = (proj * rho.matrix()).trace().real();
  if (mass <= kInputTol) {
    out.failure = "state has no weight on the feature map components";
    return out;
  }

  // Seed cuts: each component's own separable maximum on its axis, plus samples.
  std::vector<RVector> cuts;
  for (int i = 0; i < n; ++i) {
    const ProductMaxResult m = seesaw_max(map.components()[i].matrix(), map.dims(), cfg.oracle);
    RVector v = RVector::Zero(n);
    v(i) = m.value;
    cuts.push_back(v);
  }
  std::mt19937_64 rng(cfg.oracle.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto unit = [&](int d) {
    CVector v(d);
    for (int k = 0; k < d; ++k) v(k) = Complex(gauss(rng), gauss(rng));
    return CVector(v / v.norm());
  };
  for (int s = 0; s < cfg.initial_samples; ++s) {
    const CVector a = unit(map.dims().a);
    const CVector b = unit(map.dims().b);
    cuts.push_back(feature_vector(map, a, b));
  }

  OptimizerConfig oracle = cfg.oracle;
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    RMatrix A(static_cast<Eigen::Index>(cuts.size()), n);
    for (std::size_t r = 0; r < cuts.size(); ++r) A.row(static_cast<Eigen::Index>(r)) = cuts[r].transpose();
    const RVector ones = RVector::Ones(A.rows());
    const lp::Result lpres = lp::maximize_boxed(target, A, ones, -cfg.box, cfg.box);
    if (lpres.status != lp::Status::optimal) {
      out.failure = "linear program did not reach an optimum";
      return out;
    }
    const RVector f = lpres.x;
    SearchRound rec{round, lpres.value, 0.0, 0, f};

    if (lpres.value <= 1.0 + cfg.violation_tol) {
      out.trace.push_back(rec);
      out.failure = "not separated: no functional with f.L(rho) > 1 over the collected cuts";
      out.notes.push_back("LP optimum " + std::to_string(lpres.value) +
                          " <= 1; the reverse orientation f.L(rho) < 1 is not searched");
      return out;
    }

    oracle.seed = cfg.oracle.seed + static_cast<std::uint64_t>(round);
    const ProductMaxResult m = seesaw_max(map.combination(f), map.dims(), oracle);
    rec.oracle_max = m.value;
    if (m.value > 1.0 + cfg.cut_tol) {
      for (const auto& r : m.restarts) {
        if (r.value > 1.0 + cfg.cut_tol) {
          cuts.push_back(feature_vector(map, r.alpha, r.beta));
          ++rec.cuts_added;
        }
      }
      out.trace.push_back(rec);
      continue;
    }
    out.trace.push_back(rec);

    if (m.value <= 0.0) {
      out.failure = "oracle returned a nonpositive separable maximum";
      return out;
    }
    const RVector scaled = f / m.value;
    const double violation = scaled.dot(target) - 1.0;
    if (violation <= cfg.violation_tol) {
      out.failure = "separable maximum leaves no violation after rescaling";
      return out;
    }

    FiniteRankWitness w = plane_witness(map, scaled);
    OptimizerConfig cert_cfg = cfg.oracle;
    cert_cfg.seed = cfg.oracle.seed + 0x5eedULL;
    const Certification cert = certify(w, cert_cfg, cfg.cert_tol);
    const double sep_max = 1.0 - cert.infimum;
    if (std::abs(sep_max - 1.0) > cfg.cert_tol) {
      std::ostringstream os;
      os << "certified separable maximum " << sep_max << " outside 1 +- " << cfg.cert_tol;
      out.failure = os.str();
      return out;
    }
    const double value = evaluate(w, rho);
    // Tr(W rho) = mass * Tr(W' rho') + (1 - mass), with W' = I - sum f_i rho_i on the span.
    const double reduced = (mass - scaled.dot(target)) / mass;
    const double ratio = (rho.trace() - mass) / mass;
    if (!(ratio < -reduced)) {
      out.failure = "remainder weight outside the components' span defeats the witness";
      return out;
    }
    int total_cuts = 0;
    for (const auto& r : out.trace) total_cuts += r.cuts_added;
    out.result = SeparatingResult{scaled,   sep_max, violation, value, mass, ratio, reduced, total_cuts,
                                  w.with_certification(cert), cert};
    return out;
  }
  out.failure = "round limit reached";
  return out;
}

}  // namespace entwit
