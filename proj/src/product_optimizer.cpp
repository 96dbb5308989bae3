#include "entwit/product_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "entwit/error.hpp"

namespace entwit {

namespace {

CVector random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v / v.norm();
}

// abs components compared left to right; entries within 1e-12 count as equal.
bool lex_greater(const CVector& x, const CVector& y) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x(i));
    const double b = std::abs(y(i));
    if (a > b + 1e-12) return true;
    if (b > a + 1e-12) return false;
  }
  return false;
}

std::vector<RVector> grid_directions(int dim, int resolution) {
  std::vector<RVector> out;
  const double step = std::numbers::pi / resolution;
  if (dim == 1) {
    out.push_back(RVector::Ones(1));
  } else if (dim == 2) {
    for (int k = 0; k < resolution; ++k) {
      RVector v(2);
      v << std::cos(k * step), std::sin(k * step);
      out.push_back(v);
    }
  } else {
    // theta over [0, pi], phi over [0, pi): every direction up to sign.
    for (int k = 0; k <= resolution; ++k) {
      for (int m = 0; m < resolution; ++m) {
        const double th = k * step;
        const double ph = m * step;
        RVector v(3);
        v << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
        out.push_back(v);
        if (k == 0 || k == resolution) break;
      }
    }
  }
  return out;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (restarts < 1) throw ValidationError("optimizer needs at least one restart");
  if (max_iters < 1) throw ValidationError("optimizer needs at least one iteration");
  if (!(convergence_tol > 0.0)) throw ValidationError("convergence tolerance must be positive");
}

bool ProductMaxResult::all_converged() const {
  return std::all_of(restarts.begin(), restarts.end(), [](const auto& r) { return r.converged; });
}

CMatrix contract_second(const CMatrix& T, const Dims& dims, const CVector& beta) {
  CMatrix m = CMatrix::Zero(dims.a, dims.a);
  for (int i = 0; i < dims.a; ++i)
    for (int k = 0; k < dims.a; ++k) {
      Complex s = 0.0;
      for (int j = 0; j < dims.b; ++j)
        for (int l = 0; l < dims.b; ++l)
          s += std::conj(beta(j)) * T(dims.index(i, j), dims.index(k, l)) * beta(l);
      m(i, k) = s;
    }
  return m;
}

CMatrix contract_first(const CMatrix& T, const Dims& dims, const CVector& alpha) {
  CMatrix m = CMatrix::Zero(dims.b, dims.b);
  for (int j = 0; j < dims.b; ++j)
    for (int l = 0; l < dims.b; ++l) {
      Complex s = 0.0;
      for (int i = 0; i < dims.a; ++i)
        for (int k = 0; k < dims.a; ++k)
          s += std::conj(alpha(i)) * T(dims.index(i, j), dims.index(k, l)) * alpha(k);
      m(j, l) = s;
    }
  return m;
}

double product_expectation(const CMatrix& T, const Dims& dims, const CVector& alpha, const CVector& beta) {
  if (alpha.size() != dims.a) throw DimensionMismatch("dim_a", dims.a, alpha.size());
  if (beta.size() != dims.b) throw DimensionMismatch("dim_b", dims.b, beta.size());
  const CVector v = BipartiteVector::product(alpha, beta).flatten();
  if (T.rows() != v.size()) throw DimensionMismatch("product", T.rows(), v.size());
  return v.dot(T * v).real();
}

CVector top_eigenvector(const CMatrix& m, double* eigenvalue) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(m);
  const auto& vals = eig.eigenvalues();
  const Eigen::Index n = vals.size();
  const double top = vals(n - 1);
  const double band = 1e-12 * std::max(1.0, std::abs(top));
  CVector best = eig.eigenvectors().col(n - 1);
  for (Eigen::Index k = n - 2; k >= 0 && vals(k) >= top - band; --k) {
    const CVector cand = eig.eigenvectors().col(k);
    if (lex_greater(cand, best)) best = cand;
  }
  for (Eigen::Index i = 0; i < best.size(); ++i) {
    if (std::abs(best(i)) > 1e-12) {
      best *= std::conj(best(i)) / std::abs(best(i));
      break;
    }
  }
  if (eigenvalue) *eigenvalue = top;
  return best;
}

ProductMaxResult seesaw_max(const CMatrix& T, const Dims& dims, const OptimizerConfig& cfg) {
  cfg.validate();
  if (T.rows() != dims.total() || T.cols() != dims.total()) {
    throw DimensionMismatch("product", dims.total(), T.rows());
  }
  const double asym = (T - T.adjoint()).cwiseAbs().maxCoeff();
  if (asym > cfg.hermitian_tol) throw ValidationError("operator is not Hermitian");
  const CMatrix H = 0.5 * (T + T.adjoint());

  ProductMaxResult result;
  result.restarts.resize(cfg.restarts);
  for (int r = 0; r < cfg.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    CVector alpha = random_unit(dims.a, rng);
    CVector beta = random_unit(dims.b, rng);

    RestartSummary& summary = result.restarts[r];
    double value = product_expectation(H, dims, alpha, beta);
    if (cfg.record_trace) summary.trace.push_back(value);
    for (int it = 0; it < cfg.max_iters; ++it) {
      double half = 0.0;
      alpha = top_eigenvector(contract_second(H, dims, beta), &half);
      if (cfg.record_trace) summary.trace.push_back(half);
      double next = 0.0;
      beta = top_eigenvector(contract_first(H, dims, alpha), &next);
      if (cfg.record_trace) summary.trace.push_back(next);
      summary.iterations = it + 1;
      const double gain = next - value;
      value = next;
      if (gain < cfg.convergence_tol) {
        summary.converged = true;
        break;
      }
    }
    // Report the objective at the returned vectors, not the eigenvalue estimate.
    value = product_expectation(H, dims, alpha, beta);
    summary.value = value;
    summary.alpha = alpha;
    summary.beta = beta;
    if (r == 0 || value > result.value) {
      result.value = value;
      result.alpha = alpha;
      result.beta = beta;
      result.best_restart = r;
    }
  }
  result.restarts_used = cfg.restarts;
  return result;
}

double grid_oracle_max(const RMatrix& T, const Dims& dims, int resolution) {
  if (dims.a > 3 || dims.b > 3) throw RefusalError("grid oracle supports local dimensions up to 3");
  if (resolution < 2) throw ValidationError("grid resolution must be at least 2");
  if (T.rows() != dims.total() || T.cols() != dims.total()) {
    throw DimensionMismatch("product", dims.total(), T.rows());
  }
  if ((T - T.transpose()).cwiseAbs().maxCoeff() > kInputTol) {
    throw ValidationError("grid oracle needs a real-symmetric operator");
  }
  const auto as = grid_directions(dims.a, resolution);
  const auto bs = grid_directions(dims.b, resolution);
  double best = -std::numeric_limits<double>::infinity();
  RMatrix m(dims.b, dims.b);
  for (const auto& a : as) {
    for (int j = 0; j < dims.b; ++j)
      for (int l = 0; l < dims.b; ++l) {
        double s = 0.0;
        for (int i = 0; i < dims.a; ++i)
          for (int k = 0; k < dims.a; ++k) s += a(i) * T(dims.index(i, j), dims.index(k, l)) * a(k);
        m(j, l) = s;
      }
    for (const auto& b : bs) best = std::max(best, b.dot(m * b));
  }
  return best;
}

}  // namespace entwit
