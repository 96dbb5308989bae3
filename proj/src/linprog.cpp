#include "entwit/linprog.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "entwit/error.hpp"

namespace entwit::lp {

// Vertex simplex on max c.x s.t. G x <= h. A vertex is kept as n tight,
// linearly independent rows; x and the duals are re-solved from that n x n
// basis every step, so round-off does not accumulate the way it does in a
// tableau when there are many nearly parallel constraints. Bland's rule
// (lowest index for the leaving row) prevents cycling.
namespace {

constexpr double kDualTol = 1e-12;
constexpr double kDirTol = 1e-11;
constexpr double kFeasTol = 1e-9;

struct Vertex {
  RVector x;
  std::vector<Eigen::Index> basis;
};

RMatrix rows_of(const RMatrix& G, const std::vector<Eigen::Index>& idx) {
  RMatrix B(static_cast<Eigen::Index>(idx.size()), G.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) B.row(static_cast<Eigen::Index>(k)) = G.row(idx[k]);
  return B;
}

RVector entries_of(const RVector& h, const std::vector<Eigen::Index>& idx) {
  RVector r(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) r(static_cast<Eigen::Index>(k)) = h(idx[k]);
  return r;
}

// Runs from a feasible vertex and leaves the final vertex in v.
Status walk(const RVector& c, const RMatrix& G, const RVector& h, Vertex& v, int max_pivots, int& pivots) {
  const Eigen::Index n = G.cols();
  const Eigen::Index m = G.rows();
  const double cscale = 1.0 + c.cwiseAbs().maxCoeff();
  std::vector<char> in_basis(static_cast<std::size_t>(m), 0);
  for (auto j : v.basis) in_basis[static_cast<std::size_t>(j)] = 1;
  const RVector row_scale = G.cwiseAbs().rowwise().maxCoeff().array() + 1.0;

  while (pivots < max_pivots) {
    const Eigen::PartialPivLU<RMatrix> lu(rows_of(G, v.basis));
    v.x = lu.solve(entries_of(h, v.basis));
    const RVector y = lu.transpose().solve(c);

    Eigen::Index k = -1;
    for (Eigen::Index p = 0; p < n; ++p) {
      if (y(p) < -kDualTol * cscale && (k < 0 || v.basis[p] < v.basis[k])) k = p;
    }
    if (k < 0) return Status::optimal;

    RVector e = RVector::Zero(n);
    e(k) = -1.0;
    const RVector d = lu.solve(e);
    const RVector gd = G * d;
    const RVector slack = (h - G * v.x).cwiseMax(0.0);
    const double dscale = d.cwiseAbs().maxCoeff();

    Eigen::Index enter = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < m; ++j) {
      if (in_basis[static_cast<std::size_t>(j)]) continue;
      if (gd(j) <= kDirTol * row_scale(j) * dscale) continue;
      const double t = slack(j) / gd(j);
      if (t < best) {
        best = t;
        enter = j;
      }
    }
    if (enter < 0) return Status::unbounded;
    in_basis[static_cast<std::size_t>(v.basis[k])] = 0;
    in_basis[static_cast<std::size_t>(enter)] = 1;
    v.basis[k] = enter;
    ++pivots;
  }
  return Status::iteration_limit;
}

// Picks n independent rows among those tight at x, trying `first` before the rest.
std::vector<Eigen::Index> tight_basis(const RMatrix& G, const RVector& h, const RVector& x,
                                      const std::vector<Eigen::Index>& first) {
  const Eigen::Index n = G.cols();
  std::vector<Eigen::Index> picked;
  const RVector slack = h - G * x;
  auto try_add = [&](Eigen::Index j) {
    if (static_cast<Eigen::Index>(picked.size()) == n) return;
    if (std::abs(slack(j)) > kFeasTol * (1.0 + std::abs(h(j)))) return;
    if (std::find(picked.begin(), picked.end(), j) != picked.end()) return;
    auto trial = picked;
    trial.push_back(j);
    if (Eigen::FullPivLU<RMatrix>(rows_of(G, trial)).rank() == static_cast<Eigen::Index>(trial.size())) picked = trial;
  };
  for (auto j : first) try_add(j);
  for (Eigen::Index j = 0; j < G.rows(); ++j) try_add(j);
  return picked;
}

// x0 satisfies the rows in basis0 with equality; other rows may be violated.
Result solve(const RVector& c, const RMatrix& G, const RVector& h, const RVector& x0,
             std::vector<Eigen::Index> basis0, int max_pivots) {
  const Eigen::Index n = G.cols();
  const Eigen::Index m = G.rows();
  Result res;
  int pivots = 0;
  Vertex v{x0, std::move(basis0)};

  const RVector viol = G * x0 - h;
  Eigen::Index worst = -1;
  for (Eigen::Index j = 0; j < m; ++j)
    if (viol(j) > kFeasTol && (worst < 0 || viol(j) > viol(worst))) worst = j;

  if (worst >= 0) {
    // Phase one over (x, s): rows outside basis0 are relaxed by s >= 0.
    std::vector<char> hard(static_cast<std::size_t>(m), 0);
    for (auto j : v.basis) hard[static_cast<std::size_t>(j)] = 1;
    RMatrix G1 = RMatrix::Zero(m + 1, n + 1);
    RVector h1(m + 1);
    G1.topLeftCorner(m, n) = G;
    for (Eigen::Index j = 0; j < m; ++j)
      if (!hard[static_cast<std::size_t>(j)]) G1(j, n) = -1.0;
    G1(m, n) = -1.0;
    h1.head(m) = h;
    h1(m) = 0.0;
    RVector c1 = RVector::Zero(n + 1);
    c1(n) = -1.0;
    Vertex v1{RVector(n + 1), v.basis};
    v1.x.head(n) = x0;
    v1.x(n) = viol(worst);
    v1.basis.push_back(worst);
    const Status s = walk(c1, G1, h1, v1, max_pivots, pivots);
    res.pivots = pivots;
    res.x = v1.x.head(n);
    if (s == Status::iteration_limit) {
      res.status = s;
      return res;
    }
    if (v1.x(n) > kFeasTol) {
      res.status = Status::infeasible;
      return res;
    }
    std::vector<Eigen::Index> prefer;
    for (auto j : v1.basis)
      if (j < m) prefer.push_back(j);
    v.x = v1.x.head(n);
    v.basis = tight_basis(G, h, v.x, prefer);
    // Both callers include a full set of bound rows, so a vertex always exists.
    if (static_cast<Eigen::Index>(v.basis.size()) < n) throw Error("lp: no vertex at the phase-one optimum");
  }

  res.status = walk(c, G, h, v, max_pivots, pivots);
  res.pivots = pivots;
  res.x = v.x;
  res.value = c.dot(res.x);
  return res;
}

}  // namespace

Result maximize(const RVector& c, const RMatrix& A, const RVector& b, int max_pivots) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (c.size() != n) throw DimensionMismatch("lp variables", n, c.size());
  if (b.size() != m) throw DimensionMismatch("lp constraints", m, b.size());
  RMatrix G(m + n, n);
  G.topRows(m) = A;
  G.bottomRows(n) = -RMatrix::Identity(n, n);
  RVector h = RVector::Zero(m + n);
  h.head(m) = b;
  std::vector<Eigen::Index> basis;
  for (Eigen::Index i = 0; i < n; ++i) basis.push_back(m + i);
  return solve(c, G, h, RVector::Zero(n), basis, max_pivots);
}

Result maximize_boxed(const RVector& c, const RMatrix& A, const RVector& b, double lo, double hi,
                      int max_pivots) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (c.size() != n) throw DimensionMismatch("lp variables", n, c.size());
  if (b.size() != m) throw DimensionMismatch("lp constraints", m, b.size());
  if (!(hi > lo)) throw ValidationError("lp box must have hi > lo");
  RMatrix G(m + 2 * n, n);
  G.topRows(m) = A;
  G.middleRows(m, n) = RMatrix::Identity(n, n);
  G.bottomRows(n) = -RMatrix::Identity(n, n);
  RVector h(m + 2 * n);
  h.head(m) = b;
  h.segment(m, n).setConstant(hi);
  h.tail(n).setConstant(-lo);
  std::vector<Eigen::Index> basis;
  for (Eigen::Index i = 0; i < n; ++i) basis.push_back(m + n + i);
  return solve(c, G, h, RVector::Constant(n, lo), basis, max_pivots);
}

}  // namespace entwit::lp
