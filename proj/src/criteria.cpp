#include "entwit/criteria.hpp"

#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "entwit/error.hpp"

namespace entwit {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::map<std::string, std::string> dims_metadata(const Dims& d, double tol) {
  return {{"dim_a", std::to_string(d.a)}, {"dim_b", std::to_string(d.b)}, {"tolerance", num(tol)}};
}

}  // namespace

std::string to_string(Verdict v) { return v == Verdict::detected ? "detected" : "not-detected"; }

Verdict verdict_below(double margin, double tol) {
  return margin < -tol ? Verdict::detected : Verdict::not_detected;
}

Verdict verdict_above(double margin, double tol) {
  return margin > tol ? Verdict::detected : Verdict::not_detected;
}

CMatrix partial_transpose(const CMatrix& op, const Dims& dims, Side side) {
  if (op.rows() != dims.total()) throw DimensionMismatch("rows", dims.total(), op.rows());
  if (op.cols() != dims.total()) throw DimensionMismatch("cols", dims.total(), op.cols());
  CMatrix out(op.rows(), op.cols());
  for (int i = 0; i < dims.a; ++i)
    for (int j = 0; j < dims.b; ++j)
      for (int k = 0; k < dims.a; ++k)
        for (int l = 0; l < dims.b; ++l) {
          const int r = dims.index(i, j);
          const int c = dims.index(k, l);
          if (side == Side::second) {
            out(dims.index(i, l), dims.index(k, j)) = op(r, c);
          } else {
            out(dims.index(k, j), dims.index(i, l)) = op(r, c);
          }
        }
  return out;
}

CMatrix partial_transpose(const DensityOperator& rho, Side side) {
  return partial_transpose(rho.matrix(), rho.dims(), side);
}

CriterionReport ppt_check(const DensityOperator& rho, double tol) {
  const CMatrix pt = partial_transpose(rho);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(pt, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  CriterionReport r;
  r.criterion = "ppt";
  r.margin = lo;
  r.tolerance = tol;
  r.verdict = verdict_below(lo, tol);
  r.dims = rho.dims();
  r.metadata = dims_metadata(rho.dims(), tol);
  return r;
}

CMatrix realign(std::span<const MixtureTerm> terms) {
  if (terms.empty()) throw ValidationError("realignment needs at least one term");
  const Dims d = terms.front().vector.dims();
  CMatrix out = CMatrix::Zero(d.a * d.a, d.b * d.b);
  for (const auto& t : terms) {
    require_same_dims(d, t.vector.dims());
    const CMatrix& D = t.vector.coeffs();
    out += t.weight * Eigen::kroneckerProduct(D, D.conjugate()).eval();
  }
  return out;
}

CMatrix realign(const DensityOperator& rho, double tol) {
  const auto terms = rho.pure_decomposition(tol);
  return realign(terms);
}

double trace_norm(const CMatrix& m) {
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

CriterionReport realignment_check(const DensityOperator& rho, double tol) {
  const double norm = trace_norm(realign(rho));
  CriterionReport r;
  r.criterion = "realignment";
  r.margin = norm - 1.0;
  r.tolerance = tol;
  r.verdict = verdict_above(r.margin, tol);
  r.dims = rho.dims();
  r.metadata = dims_metadata(rho.dims(), tol);
  r.metadata["trace_norm"] = num(norm);
  return r;
}

}  // namespace entwit
