#pragma once

#include <map>
#include <string>

#include "entwit/bipartite.hpp"

namespace entwit {

/// Default tolerance for turning a numeric margin into a verdict.
inline constexpr double kReportTol = 1e-9;

enum class Verdict { detected, not_detected };

std::string to_string(Verdict v);

/// A criterion's verdict together with the raw margin it was derived from.
///
/// Margins: PPT is the minimum partial-transpose eigenvalue (detects when
/// < -tol), realignment is ||rho^R||_1 - 1 (detects when > tol), a witness is
/// Tr(W rho) (detects when < -tol).
struct CriterionReport {
  std::string criterion;
  Verdict verdict = Verdict::not_detected;
  double margin = 0.0;
  double tolerance = kReportTol;
  Dims dims;
  std::map<std::string, std::string> metadata;
};

enum class Side { first, second };

/// Transpose on one factor. For Side::second, ((i,j),(k,l)) -> ((i,l),(k,j)).
CMatrix partial_transpose(const CMatrix& op, const Dims& dims, Side side = Side::second);
CMatrix partial_transpose(const DensityOperator& rho, Side side = Side::second);

CriterionReport ppt_check(const DensityOperator& rho, double tol = kReportTol);

/// sum_i p_i D_i (x) conj(D_i), a dim_a^2 x dim_b^2 matrix. Uses the stored
/// mixture when the operator has one, else its eigendecomposition.
CMatrix realign(const DensityOperator& rho, double tol = kInputTol);
CMatrix realign(std::span<const MixtureTerm> terms);

/// Sum of singular values of the (possibly rectangular) matrix.
double trace_norm(const CMatrix& m);

CriterionReport realignment_check(const DensityOperator& rho, double tol = kReportTol);

/// Verdict helpers shared with the witness report.
Verdict verdict_below(double margin, double tol);
Verdict verdict_above(double margin, double tol);

}  // namespace entwit
