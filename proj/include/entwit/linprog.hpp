#pragma once

#include "entwit/bipartite.hpp"

namespace entwit::lp {

enum class Status { optimal, unbounded, infeasible, iteration_limit };

struct Result {
  Status status = Status::optimal;
  RVector x;
  double value = 0.0;
  int pivots = 0;
};

/// maximize c.x subject to A x <= b, x >= 0. Two-phase vertex simplex with
/// Bland's rule; phase one only runs when the origin is infeasible.
Result maximize(const RVector& c, const RMatrix& A, const RVector& b, int max_pivots = 100000);

/// maximize c.x subject to A x <= b and lo <= x_i <= hi.
Result maximize_boxed(const RVector& c, const RMatrix& A, const RVector& b, double lo, double hi,
                      int max_pivots = 100000);

}  // namespace entwit::lp
