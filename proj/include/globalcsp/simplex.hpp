#pragma once

#include <vector>

#include "globalcsp/rational.hpp"

namespace gcsp {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Rational objective;
    std::vector<Rational> x;    // primal solution
    std::vector<Rational> dual; // one multiplier per constraint row
};

/// Exact two-phase simplex with Bland's rule for
///     min c^T x   s.t.   A x >= b,  x >= 0,
/// restricted to b >= 0 (all covering LPs used here satisfy this).
LpResult solve_lp_min(const std::vector<std::vector<Rational>>& A,
                      const std::vector<Rational>& b, const std::vector<Rational>& c);

} // namespace gcsp
