#include "globalcsp/simplex.hpp"

#include <limits>

#include "globalcsp/errors.hpp"

namespace gcsp {

namespace {

/// Tableau rows 0..m-1 hold the constraints, row m the reduced costs; the
/// last column is the RHS. T[m][last] is the negated current objective.
struct Tableau {
    std::vector<std::vector<Rational>> T;
    std::vector<std::size_t> basis;
    std::size_t m, cols;

    void pivot(std::size_t r, std::size_t c) {
        Rational p = T[r][c];
        for (auto& entry : T[r])
            entry /= p;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == r || T[i][c].is_zero())
                continue;
            Rational f = T[i][c];
            for (std::size_t j = 0; j < cols; ++j)
                T[i][j] -= f * T[r][j];
        }
        basis[r] = c;
    }

    /// Bland's rule: entering = lowest-index negative reduced cost; leaving =
    /// min ratio, ties by lowest basis index. Returns false on unbounded.
    bool run(const std::vector<bool>& banned) {
        while (true) {
            std::size_t enter = cols - 1;
            for (std::size_t j = 0; j + 1 < cols; ++j)
                if (!banned[j] && T[m][j] < Rational(0)) {
                    enter = j;
                    break;
                }
            if (enter == cols - 1)
                return true;
            std::size_t leave = m;
            Rational best;
            for (std::size_t i = 0; i < m; ++i) {
                if (!(T[i][enter] > Rational(0)))
                    continue;
                Rational ratio = T[i][cols - 1] / T[i][enter];
                if (leave == m || ratio < best ||
                    (ratio == best && basis[i] < basis[leave]))
                    best = ratio, leave = i;
            }
            if (leave == m)
                return false;
            pivot(leave, enter);
        }
    }
};

} // namespace

LpResult solve_lp_min(const std::vector<std::vector<Rational>>& A,
                      const std::vector<Rational>& b, const std::vector<Rational>& c) {
    const std::size_t m = A.size();
    const std::size_t n = c.size();
    for (const auto& row : A)
        if (row.size() != n)
            throw ValidationError("LP row width mismatch");
    if (b.size() != m)
        throw ValidationError("LP rhs size mismatch");
    for (const auto& bi : b)
        if (bi < Rational(0))
            throw ValidationError("solve_lp_min expects b >= 0");

    // columns: n originals | m surplus | m artificials | rhs
    const std::size_t surplus0 = n;
    const std::size_t art0 = n + m;
    const std::size_t cols = n + 2 * m + 1;

    Tableau tab;
    tab.m = m;
    tab.cols = cols;
    tab.T.assign(m + 1, std::vector<Rational>(cols, Rational(0)));
    tab.basis.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            tab.T[i][j] = A[i][j];
        tab.T[i][surplus0 + i] = Rational(-1);
        tab.T[i][art0 + i] = Rational(1);
        tab.T[i][cols - 1] = b[i];
        tab.basis[i] = art0 + i;
    }

    // phase 1: minimize the sum of artificials
    for (std::size_t i = 0; i < m; ++i)
        tab.T[m][art0 + i] = Rational(1);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            tab.T[m][j] -= tab.T[i][j];
    std::vector<bool> banned(cols - 1, false);
    if (!tab.run(banned))
        throw ValidationError("phase-1 LP unbounded"); // cannot happen
    LpResult result;
    if (!(tab.T[m][cols - 1] == Rational(0))) {
        result.status = LpStatus::infeasible;
        return result;
    }

    // drive leftover artificials out of the basis where possible
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis[i] < art0)
            continue;
        for (std::size_t j = 0; j < art0; ++j)
            if (!tab.T[i][j].is_zero()) {
                tab.pivot(i, j);
                break;
            }
    }
    for (std::size_t j = art0; j + 1 < cols; ++j)
        banned[j] = true;

    // phase 2: the real objective
    for (std::size_t j = 0; j < cols; ++j)
        tab.T[m][j] = Rational(0);
    for (std::size_t j = 0; j < n; ++j)
        tab.T[m][j] = c[j];
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis[i] >= n && tab.basis[i] < art0)
            continue; // surplus has zero cost
        if (tab.basis[i] >= art0)
            continue; // degenerate artificial stuck at zero
        Rational f = tab.T[m][tab.basis[i]];
        if (f.is_zero())
            continue;
        for (std::size_t j = 0; j < cols; ++j)
            tab.T[m][j] -= f * tab.T[i][j];
    }
    if (!tab.run(banned)) {
        result.status = LpStatus::unbounded;
        return result;
    }

    result.status = LpStatus::optimal;
    result.objective = -tab.T[m][cols - 1];
    result.x.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        if (tab.basis[i] < n)
            result.x[tab.basis[i]] = tab.T[i][cols - 1];
    result.dual.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
        result.dual.push_back(tab.T[m][surplus0 + i]);
    return result;
}

} // namespace gcsp
