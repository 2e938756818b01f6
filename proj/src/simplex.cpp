#include "d2dsim/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace d2dsim {

namespace {

constexpr double kEps = 1e-9;

// Tableau with rows = constraints, columns = structural vars + slacks +
// artificials + rhs. Basis tracked by column index per row.
struct Tableau {
  int n_rows = 0;
  int n_cols = 0;  // excluding rhs
  std::vector<std::vector<double>> a;  // n_rows x (n_cols + 1)
  std::vector<int> basis;

  double& at(int r, int c) { return a[r][c]; }
  double rhs(int r) const { return a[r][n_cols]; }

  void pivot(int pr, int pc) {
    double pivot_val = a[pr][pc];
    for (int c = 0; c <= n_cols; ++c) a[pr][c] /= pivot_val;
    for (int r = 0; r < n_rows; ++r) {
      if (r == pr) continue;
      double factor = a[r][pc];
      if (factor == 0.0) continue;
      for (int c = 0; c <= n_cols; ++c) a[r][c] -= factor * a[pr][c];
    }
    basis[pr] = pc;
  }

  // Primal simplex on objective row `z` (reduced costs for maximization).
  // Returns false if unbounded.
  bool iterate(std::vector<double>& z, double& z0) {
    while (true) {
      int pc = -1;
      for (int c = 0; c < n_cols; ++c) {
        if (z[c] > kEps) {  // Bland: first improving column
          pc = c;
          break;
        }
      }
      if (pc < 0) return true;
      int pr = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < n_rows; ++r) {
        if (a[r][pc] > kEps) {
          double ratio = rhs(r) / a[r][pc];
          if (ratio < best_ratio - kEps ||
              (ratio < best_ratio + kEps && (pr < 0 || basis[r] < basis[pr]))) {
            best_ratio = ratio;
            pr = r;
          }
        }
      }
      if (pr < 0) return false;
      double zfac = z[pc];
      pivot(pr, pc);
      for (int c = 0; c <= n_cols; ++c) {
        double v = (c == n_cols) ? rhs(pr) : a[pr][c];
        if (c == n_cols)
          z0 += zfac * v;
        else
          z[c] -= zfac * v;
      }
      z[pc] = 0.0;
    }
  }
};

}  // namespace

LpResult solve_lp(const std::vector<double>& objective,
                  const std::vector<LpConstraint>& constraints) {
  const int n = static_cast<int>(objective.size());
  const int m = static_cast<int>(constraints.size());
  for (const LpConstraint& c : constraints)
    if (static_cast<int>(c.coeffs.size()) != n)
      throw std::invalid_argument("lp: constraint width mismatch");

  // Count slack and artificial columns.
  int n_slack = 0, n_art = 0;
  for (const LpConstraint& c : constraints) {
    if (c.relation != Relation::Equal) ++n_slack;
    // rhs is normalized nonnegative below; >= and = rows need artificials,
    // and a flipped <= row can too. Allocate one per row for simplicity.
    ++n_art;
  }

  Tableau t;
  t.n_rows = m;
  t.n_cols = n + n_slack + n_art;
  t.a.assign(m, std::vector<double>(t.n_cols + 1, 0.0));
  t.basis.assign(m, -1);

  int slack_col = n;
  int art_col = n + n_slack;
  std::vector<int> art_of_row(m, -1);

  for (int r = 0; r < m; ++r) {
    const LpConstraint& c = constraints[r];
    double sign = c.rhs < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) t.a[r][j] = sign * c.coeffs[j];
    t.a[r][t.n_cols] = sign * c.rhs;
    Relation rel = c.relation;
    if (sign < 0.0) {
      if (rel == Relation::LessEq) rel = Relation::GreaterEq;
      else if (rel == Relation::GreaterEq) rel = Relation::LessEq;
    }
    if (rel == Relation::LessEq) {
      t.a[r][slack_col] = 1.0;
      t.basis[r] = slack_col;
      ++slack_col;
    } else if (rel == Relation::GreaterEq) {
      t.a[r][slack_col] = -1.0;
      ++slack_col;
    }
    if (t.basis[r] < 0) {
      t.a[r][art_col] = 1.0;
      t.basis[r] = art_col;
      art_of_row[r] = art_col;
      ++art_col;
    }
  }

  // Phase 1: minimize sum of artificials == maximize -(sum).
  {
    std::vector<double> z(t.n_cols, 0.0);
    double z0 = 0.0;
    for (int r = 0; r < m; ++r) {
      if (art_of_row[r] < 0) continue;
      for (int c = 0; c < t.n_cols; ++c)
        if (c != art_of_row[r]) z[c] += t.a[r][c];
      z0 -= t.rhs(r);
    }
    // z row currently holds reduced costs for maximizing -(sum of
    // artificials); artificial columns themselves price at zero in-basis.
    if (!t.iterate(z, z0)) return {LpStatus::Infeasible, 0.0, {}};
    if (z0 < -1e-7) return {LpStatus::Infeasible, 0.0, {}};
    // Drive any remaining artificial out of the basis if possible.
    for (int r = 0; r < m; ++r) {
      if (t.basis[r] < n + n_slack) continue;
      int pc = -1;
      for (int c = 0; c < n + n_slack; ++c)
        if (std::fabs(t.a[r][c]) > kEps) {
          pc = c;
          break;
        }
      if (pc >= 0) t.pivot(r, pc);
    }
  }

  // Phase 2: maximize the real objective, artificial columns frozen.
  {
    std::vector<double> z(t.n_cols, 0.0);
    double z0 = 0.0;
    for (int j = 0; j < n; ++j) z[j] = objective[j];
    for (int r = 0; r < m; ++r) {
      int b = t.basis[r];
      if (b < n && objective[b] != 0.0) {
        double coef = objective[b];
        for (int c = 0; c < t.n_cols; ++c)
          if (c != b) z[c] -= coef * t.a[r][c];
        z0 += coef * t.rhs(r);
        z[b] = 0.0;
      }
    }
    for (int c = n + n_slack; c < t.n_cols; ++c) z[c] = -1.0;  // freeze
    if (!t.iterate(z, z0)) return {LpStatus::Unbounded, 0.0, {}};

    LpResult res;
    res.status = LpStatus::Optimal;
    res.solution.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
      if (t.basis[r] < n) res.solution[t.basis[r]] = t.rhs(r);
    res.value = 0.0;
    for (int j = 0; j < n; ++j) res.value += objective[j] * res.solution[j];
    return res;
  }
}

}  // namespace d2dsim
