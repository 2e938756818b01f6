#pragma once

#include <vector>

namespace d2dsim {

// Dense two-phase simplex for the small linear programs the oracle builds
// (tens of variables). Maximizes c.x subject to row constraints and x >= 0.
// Bland's rule, so it cannot cycle.
enum class Relation { LessEq, GreaterEq, Equal };

struct LpConstraint {
  std::vector<double> coeffs;
  Relation relation = Relation::LessEq;
  double rhs = 0.0;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> solution;
};

LpResult solve_lp(const std::vector<double>& objective,
                  const std::vector<LpConstraint>& constraints);

}  // namespace d2dsim
