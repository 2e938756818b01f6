#include "d2dsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace d2dsim {

std::vector<std::vector<Activation>> enumerate_activation_sets(
    const Topology& topo, const std::vector<FlowSpec>& flows,
    Interference model) {
  std::vector<Activation> candidates;
  for (const Link& l : topo.links)
    for (const FlowSpec& f : flows) candidates.push_back({l.src, l.dst, f.id});
  std::sort(candidates.begin(), candidates.end());
  if (candidates.size() > 20)
    throw std::invalid_argument(
        "enumerate_activation_sets: instance above the 20-candidate limit");

  std::vector<std::vector<Activation>> sets;
  const std::uint32_t n_subsets = 1u << candidates.size();
  for (std::uint32_t mask = 1; mask < n_subsets; ++mask) {
    std::vector<Activation> subset;
    for (size_t i = 0; i < candidates.size(); ++i)
      if (mask & (1u << i)) subset.push_back(candidates[i]);
    if (activation_set_feasible(subset, model)) sets.push_back(std::move(subset));
  }
  return sets;
}

namespace {

struct StaticLp {
  // Variable layout: [x_s]*n_flows, [alpha_A]*n_sets, [f_t]*n_triples.
  int n_flows = 0;
  int n_sets = 0;
  int n_triples = 0;
  std::vector<Activation> triples;
  std::vector<LpConstraint> constraints;

  int x_var(int s) const { return s; }
  int alpha_var(int a) const { return n_flows + a; }
  int f_var(int t) const { return n_flows + n_sets + t; }
  int n_vars() const { return n_flows + n_sets + n_triples; }
};

StaticLp build_static_lp(const Topology& topo,
                         const std::vector<DeviceProfile>& profiles,
                         const std::vector<FlowSpec>& flows,
                         Interference model) {
  StaticLp lp;
  auto sets = enumerate_activation_sets(topo, flows, model);
  lp.n_flows = static_cast<int>(flows.size());
  lp.n_sets = static_cast<int>(sets.size());
  for (const Link& l : topo.links)
    for (const FlowSpec& f : flows) lp.triples.push_back({l.src, l.dst, f.id});
  lp.n_triples = static_cast<int>(lp.triples.size());

  std::map<Activation, int> triple_index;
  for (int t = 0; t < lp.n_triples; ++t) triple_index[lp.triples[t]] = t;

  auto zero_row = [&] { return std::vector<double>(lp.n_vars(), 0.0); };

  // Transfer capacity: f_t <= sum over sets containing t of
  // alpha_A * min(link rate, receiver capability).
  for (int t = 0; t < lp.n_triples; ++t) {
    const Activation& act = lp.triples[t];
    int li = topo.link_index(act.src, act.dst);
    double unit = std::min(topo.links[li].rate,
                           effective_capability(profiles[act.dst]));
    LpConstraint c;
    c.coeffs = zero_row();
    c.coeffs[lp.f_var(t)] = 1.0;
    for (int a = 0; a < lp.n_sets; ++a)
      if (std::find(sets[a].begin(), sets[a].end(), act) != sets[a].end())
        c.coeffs[lp.alpha_var(a)] -= unit;
    c.relation = Relation::LessEq;
    c.rhs = 0.0;
    lp.constraints.push_back(std::move(c));
  }

  // Flow conservation at every non-destination node.
  for (int s = 0; s < lp.n_flows; ++s) {
    for (NodeId i = 0; i < topo.n_nodes; ++i) {
      if (i == flows[s].dest) continue;
      LpConstraint c;
      c.coeffs = zero_row();
      bool touched = false;
      for (int t = 0; t < lp.n_triples; ++t) {
        if (lp.triples[t].flow != flows[s].id) continue;
        if (lp.triples[t].src == i) {
          c.coeffs[lp.f_var(t)] += 1.0;
          touched = true;
        }
        if (lp.triples[t].dst == i) {
          c.coeffs[lp.f_var(t)] -= 1.0;
          touched = true;
        }
      }
      if (i == flows[s].source) {
        c.coeffs[lp.x_var(s)] -= 1.0;
        touched = true;
      }
      if (!touched) continue;
      c.relation = Relation::Equal;
      c.rhs = 0.0;
      lp.constraints.push_back(std::move(c));
    }
  }

  // Device intake caps.
  for (NodeId j = 0; j < topo.n_nodes; ++j) {
    LpConstraint c;
    c.coeffs = zero_row();
    bool touched = false;
    for (int t = 0; t < lp.n_triples; ++t)
      if (lp.triples[t].dst == j) {
        c.coeffs[lp.f_var(t)] = 1.0;
        touched = true;
      }
    if (!touched) continue;
    c.relation = Relation::LessEq;
    c.rhs = effective_capability(profiles[j]);
    lp.constraints.push_back(std::move(c));
  }

  // Time-sharing budget.
  LpConstraint budget;
  budget.coeffs = zero_row();
  for (int a = 0; a < lp.n_sets; ++a) budget.coeffs[lp.alpha_var(a)] = 1.0;
  budget.relation = Relation::LessEq;
  budget.rhs = 1.0;
  lp.constraints.push_back(std::move(budget));
  return lp;
}

// max direction.x over the static polytope; returns the optimal x.
std::vector<double> support_point(const StaticLp& lp,
                                  const std::vector<double>& direction) {
  std::vector<double> obj(lp.n_vars(), 0.0);
  for (int s = 0; s < lp.n_flows; ++s) obj[lp.x_var(s)] = direction[s];
  LpResult res = solve_lp(obj, lp.constraints);
  if (res.status != LpStatus::Optimal)
    throw std::runtime_error("static_optimum: support LP failed");
  std::vector<double> x(lp.n_flows, 0.0);
  for (int s = 0; s < lp.n_flows; ++s) x[s] = res.solution[lp.x_var(s)];
  return x;
}

double utility_sum(const std::vector<FlowSpec>& flows,
                   const std::vector<double>& x) {
  double v = 0.0;
  for (size_t s = 0; s < flows.size(); ++s)
    v += utility_value(flows[s].utility, std::max(x[s], 0.0));
  return v;
}

// Best utility along the segment [a, b] by golden-section on the mix.
std::pair<double, std::vector<double>> best_on_segment(
    const std::vector<FlowSpec>& flows, const std::vector<double>& a,
    const std::vector<double>& b) {
  auto mix = [&](double th) {
    std::vector<double> x(a.size());
    for (size_t i = 0; i < a.size(); ++i) x[i] = a[i] + th * (b[i] - a[i]);
    return x;
  };
  double th = maximize_unimodal(
      [&](double v) { return utility_sum(flows, mix(v)); }, 0.0, 1.0, 1e-12);
  double best_v = utility_sum(flows, mix(th));
  std::vector<double> best_x = mix(th);
  for (double cand : {0.0, 1.0}) {
    double v = utility_sum(flows, mix(cand));
    if (v > best_v) {
      best_v = v;
      best_x = mix(cand);
    }
  }
  return {best_v, best_x};
}

// Recursive support-direction refinement of the 2-flow Pareto frontier.
void frontier_edges(const StaticLp& lp, const std::vector<double>& da,
                    const std::vector<double>& xa,
                    const std::vector<double>& db,
                    const std::vector<double>& xb, int depth,
                    std::vector<std::pair<std::vector<double>, std::vector<double>>>& edges) {
  std::vector<double> mid{da[0] + db[0], da[1] + db[1]};
  double norm = std::hypot(mid[0], mid[1]);
  if (norm < 1e-12 || depth > 40) {
    edges.push_back({xa, xb});
    return;
  }
  mid[0] /= norm;
  mid[1] /= norm;
  std::vector<double> xc = support_point(lp, mid);
  double gain = mid[0] * xc[0] + mid[1] * xc[1] -
                (mid[0] * xa[0] + mid[1] * xa[1]);
  double gain_b = mid[0] * xc[0] + mid[1] * xc[1] -
                  (mid[0] * xb[0] + mid[1] * xb[1]);
  if (gain < 1e-10 && gain_b < 1e-10) {
    edges.push_back({xa, xb});
    return;
  }
  frontier_edges(lp, da, xa, mid, xc, depth + 1, edges);
  frontier_edges(lp, mid, xc, db, xb, depth + 1, edges);
}

}  // namespace

StaticOptimum static_optimum(const Topology& topo,
                             const std::vector<DeviceProfile>& profiles,
                             const std::vector<FlowSpec>& flows,
                             Interference model) {
  if (flows.empty()) throw std::invalid_argument("static_optimum: no flows");
  StaticLp lp = build_static_lp(topo, profiles, flows, model);

  StaticOptimum out;
  out.n_activation_sets = lp.n_sets;

  if (flows.size() == 1) {
    out.x = support_point(lp, {1.0});
    out.value = utility_sum(flows, out.x);
    return out;
  }

  if (flows.size() == 2) {
    // Near-lexicographic supports pin the frontier endpoints.
    std::vector<double> d0{1.0, 1e-7}, d1{1e-7, 1.0};
    std::vector<double> x0 = support_point(lp, d0);
    std::vector<double> x1 = support_point(lp, d1);
    std::vector<std::pair<std::vector<double>, std::vector<double>>> edges;
    frontier_edges(lp, d0, x0, d1, x1, 0, edges);
    out.value = -std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : edges) {
      auto [v, x] = best_on_segment(flows, a, b);
      if (v > out.value) {
        out.value = v;
        out.x = x;
      }
    }
    return out;
  }

  // Three or more flows: successive linearization with a shrinking trust
  // region around the incumbent.
  std::vector<double> x = support_point(lp, std::vector<double>(flows.size(), 1.0));
  double radius = 1.0;
  int iters = 0;
  const int max_iters = 400;
  while (radius > 1e-12 && iters < max_iters) {
    ++iters;
    std::vector<double> grad(flows.size());
    for (size_t s = 0; s < flows.size(); ++s)
      grad[s] = utility_derivative(flows[s].utility, std::max(x[s], 1e-12));
    StaticLp boxed = lp;
    for (size_t s = 0; s < flows.size(); ++s) {
      LpConstraint hi;
      hi.coeffs.assign(lp.n_vars(), 0.0);
      hi.coeffs[lp.x_var(static_cast<int>(s))] = 1.0;
      hi.relation = Relation::LessEq;
      hi.rhs = x[s] + radius;
      boxed.constraints.push_back(hi);
      LpConstraint lo = hi;
      lo.relation = Relation::GreaterEq;
      lo.rhs = std::max(0.0, x[s] - radius);
      boxed.constraints.push_back(lo);
    }
    std::vector<double> cand = support_point(boxed, grad);
    auto [v, best_x] = best_on_segment(flows, x, cand);
    if (v > utility_sum(flows, x) + 1e-15) {
      x = best_x;
    } else {
      radius /= 2.0;
    }
  }
  out.converged = iters < max_iters;
  out.x = x;
  out.value = utility_sum(flows, x);
  return out;
}

namespace {

// Device-centric feasibility LP with a free uniform slack on the demand
// rows. Variable layout: direct[k], then per-pair relay feeds, then local
// carriers (pairs or hyperedges), then margin split m+ / m-.
struct DccLp {
  int n = 0;
  bool broadcast = false;
  std::vector<Hyperedge> hyperedges;
  int n_pairs = 0;

  int direct_var(int k) const { return k; }
  int relay_var(int pair) const { return n + pair; }
  int local_var(int idx) const { return n + n_pairs + idx; }
  int n_locals() const {
    return broadcast ? static_cast<int>(hyperedges.size()) : n_pairs;
  }
  int mpos_var() const { return n + n_pairs + n_locals(); }
  int mneg_var() const { return mpos_var() + 1; }
  int n_vars() const { return mpos_var() + 2; }

  std::vector<std::pair<NodeId, NodeId>> pairs;  // (relay n, device k)
  int pair_index(NodeId rn, NodeId k) const {
    for (int i = 0; i < n_pairs; ++i)
      if (pairs[i].first == rn && pairs[i].second == k) return i;
    return -1;
  }
};

DccLp build_dcc_lp(const RegionSpec& region) {
  DccLp lp;
  lp.n = region.n_devices;
  lp.broadcast = region.mode == RegionMode::DccBroadcast;
  if (lp.broadcast) {
    lp.hyperedges = region.hyperedges;
    if (lp.hyperedges.empty()) {
      DccTopology topo;
      topo.n_devices = lp.n;
      lp.hyperedges = topo.resolved_hyperedges();
    }
  }
  for (NodeId rn = 0; rn < lp.n; ++rn)
    for (NodeId k = 0; k < lp.n; ++k)
      if (rn != k) lp.pairs.emplace_back(rn, k);
  lp.n_pairs = static_cast<int>(lp.pairs.size());
  return lp;
}

std::vector<LpConstraint> dcc_constraints(const DccLp& lp,
                                          const std::vector<double>& rates,
                                          bool with_margin) {
  std::vector<LpConstraint> cons;
  auto zero_row = [&] { return std::vector<double>(lp.n_vars(), 0.0); };

  // Demand: direct + local service >= A_k (+ margin).
  for (NodeId k = 0; k < lp.n; ++k) {
    LpConstraint c;
    c.coeffs = zero_row();
    c.coeffs[lp.direct_var(k)] = 1.0;
    if (lp.broadcast) {
      for (size_t h = 0; h < lp.hyperedges.size(); ++h) {
        const Hyperedge& he = lp.hyperedges[h];
        if (std::count(he.receivers.begin(), he.receivers.end(), k))
          c.coeffs[lp.local_var(static_cast<int>(h))] += 1.0;
      }
    } else {
      for (int p = 0; p < lp.n_pairs; ++p)
        if (lp.pairs[p].second == k) c.coeffs[lp.local_var(p)] += 1.0;
    }
    if (with_margin) {
      c.coeffs[lp.mpos_var()] = -1.0;
      c.coeffs[lp.mneg_var()] = 1.0;
    }
    c.relation = Relation::GreaterEq;
    c.rhs = rates[k];
    cons.push_back(std::move(c));
  }

  // Coupling: the relay's cellular feed covers its local service of k.
  for (int p = 0; p < lp.n_pairs; ++p) {
    auto [rn, k] = lp.pairs[p];
    LpConstraint c;
    c.coeffs = zero_row();
    c.coeffs[lp.relay_var(p)] = 1.0;
    if (lp.broadcast) {
      for (size_t h = 0; h < lp.hyperedges.size(); ++h) {
        const Hyperedge& he = lp.hyperedges[h];
        if (he.sender == rn &&
            std::count(he.receivers.begin(), he.receivers.end(), k))
          c.coeffs[lp.local_var(static_cast<int>(h))] -= 1.0;
      }
    } else {
      c.coeffs[lp.local_var(p)] = -1.0;
    }
    c.relation = Relation::GreaterEq;
    c.rhs = 0.0;
    cons.push_back(std::move(c));
  }

  // Unit budgets: one cellular and one local transmission per slot.
  LpConstraint cellular;
  cellular.coeffs = zero_row();
  for (NodeId k = 0; k < lp.n; ++k) cellular.coeffs[lp.direct_var(k)] = 1.0;
  for (int p = 0; p < lp.n_pairs; ++p) cellular.coeffs[lp.relay_var(p)] = 1.0;
  cellular.relation = Relation::LessEq;
  cellular.rhs = 1.0;
  cons.push_back(std::move(cellular));

  LpConstraint local;
  local.coeffs = zero_row();
  for (int i = 0; i < lp.n_locals(); ++i) local.coeffs[lp.local_var(i)] = 1.0;
  local.relation = Relation::LessEq;
  local.rhs = 1.0;
  cons.push_back(std::move(local));
  return cons;
}

RegionResult classify(double margin) {
  RegionResult r;
  r.margin = margin;
  if (margin > 1e-9) r.membership = Membership::Interior;
  else if (margin < -1e-9) r.membership = Membership::Exterior;
  else r.membership = Membership::Boundary;
  return r;
}

// dars_static: largest uniform slack m with (x + m) supportable by the
// static time-sharing polytope.
RegionResult dars_static_membership(const RegionSpec& region,
                                    const std::vector<double>& rates) {
  StaticLp lp = build_static_lp(region.topology, region.profiles, region.flows,
                                region.interference);
  // Append m+ / m- and pin x_s == rates[s] + m.
  int base = lp.n_vars();
  std::vector<LpConstraint> cons;
  for (LpConstraint c : lp.constraints) {
    c.coeffs.resize(base + 2, 0.0);
    cons.push_back(std::move(c));
  }
  for (int s = 0; s < lp.n_flows; ++s) {
    LpConstraint c;
    c.coeffs.assign(base + 2, 0.0);
    c.coeffs[lp.x_var(s)] = 1.0;
    c.coeffs[base] = -1.0;
    c.coeffs[base + 1] = 1.0;
    c.relation = Relation::Equal;
    c.rhs = rates[s];
    cons.push_back(std::move(c));
  }
  std::vector<double> obj(base + 2, 0.0);
  obj[base] = 1.0;
  obj[base + 1] = -1.0;
  LpResult res = solve_lp(obj, cons);
  if (res.status != LpStatus::Optimal)
    return classify(-std::numeric_limits<double>::infinity());
  return classify(res.value);
}

}  // namespace

RegionResult region_membership(const RegionSpec& region,
                               const std::vector<double>& rates) {
  if (region.mode == RegionMode::DarsStatic)
    return dars_static_membership(region, rates);

  if (static_cast<int>(rates.size()) != region.n_devices)
    throw std::invalid_argument("region_membership: rate vector size mismatch");
  DccLp lp = build_dcc_lp(region);
  std::vector<LpConstraint> cons = dcc_constraints(lp, rates, true);
  std::vector<double> obj(lp.n_vars(), 0.0);
  obj[lp.mpos_var()] = 1.0;
  obj[lp.mneg_var()] = -1.0;
  LpResult res = solve_lp(obj, cons);
  if (res.status != LpStatus::Optimal)
    throw std::runtime_error("region_membership: LP failed");
  return classify(res.value);
}

double boundary_scale(const RegionSpec& region,
                      const std::vector<double>& direction) {
  double sum = 0.0;
  for (double d : direction) sum += d;
  if (sum <= 0.0)
    throw std::invalid_argument("boundary_scale: direction must be nonzero");
  double lo = 0.0, hi = 1.0;
  auto margin_at = [&](double c) {
    std::vector<double> r(direction.size());
    for (size_t i = 0; i < direction.size(); ++i) r[i] = c * direction[i];
    return region_membership(region, r).margin;
  };
  while (margin_at(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 100; ++it) {
    double mid = (lo + hi) / 2.0;
    if (margin_at(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return (lo + hi) / 2.0;
}

StaticOptimum dcc_static_optimum(const RegionSpec& region,
                                 const std::vector<UtilitySpec>& utilities,
                                 double r_k_max) {
  const int n = region.n_devices;
  if (static_cast<int>(utilities.size()) != n)
    throw std::invalid_argument("dcc_static_optimum: utility count mismatch");
  DccLp lp = build_dcc_lp(region);

  // Variables: the feasibility block plus explicit y_k admitted rates.
  // Demand rows become direct + local >= y_k; margin columns stay unused.
  int y_base = lp.n_vars();
  auto widen = [&](std::vector<LpConstraint> cons) {
    for (LpConstraint& c : cons) c.coeffs.resize(y_base + n, 0.0);
    return cons;
  };
  std::vector<LpConstraint> base =
      widen(dcc_constraints(lp, std::vector<double>(n, 0.0), false));
  for (int k = 0; k < n; ++k) {
    base[k].coeffs[y_base + k] = -1.0;  // direct + local - y_k >= 0
    base[k].rhs = 0.0;
    LpConstraint cap;
    cap.coeffs.assign(y_base + n, 0.0);
    cap.coeffs[y_base + k] = 1.0;
    cap.relation = Relation::LessEq;
    cap.rhs = r_k_max;
    base.push_back(std::move(cap));
  }

  auto support = [&](const std::vector<double>& grad,
                     const std::vector<LpConstraint>& cons) {
    std::vector<double> obj(y_base + n, 0.0);
    for (int k = 0; k < n; ++k) obj[y_base + k] = grad[k];
    LpResult res = solve_lp(obj, cons);
    if (res.status != LpStatus::Optimal)
      throw std::runtime_error("dcc_static_optimum: LP failed");
    std::vector<double> y(n);
    for (int k = 0; k < n; ++k) y[k] = res.solution[y_base + k];
    return y;
  };

  auto value_at = [&](const std::vector<double>& y) {
    double v = 0.0;
    for (int k = 0; k < n; ++k)
      v += utility_value(utilities[k], std::max(y[k], 0.0));
    return v;
  };

  std::vector<double> y = support(std::vector<double>(n, 1.0), base);
  double radius = r_k_max;
  int iters = 0;
  const int max_iters = 600;
  while (radius > 1e-13 && iters < max_iters) {
    ++iters;
    std::vector<double> grad(n);
    for (int k = 0; k < n; ++k)
      grad[k] = utility_derivative(utilities[k], std::max(y[k], 1e-12));
    std::vector<LpConstraint> boxed = base;
    for (int k = 0; k < n; ++k) {
      LpConstraint hi;
      hi.coeffs.assign(y_base + n, 0.0);
      hi.coeffs[y_base + k] = 1.0;
      hi.relation = Relation::LessEq;
      hi.rhs = y[k] + radius;
      boxed.push_back(hi);
      LpConstraint lo = hi;
      lo.relation = Relation::GreaterEq;
      lo.rhs = std::max(0.0, y[k] - radius);
      boxed.push_back(lo);
    }
    std::vector<double> cand = support(grad, boxed);
    // Exact 1-D refinement toward the candidate.
    auto mix = [&](double th) {
      std::vector<double> m(n);
      for (int k = 0; k < n; ++k) m[k] = y[k] + th * (cand[k] - y[k]);
      return m;
    };
    double th = maximize_unimodal(
        [&](double v) { return value_at(mix(v)); }, 0.0, 1.0, 1e-13);
    std::vector<double> next = mix(th);
    if (value_at(next) > value_at(y) + 1e-16) {
      y = next;
    } else {
      radius /= 2.0;
    }
  }

  StaticOptimum out;
  out.x = y;
  out.value = value_at(y);
  out.converged = iters < max_iters;
  out.n_activation_sets = 0;
  return out;
}

}  // namespace d2dsim
