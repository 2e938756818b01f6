#include "d2dsim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace d2dsim {

Interference interference_from_string(const std::string& s) {
  if (s == "node_exclusive") return Interference::NodeExclusive;
  if (s == "pipeline") return Interference::Pipeline;
  throw std::invalid_argument("unknown interference model: " + s);
}

std::string to_string(Interference m) {
  return m == Interference::NodeExclusive ? "node_exclusive" : "pipeline";
}

bool activation_set_feasible(const std::vector<Activation>& acts,
                             Interference model) {
  std::vector<NodeId> senders, receivers;
  for (const Activation& a : acts) {
    if (a.src == a.dst) return false;
    senders.push_back(a.src);
    receivers.push_back(a.dst);
  }
  auto has_dup = [](std::vector<NodeId> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
  };
  if (has_dup(senders) || has_dup(receivers)) return false;
  if (model == Interference::NodeExclusive) {
    // No node on both sides either.
    for (const Activation& a : acts)
      for (const Activation& b : acts)
        if (a.src == b.dst) return false;
  }
  return true;
}

ValidationReport DarsParams::validate(
    const Topology& topo, const std::vector<DeviceProfile>& profiles) const {
  ValidationReport rep;
  if (big_m <= 0.0) rep.violations.push_back("policy M must be positive");
  if (r_max <= 0.0) rep.violations.push_back("policy R_max must be positive");
  double limit = 0.0;
  for (const Link& l : topo.links) limit = std::max(limit, l.rate);
  for (const DeviceProfile& p : profiles)
    limit = std::max(limit, effective_capability(p));
  if (f_max < limit)
    rep.violations.push_back(
        "policy F_max below a physical limit; it must dominate every link "
        "rate and device capability");
  return rep;
}

double maximize_unimodal(const std::function<double(double)>& f, double lo,
                         double hi, double x_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

double rate_control_golden(double source_backlog, const DarsParams& params,
                           const UtilitySpec& utility) {
  auto objective = [&](double x) {
    return params.big_m * utility_value(utility, x) - source_backlog * x;
  };
  // Guard the lower endpoint: alpha-fair with alpha > 1 diverges at 0, and
  // the optimum is interior there anyway.
  double lo = 0.0;
  if (utility.kind == UtilityKind::AlphaFair && utility.alpha > 1.0)
    lo = std::min(1e-12, params.r_max / 2.0);
  double x = maximize_unimodal(objective, lo, params.r_max, 1e-9);
  // Snap to an endpoint when it does at least as well.
  double best = x, best_v = objective(x);
  if (objective(params.r_max) >= best_v) {
    best_v = objective(params.r_max);
    best = params.r_max;
  }
  if (utility.kind != UtilityKind::AlphaFair || utility.alpha < 1.0) {
    if (objective(0.0) >= best_v) best = 0.0;
  }
  return best;
}

double dars_rate_control(double source_backlog, const DarsParams& params,
                         const UtilitySpec& utility) {
  if (source_backlog <= 0.0) return params.r_max;
  if (utility.kind == UtilityKind::Log1p) {
    // d/dx [M w ln(1+x) - U x] = 0  =>  x = M w / U - 1
    double x = params.big_m * utility.weight / source_backlog - 1.0;
    return std::clamp(x, 0.0, params.r_max);
  }
  return rate_control_golden(source_backlog, params, utility);
}

namespace {

struct Candidate {
  Activation act;
  double weight = 0.0;
};

// Compatibility of one activation against an in-progress set, by model.
struct FeasibilityTracker {
  Interference model;
  std::vector<bool> busy;       // node used at all (NodeExclusive)
  std::vector<bool> sending;    // node sends (Pipeline)
  std::vector<bool> receiving;  // node receives (Pipeline)

  FeasibilityTracker(int n_nodes, Interference m)
      : model(m), busy(n_nodes, false), sending(n_nodes, false),
        receiving(n_nodes, false) {}

  bool fits(const Activation& a) const {
    if (model == Interference::NodeExclusive)
      return !busy[a.src] && !busy[a.dst];
    return !sending[a.src] && !receiving[a.dst];
  }
  void add(const Activation& a) {
    busy[a.src] = busy[a.dst] = true;
    sending[a.src] = true;
    receiving[a.dst] = true;
  }
  void remove(const Activation& a) {
    busy[a.src] = busy[a.dst] = false;
    sending[a.src] = false;
    receiving[a.dst] = false;
  }
};

// Exact max-weight search over feasible subsets of the positive-weight
// candidates. Candidates arrive sorted lexicographically; include-first
// depth-first order plus strict improvement makes the first maximizer the
// lexicographically smallest one, which fixes the tie-break.
struct ExactSearch {
  const std::vector<Candidate>& cands;
  std::vector<double> suffix_weight;
  FeasibilityTracker tracker;
  std::vector<Activation> current, best;
  double current_weight = 0.0;
  double best_weight = 0.0;

  ExactSearch(const std::vector<Candidate>& c, int n_nodes, Interference m)
      : cands(c), tracker(n_nodes, m) {
    suffix_weight.assign(cands.size() + 1, 0.0);
    for (size_t i = cands.size(); i-- > 0;)
      suffix_weight[i] = suffix_weight[i + 1] + cands[i].weight;
  }

  void run(size_t i) {
    if (current_weight + suffix_weight[i] < best_weight) return;  // bound
    if (i == cands.size()) {
      if (current_weight > best_weight) {
        best_weight = current_weight;
        best = current;
      }
      return;
    }
    const Candidate& c = cands[i];
    if (tracker.fits(c.act)) {
      tracker.add(c.act);
      current.push_back(c.act);
      current_weight += c.weight;
      run(i + 1);
      current_weight -= c.weight;
      current.pop_back();
      tracker.remove(c.act);
    }
    run(i + 1);
  }
};

std::vector<Activation> max_weight_schedule(
    const Topology& topo, const std::vector<FlowSpec>& flows,
    Interference model,
    const std::function<double(const Link&, const FlowSpec&)>& weight_fn) {
  std::vector<Candidate> cands;
  for (const Link& l : topo.links) {
    for (const FlowSpec& f : flows) {
      double w = weight_fn(l, f);
      if (w > 0.0) cands.push_back({{l.src, l.dst, f.id}, w});
    }
  }
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.act < b.act; });

  if (topo.links.size() <= 12) {
    ExactSearch search(cands, topo.n_nodes, model);
    search.run(0);
    return search.best;
  }

  // Greedy fallback: descending weight, lexicographic within equal weight.
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.weight > b.weight;
                   });
  FeasibilityTracker tracker(topo.n_nodes, model);
  std::vector<Activation> chosen;
  for (const Candidate& c : cands) {
    if (!tracker.fits(c.act)) continue;
    tracker.add(c.act);
    chosen.push_back(c.act);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

std::vector<Activation> dars_schedule(const QueueState& queues,
                                      const Topology& topo,
                                      const std::vector<DeviceProfile>& profiles,
                                      const std::vector<FlowSpec>& flows,
                                      Interference model) {
  return max_weight_schedule(
      topo, flows, model, [&](const Link& l, const FlowSpec& f) {
        double diff = static_cast<double>(queues.backlog(l.src, f.id)) -
                      static_cast<double>(queues.backlog(l.dst, f.id));
        return effective_capability(profiles[l.dst]) * diff;
      });
}

std::vector<Activation> backpressure_schedule(const QueueState& queues,
                                              const Topology& topo,
                                              const std::vector<FlowSpec>& flows,
                                              Interference model) {
  return max_weight_schedule(
      topo, flows, model, [&](const Link& l, const FlowSpec& f) {
        double diff = static_cast<double>(queues.backlog(l.src, f.id)) -
                      static_cast<double>(queues.backlog(l.dst, f.id));
        return l.rate * diff;
      });
}

EqualSplitPolicy::EqualSplitPolicy(const Topology& topo,
                                   const std::vector<FlowSpec>& flows) {
  if (flows.empty()) throw std::invalid_argument("equal_split: no flows");
  if (topo.out_links(flows[0].source).size() < 2)
    throw std::invalid_argument(
        "equal_split requires a source with at least two outgoing links");
}

std::vector<Activation> EqualSplitPolicy::schedule(
    const QueueState& queues, const Topology& topo,
    const std::vector<FlowSpec>& flows, Interference model,
    std::uint64_t slot) const {
  NodeId source = flows[0].source;
  std::vector<int> outs = topo.out_links(source);
  std::sort(outs.begin(), outs.end(), [&](int a, int b) {
    return topo.links[a].dst < topo.links[b].dst;
  });
  const Link& pick = topo.links[outs[slot % outs.size()]];

  // Flow with the largest backlog at the sender rides each activation.
  auto flow_for = [&](NodeId src) {
    FlowId best = flows[0].id;
    std::int64_t best_backlog = -1;
    for (const FlowSpec& f : flows) {
      std::int64_t b = queues.backlog(src, f.id);
      if (b > best_backlog) {
        best_backlog = b;
        best = f.id;
      }
    }
    return best;
  };

  std::vector<Activation> acts{{pick.src, pick.dst, flow_for(pick.src)}};
  FeasibilityTracker tracker(topo.n_nodes, model);
  tracker.add(acts[0]);

  std::vector<const Link*> rest;
  for (const Link& l : topo.links)
    if (l.src != source) rest.push_back(&l);
  std::sort(rest.begin(), rest.end(), [](const Link* a, const Link* b) {
    return std::pair(a->src, a->dst) < std::pair(b->src, b->dst);
  });
  for (const Link* l : rest) {
    Activation a{l->src, l->dst, flow_for(l->src)};
    if (!tracker.fits(a)) continue;
    tracker.add(a);
    acts.push_back(a);
  }
  std::sort(acts.begin(), acts.end());
  return acts;
}

std::vector<NodeId> line_order(const Topology& topo) {
  if (topo.links.size() + 1 != static_cast<size_t>(topo.n_nodes)) return {};
  std::vector<int> out_deg(topo.n_nodes, 0), in_deg(topo.n_nodes, 0);
  for (const Link& l : topo.links) {
    if (l.src == l.dst) return {};
    ++out_deg[l.src];
    ++in_deg[l.dst];
  }
  NodeId head = -1;
  for (NodeId n = 0; n < topo.n_nodes; ++n) {
    if (out_deg[n] > 1 || in_deg[n] > 1) return {};
    if (in_deg[n] == 0) {
      if (head != -1) return {};
      head = n;
    }
  }
  if (head == -1) return {};
  std::vector<NodeId> order{head};
  NodeId cur = head;
  while (true) {
    NodeId next = -1;
    for (const Link& l : topo.links)
      if (l.src == cur) next = l.dst;
    if (next == -1) break;
    order.push_back(next);
    cur = next;
  }
  if (order.size() != static_cast<size_t>(topo.n_nodes)) return {};
  return order;
}

ReceiveForwardPolicy::ReceiveForwardPolicy(const Topology& topo,
                                           const std::vector<FlowSpec>& flows,
                                           Interference model) {
  std::vector<NodeId> order = line_order(topo);
  if (order.empty())
    throw std::invalid_argument("receive_forward requires a line topology");
  if (flows.size() != 1 || flows[0].source != order.front() ||
      flows[0].dest != order.back())
    throw std::invalid_argument(
        "receive_forward requires one flow spanning the line");
  if (model != Interference::Pipeline)
    throw std::invalid_argument(
        "receive_forward activates every hop each slot; configure "
        "interference=pipeline");
}

std::vector<Activation> ReceiveForwardPolicy::schedule(
    const QueueState&, const Topology& topo,
    const std::vector<FlowSpec>& flows) const {
  std::vector<Activation> acts;
  for (const Link& l : topo.links) acts.push_back({l.src, l.dst, flows[0].id});
  std::sort(acts.begin(), acts.end());
  return acts;
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "dars") return PolicyKind::Dars;
  if (name == "backpressure") return PolicyKind::Backpressure;
  if (name == "equal_split") return PolicyKind::EqualSplit;
  if (name == "receive_forward") return PolicyKind::ReceiveForward;
  throw std::invalid_argument("unknown policy: " + name);
}

std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Dars: return "dars";
    case PolicyKind::Backpressure: return "backpressure";
    case PolicyKind::EqualSplit: return "equal_split";
    case PolicyKind::ReceiveForward: return "receive_forward";
  }
  return "?";
}

}  // namespace d2dsim
