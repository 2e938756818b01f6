#include "d2dsim/dcc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "d2dsim/policies.hpp"

namespace d2dsim {

std::vector<std::pair<NodeId, NodeId>> DccTopology::resolved_local_links() const {
  if (!local_links.empty()) return local_links;
  std::vector<std::pair<NodeId, NodeId>> all;
  for (NodeId n = 0; n < n_devices; ++n)
    for (NodeId k = 0; k < n_devices; ++k)
      if (n != k) all.emplace_back(n, k);
  return all;
}

std::vector<Hyperedge> DccTopology::resolved_hyperedges() const {
  if (!hyperedges.empty()) return hyperedges;
  if (n_devices > 6)
    throw std::invalid_argument(
        "broadcast with more than 6 devices needs an explicit hyperedge list");
  std::vector<Hyperedge> all;
  for (NodeId n = 0; n < n_devices; ++n) {
    std::vector<NodeId> others;
    for (NodeId k = 0; k < n_devices; ++k)
      if (k != n) others.push_back(k);
    int subsets = 1 << others.size();
    for (int mask = 1; mask < subsets; ++mask) {
      Hyperedge h;
      h.sender = n;
      for (size_t i = 0; i < others.size(); ++i)
        if (mask & (1 << i)) h.receivers.push_back(others[i]);
      all.push_back(std::move(h));
    }
  }
  return all;
}

double DccState::total() const {
  double sum = 0.0;
  for (double v : lambda) sum += v;
  for (double v : eta) sum += v;
  for (double v : q) sum += v;
  return sum;
}

double dcc_flow_control(double lambda_k, const DccParams& params,
                        const UtilitySpec& utility) {
  DarsParams as_rate{params.big_m, params.r_k_max, 0.0};
  return dars_rate_control(lambda_k, as_rate, utility);
}

void dcc_cellular_schedule(const DccState& state, DccDecision& decision) {
  double best = 0.0;
  int best_direct = -1;
  std::pair<NodeId, NodeId> best_relay{-1, -1};
  for (NodeId k = 0; k < state.n_devices; ++k) {
    if (state.lambda[k] > best) {
      best = state.lambda[k];
      best_direct = k;
      best_relay = {-1, -1};
    }
  }
  for (NodeId n = 0; n < state.n_devices; ++n) {
    for (NodeId k = 0; k < state.n_devices; ++k) {
      if (n == k) continue;
      double w = state.eta_at(n, k) - state.q_at(n, k);
      if (w > best) {
        best = w;
        best_direct = -1;
        best_relay = {n, k};
      }
    }
  }
  if (best_direct >= 0) {
    decision.cellular_direct = true;
    decision.cellular_device = best_direct;
  } else if (best_relay.first >= 0) {
    decision.cellular_relay = true;
    decision.relay_node = best_relay.first;
    decision.relay_for = best_relay.second;
  }
}

void dcc_local_schedule_unicast(
    const DccState& state,
    const std::vector<std::pair<NodeId, NodeId>>& local_links,
    DccDecision& decision) {
  double best = 0.0;
  std::pair<NodeId, NodeId> pick{-1, -1};
  for (const auto& [n, k] : local_links) {
    double w = state.lambda[k] - state.eta_at(n, k) + state.q_at(n, k);
    if (w > best) {
      best = w;
      pick = {n, k};
    }
  }
  if (pick.first >= 0) {
    decision.local_active = true;
    decision.local_relay = pick.first;
    decision.local_device = pick.second;
  }
}

void dcc_local_schedule_broadcast(const DccState& state,
                                  const std::vector<Hyperedge>& hyperedges,
                                  DccDecision& decision) {
  double best = 0.0;
  int pick = -1;
  for (size_t i = 0; i < hyperedges.size(); ++i) {
    const Hyperedge& h = hyperedges[i];
    double w = 0.0;
    for (NodeId k : h.receivers)
      w += state.lambda[k] - state.eta_at(h.sender, k) + state.q_at(h.sender, k);
    if (w > best) {
      best = w;
      pick = static_cast<int>(i);
    }
  }
  if (pick >= 0) {
    decision.local_active = true;
    decision.hyperedge = pick;
    decision.local_relay = hyperedges[pick].sender;
  }
}

namespace {

double g_direct(const DccDecision& d, NodeId k) {
  return (d.cellular_direct && d.cellular_device == k) ? 1.0 : 0.0;
}

double g_relay(const DccDecision& d, NodeId n, NodeId k) {
  return (d.cellular_relay && d.relay_node == n && d.relay_for == k) ? 1.0 : 0.0;
}

// g_{k,n}^k: local service of flow k through relay n.
double g_local(const DccDecision& d, const std::vector<Hyperedge>& hyperedges,
               NodeId n, NodeId k) {
  if (!d.local_active) return 0.0;
  if (d.hyperedge >= 0) {
    const Hyperedge& h = hyperedges[d.hyperedge];
    if (h.sender != n) return 0.0;
    return std::count(h.receivers.begin(), h.receivers.end(), k) ? 1.0 : 0.0;
  }
  return (d.local_relay == n && d.local_device == k) ? 1.0 : 0.0;
}

}  // namespace

double dcc_x(const DccDecision& d, const DccParams& params, NodeId n, NodeId k) {
  return std::max(g_relay(d, n, k) - params.beta, 0.0);
}

double dcc_h(const DccDecision& d, const std::vector<Hyperedge>& hyperedges,
             NodeId n, NodeId k) {
  return g_local(d, hyperedges, n, k);
}

DccState dcc_update_queues(const DccState& state, const DccDecision& decision,
                           const std::vector<double>& y,
                           const DccParams& params,
                           const std::vector<Hyperedge>& hyperedges) {
  DccState next = state;
  for (NodeId k = 0; k < state.n_devices; ++k) {
    double service = g_direct(decision, k);
    for (NodeId n = 0; n < state.n_devices; ++n)
      if (n != k) service += g_local(decision, hyperedges, n, k);
    next.lambda[k] = std::max(state.lambda[k] - service, 0.0) + y[k];
  }
  for (NodeId n = 0; n < state.n_devices; ++n) {
    for (NodeId k = 0; k < state.n_devices; ++k) {
      if (n == k) continue;
      double local = g_local(decision, hyperedges, n, k);
      next.eta_at(n, k) =
          std::max(state.eta_at(n, k) - g_relay(decision, n, k), 0.0) + local;
      next.q_at(n, k) = std::max(state.q_at(n, k) - dcc_h(decision, hyperedges, n, k), 0.0) +
                        dcc_x(decision, params, n, k);
    }
  }
  return next;
}

DccReport dcc_run_check(const DccRunConfig& config) {
  const int n = config.topology.n_devices;
  if (n <= 0) throw std::invalid_argument("dcc: no devices");
  if (config.warmup >= config.horizon && config.horizon > 0)
    throw std::invalid_argument("dcc: warmup must be below horizon");
  if (config.params.beta <= 0.0)
    throw std::invalid_argument("dcc: beta must be positive");

  std::vector<UtilitySpec> utilities = config.utilities;
  utilities.resize(n);
  std::vector<ArrivalProcess> arrivals = config.arrivals;
  if (config.params.arrival_mode == DccArrivalMode::Exogenous &&
      arrivals.size() != static_cast<size_t>(n))
    throw std::invalid_argument("dcc: exogenous mode needs one arrival process per device");

  auto local_links = config.topology.resolved_local_links();
  std::vector<Hyperedge> hyperedges;
  if (config.params.mode == DccMode::Broadcast)
    hyperedges = config.topology.resolved_hyperedges();

  RngStream arrival_rng(config.seed, mix64(0xA881 + config.stream));
  DccState state(n);
  std::vector<double> y(n, 0.0);

  DccReport report;
  report.avg_admitted.assign(n, 0.0);
  double sum_backlog = 0.0, sum_utility = 0.0;
  double sum_q2 = 0.0, sum_q1 = 0.0;  // window sums for the growth ratio
  std::uint64_t n_q2 = 0, n_q1 = 0;
  std::uint64_t measured = 0;
  std::uint64_t digest = 0xcbf29ce484222325ULL;
  auto hash_mix = [&digest](std::uint64_t v) {
    digest ^= v;
    digest *= 0x100000001b3ULL;
  };

  for (std::uint64_t t = 0; t < config.horizon; ++t) {
    for (NodeId k = 0; k < n; ++k) {
      if (config.params.arrival_mode == DccArrivalMode::Exogenous)
        y[k] = static_cast<double>(sample_arrivals(arrivals[k], arrival_rng, t));
      else
        y[k] = dcc_flow_control(state.lambda[k], config.params, utilities[k]);
    }

    DccDecision decision;
    dcc_cellular_schedule(state, decision);
    if (config.params.mode == DccMode::Unicast)
      dcc_local_schedule_unicast(state, local_links, decision);
    else
      dcc_local_schedule_broadcast(state, hyperedges, decision);

    double backlog = state.total();
    if (t >= config.warmup) {
      sum_backlog += backlog;
      double u = 0.0;
      for (NodeId k = 0; k < n; ++k) {
        u += utility_value(utilities[k], y[k]);
        report.avg_admitted[k] += y[k];
      }
      sum_utility += u;
      ++measured;
    }
    if (t >= config.horizon / 2) {
      sum_q2 += backlog;
      ++n_q2;
    } else if (t >= config.horizon / 4) {
      sum_q1 += backlog;
      ++n_q1;
    }

    hash_mix(t);
    for (NodeId k = 0; k < n; ++k) {
      hash_mix(static_cast<std::uint64_t>(std::llround(y[k] * 1e9)));
      hash_mix(static_cast<std::uint64_t>(std::llround(state.lambda[k] * 1e9)));
    }
    hash_mix(decision.cellular_direct ? decision.cellular_device + 1 : 0);
    hash_mix(decision.cellular_relay
                 ? (decision.relay_node + 1) * 64 + decision.relay_for + 1
                 : 0);
    hash_mix(decision.local_active
                 ? (decision.hyperedge >= 0
                        ? 0x10000 + decision.hyperedge
                        : (decision.local_relay + 1) * 64 + decision.local_device + 1)
                 : 0);

    state = dcc_update_queues(state, decision, y, config.params, hyperedges);
  }

  if (measured > 0) {
    report.avg_total_backlog = sum_backlog / static_cast<double>(measured);
    report.avg_utility = sum_utility / static_cast<double>(measured);
    for (NodeId k = 0; k < n; ++k)
      report.avg_admitted[k] /= static_cast<double>(measured);
  }
  double a1 = n_q1 ? sum_q1 / static_cast<double>(n_q1) : 0.0;
  double a2 = n_q2 ? sum_q2 / static_cast<double>(n_q2) : 0.0;
  report.growth_ratio = a1 > 0.0 ? a2 / a1 : (a2 > 0.0 ? 1e9 : 1.0);
  report.digest = digest;
  return report;
}

DccMode dcc_mode_from_string(const std::string& s) {
  if (s == "unicast") return DccMode::Unicast;
  if (s == "broadcast") return DccMode::Broadcast;
  throw std::invalid_argument("unknown dcc mode: " + s);
}

DccArrivalMode dcc_arrival_mode_from_string(const std::string& s) {
  if (s == "exogenous") return DccArrivalMode::Exogenous;
  if (s == "flow_control") return DccArrivalMode::FlowControl;
  throw std::invalid_argument("unknown dcc arrival mode: " + s);
}

}  // namespace d2dsim
