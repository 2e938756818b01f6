#include "d2dsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace d2dsim {

ValidationReport SimConfig::validate() const {
  ValidationReport rep = validate_topology(topology, profiles, flows);
  ValidationReport prep = params.validate(topology, profiles);
  rep.violations.insert(rep.violations.end(), prep.violations.begin(),
                        prep.violations.end());
  if (warmup >= horizon && horizon > 0)
    rep.violations.push_back("warmup must be below horizon");
  return rep;
}

namespace {

std::uint64_t record_words(Fnv1a& h, const TraceRecord& r) {
  h.mix(r.slot);
  for (std::int64_t a : r.admitted) h.mix(static_cast<std::uint64_t>(a));
  h.mix(r.activations.size());
  for (const Activation& a : r.activations) {
    h.mix(static_cast<std::uint64_t>(a.src));
    h.mix(static_cast<std::uint64_t>(a.dst));
    h.mix(static_cast<std::uint64_t>(a.flow));
  }
  for (std::int64_t d : r.delivered) h.mix(static_cast<std::uint64_t>(d));
  h.mix(static_cast<std::uint64_t>(r.total_backlog));
  return h.state;
}

}  // namespace

std::uint64_t trace_digest(const Trace& trace) {
  Fnv1a h;
  for (const TraceRecord& r : trace.records) record_words(h, r);
  return h.state;
}

void assert_activations_feasible(const std::vector<Activation>& acts,
                                 Interference model, PolicyKind policy,
                                 std::uint64_t slot) {
  if (activation_set_feasible(acts, model)) return;
  std::ostringstream os;
  os << "policy " << to_string(policy) << " returned an activation set outside "
     << to_string(model) << " at slot " << slot << ":";
  for (const Activation& a : acts)
    os << " (" << a.src << "," << a.dst << ",f" << a.flow << ")";
  throw std::runtime_error(os.str());
}

RunResult run_simulation(const SimConfig& config) {
  ValidationReport rep = config.validate();
  if (!rep.ok())
    throw std::invalid_argument("invalid config: " + rep.to_string());

  const int n_nodes = config.topology.n_nodes;
  const int n_flows = static_cast<int>(config.flows.size());

  // Policies with per-run state construct (and precondition-check) here.
  std::optional<EqualSplitPolicy> equal_split;
  std::optional<ReceiveForwardPolicy> receive_forward;
  if (config.policy == PolicyKind::EqualSplit)
    equal_split.emplace(config.topology, config.flows);
  if (config.policy == PolicyKind::ReceiveForward)
    receive_forward.emplace(config.topology, config.flows, config.interference);

  RngStream loss_rng(config.seed, mix64(0x105 + config.stream * 16 + 1));

  QueueState queues(n_nodes, n_flows);
  std::vector<CarryAccumulator> link_carry(config.topology.links.size());
  std::vector<CarryAccumulator> cap_carry(n_nodes);

  RunResult result;
  result.trace.records.reserve(config.horizon);

  Metrics& m = result.metrics;
  m.goodput.assign(n_flows, 0.0);

  auto scheduled_packets = static_cast<std::int64_t>(std::floor(config.params.f_max));

  for (std::uint64_t t = 0; t < config.horizon; ++t) {
    TraceRecord rec;
    rec.slot = t;
    rec.admitted.assign(n_flows, 0);
    rec.delivered.assign(n_flows, 0);

    // Rate control from beginning-of-slot backlog. The max-weight policies
    // admit through the queue-priced controller; the fixed baselines admit
    // at the cap.
    std::vector<std::int64_t> admitted(n_flows, 0);
    for (int s = 0; s < n_flows; ++s) {
      const FlowSpec& flow = config.flows[s];
      double x;
      if (config.policy == PolicyKind::Dars ||
          config.policy == PolicyKind::Backpressure)
        x = dars_rate_control(
            static_cast<double>(queues.backlog(flow.source, flow.id)),
            config.params, flow.utility);
      else
        x = config.params.r_max;
      admitted[s] = queues.admit_carry(flow.source, flow.id).take(x);
    }

    // Schedule from the same beginning-of-slot snapshot.
    std::vector<Activation> acts;
    switch (config.policy) {
      case PolicyKind::Dars:
        acts = dars_schedule(queues, config.topology, config.profiles,
                             config.flows, config.interference);
        break;
      case PolicyKind::Backpressure:
        acts = backpressure_schedule(queues, config.topology, config.flows,
                                     config.interference);
        break;
      case PolicyKind::EqualSplit:
        acts = equal_split->schedule(queues, config.topology, config.flows,
                                     config.interference, t);
        break;
      case PolicyKind::ReceiveForward:
        acts = receive_forward->schedule(queues, config.topology, config.flows);
        break;
    }

    assert_activations_feasible(acts, config.interference, config.policy, t);

    // Realize transfers against beginning-of-slot backlog. Per-receiver
    // capability budgets are shared across simultaneous senders in
    // lexicographic order; carries tick only on use.
    std::sort(acts.begin(), acts.end());
    std::vector<std::int64_t> cap_budget(n_nodes, 0);
    std::vector<bool> cap_taken(n_nodes, false);
    for (const Activation& a : acts) {
      if (cap_taken[a.dst]) continue;
      cap_taken[a.dst] = true;
      cap_budget[a.dst] =
          cap_carry[a.dst].take(effective_capability(config.profiles[a.dst]));
    }

    std::vector<std::int64_t> out_pkts(static_cast<size_t>(n_nodes) * n_flows, 0);
    std::vector<std::int64_t> in_pkts(static_cast<size_t>(n_nodes) * n_flows, 0);
    auto cell = [n_flows](NodeId n, FlowId f) {
      return static_cast<size_t>(n) * n_flows + f;
    };

    for (const Activation& a : acts) {
      int li = config.topology.link_index(a.src, a.dst);
      const Link& link = config.topology.links[li];
      std::int64_t link_budget = link_carry[li].take(link.rate);
      TransferOutcome outcome = realize_transfer_budgeted(
          scheduled_packets, link_budget, cap_budget[a.dst],
          queues.backlog(a.src, a.flow), link.loss_p, loss_rng,
          config.loss_mode);
      cap_budget[a.dst] -= outcome.sent;
      out_pkts[cell(a.src, a.flow)] += outcome.sent;
      in_pkts[cell(a.dst, a.flow)] += outcome.delivered;
      m.lost_total += static_cast<std::uint64_t>(outcome.sent - outcome.delivered);
    }

    // Queue update; destination queues drain into the goodput counters.
    for (int s = 0; s < n_flows; ++s) {
      const FlowSpec& flow = config.flows[s];
      for (NodeId n = 0; n < n_nodes; ++n) {
        std::int64_t add = (n == flow.source) ? admitted[s] : 0;
        if (n == flow.dest) {
          std::int64_t arrived = in_pkts[cell(n, flow.id)];
          rec.delivered[s] = arrived;
          m.delivered_total += static_cast<std::uint64_t>(arrived);
          queues.set_backlog(n, flow.id, 0);
          continue;
        }
        std::int64_t next =
            update_queue(queues.backlog(n, flow.id), out_pkts[cell(n, flow.id)],
                         in_pkts[cell(n, flow.id)], add);
        queues.set_backlog(n, flow.id, next);
      }
      rec.admitted[s] = admitted[s];
      m.admitted_total += static_cast<std::uint64_t>(admitted[s]);
    }

    rec.activations = acts;
    rec.total_backlog = queues.total_backlog();
    result.trace.records.push_back(std::move(rec));
  }

  result.trace.digest = trace_digest(result.trace);
  m.backlog_end = queues.total_backlog();

  if (config.horizon > 0) {
    Metrics window =
        compute_metrics(result.trace, config, config.warmup, config.horizon);
    m.goodput = window.goodput;
    m.total_goodput = window.total_goodput;
    m.avg_backlog = window.avg_backlog;
    m.utility = window.utility;
    m.window_delivered = window.window_delivered;
  }
  return result;
}

Metrics compute_metrics(const Trace& trace, const SimConfig& config,
                        std::uint64_t begin, std::uint64_t end) {
  if (begin >= end)
    throw std::invalid_argument("compute_metrics: empty window");
  if (end > trace.records.size())
    throw std::invalid_argument("compute_metrics: window beyond trace");

  const int n_flows = static_cast<int>(config.flows.size());
  Metrics m;
  m.goodput.assign(n_flows, 0.0);
  std::vector<std::uint64_t> delivered(n_flows, 0);
  double backlog_sum = 0.0;
  for (std::uint64_t t = begin; t < end; ++t) {
    const TraceRecord& r = trace.records[t];
    for (int s = 0; s < n_flows; ++s)
      delivered[s] += static_cast<std::uint64_t>(r.delivered[s]);
    backlog_sum += static_cast<double>(r.total_backlog);
  }
  auto span = static_cast<double>(end - begin);
  for (int s = 0; s < n_flows; ++s) {
    m.goodput[s] = static_cast<double>(delivered[s]) / span;
    m.total_goodput += m.goodput[s];
    m.window_delivered += delivered[s];
    m.utility += utility_value(config.flows[s].utility, m.goodput[s]);
  }
  m.avg_backlog = backlog_sum / span;
  return m;
}

ReplicationResult run_replications(const SimConfig& config, int n_reps,
                                   bool parallel) {
  if (n_reps < 1) throw std::invalid_argument("n_reps must be >= 1");
  ReplicationResult out;
  out.metrics.resize(n_reps);
  out.digests.resize(n_reps);

  auto run_one = [&](int rep) {
    SimConfig c = config;
    c.stream = static_cast<std::uint64_t>(rep);
    RunResult r = run_simulation(c);
    out.metrics[rep] = r.metrics;
    out.digests[rep] = r.trace.digest;
  };

  if (parallel && n_reps > 1) {
    std::atomic<int> next{0};
    unsigned n_threads = std::min<unsigned>(
        std::max(1u, std::thread::hardware_concurrency()),
        static_cast<unsigned>(n_reps));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i)
      pool.emplace_back([&] {
        for (int rep = next.fetch_add(1); rep < n_reps; rep = next.fetch_add(1))
          run_one(rep);
      });
    for (std::thread& th : pool) th.join();
  } else {
    for (int rep = 0; rep < n_reps; ++rep) run_one(rep);
  }

  double sum = 0.0, sum2 = 0.0;
  for (const Metrics& m : out.metrics) {
    sum += m.total_goodput;
    sum2 += m.total_goodput * m.total_goodput;
  }
  double n = static_cast<double>(n_reps);
  out.mean_total_goodput = sum / n;
  double var = sum2 / n - out.mean_total_goodput * out.mean_total_goodput;
  out.stddev_total_goodput = var > 0.0 ? std::sqrt(var) : 0.0;
  return out;
}

}  // namespace d2dsim
