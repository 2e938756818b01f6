// Acceptance suite: one pass/fail line per criterion, exit 0 only if all
// pass. argv[1] is the bundled config directory (determinism corpus).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "d2dsim/engine.hpp"
#include "d2dsim/oracle.hpp"
#include "d2dsim/runner.hpp"

using namespace d2dsim;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_conservation_runs = 0;
int g_conservation_failures = 0;

// Every simulation in this suite flows through here, so the conservation
// identity is checked on every acceptance run.
ReplicationResult checked_replications(const SimConfig& config, int reps,
                                       bool parallel = false) {
  ReplicationResult r = run_replications(config, reps, parallel);
  for (const Metrics& m : r.metrics) {
    ++g_conservation_runs;
    if (m.admitted_total != m.delivered_total +
                                static_cast<std::uint64_t>(m.backlog_end) +
                                m.lost_total)
      ++g_conservation_failures;
  }
  return r;
}

SimConfig diamond_config(PolicyKind policy, double relay_cap, double loss,
                         bool two_flows) {
  SimConfig c;
  c.topology.n_nodes = 4;
  c.topology.links = {
      {0, 1, 1.0, loss}, {0, 2, 1.0, loss}, {1, 3, 1.0, loss}, {2, 3, 1.0, loss}};
  c.profiles.assign(4, {1.0, 1.0, 1.0});
  c.profiles[1] = {relay_cap, 1.0, 1.0};
  c.flows = {{0, 0, 3, {UtilityKind::Log1p, 1.0, 2.0}}};
  if (two_flows) c.flows.push_back({1, 0, 1, {UtilityKind::Log1p, 1.0, 2.0}});
  c.policy = policy;
  c.params = {200.0, 1.0, 1.0};
  c.interference = Interference::NodeExclusive;
  c.loss_mode = LossMode::Stochastic;
  c.horizon = 100000;
  c.warmup = 10000;
  c.seed = 1;
  return c;
}

SimConfig line_config(int n, PolicyKind policy) {
  SimConfig c;
  c.topology.n_nodes = n;
  for (int i = 0; i + 1 < n; ++i) c.topology.links.push_back({i, i + 1, 1.0, 0.0});
  c.profiles.assign(n, {1.0, 1.0, 1.0});
  c.flows = {{0, 0, n - 1, {UtilityKind::Log1p, 1.0, 2.0}}};
  c.policy = policy;
  c.params = {200.0, 1.0, 1.0};
  c.interference = Interference::Pipeline;
  c.horizon = 100000;
  c.warmup = 10000;
  c.seed = 1;
  return c;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// C1: device-bottleneck gap on the diamond.
Outcome criterion1() {
  auto start = std::chrono::steady_clock::now();
  Outcome out;
  std::ostringstream os;
  for (double cap : {0.1, 0.25, 0.5}) {
    SimConfig dc = diamond_config(PolicyKind::Dars, cap, 0.0, false);
    SimConfig bc = diamond_config(PolicyKind::Backpressure, cap, 0.0, false);
    ReplicationResult d = checked_replications(dc, 5);
    ReplicationResult b = checked_replications(bc, 5);
    StaticOptimum opt = static_optimum(dc.topology, dc.profiles, dc.flows);

    bool beats = d.mean_total_goodput > b.mean_total_goodput;
    bool near_opt = d.mean_total_goodput >= 0.85 * opt.x[0];
    bool bands_ok = true;
    if (cap == 0.1)
      bands_ok = d.mean_total_goodput - d.stddev_total_goodput >
                 b.mean_total_goodput + b.stddev_total_goodput;
    if (!(beats && near_opt && bands_ok)) out.pass = false;
    os << " cap=" << fmt(cap) << " dars=" << fmt(d.mean_total_goodput)
       << " bp=" << fmt(b.mean_total_goodput) << " opt=" << fmt(opt.x[0]);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start).count();
  if (secs >= 30.0) out.pass = false;
  os << " runtime=" << fmt(secs) << "s";
  out.detail = os.str();
  return out;
}

// C2: goodput vs loss probability, monotone and above backpressure.
Outcome criterion2() {
  Outcome out;
  std::ostringstream os;
  double prev = 1e9;
  for (double loss : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    ReplicationResult d =
        checked_replications(diamond_config(PolicyKind::Dars, 0.1, loss, false), 5);
    ReplicationResult b = checked_replications(
        diamond_config(PolicyKind::Backpressure, 0.1, loss, false), 5);
    if (d.mean_total_goodput > prev * 1.02) out.pass = false;  // 2% noise slack
    if (d.mean_total_goodput < b.mean_total_goodput) out.pass = false;
    prev = d.mean_total_goodput;
    os << " p=" << fmt(loss) << ":" << fmt(d.mean_total_goodput) << "/"
       << fmt(b.mean_total_goodput);
  }
  out.detail = os.str();
  return out;
}

// C3: two-flow total rate at every sweep point of C1 and C2.
Outcome criterion3() {
  Outcome out;
  std::ostringstream os;
  auto compare = [&](double cap, double loss) {
    ReplicationResult d =
        checked_replications(diamond_config(PolicyKind::Dars, cap, loss, true), 5);
    ReplicationResult b = checked_replications(
        diamond_config(PolicyKind::Backpressure, cap, loss, true), 5);
    if (d.mean_total_goodput < b.mean_total_goodput) out.pass = false;
    os << " (" << fmt(cap) << "," << fmt(loss) << "):"
       << fmt(d.mean_total_goodput) << ">=" << fmt(b.mean_total_goodput);
  };
  for (double cap : {0.1, 0.25, 0.5}) compare(cap, 0.0);
  for (double loss : {0.1, 0.2, 0.3, 0.4, 0.5}) compare(0.1, loss);
  out.detail = os.str();
  return out;
}

// C4: line-topology overhead against receive-and-forward.
Outcome criterion4() {
  Outcome out;
  std::ostringstream os;
  for (int n : {3, 4}) {
    ReplicationResult rf =
        checked_replications(line_config(n, PolicyKind::ReceiveForward), 1);
    ReplicationResult da = checked_replications(line_config(n, PolicyKind::Dars), 1);
    double ratio = da.mean_total_goodput / rf.mean_total_goodput;
    if (std::fabs(da.mean_total_goodput - rf.mean_total_goodput) >
        0.10 * rf.mean_total_goodput)
      out.pass = false;
    os << " line" << n << ": dars=" << fmt(da.mean_total_goodput)
       << " rf=" << fmt(rf.mean_total_goodput) << " ratio=" << fmt(ratio);
  }
  out.detail = os.str();
  return out;
}

// C5: device-centric stability at 0.8x the region boundary, instability
// detector at 1.3x. The absolute backlog bound 450 is the quadratic drift
// constant (~9) over twice the worst-case slack (0.01) of the split policy
// that serves demands directly while keeping the beta-couplings feasible.
Outcome criterion5() {
  Outcome out;
  std::ostringstream os;
  RegionSpec region;
  region.mode = RegionMode::DccUnicast;
  region.n_devices = 3;
  double boundary = boundary_scale(region, {1.0, 1.0, 1.0});
  const double pinned_abs_bound = 450.0;

  for (DccMode mode : {DccMode::Unicast, DccMode::Broadcast}) {
    DccRunConfig cfg;
    cfg.topology.n_devices = 3;
    cfg.params.mode = mode;
    cfg.params.beta = 0.05;
    cfg.params.arrival_mode = DccArrivalMode::Exogenous;
    cfg.arrivals.assign(3, {ArrivalKind::Poisson, 0.8 * boundary, 1});
    cfg.horizon = 100000;
    cfg.warmup = 10000;
    cfg.seed = 3;
    DccReport stable = dcc_run_check(cfg);

    cfg.arrivals.assign(3, {ArrivalKind::Poisson, 1.3 * boundary, 1});
    DccReport control = dcc_run_check(cfg);

    bool ok = stable.growth_ratio < 1.2 &&
              stable.avg_total_backlog < pinned_abs_bound &&
              control.growth_ratio > 1.5;
    if (!ok) out.pass = false;
    os << " " << (mode == DccMode::Unicast ? "unicast" : "broadcast")
       << ": ratio=" << fmt(stable.growth_ratio)
       << " avg=" << fmt(stable.avg_total_backlog)
       << " control_ratio=" << fmt(control.growth_ratio);
  }
  out.detail = os.str();
  return out;
}

// C6: flow-control utility gap shrinks with M.
Outcome criterion6() {
  Outcome out;
  std::ostringstream os;
  RegionSpec region;
  region.mode = RegionMode::DccUnicast;
  region.n_devices = 3;
  std::vector<UtilitySpec> utilities(3, {UtilityKind::Log1p, 1.0, 2.0});
  StaticOptimum opt = dcc_static_optimum(region, utilities, 1.0);

  std::vector<double> gaps;
  for (double m : {50.0, 100.0, 200.0, 400.0}) {
    DccRunConfig cfg;
    cfg.topology.n_devices = 3;
    cfg.params.mode = DccMode::Unicast;
    cfg.params.beta = 0.05;
    cfg.params.big_m = m;
    cfg.params.r_k_max = 1.0;
    cfg.params.arrival_mode = DccArrivalMode::FlowControl;
    cfg.utilities = utilities;
    cfg.horizon = 200000;
    cfg.warmup = 20000;
    cfg.seed = 3;
    DccReport rep = dcc_run_check(cfg);
    gaps.push_back(opt.value - rep.avg_utility);
    os << " M=" << fmt(m) << ":gap=" << fmt(gaps.back());
  }
  for (size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] <= 0.0) out.pass = false;
    if (i > 0 && gaps[i] > gaps[i - 1]) out.pass = false;
  }
  if (gaps.back() > 0.35 * gaps.front()) out.pass = false;
  os << " ratio400/50=" << fmt(gaps.back() / gaps.front());
  out.detail = os.str();
  return out;
}

// C7: scheduler optimality against subset brute force on the small corpus.
Outcome criterion7() {
  Outcome out;
  struct Instance {
    Topology topo;
    int n_flows;
  };
  auto line = [](int n) {
    Topology t;
    t.n_nodes = n;
    for (int i = 0; i + 1 < n; ++i) t.links.push_back({i, i + 1, 1.0, 0.0});
    return t;
  };
  Topology diamond;
  diamond.n_nodes = 4;
  diamond.links = {{0, 1, 1, 0}, {0, 2, 1, 0}, {1, 3, 1, 0}, {2, 3, 1, 0}};
  Topology fivenode = diamond;  // diamond with a tail relay
  fivenode.n_nodes = 5;
  fivenode.links.push_back({3, 4, 1.0, 0.0});

  std::vector<Instance> corpus = {{line(2), 1}, {line(3), 1}, {line(4), 1},
                                  {line(5), 1}, {diamond, 1}, {diamond, 2},
                                  {fivenode, 1}};
  int checked = 0, failures = 0;
  RngStream rng(2024, 0);
  for (const Instance& inst : corpus) {
    std::vector<DeviceProfile> profiles(inst.topo.n_nodes, {1.0, 1.0, 1.0});
    profiles[1] = {0.3, 1.0, 1.0};
    if (inst.topo.n_nodes > 2) profiles[2] = {0.8, 2.0, 1.5};
    std::vector<FlowSpec> flows;
    for (int f = 0; f < inst.n_flows; ++f)
      flows.push_back({f, 0, inst.topo.n_nodes - 1 - f, {}});

    std::vector<Activation> cands;
    for (const Link& l : inst.topo.links)
      for (const FlowSpec& fl : flows) cands.push_back({l.src, l.dst, fl.id});

    for (Interference model :
         {Interference::NodeExclusive, Interference::Pipeline}) {
      for (int it = 0; it < 1000; ++it) {
        QueueState q(inst.topo.n_nodes, inst.n_flows);
        for (NodeId n = 0; n < inst.topo.n_nodes; ++n)
          for (FlowId f = 0; f < inst.n_flows; ++f)
            q.set_backlog(n, f, static_cast<std::int64_t>(rng.next_u64() % 64));

        auto weight_of = [&](const std::vector<Activation>& acts) {
          double w = 0.0;
          for (const Activation& a : acts)
            w += effective_capability(profiles[a.dst]) *
                 (static_cast<double>(q.backlog(a.src, a.flow)) -
                  static_cast<double>(q.backlog(a.dst, a.flow)));
          return w;
        };

        double best = 0.0;
        for (std::uint32_t mask = 0; mask < (1u << cands.size()); ++mask) {
          std::vector<Activation> subset;
          double w = 0.0;
          bool positive = true;
          for (size_t i = 0; i < cands.size(); ++i) {
            if (!(mask & (1u << i))) continue;
            double wi =
                effective_capability(profiles[cands[i].dst]) *
                (static_cast<double>(q.backlog(cands[i].src, cands[i].flow)) -
                 static_cast<double>(q.backlog(cands[i].dst, cands[i].flow)));
            if (wi <= 0.0) {
              positive = false;
              break;
            }
            subset.push_back(cands[i]);
            w += wi;
          }
          if (!positive || !activation_set_feasible(subset, model)) continue;
          best = std::max(best, w);
        }

        auto acts = dars_schedule(q, inst.topo, profiles, flows, model);
        ++checked;
        if (std::fabs(weight_of(acts) - best) > 1e-9) ++failures;
      }
    }
  }
  out.pass = failures == 0;
  std::ostringstream os;
  os << " states=" << checked << " mismatches=" << failures;
  out.detail = os.str();
  return out;
}

// C8: closed-form rate control against 1e-5 grid maximization.
Outcome criterion8() {
  Outcome out;
  DarsParams base{200.0, 1.0, 1.0};
  UtilitySpec log1{UtilityKind::Log1p, 1.0, 2.0};

  // The four worked examples hold exactly.
  if (std::fabs(dars_rate_control(0.0, base, log1) - 1.0) > 1e-12) out.pass = false;
  if (std::fabs(dars_rate_control(100.0, base, log1) - 1.0) > 1e-12) out.pass = false;
  if (std::fabs(dars_rate_control(400.0, base, log1) - 0.0) > 1e-12) out.pass = false;
  if (std::fabs(dars_rate_control(150.0, base, log1) - 1.0 / 3.0) > 1e-12)
    out.pass = false;

  RngStream rng(4096, 0);
  int failures = 0;
  for (int it = 0; it < 1000; ++it) {
    DarsParams p{rng.uniform(1.0, 500.0), 1.0, 1.0};
    UtilitySpec u = log1;
    u.weight = rng.uniform(0.2, 3.0);
    double backlog = rng.uniform(0.0, 3.0 * p.big_m);
    double closed = dars_rate_control(backlog, p, u);

    double best_x = 0.0, best_v = -1e300;
    for (int i = 0; i <= 100000; ++i) {
      double x = static_cast<double>(i) * 1e-5;
      double v = p.big_m * utility_value(u, x) - backlog * x;
      if (v > best_v) {
        best_v = v;
        best_x = x;
      }
    }
    if (std::fabs(closed - best_x) > 1e-4) ++failures;
  }
  if (failures > 0) out.pass = false;
  std::ostringstream os;
  os << " grid_mismatches=" << failures << "/1000";
  out.detail = os.str();
  return out;
}

// C9: byte-identical digests across reruns and parallel replication.
Outcome criterion9(const std::string& config_dir) {
  Outcome out;
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(config_dir))
    if (entry.path().extension() == ".json") names.push_back(entry.path().string());
  std::sort(names.begin(), names.end());
  if (names.size() != 10) {
    out.pass = false;
    out.detail = " expected a 10-config corpus, found " +
                 std::to_string(names.size());
    return out;
  }
  int checked = 0;
  for (const std::string& path : names) {
    ExperimentConfig cfg = parse_config(resolve_config(load_config_file(path)));
    ExperimentResult a = execute_experiment(cfg, false);
    ExperimentResult b = execute_experiment(cfg, false);
    ExperimentResult c = execute_experiment(cfg, true);  // parallel reps
    std::string csv_a = rows_to_csv(a);
    if (csv_a != rows_to_csv(b) || csv_a != rows_to_csv(c)) {
      out.pass = false;
      out.detail += " mismatch:" + path;
    }
    for (size_t i = 0; i < a.rows.size(); ++i)
      if (a.rows[i].trace_digest != b.rows[i].trace_digest ||
          a.rows[i].trace_digest != c.rows[i].trace_digest) {
        out.pass = false;
        out.detail += " digest mismatch:" + path;
      }
    ++checked;
  }
  out.detail = " configs=" + std::to_string(checked) + out.detail;
  return out;
}

// C10: exact integer conservation on every run this suite performed.
Outcome criterion10() {
  Outcome out;
  out.pass = g_conservation_failures == 0 && g_conservation_runs > 0;
  std::ostringstream os;
  os << " runs_checked=" << g_conservation_runs
     << " violations=" << g_conservation_failures;
  out.detail = os.str();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::string config_dir = argc > 1 ? argv[1] : "configs";
  bool all_pass = true;
  auto report = [&](int idx, const Outcome& o) {
    std::cout << "C" << idx << (o.pass ? " PASS" : " FAIL") << o.detail << "\n";
    std::cout.flush();
    if (!o.pass) all_pass = false;
  };
  report(1, criterion1());
  report(2, criterion2());
  report(3, criterion3());
  report(4, criterion4());
  report(5, criterion5());
  report(6, criterion6());
  report(7, criterion7());
  report(8, criterion8());
  report(9, criterion9(config_dir));
  report(10, criterion10());
  std::cout << (all_pass ? "ALL CRITERIA PASS" : "CRITERIA FAILED") << "\n";
  return all_pass ? 0 : 1;
}
