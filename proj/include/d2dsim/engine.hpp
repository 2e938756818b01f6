#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "d2dsim/dcc.hpp"
#include "d2dsim/model.hpp"
#include "d2dsim/policies.hpp"
#include "d2dsim/queueing.hpp"

namespace d2dsim {

// Full description of one seeded run. Validated before slot 0; the slot
// loop itself never fails.
struct SimConfig {
  Topology topology;
  std::vector<DeviceProfile> profiles;
  std::vector<FlowSpec> flows;
  PolicyKind policy = PolicyKind::Dars;
  DarsParams params;
  Interference interference = Interference::NodeExclusive;
  LossMode loss_mode = LossMode::Stochastic;
  std::uint64_t horizon = 10000;
  std::uint64_t warmup = 1000;  // excluded from averages
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;  // replication stream

  ValidationReport validate() const;
};

struct TraceRecord {
  std::uint64_t slot = 0;
  std::vector<std::int64_t> admitted;   // packets per flow this slot
  std::vector<Activation> activations;
  std::vector<std::int64_t> delivered;  // packets reaching each flow's dest
  std::int64_t total_backlog = 0;       // end of slot
};

// Per-slot record stream plus a digest over the canonical encoding of the
// records. Identical config (and seed) gives an identical digest.
struct Trace {
  std::vector<TraceRecord> records;
  std::uint64_t digest = 0;
};

struct Metrics {
  std::vector<double> goodput;       // packets/slot per flow over the window
  double total_goodput = 0.0;
  double avg_backlog = 0.0;          // Cesaro average of end-of-slot totals
  double utility = 0.0;              // sum_s g_s(goodput_s)
  std::uint64_t window_delivered = 0;

  // Whole-run integer counters; admitted == delivered + backlog_end + lost.
  std::uint64_t admitted_total = 0;
  std::uint64_t delivered_total = 0;
  std::uint64_t lost_total = 0;
  std::int64_t backlog_end = 0;
};

struct RunResult {
  Trace trace;
  Metrics metrics;
};

// Executes slots 0..horizon-1 in fixed phase order: arrivals, rate
// control, schedule, feasibility gate, realize transfers, queue update,
// record. Throws std::runtime_error with a diagnostic if a policy emits an
// activation set outside the configured interference model.
RunResult run_simulation(const SimConfig& config);

// The engine's feasibility gate: throws std::runtime_error naming the
// policy, slot, and offending set when it falls outside `model`.
void assert_activations_feasible(const std::vector<Activation>& acts,
                                 Interference model, PolicyKind policy,
                                 std::uint64_t slot);

// Window averages recomputed from the trace alone; window is [begin, end).
Metrics compute_metrics(const Trace& trace, const SimConfig& config,
                        std::uint64_t begin, std::uint64_t end);

struct ReplicationResult {
  std::vector<Metrics> metrics;        // by replication index
  std::vector<std::uint64_t> digests;  // by replication index
  double mean_total_goodput = 0.0;
  double stddev_total_goodput = 0.0;
};

// Runs n_reps copies with per-replication RNG streams. Results depend only
// on (config, rep index), never on execution order; parallel and serial
// execution produce identical output.
ReplicationResult run_replications(const SimConfig& config, int n_reps,
                                   bool parallel = false);

// FNV-1a over a stream of 64-bit words; used for trace digests.
struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ULL;
  void mix(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      state ^= (v >> (8 * i)) & 0xff;
      state *= 0x100000001b3ULL;
    }
  }
};

std::uint64_t trace_digest(const Trace& trace);

}  // namespace d2dsim
