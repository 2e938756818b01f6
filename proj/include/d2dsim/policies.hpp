#pragma once

#include <functional>
#include <string>
#include <vector>

#include "d2dsim/model.hpp"
#include "d2dsim/queueing.hpp"

namespace d2dsim {

// Feasibility family for simultaneous link activations.
//   NodeExclusive: a node joins at most one activation per slot, as sender
//                  or receiver (single shared radio).
//   Pipeline:      a node may send on one link and receive on one link in
//                  the same slot (relays with two interfaces); each node
//                  still receives from at most one sender.
enum class Interference { NodeExclusive, Pipeline };

Interference interference_from_string(const std::string& s);
std::string to_string(Interference m);

// One (sender, receiver, flow) link activation.
struct Activation {
  NodeId src = 0;
  NodeId dst = 0;
  FlowId flow = 0;

  friend bool operator==(const Activation&, const Activation&) = default;
  friend auto operator<=>(const Activation&, const Activation&) = default;
};

bool activation_set_feasible(const std::vector<Activation>& acts,
                             Interference model);

// Control constants for the queue-priced admission controller and the
// max-weight scheduler. Transfers on activated links are attempted at
// f_max, which validation requires to dominate every physical limit.
struct DarsParams {
  double big_m = 200.0;  // utility weight in the admission objective
  double r_max = 1.0;    // per-slot admission cap
  double f_max = 1.0;    // per-activation attempt size

  ValidationReport validate(const Topology& topo,
                            const std::vector<DeviceProfile>& profiles) const;
};

// One slot's control output: admitted rate per flow (pre-integerization)
// and the activation set. Scheduled transfer size is f_max on every
// activation and zero elsewhere.
struct SlotDecision {
  std::vector<double> admitted;
  std::vector<Activation> activations;
};

// argmax over x in [0, r_max] of big_m * g(x) - queue * x.
// Closed form for log1p; golden-section search otherwise.
double dars_rate_control(double source_backlog, const DarsParams& params,
                         const UtilitySpec& utility);

// Golden-section maximizer of big_m * g(x) - queue * x on [0, r_max];
// used as the general-utility path and as an independent route for the
// closed form in tests. Absolute tolerance 1e-9 on x.
double rate_control_golden(double source_backlog, const DarsParams& params,
                           const UtilitySpec& utility);

// Generic golden-section maximizer on [lo, hi] for unimodal f.
double maximize_unimodal(const std::function<double(double)>& f, double lo,
                         double hi, double x_tol);

// Device-aware max-weight activation: weight(i,j,s) =
// capability(j) * (U_i^s - U_j^s). Exact over all feasible sets when the
// topology has at most 12 links, greedy by descending weight above that.
// Nonpositive-weight activations are never included. Ties between equal
// total-weight sets resolve toward the lexicographically smallest sorted
// activation list.
std::vector<Activation> dars_schedule(const QueueState& queues,
                                      const Topology& topo,
                                      const std::vector<DeviceProfile>& profiles,
                                      const std::vector<FlowSpec>& flows,
                                      Interference model);

// Same activation search with weight(i,j,s) = R_ij * (U_i^s - U_j^s):
// capability-blind at decision time; physical limits still bind when the
// transfer is realized.
std::vector<Activation> backpressure_schedule(const QueueState& queues,
                                              const Topology& topo,
                                              const std::vector<FlowSpec>& flows,
                                              Interference model);

// Source-side round robin across the source's outgoing links; remaining
// links activate greedily in lexicographic order when compatible. Requires
// a source with at least two outgoing links.
class EqualSplitPolicy {
 public:
  EqualSplitPolicy(const Topology& topo, const std::vector<FlowSpec>& flows);
  std::vector<Activation> schedule(const QueueState& queues,
                                   const Topology& topo,
                                   const std::vector<FlowSpec>& flows,
                                   Interference model, std::uint64_t slot) const;
};

// Activates every link of a line topology every slot; only physical limits
// shape the resulting transfers. Requires a Pipeline interference config.
class ReceiveForwardPolicy {
 public:
  ReceiveForwardPolicy(const Topology& topo, const std::vector<FlowSpec>& flows,
                       Interference model);
  std::vector<Activation> schedule(const QueueState& queues,
                                   const Topology& topo,
                                   const std::vector<FlowSpec>& flows) const;
};

// Checks that `topo` is a single directed line covering all nodes and
// returns it in path order; empty if not a line.
std::vector<NodeId> line_order(const Topology& topo);

enum class PolicyKind { Dars, Backpressure, EqualSplit, ReceiveForward };

PolicyKind policy_from_string(const std::string& name);
std::string to_string(PolicyKind k);

}  // namespace d2dsim
