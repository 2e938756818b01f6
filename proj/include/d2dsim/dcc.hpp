#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2dsim/model.hpp"

namespace d2dsim {

// Star cellular + local D2D model: one base station reaching every device,
// plus direct device-to-device links. In broadcast mode a local
// transmission is a hyperarc (sender n, receiver set J).
struct Hyperedge {
  NodeId sender = 0;
  std::vector<NodeId> receivers;  // nonempty, sender excluded, sorted
};

struct DccTopology {
  int n_devices = 0;
  // Ordered (relay n, device k) pairs with a usable local link n -> k.
  // Empty means fully connected (all ordered pairs).
  std::vector<std::pair<NodeId, NodeId>> local_links;
  // Broadcast hyperedges. Empty means all nonempty subsets per sender,
  // allowed only for n_devices <= 6.
  std::vector<Hyperedge> hyperedges;

  std::vector<std::pair<NodeId, NodeId>> resolved_local_links() const;
  std::vector<Hyperedge> resolved_hyperedges() const;
};

enum class DccMode { Unicast, Broadcast };
enum class DccArrivalMode { Exogenous, FlowControl };

struct DccParams {
  double big_m = 200.0;
  double beta = 0.05;    // shift applied to the relay intake coupling
  double r_k_max = 1.0;  // flow-control admission cap
  DccMode mode = DccMode::Unicast;
  DccArrivalMode arrival_mode = DccArrivalMode::Exogenous;
};

// Virtual/real queue triple. lambda_k prices admission at device k;
// eta_{n,k} couples local service from relay n to flow k with the relay's
// cellular intake; q_{n,k} is the real relay backlog. Pair (n,k) is stored
// at index n*N + k with the n == k diagonal unused.
struct DccState {
  int n_devices = 0;
  std::vector<double> lambda;  // size N
  std::vector<double> eta;     // size N*N, (relay n, device k)
  std::vector<double> q;       // size N*N, (relay n, device k)

  explicit DccState(int n = 0)
      : n_devices(n), lambda(n, 0.0), eta(static_cast<size_t>(n) * n, 0.0),
        q(static_cast<size_t>(n) * n, 0.0) {}

  double& eta_at(NodeId n, NodeId k) { return eta[static_cast<size_t>(n) * n_devices + k]; }
  double& q_at(NodeId n, NodeId k) { return q[static_cast<size_t>(n) * n_devices + k]; }
  double eta_at(NodeId n, NodeId k) const { return eta[static_cast<size_t>(n) * n_devices + k]; }
  double q_at(NodeId n, NodeId k) const { return q[static_cast<size_t>(n) * n_devices + k]; }

  double total() const;
};

// One slot's scheduling output. The cellular radio carries at most one
// unit-rate transmission (direct to a device, or base station to a relay
// on behalf of a device); the local radio carries at most one unit-rate
// unicast link or one hyperarc.
struct DccDecision {
  // Cellular: exactly one of direct/relay, or idle.
  bool cellular_direct = false;
  NodeId cellular_device = -1;  // direct: device k
  bool cellular_relay = false;
  NodeId relay_node = -1;  // relay pair (n, k)
  NodeId relay_for = -1;

  // Local: unicast pair (n, k), or hyperedge index in broadcast mode.
  bool local_active = false;
  NodeId local_relay = -1;
  NodeId local_device = -1;
  int hyperedge = -1;
};

// argmax over y in [0, r_k_max] of big_m * U_k(y) - lambda_k * y.
double dcc_flow_control(double lambda_k, const DccParams& params,
                        const UtilitySpec& utility);

// Picks the max-positive-weight cellular candidate: direct(k) weighs
// lambda_k, relay(n,k) weighs eta_{n,k} - q_{n,k}. Idle when none is
// positive. Lexicographic tie-break (directs first, then pairs).
void dcc_cellular_schedule(const DccState& state, DccDecision& decision);

// Unicast local pick: pair (n,k) weighs lambda_k - eta_{n,k} + q_{n,k}.
void dcc_local_schedule_unicast(
    const DccState& state,
    const std::vector<std::pair<NodeId, NodeId>>& local_links,
    DccDecision& decision);

// Broadcast local pick: hyperarc (n,J) weighs
// sum over k in J of (lambda_k - eta_{n,k} + q_{n,k}).
void dcc_local_schedule_broadcast(const DccState& state,
                                  const std::vector<Hyperedge>& hyperedges,
                                  DccDecision& decision);

// Coupled quantities implied by a decision:
//   x_{n,k} = max(g_{n,s}^k - beta, 0)  (relay intake, beta-shifted)
//   h_{n,k} = g_{k,n}^k in unicast, sum of covering hyperarcs in broadcast
double dcc_x(const DccDecision& d, const DccParams& params, NodeId n, NodeId k);
double dcc_h(const DccDecision& d, const std::vector<Hyperedge>& hyperedges,
             NodeId n, NodeId k);

// Per-slot queue update: every queue moves by max(old - service, 0) + arrival.
//   lambda_k: served by g_{k,s}^k + sum_n g_{k,n}^k, fed by y_k
//   eta_{n,k}: served by g_{n,s}^k, fed by g_{k,n}^k
//   q_{n,k}:  served by h_{n,k}, fed by x_{n,k}
DccState dcc_update_queues(const DccState& state, const DccDecision& decision,
                           const std::vector<double>& y,
                           const DccParams& params,
                           const std::vector<Hyperedge>& hyperedges);

// Stability & utility report over a seeded run.
struct DccRunConfig {
  DccTopology topology;
  DccParams params;
  std::vector<ArrivalProcess> arrivals;       // exogenous mode
  std::vector<UtilitySpec> utilities;         // flow-control objective
  std::uint64_t horizon = 10000;
  std::uint64_t warmup = 1000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
};

struct DccReport {
  double avg_total_backlog = 0.0;   // Cesaro average of sum(lambda+eta+q) over [warmup, T)
  double growth_ratio = 0.0;        // backlog avg [T/2,T) / avg [T/4,T/2)
  double avg_utility = 0.0;         // time-average of sum_k U_k(y_k(t)) over [warmup, T)
  std::vector<double> avg_admitted; // per-device mean y_k over [warmup, T)
  std::uint64_t digest = 0;
};

DccReport dcc_run_check(const DccRunConfig& config);

DccMode dcc_mode_from_string(const std::string& s);
DccArrivalMode dcc_arrival_mode_from_string(const std::string& s);

}  // namespace d2dsim
