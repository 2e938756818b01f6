#pragma once

#include <cstdint>
#include <vector>

#include "d2dsim/model.hpp"
#include "d2dsim/rng.hpp"

namespace d2dsim {

enum class LossMode { Stochastic, FluidExpectation };

// Fractional-rate accumulator. Queues hold whole packets; sub-packet rates
// (admitted x_s, link rates, device capabilities) accumulate here and
// convert to a packet budget once the running fraction reaches 1.
struct CarryAccumulator {
  double carry = 0.0;

  // Returns floor(amount + carry) and keeps the fractional remainder.
  // Unused whole packets from a slot do not roll over. The epsilon absorbs
  // accumulated rounding so rates like 0.1 yield exactly 1 packet per 10
  // uses instead of drifting a packet short.
  std::int64_t take(double amount) {
    double total = amount + carry;
    auto whole = static_cast<std::int64_t>(total + 1e-9);
    carry = total - static_cast<double>(whole);
    if (carry < 0.0) carry = 0.0;
    return whole;
  }
};

// One scheduled link transfer and what became of it.
//   scheduled >= sent:       physical budgets and sender backlog bind
//   sent >= delivered:       per-packet losses thin the transfer
struct TransferOutcome {
  std::int64_t scheduled = 0;
  std::int64_t sent = 0;
  std::int64_t delivered = 0;
};

// Core transfer step against pre-computed integer budgets. The engine takes
// budgets from per-link and per-receiver CarryAccumulators once per slot;
// several transfers into one receiver share cap_budget.
TransferOutcome realize_transfer_budgeted(std::int64_t scheduled,
                                          std::int64_t link_budget,
                                          std::int64_t cap_budget,
                                          std::int64_t sender_backlog,
                                          double loss_p, RngStream& rng,
                                          LossMode mode);

// Single-transfer convenience form: derives one-slot budgets from the raw
// link rate and receiver capability (zero prior carry).
TransferOutcome realize_transfer(std::int64_t scheduled, double link_rate,
                                 double receiver_capability,
                                 std::int64_t sender_backlog, double loss_p,
                                 RngStream& rng,
                                 LossMode mode = LossMode::Stochastic);

// new backlog = max(U - total_out, 0) + total_in_delivered + admitted
std::int64_t update_queue(std::int64_t backlog, std::int64_t total_out,
                          std::int64_t total_in_delivered,
                          std::int64_t admitted);

// Per-node, per-flow integer packet backlog. Destination entries are kept
// at zero; delivered traffic is counted by the engine, not queued.
class QueueState {
 public:
  QueueState() = default;
  QueueState(int n_nodes, int n_flows);

  std::int64_t backlog(NodeId node, FlowId flow) const {
    return table_[index(node, flow)];
  }
  void set_backlog(NodeId node, FlowId flow, std::int64_t v) {
    table_[index(node, flow)] = v;
  }

  // Admission carry for sub-packet admitted rates, one per (node, flow).
  CarryAccumulator& admit_carry(NodeId node, FlowId flow) {
    return carries_[index(node, flow)];
  }

  std::int64_t total_backlog() const;
  std::int64_t per_flow_backlog(FlowId flow) const;

  int n_nodes() const { return n_nodes_; }
  int n_flows() const { return n_flows_; }

 private:
  size_t index(NodeId node, FlowId flow) const {
    return static_cast<size_t>(node) * n_flows_ + flow;
  }
  int n_nodes_ = 0;
  int n_flows_ = 0;
  std::vector<std::int64_t> table_;
  std::vector<CarryAccumulator> carries_;
};

}  // namespace d2dsim
