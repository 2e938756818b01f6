#include "d2dsim/queueing.hpp"

#include <algorithm>
#include <cmath>

namespace d2dsim {

TransferOutcome realize_transfer_budgeted(std::int64_t scheduled,
                                          std::int64_t link_budget,
                                          std::int64_t cap_budget,
                                          std::int64_t sender_backlog,
                                          double loss_p, RngStream& rng,
                                          LossMode mode) {
  TransferOutcome out;
  out.scheduled = scheduled;
  std::int64_t sent = std::min({scheduled, link_budget, cap_budget, sender_backlog});
  if (sent < 0) sent = 0;
  out.sent = sent;
  if (loss_p <= 0.0) {
    out.delivered = sent;
  } else if (mode == LossMode::Stochastic) {
    out.delivered = static_cast<std::int64_t>(
        rng.binomial(static_cast<std::uint64_t>(sent), 1.0 - loss_p));
  } else {
    out.delivered = static_cast<std::int64_t>(
        std::llround(static_cast<double>(sent) * (1.0 - loss_p)));
  }
  return out;
}

TransferOutcome realize_transfer(std::int64_t scheduled, double link_rate,
                                 double receiver_capability,
                                 std::int64_t sender_backlog, double loss_p,
                                 RngStream& rng, LossMode mode) {
  auto link_budget = static_cast<std::int64_t>(std::floor(link_rate));
  auto cap_budget = static_cast<std::int64_t>(std::floor(receiver_capability));
  return realize_transfer_budgeted(scheduled, link_budget, cap_budget,
                                   sender_backlog, loss_p, rng, mode);
}

std::int64_t update_queue(std::int64_t backlog, std::int64_t total_out,
                          std::int64_t total_in_delivered,
                          std::int64_t admitted) {
  std::int64_t drained = backlog - total_out;
  if (drained < 0) drained = 0;
  return drained + total_in_delivered + admitted;
}

QueueState::QueueState(int n_nodes, int n_flows)
    : n_nodes_(n_nodes),
      n_flows_(n_flows),
      table_(static_cast<size_t>(n_nodes) * n_flows, 0),
      carries_(static_cast<size_t>(n_nodes) * n_flows) {}

std::int64_t QueueState::total_backlog() const {
  std::int64_t sum = 0;
  for (std::int64_t v : table_) sum += v;
  return sum;
}

std::int64_t QueueState::per_flow_backlog(FlowId flow) const {
  std::int64_t sum = 0;
  for (NodeId n = 0; n < n_nodes_; ++n) sum += table_[index(n, flow)];
  return sum;
}

}  // namespace d2dsim
