#include "d2dsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace d2dsim {

int Topology::link_index(NodeId src, NodeId dst) const {
  for (size_t i = 0; i < links.size(); ++i)
    if (links[i].src == src && links[i].dst == dst) return static_cast<int>(i);
  return -1;
}

std::vector<int> Topology::out_links(NodeId n) const {
  std::vector<int> out;
  for (size_t i = 0; i < links.size(); ++i)
    if (links[i].src == n) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Topology::in_links(NodeId n) const {
  std::vector<int> in;
  for (size_t i = 0; i < links.size(); ++i)
    if (links[i].dst == n) in.push_back(static_cast<int>(i));
  return in;
}

bool Topology::reachable(NodeId from, NodeId to) const {
  if (from == to) return true;
  std::vector<bool> seen(n_nodes, false);
  std::vector<NodeId> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    for (const Link& l : links) {
      if (l.src != n || seen[l.dst]) continue;
      if (l.dst == to) return true;
      seen[l.dst] = true;
      stack.push_back(l.dst);
    }
  }
  return false;
}

double effective_capability(const DeviceProfile& p) {
  return std::min(p.r_compute, std::min(p.r_energy, p.r_incentive));
}

double utility_value(const UtilitySpec& spec, double x) {
  if (x < 0.0) throw std::domain_error("utility_value: x < 0");
  switch (spec.kind) {
    case UtilityKind::Log1p:
      return spec.weight * std::log1p(x);
    case UtilityKind::AlphaFair:
      // x^(1-alpha)/(1-alpha); diverges to -inf at 0 when alpha > 1.
      return spec.weight * std::pow(x, 1.0 - spec.alpha) / (1.0 - spec.alpha);
  }
  return 0.0;
}

double utility_derivative(const UtilitySpec& spec, double x) {
  if (x < 0.0) throw std::domain_error("utility_derivative: x < 0");
  switch (spec.kind) {
    case UtilityKind::Log1p:
      return spec.weight / (1.0 + x);
    case UtilityKind::AlphaFair:
      return spec.weight * std::pow(x, -spec.alpha);
  }
  return 0.0;
}

std::uint64_t sample_arrivals(const ArrivalProcess& process, RngStream& rng,
                              std::uint64_t slot) {
  switch (process.kind) {
    case ArrivalKind::Deterministic: {
      double a = process.mean * static_cast<double>(slot);
      double b = process.mean * static_cast<double>(slot + 1);
      return static_cast<std::uint64_t>(std::floor(b) - std::floor(a));
    }
    case ArrivalKind::BernoulliBatch: {
      double p = process.mean / static_cast<double>(process.batch);
      return rng.bernoulli(p) ? process.batch : 0;
    }
    case ArrivalKind::Poisson:
      return rng.poisson(process.mean);
  }
  return 0;
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i];
  }
  return os.str();
}

ValidationReport validate_topology(const Topology& topo,
                                   const std::vector<DeviceProfile>& profiles,
                                   const std::vector<FlowSpec>& flows) {
  ValidationReport rep;
  auto bad = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

  if (topo.n_nodes <= 0) bad("topology has no nodes");
  if (profiles.size() != static_cast<size_t>(topo.n_nodes))
    bad("profile count does not match node count");

  std::set<std::pair<NodeId, NodeId>> seen;
  for (const Link& l : topo.links) {
    std::ostringstream os;
    os << "(" << l.src << "," << l.dst << ")";
    std::string id = os.str();
    if (l.src < 0 || l.src >= topo.n_nodes || l.dst < 0 || l.dst >= topo.n_nodes) {
      bad("link " + id + ": endpoint out of range");
      continue;
    }
    if (l.src == l.dst) bad("link " + id + ": self-loop");
    if (!seen.insert({l.src, l.dst}).second) bad("link " + id + ": duplicate link");
    if (!(l.rate >= 0.0) || !std::isfinite(l.rate)) bad("link " + id + ": invalid rate");
    if (l.loss_p < 0.0 || l.loss_p > 1.0) bad("link " + id + ": loss_p outside [0,1]");
  }

  // Any node that can receive needs strictly positive capability: the
  // capability-normalized scheduling weight divides by it.
  for (NodeId n = 0; n < topo.n_nodes && n < static_cast<NodeId>(profiles.size()); ++n) {
    const DeviceProfile& p = profiles[n];
    if (p.r_compute < 0.0 || p.r_energy < 0.0 || p.r_incentive < 0.0)
      bad("node " + std::to_string(n) + ": negative capability component");
    if (!topo.in_links(n).empty() && effective_capability(p) <= 0.0)
      bad("node " + std::to_string(n) + ": zero capability on a relay-capable node");
  }

  std::set<FlowId> flow_ids;
  for (const FlowSpec& f : flows) {
    std::string id = "flow " + std::to_string(f.id);
    if (!flow_ids.insert(f.id).second) bad(id + ": duplicate flow id");
    if (f.source < 0 || f.source >= topo.n_nodes || f.dest < 0 || f.dest >= topo.n_nodes) {
      bad(id + ": endpoint out of range");
      continue;
    }
    if (f.source == f.dest) bad(id + ": source equals destination");
    else if (!topo.reachable(f.source, f.dest)) bad(id + ": destination unreachable from source");
    if (f.utility.weight <= 0.0) bad(id + ": utility weight must be positive");
    if (f.utility.kind == UtilityKind::AlphaFair &&
        (f.utility.alpha <= 0.0 || f.utility.alpha == 1.0))
      bad(id + ": alpha_fair requires alpha > 0, alpha != 1");
  }

  return rep;
}

}  // namespace d2dsim
