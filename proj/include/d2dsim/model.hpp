#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2dsim/rng.hpp"

namespace d2dsim {

// Node ids are dense in [0, n_nodes) and stable for the lifetime of a run.
using NodeId = int;
using FlowId = int;

struct Link {
  NodeId src = 0;
  NodeId dst = 0;
  double rate = 1.0;    // packets/slot the link can move while in use
  double loss_p = 0.0;  // per-packet loss probability
};

// Directed device graph. Immutable after construction.
struct Topology {
  int n_nodes = 0;
  std::vector<Link> links;

  int link_index(NodeId src, NodeId dst) const;  // -1 if absent
  std::vector<int> out_links(NodeId n) const;
  std::vector<int> in_links(NodeId n) const;
  bool reachable(NodeId from, NodeId to) const;
};

// Per-device rate caps from computing power, energy budget, and incentive.
// The device supports intake up to the minimum of the three.
struct DeviceProfile {
  double r_compute = 1.0;
  double r_energy = 1.0;
  double r_incentive = 1.0;
};

double effective_capability(const DeviceProfile& p);

enum class UtilityKind { Log1p, AlphaFair };

// Strictly concave increasing utility of a flow's rate.
//   log1p:      weight * ln(1 + x)
//   alpha_fair: weight * x^(1-alpha) / (1-alpha), alpha > 0, alpha != 1
struct UtilitySpec {
  UtilityKind kind = UtilityKind::Log1p;
  double weight = 1.0;
  double alpha = 2.0;  // alpha_fair only
};

double utility_value(const UtilitySpec& spec, double x);
double utility_derivative(const UtilitySpec& spec, double x);

enum class ArrivalKind { BernoulliBatch, Poisson, Deterministic };

// I.i.d. per-slot packet arrivals with the configured mean.
//   bernoulli_batch: `batch` packets w.p. mean/batch, else 0
//   poisson:         Poisson(mean)
//   deterministic:   floor((slot+1)*mean) - floor(slot*mean)
struct ArrivalProcess {
  ArrivalKind kind = ArrivalKind::Deterministic;
  double mean = 0.0;
  std::uint64_t batch = 1;  // bernoulli_batch only
};

std::uint64_t sample_arrivals(const ArrivalProcess& process, RngStream& rng,
                              std::uint64_t slot);

struct FlowSpec {
  FlowId id = 0;
  NodeId source = 0;
  NodeId dest = 0;
  UtilitySpec utility;
};

// Report-style validation: collects every violation instead of stopping at
// the first. Downstream modules require ok() before running.
struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_topology(const Topology& topo,
                                   const std::vector<DeviceProfile>& profiles,
                                   const std::vector<FlowSpec>& flows);

}  // namespace d2dsim
