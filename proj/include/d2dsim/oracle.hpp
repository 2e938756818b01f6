#pragma once

#include <cstdint>
#include <vector>

#include "d2dsim/dcc.hpp"
#include "d2dsim/model.hpp"
#include "d2dsim/policies.hpp"
#include "d2dsim/simplex.hpp"

namespace d2dsim {

// Small-instance ground truth, used by tests and the oracle CLI subcommand.
// Never consulted by the per-slot policies.

// Every nonempty feasible activation set of (link x flow) candidates under
// the given interference model; includes all maximal sets. Guarded to
// |links| * |flows| <= 20 candidates.
std::vector<std::vector<Activation>> enumerate_activation_sets(
    const Topology& topo, const std::vector<FlowSpec>& flows,
    Interference model = Interference::NodeExclusive);

struct StaticOptimum {
  std::vector<double> x;  // optimal per-flow rates
  double value = 0.0;     // sum of flow utilities at x
  bool converged = true;
  int n_activation_sets = 0;
};

// Utility-optimal time-sharing over the enumerated activation sets:
// maximize sum_s g_s(x_s) subject to per-activation transfer rates
// min(R_ij, cap_j), flow conservation, and device intake caps. Exact for up
// to two flows (Pareto-frontier search over LP supports); successive
// linearization above that.
StaticOptimum static_optimum(const Topology& topo,
                             const std::vector<DeviceProfile>& profiles,
                             const std::vector<FlowSpec>& flows,
                             Interference model = Interference::NodeExclusive);

enum class RegionMode { DarsStatic, DccUnicast, DccBroadcast };

// Linear supportability region for a rate vector. The device-centric modes
// carry the star-model flow constraints plus unit per-slot budgets on the
// cellular and local resources.
struct RegionSpec {
  RegionMode mode = RegionMode::DccUnicast;
  // Device-centric modes:
  int n_devices = 0;
  std::vector<Hyperedge> hyperedges;  // broadcast only
  // dars_static mode:
  Topology topology;
  std::vector<DeviceProfile> profiles;
  std::vector<FlowSpec> flows;
  Interference interference = Interference::NodeExclusive;
};

enum class Membership { Interior, Boundary, Exterior };

struct RegionResult {
  Membership membership = Membership::Exterior;
  // Largest uniform additive slack: rates + margin * 1 is still
  // supportable (negative when outside the region).
  double margin = 0.0;
};

RegionResult region_membership(const RegionSpec& region,
                               const std::vector<double>& rates);

// Scale c* such that c* * direction sits on the region boundary.
double boundary_scale(const RegionSpec& region,
                      const std::vector<double>& direction);

// Utility-optimal admitted rates over the device-centric region:
// maximize sum_k U_k(y_k) over supportable y with y_k <= r_k_max.
// Successive linearization with a shrinking trust region; exact to ~1e-12
// on these tiny instances.
StaticOptimum dcc_static_optimum(const RegionSpec& region,
                                 const std::vector<UtilitySpec>& utilities,
                                 double r_k_max);

}  // namespace d2dsim
