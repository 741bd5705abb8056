#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "manetsim/channel.hpp"
#include "manetsim/engine.hpp"
#include "manetsim/metrics.hpp"
#include "manetsim/protocols.hpp"
#include "manetsim/topology.hpp"

namespace manet {

/// Iteration counts of the four nested layers: topologies x role markings x
/// slot-set draws x outage realizations.
struct LayerCounts {
    std::size_t topologies = 200;
    std::size_t roles = 10;
    std::size_t slot_sets = 10;
    std::size_t realizations = 10;

    std::size_t trials_per_topology() const noexcept { return roles * slot_sets * realizations; }
};

struct Scenario {
    PlacementParams placement;
    ChannelParams channel;
    double mu = 0.4;
    double p = 0.3;
    std::size_t max_hops = 30;
    LayerCounts layers;
    std::uint64_t seed = 1;
    /// When set, every top-layer iteration reuses this placement (shadowing is
    /// still redrawn per iteration).
    std::optional<Topology> fixed_topology;

    double lambda() const;
};

/// Everything a per-trial observer may inspect. Only valid during the callback.
struct TrialContext {
    std::size_t topology_index;
    const Topology& topology;
    const LinkBudget& budget;
    const RoleAssignment& roles;
    LinkRealization& links;
    const ProtocolConfig& protocol;
};

using TrialObserver = std::function<void(const TrialContext&, const TrialOutcome&)>;

struct SimulationOptions {
    std::size_t workers = 1;
    /// Called from worker threads; must be thread-safe when workers > 1.
    TrialObserver observer;
    /// Checked between topologies.
    const std::atomic<bool>* stop = nullptr;
    std::function<void(std::size_t done, std::size_t total)> progress;
};

struct SimulationResult {
    /// per_protocol[k][t]: metrics of protocol k on topology t, for the
    /// completed prefix of topologies.
    std::vector<std::vector<TopologyMetrics>> per_protocol;
    std::size_t completed_topologies = 0;
    bool interrupted = false;
};

/// Stable 64-bit tag of a protocol configuration, used to derive its tie-break stream.
std::uint64_t protocol_tag(const ProtocolConfig& config);

/// Runs all layers for one topology index. Every protocol sees the same
/// topology, roles, interferer sets and outage draws.
std::vector<TopologyMetrics> simulate_topology(const Scenario& scenario, std::span<const ProtocolConfig> protocols,
                                               std::size_t topology_index, SlotOutageCache& cache,
                                               const TrialObserver& observer = {});

/// Runs all topologies on a worker pool. Results are independent of the
/// worker count: each topology draws from its own child stream and results
/// are stored by topology index.
SimulationResult simulate(const Scenario& scenario, std::span<const ProtocolConfig> protocols,
                          const SimulationOptions& options = {});

} // namespace manet
