#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "manetsim/engine.hpp"
#include "manetsim/random.hpp"
#include "manetsim/topology.hpp"

namespace manet {

enum class Protocol { aodv, greedy, max_progress };

std::string to_string(Protocol protocol);

struct ProtocolConfig {
    Protocol protocol = Protocol::aodv;
    int B = 4;          ///< delivery attempts per link
    double r_t = 0.3;   ///< greedy-forwarding transmission range
    double r_g = 0.15;  ///< maximum-progress guard-zone radius
    double T = 1.0;     ///< link transmission delay
    double T_e = 1.2;   ///< excess delay per retransmission
    double T_d = 0.1;   ///< discovery-packet link delay

    /// Discovery-delay flag: 0 for greedy forwarding, 1 otherwise.
    int c() const noexcept { return protocol == Protocol::greedy ? 0 : 1; }
    /// Display name, e.g. "AODV", "GF(r_t=0.3)", "MP".
    std::string label() const;
    void validate() const;
};

enum class FailureStage { none, discovery, acknowledgement, delivery, no_path, horizon };

std::string to_string(FailureStage stage);

struct TrialOutcome {
    bool success = false;
    std::vector<NodeId> path;          ///< nodes of the selected (partial) path
    std::vector<int> attempts;         ///< delivery attempts N_l per completed link
    double path_delay = 0.0;           ///< sum of link delays of a successful path
    std::size_t hops = 0;              ///< links in a successful path
    FailureStage failure_stage = FailureStage::none;
    std::vector<std::vector<NodeId>> silenced; ///< per-link guard-zone silencing (maximum progress)
    std::vector<std::size_t> delivery_slots;   ///< first delivery slot per link
};

struct Link {
    NodeId from = 0;
    NodeId to = 0;
    bool operator==(const Link&) const = default;
};

/// Geographic and role constraints on a single ordered link.
bool link_eligible(const Topology& topology, const RoleAssignment& roles, const ProtocolConfig& config, NodeId from,
                   NodeId to);
std::vector<Link> eligible_links(const Topology& topology, const RoleAssignment& roles, const ProtocolConfig& config);

using LinkPredicate = std::function<bool(NodeId from, NodeId to)>;

/// Fewest-hops path over the links accepted by `is_candidate` (Dijkstra with
/// unit link costs). Among several fewest-hops paths one is drawn uniformly.
/// Links are evaluated lazily; only links that can lie on a fewest-hops path
/// are queried.
std::optional<std::vector<NodeId>> aodv_discover(const Topology& topology, const RoleAssignment& roles,
                                                 const LinkPredicate& is_candidate, RandomStream& tiebreak);

/// True when every reverse link of the path is free of outage.
bool aodv_acknowledge(std::span<const NodeId> path, const LinkPredicate& reverse_ok);

/// Eligible terminus from `current` closest to the destination, ties broken uniformly.
std::optional<NodeId> greedy_next_hop(NodeId current, const Topology& topology, const RoleAssignment& roles,
                                      double r_t, RandomStream& tiebreak);

struct NextLink {
    std::optional<NodeId> relay;
    FailureStage failure = FailureStage::none; ///< set when `relay` is empty
};

/// Two-way candidate link from `current` minimizing the remaining distance.
/// `forward_ok` reflects the RTS and `reverse_ok` the CTS of the discovery slot.
NextLink mp_next_link(NodeId current, const Topology& topology, const RoleAssignment& roles,
                      const LinkPredicate& forward_ok, const LinkPredicate& reverse_ok, RandomStream& tiebreak);

/// Potential interferers within r_g of `message_source` that hear its RTS or
/// CTS. Returned sorted.
std::vector<NodeId> apply_guard_zone(NodeId message_source, std::span<const NodeId> interferers,
                                     const Topology& topology, double r_g, const LinkPredicate& link_ok);

struct DeliveryResult {
    std::optional<int> attempts; ///< empty after B failures or at the horizon
    std::size_t next_slot = 0;
    bool horizon = false;
};

/// Retransmits over one link, one slot per attempt, until success or B outages.
DeliveryResult deliver_over_link(Link link, int B, std::size_t first_slot, LinkState& state,
                                 std::span<const NodeId> silenced);

/// One bottom-layer trial of the configured protocol.
TrialOutcome run_trial(const ProtocolConfig& config, const Topology& topology, const RoleAssignment& roles,
                       LinkState& state, RandomStream& tiebreak);

} // namespace manet
