#include "manetsim/protocols.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <sstream>
#include <utility>

#include "manetsim/errors.hpp"
#include "manetsim/metrics.hpp"

namespace manet {

namespace {

template <class T>
const T& pick_uniform(const std::vector<T>& options, RandomStream& tiebreak)
{
    return options.size() == 1 ? options.front() : options[tiebreak.below(options.size())];
}

TrialOutcome fail(TrialOutcome outcome, FailureStage stage)
{
    outcome.success = false;
    outcome.failure_stage = stage;
    outcome.hops = 0;
    outcome.path_delay = 0.0;
    return outcome;
}

TrialOutcome finish(TrialOutcome outcome, const ProtocolConfig& config)
{
    outcome.success = true;
    outcome.failure_stage = FailureStage::none;
    outcome.hops = outcome.attempts.size();
    outcome.path_delay = path_delay(outcome.attempts, config.T, config.T_e);
    return outcome;
}

const std::vector<NodeId> kNoSilencing;

} // namespace

std::string to_string(Protocol protocol)
{
    switch (protocol) {
    case Protocol::aodv:
        return "AODV";
    case Protocol::greedy:
        return "GF";
    case Protocol::max_progress:
        return "MP";
    }
    return "?";
}

std::string to_string(FailureStage stage)
{
    switch (stage) {
    case FailureStage::none:
        return "none";
    case FailureStage::discovery:
        return "discovery";
    case FailureStage::acknowledgement:
        return "acknowledgement";
    case FailureStage::delivery:
        return "delivery";
    case FailureStage::no_path:
        return "no-path";
    case FailureStage::horizon:
        return "horizon";
    }
    return "?";
}

std::string ProtocolConfig::label() const
{
    if (protocol != Protocol::greedy) {
        return to_string(protocol);
    }
    std::ostringstream out;
    out << "GF(r_t=" << r_t << ')';
    return out.str();
}

void ProtocolConfig::validate() const
{
    if (B < 1) {
        throw ArgumentError("B must be >= 1");
    }
    if (!(r_t > 0.0)) {
        throw ArgumentError("r_t must be positive");
    }
    if (!(r_g >= 0.0)) {
        throw ArgumentError("r_g must be >= 0");
    }
    if (!(T > 0.0) || !(T_e >= 0.0) || !(T_d >= 0.0)) {
        throw ArgumentError("delays must satisfy T > 0, T_e >= 0, T_d >= 0");
    }
}

bool link_eligible(const Topology& topology, const RoleAssignment& roles, const ProtocolConfig& config, NodeId from,
                   NodeId to)
{
    const NodeId dest = topology.destination();
    if (from == to || from == dest || to == topology.source()) {
        return false;
    }
    if (!roles.route_eligible(from) || !roles.route_eligible(to)) {
        return false;
    }
    if (config.protocol == Protocol::aodv) {
        return true;
    }
    if (!(topology.to_destination(to) < topology.to_destination(from))) {
        return false;
    }
    return config.protocol != Protocol::greedy || topology.distance(from, to) <= config.r_t;
}

std::vector<Link> eligible_links(const Topology& topology, const RoleAssignment& roles, const ProtocolConfig& config)
{
    std::vector<Link> links;
    const auto n = static_cast<NodeId>(topology.node_count());
    for (NodeId from = 0; from < n; ++from) {
        for (NodeId to = 0; to < n; ++to) {
            if (link_eligible(topology, roles, config, from, to)) {
                links.push_back({from, to});
            }
        }
    }
    return links;
}

std::optional<std::vector<NodeId>> aodv_discover(const Topology& topology, const RoleAssignment& roles,
                                                 const LinkPredicate& is_candidate, RandomStream& tiebreak)
{
    constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
    const auto n = static_cast<NodeId>(topology.node_count());
    const NodeId source = topology.source();
    const NodeId dest = topology.destination();

    std::vector<NodeId> targets;
    for (NodeId v = 1; v < n; ++v) {
        if (roles.route_eligible(v)) {
            targets.push_back(v);
        }
    }

    std::vector<std::size_t> hops(n, kUnreached);
    std::vector<double> path_count(n, 0.0);
    std::vector<std::vector<NodeId>> preds(n);
    using Entry = std::pair<std::size_t, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;

    hops[source] = 0;
    path_count[source] = 1.0;
    frontier.push({0, source});
    while (!frontier.empty()) {
        const auto [d, u] = frontier.top();
        frontier.pop();
        if (d > hops[u]) {
            continue;
        }
        if (u == dest) {
            break;
        }
        // Nodes at or beyond the destination's depth cannot precede it.
        if (hops[dest] != kUnreached && hops[dest] <= d) {
            continue;
        }
        const std::size_t next = d + 1;
        const bool dest_only = hops[dest] == next;
        for (NodeId v : targets) {
            if (dest_only && v != dest) {
                continue;
            }
            if (v == u || next > hops[v]) {
                continue;
            }
            if (!is_candidate(u, v)) {
                continue;
            }
            if (next < hops[v]) {
                hops[v] = next;
                path_count[v] = path_count[u];
                preds[v].assign(1, u);
                frontier.push({next, v});
            } else {
                path_count[v] += path_count[u];
                preds[v].push_back(u);
            }
        }
    }
    if (hops[dest] == kUnreached) {
        return std::nullopt;
    }

    // Walk back choosing each predecessor in proportion to the number of
    // fewest-hops paths through it: every such path is equally likely.
    std::vector<NodeId> path{dest};
    NodeId v = dest;
    while (v != source) {
        const auto& options = preds[v];
        NodeId chosen = options.front();
        if (options.size() > 1) {
            double target = tiebreak.uniform() * path_count[v];
            for (NodeId p : options) {
                chosen = p;
                target -= path_count[p];
                if (target < 0.0) {
                    break;
                }
            }
        }
        path.push_back(chosen);
        v = chosen;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

bool aodv_acknowledge(std::span<const NodeId> path, const LinkPredicate& reverse_ok)
{
    for (std::size_t i = path.size(); i-- > 1;) {
        if (!reverse_ok(path[i], path[i - 1])) {
            return false;
        }
    }
    return true;
}

std::optional<NodeId> greedy_next_hop(NodeId current, const Topology& topology, const RoleAssignment& roles,
                                      double r_t, RandomStream& tiebreak)
{
    ProtocolConfig config;
    config.protocol = Protocol::greedy;
    config.r_t = r_t;
    const auto n = static_cast<NodeId>(topology.node_count());
    const NodeId dest = topology.destination();
    if (link_eligible(topology, roles, config, current, dest)) {
        return dest;
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<NodeId> ties;
    for (NodeId v = 1; v < n; ++v) {
        if (!link_eligible(topology, roles, config, current, v)) {
            continue;
        }
        const double remaining = topology.to_destination(v);
        if (remaining < best) {
            best = remaining;
            ties.assign(1, v);
        } else if (remaining == best) {
            ties.push_back(v);
        }
    }
    if (ties.empty()) {
        return std::nullopt;
    }
    return pick_uniform(ties, tiebreak);
}

NextLink mp_next_link(NodeId current, const Topology& topology, const RoleAssignment& roles,
                      const LinkPredicate& forward_ok, const LinkPredicate& reverse_ok, RandomStream& tiebreak)
{
    ProtocolConfig config;
    config.protocol = Protocol::max_progress;
    const auto n = static_cast<NodeId>(topology.node_count());

    std::vector<std::pair<double, NodeId>> candidates;
    for (NodeId v = 1; v < n; ++v) {
        if (link_eligible(topology, roles, config, current, v)) {
            candidates.emplace_back(topology.to_destination(v), v);
        }
    }
    if (candidates.empty()) {
        return {std::nullopt, FailureStage::no_path};
    }
    std::sort(candidates.begin(), candidates.end());

    bool heard_rts = false;
    std::vector<NodeId> two_way;
    for (std::size_t begin = 0; begin < candidates.size();) {
        std::size_t end = begin;
        while (end < candidates.size() && candidates[end].first == candidates[begin].first) {
            ++end;
        }
        for (std::size_t i = begin; i < end; ++i) {
            const NodeId v = candidates[i].second;
            if (!forward_ok(current, v)) {
                continue;
            }
            heard_rts = true;
            if (reverse_ok(v, current)) {
                two_way.push_back(v);
            }
        }
        if (!two_way.empty()) {
            return {pick_uniform(two_way, tiebreak), FailureStage::none};
        }
        begin = end;
    }
    return {std::nullopt, heard_rts ? FailureStage::acknowledgement : FailureStage::discovery};
}

std::vector<NodeId> apply_guard_zone(NodeId message_source, std::span<const NodeId> interferers,
                                     const Topology& topology, double r_g, const LinkPredicate& link_ok)
{
    std::vector<NodeId> silenced;
    if (!(r_g > 0.0)) {
        return silenced;
    }
    for (NodeId i : interferers) {
        if (i == message_source || topology.distance(message_source, i) > r_g) {
            continue;
        }
        if (link_ok(message_source, i)) {
            silenced.push_back(i);
        }
    }
    std::sort(silenced.begin(), silenced.end());
    return silenced;
}

DeliveryResult deliver_over_link(Link link, int B, std::size_t first_slot, LinkState& state,
                                 std::span<const NodeId> silenced)
{
    if (B < 1) {
        throw ArgumentError("B must be >= 1");
    }
    DeliveryResult result;
    std::size_t slot = first_slot;
    for (int attempt = 1; attempt <= B; ++attempt) {
        if (slot >= state.num_slots()) {
            result.horizon = true;
            result.next_slot = slot;
            return result;
        }
        const bool outage = state.in_outage(slot++, link.from, link.to, silenced);
        if (!outage) {
            result.attempts = attempt;
            break;
        }
    }
    result.next_slot = slot;
    return result;
}

namespace {

// Delivers path.back() -> next and records the link, or returns the failure stage.
std::optional<FailureStage> deliver_hop(TrialOutcome& outcome, NodeId next, int B, std::size_t& slot,
                                        LinkState& state, std::span<const NodeId> silenced)
{
    const Link link{outcome.path.back(), next};
    outcome.delivery_slots.push_back(slot);
    const auto delivered = deliver_over_link(link, B, slot, state, silenced);
    slot = delivered.next_slot;
    if (!delivered.attempts) {
        return delivered.horizon ? FailureStage::horizon : FailureStage::delivery;
    }
    outcome.attempts.push_back(*delivered.attempts);
    outcome.path.push_back(next);
    return std::nullopt;
}

TrialOutcome run_aodv(const ProtocolConfig& config, const Topology& topology, const RoleAssignment& roles,
                      LinkState& state, RandomStream& tiebreak)
{
    TrialOutcome outcome;
    if (state.num_slots() < 2) {
        return fail(std::move(outcome), FailureStage::horizon);
    }
    const LinkPredicate request_ok = [&](NodeId u, NodeId v) { return !state.in_outage(0, u, v, kNoSilencing); };
    auto path = aodv_discover(topology, roles, request_ok, tiebreak);
    if (!path) {
        return fail(std::move(outcome), FailureStage::no_path);
    }
    const LinkPredicate ack_ok = [&](NodeId u, NodeId v) { return !state.in_outage(1, u, v, kNoSilencing); };
    if (!aodv_acknowledge(*path, ack_ok)) {
        outcome.path = std::move(*path);
        return fail(std::move(outcome), FailureStage::acknowledgement);
    }
    std::size_t slot = 2;
    outcome.path.push_back(path->front());
    for (std::size_t i = 1; i < path->size(); ++i) {
        if (auto stage = deliver_hop(outcome, (*path)[i], config.B, slot, state, kNoSilencing)) {
            outcome.path = std::move(*path);
            return fail(std::move(outcome), *stage);
        }
    }
    return finish(std::move(outcome), config);
}

TrialOutcome run_greedy(const ProtocolConfig& config, const Topology& topology, const RoleAssignment& roles,
                        LinkState& state, RandomStream& tiebreak)
{
    TrialOutcome outcome;
    outcome.path.push_back(topology.source());
    std::size_t slot = 0;
    while (outcome.path.back() != topology.destination()) {
        const auto next = greedy_next_hop(outcome.path.back(), topology, roles, config.r_t, tiebreak);
        if (!next) {
            return fail(std::move(outcome), FailureStage::no_path);
        }
        if (auto stage = deliver_hop(outcome, *next, config.B, slot, state, kNoSilencing)) {
            return fail(std::move(outcome), *stage);
        }
    }
    return finish(std::move(outcome), config);
}

TrialOutcome run_max_progress(const ProtocolConfig& config, const Topology& topology, const RoleAssignment& roles,
                              LinkState& state, RandomStream& tiebreak)
{
    TrialOutcome outcome;
    outcome.path.push_back(topology.source());
    const auto pool = roles.interferer_pool();
    std::size_t slot = 0;
    while (outcome.path.back() != topology.destination()) {
        if (slot >= state.num_slots()) {
            return fail(std::move(outcome), FailureStage::horizon);
        }
        const NodeId current = outcome.path.back();
        const std::size_t handshake = slot++;
        const LinkPredicate heard = [&](NodeId u, NodeId v) {
            return !state.in_outage(handshake, u, v, kNoSilencing);
        };
        const auto next = mp_next_link(current, topology, roles, heard, heard, tiebreak);
        if (!next.relay) {
            return fail(std::move(outcome), next.failure);
        }
        // Guard zones of the RTS sender and of the CTS sender; cleared every hop.
        auto silenced = apply_guard_zone(current, pool, topology, config.r_g, heard);
        const auto around_relay = apply_guard_zone(*next.relay, pool, topology, config.r_g, heard);
        std::vector<NodeId> merged;
        std::set_union(silenced.begin(), silenced.end(), around_relay.begin(), around_relay.end(),
                       std::back_inserter(merged));
        outcome.silenced.push_back(merged);
        if (auto stage = deliver_hop(outcome, *next.relay, config.B, slot, state, merged)) {
            return fail(std::move(outcome), *stage);
        }
    }
    return finish(std::move(outcome), config);
}

} // namespace

TrialOutcome run_trial(const ProtocolConfig& config, const Topology& topology, const RoleAssignment& roles,
                       LinkState& state, RandomStream& tiebreak)
{
    if (roles.node_count() != topology.node_count()) {
        throw ArgumentError("roles do not match the topology");
    }
    switch (config.protocol) {
    case Protocol::aodv:
        return run_aodv(config, topology, roles, state, tiebreak);
    case Protocol::greedy:
        return run_greedy(config, topology, roles, state, tiebreak);
    case Protocol::max_progress:
        return run_max_progress(config, topology, roles, state, tiebreak);
    }
    throw ArgumentError("unknown protocol");
}

} // namespace manet
