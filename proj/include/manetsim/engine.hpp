#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "manetsim/channel.hpp"
#include "manetsim/outage.hpp"
#include "manetsim/random.hpp"
#include "manetsim/topology.hpp"

namespace manet {

/// Relay / interferer marking of the mobiles for one second-layer iteration.
/// Source and destination are never relays-in-waiting and never interfere.
class RoleAssignment {
public:
    RoleAssignment() = default;
    explicit RoleAssignment(std::vector<bool> is_relay);

    std::size_t node_count() const noexcept { return is_relay_.size(); }
    bool is_relay(NodeId i) const noexcept { return is_relay_[i]; }
    bool is_endpoint(NodeId i) const noexcept { return i == 0 || i + 1 == is_relay_.size(); }
    /// An endpoint or a potential relay.
    bool route_eligible(NodeId i) const noexcept { return is_endpoint(i) || is_relay_[i]; }
    bool potential_interferer(NodeId i) const noexcept { return !route_eligible(i); }

    std::vector<NodeId> relays() const;
    std::vector<NodeId> interferer_pool() const;

private:
    std::vector<bool> is_relay_;
};

RoleAssignment mark_roles(const Topology& topology, double mu, const RandomStream& rng);

/// Sorted indices of the mobiles transmitting interference in one slot.
using InterfererSet = std::vector<NodeId>;

/// Per-slot Aloha draws over the fixed pool of potential interferers.
std::vector<InterfererSet> draw_interferer_sets(const RoleAssignment& roles, double p, std::size_t num_slots,
                                                const RandomStream& rng);

/// Slots needed for max_hops delivery hops of up to B attempts plus two
/// discovery slots.
std::size_t slot_horizon(std::size_t max_hops, int B);

/// Outage probability of tx -> rx when `active` transmit interference and the
/// members of `silenced` (sorted) have been removed. tx and rx never count as
/// interferers of their own link. `scratch` is reused across calls.
double link_outage(const LinkBudget& budget, NodeId tx, NodeId rx, std::span<const NodeId> active,
                   std::span<const NodeId> silenced, std::vector<InterfererTerm>& scratch);

/// Dense n x n matrix over node indices; entries outside the evaluated set are NaN.
class OutageMatrix {
public:
    explicit OutageMatrix(std::size_t nodes);

    std::size_t size() const noexcept { return n_; }
    double at(NodeId tx, NodeId rx) const noexcept { return values_[tx * n_ + rx]; }
    void set(NodeId tx, NodeId rx, double value) noexcept { values_[tx * n_ + rx] = value; }
    bool defined(NodeId tx, NodeId rx) const noexcept;

private:
    std::size_t n_;
    std::vector<double> values_;
};

/// Outage probabilities for every ordered pair of route-eligible nodes.
OutageMatrix build_outage_matrix(const LinkBudget& budget, const RoleAssignment& roles,
                                 const InterfererSet& interferers, const InterfererSet& silenced);

/// Independent Bernoulli(entry) draw for every defined entry; true = outage.
class OutageDraws {
public:
    explicit OutageDraws(std::size_t nodes) : n_(nodes), outage_(nodes * nodes, 0) {}

    bool at(NodeId tx, NodeId rx) const noexcept { return outage_[tx * n_ + rx] != 0; }
    void set(NodeId tx, NodeId rx, bool value) noexcept { outage_[tx * n_ + rx] = value ? 1 : 0; }

private:
    std::size_t n_;
    std::vector<std::uint8_t> outage_;
};

OutageDraws realize_outages(const OutageMatrix& matrix, const RandomStream& rng);

/// One slot of a layered realization.
struct SlotRealization {
    std::size_t slot_index = 0;
    InterfererSet interferer_set;
    OutageMatrix outage_matrix;
    OutageDraws outage_draws;
};

SlotRealization realize_slot(const LinkBudget& budget, const RoleAssignment& roles, std::size_t slot_index,
                             const InterfererSet& interferers, const InterfererSet& silenced,
                             const RandomStream& rng);

/// Link outcomes seen by a routing protocol during one trial.
class LinkState {
public:
    virtual ~LinkState() = default;
    virtual std::size_t num_slots() const = 0;
    /// True when transmission tx -> rx in `slot` is in outage. `silenced` is
    /// sorted and lists interferers removed by guard zones.
    virtual bool in_outage(std::size_t slot, NodeId tx, NodeId rx, std::span<const NodeId> silenced) = 0;
};

/// Lazily evaluated, memoized outage matrices for every (slot, silenced set)
/// of one third-layer iteration. Entries are computed on first use and shared
/// by all bottom-layer realizations and protocols.
class SlotOutageCache {
public:
    SlotOutageCache() = default;

    /// Starts a new third-layer iteration. `budget` must outlive the cache use.
    void reset(const LinkBudget& budget, std::vector<InterfererSet> slot_sets);

    std::size_t num_slots() const noexcept { return slot_sets_.size(); }
    const InterfererSet& interferers(std::size_t slot) const { return slot_sets_.at(slot); }
    double outage(std::size_t slot, NodeId tx, NodeId rx, std::span<const NodeId> silenced);

    std::size_t evaluations() const noexcept { return evaluations_; }

private:
    std::uint32_t silenced_id(std::span<const NodeId> silenced);
    double evaluate(std::size_t slot, NodeId tx, NodeId rx, std::span<const NodeId> silenced);

    const LinkBudget* budget_ = nullptr;
    std::vector<InterfererSet> slot_sets_;
    std::vector<InterfererTerm> scratch_;
    // Slot 0 without silencing is read densely (route discovery touches most links).
    std::vector<double> first_slot_;
    std::vector<std::uint32_t> first_slot_stamp_;
    std::uint32_t generation_ = 0;
    std::unordered_map<std::uint64_t, double> sparse_;
    std::vector<std::vector<NodeId>> silenced_sets_;
    std::size_t evaluations_ = 0;
};

/// Bottom-layer realization: counter-based Bernoulli draws against the cached
/// matrices, so each (slot, tx, rx) draw is fixed regardless of access order.
class LinkRealization final : public LinkState {
public:
    LinkRealization(SlotOutageCache& cache, RandomStream stream) : cache_(&cache), stream_(stream) {}

    std::size_t num_slots() const override { return cache_->num_slots(); }
    bool in_outage(std::size_t slot, NodeId tx, NodeId rx, std::span<const NodeId> silenced) override;

    /// The uniform compared against the outage probability.
    double draw(std::size_t slot, NodeId tx, NodeId rx) const noexcept
    {
        return stream_.uniform_at({slot, tx, rx});
    }
    SlotOutageCache& cache() const noexcept { return *cache_; }

private:
    SlotOutageCache* cache_;
    RandomStream stream_;
};

} // namespace manet
