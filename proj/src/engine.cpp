#include "manetsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "manetsim/errors.hpp"

namespace manet {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

bool contains_sorted(std::span<const NodeId> sorted, NodeId value) noexcept
{
    return std::binary_search(sorted.begin(), sorted.end(), value);
}

void check_probability(double value, const char* name)
{
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ArgumentError(std::string(name) + " must lie in [0, 1]");
    }
}

} // namespace

RoleAssignment::RoleAssignment(std::vector<bool> is_relay) : is_relay_(std::move(is_relay))
{
    if (is_relay_.size() < 2) {
        throw ArgumentError("role assignment needs source and destination entries");
    }
    is_relay_.front() = false;
    is_relay_.back() = false;
}

std::vector<NodeId> RoleAssignment::relays() const
{
    std::vector<NodeId> out;
    for (NodeId i = 1; i + 1 < is_relay_.size(); ++i) {
        if (is_relay_[i]) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<NodeId> RoleAssignment::interferer_pool() const
{
    std::vector<NodeId> out;
    for (NodeId i = 1; i + 1 < is_relay_.size(); ++i) {
        if (!is_relay_[i]) {
            out.push_back(i);
        }
    }
    return out;
}

RoleAssignment mark_roles(const Topology& topology, double mu, const RandomStream& rng)
{
    check_probability(mu, "mu");
    std::vector<bool> relay(topology.node_count(), false);
    for (NodeId i = 1; i + 1 < relay.size(); ++i) {
        relay[i] = rng.uniform_at({i}) < mu;
    }
    return RoleAssignment(std::move(relay));
}

std::vector<InterfererSet> draw_interferer_sets(const RoleAssignment& roles, double p, std::size_t num_slots,
                                                const RandomStream& rng)
{
    check_probability(p, "p");
    if (num_slots == 0) {
        throw ArgumentError("at least one slot is required");
    }
    const auto pool = roles.interferer_pool();
    std::vector<InterfererSet> sets(num_slots);
    for (std::size_t slot = 0; slot < num_slots; ++slot) {
        for (NodeId i : pool) {
            if (rng.uniform_at({slot, i}) < p) {
                sets[slot].push_back(i);
            }
        }
    }
    return sets;
}

std::size_t slot_horizon(std::size_t max_hops, int B)
{
    if (B < 1) {
        throw ArgumentError("B must be >= 1");
    }
    return max_hops * static_cast<std::size_t>(B) + 2;
}

double link_outage(const LinkBudget& budget, NodeId tx, NodeId rx, std::span<const NodeId> active,
                   std::span<const NodeId> silenced, std::vector<InterfererTerm>& scratch)
{
    if (tx == rx) {
        throw ArgumentError("a link needs distinct endpoints");
    }
    scratch.clear();
    for (NodeId i : active) {
        if (i == tx || i == rx || contains_sorted(silenced, i)) {
            continue;
        }
        scratch.push_back({budget.interference_power(i, rx), budget.fading(i, rx)});
    }
    const auto& params = budget.params();
    return outage_probability(budget.desired_power(tx, rx), budget.fading(tx, rx), scratch, params.beta, params.z());
}

OutageMatrix::OutageMatrix(std::size_t nodes) : n_(nodes), values_(nodes * nodes, kUnset) {}

bool OutageMatrix::defined(NodeId tx, NodeId rx) const noexcept
{
    return !std::isnan(at(tx, rx));
}

OutageMatrix build_outage_matrix(const LinkBudget& budget, const RoleAssignment& roles,
                                 const InterfererSet& interferers, const InterfererSet& silenced)
{
    const auto n = budget.node_count();
    if (roles.node_count() != n) {
        throw ArgumentError("roles do not match the topology");
    }
    InterfererSet removed = silenced;
    std::sort(removed.begin(), removed.end());
    OutageMatrix matrix(n);
    std::vector<InterfererTerm> scratch;
    for (NodeId k = 0; k < n; ++k) {
        if (!roles.route_eligible(k)) {
            continue;
        }
        for (NodeId j = 0; j < n; ++j) {
            if (j == k || !roles.route_eligible(j)) {
                continue;
            }
            matrix.set(k, j, link_outage(budget, k, j, interferers, removed, scratch));
        }
    }
    return matrix;
}

OutageDraws realize_outages(const OutageMatrix& matrix, const RandomStream& rng)
{
    const auto n = matrix.size();
    OutageDraws draws(n);
    for (NodeId k = 0; k < n; ++k) {
        for (NodeId j = 0; j < n; ++j) {
            if (!matrix.defined(k, j)) {
                continue;
            }
            const double epsilon = matrix.at(k, j);
            if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
                throw ArgumentError("outage matrix entry outside [0, 1]");
            }
            draws.set(k, j, rng.uniform_at({k, j}) < epsilon);
        }
    }
    return draws;
}

SlotRealization realize_slot(const LinkBudget& budget, const RoleAssignment& roles, std::size_t slot_index,
                             const InterfererSet& interferers, const InterfererSet& silenced,
                             const RandomStream& rng)
{
    auto matrix = build_outage_matrix(budget, roles, interferers, silenced);
    auto draws = realize_outages(matrix, rng.child(slot_index));
    return SlotRealization{slot_index, interferers, std::move(matrix), std::move(draws)};
}

void SlotOutageCache::reset(const LinkBudget& budget, std::vector<InterfererSet> slot_sets)
{
    const auto n = budget.node_count();
    if (n >= (1u << 16) || slot_sets.size() >= (1u << 16)) {
        throw ArgumentError("outage cache supports fewer than 65536 nodes and slots");
    }
    budget_ = &budget;
    slot_sets_ = std::move(slot_sets);
    if (first_slot_.size() != n * n) {
        first_slot_.assign(n * n, 0.0);
        first_slot_stamp_.assign(n * n, 0);
        generation_ = 0;
    }
    if (++generation_ == 0) {
        std::fill(first_slot_stamp_.begin(), first_slot_stamp_.end(), 0);
        generation_ = 1;
    }
    sparse_.clear();
    silenced_sets_.clear();
    silenced_sets_.emplace_back();
}

std::uint32_t SlotOutageCache::silenced_id(std::span<const NodeId> silenced)
{
    for (std::size_t id = 0; id < silenced_sets_.size(); ++id) {
        const auto& known = silenced_sets_[id];
        if (std::equal(known.begin(), known.end(), silenced.begin(), silenced.end())) {
            return static_cast<std::uint32_t>(id);
        }
    }
    silenced_sets_.emplace_back(silenced.begin(), silenced.end());
    return static_cast<std::uint32_t>(silenced_sets_.size() - 1);
}

double SlotOutageCache::evaluate(std::size_t slot, NodeId tx, NodeId rx, std::span<const NodeId> silenced)
{
    ++evaluations_;
    return link_outage(*budget_, tx, rx, slot_sets_[slot], silenced, scratch_);
}

double SlotOutageCache::outage(std::size_t slot, NodeId tx, NodeId rx, std::span<const NodeId> silenced)
{
    if (budget_ == nullptr) {
        throw ArgumentError("outage cache used before reset");
    }
    if (slot >= slot_sets_.size()) {
        throw ArgumentError("slot " + std::to_string(slot) + " beyond the slot horizon");
    }
    const auto n = budget_->node_count();
    if (slot == 0 && silenced.empty()) {
        const auto index = static_cast<std::size_t>(tx) * n + rx;
        if (first_slot_stamp_[index] != generation_) {
            first_slot_[index] = evaluate(slot, tx, rx, silenced);
            first_slot_stamp_[index] = generation_;
        }
        return first_slot_[index];
    }
    const std::uint32_t id = silenced_id(silenced);
    if (id >= (1u << 16)) {
        return evaluate(slot, tx, rx, silenced);
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(slot) << 48) | (static_cast<std::uint64_t>(tx) << 32)
                              | (static_cast<std::uint64_t>(rx) << 16) | id;
    auto [it, inserted] = sparse_.try_emplace(key, 0.0);
    if (inserted) {
        it->second = evaluate(slot, tx, rx, silenced);
    }
    return it->second;
}

bool LinkRealization::in_outage(std::size_t slot, NodeId tx, NodeId rx, std::span<const NodeId> silenced)
{
    return draw(slot, tx, rx) < cache_->outage(slot, tx, rx, silenced);
}

} // namespace manet
