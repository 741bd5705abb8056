#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "manetsim/engine.hpp"
#include "manetsim/random.hpp"
#include "manetsim/topology.hpp"

namespace manet::test {

inline RoleAssignment all_relays(std::size_t nodes)
{
    return RoleAssignment(std::vector<bool>(nodes, true));
}

/// Link state driven by a caller-supplied rule; deterministic.
class ScriptedLinks final : public LinkState {
public:
    using Rule = std::function<bool(std::size_t slot, NodeId tx, NodeId rx, std::span<const NodeId> silenced)>;

    ScriptedLinks(std::size_t slots, Rule rule) : slots_(slots), rule_(std::move(rule)) {}

    std::size_t num_slots() const override { return slots_; }
    bool in_outage(std::size_t slot, NodeId tx, NodeId rx, std::span<const NodeId> silenced) override
    {
        return rule_(slot, tx, rx, silenced);
    }

private:
    std::size_t slots_;
    Rule rule_;
};

/// Fresh Bernoulli(epsilon(tx, rx)) draw on every query.
class BernoulliLinks final : public LinkState {
public:
    using Epsilon = std::function<double(std::size_t slot, NodeId tx, NodeId rx)>;

    BernoulliLinks(std::size_t slots, Epsilon eps, RandomStream& rng) : slots_(slots), eps_(std::move(eps)), rng_(&rng)
    {
    }

    std::size_t num_slots() const override { return slots_; }
    bool in_outage(std::size_t slot, NodeId tx, NodeId rx, std::span<const NodeId>) override
    {
        return rng_->uniform() < eps_(slot, tx, rx);
    }

private:
    std::size_t slots_;
    Epsilon eps_;
    RandomStream* rng_;
};

/// |observed - expected| within k binomial standard deviations of a proportion.
inline bool within_binomial(double observed, double p, std::size_t n, double k = 3.0)
{
    return std::abs(observed - p) <= k * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

} // namespace manet::test
