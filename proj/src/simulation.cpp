#include "manetsim/simulation.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <string_view>
#include <thread>

#include "manetsim/errors.hpp"

namespace manet {

namespace {

enum StreamTag : std::uint64_t { kPlacement = 0, kShadowing = 1, kRoles = 2 };

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::size_t horizon_for(const Scenario& scenario, std::span<const ProtocolConfig> protocols)
{
    int B = 1;
    for (const auto& p : protocols) {
        B = std::max(B, p.B);
    }
    return slot_horizon(scenario.max_hops, B);
}

} // namespace

double Scenario::lambda() const
{
    return transmitter_density(placement.mobiles, placement.r_net);
}

std::uint64_t protocol_tag(const ProtocolConfig& config)
{
    return fnv1a(config.label());
}

std::vector<TopologyMetrics> simulate_topology(const Scenario& scenario, std::span<const ProtocolConfig> protocols,
                                               std::size_t topology_index, SlotOutageCache& cache,
                                               const TrialObserver& observer)
{
    const RandomStream stream = RandomStream(scenario.seed).child(topology_index);
    auto placement_rng = stream.child(kPlacement);
    const Topology topology = scenario.fixed_topology ? *scenario.fixed_topology
                                                      : generate_topology(scenario.placement, placement_rng);
    auto shadowing_rng = stream.child(kShadowing);
    const ShadowingField shadowing = draw_shadowing(topology, scenario.channel.sigma_s_db, shadowing_rng);
    const LinkBudget budget(topology, shadowing, scenario.channel);
    const std::size_t horizon = horizon_for(scenario, protocols);
    const double lambda = scenario.lambda();

    std::vector<MetricsAccumulator> accumulators;
    std::vector<std::uint64_t> tags;
    for (const auto& config : protocols) {
        accumulators.emplace_back(config, lambda);
        tags.push_back(protocol_tag(config));
    }

    const RandomStream roles_root = stream.child(kRoles);
    for (std::size_t k1 = 0; k1 < scenario.layers.roles; ++k1) {
        const RandomStream role_stream = roles_root.child(k1);
        const RoleAssignment roles = mark_roles(topology, scenario.mu, role_stream);
        for (std::size_t k2 = 0; k2 < scenario.layers.slot_sets; ++k2) {
            const RandomStream slot_stream = role_stream.child(k2);
            cache.reset(budget, draw_interferer_sets(roles, scenario.p, horizon, slot_stream));
            for (std::size_t k3 = 0; k3 < scenario.layers.realizations; ++k3) {
                const RandomStream draw_stream = slot_stream.child(k3);
                LinkRealization links(cache, draw_stream);
                for (std::size_t k = 0; k < protocols.size(); ++k) {
                    auto tiebreak = draw_stream.child(tags[k]);
                    const auto outcome = run_trial(protocols[k], topology, roles, links, tiebreak);
                    accumulators[k].add(outcome);
                    if (observer) {
                        observer(TrialContext{topology_index, topology, budget, roles, links, protocols[k]},
                                 outcome);
                    }
                }
            }
        }
    }

    std::vector<TopologyMetrics> metrics;
    metrics.reserve(accumulators.size());
    for (const auto& acc : accumulators) {
        metrics.push_back(acc.finish());
    }
    return metrics;
}

SimulationResult simulate(const Scenario& scenario, std::span<const ProtocolConfig> protocols,
                          const SimulationOptions& options)
{
    if (protocols.empty()) {
        throw ArgumentError("no protocols to simulate");
    }
    if (scenario.layers.topologies == 0 || scenario.layers.trials_per_topology() == 0) {
        throw ArgumentError("every layer needs at least one iteration");
    }
    scenario.channel.validate();
    for (const auto& p : protocols) {
        p.validate();
    }

    const std::size_t total = scenario.layers.topologies;
    std::vector<std::optional<std::vector<TopologyMetrics>>> results(total);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex mutex;
    std::size_t done = 0;

    auto work = [&] {
        SlotOutageCache cache;
        while (!failed.load()) {
            if (options.stop != nullptr && options.stop->load()) {
                return;
            }
            const std::size_t t = next.fetch_add(1);
            if (t >= total) {
                return;
            }
            try {
                results[t] = simulate_topology(scenario, protocols, t, cache, options.observer);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
                return;
            }
            if (options.progress) {
                std::lock_guard lock(mutex);
                options.progress(++done, total);
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, total));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    SimulationResult out;
    out.per_protocol.resize(protocols.size());
    // Only the contiguous prefix is kept so interrupted runs stay reproducible.
    while (out.completed_topologies < total && results[out.completed_topologies]) {
        const auto& metrics = *results[out.completed_topologies];
        for (std::size_t k = 0; k < protocols.size(); ++k) {
            out.per_protocol[k].push_back(metrics[k]);
        }
        ++out.completed_topologies;
    }
    out.interrupted = out.completed_topologies < total;
    return out;
}

} // namespace manet
