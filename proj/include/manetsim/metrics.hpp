#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "manetsim/protocols.hpp"

namespace manet {

/// N_l T + (N_l - 1) T_e.
double link_delay(int attempts, double T, double T_e);
/// Sum of link delays over a path.
double path_delay(std::span<const int> attempts, double T, double T_e);

/// Density of possible transmitters, (M+1) / (pi r_net^2).
double transmitter_density(std::size_t mobiles, double r_net);

struct Densities {
    double relay = 0.0;      ///< lambda mu
    double contention = 0.0; ///< lambda p (1 - mu)
};

Densities densities(double lambda, double mu, double p);

struct TopologyMetrics {
    double R = 0.0;                ///< path reliability
    std::optional<double> H;       ///< mean hops over successful trials
    std::optional<double> D;       ///< mean end-to-end delay over successful trials
    double A = 0.0;                ///< normalized area spectral efficiency
    std::size_t F = 0;             ///< routing failures
    std::size_t K = 0;             ///< trials
    std::optional<double> min_delay;

    // Phase reliabilities. Each is conditional on the previous phases having
    // succeeded and is empty when no trial reached the phase.
    std::optional<double> request;
    std::optional<double> acknowledgement;
    std::optional<double> delivery;
};

/// Streaming form of the per-topology metrics. Accumulators over disjoint
/// trial sets merge by addition.
class MetricsAccumulator {
public:
    MetricsAccumulator(const ProtocolConfig& config, double lambda);

    void add(const TrialOutcome& outcome);
    void merge(const MetricsAccumulator& other);
    TopologyMetrics finish() const;

private:
    ProtocolConfig config_;
    double lambda_;
    std::size_t trials_ = 0;
    std::size_t successes_ = 0;
    std::size_t request_failures_ = 0;
    std::size_t ack_failures_ = 0;
    double hop_sum_ = 0.0;
    double delay_sum_ = 0.0;
    double inverse_delay_sum_ = 0.0;
    std::optional<double> min_delay_;
};

TopologyMetrics topology_metrics(std::span<const TrialOutcome> trials, const ProtocolConfig& config, double lambda);

/// Unweighted means over topologies with standard errors of the mean.
struct AveragedMetrics {
    std::size_t topologies = 0;
    double R = 0.0;
    double R_se = 0.0;
    double A = 0.0;
    double A_se = 0.0;
    std::optional<double> H;
    std::optional<double> H_se;
    std::optional<double> D;
    std::optional<double> D_se;
    std::size_t conditional_topologies = 0; ///< topologies contributing to H and D
    std::optional<double> request;
    std::optional<double> acknowledgement;
    std::optional<double> delivery;
};

/// Topologies with no successful trial count toward R and A but are left out
/// of the H and D means; undefined phase reliabilities are skipped the same way.
AveragedMetrics topological_averages(std::span<const TopologyMetrics> per_topology);

} // namespace manet
