#pragma once

#include <cstdint>
#include <vector>

#include "manetsim/random.hpp"
#include "manetsim/topology.hpp"

namespace manet {

/// Propagation and detection parameters, all linear except `sigma_s_db`.
struct ChannelParams {
    double alpha = 3.5;      ///< path-loss exponent
    double sigma_s_db = 8.0; ///< lognormal shadowing spread, 0 disables shadowing
    double r_f = 0.2;        ///< line-of-sight radius for distance-dependent fading
    double G_over_h = 96.0;  ///< interference suppression after despreading
    double gamma = 1.0;      ///< SNR at unit distance; +inf means noiseless
    double beta = 1.0;       ///< SINR threshold

    /// Inverse reference SNR.
    double z() const noexcept { return 1.0 / gamma; }
    void validate() const;
};

double db_to_linear(double db) noexcept;

/// Reciprocal per-link shadowing factors in dB, fixed for a topology.
class ShadowingField {
public:
    ShadowingField() = default;
    explicit ShadowingField(std::size_t nodes);

    std::size_t size() const noexcept { return nodes_; }
    double db(NodeId i, NodeId j) const noexcept;
    void set(NodeId i, NodeId j, double value) noexcept;

private:
    std::size_t index(NodeId i, NodeId j) const noexcept;

    std::size_t nodes_ = 0;
    std::vector<double> upper_; // packed strict upper triangle
};

/// One zero-mean Gaussian draw per unordered node pair.
ShadowingField draw_shadowing(const Topology& topology, double sigma_s_db, RandomStream& rng);

/// Distance-dependent Nakagami parameter: 3 within r_f/2, 2 within r_f, else 1.
int nakagami_m(double d, double r_f);

enum class SignalKind { desired, interferer };

/// Normalized received power for equal transmit powers and unit reference distance.
double normalized_power(SignalKind kind, double d, double xi_db, const ChannelParams& params);

/// Per-topology table of normalized desired powers and fading parameters for
/// every ordered node pair. Interferer powers are the desired powers scaled by h/G.
class LinkBudget {
public:
    LinkBudget(const Topology& topology, const ShadowingField& shadowing, const ChannelParams& params);

    const Topology& topology() const noexcept { return *topology_; }
    const ChannelParams& params() const noexcept { return params_; }
    std::size_t node_count() const noexcept { return n_; }

    double desired_power(NodeId tx, NodeId rx) const noexcept { return omega_[tx * n_ + rx]; }
    double interference_power(NodeId tx, NodeId rx) const noexcept { return omega_[tx * n_ + rx] * h_over_g_; }
    int fading(NodeId tx, NodeId rx) const noexcept { return fading_[tx * n_ + rx]; }

private:
    const Topology* topology_;
    ChannelParams params_;
    std::size_t n_;
    double h_over_g_;
    std::vector<double> omega_;
    std::vector<std::int8_t> fading_;
};

} // namespace manet
