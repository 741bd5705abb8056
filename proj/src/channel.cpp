#include "manetsim/channel.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "manetsim/errors.hpp"

namespace manet {

void ChannelParams::validate() const
{
    if (!(alpha >= 2.0)) {
        throw ArgumentError("alpha must be >= 2");
    }
    if (!(sigma_s_db >= 0.0)) {
        throw ArgumentError("sigma_s must be >= 0 dB");
    }
    if (!(r_f >= 0.0)) {
        throw ArgumentError("r_f must be >= 0");
    }
    if (!(G_over_h >= 1.0)) {
        throw ArgumentError("G/h must be >= 1");
    }
    if (!(gamma > 0.0)) {
        throw ArgumentError("reference SNR must be positive");
    }
    if (!(beta > 0.0) || std::isinf(beta)) {
        throw ArgumentError("SINR threshold must be positive and finite");
    }
}

double db_to_linear(double db) noexcept
{
    return std::pow(10.0, db / 10.0);
}

ShadowingField::ShadowingField(std::size_t nodes)
    : nodes_(nodes), upper_(nodes * (nodes > 0 ? nodes - 1 : 0) / 2, 0.0)
{
}

std::size_t ShadowingField::index(NodeId i, NodeId j) const noexcept
{
    if (i > j) {
        std::swap(i, j);
    }
    // Row i of the strict upper triangle starts after sum_{r<i} (n-1-r) entries.
    return static_cast<std::size_t>(i) * (2 * nodes_ - i - 1) / 2 + (j - i - 1);
}

double ShadowingField::db(NodeId i, NodeId j) const noexcept
{
    return i == j ? 0.0 : upper_[index(i, j)];
}

void ShadowingField::set(NodeId i, NodeId j, double value) noexcept
{
    if (i != j) {
        upper_[index(i, j)] = value;
    }
}

ShadowingField draw_shadowing(const Topology& topology, double sigma_s_db, RandomStream& rng)
{
    if (!(sigma_s_db >= 0.0)) {
        throw ArgumentError("sigma_s must be >= 0 dB");
    }
    const auto n = topology.node_count();
    ShadowingField field(n);
    if (sigma_s_db == 0.0) {
        return field;
    }
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            field.set(i, j, rng.normal(0.0, sigma_s_db));
        }
    }
    return field;
}

int nakagami_m(double d, double r_f)
{
    if (d <= r_f / 2.0) {
        return 3;
    }
    if (d <= r_f) {
        return 2;
    }
    return 1;
}

double normalized_power(SignalKind kind, double d, double xi_db, const ChannelParams& params)
{
    if (!(d > 0.0)) {
        throw DomainError("normalized power needs a positive distance, got " + std::to_string(d));
    }
    const double power = db_to_linear(xi_db) * std::pow(d, -params.alpha);
    return kind == SignalKind::desired ? power : power / params.G_over_h;
}

LinkBudget::LinkBudget(const Topology& topology, const ShadowingField& shadowing, const ChannelParams& params)
    : topology_(&topology),
      params_(params),
      n_(topology.node_count()),
      h_over_g_(1.0 / params.G_over_h),
      omega_(n_ * n_, 0.0),
      fading_(n_ * n_, 0)
{
    params_.validate();
    if (shadowing.size() != n_) {
        throw ArgumentError("shadowing field does not match the topology");
    }
    for (NodeId i = 0; i < n_; ++i) {
        for (NodeId j = i + 1; j < n_; ++j) {
            const double d = topology.distance(i, j);
            const double omega = normalized_power(SignalKind::desired, d, shadowing.db(i, j), params_);
            const auto m = static_cast<std::int8_t>(nakagami_m(d, params_.r_f));
            omega_[i * n_ + j] = omega_[j * n_ + i] = omega;
            fading_[i * n_ + j] = fading_[j * n_ + i] = m;
        }
    }
}

} // namespace manet
