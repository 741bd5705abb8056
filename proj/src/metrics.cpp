#include "manetsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "manetsim/errors.hpp"

namespace manet {

namespace {

// Phase in which a failure stage is charged. Greedy forwarding has no
// discovery phase, so a void at a relay counts against delivery.
enum class Phase { request, acknowledgement, delivery };

Phase phase_of(FailureStage stage, Protocol protocol)
{
    switch (stage) {
    case FailureStage::discovery:
        return Phase::request;
    case FailureStage::no_path:
        return protocol == Protocol::greedy ? Phase::delivery : Phase::request;
    case FailureStage::acknowledgement:
        return Phase::acknowledgement;
    default:
        return Phase::delivery;
    }
}

struct MeanAndError {
    std::optional<double> mean;
    std::optional<double> se;
};

MeanAndError mean_of(const std::vector<double>& values)
{
    MeanAndError out;
    if (values.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double n = static_cast<double>(values.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    out.mean = mean;
    out.se = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return out;
}

std::optional<double> ratio(std::size_t num, std::size_t den)
{
    if (den == 0) {
        return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

double link_delay(int attempts, double T, double T_e)
{
    if (attempts < 1) {
        throw DomainError("a delivered link needs at least one attempt");
    }
    return attempts * T + (attempts - 1) * T_e;
}

double path_delay(std::span<const int> attempts, double T, double T_e)
{
    if (attempts.empty()) {
        throw ArgumentError("path delay of an empty path");
    }
    double total = 0.0;
    for (int n : attempts) {
        total += link_delay(n, T, T_e);
    }
    return total;
}

double transmitter_density(std::size_t mobiles, double r_net)
{
    return static_cast<double>(mobiles + 1) / (std::numbers::pi * r_net * r_net);
}

Densities densities(double lambda, double mu, double p)
{
    if (!(mu >= 0.0 && mu <= 1.0) || !(p >= 0.0 && p <= 1.0)) {
        throw ArgumentError("mu and p must lie in [0, 1]");
    }
    return {lambda * mu, lambda * p * (1.0 - mu)};
}

MetricsAccumulator::MetricsAccumulator(const ProtocolConfig& config, double lambda)
    : config_(config), lambda_(lambda)
{
}

void MetricsAccumulator::add(const TrialOutcome& outcome)
{
    ++trials_;
    if (!outcome.success) {
        switch (phase_of(outcome.failure_stage, config_.protocol)) {
        case Phase::request:
            ++request_failures_;
            break;
        case Phase::acknowledgement:
            ++ack_failures_;
            break;
        case Phase::delivery:
            break;
        }
        return;
    }
    ++successes_;
    const double hops = static_cast<double>(outcome.hops);
    const double delay = outcome.path_delay + 2.0 * config_.c() * hops * config_.T_d;
    hop_sum_ += hops;
    delay_sum_ += delay;
    inverse_delay_sum_ += 1.0 / delay;
    min_delay_ = min_delay_ ? std::min(*min_delay_, delay) : delay;
}

void MetricsAccumulator::merge(const MetricsAccumulator& other)
{
    trials_ += other.trials_;
    successes_ += other.successes_;
    request_failures_ += other.request_failures_;
    ack_failures_ += other.ack_failures_;
    hop_sum_ += other.hop_sum_;
    delay_sum_ += other.delay_sum_;
    inverse_delay_sum_ += other.inverse_delay_sum_;
    if (other.min_delay_) {
        min_delay_ = min_delay_ ? std::min(*min_delay_, *other.min_delay_) : *other.min_delay_;
    }
}

TopologyMetrics MetricsAccumulator::finish() const
{
    if (trials_ == 0) {
        throw ArgumentError("topology metrics need at least one trial");
    }
    TopologyMetrics m;
    m.K = trials_;
    m.F = trials_ - successes_;
    m.R = 1.0 - static_cast<double>(m.F) / static_cast<double>(m.K);
    if (successes_ > 0) {
        m.H = hop_sum_ / static_cast<double>(successes_);
        m.D = delay_sum_ / static_cast<double>(successes_);
    }
    m.A = lambda_ / static_cast<double>(m.K) * inverse_delay_sum_;
    m.min_delay = min_delay_;

    const std::size_t past_request = trials_ - request_failures_;
    const std::size_t past_ack = past_request - ack_failures_;
    m.request = ratio(past_request, trials_);
    m.acknowledgement = ratio(past_ack, past_request);
    m.delivery = ratio(successes_, past_ack);
    return m;
}

TopologyMetrics topology_metrics(std::span<const TrialOutcome> trials, const ProtocolConfig& config, double lambda)
{
    MetricsAccumulator acc(config, lambda);
    for (const auto& t : trials) {
        acc.add(t);
    }
    return acc.finish();
}

AveragedMetrics topological_averages(std::span<const TopologyMetrics> per_topology)
{
    AveragedMetrics out;
    out.topologies = per_topology.size();
    if (per_topology.empty()) {
        return out;
    }
    std::vector<double> r, a, h, d, req, ack, del;
    for (const auto& t : per_topology) {
        r.push_back(t.R);
        a.push_back(t.A);
        if (t.H && t.D) {
            h.push_back(*t.H);
            d.push_back(*t.D);
        }
        if (t.request) {
            req.push_back(*t.request);
        }
        if (t.acknowledgement) {
            ack.push_back(*t.acknowledgement);
        }
        if (t.delivery) {
            del.push_back(*t.delivery);
        }
    }
    const auto rm = mean_of(r);
    const auto am = mean_of(a);
    const auto hm = mean_of(h);
    const auto dm = mean_of(d);
    out.R = *rm.mean;
    out.R_se = *rm.se;
    out.A = *am.mean;
    out.A_se = *am.se;
    out.H = hm.mean;
    out.H_se = hm.se;
    out.D = dm.mean;
    out.D_se = dm.se;
    out.conditional_topologies = h.size();
    out.request = mean_of(req).mean;
    out.acknowledgement = mean_of(ack).mean;
    out.delivery = mean_of(del).mean;
    return out;
}

} // namespace manet
