#pragma once

// Straight-line recomputation of the per-topology metrics for tests.

#include <optional>
#include <random>
#include <vector>

#include "manetsim/protocols.hpp"

namespace manet::test {

struct ReferenceMetrics {
    double R;
    std::optional<double> H;
    std::optional<double> D;
    double A;
    std::optional<double> request;
    std::optional<double> ack;
    std::optional<double> delivery;
};

inline ReferenceMetrics reference_metrics(const std::vector<TrialOutcome>& trials, const ProtocolConfig& c,
                                          double lambda)
{
    const double K = static_cast<double>(trials.size());
    double failures = 0, hops = 0, delay = 0, inverse = 0;
    double request_failures = 0, ack_failures = 0;
    for (const auto& t : trials) {
        if (!t.success) {
            failures += 1;
            const bool gf = c.protocol == Protocol::greedy;
            if (t.failure_stage == FailureStage::discovery || (t.failure_stage == FailureStage::no_path && !gf)) {
                request_failures += 1;
            } else if (t.failure_stage == FailureStage::acknowledgement) {
                ack_failures += 1;
            }
            continue;
        }
        // Recompute the path delay from the attempt counts.
        double path = 0;
        for (int n : t.attempts) {
            path += n * c.T + (n - 1) * c.T_e;
        }
        const double d = path + 2.0 * c.c() * static_cast<double>(t.attempts.size()) * c.T_d;
        hops += static_cast<double>(t.attempts.size());
        delay += d;
        inverse += 1.0 / d;
    }
    ReferenceMetrics m{};
    m.R = 1.0 - failures / K;
    const double S = K - failures;
    if (S > 0) {
        m.H = hops / S;
        m.D = delay / S;
    }
    m.A = lambda / K * inverse;
    const double past_request = K - request_failures;
    const double past_ack = past_request - ack_failures;
    m.request = past_request / K;
    if (past_request > 0) {
        m.ack = past_ack / past_request;
    }
    if (past_ack > 0) {
        m.delivery = S / past_ack;
    }
    return m;
}

/// Random but internally consistent outcomes for one topology.
inline std::vector<TrialOutcome> synthetic_outcomes(std::mt19937_64& gen, const ProtocolConfig& c, std::size_t K,
                                                    double success_rate)
{
    std::vector<TrialOutcome> out;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> hops(1, 8);
    std::uniform_int_distribution<int> attempts(1, c.B);
    const FailureStage stages[] = {FailureStage::discovery, FailureStage::acknowledgement, FailureStage::delivery,
                                   FailureStage::no_path, FailureStage::horizon};
    for (std::size_t k = 0; k < K; ++k) {
        TrialOutcome t;
        if (u(gen) < success_rate) {
            t.success = true;
            const int h = hops(gen);
            t.path.push_back(0);
            for (int i = 0; i < h; ++i) {
                t.attempts.push_back(attempts(gen));
                t.path.push_back(static_cast<NodeId>(i + 1));
            }
            t.hops = static_cast<std::size_t>(h);
            t.path_delay = 0;
            for (int n : t.attempts) {
                t.path_delay += n * c.T + (n - 1) * c.T_e;
            }
        } else {
            t.failure_stage = stages[gen() % 5];
        }
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace manet::test
