#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "manetsim/random.hpp"

namespace manet {

/// Normalized power and integer Nakagami parameter of one active interferer.
struct InterfererTerm {
    double omega = 0.0;
    int m = 1;
};

struct LinkOutageInput {
    double omega_k = 1.0; ///< normalized desired power
    int m_k = 1;          ///< desired-link Nakagami parameter
    std::vector<InterfererTerm> interferers;
    double beta = 1.0; ///< SINR threshold (linear)
    double z = 0.0;    ///< inverse reference SNR
};

/// Conditional outage probability of a link given the normalized powers of the
/// desired signal and of every active interferer, for integer Nakagami fading.
///
/// Evaluated as 1 - sum_t beta1^t H_t P(m_k-1-t; beta1 z), where beta1 =
/// beta m_k / omega_k and P(n; x) = e^{-x} sum_{u<=n} x^u/u! is the Poisson
/// CDF. This is the double sum over s and t with its order exchanged, and it is
/// finite at z = 0.
///
/// Throws DomainError on invalid input and NumericError if the raw value
/// leaves [0, 1] by more than 1e-12.
double outage_probability(const LinkOutageInput& input);
double outage_probability(double omega_k, int m_k, std::span<const InterfererTerm> interferers, double beta,
                          double z);

/// H_0 .. H_{max_t}: sums over multi-indices of products of the per-interferer
/// G_l coefficients, computed by convolving one interferer at a time.
std::vector<double> coefficients_H(int max_t, std::span<const InterfererTerm> interferers, double beta1);
double coefficient_H(int t, std::span<const InterfererTerm> interferers, double beta1);

struct MonteCarloEstimate {
    double probability = 0.0;
    double standard_error = 0.0;
    std::size_t draws = 0;
};

/// Direct simulation of the SINR with unit-mean gamma power gains of shape m.
MonteCarloEstimate monte_carlo_outage(const LinkOutageInput& input, std::size_t draws, RandomStream& rng);

} // namespace manet
