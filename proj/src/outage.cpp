#include "manetsim/outage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "manetsim/errors.hpp"

namespace manet {

namespace {

constexpr double kRoundOff = 1e-12;
constexpr int kInlineDegree = 16;

void check_interferer(const InterfererTerm& term)
{
    if (!(term.omega > 0.0) || std::isinf(term.omega)) {
        throw DomainError("interferer power must be positive and finite");
    }
    if (term.m < 1) {
        throw DomainError("interferer Nakagami parameter must be >= 1");
    }
}

double int_pow(double base, int exponent) noexcept
{
    double result = 1.0;
    while (exponent > 0) {
        if (exponent & 1) {
            result *= base;
        }
        base *= base;
        exponent >>= 1;
    }
    return result;
}

// Multiplies the truncated polynomial h (degree <= max_t) by the generating
// function sum_l G_l x^l of one interferer.
void convolve_interferer(double* h, int max_t, const InterfererTerm& term, double beta1)
{
    const double ratio = term.omega / term.m;
    const double psi = 1.0 / (beta1 * ratio + 1.0);
    const double psi_m = int_pow(psi, term.m);
    if (max_t == 0) {
        h[0] *= psi_m;
        return;
    }
    std::array<double, kInlineDegree> g{};
    std::vector<double> g_heap;
    double* gl = g.data();
    if (max_t >= kInlineDegree) {
        g_heap.assign(static_cast<std::size_t>(max_t) + 1, 0.0);
        gl = g_heap.data();
    }
    // G_l = C(l+m-1, l) (ratio psi)^l psi^m
    const double step = ratio * psi;
    gl[0] = psi_m;
    for (int l = 1; l <= max_t; ++l) {
        gl[l] = gl[l - 1] * step * static_cast<double>(l + term.m - 1) / static_cast<double>(l);
    }
    for (int t = max_t; t >= 0; --t) {
        double acc = 0.0;
        for (int l = 0; l <= t; ++l) {
            acc += h[t - l] * gl[l];
        }
        h[t] = acc;
    }
}

void fill_coefficients(double* h, int max_t, std::span<const InterfererTerm> interferers, double beta1)
{
    h[0] = 1.0;
    for (int t = 1; t <= max_t; ++t) {
        h[t] = 0.0;
    }
    for (const auto& term : interferers) {
        check_interferer(term);
        convolve_interferer(h, max_t, term, beta1);
    }
}

} // namespace

std::vector<double> coefficients_H(int max_t, std::span<const InterfererTerm> interferers, double beta1)
{
    if (max_t < 0) {
        throw DomainError("H_t is undefined for negative t");
    }
    if (!(beta1 > 0.0)) {
        throw DomainError("composite threshold must be positive");
    }
    std::vector<double> h(static_cast<std::size_t>(max_t) + 1);
    fill_coefficients(h.data(), max_t, interferers, beta1);
    return h;
}

double coefficient_H(int t, std::span<const InterfererTerm> interferers, double beta1)
{
    return coefficients_H(t, interferers, beta1).back();
}

double outage_probability(double omega_k, int m_k, std::span<const InterfererTerm> interferers, double beta,
                          double z)
{
    if (!(omega_k > 0.0) || std::isinf(omega_k)) {
        throw DomainError("desired power must be positive and finite");
    }
    if (m_k < 1) {
        throw DomainError("desired-link Nakagami parameter must be >= 1");
    }
    if (!(beta > 0.0) || std::isinf(beta)) {
        throw DomainError("SINR threshold must be positive and finite");
    }
    if (!(z >= 0.0) || std::isinf(z)) {
        throw DomainError("inverse SNR must be finite and >= 0");
    }

    const int max_t = m_k - 1;
    const double beta1 = beta * m_k / omega_k;
    std::array<double, kInlineDegree> inline_h{};
    std::vector<double> heap_h;
    double* h = inline_h.data();
    if (max_t >= kInlineDegree) {
        heap_h.resize(static_cast<std::size_t>(max_t) + 1);
        h = heap_h.data();
    }
    fill_coefficients(h, max_t, interferers, beta1);

    // Poisson CDF terms e^{-x} x^u / u! for x = beta1 z.
    const double x = beta1 * z;
    std::array<double, kInlineDegree> inline_cdf{};
    std::vector<double> heap_cdf;
    double* cdf = inline_cdf.data();
    if (max_t >= kInlineDegree) {
        heap_cdf.resize(static_cast<std::size_t>(max_t) + 1);
        cdf = heap_cdf.data();
    }
    double term = std::exp(-x);
    double running = term;
    cdf[0] = running;
    for (int u = 1; u <= max_t; ++u) {
        term = x > 0.0 ? std::exp(-x + u * std::log(x) - std::lgamma(u + 1.0)) : 0.0;
        running += term;
        cdf[u] = running;
    }

    double success = 0.0;
    double beta1_t = 1.0;
    for (int t = 0; t <= max_t; ++t) {
        success += beta1_t * h[t] * cdf[max_t - t];
        beta1_t *= beta1;
    }
    const double epsilon = 1.0 - success;
    if (!(epsilon >= -kRoundOff && epsilon <= 1.0 + kRoundOff)) {
        throw NumericError("outage probability " + std::to_string(epsilon) + " left [0, 1]");
    }
    return std::clamp(epsilon, 0.0, 1.0);
}

double outage_probability(const LinkOutageInput& input)
{
    return outage_probability(input.omega_k, input.m_k, input.interferers, input.beta, input.z);
}

MonteCarloEstimate monte_carlo_outage(const LinkOutageInput& input, std::size_t draws, RandomStream& rng)
{
    if (draws == 0) {
        throw ArgumentError("monte_carlo_outage needs at least one draw");
    }
    auto& engine = rng.engine();
    std::gamma_distribution<double> desired(input.m_k, 1.0 / input.m_k);
    std::vector<std::gamma_distribution<double>> gains;
    gains.reserve(input.interferers.size());
    for (const auto& term : input.interferers) {
        gains.emplace_back(term.m, 1.0 / term.m);
    }

    std::size_t outages = 0;
    for (std::size_t n = 0; n < draws; ++n) {
        const double signal = desired(engine) * input.omega_k;
        double denominator = input.z;
        for (std::size_t i = 0; i < gains.size(); ++i) {
            denominator += gains[i](engine) * input.interferers[i].omega;
        }
        if (denominator > 0.0 && signal <= input.beta * denominator) {
            ++outages;
        }
    }
    MonteCarloEstimate estimate;
    estimate.draws = draws;
    estimate.probability = static_cast<double>(outages) / static_cast<double>(draws);
    estimate.standard_error
        = std::sqrt(estimate.probability * (1.0 - estimate.probability) / static_cast<double>(draws));
    return estimate;
}

} // namespace manet
