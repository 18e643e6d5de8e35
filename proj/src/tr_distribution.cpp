#include "trlife/tr_distribution.hpp"

#include <cmath>
#include <stdexcept>

#include "trlife/rng.hpp"

namespace trlife {

TRParams::TRParams(double sigma_in, double lambda_in) : sigma(sigma_in), lambda(lambda_in) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::domain_error("TRParams: sigma must be positive and finite");
    if (!(lambda >= -1.0 && lambda <= 1.0))
        throw std::domain_error("TRParams: lambda must lie in [-1, 1]");
}

double pdf(double x, const TRParams& params) {
    if (!(x >= 0.0)) throw std::domain_error("pdf: x must be nonnegative");
    if (std::isinf(x)) return 0.0;
    const double s2 = params.sigma * params.sigma;
    const double y = std::exp(-(x * x) / (2.0 * s2));
    return x / s2 * y * (1.0 - params.lambda + 2.0 * params.lambda * y);
}

double cdf(double x, const TRParams& params) {
    if (!(x >= 0.0)) throw std::domain_error("cdf: x must be nonnegative");
    if (x > 40.0 * params.sigma) return 1.0;  // y underflows long before this cutoff
    const double z = (x * x) / (2.0 * params.sigma * params.sigma);
    const double y = std::exp(-z);
    // expm1 form preserves precision near 0; the complement form keeps the
    // approach to 1 free of round-off wiggles.
    if (z < 0.7) return -std::expm1(-z) * (1.0 + params.lambda * y);
    return 1.0 - y * (1.0 - params.lambda + params.lambda * y);
}

double quantile(double u, const TRParams& params) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must lie in (0, 1)");
    // Solve lambda y^2 + (1 - lambda) y - (1 - u) = 0 for the root in (0, 1),
    // written so it stays stable as lambda -> 0.
    const double b = 1.0 - params.lambda;
    const double disc = b * b + 4.0 * params.lambda * (1.0 - u);
    const double y = 2.0 * (1.0 - u) / (b + std::sqrt(disc));
    return params.sigma * std::sqrt(-2.0 * std::log(y));
}

double raw_moment(int order, const TRParams& params) {
    if (order < 1) throw std::domain_error("raw_moment: order must be >= 1");
    const double r = static_cast<double>(order);
    const double bracket =
        params.lambda + std::pow(2.0, r / 2.0) * (1.0 - params.lambda);
    return std::pow(params.sigma, r) * std::tgamma(r / 2.0 + 1.0) * bracket;
}

double mean(const TRParams& params) {
    constexpr double root_pi = 1.7724538509055160273;
    constexpr double root_two = 1.4142135623730950488;
    return params.sigma * (root_pi / 2.0) *
           (params.lambda + root_two * (1.0 - params.lambda));
}

double sigma_from_mu(double mu, double lambda) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::domain_error("sigma_from_mu: mu must be positive and finite");
    return mu / mean(TRParams(1.0, lambda));
}

std::vector<double> sample(const TRParams& params, std::size_t count, std::uint64_t seed) {
    if (count < 1) throw std::domain_error("sample: count must be >= 1");
    rng::SplitMix64 gen{rng::mix(seed)};
    std::vector<double> draws(count);
    for (double& d : draws) d = quantile(gen.next_unit(), params);
    return draws;
}

}  // namespace trlife
