#pragma once

#include <cstdint>
#include <vector>

namespace trlife {

// Transmuted Rayleigh lifetime model: scale sigma > 0 and transmutation
// parameter lambda in [-1, 1]. lambda = 0 is the plain Rayleigh distribution.
//
//   F(x) = (1 - y) (1 + lambda y),   y = exp(-x^2 / (2 sigma^2))
struct TRParams {
    double sigma;
    double lambda;

    TRParams(double sigma, double lambda);
};

/// Density at x >= 0.
double pdf(double x, const TRParams& params);

/// Distribution function at x >= 0.
double cdf(double x, const TRParams& params);

/// Inverse of cdf on (0, 1), in closed form via the quadratic in
/// y = exp(-x^2 / (2 sigma^2)); the root in (0, 1) is unique for |lambda| <= 1.
double quantile(double u, const TRParams& params);

/// E[X^order] for integer order >= 1:
/// sigma^r Gamma(r/2 + 1) (lambda + 2^{r/2} (1 - lambda)).
double raw_moment(int order, const TRParams& params);

/// E[X] = sigma sqrt(pi)/2 (lambda + sqrt(2) (1 - lambda)).
double mean(const TRParams& params);

/// Scale parameter whose distribution has the given mean; inverse of mean()
/// at fixed lambda.
double sigma_from_mu(double mu, double lambda);

/// Inverse-transform sample of `count` lifetimes, reproducible from `seed`.
std::vector<double> sample(const TRParams& params, std::size_t count, std::uint64_t seed);

}  // namespace trlife
