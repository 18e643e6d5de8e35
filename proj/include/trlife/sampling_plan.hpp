#pragma once

#include <stdexcept>

#include "trlife/tr_distribution.hpp"

namespace trlife {

// Thrown when no finite sample size can satisfy the consumer constraint.
struct UnsatisfiablePlanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Consumer-side inputs for the plan search. Consumer risk is 1 - p_star and
// is never stored separately.
struct DesignQuery {
    double p_star;   // consumer confidence, in (0, 1)
    int c;           // acceptance number, >= 0
    double t_ratio;  // truncation time over specified scale, t / sigma0, > 0
    double lambda;   // transmutation parameter, in [-1, 1]

    DesignQuery(double p_star, int c, double t_ratio, double lambda);
};

// A single-sampling plan (n, c, t/sigma0) plus the confidence it was designed
// for. n >= c + 1; a plan that can never reject is degenerate.
struct SamplingPlan {
    int n;
    int c;
    double t_ratio;
    double p_star;

    SamplingPlan(int n, int c, double t_ratio, double p_star);
};

// One point of the operating characteristic curve.
struct OCPoint {
    double scale_ratio;  // sigma / sigma0, true over specified quality
    double p_fail;       // probability an item fails before the truncation time
    double prob_accept;  // lot acceptance probability
};

/// Probability that an item fails before the truncation time when the true
/// scale is scale_ratio * sigma0:
///   p = (1 - e^{-z})(1 + lambda e^{-z}),  z = (t_ratio / scale_ratio)^2 / 2.
double failure_prob(double t_ratio, double scale_ratio, double lambda);

/// P(X <= c) for X ~ Binomial(n, p). Log-space term summation up to n = 1000,
/// regularized incomplete beta beyond.
double binom_cdf(int c, int n, double p);

/// Smallest n >= c + 1 with binom_cdf(c, n, p) <= 1 - p_star, where p is the
/// failure probability at sigma = sigma0. Throws UnsatisfiablePlanError when
/// p underflows to zero.
SamplingPlan min_sample_size(const DesignQuery& query);

/// Lot acceptance probability at the given quality ratio.
double oc_value(const SamplingPlan& plan, double scale_ratio, double lambda);

OCPoint oc_point(const SamplingPlan& plan, double scale_ratio, double lambda);

/// 1 - oc_value: probability of rejecting a lot of the given quality.
double producer_risk(const SamplingPlan& plan, double scale_ratio, double lambda);

/// Smallest quality ratio on the 0.01 grid with producer_risk <= delta.
/// Returns 1.0 when the plan already satisfies delta at specified quality.
double min_scale_ratio(const SamplingPlan& plan, double lambda, double delta);

}  // namespace trlife
