#pragma once

#include <cstdint>
#include <string>

#include "trlife/sampling_plan.hpp"
#include "trlife/tr_distribution.hpp"

namespace trlife {

// Empirical lot-acceptance probability next to its analytic OC value.
struct SimulationReport {
    std::int64_t trials = 0;
    std::int64_t acceptances = 0;
    double estimate = 0.0;   // acceptances / trials
    double std_error = 0.0;  // sqrt(estimate (1 - estimate) / trials)
    double analytic = 0.0;   // OC value for the same plan and quality
    double z_score = 0.0;    // (estimate - analytic) / std_error, 0 when std_error is 0
};

/// Simulate the truncated life test: per trial, draw plan.n lifetimes from
/// true_params, count failures before t = plan.t_ratio * spec_sigma, accept
/// iff the count is at most plan.c. Per-trial RNG substreams make the result
/// a pure function of (plan, params, spec_sigma, trials, seed).
SimulationReport simulate_plan(const SamplingPlan& plan, const TRParams& true_params,
                               double spec_sigma, std::int64_t trials, std::uint64_t seed);

std::string to_json_string(const SimulationReport& report);

}  // namespace trlife
