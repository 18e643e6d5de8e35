#include "trlife/monte_carlo.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "trlife/rng.hpp"

namespace trlife {

SimulationReport simulate_plan(const SamplingPlan& plan, const TRParams& true_params,
                               double spec_sigma, std::int64_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::domain_error("simulate_plan: trials must be >= 1");
    if (!(spec_sigma > 0.0))
        throw std::domain_error("simulate_plan: spec_sigma must be positive");

    const double truncation_time = plan.t_ratio * spec_sigma;
    std::int64_t accepted = 0;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        auto gen = rng::substream(seed, static_cast<std::uint64_t>(trial));
        int failures = 0;
        // Once failures exceed c the lot is rejected; the remaining units
        // cannot change the decision.
        for (int unit = 0; unit < plan.n && failures <= plan.c; ++unit) {
            if (quantile(gen.next_unit(), true_params) <= truncation_time) ++failures;
        }
        if (failures <= plan.c) ++accepted;
    }

    SimulationReport report;
    report.trials = trials;
    report.acceptances = accepted;
    report.estimate = static_cast<double>(accepted) / static_cast<double>(trials);
    report.std_error =
        std::sqrt(report.estimate * (1.0 - report.estimate) / static_cast<double>(trials));
    report.analytic = oc_value(plan, true_params.sigma / spec_sigma, true_params.lambda);
    report.z_score =
        report.std_error > 0.0 ? (report.estimate - report.analytic) / report.std_error : 0.0;
    return report;
}

std::string to_json_string(const SimulationReport& report) {
    nlohmann::json doc;
    doc["trials"] = report.trials;
    doc["acceptances"] = report.acceptances;
    doc["estimate"] = report.estimate;
    doc["std_error"] = report.std_error;
    doc["analytic"] = report.analytic;
    doc["z_score"] = report.z_score;
    return doc.dump(2);
}

}  // namespace trlife
