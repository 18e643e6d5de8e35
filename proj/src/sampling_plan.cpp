#include "trlife/sampling_plan.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace trlife {

namespace {

constexpr int kBetaSwitchN = 1000;

// Regularized incomplete beta I_x(a, b), continued fraction per Lentz.
double ibeta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * ibeta_cf(a, b, x) / a;
    return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

double binom_cdf_terms(int c, int n, double p) {
    const long double lp = std::log(static_cast<long double>(p));
    const long double lq = std::log1p(-static_cast<long double>(p));
    const long double lgn = std::lgamma(static_cast<long double>(n) + 1.0L);
    long double sum = 0.0L;
    for (int i = 0; i <= c; ++i) {
        const long double log_term = lgn - std::lgamma(static_cast<long double>(i) + 1.0L) -
                                     std::lgamma(static_cast<long double>(n - i) + 1.0L) +
                                     i * lp + (n - i) * lq;
        sum += std::exp(log_term);
    }
    return std::min(1.0, static_cast<double>(sum));
}

}  // namespace

DesignQuery::DesignQuery(double p_star_in, int c_in, double t_ratio_in, double lambda_in)
    : p_star(p_star_in), c(c_in), t_ratio(t_ratio_in), lambda(lambda_in) {
    if (!(p_star > 0.0 && p_star < 1.0))
        throw std::domain_error("DesignQuery: p_star must lie in (0, 1)");
    if (c < 0) throw std::domain_error("DesignQuery: c must be >= 0");
    if (!(t_ratio > 0.0)) throw std::domain_error("DesignQuery: t_ratio must be positive");
    if (!(lambda >= -1.0 && lambda <= 1.0))
        throw std::domain_error("DesignQuery: lambda must lie in [-1, 1]");
}

SamplingPlan::SamplingPlan(int n_in, int c_in, double t_ratio_in, double p_star_in)
    : n(n_in), c(c_in), t_ratio(t_ratio_in), p_star(p_star_in) {
    if (c < 0) throw std::domain_error("SamplingPlan: c must be >= 0");
    if (n < c + 1) throw std::domain_error("SamplingPlan: n must be >= c + 1");
    if (!(t_ratio > 0.0)) throw std::domain_error("SamplingPlan: t_ratio must be positive");
    if (!(p_star > 0.0 && p_star < 1.0))
        throw std::domain_error("SamplingPlan: p_star must lie in (0, 1)");
}

double failure_prob(double t_ratio, double scale_ratio, double lambda) {
    if (!(t_ratio > 0.0)) throw std::domain_error("failure_prob: t_ratio must be positive");
    if (!(scale_ratio > 0.0))
        throw std::domain_error("failure_prob: scale_ratio must be positive");
    return cdf(t_ratio, TRParams(scale_ratio, lambda));
}

double binom_cdf(int c, int n, double p) {
    if (n < 1) throw std::domain_error("binom_cdf: n must be >= 1");
    if (c < 0 || c > n) throw std::domain_error("binom_cdf: require 0 <= c <= n");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binom_cdf: p must lie in [0, 1]");
    if (c == n || p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;
    if (n > kBetaSwitchN) return ibeta(static_cast<double>(n - c), c + 1.0, 1.0 - p);
    return binom_cdf_terms(c, n, p);
}

SamplingPlan min_sample_size(const DesignQuery& query) {
    const double p = failure_prob(query.t_ratio, 1.0, query.lambda);
    if (p <= 0.0)
        throw UnsatisfiablePlanError(
            "min_sample_size: failure probability underflows to 0; no finite n satisfies "
            "the constraint");
    const double beta = 1.0 - query.p_star;
    const auto satisfied = [&](int n) { return binom_cdf(query.c, n, p) <= beta; };

    // binom_cdf(c, n, p) decreases in n, so the first satisfying n is minimal.
    int n = query.c + 1;
    const int linear_limit = n + 4096;
    while (n < linear_limit && !satisfied(n)) ++n;
    if (n < linear_limit) return SamplingPlan(n, query.c, query.t_ratio, query.p_star);

    int lo = n;  // known unsatisfied
    int hi = n;
    while (!satisfied(hi)) {
        lo = hi;
        if (hi > (std::numeric_limits<int>::max() >> 1))
            throw UnsatisfiablePlanError(
                "min_sample_size: no satisfying n found below 2^30 (p = " +
                std::to_string(p) + ")");
        hi *= 2;
    }
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (satisfied(mid) ? hi : lo) = mid;
    }
    return SamplingPlan(hi, query.c, query.t_ratio, query.p_star);
}

double oc_value(const SamplingPlan& plan, double scale_ratio, double lambda) {
    return binom_cdf(plan.c, plan.n, failure_prob(plan.t_ratio, scale_ratio, lambda));
}

OCPoint oc_point(const SamplingPlan& plan, double scale_ratio, double lambda) {
    const double p = failure_prob(plan.t_ratio, scale_ratio, lambda);
    return OCPoint{scale_ratio, p, binom_cdf(plan.c, plan.n, p)};
}

double producer_risk(const SamplingPlan& plan, double scale_ratio, double lambda) {
    return 1.0 - oc_value(plan, scale_ratio, lambda);
}

double min_scale_ratio(const SamplingPlan& plan, double lambda, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("min_scale_ratio: delta must lie in (0, 1)");
    if (producer_risk(plan, 1.0, lambda) <= delta) return 1.0;

    double lo = 1.0;
    double hi = 2.0;
    while (producer_risk(plan, hi, lambda) > delta) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12)
            throw std::runtime_error("min_scale_ratio: no ratio below 1e12 meets delta");
    }
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (producer_risk(plan, mid, lambda) > delta ? lo : hi) = mid;
    }

    // Report on the 0.01 grid, rounded up so the constraint holds at the
    // printed value; the scans keep the grid value minimal regardless of
    // bisection round-off.
    long grid = std::lround(std::ceil(hi * 100.0 - 1e-7));
    while (producer_risk(plan, static_cast<double>(grid) / 100.0, lambda) > delta) ++grid;
    while (grid > 100 &&
           producer_risk(plan, static_cast<double>(grid - 1) / 100.0, lambda) <= delta)
        --grid;
    return static_cast<double>(grid) / 100.0;
}

}  // namespace trlife
