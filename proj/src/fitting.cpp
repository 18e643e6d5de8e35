#include "trlife/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace trlife {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Nelder-Mead in two dimensions with a box projection applied inside the
// objective. Plain reflection/expansion/contraction/shrink.
// ---------------------------------------------------------------------------

struct SimplexResult {
    std::array<double, 2> x{};
    double f = kInf;
    bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(const std::array<double, 2>&)>& func,
                          std::array<double, 2> start, std::array<double, 2> step,
                          double xtol, double ftol, int max_iter) {
    using Point = std::array<double, 2>;
    struct Vertex {
        Point x;
        double f;
    };
    std::array<Vertex, 3> simplex;
    simplex[0] = {start, func(start)};
    for (int d = 0; d < 2; ++d) {
        Point p = start;
        p[d] += step[d];
        simplex[d + 1] = {p, func(p)};
    }

    const auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    bool converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        std::sort(simplex.begin(), simplex.end(), by_value);
        const double size = std::max(
            std::max(std::fabs(simplex[1].x[0] - simplex[0].x[0]),
                     std::fabs(simplex[2].x[0] - simplex[0].x[0])),
            std::max(std::fabs(simplex[1].x[1] - simplex[0].x[1]),
                     std::fabs(simplex[2].x[1] - simplex[0].x[1])));
        const double spread = std::fabs(simplex[2].f - simplex[0].f);
        if (size < xtol && spread < ftol * (std::fabs(simplex[0].f) + ftol)) {
            converged = true;
            break;
        }

        const Point centroid{(simplex[0].x[0] + simplex[1].x[0]) / 2.0,
                             (simplex[0].x[1] + simplex[1].x[1]) / 2.0};
        const auto at = [&](double coeff) {
            Point p{centroid[0] + coeff * (centroid[0] - simplex[2].x[0]),
                    centroid[1] + coeff * (centroid[1] - simplex[2].x[1])};
            return Vertex{p, func(p)};
        };

        const Vertex reflected = at(1.0);
        if (reflected.f < simplex[0].f) {
            const Vertex expanded = at(2.0);
            simplex[2] = expanded.f < reflected.f ? expanded : reflected;
        } else if (reflected.f < simplex[1].f) {
            simplex[2] = reflected;
        } else {
            const Vertex contracted = at(reflected.f < simplex[2].f ? 0.5 : -0.5);
            if (contracted.f < std::min(reflected.f, simplex[2].f)) {
                simplex[2] = contracted;
            } else {
                for (int v = 1; v < 3; ++v) {
                    for (int d = 0; d < 2; ++d)
                        simplex[v].x[d] = simplex[0].x[d] +
                                          0.5 * (simplex[v].x[d] - simplex[0].x[d]);
                    simplex[v].f = func(simplex[v].x);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(), by_value);
    return SimplexResult{simplex[0].x, simplex[0].f, converged};
}

// ---------------------------------------------------------------------------
// Exact Kolmogorov distribution, matrix-power method of Marsaglia, Tsang &
// Wang (2003).
// ---------------------------------------------------------------------------

void mat_multiply(const std::vector<double>& a, const std::vector<double>& b,
                  std::vector<double>& out, int m) {
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int k = 0; k < m; ++k) s += a[i * m + k] * b[k * m + j];
            out[i * m + j] = s;
        }
    }
}

void mat_power(const std::vector<double>& a, int ea, std::vector<double>& v, int& ev, int m,
               int n) {
    if (n == 1) {
        v = a;
        ev = ea;
        return;
    }
    mat_power(a, ea, v, ev, m, n / 2);
    std::vector<double> b(static_cast<std::size_t>(m) * m);
    mat_multiply(v, v, b, m);
    int eb = 2 * ev;
    if (n % 2 == 0) {
        v = b;
        ev = eb;
    } else {
        mat_multiply(a, b, v, m);
        ev = ea + eb;
    }
    if (v[(m / 2) * m + (m / 2)] > 1e140) {
        for (double& x : v) x *= 1e-140;
        ev += 140;
    }
}

}  // namespace

double kolmogorov_cdf(int n, double d) {
    if (n < 1) throw std::domain_error("kolmogorov_cdf: n must be >= 1");
    if (d <= 0.0) return 0.0;
    if (d >= 1.0) return 1.0;
    const double s = d * d * n;
    // Marsaglia's right-tail shortcut; keeps ~7-digit accuracy.
    if (s > 7.24 || (s > 3.76 && n > 99))
        return 1.0 - 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(static_cast<double>(n)) +
                                      1.409 / n) *
                                    s);
    const int k = static_cast<int>(n * d) + 1;
    const int m = 2 * k - 1;
    const double h = k - n * d;

    std::vector<double> hm(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) hm[i * m + j] = (i - j + 1 < 0) ? 0.0 : 1.0;
    for (int i = 0; i < m; ++i) {
        hm[i * m] -= std::pow(h, i + 1);
        hm[(m - 1) * m + i] -= std::pow(h, m - i);
    }
    hm[(m - 1) * m] += (2.0 * h - 1.0 > 0.0) ? std::pow(2.0 * h - 1.0, m) : 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 > 0)
                for (int g = 1; g <= i - j + 1; ++g) hm[i * m + j] /= g;

    std::vector<double> q;
    int eq = 0;
    mat_power(hm, 0, q, eq, m, n);
    double s_out = q[(k - 1) * m + (k - 1)];
    for (int i = 1; i <= n; ++i) {
        s_out *= static_cast<double>(i) / n;
        if (s_out < 1e-140) {
            s_out *= 1e140;
            eq -= 140;
        }
    }
    return s_out * std::pow(10.0, eq);
}

DataFormatError::DataFormatError(const std::string& source, int line_in,
                                 const std::string& message)
    : std::runtime_error(line_in > 0 ? source + ":" + std::to_string(line_in) + ": " + message
                                     : source + ": " + message),
      line(line_in) {}

LifetimeSample::LifetimeSample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty())
        throw std::domain_error("LifetimeSample: at least one observation required");
    for (const double v : values_)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::domain_error("LifetimeSample: observations must be positive and finite");
    std::sort(values_.begin(), values_.end());
}

double log_likelihood(const LifetimeSample& data, const TRParams& params) {
    const double s2 = params.sigma * params.sigma;
    double total = 0.0;
    for (const double x : data.values()) {
        const double z = x * x / (2.0 * s2);
        const double shape = 1.0 - params.lambda + 2.0 * params.lambda * std::exp(-z);
        if (!(shape > 0.0)) return -kInf;
        total += std::log(x / s2) - z + std::log(shape);
    }
    return total;
}

std::pair<double, double> information_criteria(double loglik, std::size_t n) {
    if (!std::isfinite(loglik))
        throw std::domain_error("information_criteria: loglik must be finite");
    if (n < 1) throw std::domain_error("information_criteria: n must be >= 1");
    const double aic = -2.0 * loglik + 4.0;
    const double bic = -2.0 * loglik + 2.0 * std::log(static_cast<double>(n));
    return {aic, bic};
}

namespace {

// Survival function of the limiting Kolmogorov distribution at lambda.
double kolmogorov_asymptotic_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.0) {
        // Theta-transformed series, accurate where the alternating series
        // converges slowly.
        const double pi2 = M_PI * M_PI;
        double sum = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double odd = 2.0 * k - 1.0;
            sum += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
        }
        return 1.0 - std::sqrt(2.0 * M_PI) / lambda * sum;
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-18) break;
    }
    return 2.0 * sum;
}

}  // namespace

KSResult ks_test(const LifetimeSample& data, const TRParams& params) {
    const auto& xs = data.values();
    const auto n = static_cast<double>(xs.size());
    double d = 0.0;
    bool ties = false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i], params);
        const double lower = f - static_cast<double>(i) / n;
        const double upper = static_cast<double>(i + 1) / n - f;
        d = std::max({d, lower, upper});
        if (i > 0 && xs[i] == xs[i - 1]) ties = true;
    }
    // Exact finite-n distribution for tie-free small samples, limiting
    // distribution otherwise; the convention of standard statistical
    // software, and what the reference fit summaries were produced with.
    const double pvalue = (xs.size() <= 100 && !ties)
                              ? 1.0 - kolmogorov_cdf(static_cast<int>(xs.size()), d)
                              : kolmogorov_asymptotic_sf(std::sqrt(n) * d);
    return {d, std::clamp(pvalue, 0.0, 1.0)};
}

DescriptiveStats describe(const LifetimeSample& data) {
    const auto& xs = data.values();
    if (xs.size() < 2) throw std::domain_error("describe: need at least 2 observations");
    const auto n = xs.size();

    const auto quantile_at = [&](double q) {
        const double pos = 1.0 + (static_cast<double>(n) - 1.0) * q;  // 1-based
        const auto lo = static_cast<std::size_t>(pos) - 1;
        const double frac = pos - std::floor(pos);
        if (lo + 1 >= n) return xs[n - 1];
        return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
    };

    double total = 0.0;
    for (const double x : xs) total += x;
    const double mean_value = total / static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (const double x : xs) {
        const double dx = x - mean_value;
        m2 += dx * dx;
        m3 += dx * dx * dx;
        m4 += dx * dx * dx * dx;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    DescriptiveStats stats;
    stats.minimum = xs.front();
    stats.q1 = quantile_at(0.25);
    stats.median = quantile_at(0.5);
    stats.mean = mean_value;
    stats.q3 = quantile_at(0.75);
    stats.maximum = xs.back();
    stats.skewness = m3 / std::pow(m2, 1.5);
    stats.kurtosis = m4 / (m2 * m2);
    return stats;
}

FitResult fit_mle(const LifetimeSample& data) {
    const auto& xs = data.values();
    if (xs.size() < 2) throw std::domain_error("fit_mle: need at least 2 observations");

    double sum_sq = 0.0;
    for (const double x : xs) sum_sq += x * x;
    const double sigma_init = std::sqrt(sum_sq / (2.0 * static_cast<double>(xs.size())));

    const auto clamp_lambda = [](double l) { return std::clamp(l, -1.0, 1.0); };
    const auto negative_loglik = [&](const std::array<double, 2>& theta) {
        const double sigma = std::exp(theta[0]);
        if (!(sigma > 0.0) || !std::isfinite(sigma)) return kInf;
        const TRParams p(sigma, clamp_lambda(theta[1]));
        const double ll = log_likelihood(data, p);
        return std::isfinite(ll) ? -ll : kInf;
    };

    SimplexResult best;
    for (const double lambda0 : {-0.5, 0.0, 0.5}) {
        SimplexResult r = nelder_mead(negative_loglik, {std::log(sigma_init), lambda0},
                                      {0.2, 0.25}, 1e-8, 1e-10, 800);
        // Restart from the found vertex; unsticks stalled simplices.
        r = nelder_mead(negative_loglik, r.x, {0.02, 0.02}, 1e-8, 1e-10, 800);
        if (r.f < best.f || (r.f == best.f && r.converged && !best.converged)) best = r;
    }

    const bool degenerate = xs.front() == xs.back();
    const TRParams params(std::exp(best.x[0]), clamp_lambda(best.x[1]));
    const double loglik = log_likelihood(data, params);
    const auto [aic, bic] = information_criteria(loglik, xs.size());
    const KSResult ks = ks_test(data, params);
    return FitResult{params, loglik, aic, bic, ks.statistic, ks.pvalue,
                     best.converged && !degenerate};
}

LifetimeSample parse_lifetimes(std::istream& in, const std::string& source_name) {
    std::vector<double> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::string token;
        while (tokens >> token) {
            double v = 0.0;
            try {
                std::size_t used = 0;
                v = std::stod(token, &used);
                if (used != token.size()) throw std::invalid_argument(token);
            } catch (const std::exception&) {
                throw DataFormatError(source_name, lineno,
                                      "not a number: '" + token + "'");
            }
            if (!(v > 0.0) || !std::isfinite(v))
                throw DataFormatError(source_name, lineno,
                                      "lifetime must be positive: '" + token + "'");
            values.push_back(v);
        }
    }
    if (values.empty()) throw DataFormatError(source_name, 0, "no observations");
    return LifetimeSample(std::move(values));
}

LifetimeSample read_lifetime_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataFormatError(path, 0, "cannot open file");
    return parse_lifetimes(in, path);
}

}  // namespace trlife
