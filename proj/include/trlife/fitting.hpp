#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "trlife/tr_distribution.hpp"

namespace trlife {

// Ingestion failure with the offending source location baked into what().
struct DataFormatError : std::runtime_error {
    int line;
    DataFormatError(const std::string& source, int line, const std::string& message);
};

// Positive lifetime observations, kept sorted ascending.
class LifetimeSample {
public:
    explicit LifetimeSample(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
};

struct FitResult {
    TRParams params;
    double loglik;
    double aic;
    double bic;
    double ks_stat;
    double ks_pvalue;
    bool converged;
};

struct DescriptiveStats {
    double minimum;
    double q1;
    double median;
    double mean;
    double q3;
    double maximum;
    double skewness;  // m3 / m2^{3/2}, population central moments
    double kurtosis;  // m4 / m2^2, not excess
};

struct KSResult {
    double statistic;
    double pvalue;
};

double log_likelihood(const LifetimeSample& data, const TRParams& params);

/// Maximum-likelihood fit over sigma > 0, lambda in [-1, 1]. Derivative-free
/// simplex started from the Rayleigh scale estimate sqrt(sum x^2 / 2n) and
/// lambda in {-0.5, 0, 0.5}; `converged` is false when the simplex fails its
/// tolerance or the data are degenerate (all observations equal).
FitResult fit_mle(const LifetimeSample& data);

/// Two-sided Kolmogorov-Smirnov statistic against the fitted model, with the
/// exact finite-n p-value for n <= 100.
KSResult ks_test(const LifetimeSample& data, const TRParams& params);

/// Quartiles by linear interpolation at position 1 + (n-1)q.
DescriptiveStats describe(const LifetimeSample& data);

/// {AIC, BIC} for the two-parameter model: -2 loglik + 4 and -2 loglik + 2 ln n.
std::pair<double, double> information_criteria(double loglik, std::size_t n);

/// P(D_n < d) for the Kolmogorov statistic: exact matrix-power evaluation for
/// n <= 100, asymptotic series above.
double kolmogorov_cdf(int n, double d);

/// One observation per line; '#' starts a comment, blank lines are skipped,
/// extra whitespace is tolerated. Nonpositive or non-numeric entries raise
/// DataFormatError with the line number.
LifetimeSample parse_lifetimes(std::istream& in, const std::string& source_name);
LifetimeSample read_lifetime_file(const std::string& path);

}  // namespace trlife
