// Independent test oracles: kept free of the library's own evaluation paths
// so they can disagree with it.
#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "trlife/tr_distribution.hpp"

namespace oracle {

// Adaptive Simpson quadrature; tol is absolute per call and halves with each
// split, with a hard depth cap as the emergency brake.
inline double adaptive_simpson_step(const std::function<double(double)>& f, double a,
                                    double b, double fa, double fm, double fb, double whole,
                                    double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// rel_tol is relative to a coarse estimate of the integral's magnitude. The
// range is stratified into fixed panels first so a narrow peak cannot slip
// between the initial Simpson nodes.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
    double scale = 0.0;
    constexpr int coarse = 128;
    for (int i = 0; i <= coarse; ++i) scale += std::fabs(f(a + (b - a) * i / coarse));
    scale = std::max(scale * (b - a) / coarse, 1e-300);

    constexpr int panels = 32;
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + width * p;
        const double hi = lo + width;
        const double m = 0.5 * (lo + hi);
        const double flo = f(lo);
        const double fm = f(m);
        const double fhi = f(hi);
        const double whole = width / 6.0 * (flo + 4.0 * fm + fhi);
        total += adaptive_simpson_step(f, lo, hi, flo, fm, fhi, whole,
                                       rel_tol * scale / panels, 16);
    }
    return total;
}

// E[X^r] by quadrature of x^r f(x) over the effective support.
inline double moment_by_quadrature(int r, const trlife::TRParams& params) {
    const auto integrand = [&](double x) {
        return std::pow(x, r) * trlife::pdf(x, params);
    };
    const double s = params.sigma;
    // Pieces keep the peak and tail separately resolved.
    return integrate(integrand, 0.0, 2.0 * s, 1e-11) +
           integrate(integrand, 2.0 * s, 8.0 * s, 1e-11) +
           integrate(integrand, 8.0 * s, 45.0 * s, 1e-11);
}

// Quantile by bisection on the cdf alone.
inline double quantile_by_bisection(double u, const trlife::TRParams& params) {
    double lo = 0.0;
    double hi = params.sigma;
    while (trlife::cdf(hi, params) < u) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (trlife::cdf(mid, params) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Central finite difference of the cdf.
inline double cdf_slope(double x, double h, const trlife::TRParams& params) {
    return (trlife::cdf(x + h, params) - trlife::cdf(x - h, params)) / (2.0 * h);
}

// Exact binomial tail in rational arithmetic. The double p is used exactly:
// p = num / 2^bits for some integer num.
inline double binom_cdf_exact(int c, int n, double p) {
    namespace mp = boost::multiprecision;
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("binom_cdf_exact: p in (0,1)");
    int exponent = 0;
    const double mantissa = std::frexp(p, &exponent);  // p = mantissa * 2^exponent
    const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    const int bits = 53 - exponent;  // p = scaled / 2^bits, exactly
    if (bits < 0) throw std::invalid_argument("binom_cdf_exact: p too large");

    const mp::cpp_int num_p = scaled;
    const mp::cpp_int denom = mp::cpp_int(1) << bits;
    const mp::cpp_int num_q = denom - num_p;

    mp::cpp_int binom = 1;                      // C(n, i)
    mp::cpp_int p_pow = 1;                      // num_p^i
    mp::cpp_int q_pow = mp::pow(num_q, static_cast<unsigned>(n));  // num_q^(n-i)
    mp::cpp_int total = 0;  // sum of C(n,i) num_p^i num_q^(n-i)
    for (int i = 0; i <= c; ++i) {
        total += binom * p_pow * q_pow;
        binom = binom * (n - i) / (i + 1);
        p_pow *= num_p;
        if (i < n) q_pow /= num_q;  // exact: q_pow always retains the factor
    }
    // total / denom^n, evaluated to double via a 200-digit float.
    const mp::cpp_int full = mp::pow(denom, static_cast<unsigned>(n));
    using big_float = mp::number<mp::cpp_bin_float<200>>;
    const big_float ratio = big_float(total) / big_float(full);
    return static_cast<double>(ratio);
}

}  // namespace oracle
