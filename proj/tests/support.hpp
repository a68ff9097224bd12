// Shared test oracles, independent of the library's implementation paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace testsup {

// Brute-force Poisson tail sums via log-pmf (independent of the library's
// recurrence-based evaluation). Terms added until below 1e-18.
inline double poisson_pmf_log(double lambda, int k) {
    return -lambda + k * std::log(lambda) - std::lgamma(static_cast<double>(k) + 1.0);
}

inline double brute_poisson_cdf(double lambda, int k) {
    if (lambda == 0.0)
        return 1.0;
    double sum = 0.0;
    for (int i = 0; i <= k; ++i)
        sum += std::exp(poisson_pmf_log(lambda, i));
    return sum;
}

inline double brute_poisson_tail(double lambda, int k) {
    if (lambda == 0.0)
        return 0.0;
    double sum = 0.0;
    for (int i = k + 1;; ++i) {
        const double term = std::exp(poisson_pmf_log(lambda, i));
        sum += term;
        if (term < 1e-18 && i > static_cast<int>(lambda))
            break;
    }
    return sum;
}

// Flat-background pulsed g2(0) estimate for signal s and background b per window.
inline double g2_background_formula(double s, double b) {
    return (2.0 * s * b + b * b) / ((s + b) * (s + b));
}

// Least-squares fit of y = A sin^2(L sqrt(eta0 P)) with L fixed, via
// Gauss-Newton on (A, eta0). P in mW, eta0 in W^-1 m^-2.
struct SinSqFit {
    double amplitude = 0.0;
    double eta0 = 0.0;
};

inline SinSqFit fit_sinsq(const std::vector<double>& p_mw, const std::vector<double>& y,
                          double length_m, double a0, double eta0_0) {
    double A = a0, eta0 = eta0_0;
    for (int iter = 0; iter < 200; ++iter) {
        double h11 = 0, h12 = 0, h22 = 0, g1 = 0, g2 = 0;
        for (std::size_t i = 0; i < p_mw.size(); ++i) {
            const double pw = p_mw[i] * 1e-3;
            const double u = length_m * std::sqrt(eta0 * pw);
            const double s = std::sin(u);
            const double model = A * s * s;
            const double r = y[i] - model;
            const double dA = s * s;
            const double dEta = u > 0 ? A * std::sin(2.0 * u) * u / (2.0 * eta0) : 0.0;
            h11 += dA * dA;
            h12 += dA * dEta;
            h22 += dEta * dEta;
            g1 += dA * r;
            g2 += dEta * r;
        }
        const double det = h11 * h22 - h12 * h12;
        if (std::abs(det) < 1e-30)
            break;
        const double dA = (h22 * g1 - h12 * g2) / det;
        const double dEta = (h11 * g2 - h12 * g1) / det;
        A += dA;
        eta0 += dEta;
        if (std::abs(dA) < 1e-14 * std::abs(A) && std::abs(dEta) < 1e-14 * std::abs(eta0))
            break;
    }
    return {A, eta0};
}

// Slope of y = m x through the origin.
inline double fit_slope_through_origin(const std::vector<double>& x,
                                       const std::vector<double>& y) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += x[i] * y[i];
        den += x[i] * x[i];
    }
    return num / den;
}

// Two-sample Kolmogorov-Smirnov test; asymptotic p-value (conservative for
// discrete data, which only makes the acceptance check stricter to fail).
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lambda = (ne + 0.12 + 0.11 / ne) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

} // namespace testsup
