#pragma once
// Integer-order Bessel functions of the first kind by Miller's backward
// recurrence, normalized with J_0 + 2 sum_k J_2k = 1.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qutrit {

inline constexpr double bessel_max_argument = 50.0;
inline constexpr int bessel_max_order = 60;

namespace detail {

inline int miller_start_order(int n_max, double ax) {
    const double top = std::max(static_cast<double>(n_max), ax);
    int m = static_cast<int>(std::ceil(top + 40.0 + 2.0 * std::sqrt(top)));
    return m + (m % 2);  // even start keeps the normalization sum aligned
}

}  // namespace detail

/// J_0(x) .. J_{n_max}(x) in one backward sweep. Orders far beyond |x|
/// underflow cleanly to zero.
inline std::vector<double> bessel_j_table(int n_max, double x) {
    if (n_max < 0) throw std::out_of_range("bessel table order must be >= 0");
    if (!std::isfinite(x) || std::abs(x) > bessel_max_argument)
        throw std::out_of_range("bessel argument outside the supported range |x| <= 50");

    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    const int m = detail::miller_start_order(n_max, ax);

    std::vector<double> j(static_cast<std::size_t>(m) + 2, 0.0);
    j[m + 1] = 0.0;
    j[m] = 1e-300;
    const double big = 1e250;
    for (int k = m; k >= 1; --k) {
        j[k - 1] = (2.0 * k / ax) * j[k] - j[k + 1];
        if (std::abs(j[k - 1]) > big) {
            for (int i = k - 1; i <= m; ++i) j[i] /= big;
        }
    }
    double norm = j[0];
    for (int k = 2; k <= m; k += 2) norm += 2.0 * j[k];

    for (int k = 0; k <= n_max; ++k) {
        double v = j[k] / norm;
        if (x < 0.0 && (k % 2 == 1)) v = -v;
        out[k] = v;
    }
    return out;
}

/// J_n(x) for integer n (negative orders via J_{-n} = (-1)^n J_n).
/// Supported domain |x| <= 50, |n| <= 60.
inline double bessel_j(int n, double x) {
    if (std::abs(n) > bessel_max_order)
        throw std::out_of_range("bessel order outside the supported range |n| <= 60");
    const int an = std::abs(n);
    const double v = bessel_j_table(an, x)[an];
    return (n < 0 && (an % 2 == 1)) ? -v : v;
}

}  // namespace qutrit
