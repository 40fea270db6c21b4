#pragma once
// Peak location, Lorentzian fitting and grid-to-grid comparison.

#include <Eigen/Core>
#include <unsupported/Eigen/LevenbergMarquardt>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qutrit/grid.hpp"
#include "qutrit/symmetric_eigen.hpp"

namespace qutrit {

struct Peak {
    double center = 0.0;  // parabolic refinement of the sampled maximum
    double value = 0.0;
    double prominence = 0.0;
    std::size_t index = 0;
};

/// Local maxima of y(x) whose prominence is at least min_prominence.
/// Plateaus count once, at their left edge; endpoints never count.
inline std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y,
                                    double min_prominence) {
    const std::size_t n = y.size();
    if (x.size() != n) throw parameter_error("peak search needs matching x and y");
    if (n < 5) throw parameter_error("peak search needs at least 5 points");
    for (double v : y)
        if (!std::isfinite(v)) throw parameter_error("peak search needs finite values");

    std::vector<Peak> out;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1])) continue;
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i]) ++j;
        if (j + 1 >= n || !(y[j + 1] < y[i])) continue;

        // Prominence: height above the higher of the two lowest points
        // reachable before climbing above this peak.
        double left_min = y[i];
        for (std::size_t k = i; k-- > 0;) {
            if (y[k] > y[i]) break;
            left_min = std::min(left_min, y[k]);
        }
        double right_min = y[i];
        for (std::size_t k = j + 1; k < n; ++k) {
            if (y[k] > y[i]) break;
            right_min = std::min(right_min, y[k]);
        }
        const double prominence = y[i] - std::max(left_min, right_min);
        if (prominence < min_prominence) continue;

        Peak p{x[i], y[i], prominence, i};
        if (j == i) {
            const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
            if (denom < 0.0) {
                const double shift = 0.5 * (y[i - 1] - y[i + 1]) / denom;
                const double h = shift >= 0.0 ? x[i + 1] - x[i] : x[i] - x[i - 1];
                p.center = x[i] + shift * h;
                p.value = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift;
            }
        } else {
            p.center = 0.5 * (x[i] + x[j]);
        }
        out.push_back(p);
        i = j;
    }
    return out;
}

struct PeakFit {
    double center = 0.0;
    double fwhm = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    double residual_rms = 0.0;
    int iterations = 0;
    bool converged = false;
    bool unresolved = false;  // narrower than the sampling, or centred outside the window
    /// Residual above 2% of the amplitude, or an unresolved fit: the window
    /// is not one clean peak.
    [[nodiscard]] bool poor() const {
        return unresolved || residual_rms > 0.02 * std::abs(amplitude);
    }
};

class fit_error : public convergence_error {
public:
    fit_error(const std::string& what, int iterations, PeakFit best)
        : convergence_error(what, iterations), best_(best) {}
    [[nodiscard]] const PeakFit& best() const { return best_; }

private:
    PeakFit best_;
};

namespace detail {

// amplitude / (1 + ((x - c)/w)^2) + offset on scaled coordinates.
struct LorentzianResidual : Eigen::DenseFunctor<double> {
    const Eigen::VectorXd& x;
    const Eigen::VectorXd& y;
    LorentzianResidual(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys)
        : DenseFunctor<double>(4, static_cast<int>(xs.size())), x(xs), y(ys) {}

    int operator()(const InputType& p, ValueType& r) const {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double u = (x(i) - p(1)) / p(2);
            r(i) = p(0) / (1.0 + u * u) + p(3) - y(i);
        }
        return 0;
    }
    int df(const InputType& p, JacobianType& j) const {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double u = (x(i) - p(1)) / p(2);
            const double l = 1.0 / (1.0 + u * u);
            j(i, 0) = l;
            j(i, 1) = 2.0 * p(0) * l * l * u / p(2);
            j(i, 2) = 2.0 * p(0) * l * l * u * u / p(2);
            j(i, 3) = 1.0;
        }
        return 0;
    }
};

}  // namespace detail

/// Levenberg-Marquardt fit of a single Lorentzian plus offset to the samples
/// with lo <= x <= hi. Throws fit_error (holding the best parameters found)
/// when the iteration budget runs out.
inline PeakFit fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y,
                              double lo, double hi, int max_evaluations = 2000) {
    if (x.size() != y.size()) throw parameter_error("fit needs matching x and y");
    std::vector<double> wx, wy;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= lo && x[i] <= hi && std::isfinite(y[i])) {
            wx.push_back(x[i]);
            wy.push_back(y[i]);
        }
    if (wx.size() < 5) throw parameter_error("fit window needs at least 5 finite points");

    // Work in coordinates centred on the window and scaled to O(1).
    const double x0 = 0.5 * (wx.front() + wx.back());
    const double xs = std::max(0.5 * (wx.back() - wx.front()), 1e-300);
    const auto [ymin_it, ymax_it] = std::minmax_element(wy.begin(), wy.end());
    const double ys = std::max(std::abs(*ymax_it), std::abs(*ymin_it)) > 0.0
                          ? std::max(std::abs(*ymax_it), std::abs(*ymin_it))
                          : 1.0;
    const Eigen::Index n = static_cast<Eigen::Index>(wx.size());
    Eigen::VectorXd ux(n), uy(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        ux(i) = (wx[i] - x0) / xs;
        uy(i) = wy[i] / ys;
    }

    const Eigen::Index imax = std::distance(wy.begin(), ymax_it);
    const double base = *ymin_it / ys;
    const double height = uy(imax) - base;
    Eigen::Index above = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (uy(i) - base > 0.5 * height) ++above;
    const double spacing = (ux(n - 1) - ux(0)) / static_cast<double>(n - 1);
    Eigen::VectorXd p(4);
    p << height, ux(imax), std::max(0.5 * above * spacing, spacing), base;

    detail::LorentzianResidual f(ux, uy);
    Eigen::LevenbergMarquardt<detail::LorentzianResidual> lm(f);
    lm.setMaxfev(max_evaluations);
    lm.setXtol(1e-12);
    lm.setFtol(1e-14);
    const auto status = lm.minimize(p);

    PeakFit fit;
    fit.amplitude = p(0) * ys;
    fit.center = x0 + p(1) * xs;
    fit.fwhm = 2.0 * std::abs(p(2)) * xs;
    fit.offset = p(3) * ys;
    fit.iterations = static_cast<int>(lm.iterations());
    Eigen::VectorXd r(n);
    f(p, r);
    fit.residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(n)) * ys;
    fit.unresolved = fit.fwhm < spacing * xs || fit.center < wx.front() || fit.center > wx.back();

    using namespace Eigen::LevenbergMarquardtSpace;
    if (status == ImproperInputParameters) throw parameter_error("improper Lorentzian fit input");
    fit.converged = status != TooManyFunctionEvaluation && status != UserAsked &&
                    std::isfinite(fit.center) && std::isfinite(fit.fwhm) && fit.fwhm > 0.0;
    if (!fit.converged)
        throw fit_error("Lorentzian fit did not converge", fit.iterations, fit);
    return fit;
}

struct RowComparison {
    double control = 0.0;
    std::size_t matched = 0;
    std::size_t unmatched = 0;    // peaks present in only one grid
    double max_peak_offset = 0.0; // MHz, over matched pairs
};

struct CompareReport {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    std::size_t compared_points = 0;
    std::vector<RowComparison> rows;
};

/// Pointwise differences and per-row peak offsets. Peaks are paired to the
/// nearest peak of the other grid within max_pair_distance (MHz).
inline CompareReport compare(const SpectrumGrid& a, const SpectrumGrid& b,
                             double min_prominence = 0.05, double max_pair_distance = 5.0) {
    a.validate();
    b.validate();
    if (a.delta_axis != b.delta_axis || a.control_axis != b.control_axis)
        throw parameter_error("grids have different axes");

    CompareReport rep;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (!std::isfinite(a.values[i]) || !std::isfinite(b.values[i])) continue;
        const double d = std::abs(a.values[i] - b.values[i]);
        rep.max_abs = std::max(rep.max_abs, d);
        sum += d;
        ++rep.compared_points;
    }
    rep.mean_abs = rep.compared_points ? sum / static_cast<double>(rep.compared_points) : 0.0;

    for (std::size_t c = 0; c < a.rows(); ++c) {
        RowComparison row{a.control_axis[c], 0, 0, 0.0};
        const std::vector<double> ra = a.row(c), rb = b.row(c);
        auto finite = [](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
        };
        if (a.cols() >= 5 && finite(ra) && finite(rb)) {
            const auto pa = find_peaks(a.delta_axis, ra, min_prominence);
            const auto pb = find_peaks(b.delta_axis, rb, min_prominence);
            std::vector<bool> used(pb.size(), false);
            for (const Peak& p : pa) {
                std::size_t best = pb.size();
                double best_d = max_pair_distance;
                for (std::size_t k = 0; k < pb.size(); ++k) {
                    const double d = std::abs(pb[k].center - p.center);
                    if (!used[k] && d <= best_d) {
                        best = k;
                        best_d = d;
                    }
                }
                if (best == pb.size()) {
                    ++row.unmatched;
                    continue;
                }
                used[best] = true;
                ++row.matched;
                row.max_peak_offset = std::max(row.max_peak_offset, best_d);
            }
            row.unmatched += static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
        }
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace qutrit
