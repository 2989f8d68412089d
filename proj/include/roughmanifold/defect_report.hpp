#ifndef ROUGHMANIFOLD_DEFECT_REPORT_HPP
#define ROUGHMANIFOLD_DEFECT_REPORT_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "roughmanifold/control.hpp"

namespace roughmanifold {

/// Measured remainder constants for an approximate-equality claim.
///
/// Pairs (s,t) are bucketed into annular dyadic windows
/// delta/2 < t-s <= delta with delta = T/2^j, and for each window we record
/// C(delta) = max |defect(s,t)| / w(s,t)^{3/p}. The claim "defect is a
/// remainder" translates into C(delta) staying bounded as the window shrinks:
/// we fit the least-squares exponent of log C against log delta and require
/// it to be >= slope_min together with an absolute cap on C.
struct DefectReport {
    std::vector<double> windows;   // window upper edges, decreasing
    std::vector<double> constants; // C per window (entrywise-max defect norm)
    double slope = 0.0;
    double max_raw = 0.0;          // largest unnormalized defect seen
    double max_constant = 0.0;
    double worst_s = 0.0, worst_t = 0.0; // location of max_constant

    double cap = 1e3;
    double slope_min = -0.05;
    /// Windows whose raw defect stays below this are treated as exact zeros
    /// (floating noise) and excluded from the slope fit and the cap.
    double raw_floor = 1e-10;
    /// Constants this small certify the remainder bound outright; the slope
    /// extrapolation only arbitrates when the constants are non-negligible.
    double negligible = 1e-3;

    bool passed() const {
        return max_constant <= cap &&
               (slope >= slope_min || max_constant <= negligible);
    }
    std::string summary() const;
};

/// Accumulates (s,t,|defect|) samples into dyadic windows and produces the
/// report. The window ladder spans [t0,t1] down to min_window.
class DefectAccumulator {
public:
    DefectAccumulator(double t0, double t1, double min_window, double p,
                      const Control& control);

    void add(double s, double t, double raw_defect_norm);
    DefectReport finalize() const;

    int num_windows() const { return static_cast<int>(windows_.size()); }

private:
    double t0_, t1_, p_;
    const Control& control_;
    std::vector<double> windows_;
    std::vector<double> best_;
    std::vector<double> best_raw_;
    std::vector<double> best_s_, best_t_;
    double max_raw_ = 0.0;
};

/// Least-squares slope of y against x (used for log-log convergence fits).
double least_squares_slope(const std::vector<double>& x,
                           const std::vector<double>& y);

/// Deterministic pair sampler: visits grid index pairs (i,j), i<j, banded by
/// span, with at most max_per_band pairs per dyadic span band.
void for_sampled_pairs(std::size_t n_points, std::size_t max_per_band,
                       const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace roughmanifold

#endif
