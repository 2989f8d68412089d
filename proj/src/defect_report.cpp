#include "roughmanifold/defect_report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace roughmanifold {

std::string DefectReport::summary() const {
    std::ostringstream os;
    os << (passed() ? "pass" : "FAIL") << " max_C=" << max_constant
       << " slope=" << slope << " max_raw=" << max_raw;
    return os.str();
}

DefectAccumulator::DefectAccumulator(double t0, double t1, double min_window,
                                     double p, const Control& control)
    : t0_(t0), t1_(t1), p_(p), control_(control) {
    double span = t1 - t0;
    double w = span;
    while (w >= std::max(min_window, span * 1e-9)) {
        windows_.push_back(w);
        w *= 0.5;
    }
    if (windows_.empty()) windows_.push_back(span);
    best_.assign(windows_.size(), 0.0);
    best_raw_.assign(windows_.size(), 0.0);
    best_s_.assign(windows_.size(), t0_);
    best_t_.assign(windows_.size(), t1_);
}

void DefectAccumulator::add(double s, double t, double raw) {
    if (t <= s) return;
    max_raw_ = std::max(max_raw_, raw);
    double len = t - s;
    // window j holds pairs with windows_[j]/2 < len <= windows_[j]
    std::size_t j = 0;
    while (j + 1 < windows_.size() && len <= windows_[j] * 0.5) ++j;
    double w = control_(s, t);
    if (w <= 0.0) return;
    double c = raw / std::pow(w, 3.0 / p_);
    if (c > best_[j]) {
        best_[j] = c;
        best_raw_[j] = raw;
        best_s_[j] = s;
        best_t_[j] = t;
    }
}

DefectReport DefectAccumulator::finalize() const {
    DefectReport r;
    r.windows = windows_;
    r.constants = best_;
    r.max_raw = max_raw_;
    std::vector<double> lx, ly;
    for (std::size_t j = 0; j < best_.size(); ++j) {
        if (best_raw_[j] <= r.raw_floor) continue; // floating noise
        if (best_[j] > r.max_constant) {
            r.max_constant = best_[j];
            r.worst_s = best_s_[j];
            r.worst_t = best_t_[j];
        }
        lx.push_back(std::log(windows_[j]));
        ly.push_back(std::log(best_[j]));
    }
    // The remainder claim is about small windows: fit the three smallest
    // dyadic halvings that carry signal (windows are stored largest first).
    if (lx.size() > 4) {
        lx.erase(lx.begin(), lx.end() - 4);
        ly.erase(ly.begin(), ly.end() - 4);
    }
    r.slope = (lx.size() >= 2) ? least_squares_slope(lx, ly) : 0.0;
    return r;
}

double least_squares_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

void for_sampled_pairs(std::size_t n, std::size_t max_per_band,
                       const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n < 2) return;
    for (std::size_t span = 1; span < n; span *= 2) {
        // two representative span lengths per dyadic band
        std::size_t spans[2] = {span, std::min(span + span / 2, n - 1)};
        for (int v = 0; v < (spans[1] > spans[0] ? 2 : 1); ++v) {
            std::size_t k = spans[v];
            std::size_t count = n - k;
            std::size_t stride = std::max<std::size_t>(1, count / max_per_band);
            for (std::size_t i = 0; i < count; i += stride) fn(i, i + k);
            if ((count - 1) % stride != 0) fn(count - 1, count - 1 + k);
        }
    }
}

} // namespace roughmanifold
