#include "roughmanifold/control.hpp"

#include <algorithm>
#include <cmath>

#include "roughmanifold/errors.hpp"
#include "roughmanifold/tensor_algebra.hpp"

namespace roughmanifold {

namespace {

std::size_t nearest_index(const std::vector<double>& grid, double t) {
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it == grid.end()) return grid.size() - 1;
    if (it == grid.begin()) return 0;
    std::size_t j = static_cast<std::size_t>(it - grid.begin());
    return (t - grid[j - 1] < grid[j] - t) ? j - 1 : j;
}

// Exact grid p-variation via dynamic programming, O(n^2).
double pvar_dp(const Eigen::MatrixXd& values, double p, std::size_t lo,
               std::size_t hi) {
    const std::size_t n = hi - lo + 1;
    std::vector<double> best(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
        double b = 0.0;
        for (std::size_t i = 0; i < j; ++i) {
            double d = (values.col(lo + j) - values.col(lo + i)).norm();
            double cand = best[i] + std::pow(d, p);
            if (cand > b) b = cand;
        }
        best[j] = b;
    }
    return best[n - 1];
}

// Lower estimate of the p-variation sum: best over dyadic block partitions.
double pvar_dyadic(const Eigen::MatrixXd& values, double p) {
    const std::size_t n = static_cast<std::size_t>(values.cols()) - 1;
    double best = 0.0;
    for (std::size_t block = 1; block <= n; block *= 2) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; i += block) {
            std::size_t j = std::min(i + block, n);
            sum += std::pow((values.col(j) - values.col(i)).norm(), p);
        }
        best = std::max(best, sum);
    }
    return best;
}

} // namespace

double measured_p_variation(const std::vector<double>& times,
                            const Eigen::MatrixXd& values, double p) {
    const std::size_t n = times.size() - 1;
    if (n == 0) return 0.0;
    double sum = (n <= 2048) ? pvar_dp(values, p, 0, n) : pvar_dyadic(values, p);
    return std::pow(sum, 1.0 / p);
}

double measured_level2_variation(const std::vector<double>& times,
                                 const std::vector<Eigen::MatrixXd>& step2,
                                 const Eigen::MatrixXd& values, double p) {
    (void)times;
    const std::size_t n = step2.size();
    if (n == 0) return 0.0;
    const double q = p / 2.0;
    std::vector<T2Element> level(n);
    for (std::size_t k = 0; k < n; ++k)
        level[k] = {values.col(k + 1) - values.col(k), step2[k]};
    double best = 0.0;
    while (true) {
        double sum = 0.0;
        for (const auto& e : level) sum += std::pow(e.level2.norm(), q);
        best = std::max(best, sum);
        if (level.size() == 1) break;
        std::vector<T2Element> up;
        up.reserve((level.size() + 1) / 2);
        for (std::size_t b = 0; b + 1 < level.size(); b += 2)
            up.push_back(t2_mul(level[b], level[b + 1]));
        if (level.size() % 2 == 1) up.push_back(level.back());
        level.swap(up);
    }
    return std::pow(best, 1.0 / q);
}

Control Control::empirical(const std::vector<double>& times,
                           const Eigen::MatrixXd& values, double p) {
    const std::size_t n = times.size() - 1;
    if (n + 1 != static_cast<std::size_t>(values.cols()))
        throw UsageError("empirical control: grid/value size mismatch");
    if (n > 512)
        throw UsageError("empirical control: grid too large (use uniform)");
    auto table = std::make_shared<Eigen::MatrixXd>(
        Eigen::MatrixXd::Zero(n + 1, n + 1));
    for (std::size_t i = 0; i + 1 <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j)
            (*table)(i, j) = pvar_dp(values, p, i, j);
    Control c;
    c.kind_ = Kind::Empirical;
    c.t0_ = times.front();
    c.t1_ = times.back();
    c.kappa_ = (*table)(0, n) / (c.t1_ - c.t0_);
    c.grid_ = std::make_shared<const std::vector<double>>(times);
    c.table_ = table;
    return c;
}

double Control::operator()(double s, double t) const {
    if (t <= s) return 0.0;
    if (kind_ == Kind::Uniform) return kappa_ * (t - s);
    std::size_t i = nearest_index(*grid_, s);
    std::size_t j = nearest_index(*grid_, t);
    if (i >= j) return 0.0;
    return (*table_)(i, j);
}

} // namespace roughmanifold
