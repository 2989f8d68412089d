#include "roughmanifold/sewing.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "roughmanifold/errors.hpp"

namespace roughmanifold {

GridRoughPath sew_cells(const CellCandidate& candidate,
                        const std::vector<double>& grid,
                        const Eigen::VectorXd& x0, double p,
                        const SewOptions& opts, SewStats* stats,
                        const Eigen::MatrixXd* pinned_values) {
    const std::size_t n = grid.size() - 1;
    const Eigen::Index N =
        pinned_values ? pinned_values->rows() : x0.size();
    std::vector<Eigen::MatrixXd> step2(n);
    Eigen::MatrixXd values(N, n + 1);
    SewStats st;

    std::vector<T2Element> sewn(n);
    for (std::size_t k = 0; k < n; ++k) {
        T2Element prev = candidate(k, 0, 0);
        double prev_delta = std::numeric_limits<double>::infinity();
        int depth = 0;
        int growth_streak = 0;
        for (int r = 1; r <= opts.max_rounds; ++r) {
            std::size_t pieces = std::size_t{1} << r;
            T2Element cur = candidate(k, r, 0);
            for (std::size_t i = 1; i < pieces; ++i)
                t2_mul_inplace(cur, candidate(k, r, i));
            double delta = t2_dist(prev, cur);
            prev = cur;
            depth = r;
            if (delta <= opts.cauchy_tol) break;
            growth_streak = (delta > 1.2 * prev_delta) ? growth_streak + 1 : 0;
            if (growth_streak >= 2 && delta > 1e3 * opts.cauchy_tol) {
                std::ostringstream os;
                os << "sewing refinement is not Cauchy on [" << grid[k] << ","
                   << grid[k + 1] << "] (change " << delta << " after " << r
                   << " rounds)";
                throw NumericError(os.str(), grid[k], grid[k + 1]);
            }
            if (r == opts.max_rounds && delta > st.worst_residual) {
                st.worst_residual = delta;
                st.worst_s = grid[k];
                st.worst_t = grid[k + 1];
            }
            prev_delta = delta;
        }
        st.max_depth = std::max(st.max_depth, depth);
        sewn[k] = std::move(prev);
    }

    if (pinned_values) {
        values = *pinned_values;
        for (std::size_t k = 0; k < n; ++k) step2[k] = sewn[k].level2;
    } else {
        values.col(0) = x0;
        for (std::size_t k = 0; k < n; ++k) {
            values.col(k + 1) = values.col(k) + sewn[k].level1;
            step2[k] = sewn[k].level2;
        }
    }
    if (stats) *stats = st;
    return make_grid_rough_path(grid, std::move(values), std::move(step2), p);
}

GridRoughPath sew(const std::function<T2Element(double, double)>& candidate,
                  const std::vector<double>& grid, const Eigen::VectorXd& x0,
                  double p, const SewOptions& opts, SewStats* stats) {
    if (grid.size() < 2) throw DomainError("sew: need at least one interval");
    if (opts.check_almost) {
        Control c = Control::uniform(1.0, grid.front(), grid.back());
        DefectReport pre = chen_defect(candidate, grid, p, c);
        if (!pre.passed())
            throw DomainError("sew: candidate multiplicativity defect is unbounded (" +
                              pre.summary() + ")");
    }
    auto cell_cand = [&](std::size_t cell, int depth, std::size_t idx) {
        double h = (grid[cell + 1] - grid[cell]) / std::ldexp(1.0, depth);
        double s = grid[cell] + static_cast<double>(idx) * h;
        return candidate(s, s + h);
    };
    return sew_cells(cell_cand, grid, x0, p, opts, stats);
}

DyadicDriverView::DyadicDriverView(const GridRoughPath& Z)
    : Z_(Z), cache2_(Z.num_steps()) {}

double DyadicDriverView::time(std::size_t cell, int depth, std::size_t idx) const {
    double h = (Z_.times[cell + 1] - Z_.times[cell]) / std::ldexp(1.0, depth);
    return Z_.times[cell] + static_cast<double>(idx) * h;
}

Eigen::VectorXd DyadicDriverView::value(std::size_t cell, int depth,
                                        std::size_t idx) const {
    double frac = static_cast<double>(idx) / std::ldexp(1.0, depth);
    return Z_.values.col(cell) +
           frac * (Z_.values.col(cell + 1) - Z_.values.col(cell));
}

Eigen::VectorXd DyadicDriverView::trace_inc(std::size_t cell, int depth) const {
    return (Z_.values.col(cell + 1) - Z_.values.col(cell)) / std::ldexp(1.0, depth);
}

const Eigen::MatrixXd& DyadicDriverView::piece2(std::size_t cell, int depth) const {
    auto& cv = cache2_[cell];
    if (cv.empty()) cv.push_back(Z_.step2[cell]);
    while (static_cast<int>(cv.size()) <= depth) {
        int d = static_cast<int>(cv.size()) - 1;
        Eigen::VectorXd dx =
            (Z_.values.col(cell + 1) - Z_.values.col(cell)) / std::ldexp(1.0, d);
        cv.push_back(0.5 * cv.back() - 0.125 * dx * dx.transpose());
    }
    return cv[static_cast<std::size_t>(depth)];
}

T2Element DyadicDriverView::piece(std::size_t cell, int depth,
                                  std::size_t idx) const {
    (void)idx;
    return {trace_inc(cell, depth), piece2(cell, depth)};
}

} // namespace roughmanifold
