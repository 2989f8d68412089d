#include "roughmanifold/grid_rough_path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roughmanifold/errors.hpp"

namespace roughmanifold {

namespace {
constexpr double kGridTol = 1e-9;
}

double GridRoughPath::max_mesh() const {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        m = std::max(m, times[k + 1] - times[k]);
    return m;
}

std::size_t GridRoughPath::index_of(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t - kGridTol);
    if (it == times.end() || std::abs(*it - t) > kGridTol * (1.0 + std::abs(t))) {
        std::ostringstream os;
        os << "time " << t << " is not on the grid (no interpolation at this layer)";
        throw DomainError(os.str());
    }
    return static_cast<std::size_t>(it - times.begin());
}

T2Element GridRoughPath::step(std::size_t k) const {
    return {values.col(k + 1) - values.col(k), step2[k]};
}

void GridRoughPath::validate() const {
    if (times.size() < 2) throw DomainError("grid rough path needs at least 2 times");
    if (static_cast<std::size_t>(values.cols()) != times.size())
        throw DomainError("values/grid size mismatch");
    if (step2.size() + 1 != times.size())
        throw DomainError("step2/grid size mismatch");
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        if (!(times[k + 1] > times[k]))
            throw DomainError("grid times must be strictly increasing");
        if (step2[k].rows() != dim() || step2[k].cols() != dim())
            throw DomainError("step2 entry has wrong shape");
    }
    if (!(p >= 2.0 && p < 3.0)) throw DomainError("p must lie in [2,3)");
}

GridRoughPath make_grid_rough_path(std::vector<double> times,
                                   Eigen::MatrixXd values,
                                   std::vector<Eigen::MatrixXd> step2,
                                   double p) {
    GridRoughPath X;
    X.times = std::move(times);
    X.values = std::move(values);
    X.step2 = std::move(step2);
    X.p = p;
    X.validate();
    double v1 = measured_p_variation(X.times, X.values, p);
    double v2 = measured_level2_variation(X.times, X.step2, X.values, p);
    double total = std::pow(v1, p) + std::pow(v2, p / 2.0);
    if (!(total > 1e-300)) total = X.t_end() - X.t_begin();
    X.control = Control::uniform(total / (X.t_end() - X.t_begin()),
                                 X.t_begin(), X.t_end());
    return X;
}

T2Element increment(const GridRoughPath& X, double s, double t) {
    std::size_t i = X.index_of(s);
    std::size_t j = X.index_of(t);
    if (i > j) throw DomainError("increment: s must not exceed t");
    T2Element acc = t2_unit(X.dim());
    for (std::size_t k = i; k < j; ++k) t2_mul_inplace(acc, X.step(k));
    return acc;
}

PrefixIncrements::PrefixIncrements(const GridRoughPath& X) : X_(X) {
    const std::size_t n = X.num_steps();
    prefix2_.resize(n + 1);
    T2Element acc = t2_unit(X.dim());
    prefix2_[0] = acc.level2;
    for (std::size_t k = 0; k < n; ++k) {
        t2_mul_inplace(acc, X.step(k));
        prefix2_[k + 1] = acc.level2;
    }
}

Eigen::VectorXd PrefixIncrements::level1_between(std::size_t i, std::size_t j) const {
    return X_.values.col(j) - X_.values.col(i);
}

Eigen::MatrixXd PrefixIncrements::level2_between(std::size_t i, std::size_t j) const {
    return prefix2_[j] - prefix2_[i] -
           (X_.values.col(i) - X_.values.col(0)) *
               (X_.values.col(j) - X_.values.col(i)).transpose();
}

T2Element PrefixIncrements::between(std::size_t i, std::size_t j) const {
    return {level1_between(i, j), level2_between(i, j)};
}

GridRoughPath signature_lift(const std::vector<double>& times,
                             const Eigen::MatrixXd& samples, double p) {
    if (times.size() < 2) throw DomainError("signature_lift: need at least 2 samples");
    if (static_cast<std::size_t>(samples.cols()) != times.size())
        throw DomainError("signature_lift: sample/grid size mismatch");
    std::vector<Eigen::MatrixXd> step2(times.size() - 1);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        Eigen::VectorXd dx = samples.col(k + 1) - samples.col(k);
        step2[k] = 0.5 * dx * dx.transpose();
    }
    return make_grid_rough_path(times, samples, std::move(step2), p);
}

GridRoughPath pure_area_path(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                             const std::vector<double>& times, double p) {
    const Eigen::Index N = v.size();
    Eigen::MatrixXd area = v * w.transpose() - w * v.transpose();
    std::vector<Eigen::MatrixXd> step2(times.size() - 1);
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        step2[k] = area * (times[k + 1] - times[k]);
    return make_grid_rough_path(times, Eigen::MatrixXd::Zero(N, times.size()),
                                std::move(step2), p);
}

DefectReport chen_defect(const std::function<T2Element(double, double)>& candidate,
                         const std::vector<double>& grid, double p,
                         const Control& control) {
    const std::size_t n = grid.size() - 1;
    double min_window = grid.back() - grid.front();
    for (std::size_t k = 0; k < n; ++k)
        min_window = std::min(min_window, grid[k + 1] - grid[k]);
    DefectAccumulator acc(grid.front(), grid.back(), 2.0 * min_window, p, control);

    // Triples over the dyadic block hierarchy (plus all adjacent triples).
    struct Node { std::size_t i, j; };
    std::vector<Node> level;
    for (std::size_t k = 0; k < n; ++k) level.push_back({k, k + 1});
    auto eval_triple = [&](std::size_t i, std::size_t m, std::size_t j) {
        T2Element whole = candidate(grid[i], grid[j]);
        T2Element a = candidate(grid[i], grid[m]);
        T2Element b = candidate(grid[m], grid[j]);
        Eigen::MatrixXd d2 = whole.level2 - a.level2 - b.level2 -
                             a.level1 * b.level1.transpose();
        Eigen::VectorXd d1 = whole.level1 - a.level1 - b.level1;
        acc.add(grid[i], grid[j], std::max(entry_norm(d2), entry_norm(d1)));
    };
    for (std::size_t k = 0; k + 2 <= n; ++k) eval_triple(k, k + 1, k + 2);
    while (level.size() > 1) {
        std::vector<Node> up;
        for (std::size_t b = 0; b + 1 < level.size(); b += 2) {
            Node parent{level[b].i, level[b + 1].j};
            eval_triple(parent.i, level[b].j, parent.j);
            up.push_back(parent);
        }
        if (level.size() % 2 == 1) up.push_back(level.back());
        level.swap(up);
    }
    return acc.finalize();
}

DefectReport chen_defect(const GridRoughPath& X) {
    const std::size_t n = X.num_steps();
    DefectAccumulator acc(X.t_begin(), X.t_end(),
                          2.0 * (X.t_end() - X.t_begin()) / std::max<std::size_t>(n, 1),
                          X.p, X.control);
    // Bottom-up balanced products; the defect at each node is the floating
    // error of the Chen identity applied to its two children.
    struct Node { std::size_t i, j; T2Element v; };
    std::vector<Node> level;
    level.reserve(n);
    for (std::size_t k = 0; k < n; ++k) level.push_back({k, k + 1, X.step(k)});
    while (level.size() > 1) {
        std::vector<Node> up;
        up.reserve((level.size() + 1) / 2);
        for (std::size_t b = 0; b + 1 < level.size(); b += 2) {
            const auto& L = level[b];
            const auto& R = level[b + 1];
            T2Element parent = t2_mul(L.v, R.v);
            Eigen::MatrixXd d2 = parent.level2 - L.v.level2 - R.v.level2 -
                                 L.v.level1 * R.v.level1.transpose();
            Eigen::VectorXd d1 = parent.level1 - L.v.level1 - R.v.level1;
            Eigen::VectorXd tr = X.values.col(R.j) - X.values.col(L.i) - parent.level1;
            double raw = std::max({entry_norm(d2), entry_norm(d1), entry_norm(tr)});
            acc.add(X.times[L.i], X.times[R.j], raw);
            up.push_back({L.i, R.j, std::move(parent)});
        }
        if (level.size() % 2 == 1) up.push_back(level.back());
        level.swap(up);
    }
    if (n == 1) acc.add(X.times[0], X.times[1], 0.0);
    return acc.finalize();
}

DefectReport weak_geometricity_defect(const GridRoughPath& X) {
    const std::size_t n = X.num_steps();
    DefectAccumulator acc(X.t_begin(), X.t_end(),
                          2.0 * (X.t_end() - X.t_begin()) / std::max<std::size_t>(n, 1),
                          X.p, X.control);
    PrefixIncrements pre(X);
    auto visit = [&](std::size_t i, std::size_t j) {
        Eigen::VectorXd dx = pre.level1_between(i, j);
        Eigen::MatrixXd l2 = pre.level2_between(i, j);
        Eigen::MatrixXd d = 0.5 * (l2 + l2.transpose()) - 0.5 * dx * dx.transpose();
        acc.add(X.times[i], X.times[j], entry_norm(d));
    };
    for (std::size_t k = 0; k < n; ++k) visit(k, k + 1);
    for_sampled_pairs(n + 1, 512, visit);
    return acc.finalize();
}

bool is_weakly_geometric(const GridRoughPath& X, double tol_constant) {
    DefectReport r = weak_geometricity_defect(X);
    return r.max_constant <= tol_constant && r.slope >= r.slope_min;
}

double rough_distance(const GridRoughPath& X, const GridRoughPath& Y,
                      const Control& control) {
    if (X.dim() != Y.dim()) throw DomainError("rough_distance: dimension mismatch");
    if (X.times.size() != Y.times.size())
        throw DomainError("rough_distance: grid mismatch");
    for (std::size_t k = 0; k < X.times.size(); ++k)
        if (std::abs(X.times[k] - Y.times[k]) > kGridTol * (1.0 + std::abs(X.times[k])))
            throw DomainError("rough_distance: grid mismatch");

    const std::size_t m = X.times.size();
    PrefixIncrements px(X), py(Y);
    // D_k = x_k - y_k (level-1 differences are D_j - D_i)
    Eigen::MatrixXd D = X.values - Y.values;
    std::vector<Eigen::MatrixXd> E(m);
    for (std::size_t k = 0; k < m; ++k)
        E[k] = px.level2_between(0, k) - py.level2_between(0, k);
    const double ip = 1.0 / X.p;
    double sup1 = 0.0, sup2 = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        Eigen::VectorXd xi = X.values.col(i) - X.values.col(0);
        Eigen::VectorXd yi = Y.values.col(i) - Y.values.col(0);
        for (std::size_t j = i + 1; j < m; ++j) {
            double w = control(X.times[i], X.times[j]);
            if (w <= 0.0) continue;
            double d1 = (D.col(j) - D.col(i)).norm();
            Eigen::MatrixXd M = E[j] - E[i] -
                                xi * (X.values.col(j) - X.values.col(i)).transpose() +
                                yi * (Y.values.col(j) - Y.values.col(i)).transpose();
            sup1 = std::max(sup1, d1 / std::pow(w, ip));
            sup2 = std::max(sup2, M.norm() / std::pow(w, 2.0 * ip));
        }
    }
    return sup1 + sup2;
}

double rough_distance(const GridRoughPath& X, const GridRoughPath& Y) {
    return rough_distance(X, Y, X.control);
}

GridRoughPath concatenate(const std::vector<GridRoughPath>& pieces,
                          const Eigen::VectorXd& x0, double endpoint_tol) {
    if (pieces.empty()) throw DomainError("concatenate: no pieces");
    const Eigen::Index N = pieces.front().dim();
    std::vector<double> times;
    std::vector<Eigen::MatrixXd> step2;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const auto& P = pieces[k];
        if (P.dim() != N) throw DomainError("concatenate: dimension mismatch");
        if (k > 0) {
            const auto& Q = pieces[k - 1];
            if (std::abs(P.t_begin() - Q.t_end()) > kGridTol)
                throw DomainError("concatenate: pieces must abut in time");
            if ((P.values.col(0) - Q.values.col(Q.values.cols() - 1)).norm() >
                endpoint_tol)
                throw DomainError("concatenate: endpoint trace mismatch");
        }
        std::size_t start = (k == 0) ? 0 : 1;
        for (std::size_t i = start; i < P.times.size(); ++i)
            times.push_back(P.times[i]);
        for (const auto& s : P.step2) step2.push_back(s);
    }
    Eigen::MatrixXd values(N, times.size());
    values.col(0) = x0;
    std::size_t col = 1;
    for (const auto& P : pieces)
        for (std::size_t i = 0; i + 1 < P.times.size(); ++i, ++col)
            values.col(col) = values.col(col - 1) + (P.values.col(i + 1) - P.values.col(i));
    return make_grid_rough_path(std::move(times), std::move(values),
                                std::move(step2), pieces.front().p);
}

Eigen::MatrixXd dyadic_piece_level2(const Eigen::MatrixXd& step2,
                                    const Eigen::VectorXd& dx, int depth) {
    Eigen::MatrixXd A = step2;
    Eigen::VectorXd d = dx;
    for (int r = 0; r < depth; ++r) {
        A = 0.5 * A - 0.125 * d * d.transpose();
        d *= 0.5;
    }
    return A;
}

GridRoughPath refine_dyadic(const GridRoughPath& X) {
    const std::size_t n = X.num_steps();
    std::vector<double> times(2 * n + 1);
    Eigen::MatrixXd values(X.dim(), 2 * n + 1);
    std::vector<Eigen::MatrixXd> step2(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        times[2 * k] = X.times[k];
        times[2 * k + 1] = 0.5 * (X.times[k] + X.times[k + 1]);
        values.col(2 * k) = X.values.col(k);
        values.col(2 * k + 1) = 0.5 * (X.values.col(k) + X.values.col(k + 1));
        Eigen::VectorXd dx = X.values.col(k + 1) - X.values.col(k);
        Eigen::MatrixXd half = 0.5 * X.step2[k] - 0.125 * dx * dx.transpose();
        step2[2 * k] = half;
        step2[2 * k + 1] = half;
    }
    times.back() = X.times.back();
    values.col(2 * n) = X.values.col(n);
    GridRoughPath out;
    out.times = std::move(times);
    out.values = std::move(values);
    out.step2 = std::move(step2);
    out.p = X.p;
    out.control = X.control;
    out.validate();
    return out;
}

GridRoughPath restrict_to_times(const GridRoughPath& X,
                                const std::vector<double>& coarse_times) {
    std::vector<std::size_t> idx(coarse_times.size());
    for (std::size_t k = 0; k < coarse_times.size(); ++k)
        idx[k] = X.index_of(coarse_times[k]);
    Eigen::MatrixXd values(X.dim(), coarse_times.size());
    std::vector<Eigen::MatrixXd> step2(coarse_times.size() - 1);
    PrefixIncrements pre(X);
    for (std::size_t k = 0; k < coarse_times.size(); ++k)
        values.col(k) = X.values.col(idx[k]);
    for (std::size_t k = 0; k + 1 < coarse_times.size(); ++k)
        step2[k] = pre.level2_between(idx[k], idx[k + 1]);
    GridRoughPath out;
    out.times = coarse_times;
    out.values = std::move(values);
    out.step2 = std::move(step2);
    out.p = X.p;
    out.control = X.control;
    out.validate();
    return out;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t n_steps) {
    std::vector<double> g(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k)
        g[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n_steps);
    g.back() = t1;
    return g;
}

} // namespace roughmanifold
