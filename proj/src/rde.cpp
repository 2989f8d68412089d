#include "roughmanifold/rde.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "roughmanifold/errors.hpp"

namespace roughmanifold {

Eigen::MatrixXd VectorFieldFamily::dY_or_fd(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& v) const {
    if (dY) return dY(x, v);
    const double h = 1e-5;
    double scale = std::max(1.0, v.norm());
    Eigen::VectorXd u = v / scale;
    return scale * (Y(x + h * u) - Y(x - h * u)) / (2.0 * h);
}

void RdeConfig::validate() const {
    if (base_mesh < 0.0 || cauchy_tol <= 0.0 || r_max <= 0.0 ||
        step_cap_factor <= 0.0 || max_refinements < 0)
        throw UsageError("RdeConfig: tolerances and caps must be positive");
}

Eigen::VectorXd davie_increment(const VectorFieldFamily& Y,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& dz,
                                const Eigen::MatrixXd& Z2) {
    Eigen::MatrixXd B = Y.Y(x);
    Eigen::VectorXd inc = B * dz;
    for (Eigen::Index a = 0; a < Z2.rows(); ++a) {
        if (Z2.row(a).cwiseAbs().maxCoeff() == 0.0) continue;
        Eigen::MatrixXd Da = Y.dY_or_fd(x, B.col(a));
        inc.noalias() += Da * Z2.row(a).transpose();
    }
    return inc;
}

namespace {

Eigen::MatrixXd davie_trace_solve_impl(
    const VectorFieldFamily& Y, const GridRoughPath& Z,
    const Eigen::VectorXd& x0, const RdeConfig& cfg,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>* post,
    std::vector<double>* displacement) {
    const std::size_t n = Z.num_steps();
    Eigen::MatrixXd out(x0.size(), n + 1);
    out.col(0) = x0;
    const double ip = 1.0 / Z.p;
    for (std::size_t k = 0; k < n; ++k) {
        double t0 = Z.times[k], t1 = Z.times[k + 1];
        Eigen::VectorXd x = out.col(k);
        Eigen::VectorXd inc = davie_increment(
            Y, x, Z.values.col(k + 1) - Z.values.col(k), Z.step2[k]);
        double cap = cfg.step_cap_factor * std::pow(Z.control(t0, t1), ip) *
                     (1.0 + x.norm());
        if (!inc.allFinite() || inc.norm() > cap) {
            std::ostringstream os;
            os << "RDE step growth cap exceeded at t=" << t0;
            throw NumericError(os.str(), t0, t1);
        }
        Eigen::VectorXd prop = x + inc;
        if (post) {
            Eigen::VectorXd fixed = (*post)(prop, t1);
            if (displacement) displacement->push_back((fixed - prop).norm());
            prop = std::move(fixed);
        }
        if (!prop.allFinite() || prop.norm() > cfg.r_max) {
            std::ostringstream os;
            os << "RDE explosion at t=" << t1 << " (|x| exceeds " << cfg.r_max << ")";
            throw NumericError(os.str(), t0, t1);
        }
        out.col(k + 1) = prop;
    }
    return out;
}

} // namespace

namespace detail {

Eigen::MatrixXd davie_trace_solve(
    const VectorFieldFamily& Y, const GridRoughPath& Z,
    const Eigen::VectorXd& x0, const RdeConfig& cfg,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>* post,
    std::vector<double>* displacement) {
    return davie_trace_solve_impl(Y, Z, x0, cfg, post, displacement);
}

GridRoughPath augment_on_grid(const VectorFieldFamily& Y, const GridRoughPath& Z,
                              const Eigen::MatrixXd& trace,
                              const SewOptions& sew_opts) {
    DyadicDriverView view(Z);
    auto interp = [&trace](std::size_t cell, int depth, std::size_t idx) {
        double frac = static_cast<double>(idx) / std::ldexp(1.0, depth);
        return (trace.col(cell) + frac * (trace.col(cell + 1) - trace.col(cell)))
            .eval();
    };
    auto cand = [&](std::size_t cell, int depth, std::size_t idx) -> T2Element {
        Eigen::VectorXd xl = interp(cell, depth, idx);
        Eigen::MatrixXd B = Y.Y(xl);
        return {interp(cell, depth, idx + 1) - xl,
                B * view.piece2(cell, depth) * B.transpose()};
    };
    return sew_cells(cand, Z.times, trace.col(0), Z.p, sew_opts, nullptr, &trace);
}

} // namespace detail

double measure_field_bound(const VectorFieldFamily& Y, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi, int samples_per_axis) {
    const Eigen::Index N = lo.size();
    double bound = 0.0;
    std::function<void(Eigen::VectorXd&, Eigen::Index)> walk =
        [&](Eigen::VectorXd& x, Eigen::Index axis) {
            if (axis == N) {
                bound = std::max(bound, Y.Y(x).norm());
                for (Eigen::Index i = 0; i < N; ++i) {
                    Eigen::VectorXd e = Eigen::VectorXd::Unit(N, i);
                    bound = std::max(bound, Y.dY_or_fd(x, e).norm());
                    double h = 1e-4;
                    Eigen::MatrixXd second =
                        (Y.Y(x + h * e) - 2.0 * Y.Y(x) + Y.Y(x - h * e)) / (h * h);
                    bound = std::max(bound, second.norm());
                }
                return;
            }
            for (int s = 0; s < samples_per_axis; ++s) {
                x(axis) = lo(axis) + (hi(axis) - lo(axis)) * (s + 0.5) /
                                         samples_per_axis;
                walk(x, axis + 1);
            }
        };
    Eigen::VectorXd x = lo;
    walk(x, 0);
    return bound;
}

RdeResult solve_rde_flat(const VectorFieldFamily& Y, const GridRoughPath& Z,
                         const Eigen::VectorXd& x0, const RdeConfig& cfg) {
    cfg.validate();
    if (Y.driver_dim != Z.dim())
        throw DomainError("solve_rde_flat: driver dimension mismatch");
    if (x0.size() != Y.state_dim)
        throw DomainError("solve_rde_flat: state dimension mismatch");
    if (cfg.check_driver && !is_weakly_geometric(Z))
        throw DomainError("solve_rde_flat: driver is not weakly geometric");

    GridRoughPath Zr = Z;
    if (cfg.base_mesh > 0.0)
        while (Zr.max_mesh() > cfg.base_mesh) Zr = refine_dyadic(Zr);

    RdeResult res;
    Eigen::MatrixXd x_cur = davie_trace_solve_impl(Y, Zr, x0, cfg, nullptr, nullptr);
    res.log.push_back({0, Zr.max_mesh(), std::numeric_limits<double>::quiet_NaN()});
    for (int round = 1; round <= cfg.max_refinements; ++round) {
        GridRoughPath Zn = refine_dyadic(Zr);
        Eigen::MatrixXd x_next = davie_trace_solve_impl(Y, Zn, x0, cfg, nullptr, nullptr);
        double cauchy = 0.0;
        for (Eigen::Index k = 0; k < x_cur.cols(); ++k)
            cauchy = std::max(cauchy, (x_next.col(2 * k) - x_cur.col(k)).norm());
        res.log.push_back({round, Zn.max_mesh(), cauchy});
        Zr = std::move(Zn);
        x_cur = std::move(x_next);
        if (cauchy < cfg.cauchy_tol) break;
    }
    res.path = detail::augment_on_grid(Y, Zr, x_cur, cfg.sew);
    return res;
}

GridRoughPath augment_trace(const std::vector<double>& times,
                            const Eigen::MatrixXd& trace,
                            const VectorFieldFamily& Y, const GridRoughPath& Z,
                            const SewOptions& sew_opts, bool check) {
    if (times.size() != Z.times.size())
        throw DomainError("augment_trace: trace grid must match the driver grid");
    if (static_cast<std::size_t>(trace.cols()) != times.size())
        throw DomainError("augment_trace: trace/grid size mismatch");

    if (check) {
        // level-1 relation residual must be a remainder
        DefectAccumulator acc(Z.t_begin(), Z.t_end(), 2.0 * Z.max_mesh(), Z.p,
                              Z.control);
        PrefixIncrements pre(Z);
        auto residual = [&](std::size_t i, std::size_t j) {
            Eigen::VectorXd model = davie_increment(
                Y, trace.col(i), pre.level1_between(i, j), pre.level2_between(i, j));
            acc.add(Z.times[i], Z.times[j],
                    entry_norm(Eigen::VectorXd(trace.col(j) - trace.col(i) - model)));
        };
        for (std::size_t k = 0; k + 1 < times.size(); ++k) residual(k, k + 1);
        for_sampled_pairs(times.size(), 256, residual);
        DefectReport level1 = acc.finalize();
        if (!level1.passed())
            throw DomainError(
                "augment_trace: trace does not satisfy the level-1 relation (" +
                level1.summary() + ")");

        // almost-multiplicativity of the candidate
        PrefixIncrements prez(Z);
        auto cand_pair = [&](double s, double t) -> T2Element {
            std::size_t i = Z.index_of(s), j = Z.index_of(t);
            Eigen::MatrixXd B = Y.Y(trace.col(i));
            return {trace.col(j) - trace.col(i),
                    B * prez.level2_between(i, j) * B.transpose()};
        };
        DefectReport almost = chen_defect(cand_pair, Z.times, Z.p, Z.control);
        if (!almost.passed())
            throw DomainError(
                "augment_trace: almost-multiplicativity defect is unbounded (" +
                almost.summary() + ")");
    }
    return detail::augment_on_grid(Y, Z, trace, sew_opts);
}

GridRoughPath concatenate_rde(const GridRoughPath& Xa, const GridRoughPath& Xb,
                              double endpoint_tol) {
    return concatenate({Xa, Xb}, Xa.values.col(0), endpoint_tol);
}

} // namespace roughmanifold
