#include "roughmanifold/constrained_rde.hpp"

#include <cmath>
#include <limits>

#include "roughmanifold/builtin_manifolds.hpp"
#include "roughmanifold/skew.hpp"

namespace roughmanifold {

VectorFieldFamily extend_fields(const ManifoldVectorFieldFamily& Y) {
    VectorFieldFamily f;
    f.driver_dim = Y.driver_dim;
    f.state_dim = Y.M->ambient_dim();
    ManifoldPtr M = Y.M;
    auto raw = Y.Y;
    f.Y = [M, raw](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        return M->P(x) * raw(M->closest_point(x));
    };
    return f;
}

ConstrainedRdeResult solve_constrained_rde(const ManifoldVectorFieldFamily& Y,
                                           const GridRoughPath& Z,
                                           const Eigen::VectorXd& x0,
                                           const RdeConfig& cfg, bool reproject) {
    cfg.validate();
    const ManifoldPtr& M = Y.M;
    if (Y.driver_dim != Z.dim())
        throw DomainError("solve_constrained_rde: driver dimension mismatch");
    if (x0.size() != M->ambient_dim())
        throw DomainError("solve_constrained_rde: state dimension mismatch");
    if (M->distance_to(x0) > 1e-8 * (1.0 + x0.norm()))
        throw DomainError("solve_constrained_rde: start point is not on " +
                          M->name());
    if (cfg.check_driver && !is_weakly_geometric(Z))
        throw DomainError("solve_constrained_rde: driver is not weakly geometric");

    VectorFieldFamily ext = extend_fields(Y);
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> post =
        [&M](const Eigen::VectorXd& x, double) { return M->closest_point(x); };
    const auto* hook = reproject ? &post : nullptr;

    GridRoughPath Zr = Z;
    if (cfg.base_mesh > 0.0)
        while (Zr.max_mesh() > cfg.base_mesh) Zr = refine_dyadic(Zr);

    ConstrainedRdeResult res;
    std::vector<double> disp;
    Eigen::MatrixXd x_cur =
        detail::davie_trace_solve(ext, Zr, x0, cfg, hook, &disp);
    res.log.push_back({0, Zr.max_mesh(), std::numeric_limits<double>::quiet_NaN()});
    for (int round = 1; round <= cfg.max_refinements; ++round) {
        GridRoughPath Zn = refine_dyadic(Zr);
        std::vector<double> disp_next;
        Eigen::MatrixXd x_next =
            detail::davie_trace_solve(ext, Zn, x0, cfg, hook, &disp_next);
        double cauchy = 0.0;
        for (Eigen::Index k = 0; k < x_cur.cols(); ++k)
            cauchy = std::max(cauchy, (x_next.col(2 * k) - x_cur.col(k)).norm());
        res.log.push_back({round, Zn.max_mesh(), cauchy});
        Zr = std::move(Zn);
        x_cur = std::move(x_next);
        disp = std::move(disp_next);
        if (cauchy < cfg.cauchy_tol) break;
    }
    res.projection_displacement = std::move(disp);
    for (double d : res.projection_displacement)
        res.max_projection_displacement =
            std::max(res.max_projection_displacement, d);
    GridRoughPath lifted = detail::augment_on_grid(ext, Zr, x_cur, cfg.sew);
    res.path = ManifoldRoughPath(std::move(lifted), M);
    return res;
}

ConstrainedRdeResult project_to_manifold(const GridRoughPath& Z, ManifoldPtr M,
                                         const Eigen::VectorXd& x0,
                                         const RdeConfig& cfg) {
    return solve_constrained_rde(projection_fields(std::move(M)), Z, x0, cfg);
}

ConstrainedRdeResult right_invariant_rde(int n, const GridRoughPath& A,
                                         const RdeConfig& cfg,
                                         const Eigen::MatrixXd& g0) {
    if (A.dim() != skew_dim(n))
        throw DomainError("right_invariant_rde: driver must be so(n)-valued");
    auto G = std::make_shared<SpecialOrthogonal>(n);
    std::vector<Eigen::MatrixXd> basis;
    basis.reserve(skew_dim(n));
    for (int k = 0; k < skew_dim(n); ++k)
        basis.push_back(vec_to_skew(Eigen::VectorXd::Unit(skew_dim(n), k), n));

    ManifoldVectorFieldFamily fam;
    fam.M = G;
    fam.driver_dim = skew_dim(n);
    fam.Y = [n, basis](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        Eigen::MatrixXd g = vec_to_mat(x, n, n);
        Eigen::MatrixXd out(n * n, basis.size());
        for (std::size_t k = 0; k < basis.size(); ++k)
            out.col(k) = mat_to_vec(Eigen::MatrixXd(-basis[k] * g));
        return out;
    };
    fam.dY = [n, basis](const Eigen::VectorXd&, const Eigen::VectorXd& v)
        -> Eigen::MatrixXd {
        Eigen::MatrixXd H = vec_to_mat(v, n, n);
        Eigen::MatrixXd out(n * n, basis.size());
        for (std::size_t k = 0; k < basis.size(); ++k)
            out.col(k) = mat_to_vec(Eigen::MatrixXd(-basis[k] * H));
        return out;
    };

    Eigen::MatrixXd start =
        g0.size() == 0 ? Eigen::MatrixXd::Identity(n, n) : g0;
    return solve_constrained_rde(fam, A, mat_to_vec(start), cfg);
}

} // namespace roughmanifold
