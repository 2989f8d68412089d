#include "roughmanifold/manifold_integral.hpp"

#include "roughmanifold/sewing.hpp"

namespace roughmanifold {

GridRoughPath integrate_manifold_one_form(const ManifoldOneForm& alpha,
                                          const ManifoldRoughPath& X,
                                          const IntegrateOptions& opts) {
    if (opts.check_driver) X.require_membership();
    const GridRoughPath& Z = X.path();
    const EmbeddedManifold& M = *X.manifold();
    const Eigen::Index N = Z.dim();
    const Eigen::Index W = alpha.dim_out;

    DyadicDriverView view(Z);
    // nabla-alpha tensor per cell (left endpoint), reused for all pieces
    std::vector<std::vector<Eigen::MatrixXd>> dA(Z.num_steps());
    auto nabla = [&](std::size_t cell) -> const std::vector<Eigen::MatrixXd>& {
        auto& slot = dA[cell];
        if (slot.empty()) {
            Eigen::VectorXd x = Z.values.col(cell);
            slot.reserve(N);
            for (Eigen::Index m = 0; m < N; ++m)
                slot.push_back(alpha.drestricted(x, Eigen::VectorXd::Unit(N, m)));
        }
        return slot;
    };

    auto cand = [&](std::size_t cell, int depth, std::size_t idx) -> T2Element {
        Eigen::VectorXd x = view.value(cell, depth, idx);
        Eigen::MatrixXd P = M.P(x);
        Eigen::MatrixXd A = alpha.value_ambient(x) * P;
        const Eigen::MatrixXd& X2 = view.piece2(cell, depth);
        Eigen::MatrixXd T = P * X2 * P;
        Eigen::VectorXd l1 = A * view.trace_inc(cell, depth);
        const auto& grad = nabla(cell);
        for (Eigen::Index m = 0; m < N; ++m)
            l1.noalias() += grad[m] * T.row(m).transpose();
        return {std::move(l1), A * X2 * A.transpose()};
    };
    try {
        return sew_cells(cand, Z.times, Eigen::VectorXd::Zero(W), Z.p, opts.sew);
    } catch (const NumericError& e) {
        throw NumericError(std::string("integrate_manifold_one_form: ") + e.what(),
                           e.where_s, e.where_t);
    }
}

} // namespace roughmanifold
