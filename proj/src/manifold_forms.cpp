#include "roughmanifold/manifold_forms.hpp"

namespace roughmanifold {

Eigen::MatrixXd ManifoldVectorFieldFamily::dY_or_fd(const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& v) const {
    if (dY) return dY(x, v);
    const double h = 1e-5;
    double scale = std::max(1.0, v.norm());
    Eigen::VectorXd u = v / scale;
    return scale * (Y(x + h * u) - Y(x - h * u)) / (2.0 * h);
}

double ManifoldVectorFieldFamily::tangency_defect(
    const std::vector<Eigen::VectorXd>& probes) const {
    double worst = 0.0;
    for (const auto& m : probes)
        worst = std::max(worst, (M->Q(m) * Y(m)).cwiseAbs().maxCoeff());
    return worst;
}

ManifoldVectorFieldFamily projection_fields(ManifoldPtr M) {
    ManifoldVectorFieldFamily f;
    f.M = M;
    f.driver_dim = M->ambient_dim();
    f.Y = [M](const Eigen::VectorXd& x) { return M->P(x); };
    if (M->has_analytic_dQ())
        f.dY = [M](const Eigen::VectorXd& x, const Eigen::VectorXd& v)
            -> Eigen::MatrixXd { return -M->dQ(x, v); };
    return f;
}

Eigen::MatrixXd ManifoldOneForm::restricted(const Eigen::VectorXd& x) const {
    return value_ambient(x) * M->P(x);
}

Eigen::MatrixXd ManifoldOneForm::drestricted(const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& v) const {
    if (dvalue_ambient && M->has_analytic_dQ())
        return dvalue_ambient(x, v) * M->P(x) - value_ambient(x) * M->dQ(x, v);
    const double h = 1e-5;
    double scale = std::max(1.0, v.norm());
    Eigen::VectorXd u = v / scale;
    return scale * (restricted(x + h * u) - restricted(x - h * u)) / (2.0 * h);
}

ManifoldOneForm manifold_differential(ManifoldPtr M, const SmoothMap& f) {
    ManifoldOneForm a;
    a.M = M;
    a.dim_out = f.dim_out;
    a.value_ambient = f.jacobian;
    return a;
}

Eigen::VectorXd covariant_derivative_vf(const ManifoldVectorFieldFamily& Y,
                                        const Eigen::VectorXd& m,
                                        const Eigen::VectorXd& v, int a) {
    Eigen::MatrixXd Qm = Y.M->Q(m);
    if ((Qm * v).norm() > 1e-8 * std::max(1.0, v.norm()))
        throw DomainError("covariant_derivative_vf: direction is not tangent");
    return (Eigen::MatrixXd::Identity(m.size(), m.size()) - Qm) *
           Y.dY_or_fd(m, v).col(a);
}

Eigen::MatrixXd covariant_derivative_one_form(const ManifoldOneForm& alpha,
                                              const Eigen::VectorXd& m,
                                              const Eigen::VectorXd& v) {
    return alpha.drestricted(m, v);
}

} // namespace roughmanifold
