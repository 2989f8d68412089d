#ifndef ROUGHMANIFOLD_MANIFOLD_FORMS_HPP
#define ROUGHMANIFOLD_MANIFOLD_FORMS_HPP

#include <functional>

#include "roughmanifold/manifold.hpp"
#include "roughmanifold/one_form.hpp"
#include "roughmanifold/rde.hpp"

namespace roughmanifold {

/// Linear family a -> Y_a of vector fields tangent to M, given through an
/// ambient representative defined near M.
struct ManifoldVectorFieldFamily {
    ManifoldPtr M;
    int driver_dim = 0;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> Y; // N x n
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
        dY; // optional directional derivative

    Eigen::MatrixXd dY_or_fd(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& v) const;
    /// Max |Q(m) Y_a(m)| over probe points (tangency diagnostic).
    double tangency_defect(const std::vector<Eigen::VectorXd>& probes) const;
};

/// The canonical family V_z(x) = P(x) z (driver dimension = ambient N).
ManifoldVectorFieldFamily projection_fields(ManifoldPtr M);

/// One form on M with values in R^W, given through an ambient representative
/// alpha~ near M; the restricted matrix alpha~ P is what integration sees.
struct ManifoldOneForm {
    ManifoldPtr M;
    int dim_out = 0;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> value_ambient; // W x N
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
        dvalue_ambient; // optional

    Eigen::MatrixXd restricted(const Eigen::VectorXd& x) const;
    /// Directional derivative of the restricted representative alpha~ P.
    Eigen::MatrixXd drestricted(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& v) const;
};

/// d(f|_M) for an ambient smooth map f.
ManifoldOneForm manifold_differential(ManifoldPtr M, const SmoothMap& f);

/// Levi-Civita covariant derivative of Y_a at m along tangent v:
/// P(m) (d_v Y_a)(m). Rejects non-tangent directions.
Eigen::VectorXd covariant_derivative_vf(const ManifoldVectorFieldFamily& Y,
                                        const Eigen::VectorXd& m,
                                        const Eigen::VectorXd& v, int a);

/// Covariant derivative of a one form: (nabla_v alpha)(w) = [d_v (alpha~ P)] w.
Eigen::MatrixXd covariant_derivative_one_form(const ManifoldOneForm& alpha,
                                              const Eigen::VectorXd& m,
                                              const Eigen::VectorXd& v);

} // namespace roughmanifold

#endif
