#ifndef ROUGHMANIFOLD_ONE_FORM_HPP
#define ROUGHMANIFOLD_ONE_FORM_HPP

#include <functional>

#include "roughmanifold/grid_rough_path.hpp"
#include "roughmanifold/sewing.hpp"

namespace roughmanifold {

/// Smooth map between Euclidean spaces with its Jacobian.
struct SmoothMap {
    int dim_in = 0, dim_out = 0;
    bool linear = false;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian; // W x N
};

SmoothMap identity_map(int dim);
SmoothMap linear_map(const Eigen::MatrixXd& L);
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);

/// One form on R^N with values in R^W: x -> linear map, plus its derivative.
struct OneForm {
    int dim_in = 0, dim_out = 0;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> value; // W x N
    /// Directional derivative d/dt|0 value(x + t v); finite differences when
    /// absent.
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
        dvalue;

    Eigen::MatrixXd dvalue_or_fd(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& v) const;
    /// Bilinear derivative contracted against a level-2 tensor T:
    /// sum_ij T_ij (d_{e_i} value)(x) e_j.
    Eigen::VectorXd derivative_contract(const Eigen::VectorXd& x,
                                        const Eigen::MatrixXd& T) const;
};

/// dphi as a one form.
OneForm differential(const SmoothMap& phi);

/// Pullback phi^* alpha (alpha composed with dphi).
OneForm pullback(const SmoothMap& phi, const OneForm& alpha);

struct IntegrateOptions {
    SewOptions sew;
    bool check_driver = true; // weak-geometricity gate on the driver
};

/// Rough integral int alpha(dZ): local model
/// X^1 ~ alpha(z_s) z_{s,t} + alpha'(z_s) Z_{s,t},  X^2 ~ (alpha (x) alpha) Z,
/// sewn to an exact-Chen path started at 0.
GridRoughPath integrate_one_form(const OneForm& alpha, const GridRoughPath& Z,
                                 const IntegrateOptions& opts = {});

/// Push-forward phi_* Z: the trace is written directly as phi(z_t) and only
/// level 2 is sewn (exact for linear maps).
GridRoughPath pushforward_flat(const SmoothMap& phi, const GridRoughPath& Z,
                               const IntegrateOptions& opts = {});

/// Central finite-difference Jacobian helper (h = 1e-5 by default).
Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h = 1e-5);

} // namespace roughmanifold

#endif
