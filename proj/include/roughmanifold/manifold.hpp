#ifndef ROUGHMANIFOLD_MANIFOLD_HPP
#define ROUGHMANIFOLD_MANIFOLD_HPP

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "roughmanifold/errors.hpp"

namespace roughmanifold {

/// Orthogonal projections induced by a local defining function at x:
/// Q = dF^T (dF dF^T)^{-1} dF onto the normal space, P = I - Q onto the
/// tangent space, and A = dF^T (dF dF^T)^{-1} with Q = A dF.
struct Projections {
    Eigen::MatrixXd P;
    Eigen::MatrixXd Q;
    Eigen::MatrixXd A;
};

/// Embedded submanifold of R^N described by a defining-function atlas.
///
/// Charts are predicates plus closures: chart c covers an open region where
/// F(c,.) vanishes exactly on the manifold and dF(c,.) is surjective. All
/// geometric queries (projections, dQ, closest point) select the first chart
/// whose predicate accepts the query point with margin.
class EmbeddedManifold {
public:
    virtual ~EmbeddedManifold() = default;

    virtual std::string name() const = 0;
    virtual int ambient_dim() const = 0;
    virtual int dim() const = 0;
    int codim() const { return ambient_dim() - dim(); }

    virtual int num_charts() const { return 1; }
    /// margin in [0,1]: 0 accepts anywhere on the chart, larger values demand
    /// more interior room (used to pick stable charts while stepping).
    virtual bool chart_contains(int chart, const Eigen::VectorXd& x,
                                double margin) const = 0;
    virtual Eigen::VectorXd F(int chart, const Eigen::VectorXd& x) const = 0;
    virtual Eigen::MatrixXd dF(int chart, const Eigen::VectorXd& x) const = 0;
    /// Directional derivative of dF; finite differences by default.
    virtual Eigen::MatrixXd d2F_dir(int chart, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& v) const;
    virtual bool has_analytic_d2F() const { return false; }

    int select_chart(const Eigen::VectorXd& x, double margin = 0.25) const;

    Projections projections(int chart, const Eigen::VectorXd& x) const;
    Projections projections(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd P(const Eigen::VectorXd& x) const { return projections(x).P; }
    Eigen::MatrixXd Q(const Eigen::VectorXd& x) const { return projections(x).Q; }

    /// Derivative of Q at m along v (tangential directions are the meaningful
    /// ones); analytic override when available, else central differences of
    /// the chart projection along the straight line through m.
    virtual Eigen::MatrixXd dQ(const Eigen::VectorXd& m,
                               const Eigen::VectorXd& v) const;
    virtual bool has_analytic_dQ() const { return false; }

    /// Metric closest-point retraction. The default runs a projected
    /// Gauss-Newton iteration on F with a tangential pull toward the query;
    /// built-in manifolds override with closed forms.
    virtual Eigen::VectorXd closest_point(const Eigen::VectorXd& y) const;

    double distance_to(const Eigen::VectorXd& y) const {
        return (y - closest_point(y)).norm();
    }

    /// Orthonormal tangent frame at m (columns), from a pivoted QR of P(m).
    Eigen::MatrixXd tangent_frame(const Eigen::VectorXd& m) const;
};

using ManifoldPtr = std::shared_ptr<const EmbeddedManifold>;

/// Validates analytic derivatives (dF, d2F, dQ) against central finite
/// differences at probe points; returns the worst relative error.
struct DerivativeCheck {
    double worst_dF = 0.0;
    double worst_d2F = 0.0;
    double worst_dQ = 0.0;
    double worst() const { return std::max({worst_dF, worst_d2F, worst_dQ}); }
};
DerivativeCheck validate_derivatives(const EmbeddedManifold& M,
                                     const std::vector<Eigen::VectorXd>& probes);

} // namespace roughmanifold

#endif
