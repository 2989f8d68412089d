#ifndef ROUGHMANIFOLD_CONSTRAINED_RDE_HPP
#define ROUGHMANIFOLD_CONSTRAINED_RDE_HPP

#include "roughmanifold/manifold_forms.hpp"
#include "roughmanifold/manifold_path.hpp"

namespace roughmanifold {

struct ConstrainedRdeResult {
    ManifoldRoughPath path;
    std::vector<ConvergenceRow> log;
    /// Re-projection displacement per step on the finest grid.
    std::vector<double> projection_displacement;
    double max_projection_displacement = 0.0;
};

/// Constrained RDE dX = Y_{dZ}(x) on M: each field is extended off M by
/// Ytilde = P [Y o pi] (pi the closest-point retraction), the extended system
/// is solved by Davie stepping with dyadic refinement, and the trace is
/// re-projected to M after every step (the logged displacement; disable with
/// reproject = false). Level 2 is the re-sewn augmentation over the converged
/// trace.
ConstrainedRdeResult solve_constrained_rde(const ManifoldVectorFieldFamily& Y,
                                           const GridRoughPath& Z,
                                           const Eigen::VectorXd& x0,
                                           const RdeConfig& cfg = {},
                                           bool reproject = true);

/// Projection construction dX = P_{x_t} dZ with the canonical fields
/// V_z(x) = P(x) z.
ConstrainedRdeResult project_to_manifold(const GridRoughPath& Z, ManifoldPtr M,
                                         const Eigen::VectorXd& x0,
                                         const RdeConfig& cfg = {});

/// Right-invariant RDE dG = Y^G_{dA}(g) on SO(n) with Y_xi(g) = -xi g, driven
/// by a weakly geometric path in so(n) (upper-triangle flattening). Global in
/// time; starts at g0 (identity by default).
ConstrainedRdeResult right_invariant_rde(int n, const GridRoughPath& A,
                                         const RdeConfig& cfg = {},
                                         const Eigen::MatrixXd& g0 = Eigen::MatrixXd());

/// The extended flat family P [Y o pi] used by the solver (exposed for
/// diagnostics and the equivalence tests).
VectorFieldFamily extend_fields(const ManifoldVectorFieldFamily& Y);

} // namespace roughmanifold

#endif
