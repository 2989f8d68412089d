#ifndef ROUGHMANIFOLD_RDE_HPP
#define ROUGHMANIFOLD_RDE_HPP

#include <functional>
#include <vector>

#include "roughmanifold/grid_rough_path.hpp"
#include "roughmanifold/sewing.hpp"

namespace roughmanifold {

/// Linear family a -> Y_a of vector fields on R^N, stored as the matrix map
/// x -> [Y_{e_1}(x) ... Y_{e_n}(x)].
struct VectorFieldFamily {
    int driver_dim = 0, state_dim = 0;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> Y; // N x n
    /// Directional derivative d/dt|0 Y(x + t v); finite differences when absent.
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
        dY;

    Eigen::MatrixXd dY_or_fd(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& v) const;
};

/// Measured sup of |Y|, |Y'|, |Y''| over a sampled box (the bound entering
/// the p-variation growth estimate); diagnostics only.
double measure_field_bound(const VectorFieldFamily& Y, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi, int samples_per_axis = 4);

struct RdeConfig {
    double base_mesh = 0.0;    // pre-refine the driver until mesh <= base_mesh
    int max_refinements = 6;   // dyadic rounds after the base grid
    double cauchy_tol = 1e-8;  // trace Cauchy stop
    double r_max = 1e6;        // explosion radius
    double step_cap_factor = 10.0; // per-step growth cap multiplier
    /// Level-2 augmentation: a short sub-grid budget suffices, the model
    /// error of the per-step candidate dominates below it.
    SewOptions sew{1e-13, 4, false};
    bool check_driver = true;

    void validate() const;
};

struct ConvergenceRow {
    int round = 0;
    double mesh = 0.0;
    double cauchy = 0.0;
};

struct RdeResult {
    GridRoughPath path;
    std::vector<ConvergenceRow> log;
};

/// Davie second-order Euler increment Y(x) dz + (d_{Y_a} Y_b)(x) Z2^{ab}.
Eigen::VectorXd davie_increment(const VectorFieldFamily& Y,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& dz,
                                const Eigen::MatrixXd& Z2);

/// Flat RDE dX = Y(x) dZ: Davie stepping with global dyadic refinement until
/// the trace is Cauchy, then level-2 augmentation of the converged trace
/// (almost rough path [Y(x_s) (x) Y(x_s)] Z_{s,t}, re-sewn).
RdeResult solve_rde_flat(const VectorFieldFamily& Y, const GridRoughPath& Z,
                         const Eigen::VectorXd& x0, const RdeConfig& cfg = {});

/// Lift a trace solving the level-1 relation to a full rough path over it.
/// Rejects traces whose level-1 residual is not a remainder, and candidates
/// whose almost-multiplicativity defect is unbounded.
GridRoughPath augment_trace(const std::vector<double>& times,
                            const Eigen::MatrixXd& trace,
                            const VectorFieldFamily& Y, const GridRoughPath& Z,
                            const SewOptions& sew_opts = {}, bool check = true);

/// Concatenate two RDE solutions meeting at an interior time.
GridRoughPath concatenate_rde(const GridRoughPath& Xa, const GridRoughPath& Xb,
                              double endpoint_tol = 1e-10);

namespace detail {

/// Trace-level Davie stepping on the driver grid. The optional post-step hook
/// maps each proposed state to the accepted one (manifold re-projection); the
/// applied displacement is appended to displacement when given.
Eigen::MatrixXd davie_trace_solve(
    const VectorFieldFamily& Y, const GridRoughPath& Z,
    const Eigen::VectorXd& x0, const RdeConfig& cfg,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>* post =
        nullptr,
    std::vector<double>* displacement = nullptr);

/// Level-2 augmentation of a known trace over the driver grid (trace-pinned
/// sewing of [Y(x_s) (x) Y(x_s)] Z_{s,t}).
GridRoughPath augment_on_grid(const VectorFieldFamily& Y, const GridRoughPath& Z,
                              const Eigen::MatrixXd& trace,
                              const SewOptions& sew_opts);

} // namespace detail

} // namespace roughmanifold

#endif
