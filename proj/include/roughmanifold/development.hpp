#ifndef ROUGHMANIFOLD_DEVELOPMENT_HPP
#define ROUGHMANIFOLD_DEVELOPMENT_HPP

#include "roughmanifold/constrained_rde.hpp"
#include "roughmanifold/frame_bundle.hpp"
#include "roughmanifold/manifold_integral.hpp"

namespace roughmanifold {

/// Rough path on the orthogonal frame bundle with split accessors for the
/// base and frame components.
struct FramePath {
    ManifoldRoughPath U;
    std::shared_ptr<const FrameBundle> bundle;

    Eigen::VectorXd base_value(std::size_t k) const;
    Eigen::MatrixXd frame_value(std::size_t k) const;
    std::size_t num_points() const { return U.path().times.size(); }

    /// max |g^T g - I| along the grid.
    double max_isometry_defect() const;
    /// max |Q(x) g| along the grid.
    double max_tangency_defect() const;
};

// ------------------------------------------------------- canonical fields

/// Horizontal fields B_a(u) = (g a, -dQ(g a) g), a in R^d.
ManifoldVectorFieldFamily horizontal_fields(std::shared_ptr<const FrameBundle> FB);
/// Vertical fields V_A(u) = (0, g A), A in so(d) (flattened basis).
ManifoldVectorFieldFamily vertical_fields(std::shared_ptr<const FrameBundle> FB);
/// Parallelism Y(u)(a, A) = B_a(u) + V_A(u) on R^d x so(d).
ManifoldVectorFieldFamily parallelism_fields(std::shared_ptr<const FrameBundle> FB);
/// Horizontal lift fields a -> V^nabla_a(u) = (P(x) a, -dQ(P(x) a) g) with
/// ambient driver dimension N (used for parallel transport).
ManifoldVectorFieldFamily transport_lift_fields(std::shared_ptr<const FrameBundle> FB);

// -------------------------------------------------------- canonical forms

/// theta: (xi, h) -> g^T xi, values in R^d.
ManifoldOneForm canonical_form(std::shared_ptr<const FrameBundle> FB);
/// omega: (xi, h) -> g^T h, values in so(d) (flattened).
ManifoldOneForm connection_form(std::shared_ptr<const FrameBundle> FB);
/// (theta, omega) jointly, values in R^d x so(d).
ManifoldOneForm joint_form(std::shared_ptr<const FrameBundle> FB);

// -------------------------------------------------------------- transport

struct TransportResult {
    FramePath U;
    std::vector<ConvergenceRow> log;
    double max_projection_displacement = 0.0;
};

/// Parallel translation along X: solves dU = V^nabla_{dX}(u) on O(M).
/// u0 = (x0, g0) must be an orthonormal tangent frame over the start of X.
TransportResult parallel_transport(const ManifoldRoughPath& X,
                                   const Eigen::MatrixXd& g0,
                                   const RdeConfig& cfg = {});

/// Remainder check of the linear frame equation dg = -(dA) g with
/// A = int dQ(dX) (level-1 cross-check of the transport output).
DefectReport transport_linear_model_defect(const FramePath& U,
                                           const ManifoldRoughPath& X);

/// RK4 oracle for smooth parallel translation g' = -dQ(x') g. Halves the
/// step when the isometry defect of a step exceeds 1e-8.
struct SmoothTransport {
    std::vector<double> times;
    std::vector<Eigen::MatrixXd> frames;
};
SmoothTransport transport_ode_oracle(
    const std::function<Eigen::VectorXd(double)>& x,
    const std::function<Eigen::VectorXd(double)>& xdot,
    const EmbeddedManifold& M, const Eigen::MatrixXd& g0, double t0, double t1,
    double step);

// --------------------------------------------------------------- rolling

struct RollResult {
    FramePath U;
    ManifoldRoughPath X; // pi_* U
    std::vector<ConvergenceRow> log;
    double max_projection_displacement = 0.0;
};

/// Roll a flat path onto M: dU = B_{dZ}(u), X = pi_*(U).
RollResult roll(const GridRoughPath& Z, ManifoldPtr M, const Eigen::VectorXd& x0,
                const Eigen::MatrixXd& g0, const RdeConfig& cfg = {});

struct UnrollResult {
    GridRoughPath Z; // anti-development in R^d
    TransportResult transport;
};

/// Unroll X into R^d: Z = int theta(dU) along U = parallel transport of X.
UnrollResult unroll(const ManifoldRoughPath& X, const Eigen::MatrixXd& g0,
                    const RdeConfig& cfg = {});

/// Full development driven by Z in R^d x so(d): dU = (B + V)_{dZ}(u).
RollResult develop_full(const GridRoughPath& Z, ManifoldPtr M,
                        const Eigen::VectorXd& x0, const Eigen::MatrixXd& g0,
                        const RdeConfig& cfg = {});

/// Anti-development int (theta, omega)(dU) of a frame path.
GridRoughPath antidevelop(const FramePath& U, const IntegrateOptions& opts = {});

// ---------------------------------------------------------- horizontality

struct HorizontalityReport {
    DefectReport so_level1;     // so(d) component of level 1
    DefectReport so_so_level2;  // so(d) (x) so(d) mass
    DefectReport cross_level2;  // R^d (x) so(d) + so(d) (x) R^d mass
    GridRoughPath W;            // the measured (theta, omega) integral
    bool passed() const {
        return so_level1.passed() && so_so_level2.passed() && cross_level2.passed();
    }
};

HorizontalityReport horizontality_defect(const FramePath& U);

// ------------------------------------------------------- smooth oracles

/// RK4 on x' = Y(x) z' for a parallelism Y (columns = fields), re-projected
/// to M each step when a manifold is supplied.
Eigen::MatrixXd smooth_roll_ode(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& fields,
    const std::function<Eigen::VectorXd(double)>& zdot,
    const Eigen::VectorXd& x0, const std::vector<double>& times,
    const EmbeddedManifold* reproject = nullptr);

/// RK4 quadrature of z = int theta(x(t)) x'(t) dt for closures theta.
Eigen::MatrixXd smooth_unroll_ode(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& integrand,
    int dim_out, const std::vector<double>& times);

/// Rotation angle of the 2x2 frame-to-frame matrix g0^T gT (holonomy of a
/// loop on a surface); positive = counterclockwise in the g0 basis.
double frame_rotation_angle(const Eigen::MatrixXd& g0, const Eigen::MatrixXd& gT);

} // namespace roughmanifold

#endif
