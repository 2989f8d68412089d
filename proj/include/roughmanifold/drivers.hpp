#ifndef ROUGHMANIFOLD_DRIVERS_HPP
#define ROUGHMANIFOLD_DRIVERS_HPP

#include <cstdint>
#include <functional>

#include "roughmanifold/grid_rough_path.hpp"

namespace roughmanifold {

/// Smooth curve with velocity, sampled and lifted on demand.
struct SmoothCurve {
    int dim = 0;
    std::function<Eigen::VectorXd(double)> value;
    std::function<Eigen::VectorXd(double)> velocity;

    Eigen::MatrixXd sample(const std::vector<double>& times) const;
    GridRoughPath lift(double t0, double t1, std::size_t n_steps,
                       double p = 2.1) const;
};

/// Planar circle of given radius and number of turns on [0,T].
SmoothCurve circle_curve(double radius, double turns, double T);

/// Planar Lissajous A sin(a t + phase), B sin(b t).
SmoothCurve lissajous_curve(double A, double B, double a, double b, double phase);

/// Straight line t -> t v.
SmoothCurve line_curve(const Eigen::VectorXd& v);

/// Great circle on S^{N-1} through x0 with initial unit velocity v0.
SmoothCurve great_circle_curve(const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& v0, double speed = 1.0);

/// Latitude circle on S^2 at colatitude theta0, traversed turns times on
/// [0, 2 pi turns].
SmoothCurve latitude_circle_curve(double colatitude, double turns = 1.0);

/// Deterministic Gaussian walk (Box-Muller over splitmix64), piecewise
/// linearly interpolated; the lift's antisymmetric part is the
/// linear-interpolation Levy area.
GridRoughPath brownian_lift(std::uint64_t seed, int dim, std::size_t n_steps,
                            double T, double p = 2.1, double volatility = 1.0);

/// so(n)-valued Brownian-type driver (flattened), for right-invariant RDEs.
GridRoughPath brownian_so_lift(std::uint64_t seed, int n, std::size_t n_steps,
                               double T, double p = 2.1, double volatility = 1.0);

} // namespace roughmanifold

#endif
