#ifndef ROUGHMANIFOLD_CONTROL_HPP
#define ROUGHMANIFOLD_CONTROL_HPP

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace roughmanifold {

/// Superadditive control w(s,t) on the simplex over [t0,t1].
///
/// Two kinds are supported. The uniform control w(s,t) = kappa*(t-s) is the
/// default everywhere; kappa is calibrated so that w(t0,t1) matches the
/// measured homogeneous p-variation of the path it belongs to. The empirical
/// control evaluates the exact grid p-variation of a stored trace and is
/// available for diagnostics on coarse grids.
class Control {
public:
    enum class Kind { Uniform, Empirical };

    Control() : kind_(Kind::Uniform), kappa_(1.0), t0_(0.0), t1_(1.0) {}

    static Control uniform(double kappa, double t0, double t1) {
        Control c;
        c.kind_ = Kind::Uniform;
        c.kappa_ = kappa;
        c.t0_ = t0;
        c.t1_ = t1;
        return c;
    }

    /// Exact grid p-variation control of a trace (DP over grid partitions).
    /// Intended for modest grids; cost is O(n^2) per construction and O(n^2)
    /// per off-table evaluation is avoided by precomputing the full table.
    static Control empirical(const std::vector<double>& times,
                             const Eigen::MatrixXd& values, double p);

    Kind kind() const { return kind_; }
    double kappa() const { return kappa_; }
    double t0() const { return t0_; }
    double t1() const { return t1_; }

    double operator()(double s, double t) const;

private:
    Kind kind_;
    double kappa_;
    double t0_, t1_;
    // empirical data
    std::shared_ptr<const std::vector<double>> grid_;
    std::shared_ptr<const Eigen::MatrixXd> table_; // table_(i,j) = |x|^p_{p-var;[t_i,t_j]}
};

/// Measured p-variation of a grid trace: exact DP when the grid is small,
/// best-dyadic-partition lower estimate otherwise.
double measured_p_variation(const std::vector<double>& times,
                            const Eigen::MatrixXd& values, double p);

/// Measured (p/2)-variation of the level-2 process (dyadic partitions of the
/// Chen-folded increments). Used to calibrate controls of trace-degenerate
/// paths such as pure-area examples.
double measured_level2_variation(const std::vector<double>& times,
                                 const std::vector<Eigen::MatrixXd>& step2,
                                 const Eigen::MatrixXd& values, double p);

} // namespace roughmanifold

#endif
