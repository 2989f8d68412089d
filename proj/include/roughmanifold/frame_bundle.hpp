#ifndef ROUGHMANIFOLD_FRAME_BUNDLE_HPP
#define ROUGHMANIFOLD_FRAME_BUNDLE_HPP

#include "roughmanifold/manifold.hpp"

namespace roughmanifold {

/// Orthonormal frame bundle O(M) of an embedded M^d in R^N, itself embedded
/// in R^{N + N d} by flattening (x, g) with g column-major.
///
/// The defining function per base chart is
///   G(x, g) = ( F(x), dF(x) g, upper half of g^T g - I )
/// (the middle block uses dF rather than Q so that dG stays surjective), and
/// the tangent space at (m, g) consists of the pairs (xi, h) with xi tangent
/// to M, Q(m) h = -dQ(xi) g and g^T h skew.
class FrameBundle : public EmbeddedManifold {
public:
    explicit FrameBundle(ManifoldPtr base);

    const ManifoldPtr& base() const { return base_; }
    int base_ambient() const { return N_; }
    int frame_dim() const { return d_; }

    Eigen::VectorXd base_point(const Eigen::VectorXd& u) const;
    Eigen::MatrixXd frame(const Eigen::VectorXd& u) const;
    Eigen::VectorXd join(const Eigen::VectorXd& x, const Eigen::MatrixXd& g) const;

    std::string name() const override;
    int ambient_dim() const override { return N_ + N_ * d_; }
    int dim() const override { return d_ + d_ * (d_ - 1) / 2; }
    int num_charts() const override { return base_->num_charts(); }
    bool chart_contains(int chart, const Eigen::VectorXd& u,
                        double margin) const override;
    Eigen::VectorXd F(int chart, const Eigen::VectorXd& u) const override;
    Eigen::MatrixXd dF(int chart, const Eigen::VectorXd& u) const override;
    Eigen::VectorXd closest_point(const Eigen::VectorXd& u) const override;

    /// Residual of the tangency conditions for (xi,h) at a frame point u;
    /// zero (up to tolerance) characterises T_u O(M).
    double tangency_defect(const Eigen::VectorXd& u, const Eigen::VectorXd& xi,
                           const Eigen::MatrixXd& h) const;

    /// Frame quality at u: (|g^T g - I|, |Q(x) g|).
    std::pair<double, double> frame_defect(const Eigen::VectorXd& u) const;

private:
    ManifoldPtr base_;
    int N_, d_;
};

} // namespace roughmanifold

#endif
