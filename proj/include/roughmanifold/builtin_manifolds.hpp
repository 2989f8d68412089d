#ifndef ROUGHMANIFOLD_BUILTIN_MANIFOLDS_HPP
#define ROUGHMANIFOLD_BUILTIN_MANIFOLDS_HPP

#include "roughmanifold/manifold.hpp"

namespace roughmanifold {

/// Unit sphere S^d in R^{d+1}, F(x) = (|x|^2 - 1)/2. With two_charts the
/// atlas also carries the norm-form chart F(x) = |x| - 1 on the lower
/// hemisphere region; both charts induce the same projections on the sphere.
class Sphere : public EmbeddedManifold {
public:
    explicit Sphere(int d, bool two_charts = false);
    std::string name() const override;
    int ambient_dim() const override { return d_ + 1; }
    int dim() const override { return d_; }
    int num_charts() const override { return two_charts_ ? 2 : 1; }
    bool chart_contains(int chart, const Eigen::VectorXd& x,
                        double margin) const override;
    Eigen::VectorXd F(int chart, const Eigen::VectorXd& x) const override;
    Eigen::MatrixXd dF(int chart, const Eigen::VectorXd& x) const override;
    Eigen::MatrixXd d2F_dir(int chart, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& v) const override;
    bool has_analytic_d2F() const override { return true; }
    Eigen::MatrixXd dQ(const Eigen::VectorXd& m,
                       const Eigen::VectorXd& v) const override;
    bool has_analytic_dQ() const override { return true; }
    Eigen::VectorXd closest_point(const Eigen::VectorXd& y) const override;

private:
    int d_;
    bool two_charts_;
};

/// SO(n) embedded in R^{n^2} (column-major), F(g) = upper half of g^T g - I.
class SpecialOrthogonal : public EmbeddedManifold {
public:
    explicit SpecialOrthogonal(int n);
    std::string name() const override;
    int ambient_dim() const override { return n_ * n_; }
    int dim() const override { return n_ * (n_ - 1) / 2; }
    bool chart_contains(int chart, const Eigen::VectorXd& x,
                        double margin) const override;
    Eigen::VectorXd F(int chart, const Eigen::VectorXd& x) const override;
    Eigen::MatrixXd dF(int chart, const Eigen::VectorXd& x) const override;
    Eigen::MatrixXd d2F_dir(int chart, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& v) const override;
    bool has_analytic_d2F() const override { return true; }
    Eigen::VectorXd closest_point(const Eigen::VectorXd& y) const override;

    int n() const { return n_; }

private:
    Eigen::MatrixXd dF_bilinear(const Eigen::MatrixXd& g) const;
    int n_;
};

/// Affine subspace {x : L x = c}.
class Affine : public EmbeddedManifold {
public:
    Affine(Eigen::MatrixXd L, Eigen::VectorXd c);
    std::string name() const override;
    int ambient_dim() const override { return static_cast<int>(L_.cols()); }
    int dim() const override {
        return static_cast<int>(L_.cols() - L_.rows());
    }
    bool chart_contains(int, const Eigen::VectorXd&, double) const override {
        return true;
    }
    Eigen::VectorXd F(int, const Eigen::VectorXd& x) const override;
    Eigen::MatrixXd dF(int, const Eigen::VectorXd&) const override { return L_; }
    Eigen::MatrixXd d2F_dir(int, const Eigen::VectorXd&,
                            const Eigen::VectorXd&) const override;
    bool has_analytic_d2F() const override { return true; }
    Eigen::MatrixXd dQ(const Eigen::VectorXd&,
                       const Eigen::VectorXd&) const override;
    bool has_analytic_dQ() const override { return true; }
    Eigen::VectorXd closest_point(const Eigen::VectorXd& y) const override;

private:
    Eigen::MatrixXd L_;
    Eigen::VectorXd c_;
    Eigen::MatrixXd pinv_; // L^T (L L^T)^{-1}
};

/// Cartesian product embedded block-wise.
class ProductManifold : public EmbeddedManifold {
public:
    ProductManifold(ManifoldPtr a, ManifoldPtr b);
    std::string name() const override;
    int ambient_dim() const override;
    int dim() const override;
    int num_charts() const override;
    bool chart_contains(int chart, const Eigen::VectorXd& x,
                        double margin) const override;
    Eigen::VectorXd F(int chart, const Eigen::VectorXd& x) const override;
    Eigen::MatrixXd dF(int chart, const Eigen::VectorXd& x) const override;
    Eigen::MatrixXd d2F_dir(int chart, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& v) const override;
    bool has_analytic_d2F() const override;
    Eigen::MatrixXd dQ(const Eigen::VectorXd& m,
                       const Eigen::VectorXd& v) const override;
    bool has_analytic_dQ() const override;
    Eigen::VectorXd closest_point(const Eigen::VectorXd& y) const override;

private:
    std::pair<int, int> split_chart(int chart) const;
    ManifoldPtr a_, b_;
};

/// Registry: `sphere:d=2`, `so:n=3`, `affine:n=3,d=1` (the subspace spanned
/// by the last d coordinates), `frame:<inner>`, `product:<a>|<b>`.
ManifoldPtr make_manifold(const std::string& key);

} // namespace roughmanifold

#endif
