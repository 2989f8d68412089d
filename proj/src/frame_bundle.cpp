#include "roughmanifold/frame_bundle.hpp"

#include <cmath>

#include "roughmanifold/skew.hpp"

namespace roughmanifold {

FrameBundle::FrameBundle(ManifoldPtr base)
    : base_(std::move(base)), N_(base_->ambient_dim()), d_(base_->dim()) {}

Eigen::VectorXd FrameBundle::base_point(const Eigen::VectorXd& u) const {
    return u.head(N_);
}

Eigen::MatrixXd FrameBundle::frame(const Eigen::VectorXd& u) const {
    return vec_to_mat(u.tail(N_ * d_), N_, d_);
}

Eigen::VectorXd FrameBundle::join(const Eigen::VectorXd& x,
                                  const Eigen::MatrixXd& g) const {
    Eigen::VectorXd u(N_ + N_ * d_);
    u.head(N_) = x;
    u.tail(N_ * d_) = mat_to_vec(g);
    return u;
}

std::string FrameBundle::name() const { return "frame:" + base_->name(); }

bool FrameBundle::chart_contains(int chart, const Eigen::VectorXd& u,
                                 double margin) const {
    if (!base_->chart_contains(chart, base_point(u), margin)) return false;
    Eigen::MatrixXd g = frame(u);
    double dev = (g.transpose() * g - Eigen::MatrixXd::Identity(d_, d_)).norm();
    return dev < 1.0 - 0.7 * margin;
}

Eigen::VectorXd FrameBundle::F(int chart, const Eigen::VectorXd& u) const {
    Eigen::VectorXd x = base_point(u);
    Eigen::MatrixXd g = frame(u);
    Eigen::VectorXd fb = base_->F(chart, x);
    Eigen::MatrixXd mid = base_->dF(chart, x) * g; // (N-d) x d
    Eigen::MatrixXd S = g.transpose() * g - Eigen::MatrixXd::Identity(d_, d_);
    Eigen::VectorXd out(codim());
    out.head(fb.size()) = fb;
    out.segment(fb.size(), mid.size()) = mat_to_vec(mid);
    int k = static_cast<int>(fb.size() + mid.size());
    for (int i = 0; i < d_; ++i)
        for (int j = i; j < d_; ++j, ++k) out(k) = S(i, j);
    return out;
}

Eigen::MatrixXd FrameBundle::dF(int chart, const Eigen::VectorXd& u) const {
    Eigen::VectorXd x = base_point(u);
    Eigen::MatrixXd g = frame(u);
    const int kb = base_->codim();
    const int rows_mid = kb * d_;
    const int rows_sym = d_ * (d_ + 1) / 2;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(kb + rows_mid + rows_sym,
                                              N_ + N_ * d_);
    Eigen::MatrixXd Jb = base_->dF(chart, x);
    J.topLeftCorner(kb, N_) = Jb;

    // middle block: vec(dF(x) g); x-columns need the second derivative of F
    for (int m = 0; m < N_; ++m) {
        Eigen::MatrixXd Dm =
            base_->d2F_dir(chart, x, Eigen::VectorXd::Unit(N_, m)) * g;
        J.block(kb, m, rows_mid, 1) = mat_to_vec(Dm);
    }
    for (int b = 0; b < d_; ++b)
        J.block(kb + kb * b, N_ + N_ * b, kb, N_) = Jb;

    // symmetric block: d(g^T g)_{ij} / d g_{ab}
    int r = kb + rows_mid;
    for (int i = 0; i < d_; ++i)
        for (int j = i; j < d_; ++j, ++r)
            for (int a = 0; a < N_; ++a) {
                J(r, N_ + a + N_ * i) += g(a, j);
                J(r, N_ + a + N_ * j) += g(a, i);
            }
    return J;
}

Eigen::VectorXd FrameBundle::closest_point(const Eigen::VectorXd& u) const {
    Eigen::VectorXd x = base_->closest_point(base_point(u));
    Eigen::MatrixXd pg = base_->projections(x).P * frame(u);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        pg, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < 1e-6)
        throw NumericError(name() + ": frame degeneracy (singular value below 1e-6)");
    return join(x, svd.matrixU() * svd.matrixV().transpose());
}

double FrameBundle::tangency_defect(const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& xi,
                                    const Eigen::MatrixXd& h) const {
    Eigen::VectorXd x = base_point(u);
    Eigen::MatrixXd g = frame(u);
    int chart = base_->select_chart(x, 0.0);
    Projections pr = base_->projections(chart, x);
    double d_tan = (base_->dF(chart, x) * xi).cwiseAbs().maxCoeff();
    Eigen::MatrixXd vert = pr.Q * h + base_->dQ(x, xi) * g;
    Eigen::MatrixXd gh = g.transpose() * h;
    double d_skew = (gh + gh.transpose()).norm();
    return std::max({d_tan, vert.norm(), d_skew});
}

std::pair<double, double> FrameBundle::frame_defect(const Eigen::VectorXd& u) const {
    Eigen::VectorXd x = base_point(u);
    Eigen::MatrixXd g = frame(u);
    double iso = (g.transpose() * g - Eigen::MatrixXd::Identity(d_, d_)).norm();
    double tang = (base_->projections(x).Q * g).norm();
    return {iso, tang};
}

} // namespace roughmanifold
