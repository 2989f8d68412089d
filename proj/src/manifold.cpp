#include "roughmanifold/manifold.hpp"

#include <cmath>
#include <sstream>

namespace roughmanifold {

Eigen::MatrixXd EmbeddedManifold::d2F_dir(int chart, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& v) const {
    const double h = 1e-5;
    double scale = std::max(1.0, v.norm());
    Eigen::VectorXd u = v / scale;
    return scale * (dF(chart, x + h * u) - dF(chart, x - h * u)) / (2.0 * h);
}

int EmbeddedManifold::select_chart(const Eigen::VectorXd& x, double margin) const {
    for (int c = 0; c < num_charts(); ++c)
        if (chart_contains(c, x, margin)) return c;
    // retry without margin before giving up
    for (int c = 0; c < num_charts(); ++c)
        if (chart_contains(c, x, 0.0)) return c;
    std::ostringstream os;
    os << name() << ": no chart covers the query point";
    throw DomainError(os.str());
}

Projections EmbeddedManifold::projections(int chart, const Eigen::VectorXd& x) const {
    Projections pr;
    const Eigen::Index N = x.size();
    if (codim() == 0) {
        pr.P = Eigen::MatrixXd::Identity(N, N);
        pr.Q = Eigen::MatrixXd::Zero(N, N);
        pr.A = Eigen::MatrixXd::Zero(N, 0);
        return pr;
    }
    Eigen::MatrixXd J = dF(chart, x);
    Eigen::MatrixXd G = J * J.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success || (G.diagonal().array() <= 0).any())
        throw DomainError(name() + ": degenerate chart (dF dF^T is singular)");
    pr.A = ldlt.solve(J).transpose(); // A = J^T G^{-1}
    pr.Q = pr.A * J;
    pr.P = Eigen::MatrixXd::Identity(N, N) - pr.Q;
    return pr;
}

Projections EmbeddedManifold::projections(const Eigen::VectorXd& x) const {
    return projections(select_chart(x), x);
}

Eigen::MatrixXd EmbeddedManifold::dQ(const Eigen::VectorXd& m,
                                     const Eigen::VectorXd& v) const {
    const double h = 1e-5;
    double scale = std::max(1.0, v.norm());
    Eigen::VectorXd u = v / scale;
    int chart = select_chart(m);
    Eigen::MatrixXd qp = projections(chart, m + h * u).Q;
    Eigen::MatrixXd qm = projections(chart, m - h * u).Q;
    return scale * (qp - qm) / (2.0 * h);
}

Eigen::VectorXd EmbeddedManifold::closest_point(const Eigen::VectorXd& y) const {
    // Fixed point of x -> x - A(x) F(x) + P(x)(y - x): F = 0 and y - x normal.
    Eigen::VectorXd x = y;
    const int max_iter = 50;
    for (int it = 0; it < max_iter; ++it) {
        int chart = select_chart(x, 0.0);
        Projections pr = projections(chart, x);
        Eigen::VectorXd f = F(chart, x);
        Eigen::VectorXd step = -pr.A * f + pr.P * (y - x);
        x += step;
        if (step.norm() < 1e-14 * (1.0 + x.norm())) {
            Eigen::VectorXd fx = F(select_chart(x, 0.0), x);
            if (fx.size() == 0 || fx.cwiseAbs().maxCoeff() < 1e-12) return x;
        }
    }
    throw NumericError(name() + ": closest-point iteration left the Newton basin");
}

Eigen::MatrixXd EmbeddedManifold::tangent_frame(const Eigen::VectorXd& m) const {
    Eigen::MatrixXd Pm = P(m);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Pm);
    Eigen::MatrixXd Qfull = qr.householderQ();
    return Qfull.leftCols(dim());
}

DerivativeCheck validate_derivatives(const EmbeddedManifold& M,
                                     const std::vector<Eigen::VectorXd>& probes) {
    DerivativeCheck out;
    const double h = 1e-5;
    for (const auto& x : probes) {
        int chart = M.select_chart(x, 0.0);
        const Eigen::Index N = M.ambient_dim();
        for (Eigen::Index i = 0; i < N; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Unit(N, i);
            // dF vs FD of F
            Eigen::VectorXd fd_col =
                (M.F(chart, x + h * e) - M.F(chart, x - h * e)) / (2.0 * h);
            Eigen::VectorXd an_col = M.dF(chart, x) * e;
            double scale = std::max(1.0, an_col.norm());
            out.worst_dF = std::max(out.worst_dF, (fd_col - an_col).norm() / scale);
            if (M.has_analytic_d2F()) {
                Eigen::MatrixXd fd2 =
                    (M.dF(chart, x + h * e) - M.dF(chart, x - h * e)) / (2.0 * h);
                Eigen::MatrixXd an2 = M.d2F_dir(chart, x, e);
                double s2 = std::max(1.0, an2.norm());
                out.worst_d2F = std::max(out.worst_d2F, (fd2 - an2).norm() / s2);
            }
        }
        if (M.has_analytic_dQ()) {
            // tangential probes on the manifold
            Eigen::VectorXd m = M.closest_point(x);
            int cm = M.select_chart(m, 0.0);
            Eigen::MatrixXd frame = M.tangent_frame(m);
            for (Eigen::Index j = 0; j < frame.cols(); ++j) {
                Eigen::VectorXd v = frame.col(j);
                Eigen::MatrixXd fdq = (M.projections(cm, m + h * v).Q -
                                       M.projections(cm, m - h * v).Q) /
                                      (2.0 * h);
                Eigen::MatrixXd anq = M.dQ(m, v);
                double s = std::max(1.0, anq.norm());
                out.worst_dQ = std::max(out.worst_dQ, (fdq - anq).norm() / s);
            }
        }
    }
    return out;
}

} // namespace roughmanifold
