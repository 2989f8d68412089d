#include "roughmanifold/one_form.hpp"

#include "roughmanifold/errors.hpp"

namespace roughmanifold {

SmoothMap identity_map(int dim) {
    SmoothMap m;
    m.dim_in = m.dim_out = dim;
    m.linear = true;
    m.value = [](const Eigen::VectorXd& x) { return x; };
    m.jacobian = [dim](const Eigen::VectorXd&) {
        return Eigen::MatrixXd::Identity(dim, dim);
    };
    return m;
}

SmoothMap linear_map(const Eigen::MatrixXd& L) {
    SmoothMap m;
    m.dim_in = static_cast<int>(L.cols());
    m.dim_out = static_cast<int>(L.rows());
    m.linear = true;
    m.value = [L](const Eigen::VectorXd& x) -> Eigen::VectorXd { return L * x; };
    m.jacobian = [L](const Eigen::VectorXd&) { return L; };
    return m;
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner) {
    SmoothMap m;
    m.dim_in = inner.dim_in;
    m.dim_out = outer.dim_out;
    m.linear = outer.linear && inner.linear;
    auto ov = outer.value;
    auto iv = inner.value;
    auto oj = outer.jacobian;
    auto ij = inner.jacobian;
    m.value = [ov, iv](const Eigen::VectorXd& x) { return ov(iv(x)); };
    m.jacobian = [ov, iv, oj, ij](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        return oj(iv(x)) * ij(x);
    };
    return m;
}

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd J(f0.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        J.col(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return J;
}

Eigen::MatrixXd OneForm::dvalue_or_fd(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& v) const {
    if (dvalue) return dvalue(x, v);
    const double h = 1e-5;
    return (value(x + h * v) - value(x - h * v)) / (2.0 * h);
}

Eigen::VectorXd OneForm::derivative_contract(const Eigen::VectorXd& x,
                                             const Eigen::MatrixXd& T) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_out);
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
        if (T.row(i).cwiseAbs().maxCoeff() == 0.0) continue;
        Eigen::MatrixXd Di = dvalue_or_fd(x, Eigen::VectorXd::Unit(T.rows(), i));
        out.noalias() += Di * T.row(i).transpose();
    }
    return out;
}

OneForm differential(const SmoothMap& phi) {
    OneForm a;
    a.dim_in = phi.dim_in;
    a.dim_out = phi.dim_out;
    a.value = phi.jacobian;
    if (phi.linear) {
        int w = phi.dim_out, n = phi.dim_in;
        a.dvalue = [w, n](const Eigen::VectorXd&, const Eigen::VectorXd&) {
            return Eigen::MatrixXd::Zero(w, n);
        };
    }
    return a;
}

OneForm pullback(const SmoothMap& phi, const OneForm& alpha) {
    OneForm b;
    b.dim_in = phi.dim_in;
    b.dim_out = alpha.dim_out;
    auto pv = phi.value;
    auto pj = phi.jacobian;
    auto av = alpha.value;
    b.value = [pv, pj, av](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        return av(pv(x)) * pj(x);
    };
    return b;
}

GridRoughPath integrate_one_form(const OneForm& alpha, const GridRoughPath& Z,
                                 const IntegrateOptions& opts) {
    if (alpha.dim_in != Z.dim())
        throw DomainError("integrate_one_form: dimension mismatch");
    if (opts.check_driver && !is_weakly_geometric(Z))
        throw DomainError("integrate_one_form: driver is not weakly geometric");
    DyadicDriverView view(Z);
    auto cand = [&](std::size_t cell, int depth, std::size_t idx) -> T2Element {
        Eigen::VectorXd z = view.value(cell, depth, idx);
        Eigen::MatrixXd A = alpha.value(z);
        const Eigen::MatrixXd& Z2 = view.piece2(cell, depth);
        Eigen::VectorXd l1 = A * view.trace_inc(cell, depth) +
                             alpha.derivative_contract(z, Z2);
        return {std::move(l1), A * Z2 * A.transpose()};
    };
    SewStats stats;
    try {
        return sew_cells(cand, Z.times, Eigen::VectorXd::Zero(alpha.dim_out), Z.p,
                         opts.sew, &stats);
    } catch (const NumericError& e) {
        throw NumericError(std::string("integrate_one_form: ") + e.what(),
                           e.where_s, e.where_t);
    }
}

GridRoughPath pushforward_flat(const SmoothMap& phi, const GridRoughPath& Z,
                               const IntegrateOptions& opts) {
    if (phi.dim_in != Z.dim())
        throw DomainError("pushforward_flat: dimension mismatch");
    const std::size_t n = Z.num_steps();
    Eigen::MatrixXd values(phi.dim_out, n + 1);
    for (std::size_t k = 0; k <= n; ++k) values.col(k) = phi.value(Z.values.col(k));

    if (phi.linear) {
        Eigen::MatrixXd L = phi.jacobian(Z.values.col(0));
        std::vector<Eigen::MatrixXd> step2(n);
        for (std::size_t k = 0; k < n; ++k)
            step2[k] = L * Z.step2[k] * L.transpose();
        return make_grid_rough_path(Z.times, std::move(values), std::move(step2), Z.p);
    }
    if (opts.check_driver && !is_weakly_geometric(Z))
        throw DomainError("pushforward_flat: driver is not weakly geometric");

    DyadicDriverView view(Z);
    auto cand = [&](std::size_t cell, int depth, std::size_t idx) -> T2Element {
        Eigen::VectorXd zl = view.value(cell, depth, idx);
        Eigen::VectorXd zr = view.value(cell, depth, idx + 1);
        Eigen::MatrixXd J = phi.jacobian(zl);
        return {phi.value(zr) - phi.value(zl),
                J * view.piece2(cell, depth) * J.transpose()};
    };
    return sew_cells(cand, Z.times, values.col(0), Z.p, opts.sew, nullptr, &values);
}

} // namespace roughmanifold
