#include "roughmanifold/development.hpp"

#include <cmath>

#include "roughmanifold/skew.hpp"

namespace roughmanifold {

Eigen::VectorXd FramePath::base_value(std::size_t k) const {
    return bundle->base_point(U.path().values.col(k));
}

Eigen::MatrixXd FramePath::frame_value(std::size_t k) const {
    return bundle->frame(U.path().values.col(k));
}

double FramePath::max_isometry_defect() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < num_points(); ++k)
        worst = std::max(worst, bundle->frame_defect(U.path().values.col(k)).first);
    return worst;
}

double FramePath::max_tangency_defect() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < num_points(); ++k)
        worst = std::max(worst, bundle->frame_defect(U.path().values.col(k)).second);
    return worst;
}

// ------------------------------------------------------------- fields

ManifoldVectorFieldFamily horizontal_fields(std::shared_ptr<const FrameBundle> FB) {
    ManifoldVectorFieldFamily f;
    f.M = FB;
    const int d = FB->frame_dim();
    f.driver_dim = d;
    f.Y = [FB, d](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        Eigen::VectorXd x = FB->base_point(u);
        Eigen::MatrixXd g = FB->frame(u);
        Eigen::MatrixXd out(u.size(), d);
        for (int a = 0; a < d; ++a) {
            Eigen::VectorXd ga = g.col(a);
            out.col(a) = FB->join(ga, Eigen::MatrixXd(-FB->base()->dQ(x, ga) * g));
        }
        return out;
    };
    return f;
}

ManifoldVectorFieldFamily vertical_fields(std::shared_ptr<const FrameBundle> FB) {
    ManifoldVectorFieldFamily f;
    f.M = FB;
    const int d = FB->frame_dim();
    const int m = skew_dim(d);
    f.driver_dim = m;
    f.Y = [FB, d, m](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        Eigen::MatrixXd g = FB->frame(u);
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(FB->base_ambient());
        Eigen::MatrixXd out(u.size(), m);
        for (int k = 0; k < m; ++k) {
            Eigen::MatrixXd A = vec_to_skew(Eigen::VectorXd::Unit(m, k), d);
            out.col(k) = FB->join(zero, Eigen::MatrixXd(g * A));
        }
        return out;
    };
    return f;
}

ManifoldVectorFieldFamily parallelism_fields(std::shared_ptr<const FrameBundle> FB) {
    ManifoldVectorFieldFamily f;
    f.M = FB;
    const int d = FB->frame_dim();
    const int m = skew_dim(d);
    f.driver_dim = d + m;
    auto hor = horizontal_fields(FB);
    auto ver = vertical_fields(FB);
    f.Y = [hor, ver, d, m](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        Eigen::MatrixXd out(u.size(), d + m);
        out.leftCols(d) = hor.Y(u);
        out.rightCols(m) = ver.Y(u);
        return out;
    };
    return f;
}

ManifoldVectorFieldFamily transport_lift_fields(
    std::shared_ptr<const FrameBundle> FB) {
    ManifoldVectorFieldFamily f;
    f.M = FB;
    const int N = FB->base_ambient();
    f.driver_dim = N;
    f.Y = [FB, N](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        Eigen::VectorXd x = FB->base_point(u);
        Eigen::MatrixXd g = FB->frame(u);
        Eigen::MatrixXd P = FB->base()->P(x);
        Eigen::MatrixXd out(u.size(), N);
        for (int a = 0; a < N; ++a) {
            Eigen::VectorXd pa = P.col(a);
            out.col(a) = FB->join(pa, Eigen::MatrixXd(-FB->base()->dQ(x, pa) * g));
        }
        return out;
    };
    return f;
}

// -------------------------------------------------------------- forms

ManifoldOneForm canonical_form(std::shared_ptr<const FrameBundle> FB) {
    ManifoldOneForm a;
    a.M = FB;
    const int d = FB->frame_dim();
    const int N = FB->base_ambient();
    a.dim_out = d;
    a.value_ambient = [FB, d, N](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, N + N * d);
        A.leftCols(N) = FB->frame(u).transpose();
        return A;
    };
    a.dvalue_ambient = [FB, d, N](const Eigen::VectorXd&,
                                  const Eigen::VectorXd& v) -> Eigen::MatrixXd {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, N + N * d);
        A.leftCols(N) = FB->frame(v).transpose();
        return A;
    };
    return a;
}

ManifoldOneForm connection_form(std::shared_ptr<const FrameBundle> FB) {
    ManifoldOneForm a;
    a.M = FB;
    const int d = FB->frame_dim();
    const int N = FB->base_ambient();
    const int m = skew_dim(d);
    a.dim_out = m;
    auto rows_from = [d, N, m](const Eigen::MatrixXd& g) {
        // row (i<j), column h_{ab}: entry g(a,i) at b==j minus g(a,j) at b==i
        // (antisymmetrised so the extension is the upper part of g^T h).
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, N + N * d);
        int k = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j, ++k)
                for (int aa = 0; aa < N; ++aa) {
                    A(k, N + aa + N * j) += 0.5 * g(aa, i);
                    A(k, N + aa + N * i) -= 0.5 * g(aa, j);
                }
        return A;
    };
    a.value_ambient = [FB, rows_from](const Eigen::VectorXd& u) {
        return rows_from(FB->frame(u));
    };
    a.dvalue_ambient = [FB, rows_from](const Eigen::VectorXd&,
                                       const Eigen::VectorXd& v) {
        return rows_from(FB->frame(v));
    };
    return a;
}

ManifoldOneForm joint_form(std::shared_ptr<const FrameBundle> FB) {
    ManifoldOneForm a;
    a.M = FB;
    const int d = FB->frame_dim();
    const int m = skew_dim(d);
    a.dim_out = d + m;
    auto th = canonical_form(FB);
    auto om = connection_form(FB);
    a.value_ambient = [th, om, d, m](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        Eigen::MatrixXd A(d + m, th.value_ambient(u).cols());
        A.topRows(d) = th.value_ambient(u);
        A.bottomRows(m) = om.value_ambient(u);
        return A;
    };
    a.dvalue_ambient = [th, om, d, m](const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& v) -> Eigen::MatrixXd {
        Eigen::MatrixXd A(d + m, th.value_ambient(u).cols());
        A.topRows(d) = th.dvalue_ambient(u, v);
        A.bottomRows(m) = om.dvalue_ambient(u, v);
        return A;
    };
    return a;
}

// ---------------------------------------------------------- transport

namespace {

void check_initial_frame(const FrameBundle& FB, const Eigen::VectorXd& u0) {
    auto [iso, tang] = FB.frame_defect(u0);
    if (iso > 1e-8 || tang > 1e-8)
        throw DomainError("initial frame is not an orthonormal tangent frame");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(FB.frame(u0));
    if (svd.singularValues().minCoeff() < 1e-6)
        throw NumericError("initial frame is degenerate (conditioning)");
}

FramePath wrap_frame_path(ManifoldRoughPath path,
                          std::shared_ptr<const FrameBundle> FB) {
    return FramePath{std::move(path), std::move(FB)};
}

} // namespace

TransportResult parallel_transport(const ManifoldRoughPath& X,
                                   const Eigen::MatrixXd& g0,
                                   const RdeConfig& cfg) {
    X.require_membership();
    auto FB = std::make_shared<FrameBundle>(X.manifold());
    Eigen::VectorXd u0 = FB->join(X.path().values.col(0), g0);
    check_initial_frame(*FB, u0);
    RdeConfig c = cfg;
    c.check_driver = false; // membership already vouches for the driver
    ConstrainedRdeResult res =
        solve_constrained_rde(transport_lift_fields(FB), X.path(), u0, c);
    TransportResult out;
    out.U = wrap_frame_path(std::move(res.path), FB);
    out.log = std::move(res.log);
    out.max_projection_displacement = res.max_projection_displacement;
    return out;
}

DefectReport transport_linear_model_defect(const FramePath& U,
                                           const ManifoldRoughPath& X) {
    const auto& M = X.manifold();
    const Eigen::Index N = M->ambient_dim();
    ManifoldOneForm gamma;
    gamma.M = M;
    gamma.dim_out = static_cast<int>(N * N);
    gamma.value_ambient = [M, N](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        Eigen::MatrixXd A(N * N, N);
        for (Eigen::Index j = 0; j < N; ++j)
            A.col(j) = mat_to_vec(M->dQ(x, Eigen::VectorXd::Unit(N, j)));
        return A;
    };
    GridRoughPath A = integrate_manifold_one_form(gamma, X);

    const GridRoughPath& Up = U.U.path();
    const int d = U.bundle->frame_dim();
    DefectAccumulator acc(A.t_begin(), A.t_end(), 2.0 * A.max_mesh(), A.p,
                          A.control);
    PrefixIncrements preA(A);
    auto contract = [&](const Eigen::MatrixXd& l2) {
        // [A (x) B] := B A summed against the level-2 components
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N, N);
        for (Eigen::Index K = 0; K < N * N; ++K) {
            Eigen::Index rK = K % N, cK = K / N;
            for (Eigen::Index L = 0; L < N * N; ++L) {
                Eigen::Index rL = L % N, cL = L / N;
                if (cL == rK) out(rL, cK) += l2(K, L);
            }
        }
        return out;
    };
    auto visit = [&](std::size_t i, std::size_t j) {
        Eigen::MatrixXd gi = vec_to_mat(Up.values.col(i).tail(N * d), N, d);
        Eigen::MatrixXd gj = vec_to_mat(Up.values.col(j).tail(N * d), N, d);
        Eigen::MatrixXd da = vec_to_mat(preA.level1_between(i, j), N, N);
        Eigen::MatrixXd second = contract(preA.level2_between(i, j));
        Eigen::MatrixXd resid = gj - gi + da * gi - second * gi;
        acc.add(A.times[i], A.times[j], entry_norm(resid));
    };
    for (std::size_t k = 0; k + 1 < A.times.size(); ++k) visit(k, k + 1);
    for_sampled_pairs(A.times.size(), 128, visit);
    return acc.finalize();
}

SmoothTransport transport_ode_oracle(
    const std::function<Eigen::VectorXd(double)>& x,
    const std::function<Eigen::VectorXd(double)>& xdot,
    const EmbeddedManifold& M, const Eigen::MatrixXd& g0, double t0, double t1,
    double step) {
    SmoothTransport out;
    auto rhs = [&](double t, const Eigen::MatrixXd& g) -> Eigen::MatrixXd {
        return -M.dQ(x(t), xdot(t)) * g;
    };
    const Eigen::Index d = g0.cols();
    Eigen::MatrixXd g = g0;
    double t = t0;
    out.times.push_back(t);
    out.frames.push_back(g);
    while (t < t1 - 1e-12 * (t1 - t0)) {
        double h = std::min(step, t1 - t);
        int halvings = 0;
        for (;;) {
            Eigen::MatrixXd k1 = rhs(t, g);
            Eigen::MatrixXd k2 = rhs(t + 0.5 * h, g + 0.5 * h * k1);
            Eigen::MatrixXd k3 = rhs(t + 0.5 * h, g + 0.5 * h * k2);
            Eigen::MatrixXd k4 = rhs(t + h, g + h * k3);
            Eigen::MatrixXd gn = g + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            double iso = (gn.transpose() * gn -
                          Eigen::MatrixXd::Identity(d, d)).norm();
            if (iso <= 1e-8 || halvings >= 20) {
                g = gn;
                break;
            }
            h *= 0.5;
            ++halvings;
        }
        t += h;
        out.times.push_back(t);
        out.frames.push_back(g);
    }
    return out;
}

// ------------------------------------------------------------ rolling

namespace {

ManifoldRoughPath project_to_base(const ManifoldRoughPath& U,
                                  const FrameBundle& FB, ManifoldPtr base) {
    // pi(x, g) = x is linear: block extraction is the exact push-forward
    const GridRoughPath& P = U.path();
    const int N = FB.base_ambient();
    Eigen::MatrixXd values = P.values.topRows(N);
    std::vector<Eigen::MatrixXd> step2(P.num_steps());
    for (std::size_t k = 0; k < P.num_steps(); ++k)
        step2[k] = P.step2[k].topLeftCorner(N, N);
    return ManifoldRoughPath(
        make_grid_rough_path(P.times, std::move(values), std::move(step2), P.p),
        std::move(base));
}

} // namespace

RollResult roll(const GridRoughPath& Z, ManifoldPtr M, const Eigen::VectorXd& x0,
                const Eigen::MatrixXd& g0, const RdeConfig& cfg) {
    auto FB = std::make_shared<FrameBundle>(M);
    if (Z.dim() != FB->frame_dim())
        throw DomainError("roll: flat driver dimension must equal dim M");
    Eigen::VectorXd u0 = FB->join(x0, g0);
    check_initial_frame(*FB, u0);
    ConstrainedRdeResult res =
        solve_constrained_rde(horizontal_fields(FB), Z, u0, cfg);
    RollResult out;
    out.X = project_to_base(res.path, *FB, M);
    out.U = wrap_frame_path(std::move(res.path), FB);
    out.log = std::move(res.log);
    out.max_projection_displacement = res.max_projection_displacement;
    return out;
}

UnrollResult unroll(const ManifoldRoughPath& X, const Eigen::MatrixXd& g0,
                    const RdeConfig& cfg) {
    UnrollResult out;
    out.transport = parallel_transport(X, g0, cfg);
    IntegrateOptions iopts;
    iopts.check_driver = false;
    out.Z = integrate_manifold_one_form(canonical_form(out.transport.U.bundle),
                                        out.transport.U.U, iopts);
    return out;
}

RollResult develop_full(const GridRoughPath& Z, ManifoldPtr M,
                        const Eigen::VectorXd& x0, const Eigen::MatrixXd& g0,
                        const RdeConfig& cfg) {
    auto FB = std::make_shared<FrameBundle>(M);
    if (Z.dim() != FB->frame_dim() + skew_dim(FB->frame_dim()))
        throw DomainError("develop_full: driver must live in R^d x so(d)");
    Eigen::VectorXd u0 = FB->join(x0, g0);
    check_initial_frame(*FB, u0);
    ConstrainedRdeResult res =
        solve_constrained_rde(parallelism_fields(FB), Z, u0, cfg);
    RollResult out;
    out.X = project_to_base(res.path, *FB, M);
    out.U = wrap_frame_path(std::move(res.path), FB);
    out.log = std::move(res.log);
    out.max_projection_displacement = res.max_projection_displacement;
    return out;
}

GridRoughPath antidevelop(const FramePath& U, const IntegrateOptions& opts) {
    IntegrateOptions o = opts;
    o.check_driver = false;
    return integrate_manifold_one_form(joint_form(U.bundle), U.U, o);
}

HorizontalityReport horizontality_defect(const FramePath& U) {
    HorizontalityReport rep;
    rep.W = antidevelop(U);
    const GridRoughPath& W = rep.W;
    const int d = U.bundle->frame_dim();
    const int m = skew_dim(d);
    DefectAccumulator acc1(W.t_begin(), W.t_end(), 2.0 * W.max_mesh(), W.p,
                           W.control);
    DefectAccumulator acc_ss(W.t_begin(), W.t_end(), 2.0 * W.max_mesh(), W.p,
                             W.control);
    DefectAccumulator acc_cr(W.t_begin(), W.t_end(), 2.0 * W.max_mesh(), W.p,
                             W.control);
    PrefixIncrements pre(W);
    auto visit = [&](std::size_t i, std::size_t j) {
        double s = W.times[i], t = W.times[j];
        Eigen::VectorXd l1 = pre.level1_between(i, j);
        Eigen::MatrixXd l2 = pre.level2_between(i, j);
        acc1.add(s, t, entry_norm(Eigen::VectorXd(l1.tail(m))));
        acc_ss.add(s, t, entry_norm(Eigen::MatrixXd(l2.bottomRightCorner(m, m))));
        double cross = std::max(entry_norm(Eigen::MatrixXd(l2.topRightCorner(d, m))),
                                entry_norm(Eigen::MatrixXd(l2.bottomLeftCorner(m, d))));
        acc_cr.add(s, t, cross);
    };
    for (std::size_t k = 0; k + 1 < W.times.size(); ++k) visit(k, k + 1);
    for_sampled_pairs(W.times.size(), 256, visit);
    rep.so_level1 = acc1.finalize();
    rep.so_so_level2 = acc_ss.finalize();
    rep.cross_level2 = acc_cr.finalize();
    return rep;
}

// ------------------------------------------------------ smooth oracles

Eigen::MatrixXd smooth_roll_ode(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& fields,
    const std::function<Eigen::VectorXd(double)>& zdot,
    const Eigen::VectorXd& x0, const std::vector<double>& times,
    const EmbeddedManifold* reproject) {
    Eigen::MatrixXd out(x0.size(), times.size());
    out.col(0) = x0;
    auto rhs = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return fields(x) * zdot(t);
    };
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        double t = times[k], h = times[k + 1] - times[k];
        Eigen::VectorXd x = out.col(k);
        Eigen::VectorXd k1 = rhs(t, x);
        Eigen::VectorXd k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
        Eigen::VectorXd k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
        Eigen::VectorXd k4 = rhs(t + h, x + h * k3);
        Eigen::VectorXd xn = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.col(k + 1) = reproject ? reproject->closest_point(xn) : xn;
    }
    return out;
}

Eigen::MatrixXd smooth_unroll_ode(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& integrand,
    int dim_out, const std::vector<double>& times) {
    Eigen::MatrixXd out(dim_out, times.size());
    out.col(0).setZero();
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        double t = times[k], h = times[k + 1] - times[k];
        Eigen::VectorXd z = out.col(k);
        Eigen::VectorXd k1 = integrand(t, z);
        Eigen::VectorXd k2 = integrand(t + 0.5 * h, z + 0.5 * h * k1);
        Eigen::VectorXd k3 = integrand(t + 0.5 * h, z + 0.5 * h * k2);
        Eigen::VectorXd k4 = integrand(t + h, z + h * k3);
        out.col(k + 1) = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return out;
}

double frame_rotation_angle(const Eigen::MatrixXd& g0, const Eigen::MatrixXd& gT) {
    Eigen::MatrixXd K = g0.transpose() * gT;
    if (K.rows() != 2 || K.cols() != 2)
        throw DomainError("frame_rotation_angle: expects 2-frames");
    return std::atan2(K(1, 0), K(0, 0));
}

} // namespace roughmanifold
