#include <doctest.h>

#include <cmath>

#include "roughmanifold/drivers.hpp"
#include "roughmanifold/one_form.hpp"
#include "roughmanifold/rde.hpp"
#include "test_util.hpp"

using namespace roughmanifold;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

GridRoughPath circle_driver(std::size_t n, double T = 1.0) {
    return circle_curve(1.0, 1.0, T).lift(0.0, T, n);
}

VectorFieldFamily rotation_scaling_fields() {
    MatrixXd J1(2, 2), J2(2, 2);
    J1 << 0, -1, 1, 0;
    J2 << 0.5, 0, 0, -0.5;
    VectorFieldFamily f;
    f.driver_dim = 2;
    f.state_dim = 2;
    f.Y = [J1, J2](const VectorXd& x) {
        MatrixXd m(2, 2);
        m.col(0) = J1 * x;
        m.col(1) = J2 * x;
        return m;
    };
    f.dY = [J1, J2](const VectorXd&, const VectorXd& v) {
        MatrixXd m(2, 2);
        m.col(0) = J1 * v;
        m.col(1) = J2 * v;
        return m;
    };
    return f;
}

} // namespace

TEST_CASE("integrate_one_form") {
    GridRoughPath Z = circle_driver(256);

    SUBCASE("constant linear forms integrate exactly") {
        MatrixXd L(2, 2);
        L << 1, 2, -3, 0.5;
        OneForm alpha;
        alpha.dim_in = alpha.dim_out = 2;
        alpha.value = [L](const VectorXd&) { return L; };
        alpha.dvalue = [](const VectorXd&, const VectorXd&) {
            return MatrixXd::Zero(2, 2);
        };
        GridRoughPath I = integrate_one_form(alpha, Z);
        PrefixIncrements pz(Z), pi(I);
        for (std::size_t j : {1ul, 77ul, 200ul, 256ul}) {
            CHECK((pi.level1_between(0, j) - L * pz.level1_between(0, j)).norm() <
                  1e-13);
            CHECK((pi.level2_between(0, j) -
                   L * pz.level2_between(0, j) * L.transpose())
                      .norm() < 1e-13);
        }
    }
    SUBCASE("exact differentials integrate to endpoint differences") {
        SmoothMap phi;
        phi.dim_in = 2;
        phi.dim_out = 2;
        phi.value = [](const VectorXd& x) {
            VectorXd y(2);
            y << x(0) * x(0) + std::sin(x(1)), x(0) * x(1);
            return y;
        };
        phi.jacobian = [](const VectorXd& x) {
            MatrixXd j(2, 2);
            j << 2 * x(0), std::cos(x(1)), x(1), x(0);
            return j;
        };
        GridRoughPath I = integrate_one_form(differential(phi), Z);
        VectorXd expected =
            phi.value(Z.values.col(256)) - phi.value(Z.values.col(0));
        CHECK((increment(I, 0.0, 1.0).level1 - expected).norm() < 1e-10);
    }
    SUBCASE("smooth spiral matches segment quadrature") {
        std::vector<double> g = uniform_grid(0.0, 1.0, 512);
        MatrixXd x(2, 513);
        for (int k = 0; k <= 512; ++k) {
            double t = g[k];
            x(0, k) = (1.0 + t) * std::cos(4.0 * t);
            x(1, k) = (1.0 + t) * std::sin(4.0 * t);
        }
        GridRoughPath spiral = signature_lift(g, x);
        OneForm alpha; // alpha(x) xi = (x_1^2 xi_1) e_1
        alpha.dim_in = 2;
        alpha.dim_out = 1;
        alpha.value = [](const VectorXd& z) {
            MatrixXd a(1, 2);
            a << z(0) * z(0), 0.0;
            return a;
        };
        GridRoughPath I = integrate_one_form(alpha, spiral);
        // oracle: Riemann-Stieltjes along the same piecewise-linear path,
        // Simpson per segment (exact for the cubic segment integrand)
        double total = 0.0;
        for (int k = 0; k < 512; ++k) {
            VectorXd a = x.col(k), d = x.col(k + 1) - x.col(k);
            auto f = [&](double s) { return std::pow(a(0) + s * d(0), 2) * d(0); };
            total += (f(0.0) + 4.0 * f(0.5) + f(1.0)) / 6.0;
        }
        CHECK(std::abs(increment(I, 0.0, 1.0).level1(0) - total) < 1e-8);
    }
    SUBCASE("driver mesh continuity: halving the mesh moves the output at order >= 0.9") {
        std::vector<double> meshes;
        std::vector<double> dists;
        GridRoughPath prev = integrate_one_form(
            [] {
                OneForm a;
                a.dim_in = 2;
                a.dim_out = 1;
                a.value = [](const VectorXd& z) {
                    MatrixXd m(1, 2);
                    m << z(1), z(0) * z(0);
                    return m;
                };
                return a;
            }(),
            circle_driver(64));
        for (std::size_t n : {128ul, 256ul, 512ul}) {
            OneForm a;
            a.dim_in = 2;
            a.dim_out = 1;
            a.value = [](const VectorXd& z) {
                MatrixXd m(1, 2);
                m << z(1), z(0) * z(0);
                return m;
            };
            GridRoughPath cur = integrate_one_form(a, circle_driver(n));
            GridRoughPath cur_coarse = restrict_to_times(cur, prev.times);
            meshes.push_back(2.0 / static_cast<double>(n));
            dists.push_back(rough_distance(prev, cur_coarse,
                                           Control::uniform(1.0, 0.0, 1.0)));
            prev = cur;
        }
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < meshes.size(); ++i) {
            lx.push_back(std::log(meshes[i]));
            ly.push_back(std::log(dists[i]));
        }
        CHECK(least_squares_slope(lx, ly) >= 0.9);
    }
    SUBCASE("non-weakly-geometric drivers are rejected") {
        GridRoughPath Z0 = circle_driver(128);
        for (auto& s : Z0.step2) s.setZero(); // kills the symmetric part
        OneForm a;
        a.dim_in = 2;
        a.dim_out = 1;
        a.value = [](const VectorXd&) { return MatrixXd::Ones(1, 2); };
        CHECK_THROWS_AS(integrate_one_form(a, Z0), DomainError);
    }
    SUBCASE("one-form derivative validator: analytic vs finite differences") {
        OneForm a;
        a.dim_in = 2;
        a.dim_out = 2;
        a.value = [](const VectorXd& z) {
            MatrixXd m(2, 2);
            m << z(0) * z(1), std::sin(z(0)), z(1) * z(1), 1.0;
            return m;
        };
        a.dvalue = [](const VectorXd& z, const VectorXd& v) {
            MatrixXd m(2, 2);
            m << z(0) * v(1) + z(1) * v(0), std::cos(z(0)) * v(0),
                2.0 * z(1) * v(1), 0.0;
            return m;
        };
        testutil::Rng rng(23);
        for (int trial = 0; trial < 20; ++trial) {
            VectorXd z = rng.vector(2), v = rng.vector(2);
            OneForm fd = a;
            fd.dvalue = nullptr;
            double scale = std::max(1.0, a.dvalue(z, v).norm());
            CHECK((a.dvalue(z, v) - fd.dvalue_or_fd(z, v)).norm() / scale < 1e-6);
        }
    }
}

TEST_CASE("pushforward_flat") {
    GridRoughPath Z = circle_driver(256);

    SUBCASE("identity") {
        GridRoughPath I = pushforward_flat(identity_map(2), Z);
        CHECK(rough_distance(I, Z) == 0.0);
    }
    SUBCASE("linear maps act exactly") {
        MatrixXd L(3, 2);
        L << 1, 0, 0, 1, 2, -1;
        GridRoughPath I = pushforward_flat(linear_map(L), Z);
        CHECK((I.values - L * Z.values).norm() == 0.0);
        for (std::size_t k = 0; k < Z.num_steps(); ++k)
            CHECK((I.step2[k] - L * Z.step2[k] * L.transpose()).norm() == 0.0);
    }
    SUBCASE("functoriality of push forwards") {
        SmoothMap phi;
        phi.dim_in = 2;
        phi.dim_out = 2;
        phi.value = [](const VectorXd& x) {
            VectorXd y(2);
            y << x(0) + 0.2 * x(1) * x(1), x(1);
            return y;
        };
        phi.jacobian = [](const VectorXd& x) {
            MatrixXd j(2, 2);
            j << 1.0, 0.4 * x(1), 0.0, 1.0;
            return j;
        };
        SmoothMap psi;
        psi.dim_in = 2;
        psi.dim_out = 2;
        psi.value = [](const VectorXd& x) {
            VectorXd y(2);
            y << x(0) * x(1), x(0) - x(1);
            return y;
        };
        psi.jacobian = [](const VectorXd& x) {
            MatrixXd j(2, 2);
            j << x(1), x(0), 1.0, -1.0;
            return j;
        };
        GridRoughPath Zf = circle_driver(2048);
        GridRoughPath lhs = pushforward_flat(psi, pushforward_flat(phi, Zf));
        GridRoughPath rhs = pushforward_flat(compose(psi, phi), Zf);
        CHECK((lhs.values - rhs.values).norm() < 1e-12); // traces written directly
        CHECK(rough_distance(lhs, rhs, Control::uniform(1.0, 0.0, 1.0)) < 1e-10);

        SUBCASE("pullback naturality") {
            OneForm beta;
            beta.dim_in = 2;
            beta.dim_out = 1;
            beta.value = [](const VectorXd& y) {
                MatrixXd m(1, 2);
                m << y(1), std::cos(y(0));
                return m;
            };
            GridRoughPath a = integrate_one_form(pullback(phi, beta), Z);
            GridRoughPath b = integrate_one_form(beta, pushforward_flat(phi, Z));
            CHECK(rough_distance(a, b, Control::uniform(1.0, 0.0, 1.0)) < 1e-8);
        }
    }
}

TEST_CASE("solve_rde_flat") {
    SUBCASE("zero fields freeze the state") {
        VectorFieldFamily f;
        f.driver_dim = 2;
        f.state_dim = 3;
        f.Y = [](const VectorXd&) { return MatrixXd::Zero(3, 2); };
        VectorXd x0(3);
        x0 << 1, 2, 3;
        RdeResult r = solve_rde_flat(f, circle_driver(64), x0);
        CHECK((r.path.values.colwise() - x0).norm() == 0.0);
        for (const auto& s : r.path.step2) CHECK(s.norm() == 0.0);
    }
    SUBCASE("translation fields reproduce the driver exactly") {
        VectorFieldFamily f;
        f.driver_dim = 2;
        f.state_dim = 2;
        f.Y = [](const VectorXd&) { return MatrixXd::Identity(2, 2); };
        f.dY = [](const VectorXd&, const VectorXd&) {
            return MatrixXd::Zero(2, 2);
        };
        GridRoughPath Z = circle_driver(128);
        VectorXd x0(2);
        x0 << 5, -1;
        RdeConfig cfg;
        cfg.max_refinements = 0;
        RdeResult r = solve_rde_flat(f, Z, x0, cfg);
        CHECK((r.path.values.col(77) - (x0 + Z.values.col(77) - Z.values.col(0)))
                  .norm() < 1e-13);
        for (std::size_t k = 0; k < Z.num_steps(); ++k)
            CHECK((r.path.step2[k] - Z.step2[k]).norm() < 1e-14);
    }
    SUBCASE("scalar linear RDE hits the closed form") {
        std::vector<double> g = uniform_grid(0.0, 1.0, 512);
        MatrixXd z(1, 513);
        for (int k = 0; k <= 512; ++k) z(0, k) = std::sin(2.0 * g[k]);
        VectorFieldFamily f;
        f.driver_dim = 1;
        f.state_dim = 1;
        f.Y = [](const VectorXd& x) { return MatrixXd::Constant(1, 1, x(0)); };
        f.dY = [](const VectorXd&, const VectorXd& v) {
            return MatrixXd::Constant(1, 1, v(0));
        };
        RdeConfig cfg;
        cfg.cauchy_tol = 2e-9;
        cfg.max_refinements = 8;
        VectorXd x0 = VectorXd::Ones(1);
        RdeResult r = solve_rde_flat(f, signature_lift(g, z), x0, cfg);
        double xT = r.path.values(0, r.path.values.cols() - 1);
        double exact = std::exp(std::sin(2.0));
        CHECK(std::abs(xT - exact) / exact < 1e-8);
        CHECK(r.log.size() >= 2);
        CHECK(r.log.back().cauchy < cfg.cauchy_tol);
    }
    SUBCASE("explosion is caught with its first bad time") {
        VectorFieldFamily f; // dx = x^2 dz, z = t: blows up at t = 1/x0 = 1
        f.driver_dim = 1;
        f.state_dim = 1;
        f.Y = [](const VectorXd& x) { return MatrixXd::Constant(1, 1, x(0) * x(0)); };
        std::vector<double> g = uniform_grid(0.0, 2.0, 256);
        MatrixXd z(1, 257);
        for (int k = 0; k <= 256; ++k) z(0, k) = g[k];
        try {
            solve_rde_flat(f, signature_lift(g, z), VectorXd::Ones(1));
            CHECK(false);
        } catch (const NumericError& e) {
            CHECK(e.where_s >= 0.9);
            CHECK(e.where_s <= 1.5);
        }
    }
    SUBCASE("two refinement seeds converge to the same path") {
        VectorFieldFamily f = rotation_scaling_fields();
        VectorXd x0(2);
        x0 << 1.0, 0.25;
        RdeConfig a;
        a.cauchy_tol = 1e-7;
        a.max_refinements = 8;
        RdeConfig b = a;
        b.base_mesh = 1.0 / 512.0;
        GridRoughPath Z = circle_driver(256);
        GridRoughPath xa = solve_rde_flat(f, Z, x0, a).path;
        GridRoughPath xb = solve_rde_flat(f, Z, x0, b).path;
        GridRoughPath ra = restrict_to_times(xa, Z.times);
        GridRoughPath rb = restrict_to_times(xb, Z.times);
        CHECK(rough_distance(ra, rb) < 2.0 * a.cauchy_tol * 10.0);
    }
    SUBCASE("p-variation growth bound has a stable constant") {
        VectorFieldFamily f = rotation_scaling_fields();
        VectorXd x0(2);
        x0 << 1.0, 0.25;
        GridRoughPath Z = circle_driver(256);
        RdeConfig cfg;
        cfg.max_refinements = 0;
        GridRoughPath X = solve_rde_flat(f, Z, x0, cfg).path;
        VectorXd lo = VectorXd::Constant(2, -2.0), hi = VectorXd::Constant(2, 2.0);
        double M = measure_field_bound(f, lo, hi, 3);
        testutil::Rng rng(41);
        double fitted = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            std::size_t i = static_cast<std::size_t>((rng.uniform() * 0.5 + 0.5) * 128);
            std::size_t j = i + 32 + static_cast<std::size_t>((rng.uniform() * 0.5 + 0.5) * 64);
            std::vector<double> sub(Z.times.begin() + i, Z.times.begin() + j + 1);
            Eigen::MatrixXd xs = X.values.middleCols(i, j - i + 1);
            Eigen::MatrixXd zs = Z.values.middleCols(i, j - i + 1);
            double vx = measured_p_variation(sub, xs, X.p);
            double vz = measured_p_variation(sub, zs, Z.p);
            double rhs = std::max(M * vz, std::pow(M * vz, X.p));
            if (rhs > 0.0) fitted = std::max(fitted, vx / rhs);
        }
        CHECK(fitted > 0.0);
        CHECK(fitted < 100.0);
    }
}

TEST_CASE("augment_trace") {
    SUBCASE("translation fields: the candidate is already multiplicative") {
        VectorFieldFamily f;
        f.driver_dim = 2;
        f.state_dim = 2;
        f.Y = [](const VectorXd&) { return MatrixXd::Identity(2, 2); };
        f.dY = [](const VectorXd&, const VectorXd&) {
            return MatrixXd::Zero(2, 2);
        };
        GridRoughPath Z = circle_driver(64);
        MatrixXd trace = Z.values;
        trace.array() += 1.0;
        GridRoughPath X = augment_trace(Z.times, trace, f, Z);
        for (std::size_t k = 0; k < Z.num_steps(); ++k)
            CHECK((X.step2[k] - Z.step2[k]).norm() < 1e-14);
    }
    SUBCASE("rotation-scaling trace lifts to a weakly geometric path") {
        VectorFieldFamily f = rotation_scaling_fields();
        VectorXd x0(2);
        x0 << 1.0, 0.25;
        GridRoughPath Z = circle_driver(1 << 17);
        RdeConfig cfg;
        cfg.max_refinements = 0;
        GridRoughPath X = solve_rde_flat(f, Z, x0, cfg).path;
        DefectReport wg = weak_geometricity_defect(X);
        CHECK(wg.max_raw <= 1e-10);
    }
    SUBCASE("corrupted traces are rejected") {
        VectorFieldFamily f = rotation_scaling_fields();
        VectorXd x0(2);
        x0 << 1.0, 0.25;
        GridRoughPath Z = circle_driver(512);
        RdeConfig cfg;
        cfg.max_refinements = 0;
        MatrixXd trace = solve_rde_flat(f, Z, x0, cfg).path.values;
        for (Eigen::Index k = 0; k < trace.cols(); ++k)
            trace(0, k) += 0.01 * std::sin(17.0 * Z.times[k]);
        CHECK_THROWS_AS(augment_trace(Z.times, trace, f, Z), DomainError);
    }
}

TEST_CASE("concatenate_rde splits solve seamlessly") {
    VectorFieldFamily f = rotation_scaling_fields();
    VectorXd x0(2);
    x0 << 1.0, 0.25;
    SmoothCurve c = circle_curve(1.0, 1.0, 1.0);
    RdeConfig cfg;
    cfg.max_refinements = 0;

    GridRoughPath Zfull = c.lift(0.0, 1.0, 384);
    GridRoughPath Za = c.lift(0.0, 1.0 / 3.0, 128);
    GridRoughPath Zb = c.lift(1.0 / 3.0, 1.0, 256);

    GridRoughPath Xfull = solve_rde_flat(f, Zfull, x0, cfg).path;
    GridRoughPath Xa = solve_rde_flat(f, Za, x0, cfg).path;
    GridRoughPath Xb =
        solve_rde_flat(f, Zb, Xa.values.col(Xa.values.cols() - 1), cfg).path;
    GridRoughPath glued = concatenate_rde(Xa, Xb);
    CHECK(rough_distance(glued, Xfull) < 1e-8);
}
