#include <doctest.h>

#include <cmath>

#include "roughmanifold/sewing.hpp"
#include "test_util.hpp"

using namespace roughmanifold;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd circle_point(double t) {
    VectorXd z(2);
    z << std::cos(t), std::sin(t);
    return z;
}

// Exact signature level 2 of the unit circle: int_s^t z_{s,u} (x) dz_u.
MatrixXd circle_level2(double s, double t) {
    MatrixXd m(2, 2);
    auto c2 = [](double a) { return std::cos(a) * std::cos(a); };
    auto s2 = [](double a) { return std::sin(a) * std::sin(a); };
    m(0, 0) = 0.5 * (c2(t) - c2(s));
    m(0, 1) = 0.5 * (t - s) + 0.25 * (std::sin(2 * t) - std::sin(2 * s));
    m(1, 0) = -0.5 * (t - s) + 0.25 * (std::sin(2 * t) - std::sin(2 * s));
    m(1, 1) = 0.5 * (s2(t) - s2(s));
    VectorXd zs = circle_point(s);
    return m - zs * (circle_point(t) - zs).transpose();
}

} // namespace

TEST_CASE("sew leaves multiplicative candidates fixed") {
    // the exact circle signature is multiplicative at every pair
    std::vector<double> g = uniform_grid(0.0, 2.0, 16);
    auto cand = [&](double s, double t) -> T2Element {
        return {circle_point(t) - circle_point(s), circle_level2(s, t)};
    };
    SewStats stats;
    GridRoughPath out = sew(cand, g, circle_point(0.0), 2.1, {}, &stats);
    CHECK(stats.max_depth <= 1); // the first bisection already reproduces it
    for (std::size_t k = 0; k < 16; ++k) {
        T2Element expected = cand(g[k], g[k + 1]);
        CHECK((out.step(k).level1 - expected.level1).norm() < 1e-14);
        CHECK((out.step2[k] - expected.level2).norm() < 1e-14);
    }
}

TEST_CASE("sew repairs the Lemma-2.18 almost rough path over a smooth circle") {
    // trace x solves dx = Y(x) dz for rotation/scaling fields along the circle
    MatrixXd J1(2, 2), J2(2, 2);
    J1 << 0, -1, 1, 0;
    J2 << 0.5, 0, 0, -0.5;
    auto zdot = [](double t) {
        VectorXd v(2);
        v << -std::sin(t), std::cos(t);
        return v;
    };
    auto rhs = [&](double t, const VectorXd& x) -> VectorXd {
        VectorXd zd = zdot(t);
        return (J1 * x) * zd(0) + (J2 * x) * zd(1);
    };
    VectorXd x0(2);
    x0 << 1.0, 0.25;
    const double T = 1.5;
    const std::size_t fine = 1 << 15;
    Eigen::MatrixXd xs = testutil::rk4(rhs, x0, 0.0, T, fine);
    auto x_at = [&](double t) -> VectorXd {
        double pos = t / T * static_cast<double>(fine);
        std::size_t k = std::min(static_cast<std::size_t>(pos), fine - 1);
        double frac = pos - static_cast<double>(k);
        return xs.col(k) + frac * (xs.col(k + 1) - xs.col(k));
    };
    auto Ymat = [&](const VectorXd& x) {
        MatrixXd m(2, 2);
        m.col(0) = J1 * x;
        m.col(1) = J2 * x;
        return m;
    };
    auto cand = [&](double s, double t) -> T2Element {
        MatrixXd B = Ymat(x_at(s));
        return {x_at(t) - x_at(s), B * circle_level2(s, t) * B.transpose()};
    };
    std::vector<double> g = uniform_grid(0.0, T, 128);
    SewOptions opts;
    opts.check_almost = true;
    SewStats stats;
    GridRoughPath out = sew(cand, g, x0, 2.1, opts, &stats);
    CHECK(chen_defect(out).max_raw <= 1e-12);
    // the sewn path stays a remainder away from the candidate
    DefectAccumulator acc(0.0, T, 2.0 * T / 128, out.p, out.control);
    PrefixIncrements pre(out);
    for (std::size_t i = 0; i < g.size(); i += 3)
        for (std::size_t j = i + 1; j < g.size(); j += 5) {
            T2Element a = cand(g[i], g[j]);
            acc.add(g[i], g[j],
                    std::max(entry_norm(Eigen::VectorXd(
                                 pre.level1_between(i, j) - a.level1)),
                             entry_norm(Eigen::MatrixXd(
                                 pre.level2_between(i, j) - a.level2))));
        }
    CHECK(acc.finalize().passed());
}

TEST_CASE("sewn level-1 Riemann-Stieltjes candidate matches adaptive quadrature") {
    // full loop (periodic integrand), first-order candidate alpha(z_s) z_{s,t}
    auto alpha = [](const VectorXd& z) {
        MatrixXd a(2, 2);
        a << z(0) * z(0), z(0) * z(1), std::sin(z(1)), std::cos(z(0));
        return a;
    };
    const double T = 2.0 * M_PI;
    auto cand = [&](double s, double t) -> T2Element {
        MatrixXd A = alpha(circle_point(s));
        return {A * (circle_point(t) - circle_point(s)),
                A * circle_level2(s, t) * A.transpose()};
    };
    std::vector<double> g = uniform_grid(0.0, T, 64);
    SewOptions opts;
    opts.max_rounds = 12;
    GridRoughPath out = sew(cand, g, VectorXd::Zero(2), 2.1, opts);
    VectorXd quad = testutil::adaptive_simpson(
        [&](double t) -> VectorXd {
            VectorXd zd(2);
            zd << -std::sin(t), std::cos(t);
            return alpha(circle_point(t)) * zd;
        },
        0.0, T, 1e-13);
    CHECK((increment(out, 0.0, T).level1 - quad).norm() < 1e-9);
}

TEST_CASE("non-Cauchy refinements raise a divergence error naming the pair") {
    std::vector<double> g = uniform_grid(0.0, 1.0, 4);
    MatrixXd spoil = MatrixXd::Ones(2, 2);
    auto cand = [&](double s, double t) -> T2Element {
        // sub-additive level-2 garbage: refinement products grow without bound
        return {VectorXd::Zero(2), 0.05 * std::pow(t - s, 0.55) * spoil};
    };
    CHECK_THROWS_AS(sew(cand, g, VectorXd::Zero(2), 2.1), NumericError);
    try {
        sew(cand, g, VectorXd::Zero(2), 2.1);
    } catch (const NumericError& e) {
        CHECK(e.where_t > e.where_s); // names a concrete interval
        CHECK(e.where_t - e.where_s == doctest::Approx(0.25));
    }
}
