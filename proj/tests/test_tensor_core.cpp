#include <doctest.h>

#include "roughmanifold/grid_rough_path.hpp"
#include "roughmanifold/sewing.hpp"
#include "test_util.hpp"

using namespace roughmanifold;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

GridRoughPath two_segment_path() {
    std::vector<double> g{0.0, 1.0, 2.0};
    MatrixXd x(2, 3);
    x.col(0) << 0, 0;
    x.col(1) << 1, 0; // e1
    x.col(2) << 1, 1; // e1 + e2
    return signature_lift(g, x);
}

} // namespace

TEST_CASE("t2_mul matches the truncated tensor product") {
    VectorXd e1 = VectorXd::Unit(3, 0), e2 = VectorXd::Unit(3, 1);
    T2Element a{e1, MatrixXd::Zero(3, 3)};
    T2Element b{e2, MatrixXd::Zero(3, 3)};

    SUBCASE("unit element is neutral") {
        T2Element arb{e1 + 2.0 * e2, MatrixXd::Random(3, 3)};
        T2Element prod = t2_mul(t2_unit(3), arb);
        CHECK((prod.level1 - arb.level1).norm() == 0.0);
        CHECK((prod.level2 - arb.level2).norm() == 0.0);
    }
    SUBCASE("cross term is x (x) y") {
        T2Element prod = t2_mul(a, b);
        CHECK((prod.level1 - (e1 + e2)).norm() == 0.0);
        CHECK((prod.level2 - e1 * e2.transpose()).norm() == 0.0);
    }
    SUBCASE("associativity on random triples") {
        testutil::Rng rng(17);
        for (int trial = 0; trial < 10; ++trial) {
            T2Element u{rng.vector(3), rng.matrix(3, 3)};
            T2Element v{rng.vector(3), rng.matrix(3, 3)};
            T2Element w{rng.vector(3), rng.matrix(3, 3)};
            T2Element lhs = t2_mul(t2_mul(u, v), w);
            T2Element rhs = t2_mul(u, t2_mul(v, w));
            CHECK((lhs.level1 - rhs.level1).norm() < 1e-14);
            CHECK((lhs.level2 - rhs.level2).norm() < 1e-14);
        }
    }
    SUBCASE("inverse") {
        T2Element u{e1 + e2, MatrixXd::Random(3, 3)};
        T2Element prod = t2_mul(u, t2_inverse(u));
        CHECK(prod.level1.norm() < 1e-15);
        CHECK(prod.level2.norm() < 1e-15);
    }
    SUBCASE("dimension mismatch rejected") {
        T2Element bad{VectorXd::Zero(2), MatrixXd::Zero(2, 2)};
        CHECK_THROWS_AS(t2_mul(a, bad), DomainError);
    }
}

TEST_CASE("increment folds steps and satisfies Chen exactly") {
    testutil::Rng rng(3);
    std::vector<double> g = uniform_grid(0.0, 1.0, 7);
    MatrixXd x = rng.matrix(3, 8);
    std::vector<MatrixXd> step2;
    for (int k = 0; k < 7; ++k) step2.push_back(rng.matrix(3, 3));
    GridRoughPath X = make_grid_rough_path(g, x, step2);

    SUBCASE("diagonal is the unit") {
        T2Element d = increment(X, g[4], g[4]);
        CHECK(d.level1.norm() == 0.0);
        CHECK(d.level2.norm() == 0.0);
    }
    SUBCASE("two adjacent steps multiply") {
        T2Element ab = increment(X, g[2], g[4]);
        T2Element manual = t2_mul(X.step(2), X.step(3));
        CHECK((ab.level1 - manual.level1).norm() == 0.0);
        CHECK((ab.level2 - manual.level2).norm() < 1e-15);
    }
    SUBCASE("full span equals the left-to-right fold oracle") {
        T2Element whole = increment(X, g.front(), g.back());
        T2Element fold = t2_unit(3);
        for (int k = 0; k < 7; ++k) fold = t2_mul(fold, X.step(k));
        CHECK((whole.level1 - fold.level1).norm() < 1e-14);
        CHECK((whole.level2 - fold.level2).norm() < 1e-14);
    }
    SUBCASE("multiplicativity at an intermediate time") {
        T2Element whole = increment(X, g[1], g[6]);
        T2Element prod = t2_mul(increment(X, g[1], g[3]), increment(X, g[3], g[6]));
        CHECK((whole.level1 - prod.level1).norm() < 1e-14);
        CHECK((whole.level2 - prod.level2).norm() < 1e-14);
    }
    SUBCASE("off-grid time rejected") {
        CHECK_THROWS_AS(increment(X, 0.05, 0.5), DomainError);
    }
    SUBCASE("prefix increments agree with direct folds") {
        PrefixIncrements pre(X);
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = i; j < 8; ++j) {
                T2Element direct = increment(X, g[i], g[j]);
                CHECK((pre.level1_between(i, j) - direct.level1).norm() < 1e-13);
                CHECK((pre.level2_between(i, j) - direct.level2).norm() < 1e-13);
            }
    }
}

TEST_CASE("signature_lift of piecewise-linear paths") {
    SUBCASE("single linear segment gives level 2 = 1/2 v (x) v") {
        VectorXd v(2);
        v << 0.3, -1.2;
        std::vector<double> g{0.0, 1.0};
        MatrixXd x(2, 2);
        x.col(0).setZero();
        x.col(1) = v;
        GridRoughPath X = signature_lift(g, x);
        CHECK((X.step2[0] - 0.5 * v * v.transpose()).norm() == 0.0);
    }
    SUBCASE("constant path lifts to zero") {
        std::vector<double> g{0.0, 0.5, 1.0};
        MatrixXd x = MatrixXd::Ones(3, 3);
        GridRoughPath X = signature_lift(g, x);
        CHECK(increment(X, 0.0, 1.0).level2.norm() == 0.0);
    }
    SUBCASE("two segments reproduce the Chen fold oracle") {
        GridRoughPath X = two_segment_path();
        VectorXd e1 = VectorXd::Unit(2, 0), e2 = VectorXd::Unit(2, 1);
        MatrixXd expected = 0.5 * e1 * e1.transpose() +
                            0.5 * e2 * e2.transpose() + e1 * e2.transpose();
        CHECK((increment(X, 0.0, 2.0).level2 - expected).norm() < 1e-15);
    }
    SUBCASE("refining a linear segment is invisible") {
        VectorXd v(3);
        v << 1.0, -0.5, 0.25;
        for (std::size_t parts : {2ul, 5ul, 16ul}) {
            std::vector<double> g = uniform_grid(0.0, 1.0, parts);
            MatrixXd x(3, parts + 1);
            for (std::size_t k = 0; k <= parts; ++k) x.col(k) = g[k] * v;
            GridRoughPath X = signature_lift(g, x);
            T2Element whole = increment(X, 0.0, 1.0);
            CHECK((whole.level1 - v).norm() < 1e-13);
            CHECK((whole.level2 - 0.5 * v * v.transpose()).norm() < 1e-13);
        }
    }
    SUBCASE("fewer than 2 samples rejected") {
        std::vector<double> g{0.0};
        CHECK_THROWS_AS(signature_lift(g, MatrixXd::Zero(2, 1)), DomainError);
    }
}

TEST_CASE("pure_area_path") {
    VectorXd e1 = VectorXd::Unit(3, 0), e2 = VectorXd::Unit(3, 1);
    std::vector<double> g = uniform_grid(0.0, 1.0, 8);

    SUBCASE("v = w collapses to the zero rough path") {
        GridRoughPath X = pure_area_path(e1, e1, g);
        CHECK(increment(X, 0.0, 1.0).level2.norm() == 0.0);
    }
    SUBCASE("unit pair gives the commutator area") {
        GridRoughPath X = pure_area_path(e1, e2, g);
        MatrixXd expected = e1 * e2.transpose() - e2 * e1.transpose();
        CHECK((increment(X, 0.0, 1.0).level2 - expected).norm() < 1e-15);
        CHECK(X.values.norm() == 0.0);
    }
    SUBCASE("additivity of t-s under the fold oracle") {
        GridRoughPath X = pure_area_path(e1, e2, g);
        DefectReport chen = chen_defect(X);
        CHECK(chen.max_raw <= 1e-15);
    }
    SUBCASE("weak geometricity holds exactly") {
        GridRoughPath X = pure_area_path(e1, e2, g);
        CHECK(weak_geometricity_defect(X).max_raw == 0.0);
    }
}

TEST_CASE("chen_defect") {
    GridRoughPath X = two_segment_path();

    SUBCASE("signature output is exact up to roundoff") {
        std::vector<double> g = uniform_grid(0.0, 1.0, 64);
        MatrixXd x(2, 65);
        for (int k = 0; k <= 64; ++k) {
            x(0, k) = std::sin(g[k]);
            x(1, k) = std::cos(2.0 * g[k]);
        }
        CHECK(chen_defect(signature_lift(g, x)).max_raw <= 1e-13);
    }
    SUBCASE("single interval is vacuously exact") {
        std::vector<double> g{0.0, 1.0};
        MatrixXd x(2, 2);
        x.col(0).setZero();
        x.col(1) << 1, 2;
        CHECK(chen_defect(signature_lift(g, x)).max_raw == 0.0);
    }
    SUBCASE("a level-2 perturbation on one interval shows up linearly") {
        const double eps = 1e-4;
        PrefixIncrements pre(X);
        // candidate = true increments except one single-interval value
        auto cand = [&](double s, double t) -> T2Element {
            std::size_t i = X.index_of(s), j = X.index_of(t);
            T2Element out = pre.between(i, j);
            if (i == 0 && j == 1) out.level2 += eps * MatrixXd::Identity(2, 2);
            return out;
        };
        DefectReport rep = chen_defect(cand, X.times, X.p, X.control);
        CHECK(rep.max_raw == doctest::Approx(eps).epsilon(1e-10));
    }
}

TEST_CASE("weak_geometricity_defect") {
    SUBCASE("signatures pass to roundoff") {
        GridRoughPath X = two_segment_path();
        CHECK(weak_geometricity_defect(X).max_raw <= 1e-13);
    }
    SUBCASE("a symmetric bump is reported at its entry size on every pair") {
        GridRoughPath X = two_segment_path();
        for (auto& s : X.step2) s += MatrixXd::Identity(2, 2);
        DefectReport rep = weak_geometricity_defect(X);
        // defect = |I| (entrywise) on single steps, larger on folded pairs
        CHECK(rep.max_raw >= 1.0 - 1e-12);
        GridRoughPath Y = two_segment_path();
        Y.step2[0] += MatrixXd::Identity(2, 2);
        Y.step2[1] += MatrixXd::Identity(2, 2);
        // restriction to one step sees exactly the bump
        Eigen::MatrixXd sym = 0.5 * (Y.step2[0] + Y.step2[0].transpose());
        VectorXd dx = Y.values.col(1) - Y.values.col(0);
        CHECK(entry_norm(Eigen::MatrixXd(sym - 0.5 * dx * dx.transpose())) ==
              doctest::Approx(1.0));
    }
}

TEST_CASE("rough_distance is a homogeneous metric on a fixed grid") {
    GridRoughPath X = two_segment_path();

    SUBCASE("identity of indiscernibles") {
        CHECK(rough_distance(X, X) == 0.0);
    }
    SUBCASE("constant trace shifts are invisible") {
        GridRoughPath Y = X;
        Y.values.array() += 3.25;
        CHECK(rough_distance(X, Y) == 0.0);
    }
    SUBCASE("a single level-2 bump is scored by the exhaustive sup oracle") {
        const double eps = 1e-3;
        GridRoughPath Y = X;
        Y.step2[0](0, 1) += eps;
        double expected = 0.0;
        PrefixIncrements px(X), py(Y);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i + 1; j < 3; ++j) {
                double w = X.control(X.times[i], X.times[j]);
                double d = (px.level2_between(i, j) - py.level2_between(i, j)).norm();
                expected = std::max(expected, d / std::pow(w, 2.0 / X.p));
            }
        CHECK(rough_distance(X, Y) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("symmetry and the triangle inequality on random triples") {
        testutil::Rng rng(11);
        std::vector<double> g = uniform_grid(0.0, 1.0, 6);
        auto random_path = [&]() {
            MatrixXd x = rng.matrix(2, 7);
            std::vector<MatrixXd> s2;
            for (int k = 0; k < 6; ++k) s2.push_back(rng.matrix(2, 2));
            return make_grid_rough_path(g, x, s2);
        };
        Control w = Control::uniform(1.0, 0.0, 1.0);
        for (int trial = 0; trial < 5; ++trial) {
            GridRoughPath A = random_path(), B = random_path(), C = random_path();
            double ab = rough_distance(A, B, w), ba = rough_distance(B, A, w);
            CHECK(ab == ba);
            CHECK(ab <= rough_distance(A, C, w) + rough_distance(C, B, w) + 1e-12);
        }
    }
    SUBCASE("grid mismatch rejected") {
        GridRoughPath Y = two_segment_path();
        Y.times[1] = 0.75;
        CHECK_THROWS_AS(rough_distance(X, Y), DomainError);
    }
}

TEST_CASE("controls") {
    SUBCASE("uniform control is superadditive with zero diagonal") {
        Control w = Control::uniform(2.0, 0.0, 1.0);
        CHECK(w(0.3, 0.3) == 0.0);
        CHECK(w(0.1, 0.4) + w(0.4, 0.9) <= w(0.1, 0.9) + 1e-15);
    }
    SUBCASE("empirical p-variation control is superadditive on all triples") {
        testutil::Rng rng(5);
        std::vector<double> g = uniform_grid(0.0, 1.0, 48);
        MatrixXd x(2, 49);
        x.col(0).setZero();
        for (int k = 0; k < 48; ++k) x.col(k + 1) = x.col(k) + 0.1 * rng.vector(2);
        Control w = Control::empirical(g, x, 2.1);
        for (std::size_t i = 0; i < 49; i += 3)
            for (std::size_t u = i + 1; u < 49; u += 3)
                for (std::size_t j = u + 1; j < 49; j += 3)
                    CHECK(w(g[i], g[u]) + w(g[u], g[j]) <= w(g[i], g[j]) + 1e-12);
        CHECK(w(g[7], g[7]) == 0.0);
    }
}

TEST_CASE("concatenate") {
    GridRoughPath X = two_segment_path();

    SUBCASE("single piece is the identity") {
        GridRoughPath Y = concatenate({X}, X.values.col(0));
        CHECK(rough_distance(X, Y) == 0.0);
    }
    SUBCASE("self-concatenation satisfies Chen across the join") {
        GridRoughPath shifted = X;
        for (auto& t : shifted.times) t += 2.0;
        shifted.values.col(0) = X.values.col(2); // start where X ends
        shifted.values.col(1) = shifted.values.col(0) + (X.values.col(1) - X.values.col(0));
        shifted.values.col(2) = shifted.values.col(1) + (X.values.col(2) - X.values.col(1));
        GridRoughPath glued = concatenate({X, shifted}, X.values.col(0));
        CHECK(chen_defect(glued).max_raw <= 1e-14);
        // cross-boundary increment equals the tensor product of the pieces
        T2Element cross = increment(glued, 1.0, 3.0);
        T2Element manual = t2_mul(increment(X, 1.0, 2.0), increment(X, 0.0, 1.0));
        CHECK((cross.level1 - manual.level1).norm() < 1e-14);
        CHECK((cross.level2 - manual.level2).norm() < 1e-14);
    }
    SUBCASE("two linear segments equal the two-segment signature") {
        std::vector<double> ga{0.0, 1.0}, gb{1.0, 2.0};
        MatrixXd xa(2, 2), xb(2, 2);
        xa.col(0) << 0, 0;
        xa.col(1) << 1, 0;
        xb.col(0) << 1, 0;
        xb.col(1) << 1, 1;
        GridRoughPath glued = concatenate(
            {signature_lift(ga, xa), signature_lift(gb, xb)}, xa.col(0));
        CHECK(rough_distance(glued, two_segment_path(),
                             Control::uniform(1.0, 0.0, 2.0)) < 1e-15);
    }
    SUBCASE("endpoint mismatch rejected") {
        GridRoughPath bad = X;
        for (auto& t : bad.times) t += 2.0;
        bad.values.array() += 0.5; // breaks the trace match at the join
        CHECK_THROWS_AS(concatenate({X, bad}, X.values.col(0)), DomainError);
    }
}

TEST_CASE("dyadic refinement is exact for lifts and areas") {
    SUBCASE("piecewise-linear signature") {
        GridRoughPath X = two_segment_path();
        GridRoughPath R = refine_dyadic(X);
        CHECK(R.num_steps() == 4);
        // the refined path is the signature of the same PL path resampled
        std::vector<double> g = uniform_grid(0.0, 2.0, 4);
        MatrixXd x(2, 5);
        for (int k = 0; k <= 4; ++k) {
            double t = g[k];
            x(0, k) = std::min(t, 1.0);
            x(1, k) = std::max(t - 1.0, 0.0);
        }
        CHECK(rough_distance(R, signature_lift(g, x),
                             Control::uniform(1.0, 0.0, 2.0)) < 1e-15);
    }
    SUBCASE("pure area splits its area evenly") {
        VectorXd e1 = VectorXd::Unit(2, 0), e2 = VectorXd::Unit(2, 1);
        GridRoughPath X = pure_area_path(e1, e2, uniform_grid(0.0, 1.0, 4));
        GridRoughPath R = refine_dyadic(X);
        GridRoughPath expected = pure_area_path(e1, e2, uniform_grid(0.0, 1.0, 8));
        CHECK(rough_distance(R, expected, Control::uniform(1.0, 0.0, 1.0)) < 1e-15);
    }
    SUBCASE("restriction undoes refinement") {
        GridRoughPath X = two_segment_path();
        GridRoughPath back = restrict_to_times(refine_dyadic(X), X.times);
        CHECK(rough_distance(X, back) < 1e-14);
    }
}
