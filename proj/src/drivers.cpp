#include "roughmanifold/drivers.hpp"

#include <cmath>

#include "roughmanifold/errors.hpp"
#include "roughmanifold/skew.hpp"

namespace roughmanifold {

Eigen::MatrixXd SmoothCurve::sample(const std::vector<double>& times) const {
    Eigen::MatrixXd out(dim, times.size());
    for (std::size_t k = 0; k < times.size(); ++k) out.col(k) = value(times[k]);
    return out;
}

GridRoughPath SmoothCurve::lift(double t0, double t1, std::size_t n_steps,
                                double p) const {
    std::vector<double> g = uniform_grid(t0, t1, n_steps);
    return signature_lift(g, sample(g), p);
}

SmoothCurve circle_curve(double radius, double turns, double T) {
    SmoothCurve c;
    c.dim = 2;
    double rate = 2.0 * M_PI * turns / T;
    c.value = [radius, rate](double t) {
        Eigen::VectorXd x(2);
        x << radius * std::cos(rate * t), radius * std::sin(rate * t);
        return x;
    };
    c.velocity = [radius, rate](double t) {
        Eigen::VectorXd x(2);
        x << -radius * rate * std::sin(rate * t), radius * rate * std::cos(rate * t);
        return x;
    };
    return c;
}

SmoothCurve lissajous_curve(double A, double B, double a, double b, double phase) {
    SmoothCurve c;
    c.dim = 2;
    c.value = [=](double t) {
        Eigen::VectorXd x(2);
        x << A * std::sin(a * t + phase), B * std::sin(b * t);
        return x;
    };
    c.velocity = [=](double t) {
        Eigen::VectorXd x(2);
        x << A * a * std::cos(a * t + phase), B * b * std::cos(b * t);
        return x;
    };
    return c;
}

SmoothCurve line_curve(const Eigen::VectorXd& v) {
    SmoothCurve c;
    c.dim = static_cast<int>(v.size());
    c.value = [v](double t) -> Eigen::VectorXd { return t * v; };
    c.velocity = [v](double) -> Eigen::VectorXd { return v; };
    return c;
}

SmoothCurve great_circle_curve(const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& v0, double speed) {
    Eigen::VectorXd e0 = x0 / x0.norm();
    Eigen::VectorXd w = v0 - e0 * e0.dot(v0);
    if (w.norm() < 1e-12)
        throw UsageError("great_circle_curve: velocity is normal to the sphere");
    Eigen::VectorXd e1 = w / w.norm();
    SmoothCurve c;
    c.dim = static_cast<int>(x0.size());
    c.value = [e0, e1, speed](double t) -> Eigen::VectorXd {
        return std::cos(speed * t) * e0 + std::sin(speed * t) * e1;
    };
    c.velocity = [e0, e1, speed](double t) -> Eigen::VectorXd {
        return speed * (-std::sin(speed * t) * e0 + std::cos(speed * t) * e1);
    };
    return c;
}

SmoothCurve latitude_circle_curve(double colatitude, double turns) {
    SmoothCurve c;
    c.dim = 3;
    double st = std::sin(colatitude), ct = std::cos(colatitude);
    (void)turns; // the caller chooses the time horizon [0, 2 pi turns]
    c.value = [st, ct](double t) {
        Eigen::VectorXd x(3);
        x << st * std::cos(t), st * std::sin(t), ct;
        return x;
    };
    c.velocity = [st](double t) {
        Eigen::VectorXd x(3);
        x << -st * std::sin(t), st * std::cos(t), 0.0;
        return x;
    };
    return c;
}

namespace {

// splitmix64: stable scalar RNG across toolchains
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return (splitmix64(state) >> 11) * 0x1.0p-53;
}

double gaussian(std::uint64_t& state) {
    double u1 = uniform01(state), u2 = uniform01(state);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace

GridRoughPath brownian_lift(std::uint64_t seed, int dim, std::size_t n_steps,
                            double T, double p, double volatility) {
    std::uint64_t state = seed * 0x2545f4914f6cdd1dULL + 0x9e3779b97f4a7c15ULL;
    std::vector<double> g = uniform_grid(0.0, T, n_steps);
    Eigen::MatrixXd x(dim, n_steps + 1);
    x.col(0).setZero();
    double sdt = volatility * std::sqrt(T / static_cast<double>(n_steps));
    for (std::size_t k = 0; k < n_steps; ++k)
        for (int i = 0; i < dim; ++i)
            x(i, k + 1) = x(i, k) + sdt * gaussian(state);
    return signature_lift(g, x, p);
}

GridRoughPath brownian_so_lift(std::uint64_t seed, int n, std::size_t n_steps,
                               double T, double p, double volatility) {
    return brownian_lift(seed ^ 0xabcdef1234567890ULL, skew_dim(n), n_steps, T, p,
                         volatility);
}

} // namespace roughmanifold
