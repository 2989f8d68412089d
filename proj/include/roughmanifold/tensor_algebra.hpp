#ifndef ROUGHMANIFOLD_TENSOR_ALGEBRA_HPP
#define ROUGHMANIFOLD_TENSOR_ALGEBRA_HPP

#include <Eigen/Dense>

#include "roughmanifold/errors.hpp"

namespace roughmanifold {

/// Element 1 + x + X of the step-2 truncated tensor algebra over R^N.
/// The scalar part is fixed to 1; level2(i,j) is the e_i (x) e_j component.
struct T2Element {
    Eigen::VectorXd level1;
    Eigen::MatrixXd level2;

    T2Element() = default;
    T2Element(Eigen::VectorXd x, Eigen::MatrixXd xx)
        : level1(std::move(x)), level2(std::move(xx)) {}

    Eigen::Index dim() const { return level1.size(); }

    Eigen::MatrixXd sym() const { return 0.5 * (level2 + level2.transpose()); }
    Eigen::MatrixXd antisym() const { return 0.5 * (level2 - level2.transpose()); }
};

inline T2Element t2_unit(Eigen::Index dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
}

/// Product (1+x+X)(1+y+Y) = 1 + (x+y) + (X + x(x)y + Y).
inline T2Element t2_mul(const T2Element& a, const T2Element& b) {
    if (a.dim() != b.dim()) throw DomainError("t2_mul: dimension mismatch");
    return {a.level1 + b.level1,
            a.level2 + b.level2 + a.level1 * b.level1.transpose()};
}

/// Group inverse: (1+x+X)^{-1} = 1 - x + (x(x)x - X).
inline T2Element t2_inverse(const T2Element& a) {
    return {-a.level1, a.level1 * a.level1.transpose() - a.level2};
}

inline T2Element& t2_mul_inplace(T2Element& a, const T2Element& b) {
    if (a.dim() != b.dim()) throw DomainError("t2_mul: dimension mismatch");
    a.level2.noalias() += a.level1 * b.level1.transpose();
    a.level2 += b.level2;
    a.level1 += b.level1;
    return a;
}

/// Entrywise max norm used for raw defect magnitudes throughout.
inline double entry_norm(const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}
inline double entry_norm(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Size of a T2 difference used for sewing Cauchy checks.
inline double t2_dist(const T2Element& a, const T2Element& b) {
    return (a.level1 - b.level1).norm() + (a.level2 - b.level2).norm();
}

} // namespace roughmanifold

#endif
