#ifndef ROUGHMANIFOLD_SKEW_HPP
#define ROUGHMANIFOLD_SKEW_HPP

#include <Eigen/Dense>

namespace roughmanifold {

/// Fixed basis of so(d): E_{ij} with (E)_{ij} = 1, (E)_{ji} = -1, ordered by
/// the upper triangle (0,1),(0,2),...,(1,2),... Row-major over i < j.
inline int skew_dim(int d) { return d * (d - 1) / 2; }

inline Eigen::MatrixXd vec_to_skew(const Eigen::VectorXd& a, int d) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    int k = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j, ++k) {
            A(i, j) = a(k);
            A(j, i) = -a(k);
        }
    return A;
}

inline Eigen::VectorXd skew_to_vec(const Eigen::MatrixXd& A) {
    int d = static_cast<int>(A.rows());
    Eigen::VectorXd a(skew_dim(d));
    int k = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j, ++k) a(k) = A(i, j);
    return a;
}

/// Column-major matrix flattening (Eigen default layout).
inline Eigen::VectorXd mat_to_vec(const Eigen::MatrixXd& M) {
    return Eigen::Map<const Eigen::VectorXd>(M.data(), M.size());
}

inline Eigen::MatrixXd vec_to_mat(const Eigen::VectorXd& v, Eigen::Index rows,
                                  Eigen::Index cols) {
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

} // namespace roughmanifold

#endif
