#ifndef ROUGHMANIFOLD_SEWING_HPP
#define ROUGHMANIFOLD_SEWING_HPP

#include <functional>
#include <optional>
#include <vector>

#include "roughmanifold/grid_rough_path.hpp"

namespace roughmanifold {

struct SewOptions {
    double cauchy_tol = 1e-13;
    int max_rounds = 20;
    bool check_almost = false; // run a multiplicativity pre-check on the input
};

struct SewStats {
    int max_depth = 0;
    double worst_residual = 0.0; // last refinement change of the worst cell
    double worst_s = 0.0, worst_t = 0.0;
};

/// Candidate increment for the dyadic piece
/// [t_cell + idx*h/2^depth, t_cell + (idx+1)*h/2^depth] of the base cell.
using CellCandidate =
    std::function<T2Element(std::size_t cell, int depth, std::size_t idx)>;

/// Sewing on a finite grid: each base-cell increment is replaced by the
/// product of its dyadic children, bisecting until successive refinement
/// levels differ by less than the Cauchy tolerance (or the round cap).
/// Refinement changes that stop contracting raise a NumericError naming the
/// worst cell. When pinned_values is supplied the trace is written directly
/// from it and only level 2 is sewn.
GridRoughPath sew_cells(const CellCandidate& candidate,
                        const std::vector<double>& grid,
                        const Eigen::VectorXd& x0, double p,
                        const SewOptions& opts = {}, SewStats* stats = nullptr,
                        const Eigen::MatrixXd* pinned_values = nullptr);

/// Per-pair candidate interface (evaluated at dyadic subdivision points).
GridRoughPath sew(const std::function<T2Element(double, double)>& candidate,
                  const std::vector<double>& grid, const Eigen::VectorXd& x0,
                  double p, const SewOptions& opts = {},
                  SewStats* stats = nullptr);

/// Read-only dyadic refinement view of a grid rough path: trace values are
/// interpolated linearly inside cells and level-2 pieces follow the exact
/// Chen-consistent split. Piece values at a given depth are cached per cell.
class DyadicDriverView {
public:
    explicit DyadicDriverView(const GridRoughPath& Z);

    const GridRoughPath& path() const { return Z_; }
    double time(std::size_t cell, int depth, std::size_t idx) const;
    Eigen::VectorXd value(std::size_t cell, int depth, std::size_t idx) const;
    Eigen::VectorXd trace_inc(std::size_t cell, int depth) const;
    const Eigen::MatrixXd& piece2(std::size_t cell, int depth) const;
    T2Element piece(std::size_t cell, int depth, std::size_t idx) const;

private:
    const GridRoughPath& Z_;
    mutable std::vector<std::vector<Eigen::MatrixXd>> cache2_;
};

} // namespace roughmanifold

#endif
