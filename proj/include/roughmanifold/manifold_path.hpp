#ifndef ROUGHMANIFOLD_MANIFOLD_PATH_HPP
#define ROUGHMANIFOLD_MANIFOLD_PATH_HPP

#include <optional>

#include "roughmanifold/grid_rough_path.hpp"
#include "roughmanifold/manifold.hpp"

namespace roughmanifold {

/// Membership diagnostics of an ambient rough path against M: remainder
/// constants for (I (x) Q) X, the flipped (Q (x) I) X, and the symmetric-part
/// defect (which holds automatically for weakly geometric paths with trace
/// on M).
struct MembershipReport {
    DefectReport iq;
    DefectReport qi;
    DefectReport sym;
    double trace_distance = 0.0;
    double worst_trace_time = 0.0;

    bool passed() const { return iq.passed() && qi.passed() && sym.passed(); }
    std::string summary() const;
};

MembershipReport membership_defect(const GridRoughPath& X,
                                   const EmbeddedManifold& M,
                                   double trace_tol = 1e-6);

/// A weakly geometric rough path on M: ambient data plus the manifold
/// reference; the membership report is computed on first use.
class ManifoldRoughPath {
public:
    ManifoldRoughPath() = default;
    ManifoldRoughPath(GridRoughPath path, ManifoldPtr manifold)
        : path_(std::move(path)), M_(std::move(manifold)) {}

    const GridRoughPath& path() const { return path_; }
    GridRoughPath& path() { return path_; }
    const ManifoldPtr& manifold() const { return M_; }

    const MembershipReport& membership() const;
    void require_membership() const;

private:
    GridRoughPath path_;
    ManifoldPtr M_;
    mutable std::optional<MembershipReport> membership_;
};

/// Constraint that the normal component of the trace increment is determined
/// by the tangential data: Q x_{s,t} vs Q (d_{P a} P b)|_{a(x)b = X_{s,t}},
/// plus the trace-only version against -1/2 A F''[P x (x) P x].
struct QxConstraintReport {
    DefectReport level2_form; // defect against the dP-contraction of X
    DefectReport trace_form;  // defect against the F''-quadratic in P x_{s,t}
    bool passed() const { return level2_form.passed() && trace_form.passed(); }
};

QxConstraintReport qx_constraint_check(const ManifoldRoughPath& X);

} // namespace roughmanifold

#endif
