#ifndef ROUGHMANIFOLD_MANIFOLD_INTEGRAL_HPP
#define ROUGHMANIFOLD_MANIFOLD_INTEGRAL_HPP

#include "roughmanifold/manifold_forms.hpp"
#include "roughmanifold/manifold_path.hpp"

namespace roughmanifold {

/// Extension-free rough integral of a one form on M along X: local model
///   level 1 ~ alpha(P x_{s,t}) + (nabla alpha)([P(x)P] X_{s,t})
///   level 2 ~ (alpha (x) alpha) X_{s,t}
/// with alpha represented by its P-composed ambient matrix, sewn to an exact
/// Chen path started at 0. The covariant-derivative tensor is frozen at each
/// cell's left endpoint (a remainder-level approximation).
GridRoughPath integrate_manifold_one_form(const ManifoldOneForm& alpha,
                                          const ManifoldRoughPath& X,
                                          const IntegrateOptions& opts = {});

} // namespace roughmanifold

#endif
