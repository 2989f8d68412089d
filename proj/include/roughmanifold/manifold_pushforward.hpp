#ifndef ROUGHMANIFOLD_MANIFOLD_PUSHFORWARD_HPP
#define ROUGHMANIFOLD_MANIFOLD_PUSHFORWARD_HPP

#include "roughmanifold/manifold_path.hpp"
#include "roughmanifold/one_form.hpp"

namespace roughmanifold {

/// Push-forward of a manifold rough path by a smooth map phi: M -> N given
/// through an ambient extension. The trace is written directly as phi(x_t)
/// and level 2 is sewn (exact for linear maps).
ManifoldRoughPath pushforward_manifold(const SmoothMap& phi,
                                       const ManifoldRoughPath& X,
                                       ManifoldPtr target,
                                       const IntegrateOptions& opts = {});

} // namespace roughmanifold

#endif
