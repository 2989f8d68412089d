#include "roughmanifold/manifold_pushforward.hpp"

namespace roughmanifold {

ManifoldRoughPath pushforward_manifold(const SmoothMap& phi,
                                       const ManifoldRoughPath& X,
                                       ManifoldPtr target,
                                       const IntegrateOptions& opts) {
    X.require_membership();
    IntegrateOptions o = opts;
    o.check_driver = false; // membership already implies weak geometricity here
    GridRoughPath pushed = pushforward_flat(phi, X.path(), o);
    return ManifoldRoughPath(std::move(pushed), std::move(target));
}

} // namespace roughmanifold
