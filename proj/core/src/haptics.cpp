#include "remus/haptics.hpp"

#include <algorithm>
#include <cmath>

namespace remus {

namespace {
constexpr int kProjectionIters = 3;
constexpr double kPenetrationTol = 1e-6;  // m
}  // namespace

ProxyState update_proxy(const ProxyState& state, const Vec3& new_tip, const TriangleMesh& mesh) {
  ProxyState next;
  next.tip = new_tip;

  const SurfaceHit tip_hit = closest_surface_point(mesh, new_tip);
  if (tip_hit.signed_distance >= 0.0) {
    next.proxy = new_tip;
    next.in_contact = false;
    return next;
  }

  // Seed from the previous proxy when it was already constrained so the
  // proxy slides along the surface instead of jumping through it.
  Vec3 proxy = state.in_contact ? state.proxy : tip_hit.point;
  for (int i = 0; i < kProjectionIters; ++i) {
    const SurfaceHit at_proxy = closest_surface_point(mesh, proxy);
    // Pull the tip onto the tangent plane at the proxy's surface point,
    // then re-project onto the mesh.
    const Vec3 goal = new_tip - at_proxy.normal * (new_tip - at_proxy.point).dot(at_proxy.normal);
    const SurfaceHit projected = closest_surface_point(mesh, goal);
    proxy = projected.signed_distance < 0.0 ? projected.point : goal;
  }
  // Final cleanup: the proxy must not rest measurably inside the mesh.
  const SurfaceHit final_hit = closest_surface_point(mesh, proxy);
  if (final_hit.signed_distance < -kPenetrationTol) {
    proxy = final_hit.point;
  }
  next.proxy = proxy;
  next.in_contact = true;
  return next;
}

Vec3 fixture_force(const ProxyState& state, const Vec3& tip_velocity, const FixtureParams& params) {
  if (!state.in_contact) return Vec3::Zero();
  const Vec3 offset = state.proxy - state.tip;
  const double depth = offset.norm();
  if (depth < 1e-12) return Vec3::Zero();
  const Vec3 dir = offset / depth;
  const double magnitude = params.stiffness * depth - params.damping * tip_velocity.dot(dir);
  return std::max(magnitude, 0.0) * dir;
}

}  // namespace remus
