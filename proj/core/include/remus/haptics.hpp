#pragma once

#include "remus/phantom.hpp"
#include "remus/spatial.hpp"

namespace remus {

// Proxy-point state of the virtual fixture. The proxy is tethered to
// the device tip but never allowed inside the constraint mesh; in free
// space proxy == tip.
struct ProxyState {
  Vec3 proxy = Vec3::Zero();
  Vec3 tip = Vec3::Zero();
  bool in_contact = false;
};

struct FixtureParams {
  double stiffness = 1200.0;  // N/m
  double damping = 10.0;      // N*s/m
};

// Advances the proxy for a new tip position. Outside the mesh the proxy
// snaps to the tip; inside, it slides along the surface toward the
// local closest point via a few projection iterations.
ProxyState update_proxy(const ProxyState& state, const Vec3& new_tip, const TriangleMesh& mesh);

// Spring-damper tether force on the device, along (proxy - tip),
// clamped so it never pulls the tip toward the surface.
Vec3 fixture_force(const ProxyState& state, const Vec3& tip_velocity, const FixtureParams& params);

}  // namespace remus
