#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "remus/spatial.hpp"

namespace remus {

// Indexed triangle mesh with per-triangle outward normals. Meshes used
// as contact geometry must be watertight with positive signed volume.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<uint32_t, 3>> triangles;
  std::vector<Vec3> normals;  // unit, outward, one per triangle

  void recompute_normals();
  double signed_volume() const;
  bool is_watertight() const;
  double min_triangle_area() const;
  bool is_valid() const;
};

TriangleMesh make_box(const Vec3& min_corner, const Vec3& max_corner);
TriangleMesh make_uv_sphere(const Vec3& center, double radius, int rings, int segments);

// Nearest point on the mesh surface. signed_distance is negative when
// the query point is inside (sign from the generalized winding number,
// so it is robust on watertight meshes). normal points outward through
// the nearest surface point.
struct SurfaceHit {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double signed_distance = 0.0;
};

SurfaceHit closest_surface_point(const TriangleMesh& mesh, const Vec3& p);

// Closest point on one triangle; exposed for the exhaustive oracles.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

double winding_number(const TriangleMesh& mesh, const Vec3& p);

enum class VesselLabel : uint8_t { Large = 0, Branch = 1 };

// Vessel centerline with per-vertex radius. Radii are in millimeters,
// centerline points in meters.
struct VesselSpec {
  std::vector<Vec3> centerline;
  std::vector<double> radius_mm;
  VesselLabel label = VesselLabel::Large;

  // Closest point on the polyline plus the local tangent and radius.
  struct CenterlineHit {
    Vec3 point = Vec3::Zero();
    Vec3 tangent = Vec3::UnitX();
    double radius_m = 0.0;
    double distance = 0.0;
  };
  CenterlineHit closest_point(const Vec3& p) const;

  double min_x() const;
  double max_x() const;
};

// Normal spring-damper impedance of the phantom material.
struct ContactModel {
  double stiffness = 1200.0;  // N/m
  double damping = 10.0;      // N*s/m
};

struct PhantomScene {
  TriangleMesh mesh;
  std::vector<VesselSpec> vessels;  // [0] large, [1] branch
  ContactModel contact;
  double sweep_marker_x = 0.015;  // line marking minimum sweep extent

  double top_z() const { return top_z_; }
  void set_top_z(double z) { top_z_ = z; }

  const VesselSpec& large_vessel() const { return vessels[0]; }
  const VesselSpec& branch_vessel() const { return vessels[1]; }
  Vec3 bifurcation_point() const;

 private:
  double top_z_ = 0.06;
};

struct PhantomParams {
  // Box dimensions; the box sits at the origin with its top face at
  // z = size_z.
  double size_x = 0.150;
  double size_y = 0.100;
  double size_z = 0.060;
  double large_radius_mm = 4.0;
  double branch_radius_mm = 2.0;
  double large_depth = 0.020;   // below top surface, m
  double branch_end_depth = 0.0135;
  double meander_amp = 0.006;   // lateral meander of the large vessel, m
  double branch_offset_y = 0.030;
  double stiffness = 1200.0;
  double damping = 10.0;
  double sweep_marker_x = 0.015;
};

PhantomScene build_phantom(const PhantomParams& params);
PhantomScene build_default_phantom();

// Throws InvariantError when a scene invariant is broken.
void validate_scene(const PhantomScene& scene);

// Unilateral normal contact: zero out of contact, spring-damper along
// the outward normal otherwise, never pulling inward.
Vec3 contact_force(const PhantomScene& scene, const Pose& probe_tip, const Vec3& tip_velocity);

// ASCII STL round trip. Import welds duplicate vertices.
void save_stl(const TriangleMesh& mesh, const std::string& path);
TriangleMesh load_stl(const std::string& path);

}  // namespace remus
