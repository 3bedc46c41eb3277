#include "remus/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "remus/errors.hpp"

namespace remus {

void TriangleMesh::recompute_normals() {
  normals.resize(triangles.size());
  for (size_t i = 0; i < triangles.size(); ++i) {
    const Vec3& a = vertices[triangles[i][0]];
    const Vec3& b = vertices[triangles[i][1]];
    const Vec3& c = vertices[triangles[i][2]];
    Vec3 n = (b - a).cross(c - a);
    const double len = n.norm();
    normals[i] = len > 0.0 ? Vec3(n / len) : Vec3::UnitZ();
  }
}

double TriangleMesh::signed_volume() const {
  double vol = 0.0;
  for (const auto& t : triangles) {
    vol += vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]]));
  }
  return vol / 6.0;
}

bool TriangleMesh::is_watertight() const {
  std::map<std::pair<uint32_t, uint32_t>, int> edge_count;
  for (const auto& t : triangles) {
    for (int e = 0; e < 3; ++e) {
      uint32_t u = t[e], v = t[(e + 1) % 3];
      if (u == v) return false;
      edge_count[{std::min(u, v), std::max(u, v)}]++;
    }
  }
  for (const auto& [edge, count] : edge_count) {
    if (count != 2) return false;
  }
  return true;
}

double TriangleMesh::min_triangle_area() const {
  double min_area = std::numeric_limits<double>::infinity();
  for (const auto& t : triangles) {
    const Vec3& a = vertices[t[0]];
    const double area = 0.5 * (vertices[t[1]] - a).cross(vertices[t[2]] - a).norm();
    min_area = std::min(min_area, area);
  }
  return min_area;
}

bool TriangleMesh::is_valid() const {
  return !triangles.empty() && is_watertight() && signed_volume() > 0.0 &&
         min_triangle_area() > 1e-12;
}

TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
  TriangleMesh m;
  m.vertices = {
      {lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()},
      {hi.x(), hi.y(), lo.z()}, {lo.x(), hi.y(), lo.z()},
      {lo.x(), lo.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
      {hi.x(), hi.y(), hi.z()}, {lo.x(), hi.y(), hi.z()},
  };
  // CCW seen from outside.
  m.triangles = {
      {0, 2, 1}, {0, 3, 2},  // bottom (-z)
      {4, 5, 6}, {4, 6, 7},  // top (+z)
      {0, 1, 5}, {0, 5, 4},  // -y
      {2, 3, 7}, {2, 7, 6},  // +y
      {1, 2, 6}, {1, 6, 5},  // +x
      {3, 0, 4}, {3, 4, 7},  // -x
  };
  m.recompute_normals();
  return m;
}

TriangleMesh make_uv_sphere(const Vec3& center, double radius, int rings, int segments) {
  TriangleMesh m;
  m.vertices.push_back(center + Vec3(0, 0, radius));
  for (int r = 1; r < rings; ++r) {
    const double phi = M_PI * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double theta = 2.0 * M_PI * s / segments;
      m.vertices.push_back(center + radius * Vec3(std::sin(phi) * std::cos(theta),
                                                  std::sin(phi) * std::sin(theta),
                                                  std::cos(phi)));
    }
  }
  m.vertices.push_back(center + Vec3(0, 0, -radius));
  const uint32_t south = static_cast<uint32_t>(m.vertices.size() - 1);
  auto ring_vertex = [&](int r, int s) -> uint32_t {
    return 1 + (r - 1) * segments + (s % segments);
  };
  for (int s = 0; s < segments; ++s) {
    m.triangles.push_back({0, ring_vertex(1, s), ring_vertex(1, s + 1)});
  }
  for (int r = 1; r < rings - 1; ++r) {
    for (int s = 0; s < segments; ++s) {
      const uint32_t a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
      const uint32_t c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
      m.triangles.push_back({a, c, d});
      m.triangles.push_back({a, d, b});
    }
  }
  for (int s = 0; s < segments; ++s) {
    m.triangles.push_back({south, ring_vertex(rings - 1, s + 1), ring_vertex(rings - 1, s)});
  }
  m.recompute_normals();
  return m;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return a + ab * v + ac * w;
}

double winding_number(const TriangleMesh& mesh, const Vec3& p) {
  // van Oosterom & Strackee solid angle summed over all triangles.
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]] - p;
    const Vec3 b = mesh.vertices[t[1]] - p;
    const Vec3 c = mesh.vertices[t[2]] - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double numer = a.dot(b.cross(c));
    const double denom = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(numer, denom);
  }
  return total / (4.0 * M_PI);
}

SurfaceHit closest_surface_point(const TriangleMesh& mesh, const Vec3& p) {
  SurfaceHit hit;
  double best_sq = std::numeric_limits<double>::infinity();
  size_t best_tri = 0;
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    const Vec3 q = closest_point_on_triangle(p, mesh.vertices[t[0]], mesh.vertices[t[1]],
                                             mesh.vertices[t[2]]);
    const double d_sq = (p - q).squaredNorm();
    if (d_sq < best_sq) {
      best_sq = d_sq;
      best_tri = i;
      hit.point = q;
    }
  }
  const double dist = std::sqrt(best_sq);
  const bool inside = winding_number(mesh, p) > 0.5;
  hit.signed_distance = inside ? -dist : dist;
  if (dist > 1e-12) {
    hit.normal = (inside ? (hit.point - p) : (p - hit.point)) / dist;
  } else {
    hit.normal = mesh.normals[best_tri];
  }
  return hit;
}

VesselSpec::CenterlineHit VesselSpec::closest_point(const Vec3& p) const {
  CenterlineHit best;
  best.distance = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < centerline.size(); ++i) {
    const Vec3& a = centerline[i];
    const Vec3& b = centerline[i + 1];
    const Vec3 ab = b - a;
    const double len_sq = ab.squaredNorm();
    double t = len_sq > 0.0 ? (p - a).dot(ab) / len_sq : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec3 q = a + t * ab;
    const double d = (p - q).norm();
    if (d < best.distance) {
      best.distance = d;
      best.point = q;
      best.tangent = len_sq > 0.0 ? Vec3(ab.normalized()) : Vec3::UnitX();
      best.radius_m = 1e-3 * (radius_mm[i] + t * (radius_mm[i + 1] - radius_mm[i]));
    }
  }
  return best;
}

double VesselSpec::min_x() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& p : centerline) v = std::min(v, p.x());
  return v;
}

double VesselSpec::max_x() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& p : centerline) v = std::max(v, p.x());
  return v;
}

Vec3 PhantomScene::bifurcation_point() const {
  return vessels.at(1).centerline.front();
}

PhantomScene build_phantom(const PhantomParams& prm) {
  PhantomScene scene;
  scene.mesh = make_box(Vec3(0, 0, 0), Vec3(prm.size_x, prm.size_y, prm.size_z));
  scene.set_top_z(prm.size_z);
  scene.contact.stiffness = prm.stiffness;
  scene.contact.damping = prm.damping;
  scene.sweep_marker_x = prm.sweep_marker_x;

  // Large vessel: meanders gently along x at constant depth. The sample
  // spacing is chosen so the midpoint lands exactly on a vertex, which
  // becomes the shared bifurcation point.
  const double x0 = 0.005, x1 = prm.size_x - 0.005;
  const int n = 28;  // even, so i = n/2 is the midpoint
  const double mid_y = prm.size_y / 2.0;
  const double z_large = prm.size_z - prm.large_depth;
  VesselSpec large;
  large.label = VesselLabel::Large;
  for (int i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    const double x = x0 + s * (x1 - x0);
    const double y = mid_y + prm.meander_amp * std::sin(3.0 * M_PI * s);
    large.centerline.emplace_back(x, y, z_large);
    large.radius_mm.push_back(prm.large_radius_mm);
  }

  // Branch: splits off at the midpoint vertex and diverges in y while
  // rising toward the top surface.
  const Vec3 bif = large.centerline[n / 2];
  const double z_branch_end = prm.size_z - prm.branch_end_depth;
  VesselSpec branch;
  branch.label = VesselLabel::Branch;
  const int nb = 14;
  for (int i = 0; i <= nb; ++i) {
    const double s = static_cast<double>(i) / nb;
    const double x = bif.x() + s * (x1 - bif.x());
    // Smoothstep lateral divergence away from the large vessel.
    const double blend = s * s * (3.0 - 2.0 * s);
    const double y = bif.y() + blend * prm.branch_offset_y;
    const double z = bif.z() + s * (z_branch_end - bif.z());
    branch.centerline.emplace_back(x, y, z);
    branch.radius_mm.push_back(prm.branch_radius_mm);
  }
  branch.centerline.front() = bif;  // exact shared point

  scene.vessels = {large, branch};
  return scene;
}

PhantomScene build_default_phantom() { return build_phantom(PhantomParams{}); }

void validate_scene(const PhantomScene& scene) {
  if (!scene.mesh.is_valid()) {
    throw InvariantError("phantom mesh is not a valid watertight mesh");
  }
  if (scene.vessels.size() != 2) {
    throw InvariantError("phantom must carry exactly two vessels");
  }
  if (scene.contact.stiffness <= 0.0 || scene.contact.damping < 0.0) {
    throw InvariantError("contact model requires k > 0 and b >= 0");
  }
  for (const auto& vessel : scene.vessels) {
    if (vessel.centerline.size() < 2 || vessel.centerline.size() != vessel.radius_mm.size()) {
      throw InvariantError("vessel centerline/radius arrays malformed");
    }
    for (size_t i = 0; i < vessel.centerline.size(); ++i) {
      if (vessel.radius_mm[i] <= 0.0) {
        throw InvariantError("vessel radius must be positive");
      }
      const double clearance = scene.top_z() - vessel.centerline[i].z();
      if (clearance < 1e-3 * vessel.radius_mm[i]) {
        throw InvariantError("vessel centerline must sit below the top surface by >= radius");
      }
    }
  }
  // Exactly one shared centerline point between the two vessels.
  int shared = 0;
  for (const auto& a : scene.vessels[0].centerline) {
    for (const auto& b : scene.vessels[1].centerline) {
      if ((a - b).norm() < 1e-12) shared++;
    }
  }
  if (shared != 1) {
    throw InvariantError("vessels must bifurcate at exactly one shared centerline point");
  }
}

Vec3 contact_force(const PhantomScene& scene, const Pose& probe_tip, const Vec3& tip_velocity) {
  const SurfaceHit hit = closest_surface_point(scene.mesh, probe_tip.position);
  if (hit.signed_distance >= 0.0) return Vec3::Zero();
  const double penetration = -hit.signed_distance;
  const double magnitude = scene.contact.stiffness * penetration -
                           scene.contact.damping * tip_velocity.dot(hit.normal);
  return std::max(magnitude, 0.0) * hit.normal;
}

void save_stl(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open STL file for writing: " + path);
  out << "solid remus\n";
  char buf[256];
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const Vec3& n = mesh.normals[i];
    std::snprintf(buf, sizeof(buf), "  facet normal %.9e %.9e %.9e\n", n.x(), n.y(), n.z());
    out << buf << "    outer loop\n";
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = mesh.vertices[mesh.triangles[i][k]];
      std::snprintf(buf, sizeof(buf), "      vertex %.9e %.9e %.9e\n", v.x(), v.y(), v.z());
      out << buf;
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid remus\n";
}

TriangleMesh load_stl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open STL file: " + path);
  TriangleMesh mesh;
  std::map<std::tuple<int64_t, int64_t, int64_t>, uint32_t> weld;
  const double quantum = 1e-9;  // weld grid, well under the 1e-6 round-trip budget
  std::vector<uint32_t> face;
  std::string token;
  while (in >> token) {
    if (token == "vertex") {
      Vec3 v;
      in >> v.x() >> v.y() >> v.z();
      const auto key = std::make_tuple(static_cast<int64_t>(std::llround(v.x() / quantum)),
                                       static_cast<int64_t>(std::llround(v.y() / quantum)),
                                       static_cast<int64_t>(std::llround(v.z() / quantum)));
      auto it = weld.find(key);
      uint32_t idx;
      if (it == weld.end()) {
        idx = static_cast<uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(v);
        weld.emplace(key, idx);
      } else {
        idx = it->second;
      }
      face.push_back(idx);
      if (face.size() == 3) {
        mesh.triangles.push_back({face[0], face[1], face[2]});
        face.clear();
      }
    }
  }
  if (!face.empty()) throw MalformedMessageError("STL file has a dangling vertex list");
  mesh.recompute_normals();
  return mesh;
}

}  // namespace remus
