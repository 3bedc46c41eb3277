#include "remus/spatial.hpp"

#include <cmath>

namespace remus {

void Pose::canonicalize() {
  orientation.normalize();
  if (orientation.w() < 0.0) {
    orientation.coeffs() = -orientation.coeffs();
  }
}

bool Pose::is_valid(double tol) const {
  return position.allFinite() && std::abs(orientation.norm() - 1.0) <= tol;
}

Pose make_pose(const Vec3& position, const Vec3& axis, double angle_rad) {
  Pose p;
  p.position = position;
  if (axis.norm() > 0.0 && angle_rad != 0.0) {
    p.orientation = Quat(Eigen::AngleAxisd(angle_rad, axis.normalized()));
  }
  p.canonicalize();
  return p;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.position = a.position + a.orientation * b.position;
  out.orientation = a.orientation * b.orientation;
  out.canonicalize();
  return out;
}

Pose inverse(const Pose& p) {
  Pose out;
  out.orientation = p.orientation.conjugate();
  out.position = -(out.orientation * p.position);
  out.canonicalize();
  return out;
}

Vec3 transform_point(const Pose& p, const Vec3& local) {
  return p.position + p.orientation * local;
}

Quat quat_exp(const Vec3& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle < 1e-12) {
    Quat q(1.0, 0.5 * axis_angle.x(), 0.5 * axis_angle.y(), 0.5 * axis_angle.z());
    q.normalize();
    return q;
  }
  const Vec3 axis = axis_angle / angle;
  return Quat(Eigen::AngleAxisd(angle, axis));
}

Vec3 quat_log(const Quat& q_in) {
  Quat q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double sin_half = q.vec().norm();
  if (sin_half < 1e-12) return 2.0 * q.vec();
  const double half_angle = std::atan2(sin_half, q.w());
  return q.vec() * (2.0 * half_angle / sin_half);
}

PoseError pose_error(const Pose& target, const Pose& actual) {
  PoseError e;
  e.translational = target.position - actual.position;
  e.rotational = quat_log(target.orientation * actual.orientation.conjugate());
  return e;
}

}  // namespace remus
