#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cstdint>

namespace remus {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// Rigid-body pose: position in meters plus a unit quaternion kept
// normalized and sign-canonicalized (w >= 0) so serialized traces are
// stable across runs.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  static Pose identity() { return {}; }

  // Renormalizes and flips the quaternion sign so w >= 0.
  void canonicalize();

  bool is_valid(double tol = 1e-9) const;
};

// Builds a pose from a position and a rotation about an axis.
Pose make_pose(const Vec3& position, const Vec3& axis, double angle_rad);

// Rigid composition a*b (apply b in a's frame), quaternion renormalized.
Pose compose(const Pose& a, const Pose& b);

Pose inverse(const Pose& p);

// Transforms a point from the pose's local frame into the parent frame.
Vec3 transform_point(const Pose& p, const Vec3& local);

// Separated translational / rotational error between two poses.
// rotational is the axis-angle (log map) of target relative to actual,
// magnitude in [0, pi].
struct PoseError {
  Vec3 translational = Vec3::Zero();
  Vec3 rotational = Vec3::Zero();

  double translational_norm() const { return translational.norm(); }
  double rotational_norm() const { return rotational.norm(); }
};

PoseError pose_error(const Pose& target, const Pose& actual);

// Axis-angle exponential / logarithm on the quaternion group.
Quat quat_exp(const Vec3& axis_angle);
Vec3 quat_log(const Quat& q);

// Logical simulation clock in integer microseconds. All event ordering
// in the simulator derives from this, never from wall time.
class SimClock {
 public:
  explicit SimClock(uint64_t tick_us = 1000) : tick_us_(tick_us) {}

  uint64_t now_us() const { return now_us_; }
  uint64_t tick_us() const { return tick_us_; }
  double now_s() const { return static_cast<double>(now_us_) * 1e-6; }
  double tick_s() const { return static_cast<double>(tick_us_) * 1e-6; }

  void advance() { now_us_ += tick_us_; }
  void advance_to(uint64_t t_us) {
    if (t_us > now_us_) now_us_ = t_us;
  }

 private:
  uint64_t now_us_ = 0;
  uint64_t tick_us_;
};

}  // namespace remus
