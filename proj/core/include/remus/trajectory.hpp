#pragma once

#include <array>
#include <vector>

#include "remus/robot_types.hpp"

namespace remus {

// One constant-jerk phase.
struct JerkPhase {
  double dt = 0.0;
  double jerk = 0.0;
};

// Single-DOF jerk-limited profile from an arbitrary (p, v, a) state to
// rest at a target position. Rest-to-rest plans are time-optimal
// seven-segment S-curves; moving-start plans accelerate or brake toward
// the target without an intermediate stop whenever the target is ahead
// of the braking point, and fall back to brake-and-return otherwise.
//
// Precondition on the start state: |a0| <= amax and the velocity
// reachable by bleeding the acceleration to zero stays within
// [-vmax, vmax]. States sampled from profiles planned under the same
// limits always satisfy this.
class JerkProfile {
 public:
  static JerkProfile plan(double p0, double v0, double a0, double target,
                          double vmax, double amax, double jmax);

  double duration() const { return duration_; }
  double target() const { return target_; }

  // Clamps t to [0, duration]; at or beyond the end this returns the
  // exact (target, 0, 0) rest state.
  void sample(double t, double& p, double& v, double& a) const;

  const std::vector<JerkPhase>& phases() const { return phases_; }

 private:
  struct PhaseStart {
    double t, p, v, a;
  };

  void finalize(double p0, double v0, double a0);

  std::vector<JerkPhase> phases_;
  std::vector<PhaseStart> starts_;
  double duration_ = 0.0;
  double target_ = 0.0;
};

struct TrajectorySample {
  Vector7 q = Vector7::Zero();
  Vector7 qd = Vector7::Zero();
  Vector7 qdd = Vector7::Zero();
};

// Multi-joint segment, all joints ending at rest on the target
// configuration. Joints starting at rest are time-scaled so every such
// joint arrives exactly when the slowest one does; joints replanned
// mid-motion keep their own optimal timing and hold the target until
// the segment ends.
class Trajectory {
 public:
  Trajectory() = default;

  double duration() const { return duration_; }
  TrajectorySample sample(double t) const;

  friend Trajectory plan_segment(const JointState& from, const Vector7& to_q,
                                 const MotionLimits& limits);

 private:
  std::array<JerkProfile, 7> joints_;
  std::array<double, 7> time_scale_{1, 1, 1, 1, 1, 1, 1};
  double duration_ = 0.0;
};

// Plans a jerk/acceleration/velocity-limited segment. Throws
// InfeasibleStateError when the start state violates the limits.
Trajectory plan_segment(const JointState& from, const Vector7& to_q, const MotionLimits& limits);

}  // namespace remus
