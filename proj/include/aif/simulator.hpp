// Deterministic planar N-DOF arm world: ground-truth dynamics, sensory
// generation with seeded Gaussian noise, and the perturbation scenarios
// (visual marker shift, broken sensors, gravity change).
#ifndef AIF_SIMULATOR_HPP
#define AIF_SIMULATOR_HPP

#include <cstdint>
#include <random>

#include "aif/genmodel.hpp"
#include "aif/types.hpp"

namespace aif {

struct NoiseSpec {
  double proprio_pos = 0.0;  // rad
  double proprio_vel = 0.0;  // rad/s
  double visual = 0.0;       // m
};

// Step-function perturbations: activate at a step index and hold.
struct PerturbationSpec {
  bool enabled = false;
  Eigen::Vector2d visual_shift = Eigen::Vector2d::Zero();  // m
  long shift_t0 = 0;
  // channel -> activation step; the channel's readings vanish from then on.
  std::map<Channel, long> broken_channels;

  void validate() const;
};

struct WorldInit {
  Eigen::VectorXd q;             // rad
  Eigen::VectorXd qdot;          // rad/s (defaults to zero when empty)
  Eigen::VectorXd link_lengths;  // m, > 0
  Eigen::VectorXd link_masses;   // kg, > 0
  double gravity = 9.81;         // m/s^2, >= 0; applied in torque mode
  double damping = 1.0;          // N*m*s/rad, >= 0
  ActionMode mode = ActionMode::velocity;
  double max_joint_speed = 2.0;  // velocity-mode clamp, rad/s
  bool sense_velocity = true;    // emit the proprio_vel channel
  NoiseSpec noise;
  PerturbationSpec perturbation;
  std::uint64_t rng_seed = 0;
};

// Ground-truth world. A single instance is not thread-safe (stepping state
// and the noise generator are mutable); run one instance per trial.
//
// Torque mode uses per-joint lumped inertia I_i = sum_{j>=i} m_j (sum_{k<=j}
// L_k)^2 with no Coriolis/off-diagonal coupling, gravity torque from link
// masses at link midpoints, viscous damping, semi-implicit Euler. The joint
// angle convention for gravity puts q = 0 at the hanging rest pose.
class ArmWorld {
 public:
  explicit ArmWorld(const WorldInit& init);

  // Advances ground truth one step. Throws DivergenceError on blow-up.
  void step(const Eigen::VectorXd& a, double dt);

  // Draws a noisy multimodal observation of the current state. Advances the
  // noise generator; broken channels are omitted entirely.
  Observation observe();

  // Gravity torque vector at configuration q (exposed for tests).
  Eigen::VectorXd gravity_torque(const Eigen::VectorXd& q) const;
  // Lumped per-joint inertia diagonal.
  const Eigen::VectorXd& inertia() const { return inertia_; }

  const Eigen::VectorXd& q() const { return q_; }
  const Eigen::VectorXd& qdot() const { return qdot_; }
  int n_joints() const { return static_cast<int>(q_.size()); }
  long step_count() const { return step_count_; }
  double time() const { return time_; }
  ActionMode mode() const { return mode_; }
  double gravity() const { return gravity_; }
  const AnalyticFK& fk() const { return fk_; }
  Eigen::Vector2d end_effector() const { return fk_.predict(q_); }
  bool perturbation_active() const;
  bool channel_broken(Channel c) const;

  void set_gravity(double g);

 private:
  Eigen::VectorXd q_, qdot_;
  Eigen::VectorXd links_, masses_, inertia_;
  double gravity_, damping_;
  ActionMode mode_;
  double max_joint_speed_;
  bool sense_velocity_;
  NoiseSpec noise_;
  PerturbationSpec perturbation_;
  AnalyticFK fk_;
  std::mt19937_64 rng_;
  long step_count_ = 0;
  double time_ = 0.0;
};

}  // namespace aif

#endif  // AIF_SIMULATOR_HPP
