#include "aif/simulator.hpp"

#include <cmath>

namespace aif {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void PerturbationSpec::validate() const {
  require(shift_t0 >= 0, "PerturbationSpec: shift_t0 must be >= 0");
  require(visual_shift.allFinite(), "PerturbationSpec: non-finite visual_shift");
  for (const auto& [c, t0] : broken_channels) {
    require(t0 >= 0, "PerturbationSpec: broken-channel step must be >= 0");
    require(c != Channel::proprio_pos,
            "PerturbationSpec: proprio_pos cannot be broken (always present)");
  }
}

ArmWorld::ArmWorld(const WorldInit& init)
    : q_(init.q),
      qdot_(init.qdot.size() ? init.qdot
                             : Eigen::VectorXd::Zero(init.q.size())),
      links_(init.link_lengths),
      masses_(init.link_masses),
      gravity_(init.gravity),
      damping_(init.damping),
      mode_(init.mode),
      max_joint_speed_(init.max_joint_speed),
      sense_velocity_(init.sense_velocity),
      noise_(init.noise),
      perturbation_(init.perturbation),
      fk_(init.link_lengths),
      rng_(init.rng_seed) {
  const auto n = q_.size();
  require(n >= 1, "ArmWorld: needs at least one joint");
  require(qdot_.size() == n, "ArmWorld: qdot length mismatch");
  require(links_.size() == n && masses_.size() == n,
          "ArmWorld: links/masses length mismatch");
  require((links_.array() > 0).all() && (masses_.array() > 0).all(),
          "ArmWorld: links and masses must be > 0");
  require(gravity_ >= 0, "ArmWorld: gravity must be >= 0");
  require(damping_ >= 0, "ArmWorld: damping must be >= 0");
  require(max_joint_speed_ > 0, "ArmWorld: max_joint_speed must be > 0");
  require(noise_.proprio_pos >= 0 && noise_.proprio_vel >= 0 &&
              noise_.visual >= 0,
          "ArmWorld: noise std devs must be >= 0");
  perturbation_.validate();

  // I_i = sum_{j>=i} m_j (sum_{k<=j} L_k)^2
  inertia_.resize(n);
  Eigen::VectorXd reach(n);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    acc += links_[j];
    reach[j] = acc;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = i; j < n; ++j) s += masses_[j] * reach[j] * reach[j];
    inertia_[i] = s;
  }
}

Eigen::VectorXd ArmWorld::gravity_torque(const Eigen::VectorXd& q) const {
  // Masses lumped at link midpoints, q = 0 hanging straight down:
  //   tau_i = -g sum_{j>=i} m_j [ sum_{i<=k<j} L_k sin(theta_k)
  //                               + (L_j/2) sin(theta_j) ],
  // theta_k the cumulative angle of link k.
  const Eigen::Index n = q.size();
  Eigen::VectorXd sin_theta(n);
  double angle = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    angle += q[k];
    sin_theta[k] = std::sin(angle);
  }
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = i; j < n; ++j) {
      double lever = 0.5 * links_[j] * sin_theta[j];
      for (Eigen::Index k = i; k < j; ++k) lever += links_[k] * sin_theta[k];
      s += masses_[j] * lever;
    }
    tau[i] = -gravity_ * s;
  }
  return tau;
}

void ArmWorld::step(const Eigen::VectorXd& a, double dt) {
  require(dt > 0, "ArmWorld::step: dt must be > 0");
  require(a.size() == q_.size(), "ArmWorld::step: action length mismatch");
  require(a.allFinite(), "ArmWorld::step: non-finite action");

  if (mode_ == ActionMode::velocity) {
    qdot_ = a.cwiseMax(-max_joint_speed_).cwiseMin(max_joint_speed_);
    q_ += qdot_ * dt;
  } else {
    const Eigen::VectorXd tau = a + gravity_torque(q_) - damping_ * qdot_;
    const Eigen::VectorXd qddot = tau.cwiseQuotient(inertia_);
    qdot_ += qddot * dt;  // semi-implicit: velocity first
    q_ += qdot_ * dt;
  }
  if (!q_.allFinite() || !qdot_.allFinite())
    throw DivergenceError("ArmWorld::step: simulation blow-up", step_count_);
  ++step_count_;
  time_ += dt;
}

bool ArmWorld::perturbation_active() const {
  return perturbation_.enabled && step_count_ >= perturbation_.shift_t0;
}

bool ArmWorld::channel_broken(Channel c) const {
  auto it = perturbation_.broken_channels.find(c);
  return it != perturbation_.broken_channels.end() && step_count_ >= it->second;
}

Observation ArmWorld::observe() {
  std::normal_distribution<double> unit(0.0, 1.0);
  const Eigen::Index n = q_.size();
  Observation obs;
  obs.timestamp = time_;

  obs.proprio_pos = q_;
  for (Eigen::Index i = 0; i < n; ++i)
    obs.proprio_pos[i] += noise_.proprio_pos * unit(rng_);

  if (sense_velocity_ && !channel_broken(Channel::proprio_vel)) {
    Eigen::VectorXd v = qdot_;
    for (Eigen::Index i = 0; i < n; ++i) v[i] += noise_.proprio_vel * unit(rng_);
    obs.proprio_vel = std::move(v);
  }

  if (!channel_broken(Channel::visual)) {
    Eigen::Vector2d vis = fk_.predict(q_);
    if (perturbation_active()) vis += perturbation_.visual_shift;
    vis.x() += noise_.visual * unit(rng_);
    vis.y() += noise_.visual * unit(rng_);
    obs.visual = vis;
  }
  return obs;
}

void ArmWorld::set_gravity(double g) {
  require(g >= 0, "ArmWorld: gravity must be >= 0");
  gravity_ = g;
}

}  // namespace aif
