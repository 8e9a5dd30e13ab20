#include "aif/types.hpp"

#include <cmath>

namespace aif {

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::string channel_name(Channel c) {
  switch (c) {
    case Channel::proprio_pos: return "proprio_pos";
    case Channel::proprio_vel: return "proprio_vel";
    case Channel::visual: return "visual";
  }
  return "?";
}

std::optional<Channel> channel_from_name(const std::string& name) {
  if (name == "proprio_pos") return Channel::proprio_pos;
  if (name == "proprio_vel") return Channel::proprio_vel;
  if (name == "visual") return Channel::visual;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// GeneralizedLatent
// ---------------------------------------------------------------------------

GeneralizedLatent::GeneralizedLatent(std::vector<Eigen::VectorXd> orders)
    : orders_(std::move(orders)) {
  require(!orders_.empty(), "GeneralizedLatent: needs at least order 0");
  const auto n = orders_[0].size();
  require(n >= 1, "GeneralizedLatent: n_joints must be >= 1");
  for (const auto& o : orders_) {
    require(o.size() == n, "GeneralizedLatent: order length mismatch");
    require(all_finite(o), "GeneralizedLatent: non-finite entry");
  }
}

GeneralizedLatent GeneralizedLatent::zero(int n_joints, int max_order) {
  require(n_joints >= 1 && max_order >= 0, "GeneralizedLatent::zero: bad shape");
  std::vector<Eigen::VectorXd> orders(max_order + 1,
                                      Eigen::VectorXd::Zero(n_joints));
  return GeneralizedLatent(std::move(orders));
}

GeneralizedLatent GeneralizedLatent::from_stacked(const Eigen::VectorXd& v,
                                                  int n_joints, int max_order) {
  require(v.size() == static_cast<Eigen::Index>(n_joints) * (max_order + 1),
          "GeneralizedLatent::from_stacked: size mismatch");
  std::vector<Eigen::VectorXd> orders;
  orders.reserve(max_order + 1);
  for (int k = 0; k <= max_order; ++k)
    orders.push_back(v.segment(static_cast<Eigen::Index>(k) * n_joints, n_joints));
  return GeneralizedLatent(std::move(orders));
}

Eigen::VectorXd GeneralizedLatent::stacked() const {
  const int n = n_joints();
  Eigen::VectorXd v(static_cast<Eigen::Index>(n) * (max_order() + 1));
  for (int k = 0; k <= max_order(); ++k)
    v.segment(static_cast<Eigen::Index>(k) * n, n) = orders_[k];
  return v;
}

GeneralizedLatent shift_orders(const GeneralizedLatent& z) {
  std::vector<Eigen::VectorXd> shifted;
  shifted.reserve(z.max_order() + 1);
  for (int k = 1; k <= z.max_order(); ++k) shifted.push_back(z.order(k));
  shifted.push_back(Eigen::VectorXd::Zero(z.n_joints()));
  return GeneralizedLatent(std::move(shifted));
}

Eigen::MatrixXd shift_matrix(int n_joints, int max_order) {
  const int N = n_joints * (max_order + 1);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  for (int k = 0; k < max_order; ++k)
    D.block(static_cast<Eigen::Index>(k) * n_joints,
            static_cast<Eigen::Index>(k + 1) * n_joints, n_joints, n_joints) =
        Eigen::MatrixXd::Identity(n_joints, n_joints);
  return D;
}

// ---------------------------------------------------------------------------
// Observation
// ---------------------------------------------------------------------------

bool Observation::has(Channel c) const {
  switch (c) {
    case Channel::proprio_pos: return true;
    case Channel::proprio_vel: return proprio_vel.has_value();
    case Channel::visual: return visual.has_value();
  }
  return false;
}

void Observation::validate(int n_joints) const {
  require(proprio_pos.size() == n_joints,
          "Observation: proprio_pos length != n_joints");
  require(all_finite(proprio_pos), "Observation: non-finite proprio_pos");
  if (proprio_vel) {
    require(proprio_vel->size() == n_joints,
            "Observation: proprio_vel length != n_joints");
    require(all_finite(*proprio_vel), "Observation: non-finite proprio_vel");
  }
  if (visual) require(visual->allFinite(), "Observation: non-finite visual");
  require(std::isfinite(timestamp), "Observation: non-finite timestamp");
}

// ---------------------------------------------------------------------------
// PrecisionSet
// ---------------------------------------------------------------------------

namespace {

PrecisionSet::Block make_block(const Eigen::MatrixXd& sigma,
                               const std::string& label) {
  require(sigma.rows() == sigma.cols(), "PrecisionSet: " + label + " not square");
  require(sigma.allFinite(), "PrecisionSet: " + label + " has non-finite entries");
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()),
          "PrecisionSet: " + label + " not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  require(llt.info() == Eigen::Success,
          "PrecisionSet: " + label + " not positive definite (Cholesky failed)");
  PrecisionSet::Block b;
  b.sigma = sigma;
  b.precision = llt.solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
  // ln|Sigma| = 2 sum ln L_ii
  b.logdet = 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  return b;
}

}  // namespace

PrecisionSet::PrecisionSet(std::map<Channel, Eigen::MatrixXd> sigma_x,
                           std::vector<Eigen::MatrixXd> sigma_z) {
  require(!sigma_z.empty(), "PrecisionSet: needs at least one dynamics block");
  for (const auto& [c, m] : sigma_x)
    x_blocks_.emplace(c, make_block(m, "sigma_x[" + channel_name(c) + "]"));
  for (size_t k = 0; k < sigma_z.size(); ++k)
    z_blocks_.push_back(make_block(sigma_z[k], "sigma_z[" + std::to_string(k) + "]"));
}

PrecisionSet PrecisionSet::diagonal(int n_joints, int max_order, double var_pos,
                                    std::optional<double> var_vel,
                                    std::optional<double> var_vis,
                                    const std::vector<double>& var_z) {
  require(n_joints >= 1 && max_order >= 0, "PrecisionSet::diagonal: bad shape");
  require(!var_z.empty(), "PrecisionSet::diagonal: var_z empty");
  std::map<Channel, Eigen::MatrixXd> x;
  x[Channel::proprio_pos] =
      var_pos * Eigen::MatrixXd::Identity(n_joints, n_joints);
  if (var_vel)
    x[Channel::proprio_vel] =
        *var_vel * Eigen::MatrixXd::Identity(n_joints, n_joints);
  if (var_vis) x[Channel::visual] = *var_vis * Eigen::Matrix2d::Identity();
  std::vector<Eigen::MatrixXd> z;
  for (int k = 0; k <= max_order; ++k) {
    const double v = var_z[std::min<size_t>(k, var_z.size() - 1)];
    z.push_back(v * Eigen::MatrixXd::Identity(n_joints, n_joints));
  }
  return PrecisionSet(std::move(x), std::move(z));
}

const PrecisionSet::Block& PrecisionSet::sensory(Channel c) const {
  auto it = x_blocks_.find(c);
  if (it == x_blocks_.end())
    throw std::invalid_argument("PrecisionSet: no block for channel " +
                                channel_name(c));
  return it->second;
}

const PrecisionSet::Block& PrecisionSet::dynamics(int order) const {
  if (order < 0 || order >= static_cast<int>(z_blocks_.size()))
    throw std::invalid_argument("PrecisionSet: no dynamics block for order " +
                                std::to_string(order));
  return z_blocks_[order];
}

// ---------------------------------------------------------------------------
// AgentConfig / Goal
// ---------------------------------------------------------------------------

void AgentConfig::validate() const {
  require(k_z > 0, "AgentConfig: k_z must be > 0");
  require(k_a >= 0, "AgentConfig: k_a must be >= 0");
  require(dt > 0 && dt <= 0.1, "AgentConfig: dt must be in (0, 0.1]");
  require(n_joints >= 1, "AgentConfig: n_joints must be >= 1");
  require(max_order >= 0 && max_order <= 3,
          "AgentConfig: max_order must be in [0, 3]");
  require(action_limit > 0, "AgentConfig: action_limit must be > 0");
  require(torque_response > 0, "AgentConfig: torque_response must be > 0");
}

void Goal::validate() const {
  require(desired_visual.has_value() || desired_joints.has_value(),
          "Goal: at least one of desired_visual / desired_joints required");
  if (desired_visual)
    require(desired_visual->allFinite(), "Goal: non-finite desired_visual");
  if (desired_joints) {
    require(desired_joints->size() >= 1, "Goal: empty desired_joints");
    require(desired_joints->allFinite(), "Goal: non-finite desired_joints");
  }
}

}  // namespace aif
