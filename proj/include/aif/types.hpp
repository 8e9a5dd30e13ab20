// Shared domain types for the active-inference arm: latent states in
// generalized coordinates, multimodal observations, precision (inverse
// covariance) sets and agent configuration. No algorithms live here.
#ifndef AIF_TYPES_HPP
#define AIF_TYPES_HPP

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aif {

// Thrown when a gradient or state integration produces non-finite values.
// Carries the step index at which integration blew up.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// Sensory channels. Order is fixed and used everywhere residuals or
// gradients are stacked: proprio_pos, proprio_vel, visual.
enum class Channel { proprio_pos, proprio_vel, visual };

std::string channel_name(Channel c);
std::optional<Channel> channel_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// GeneralizedLatent: latent state z in generalized coordinates. Stores the
// joint state and its temporal derivatives as orders 0..max_order, each a
// vector of length n_joints (order 0 in rad, order k in rad/s^k).
// ---------------------------------------------------------------------------
class GeneralizedLatent {
 public:
  // Validates: at least one order, equal lengths, finite entries.
  explicit GeneralizedLatent(std::vector<Eigen::VectorXd> orders);

  static GeneralizedLatent zero(int n_joints, int max_order);
  // Inverse of stacked(): consumes a vector of length n_joints*(max_order+1),
  // laid out order-major (order 0 first).
  static GeneralizedLatent from_stacked(const Eigen::VectorXd& v, int n_joints,
                                        int max_order);

  int n_joints() const { return static_cast<int>(orders_[0].size()); }
  int max_order() const { return static_cast<int>(orders_.size()) - 1; }

  const Eigen::VectorXd& order(int k) const { return orders_.at(k); }
  const std::vector<Eigen::VectorXd>& orders() const { return orders_; }

  // Order-major flattening; order k occupies rows [k*n, (k+1)*n).
  Eigen::VectorXd stacked() const;

  bool same_shape(const GeneralizedLatent& other) const {
    return n_joints() == other.n_joints() && max_order() == other.max_order();
  }

 private:
  std::vector<Eigen::VectorXd> orders_;
};

// D operator: order k of the result is order k+1 of the input; the highest
// order is truncated to zero. Applying it max_order+1 times annihilates z.
GeneralizedLatent shift_orders(const GeneralizedLatent& z);

// N x N shift matrix over the stacked representation (N = n*(K+1)); block
// (k, k+1) is the identity. shift_matrix * z.stacked() == shift_orders(z).
Eigen::MatrixXd shift_matrix(int n_joints, int max_order);

// ---------------------------------------------------------------------------
// Observation: one multimodal sensory snapshot. proprio_pos is always
// present; proprio_vel exists only when velocity sensing is enabled and
// visual disappears under the broken-sensor perturbation.
// ---------------------------------------------------------------------------
struct Observation {
  Eigen::VectorXd proprio_pos;                // rad
  std::optional<Eigen::VectorXd> proprio_vel; // rad/s
  std::optional<Eigen::Vector2d> visual;      // m, task plane
  double timestamp = 0.0;                     // s

  bool has(Channel c) const;
  // Throws std::invalid_argument on dimension/finiteness violations.
  void validate(int n_joints) const;
};

// ---------------------------------------------------------------------------
// PrecisionSet: block-diagonal sensory covariance Sigma_x (one block per
// channel) and dynamics covariance Sigma_z (one block per generalized
// order). Blocks are validated SPD via Cholesky at construction; the
// inverses and log-determinants are cached since every free-energy
// evaluation needs them.
// ---------------------------------------------------------------------------
class PrecisionSet {
 public:
  struct Block {
    Eigen::MatrixXd sigma;      // covariance
    Eigen::MatrixXd precision;  // sigma^-1
    double logdet = 0.0;        // ln|sigma|
  };

  PrecisionSet(std::map<Channel, Eigen::MatrixXd> sigma_x,
               std::vector<Eigen::MatrixXd> sigma_z);

  // Convenience: isotropic blocks. var_vel / var_vis may be omitted for
  // agents without those channels; var_z has one entry per order 0..max_order
  // (a single entry is broadcast to all orders).
  static PrecisionSet diagonal(int n_joints, int max_order, double var_pos,
                               std::optional<double> var_vel,
                               std::optional<double> var_vis,
                               const std::vector<double>& var_z);

  bool has(Channel c) const { return x_blocks_.count(c) > 0; }
  const Block& sensory(Channel c) const;
  const Block& dynamics(int order) const;
  int n_orders() const { return static_cast<int>(z_blocks_.size()); }

 private:
  std::map<Channel, Block> x_blocks_;
  std::vector<Block> z_blocks_;
};

// ---------------------------------------------------------------------------
// AgentConfig
// ---------------------------------------------------------------------------
enum class ActionMode { velocity, torque };

struct AgentConfig {
  double k_z = 1.0;  // perception gain, 1/s
  double k_a = 1.0;  // action gain
  double dt = 0.01;  // integration step, s
  int n_joints = 2;
  int max_order = 1;
  ActionMode action_mode = ActionMode::velocity;
  bool visual_action_channel = true;  // visual term contributes to ds/da
  // |a| clamp; rad/s in velocity mode (default 2), N*m in torque mode
  // (torque scenarios configure their own, typically 10).
  double action_limit = 2.0;
  // Effective inverse inertia scaling ds/da in torque mode.
  double torque_response = 1.0;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Goal: desired sensory outcome; at least one component must be present.
// ---------------------------------------------------------------------------
struct Goal {
  std::optional<Eigen::Vector2d> desired_visual;  // m
  std::optional<Eigen::VectorXd> desired_joints;  // rad

  void validate() const;
};

}  // namespace aif

#endif  // AIF_TYPES_HPP
