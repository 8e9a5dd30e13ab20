// Generative models: sensory mappings g (latent -> predicted sensation) and
// latent dynamics f, each exposing value and Jacobian. Contains the analytic
// planar forward kinematics, the GPR-learned visual mapping, linear joint
// dynamics and the attractor dynamics used for goal-driven control.
#ifndef AIF_GENMODEL_HPP
#define AIF_GENMODEL_HPP

#include <iosfwd>
#include <memory>
#include <optional>

#include "aif/types.hpp"

namespace aif {

// Visual sensory model g_v: joint configuration -> 2-D task-plane position.
class SensoryModel {
 public:
  virtual ~SensoryModel() = default;
  virtual Eigen::Vector2d predict(const Eigen::VectorXd& q) const = 0;
  // 2 x n_joints partial derivatives of predict.
  virtual Eigen::Matrix2Xd jacobian(const Eigen::VectorXd& q) const = 0;
  virtual int n_joints() const = 0;
};

// Latent dynamics model f: z -> expected Dz, same generalized shape as z.
// The Jacobian is taken over the stacked representation (N x N).
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;
  virtual GeneralizedLatent predict(const GeneralizedLatent& z) const = 0;
  virtual Eigen::MatrixXd jacobian(const GeneralizedLatent& z) const = 0;
};

// Bundle handed to the free-energy evaluation and the agent loop. Neither
// pointer is owned. visual may be null when no visual channel is modeled;
// dynamics may be null, which means f == 0.
struct ModelSet {
  const SensoryModel* visual = nullptr;
  const DynamicsModel* dynamics = nullptr;
};

// ---------------------------------------------------------------------------
// AnalyticFK: planar chain forward kinematics,
//   p(q) = base + sum_i L_i (cos(q_1+..+q_i), sin(q_1+..+q_i)).
// Serves as the ground-truth visual mapping and as the oracle the learned
// GPR model is checked against.
// ---------------------------------------------------------------------------
class AnalyticFK final : public SensoryModel {
 public:
  explicit AnalyticFK(Eigen::VectorXd link_lengths,
                      Eigen::Vector2d base = Eigen::Vector2d::Zero());

  Eigen::Vector2d predict(const Eigen::VectorXd& q) const override;
  Eigen::Matrix2Xd jacobian(const Eigen::VectorXd& q) const override;
  int n_joints() const override { return static_cast<int>(links_.size()); }

  const Eigen::VectorXd& link_lengths() const { return links_; }
  const Eigen::Vector2d& base() const { return base_; }

 private:
  Eigen::VectorXd links_;
  Eigen::Vector2d base_;
};

// ---------------------------------------------------------------------------
// GprModel: Gaussian process regression over the visual kinematic mapping
// with a squared exponential kernel
//   k(x, x') = sigma_f^2 exp(-|x - x'|^2 / (2 l^2)).
// alpha = (K + sigma_n^2 I)^-1 Y is precomputed via Cholesky at fit time, so
// prediction, variance and the closed-form Jacobian are cheap.
// ---------------------------------------------------------------------------
class GprModel final : public SensoryModel {
 public:
  struct Prediction {
    Eigen::Vector2d mean;
    double variance;  // shared across output dims (same kernel), clamped >= 0
  };

  // Fits alpha to (X, Y). Throws std::invalid_argument on bad hyperparameters,
  // duplicate inputs (pairwise distance < 1e-9) or Cholesky failure.
  static GprModel fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                      double length_scale, double signal_variance,
                      double noise_variance);

  Prediction predict_full(const Eigen::VectorXd& q) const;

  Eigen::Vector2d predict(const Eigen::VectorXd& q) const override {
    return predict_full(q).mean;
  }
  // d mean / d q = sum_i alpha_i dk(q, x_i)/dq,
  // dk(q, x_i)/dq = -k(q, x_i) (q - x_i) / l^2.
  Eigen::Matrix2Xd jacobian(const Eigen::VectorXd& q) const override;
  int n_joints() const override { return static_cast<int>(X_.cols()); }

  const Eigen::MatrixXd& train_inputs() const { return X_; }
  const Eigen::MatrixXd& train_targets() const { return Y_; }
  const Eigen::MatrixXd& alpha() const { return alpha_; }
  // Recomputed noise-free kernel matrix K (diagnostics and tests).
  Eigen::MatrixXd kernel_matrix() const;
  double length_scale() const { return length_scale_; }
  double signal_variance() const { return signal_variance_; }
  double noise_variance() const { return noise_variance_; }

  // Versioned JSON document (fields: X, Y, hyperparameters, alpha).
  void save(std::ostream& out) const;
  static GprModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static GprModel load_file(const std::string& path);

 private:
  GprModel() = default;

  Eigen::VectorXd kernel_vector(const Eigen::VectorXd& q) const;

  Eigen::MatrixXd X_;      // m x n_joints
  Eigen::MatrixXd Y_;      // m x 2
  Eigen::MatrixXd alpha_;  // m x 2
  Eigen::LLT<Eigen::MatrixXd> chol_;  // factor of K + sigma_n^2 I
  double length_scale_ = 0.5;
  double signal_variance_ = 1.0;
  double noise_variance_ = 1e-4;
};

// ---------------------------------------------------------------------------
// LinearDynamics: f_k(z) = A (target_k - z_k) per order; zero for orders the
// target does not cover (or everywhere when there is no target).
// ---------------------------------------------------------------------------
class LinearDynamics final : public DynamicsModel {
 public:
  explicit LinearDynamics(double gain,
                          std::optional<GeneralizedLatent> target = std::nullopt);
  LinearDynamics(Eigen::VectorXd diag_gain,
                 std::optional<GeneralizedLatent> target);

  GeneralizedLatent predict(const GeneralizedLatent& z) const override;
  Eigen::MatrixXd jacobian(const GeneralizedLatent& z) const override;

 private:
  Eigen::VectorXd gain_;  // diagonal of A; broadcast when scalar
  bool scalar_gain_ = false;
  std::optional<GeneralizedLatent> target_;
};

// ---------------------------------------------------------------------------
// AttractorDynamics: goal encoded as a prior over the latent flow,
//   f^0(z) = J_g(z^0)^T (s_d - g(z^0))   for the visual goal component,
//          + (q_d - z^0)                 for the joint goal component;
// higher orders are zero. The sensory-space error is mapped to latent space
// by the transposed Jacobian.
// ---------------------------------------------------------------------------
class AttractorDynamics final : public DynamicsModel {
 public:
  AttractorDynamics(const SensoryModel* sensory, Goal goal);

  GeneralizedLatent predict(const GeneralizedLatent& z) const override;
  // Central finite differences over the stacked state (h = 1e-6).
  Eigen::MatrixXd jacobian(const GeneralizedLatent& z) const override;

  const Goal& goal() const { return goal_; }

 private:
  const SensoryModel* sensory_;  // not owned; required for a visual goal
  Goal goal_;
};

}  // namespace aif

#endif  // AIF_GENMODEL_HPP
