// Laplace-approximated variational free energy and its analytic gradients.
//
//   F = 1/2 e_s^T Sx^-1 e_s + 1/2 e_z^T Sz^-1 e_z + 1/2 ln|Sx| + 1/2 ln|Sz|
//
// with sensory residual e_s = s - g(z) stacked over the channels present in
// the observation (proprio_pos predicts z^0, proprio_vel predicts z^1,
// visual predicts g_v(z^0)) and dynamics residual e_z = Dz - f(z). Channels
// absent from the observation are marginalized out: dropped from e_s and
// from the log-determinant.
#ifndef AIF_FREE_ENERGY_HPP
#define AIF_FREE_ENERGY_HPP

#include "aif/genmodel.hpp"
#include "aif/types.hpp"

namespace aif {

// Per-channel gradient of F with respect to the observation,
// dF/ds_c = Sx_c^-1 (s_c - g_c(z)). Channels absent from s are nullopt.
struct ObsGradient {
  std::optional<Eigen::VectorXd> proprio_pos;
  std::optional<Eigen::VectorXd> proprio_vel;
  std::optional<Eigen::Vector2d> visual;
};

struct FreeEnergyReport {
  double value = 0.0;          // nats; sensory + dynamics + logdet
  double sensory_term = 0.0;   // 1/2 e_s^T Sx^-1 e_s
  double dynamics_term = 0.0;  // 1/2 e_z^T Sz^-1 e_z
  double logdet_term = 0.0;    // 1/2 ln|Sx| + 1/2 ln|Sz| (present blocks only)
  Eigen::VectorXd grad_latent; // dF/dz, stacked order-major
  ObsGradient grad_obs;
  // Residual norms per channel for logging; NaN when the channel is absent.
  double proprio_residual_norm = 0.0;
  double visual_residual_norm = 0.0;
};

// Full evaluation: value, both gradients and the term split in one pass.
// Throws std::invalid_argument on dimension mismatch or non-finite input.
FreeEnergyReport vfe(const GeneralizedLatent& z, const Observation& s,
                     const ModelSet& models, const PrecisionSet& P);

// dF/dz = -J_g^T Sx^-1 e_s + (D - J_f)^T Sz^-1 e_z, stacked order-major.
Eigen::VectorXd grad_vfe_latent(const GeneralizedLatent& z, const Observation& s,
                                const ModelSet& models, const PrecisionSet& P);

ObsGradient grad_vfe_obs(const GeneralizedLatent& z, const Observation& s,
                         const ModelSet& models, const PrecisionSet& P);

}  // namespace aif

#endif  // AIF_FREE_ENERGY_HPP
