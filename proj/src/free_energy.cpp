#include "aif/free_energy.hpp"

#include <cmath>
#include <limits>

namespace aif {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

FreeEnergyReport vfe(const GeneralizedLatent& z, const Observation& s,
                     const ModelSet& models, const PrecisionSet& P) {
  const int n = z.n_joints();
  const int K = z.max_order();
  const int N = n * (K + 1);
  s.validate(n);
  require(P.n_orders() == K + 1,
          "vfe: PrecisionSet dynamics blocks != max_order + 1");

  FreeEnergyReport rep;
  rep.grad_latent = Eigen::VectorXd::Zero(N);
  rep.proprio_residual_norm = std::numeric_limits<double>::quiet_NaN();
  rep.visual_residual_norm = std::numeric_limits<double>::quiet_NaN();

  // --- sensory residuals, channel by channel -------------------------------
  {
    const auto& blk = P.sensory(Channel::proprio_pos);
    require(blk.sigma.rows() == n, "vfe: proprio_pos block dimension mismatch");
    const Eigen::VectorXd e = s.proprio_pos - z.order(0);
    const Eigen::VectorXd pe = blk.precision * e;
    rep.sensory_term += 0.5 * e.dot(pe);
    rep.logdet_term += 0.5 * blk.logdet;
    rep.grad_latent.segment(0, n) -= pe;
    rep.grad_obs.proprio_pos = pe;
    rep.proprio_residual_norm = e.norm();
  }
  if (s.proprio_vel) {
    require(K >= 1, "vfe: proprio_vel observed but state has no order 1");
    const auto& blk = P.sensory(Channel::proprio_vel);
    require(blk.sigma.rows() == n, "vfe: proprio_vel block dimension mismatch");
    const Eigen::VectorXd e = *s.proprio_vel - z.order(1);
    const Eigen::VectorXd pe = blk.precision * e;
    rep.sensory_term += 0.5 * e.dot(pe);
    rep.logdet_term += 0.5 * blk.logdet;
    rep.grad_latent.segment(n, n) -= pe;
    rep.grad_obs.proprio_vel = pe;
  }
  if (s.visual) {
    require(models.visual != nullptr,
            "vfe: visual observation present but no visual model");
    require(models.visual->n_joints() == n, "vfe: visual model n_joints mismatch");
    const auto& blk = P.sensory(Channel::visual);
    require(blk.sigma.rows() == 2, "vfe: visual block dimension mismatch");
    const Eigen::Vector2d e = *s.visual - models.visual->predict(z.order(0));
    const Eigen::Vector2d pe = blk.precision * e;
    rep.sensory_term += 0.5 * e.dot(pe);
    rep.logdet_term += 0.5 * blk.logdet;
    rep.grad_latent.segment(0, n) -=
        models.visual->jacobian(z.order(0)).transpose() * pe;
    rep.grad_obs.visual = pe;
    rep.visual_residual_norm = e.norm();
  }

  // --- dynamics residual e_z = Dz - f(z) ------------------------------------
  const GeneralizedLatent Dz = shift_orders(z);
  Eigen::VectorXd e_z(N);
  if (models.dynamics) {
    const GeneralizedLatent f = models.dynamics->predict(z);
    require(f.same_shape(z), "vfe: dynamics model output shape mismatch");
    e_z = Dz.stacked() - f.stacked();
  } else {
    e_z = Dz.stacked();
  }
  Eigen::VectorXd pe_z(N);
  for (int k = 0; k <= K; ++k) {
    const auto& blk = P.dynamics(k);
    require(blk.sigma.rows() == n, "vfe: dynamics block dimension mismatch");
    pe_z.segment(static_cast<Eigen::Index>(k) * n, n) =
        blk.precision * e_z.segment(static_cast<Eigen::Index>(k) * n, n);
    rep.logdet_term += 0.5 * blk.logdet;
  }
  rep.dynamics_term = 0.5 * e_z.dot(pe_z);

  // (D - J_f)^T Sz^-1 e_z; D^T shifts the weighted residual down one order.
  for (int k = 1; k <= K; ++k)
    rep.grad_latent.segment(static_cast<Eigen::Index>(k) * n, n) +=
        pe_z.segment(static_cast<Eigen::Index>(k - 1) * n, n);
  if (models.dynamics)
    rep.grad_latent -= models.dynamics->jacobian(z).transpose() * pe_z;

  rep.value = rep.sensory_term + rep.dynamics_term + rep.logdet_term;
  return rep;
}

Eigen::VectorXd grad_vfe_latent(const GeneralizedLatent& z, const Observation& s,
                                const ModelSet& models, const PrecisionSet& P) {
  return vfe(z, s, models, P).grad_latent;
}

ObsGradient grad_vfe_obs(const GeneralizedLatent& z, const Observation& s,
                         const ModelSet& models, const PrecisionSet& P) {
  return vfe(z, s, models, P).grad_obs;
}

}  // namespace aif
