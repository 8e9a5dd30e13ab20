#include "aif/agent.hpp"

#include <cmath>

namespace aif {

AgentState AgentState::initial(const GeneralizedLatent& z0) {
  AgentState st{z0, Eigen::VectorXd::Zero(z0.n_joints()), {}, 0};
  st.last_report.grad_latent =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(z0.n_joints()) *
                            (z0.max_order() + 1));
  return st;
}

SensoryActionJacobian sensory_action_jacobian(const AgentConfig& cfg,
                                              const ModelSet& models,
                                              const GeneralizedLatent& z) {
  const int n = cfg.n_joints;
  const double scale =
      cfg.action_mode == ActionMode::torque ? cfg.torque_response : 1.0;
  SensoryActionJacobian J;
  J.proprio_pos = scale * cfg.dt * Eigen::MatrixXd::Identity(n, n);
  J.proprio_vel = scale * Eigen::MatrixXd::Identity(n, n);
  if (cfg.visual_action_channel && models.visual != nullptr)
    J.visual = scale * cfg.dt * models.visual->jacobian(z.order(0));
  else
    J.visual = Eigen::Matrix2Xd::Zero(2, n);
  return J;
}

namespace {

GeneralizedLatent integrate_belief(const AgentState& state,
                                   const FreeEnergyReport& rep,
                                   const AgentConfig& cfg) {
  if (!rep.grad_latent.allFinite())
    throw DivergenceError("perception_step: non-finite free-energy gradient",
                          state.step_count);
  const Eigen::VectorXd dz =
      shift_orders(state.z).stacked() - cfg.k_z * rep.grad_latent;
  const Eigen::VectorXd next = state.z.stacked() + cfg.dt * dz;
  if (!next.allFinite())
    throw DivergenceError("perception_step: non-finite belief update",
                          state.step_count);
  return GeneralizedLatent::from_stacked(next, state.z.n_joints(),
                                         state.z.max_order());
}

Eigen::VectorXd integrate_action(const AgentState& state, const Observation& s,
                                 const FreeEnergyReport& rep,
                                 const ModelSet& models,
                                 const AgentConfig& cfg) {
  const SensoryActionJacobian dsda =
      sensory_action_jacobian(cfg, models, state.z);
  Eigen::VectorXd a_dot = Eigen::VectorXd::Zero(cfg.n_joints);
  if ((rep.grad_obs.proprio_pos && !rep.grad_obs.proprio_pos->allFinite()) ||
      (rep.grad_obs.proprio_vel && !rep.grad_obs.proprio_vel->allFinite()) ||
      (rep.grad_obs.visual && !rep.grad_obs.visual->allFinite()))
    throw DivergenceError("action_step: non-finite sensory gradient",
                          state.step_count);
  if (rep.grad_obs.proprio_pos)
    a_dot -= dsda.proprio_pos.transpose() * *rep.grad_obs.proprio_pos;
  if (s.proprio_vel && rep.grad_obs.proprio_vel)
    a_dot -= dsda.proprio_vel.transpose() * *rep.grad_obs.proprio_vel;
  if (s.visual && rep.grad_obs.visual)
    a_dot -= dsda.visual.transpose() * *rep.grad_obs.visual;
  a_dot *= cfg.k_a;

  Eigen::VectorXd a = state.a + cfg.dt * a_dot;
  if (!a.allFinite())
    throw DivergenceError("action_step: non-finite action update",
                          state.step_count);
  return a.cwiseMax(-cfg.action_limit).cwiseMin(cfg.action_limit);
}

}  // namespace

GeneralizedLatent perception_step(const AgentState& state, const Observation& s,
                                  const ModelSet& models, const PrecisionSet& P,
                                  const AgentConfig& cfg) {
  cfg.validate();
  return integrate_belief(state, vfe(state.z, s, models, P), cfg);
}

Eigen::VectorXd action_step(const AgentState& state, const Observation& s,
                            const ModelSet& models, const PrecisionSet& P,
                            const AgentConfig& cfg) {
  cfg.validate();
  return integrate_action(state, s, vfe(state.z, s, models, P), models, cfg);
}

AgentState agent_tick(const AgentState& state, const Observation& s,
                      const ModelSet& models, const PrecisionSet& P,
                      const AgentConfig& cfg) {
  cfg.validate();
  // One shared evaluation; both updates read the same pre-tick (z, s).
  const FreeEnergyReport rep = vfe(state.z, s, models, P);
  AgentState next{integrate_belief(state, rep, cfg),
                  integrate_action(state, s, rep, models, cfg), rep,
                  state.step_count + 1};
  return next;
}

}  // namespace aif
