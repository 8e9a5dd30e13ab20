// The coupled perception/action integrator. Perception descends the free
// energy in latent space,
//   z <- z + dt (Dz - k_z dF/dz),
// action descends it through the sensory consequences,
//   a <- a + dt (-k_a sum_c (ds_c/da)^T dF/ds_c),
// both with explicit Euler steps at a fixed dt. One agent_tick applies both
// updates from the same pre-tick (z, s) pair.
#ifndef AIF_AGENT_HPP
#define AIF_AGENT_HPP

#include "aif/free_energy.hpp"
#include "aif/genmodel.hpp"
#include "aif/types.hpp"

namespace aif {

struct AgentState {
  GeneralizedLatent z;       // current belief
  Eigen::VectorXd a;         // rad/s in velocity mode, N*m in torque mode
  FreeEnergyReport last_report;
  long step_count = 0;

  static AgentState initial(const GeneralizedLatent& z0);
};

// Per-channel partial derivatives of the sensory consequences of acting,
// ds/da. A velocity command moves the position reading by a*dt, is the
// velocity reading itself, and moves the visual reading through the
// kinematic Jacobian. Torque mode keeps the same shape scaled by an
// effective inverse inertia (cfg.torque_response).
struct SensoryActionJacobian {
  Eigen::MatrixXd proprio_pos;  // n x n
  Eigen::MatrixXd proprio_vel;  // n x n
  Eigen::Matrix2Xd visual;      // 2 x n; zero when the channel is switched off
};

SensoryActionJacobian sensory_action_jacobian(const AgentConfig& cfg,
                                              const ModelSet& models,
                                              const GeneralizedLatent& z);

// One Euler step of the belief. Throws DivergenceError (carrying
// state.step_count) if the update goes non-finite.
GeneralizedLatent perception_step(const AgentState& state, const Observation& s,
                                  const ModelSet& models, const PrecisionSet& P,
                                  const AgentConfig& cfg);

// One Euler step of the action, clamped to +-cfg.action_limit.
Eigen::VectorXd action_step(const AgentState& state, const Observation& s,
                            const ModelSet& models, const PrecisionSet& P,
                            const AgentConfig& cfg);

// Simultaneous perception + action update from the same pre-tick state;
// records the free-energy report and increments step_count.
AgentState agent_tick(const AgentState& state, const Observation& s,
                      const ModelSet& models, const PrecisionSet& P,
                      const AgentConfig& cfg);

}  // namespace aif

#endif  // AIF_AGENT_HPP
