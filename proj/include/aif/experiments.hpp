// Scenario runner binding agent, generative models and the simulated arm:
// estimation under noise, attractor-driven reaching, visual-shift
// adaptation, the gravity-change (Jupiter) comparison, broken-sensor
// continuity and model-evidence self-recognition. Emits per-trial CSV logs
// and a per-scenario JSON summary.
#ifndef AIF_EXPERIMENTS_HPP
#define AIF_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "aif/agent.hpp"
#include "aif/selfhood.hpp"
#include "aif/simulator.hpp"

namespace aif {

enum class ScenarioName {
  estimation_noise,
  reaching,
  visual_shift_adaptation,
  jupiter,
  broken_sensor,
  self_recognition,
};

// Gravity pair for the gravity-change comparison: Earth baseline vs the
// raised value the controller must absorb with an unchanged model.
inline constexpr double kBaselineGravity = 9.81;
inline constexpr double kJupiterGravity = 24.79;

std::string scenario_name_string(ScenarioName n);
std::optional<ScenarioName> scenario_name_from_string(const std::string& s);

struct WorldConfig {
  Eigen::VectorXd links = (Eigen::VectorXd(2) << 1.0, 1.0).finished();
  Eigen::VectorXd masses = (Eigen::VectorXd(2) << 1.0, 1.0).finished();
  double gravity = 9.81;
  double damping = 1.0;
  ActionMode mode = ActionMode::velocity;
  double max_joint_speed = 2.0;
  bool sense_velocity = true;
  NoiseSpec noise{0.05, 0.05, 0.01};
  Eigen::VectorXd q0;  // empty -> sampled per trial within joint limits
  double joint_min = -M_PI;
  double joint_max = M_PI;
};

struct AgentSetup {
  double k_z = 1.0;
  double k_a = 10.0;
  double dt = 0.01;
  int max_order = 1;
  bool visual_action_channel = true;
  // Unset -> mode default (2 rad/s velocity, 10 N*m torque).
  std::optional<double> action_limit;
  double torque_response = 1.0;
  // Agent-side covariance scales (diagonal blocks).
  double var_proprio_pos = 1.0;
  std::optional<double> var_proprio_vel = 0.1;
  std::optional<double> var_visual = 1.0;
  std::vector<double> var_dyn{0.1, 1.0};
  // Visual generative model: "analytic" or "gpr" (then gpr_file is required).
  std::string visual_model = "analytic";
  std::string gpr_file;
};

struct Scenario {
  ScenarioName name = ScenarioName::estimation_noise;
  WorldConfig world;
  AgentSetup agent;
  std::optional<Goal> goal;   // empty -> scenario-specific per-trial sampling
  PerturbationSpec perturb;
  int trials = 1;
  std::uint64_t seed = 0;
  long duration = 500;
  int level = 1;  // estimation-noise prior-offset difficulty (1..3)

  void validate() const;  // throws std::invalid_argument
};

// Tuned defaults per experiment family; scenario files override from here.
Scenario default_scenario(ScenarioName name);

struct StepRow {
  long step = 0;
  double t = 0.0;
  Eigen::VectorXd z0_est;
  Eigen::VectorXd q_true;
  Eigen::VectorXd action;
  double vfe = 0.0;
  double e_proprio = 0.0;
  double e_visual = 0.0;  // NaN while the channel is absent
  bool perturb_active = false;
};

struct TrialRecord {
  int trial_index = 0;
  std::string label;  // "" normally; "baseline"/"jupiter" for gravity runs
  std::vector<StepRow> rows;
  std::optional<Goal> goal;
  double final_joint_err = 0.0;   // rad; belief or tracking error (scenario-specific)
  double final_ee_err = 0.0;      // m
  double mean_tracking_err = 0.0; // rad; steady-state window (jupiter)
  double mean_evidence = 0.0;     // nats; final window mean (self-recognition)
  bool converged = false;
};

// Runs trial-count independently seeded trials with the scenario wiring.
std::vector<TrialRecord> run_scenario(const Scenario& s);

struct ScenarioSummary {
  std::string scenario;
  int trials = 0;
  int converged = 0;
  double mean_final_joint_err_rad = 0.0;
  double std_final_joint_err_rad = 0.0;
  double mean_final_ee_err_m = 0.0;
  double mean_vfe_final = 0.0;
  std::vector<double> mean_vfe_trajectory;  // per step, averaged over trials
};

ScenarioSummary summarize(const std::string& scenario_name,
                          const std::vector<TrialRecord>& records);

// --- scenario/result file formats ------------------------------------------

// Strict key/value text with nested [sections]; unknown keys are errors.
Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text);

std::string trial_csv_name(const TrialRecord& rec);
void write_trial_csv(const TrialRecord& rec, const std::string& path);
void write_summary_json(const ScenarioSummary& summary, const std::string& path);

// run + write CSVs/summary into out_dir; returns the records.
std::vector<TrialRecord> run_and_write(const Scenario& s,
                                       const std::string& out_dir,
                                       bool quiet = false);

// Deterministic seed derivation for trial substreams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t index);

}  // namespace aif

#endif  // AIF_EXPERIMENTS_HPP
