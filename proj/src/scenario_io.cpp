// Scenario file parsing (strict key/value text with [sections]) and the
// trial CSV / summary JSON writers.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "aif/experiments.hpp"

namespace aif {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("scenario file: " + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) fail("trailing characters in value for '" + key + "'");
    return d;
  } catch (const std::invalid_argument&) {
    fail("expected number for '" + key + "', got '" + v + "'");
  } catch (const std::out_of_range&) {
    fail("number out of range for '" + key + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d)) fail("expected integer for '" + key + "'");
  return static_cast<long>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail("expected true/false for '" + key + "', got '" + v + "'");
}

Eigen::VectorXd to_vector(const std::string& key, const std::string& v) {
  std::vector<double> vals;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail("empty element in list for '" + key + "'");
    vals.push_back(to_double(key, item));
  }
  if (vals.empty()) fail("empty list for '" + key + "'");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

Eigen::Vector2d to_vector2(const std::string& key, const std::string& v) {
  const Eigen::VectorXd vec = to_vector(key, v);
  if (vec.size() != 2) fail("expected 2 elements for '" + key + "'");
  return vec.head<2>();
}

std::vector<double> to_double_list(const std::string& key,
                                   const std::string& v) {
  const Eigen::VectorXd vec = to_vector(key, v);
  return std::vector<double>(vec.data(), vec.data() + vec.size());
}

struct Entry {
  std::string section, key, value;
};

void apply_world(Scenario& s, const std::string& key, const std::string& v) {
  auto& w = s.world;
  if (key == "links") w.links = to_vector(key, v);
  else if (key == "masses") w.masses = to_vector(key, v);
  else if (key == "gravity") w.gravity = to_double(key, v);
  else if (key == "damping") w.damping = to_double(key, v);
  else if (key == "mode") {
    if (v == "velocity") w.mode = ActionMode::velocity;
    else if (v == "torque") w.mode = ActionMode::torque;
    else fail("mode must be 'velocity' or 'torque'");
  } else if (key == "max_joint_speed") w.max_joint_speed = to_double(key, v);
  else if (key == "sense_velocity") w.sense_velocity = to_bool(key, v);
  else if (key == "noise_proprio_pos") w.noise.proprio_pos = to_double(key, v);
  else if (key == "noise_proprio_vel") w.noise.proprio_vel = to_double(key, v);
  else if (key == "noise_visual") w.noise.visual = to_double(key, v);
  else if (key == "q0") w.q0 = to_vector(key, v);
  else if (key == "joint_min") w.joint_min = to_double(key, v);
  else if (key == "joint_max") w.joint_max = to_double(key, v);
  else fail("unknown key '" + key + "' in section [world]");
}

void apply_agent(Scenario& s, const std::string& key, const std::string& v) {
  auto& a = s.agent;
  if (key == "k_z") a.k_z = to_double(key, v);
  else if (key == "k_a") a.k_a = to_double(key, v);
  else if (key == "dt") a.dt = to_double(key, v);
  else if (key == "max_order") a.max_order = static_cast<int>(to_long(key, v));
  else if (key == "visual_action_channel") a.visual_action_channel = to_bool(key, v);
  else if (key == "action_limit") a.action_limit = to_double(key, v);
  else if (key == "torque_response") a.torque_response = to_double(key, v);
  else if (key == "var_proprio_pos") a.var_proprio_pos = to_double(key, v);
  else if (key == "var_proprio_vel") a.var_proprio_vel = to_double(key, v);
  else if (key == "var_visual") a.var_visual = to_double(key, v);
  else if (key == "var_dyn") a.var_dyn = to_double_list(key, v);
  else if (key == "visual_model") a.visual_model = v;
  else if (key == "gpr_file") a.gpr_file = v;
  else fail("unknown key '" + key + "' in section [agent]");
}

void apply_goal(Scenario& s, const std::string& key, const std::string& v) {
  if (!s.goal) s.goal = Goal{};
  if (key == "visual") s.goal->desired_visual = to_vector2(key, v);
  else if (key == "joints") s.goal->desired_joints = to_vector(key, v);
  else fail("unknown key '" + key + "' in section [goal]");
}

void apply_perturb(Scenario& s, const std::string& key, const std::string& v) {
  auto& p = s.perturb;
  if (key == "visual_shift") {
    p.visual_shift = to_vector2(key, v);
    p.enabled = true;
  } else if (key == "shift_t0") p.shift_t0 = to_long(key, v);
  else if (key == "break_channel") {
    const auto c = channel_from_name(v);
    if (!c) fail("unknown channel '" + v + "' for break_channel");
    // activation step filled by break_t0; default 0
    p.broken_channels[*c] = p.broken_channels.count(*c) ? p.broken_channels[*c] : 0;
  } else if (key == "break_t0") {
    if (p.broken_channels.empty())
      fail("break_t0 given before break_channel");
    for (auto& [c, t] : p.broken_channels) t = to_long(key, v);
  } else fail("unknown key '" + key + "' in section [perturb]");
}

void apply_top(Scenario& s, const std::string& key, const std::string& v) {
  if (key == "name") return;  // consumed up front
  if (key == "trials") s.trials = static_cast<int>(to_long(key, v));
  else if (key == "seed") s.seed = static_cast<std::uint64_t>(to_long(key, v));
  else if (key == "duration") s.duration = to_long(key, v);
  else if (key == "level") s.level = static_cast<int>(to_long(key, v));
  else fail("unknown key '" + key + "'");
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  std::vector<Entry> entries;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail("malformed section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section != "world" && section != "agent" && section != "goal" &&
          section != "perturb")
        fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail("expected 'key = value' at line " + std::to_string(lineno));
    Entry e{section, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (e.key.empty()) fail("empty key at line " + std::to_string(lineno));
    entries.push_back(std::move(e));
  }

  std::string name_value;
  for (const auto& e : entries)
    if (e.section.empty() && e.key == "name") name_value = e.value;
  if (name_value.empty()) fail("missing required key 'name'");
  const auto name = scenario_name_from_string(name_value);
  if (!name) fail("unknown scenario name '" + name_value + "'");

  Scenario s = default_scenario(*name);
  for (const auto& e : entries) {
    if (e.section.empty()) apply_top(s, e.key, e.value);
    else if (e.section == "world") apply_world(s, e.key, e.value);
    else if (e.section == "agent") apply_agent(s, e.key, e.value);
    else if (e.section == "goal") apply_goal(s, e.key, e.value);
    else apply_perturb(s, e.key, e.value);
  }
  s.validate();
  return s;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

// ---------------------------------------------------------------------------
// Trial CSV
// ---------------------------------------------------------------------------

std::string trial_csv_name(const TrialRecord& rec) {
  char buf[64];
  if (rec.label.empty())
    std::snprintf(buf, sizeof buf, "trial_%03d.csv", rec.trial_index);
  else
    std::snprintf(buf, sizeof buf, "trial_%03d_%s.csv", rec.trial_index,
                  rec.label.c_str());
  return buf;
}

void write_trial_csv(const TrialRecord& rec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (rec.rows.empty()) throw std::invalid_argument("trial record has no rows");
  const Eigen::Index n = rec.rows.front().q_true.size();

  out << "step,t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",z0_est_" << i;
  for (Eigen::Index i = 0; i < n; ++i) out << ",q_true_" << i;
  for (Eigen::Index i = 0; i < n; ++i) out << ",action_" << i;
  out << ",vfe,e_proprio,e_visual,perturb_active\n";

  char buf[64];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.10g", v);
    out << buf;
  };
  for (const auto& row : rec.rows) {
    out << row.step;
    put(row.t);
    for (Eigen::Index i = 0; i < n; ++i) put(row.z0_est[i]);
    for (Eigen::Index i = 0; i < n; ++i) put(row.q_true[i]);
    for (Eigen::Index i = 0; i < n; ++i) put(row.action[i]);
    put(row.vfe);
    put(row.e_proprio);
    put(row.e_visual);
    out << ',' << (row.perturb_active ? 1 : 0) << '\n';
  }
}

void write_summary_json(const ScenarioSummary& summary,
                        const std::string& path) {
  nlohmann::json doc;
  doc["scenario"] = summary.scenario;
  doc["trials"] = summary.trials;
  doc["converged"] = summary.converged;
  doc["mean_final_joint_err_rad"] = summary.mean_final_joint_err_rad;
  doc["std_final_joint_err_rad"] = summary.std_final_joint_err_rad;
  doc["mean_final_ee_err_m"] = summary.mean_final_ee_err_m;
  doc["mean_vfe_final"] = summary.mean_vfe_final;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << doc.dump(2) << "\n";
}

std::vector<TrialRecord> run_and_write(const Scenario& s,
                                       const std::string& out_dir, bool quiet) {
  std::filesystem::create_directories(out_dir);
  std::vector<TrialRecord> records = run_scenario(s);
  for (const auto& rec : records) {
    if (!rec.rows.empty())
      write_trial_csv(rec, (std::filesystem::path(out_dir) /
                            trial_csv_name(rec)).string());
  }
  const ScenarioSummary sum = summarize(scenario_name_string(s.name), records);
  write_summary_json(sum, (std::filesystem::path(out_dir) / "summary.json").string());
  if (!quiet) {
    std::cout << "scenario " << sum.scenario << ": " << sum.converged << "/"
              << sum.trials << " converged, mean final joint err "
              << sum.mean_final_joint_err_rad << " rad, mean final ee err "
              << sum.mean_final_ee_err_m << " m\n";
  }
  return records;
}

}  // namespace aif
