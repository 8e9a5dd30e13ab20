#include <doctest.h>

#include <cmath>

#include "aif/simulator.hpp"

using namespace aif;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

WorldInit basic_init(std::initializer_list<double> q,
                     std::initializer_list<double> links,
                     std::initializer_list<double> masses) {
  WorldInit w;
  w.q = vec(q);
  w.link_lengths = vec(links);
  w.link_masses = vec(masses);
  w.gravity = 0.0;
  w.damping = 0.0;
  return w;
}

}  // namespace

TEST_CASE("velocity mode with zero action is an exact fixed point") {
  WorldInit init = basic_init({0.4, -0.2}, {1.0, 1.0}, {1.0, 1.0});
  ArmWorld w(init);
  const Eigen::VectorXd q0 = w.q();
  for (int i = 0; i < 50; ++i) w.step(Eigen::VectorXd::Zero(2), 0.01);
  CHECK(w.q() == q0);
  CHECK(w.qdot().isZero(0));
}

TEST_CASE("velocity commands are clamped to max joint speed") {
  WorldInit init = basic_init({0.0}, {1.0}, {1.0});
  init.max_joint_speed = 2.0;
  ArmWorld w(init);
  w.step(vec({100.0}), 0.01);
  CHECK(w.qdot()[0] == 2.0);
  CHECK(w.q()[0] == doctest::Approx(0.02));
}

TEST_CASE("torque mode without forces holds still") {
  WorldInit init = basic_init({0.3, 0.7}, {1.0, 1.0}, {1.0, 1.0});
  init.mode = ActionMode::torque;
  ArmWorld w(init);
  for (int i = 0; i < 100; ++i) w.step(Eigen::VectorXd::Zero(2), 0.01);
  CHECK((w.q() - vec({0.3, 0.7})).norm() == 0.0);
}

TEST_CASE("gravity torque hand case: horizontal single link") {
  // 1 link, m=1, L=1, q=pi/2 (horizontal from the hanging rest pose):
  // angular acceleration = -g (L/2) m / I with I = m L^2 -> -4.905
  WorldInit init = basic_init({M_PI_2}, {1.0}, {1.0});
  init.mode = ActionMode::torque;
  init.gravity = 9.81;
  ArmWorld w(init);
  CHECK(w.inertia()[0] == doctest::Approx(1.0));
  CHECK(w.gravity_torque(vec({M_PI_2}))[0] == doctest::Approx(-4.905));

  const double dt = 1e-3;
  w.step(vec({0.0}), dt);
  CHECK(w.qdot()[0] == doctest::Approx(-4.905 * dt).epsilon(1e-9));
}

TEST_CASE("gravity torque vanishes at the stable and inverted poses") {
  WorldInit init = basic_init({0.0}, {1.0}, {1.0});
  init.mode = ActionMode::torque;
  init.gravity = 9.81;
  ArmWorld w(init);
  CHECK(std::abs(w.gravity_torque(vec({0.0}))[0]) <= 1e-12);
  CHECK(std::abs(w.gravity_torque(vec({M_PI}))[0]) <= 1e-12);
  // restoring direction on either side of the rest pose
  CHECK(w.gravity_torque(vec({0.3}))[0] < 0.0);
  CHECK(w.gravity_torque(vec({-0.3}))[0] > 0.0);
}

TEST_CASE("lumped inertia formula") {
  WorldInit init = basic_init({0.0, 0.0}, {1.0, 0.8}, {0.5, 0.3});
  init.mode = ActionMode::torque;
  ArmWorld w(init);
  // I_1 = m1 L1^2 + m2 (L1+L2)^2, I_2 = m2 (L1+L2)^2
  CHECK(w.inertia()[0] == doctest::Approx(0.5 * 1.0 + 0.3 * 1.8 * 1.8));
  CHECK(w.inertia()[1] == doctest::Approx(0.3 * 1.8 * 1.8));
}

TEST_CASE("kinetic energy decays under damping alone") {
  WorldInit init = basic_init({0.2, -0.4}, {1.0, 1.0}, {1.0, 1.0});
  init.mode = ActionMode::torque;
  init.damping = 0.5;
  init.qdot = vec({1.0, -0.8});
  ArmWorld w(init);
  const auto energy = [&]() {
    return 0.5 * (w.inertia().array() * w.qdot().array().square()).sum();
  };
  double prev = energy();
  for (int i = 0; i < 500; ++i) {
    w.step(Eigen::VectorXd::Zero(2), 0.01);
    const double e = energy();
    CHECK(e <= prev + 1e-15);
    prev = e;
  }
}

TEST_CASE("observe: clean channels and the visual map") {
  WorldInit init = basic_init({0.0, 0.0}, {1.0, 1.0}, {1.0, 1.0});
  ArmWorld w(init);
  const Observation s = w.observe();
  CHECK((s.proprio_pos - vec({0.0, 0.0})).norm() == 0.0);
  REQUIRE(s.proprio_vel.has_value());
  REQUIRE(s.visual.has_value());
  CHECK((*s.visual - Eigen::Vector2d(2.0, 0.0)).norm() == 0.0);
}

TEST_CASE("observe: visual shift applies from its activation step") {
  WorldInit init = basic_init({0.0, 0.0}, {1.0, 1.0}, {1.0, 1.0});
  init.perturbation.enabled = true;
  init.perturbation.visual_shift = Eigen::Vector2d(0.1, 0.0);
  init.perturbation.shift_t0 = 2;
  ArmWorld w(init);
  CHECK((*w.observe().visual - Eigen::Vector2d(2.0, 0.0)).norm() == 0.0);
  w.step(Eigen::VectorXd::Zero(2), 0.01);
  w.step(Eigen::VectorXd::Zero(2), 0.01);
  CHECK(w.perturbation_active());
  CHECK((*w.observe().visual - Eigen::Vector2d(2.1, 0.0)).norm() <= 1e-15);
}

TEST_CASE("observe: broken channels vanish") {
  WorldInit init = basic_init({0.0, 0.0}, {1.0, 1.0}, {1.0, 1.0});
  init.perturbation.broken_channels[Channel::visual] = 1;
  ArmWorld w(init);
  CHECK(w.observe().visual.has_value());
  w.step(Eigen::VectorXd::Zero(2), 0.01);
  CHECK_FALSE(w.observe().visual.has_value());
  CHECK(w.observe().proprio_vel.has_value());

  WorldInit no_vel = basic_init({0.0}, {1.0}, {1.0});
  no_vel.sense_velocity = false;
  ArmWorld w2(no_vel);
  CHECK_FALSE(w2.observe().proprio_vel.has_value());
}

TEST_CASE("proprio_pos cannot be marked broken") {
  WorldInit init = basic_init({0.0}, {1.0}, {1.0});
  init.perturbation.broken_channels[Channel::proprio_pos] = 0;
  CHECK_THROWS_AS(ArmWorld{init}, std::invalid_argument);
}

TEST_CASE("seeded worlds reproduce trajectories bitwise") {
  const auto run = [] {
    WorldInit init = basic_init({0.1, 0.2}, {1.0, 1.0}, {1.0, 1.0});
    init.noise = {0.05, 0.02, 0.01};
    init.rng_seed = 1234;
    ArmWorld w(init);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
    double vsum = 0;
    for (int i = 0; i < 200; ++i) {
      const Observation s = w.observe();
      sum += s.proprio_pos;
      vsum += s.visual->x();
      w.step(vec({0.3, -0.1}), 0.01);
    }
    return std::make_pair(sum, vsum);
  };
  const auto a = run(), b = run();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}

TEST_CASE("noise statistics match the configured std dev") {
  WorldInit init = basic_init({0.0}, {1.0}, {1.0});
  init.noise.proprio_pos = 0.05;
  init.rng_seed = 99;
  ArmWorld w(init);
  const int samples = 100000;
  double sum = 0, sq = 0;
  for (int i = 0; i < samples; ++i) {
    const double v = w.observe().proprio_pos[0];
    sum += v;
    sq += v * v;
  }
  const double mean = sum / samples;
  const double std_dev = std::sqrt(sq / samples - mean * mean);
  CHECK(std::abs(std_dev - 0.05) <= 0.02 * 0.05);
}

TEST_CASE("simulation blow-up raises DivergenceError") {
  WorldInit init = basic_init({0.0}, {1.0}, {0.5});
  init.mode = ActionMode::torque;
  ArmWorld w(init);
  CHECK_THROWS_AS(w.step(vec({1e308}), 0.01), DivergenceError);
}
