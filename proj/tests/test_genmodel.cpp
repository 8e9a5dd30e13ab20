#include <doctest.h>

#include <random>
#include <sstream>

#include "aif/genmodel.hpp"
#include "fd.hpp"

using namespace aif;
using aif::testing::fd_jacobian;
using aif::testing::rel_error;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Halton points give a deterministic space-filling training set.
double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

Eigen::MatrixXd halton2(int samples, double lo, double hi) {
  Eigen::MatrixXd X(samples, 2);
  for (int s = 0; s < samples; ++s) {
    X(s, 0) = lo + (hi - lo) * halton(s + 1, 2);
    X(s, 1) = lo + (hi - lo) * halton(s + 1, 3);
  }
  return X;
}

GprModel fit_fk_gpr(int samples, const AnalyticFK& fk, double lo, double hi,
                    double l = 0.5, double sf2 = 1.0, double sn2 = 1e-6) {
  const Eigen::MatrixXd X = halton2(samples, lo, hi);
  Eigen::MatrixXd Y(samples, 2);
  for (int i = 0; i < samples; ++i)
    Y.row(i) = fk.predict(X.row(i).transpose()).transpose();
  return GprModel::fit(X, Y, l, sf2, sn2);
}

}  // namespace

// ---------------------------------------------------------------------------
// AnalyticFK
// ---------------------------------------------------------------------------

TEST_CASE("fk_predict planar chain positions") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  CHECK((fk.predict(vec({0, 0})) - Eigen::Vector2d(2, 0)).norm() <= 1e-15);
  CHECK((fk.predict(vec({M_PI_2, 0})) - Eigen::Vector2d(0, 2)).norm() <= 1e-12);
  CHECK((fk.predict(vec({M_PI_2, -M_PI_2})) - Eigen::Vector2d(1, 1)).norm() <=
        1e-12);
}

TEST_CASE("fk_predict rejects dimension mismatch") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  CHECK_THROWS_AS(fk.predict(vec({0.0})), std::invalid_argument);
  CHECK_THROWS_AS(AnalyticFK(vec({1.0, -0.2})), std::invalid_argument);
}

TEST_CASE("fk_jacobian hand cases") {
  const AnalyticFK fk2(vec({1.0, 1.0}));
  const Eigen::Matrix2Xd J = fk2.jacobian(vec({0, 0}));
  CHECK(J(0, 0) == doctest::Approx(0.0));
  CHECK(J(0, 1) == doctest::Approx(0.0));
  CHECK(J(1, 0) == doctest::Approx(2.0));
  CHECK(J(1, 1) == doctest::Approx(1.0));

  const AnalyticFK fk1(vec({1.0}));
  const Eigen::Matrix2Xd J1 = fk1.jacobian(vec({M_PI_2}));
  CHECK(J1(0, 0) == doctest::Approx(-1.0));
  CHECK(J1(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fk_jacobian matches central finite differences") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  const AnalyticFK fk(vec({0.9, 1.2, 0.5}));
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd q(3);
    for (int i = 0; i < 3; ++i) q[i] = u(rng);
    const Eigen::MatrixXd J_fd =
        fd_jacobian([&](const Eigen::VectorXd& x) { return fk.predict(x); }, q);
    CHECK((fk.jacobian(q) - J_fd).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

// ---------------------------------------------------------------------------
// GprModel
// ---------------------------------------------------------------------------

TEST_CASE("gpr interpolates a single training point") {
  Eigen::MatrixXd X(1, 2), Y(1, 2);
  X << 0, 0;
  Y << 2, 0;
  const GprModel m = GprModel::fit(X, Y, 0.5, 1.0, 1e-6);
  const auto p = m.predict_full(vec({0, 0}));
  CHECK((p.mean - Eigen::Vector2d(2, 0)).norm() <= 1e-4);
  // variance collapses at the training point as noise -> 0
  CHECK(p.variance <= 1e-5);
  // Jacobian vanishes at the kernel extremum
  CHECK(m.jacobian(vec({0, 0})).norm() <= 1e-12);
}

TEST_CASE("gpr far from data reverts to the prior") {
  Eigen::MatrixXd X(1, 2), Y(1, 2);
  X << 0, 0;
  Y << 2, 0;
  const GprModel m = GprModel::fit(X, Y, 0.3, 1.7, 1e-4);
  const auto p = m.predict_full(vec({20, 20}));
  CHECK(p.mean.norm() <= 1e-10);
  CHECK(p.variance == doctest::Approx(1.7).epsilon(1e-9));
}

TEST_CASE("gpr fit rejects bad input") {
  Eigen::MatrixXd X(2, 2), Y(2, 2);
  X << 0, 0, 0, 0;  // duplicate rows
  Y << 1, 0, 1, 0;
  CHECK_THROWS_AS(GprModel::fit(X, Y, 0.5, 1.0, 1e-6), std::invalid_argument);
  X << 0, 0, 1, 1;
  CHECK_THROWS_AS(GprModel::fit(X, Y, -0.5, 1.0, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(GprModel::fit(X, Eigen::MatrixXd::Zero(3, 2), 0.5, 1.0, 1e-6),
                  std::invalid_argument);
}

TEST_CASE("gpr kernel matrix is exactly symmetric with sigma_f^2 diagonal") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  const GprModel m = fit_fk_gpr(40, fk, -2.0, 2.0, 0.7, 1.3, 1e-5);
  const Eigen::MatrixXd K = m.kernel_matrix();
  CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index i = 0; i < K.rows(); ++i) CHECK(K(i, i) == 1.3);
}

TEST_CASE("gpr alpha reconstructs the targets") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  const GprModel m = fit_fk_gpr(60, fk, -2.5, 2.5);
  Eigen::MatrixXd Kn = m.kernel_matrix();
  Kn.diagonal().array() += m.noise_variance();
  const double rel = (Kn * m.alpha() - m.train_targets()).norm() /
                     m.train_targets().norm();
  CHECK(rel <= 1e-8);
}

TEST_CASE("gpr tracks the analytic FK oracle on held-out points") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  const GprModel m = fit_fk_gpr(200, fk, -M_PI, M_PI);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd q = vec({u(rng), u(rng)});
    worst = std::max(worst, (m.predict(q) - fk.predict(q)).norm());
  }
  CHECK(worst < 1e-2);
}

TEST_CASE("gpr jacobian matches finite differences of the mean") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  const GprModel m = fit_fk_gpr(120, fk, -2.5, 2.5);
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-2.2, 2.2);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::VectorXd q = vec({u(rng), u(rng)});
    const Eigen::MatrixXd J_fd =
        fd_jacobian([&](const Eigen::VectorXd& x) { return m.predict(x); }, q);
    CHECK(rel_error(Eigen::MatrixXd(m.jacobian(q)), J_fd) <= 1e-5);
  }
}

TEST_CASE("gpr jacobian antisymmetric case between two opposite targets") {
  Eigen::MatrixXd X(2, 1), Y(2, 2);
  X << -0.5, 0.5;
  Y << -1, 0, 1, 0;
  const GprModel m = GprModel::fit(X, Y, 0.5, 1.0, 1e-6);
  const Eigen::VectorXd mid = vec({0.0});
  CHECK(m.predict(mid).norm() <= 1e-12);          // means cancel
  CHECK(std::abs(m.jacobian(mid)(0, 0)) > 0.1);   // slope does not
}

TEST_CASE("gpr variance stays within [0, sigma_f^2]") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  const GprModel m = fit_fk_gpr(80, fk, -2.0, 2.0, 0.5, 2.3, 1e-5);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int i = 0; i < 200; ++i) {
    const auto p = m.predict_full(vec({u(rng), u(rng)}));
    CHECK(p.variance >= 0.0);
    CHECK(p.variance <= 2.3 + 1e-9);
  }
}

TEST_CASE("gpr serialization round-trip") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  const GprModel m = fit_fk_gpr(30, fk, -2.0, 2.0);
  std::stringstream buf;
  m.save(buf);
  const GprModel loaded = GprModel::load(buf);
  const Eigen::VectorXd q = vec({0.4, -1.1});
  CHECK((loaded.predict(q) - m.predict(q)).norm() <= 1e-12);
  CHECK(loaded.length_scale() == m.length_scale());

  // corrupt alpha -> load must reject
  std::stringstream buf2;
  m.save(buf2);
  std::string text = buf2.str();
  const auto pos = text.find("\"alpha\"");
  REQUIRE(pos != std::string::npos);
  // tamper with the version field instead (robust to formatting)
  std::string bad = text;
  const auto vpos = bad.find("\"format_version\": 1");
  REQUIRE(vpos != std::string::npos);
  bad.replace(vpos, 19, "\"format_version\": 9");
  std::stringstream buf3(bad);
  CHECK_THROWS_AS(GprModel::load(buf3), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// LinearDynamics / AttractorDynamics
// ---------------------------------------------------------------------------

TEST_CASE("linear dynamics pulls toward the target per order") {
  GeneralizedLatent target(
      {Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Zero(1)});
  const LinearDynamics f(1.0, target);
  GeneralizedLatent z(
      {Eigen::VectorXd::Constant(1, 0.3), Eigen::VectorXd::Zero(1)});
  const auto out = f.predict(z);
  CHECK(out.order(0)[0] == doctest::Approx(0.2));
  CHECK(out.order(1)[0] == doctest::Approx(0.0));
}

TEST_CASE("linear dynamics without target is the zero model") {
  const LinearDynamics f(2.0);
  const auto z = GeneralizedLatent::zero(3, 1);
  CHECK(f.predict(z).stacked().isZero(0));
  CHECK(f.jacobian(z).isZero(0));
}

TEST_CASE("linear dynamics jacobian is minus the gain") {
  GeneralizedLatent target({Eigen::VectorXd::Zero(2)});
  const LinearDynamics f(Eigen::VectorXd::Constant(2, 2.0), target);
  const auto z = GeneralizedLatent::zero(2, 1);
  const Eigen::MatrixXd J = f.jacobian(z);
  CHECK(J(0, 0) == doctest::Approx(-2.0));
  CHECK(J(1, 1) == doctest::Approx(-2.0));
  // order 1 not covered by the target -> zero rows
  CHECK(J.block(2, 2, 2, 2).isZero(0));

  const LinearDynamics zero_gain(0.0, GeneralizedLatent::zero(2, 0));
  CHECK(zero_gain.jacobian(z).isZero(0));
}

TEST_CASE("attractor is silent at the goal") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  Goal goal;
  goal.desired_visual = fk.predict(vec({0.3, 0.4}));
  const AttractorDynamics f(&fk, goal);
  GeneralizedLatent z({vec({0.3, 0.4}), Eigen::VectorXd::Zero(2)});
  CHECK(f.predict(z).stacked().norm() <= 1e-12);
}

TEST_CASE("attractor pulls along the transposed jacobian") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  Goal goal;
  goal.desired_visual = Eigen::Vector2d(2.0, 0.1);  // straight-arm fk + (0, 0.1)
  const AttractorDynamics f(&fk, goal);
  GeneralizedLatent z({vec({0.0, 0.0}), Eigen::VectorXd::Zero(2)});
  const auto pull = f.predict(z);
  CHECK(pull.order(0)[0] == doctest::Approx(0.2));
  CHECK(pull.order(0)[1] == doctest::Approx(0.1));
  CHECK(pull.order(1).isZero(0));
}

TEST_CASE("attractor with joint goal adds a linear pull") {
  Goal goal;
  goal.desired_joints = vec({0.5, -0.5});
  const AttractorDynamics f(nullptr, goal);
  GeneralizedLatent z({vec({0.1, 0.1}), Eigen::VectorXd::Zero(2)});
  const auto pull = f.predict(z);
  CHECK(pull.order(0)[0] == doctest::Approx(0.4));
  CHECK(pull.order(0)[1] == doctest::Approx(-0.6));
}

TEST_CASE("attractor jacobian matches finite differences") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  Goal goal;
  goal.desired_visual = Eigen::Vector2d(1.2, 0.8);
  goal.desired_joints = vec({0.2, 0.2});
  const AttractorDynamics f(&fk, goal);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd v(4);
    for (int i = 0; i < 4; ++i) v[i] = u(rng);
    const auto z = GeneralizedLatent::from_stacked(v, 2, 1);
    const Eigen::MatrixXd J_fd = fd_jacobian(
        [&](const Eigen::VectorXd& x) {
          return f.predict(GeneralizedLatent::from_stacked(x, 2, 1)).stacked();
        },
        v, 1e-5);
    CHECK((f.jacobian(z) - J_fd).cwiseAbs().maxCoeff() <= 1e-4);
  }
}

TEST_CASE("attractor output is zero iff goal residuals vanish") {
  const AnalyticFK fk(vec({1.0, 1.0}));
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  int checked = 0;
  for (int rep = 0; rep < 200 && checked < 50; ++rep) {
    const Eigen::VectorXd q = vec({u(rng), u(rng)});
    const Eigen::Matrix2Xd J = fk.jacobian(q);
    const double det = (J * J.transpose()).determinant();
    if (std::abs(det) <= 1e-6) continue;  // skip rank-deficient poses
    ++checked;
    Goal goal;
    goal.desired_visual = fk.predict(q) + Eigen::Vector2d(0.01, -0.02);
    const AttractorDynamics f(&fk, goal);
    GeneralizedLatent z({q, Eigen::VectorXd::Zero(2)});
    CHECK(f.predict(z).stacked().norm() > 1e-6);  // nonzero residual -> pull
    Goal at_goal;
    at_goal.desired_visual = fk.predict(q);
    const AttractorDynamics f0(&fk, at_goal);
    CHECK(f0.predict(z).stacked().norm() <= 1e-12);
  }
  CHECK(checked == 50);
}
