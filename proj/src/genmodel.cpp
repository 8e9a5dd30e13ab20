#include "aif/genmodel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aif {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// AnalyticFK
// ---------------------------------------------------------------------------

AnalyticFK::AnalyticFK(Eigen::VectorXd link_lengths, Eigen::Vector2d base)
    : links_(std::move(link_lengths)), base_(std::move(base)) {
  require(links_.size() >= 1, "AnalyticFK: needs at least one link");
  require(links_.allFinite() && (links_.array() > 0).all(),
          "AnalyticFK: link lengths must be positive and finite");
  require(base_.allFinite(), "AnalyticFK: non-finite base");
}

Eigen::Vector2d AnalyticFK::predict(const Eigen::VectorXd& q) const {
  require(q.size() == links_.size(), "AnalyticFK: q length != link count");
  Eigen::Vector2d p = base_;
  double angle = 0.0;
  for (Eigen::Index i = 0; i < links_.size(); ++i) {
    angle += q[i];
    p.x() += links_[i] * std::cos(angle);
    p.y() += links_[i] * std::sin(angle);
  }
  return p;
}

Eigen::Matrix2Xd AnalyticFK::jacobian(const Eigen::VectorXd& q) const {
  require(q.size() == links_.size(), "AnalyticFK: q length != link count");
  const Eigen::Index n = links_.size();
  // Cumulative angles, then dx/dq_j = -sum_{i>=j} L_i sin(theta_i),
  // dy/dq_j = sum_{i>=j} L_i cos(theta_i). Accumulate from the tip backwards.
  Eigen::Matrix2Xd J(2, n);
  double angle = 0.0;
  std::vector<double> lc(n), ls(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    angle += q[i];
    lc[i] = links_[i] * std::cos(angle);
    ls[i] = links_[i] * std::sin(angle);
  }
  double sum_c = 0.0, sum_s = 0.0;
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    sum_c += lc[j];
    sum_s += ls[j];
    J(0, j) = -sum_s;
    J(1, j) = sum_c;
  }
  return J;
}

// ---------------------------------------------------------------------------
// GprModel
// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXd se_kernel_matrix(const Eigen::MatrixXd& X, double l2,
                                 double sf2) {
  const Eigen::Index m = X.rows();
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    K(i, i) = sf2;  // zero distance: exactly sigma_f^2
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double d2 = (X.row(i) - X.row(j)).squaredNorm();
      const double v = sf2 * std::exp(-d2 / (2.0 * l2));
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

}  // namespace

GprModel GprModel::fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                       double length_scale, double signal_variance,
                       double noise_variance) {
  require(X.rows() >= 1, "GprModel::fit: needs at least one training point");
  require(Y.rows() == X.rows() && Y.cols() == 2,
          "GprModel::fit: Y must be m x 2");
  require(X.allFinite() && Y.allFinite(), "GprModel::fit: non-finite data");
  require(length_scale > 0 && signal_variance > 0 && noise_variance > 0,
          "GprModel::fit: hyperparameters must be > 0");
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = i + 1; j < X.rows(); ++j)
      require((X.row(i) - X.row(j)).norm() >= 1e-9,
              "GprModel::fit: duplicate training inputs (rows " +
                  std::to_string(i) + ", " + std::to_string(j) + ")");

  GprModel m;
  m.X_ = X;
  m.Y_ = Y;
  m.length_scale_ = length_scale;
  m.signal_variance_ = signal_variance;
  m.noise_variance_ = noise_variance;

  Eigen::MatrixXd K =
      se_kernel_matrix(X, length_scale * length_scale, signal_variance);
  K.diagonal().array() += noise_variance;
  m.chol_.compute(K);
  if (m.chol_.info() != Eigen::Success)
    throw std::invalid_argument(
        "GprModel::fit: kernel matrix not positive definite (degenerate "
        "hyperparameters or near-duplicate inputs)");
  m.alpha_ = m.chol_.solve(Y);
  return m;
}

Eigen::MatrixXd GprModel::kernel_matrix() const {
  return se_kernel_matrix(X_, length_scale_ * length_scale_, signal_variance_);
}

Eigen::VectorXd GprModel::kernel_vector(const Eigen::VectorXd& q) const {
  require(q.size() == X_.cols(), "GprModel: q length != training input width");
  const double l2 = length_scale_ * length_scale_;
  Eigen::VectorXd k(X_.rows());
  for (Eigen::Index i = 0; i < X_.rows(); ++i) {
    const double d2 = (X_.row(i).transpose() - q).squaredNorm();
    k[i] = signal_variance_ * std::exp(-d2 / (2.0 * l2));
  }
  return k;
}

GprModel::Prediction GprModel::predict_full(const Eigen::VectorXd& q) const {
  const Eigen::VectorXd k = kernel_vector(q);
  Prediction p;
  p.mean = (k.transpose() * alpha_).transpose();
  // sigma_f^2 - k^T (K + sigma_n^2 I)^-1 k; floating-point cancellation can
  // push this slightly negative, clamp at zero.
  p.variance = std::max(0.0, signal_variance_ - k.dot(chol_.solve(k)));
  return p;
}

Eigen::Matrix2Xd GprModel::jacobian(const Eigen::VectorXd& q) const {
  const Eigen::VectorXd k = kernel_vector(q);
  const double l2 = length_scale_ * length_scale_;
  // dk_i/dq = -k_i (q - x_i) / l^2; stack rows into dK (m x n).
  Eigen::MatrixXd dK(X_.rows(), X_.cols());
  for (Eigen::Index i = 0; i < X_.rows(); ++i)
    dK.row(i) = -k[i] / l2 * (q.transpose() - X_.row(i));
  return (alpha_.transpose() * dK);
}

namespace {
constexpr int kGprFormatVersion = 1;

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("GprModel: malformed matrix in document");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw std::invalid_argument("GprModel: ragged matrix in document");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}
}  // namespace

void GprModel::save(std::ostream& out) const {
  nlohmann::json doc;
  doc["format_version"] = kGprFormatVersion;
  doc["length_scale"] = length_scale_;
  doc["signal_variance"] = signal_variance_;
  doc["noise_variance"] = noise_variance_;
  doc["train_inputs"] = matrix_to_json(X_);
  doc["train_targets"] = matrix_to_json(Y_);
  doc["alpha"] = matrix_to_json(alpha_);
  out << doc.dump(2) << "\n";
}

GprModel GprModel::load(std::istream& in) {
  nlohmann::json doc = nlohmann::json::parse(in);
  const int version = doc.at("format_version").get<int>();
  if (version != kGprFormatVersion)
    throw std::invalid_argument("GprModel: unsupported format version " +
                                std::to_string(version));
  // Refit from the stored data, then check the stored alpha against the
  // recomputed one: (K + sigma_n^2 I) alpha must reconstruct Y.
  GprModel m = fit(matrix_from_json(doc.at("train_inputs")),
                   matrix_from_json(doc.at("train_targets")),
                   doc.at("length_scale").get<double>(),
                   doc.at("signal_variance").get<double>(),
                   doc.at("noise_variance").get<double>());
  const Eigen::MatrixXd stored_alpha = matrix_from_json(doc.at("alpha"));
  if (stored_alpha.rows() != m.alpha_.rows() ||
      stored_alpha.cols() != m.alpha_.cols())
    throw std::invalid_argument("GprModel: alpha shape mismatch in document");
  const double rel = (stored_alpha - m.alpha_).norm() /
                     std::max(1e-30, m.alpha_.norm());
  if (rel > 1e-8)
    throw std::invalid_argument(
        "GprModel: stored alpha inconsistent with training data");
  return m;
}

void GprModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("GprModel: cannot open " + path);
  save(out);
}

GprModel GprModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("GprModel: cannot open " + path);
  return load(in);
}

// ---------------------------------------------------------------------------
// LinearDynamics
// ---------------------------------------------------------------------------

LinearDynamics::LinearDynamics(double gain,
                               std::optional<GeneralizedLatent> target)
    : gain_(Eigen::VectorXd::Constant(1, gain)),
      scalar_gain_(true),
      target_(std::move(target)) {
  require(std::isfinite(gain), "LinearDynamics: gain must be finite");
}

LinearDynamics::LinearDynamics(Eigen::VectorXd diag_gain,
                               std::optional<GeneralizedLatent> target)
    : gain_(std::move(diag_gain)), target_(std::move(target)) {
  require(gain_.size() >= 1 && gain_.allFinite(),
          "LinearDynamics: gain must be finite and non-empty");
  if (target_)
    require(gain_.size() == target_->n_joints(),
            "LinearDynamics: gain size != target n_joints");
}

GeneralizedLatent LinearDynamics::predict(const GeneralizedLatent& z) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(z.max_order() + 1);
  for (int k = 0; k <= z.max_order(); ++k) {
    if (target_ && k <= target_->max_order()) {
      require(target_->n_joints() == z.n_joints(),
              "LinearDynamics: target/state n_joints mismatch");
      const Eigen::VectorXd err = target_->order(k) - z.order(k);
      if (scalar_gain_)
        out.push_back(gain_[0] * err);
      else
        out.push_back(gain_.asDiagonal() * err);
    } else {
      out.push_back(Eigen::VectorXd::Zero(z.n_joints()));
    }
  }
  return GeneralizedLatent(std::move(out));
}

Eigen::MatrixXd LinearDynamics::jacobian(const GeneralizedLatent& z) const {
  const int n = z.n_joints();
  const int N = n * (z.max_order() + 1);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
  if (!target_) return J;
  for (int k = 0; k <= std::min(z.max_order(), target_->max_order()); ++k) {
    auto block = J.block(static_cast<Eigen::Index>(k) * n,
                         static_cast<Eigen::Index>(k) * n, n, n);
    if (scalar_gain_)
      block = -gain_[0] * Eigen::MatrixXd::Identity(n, n);
    else
      block = Eigen::MatrixXd((-gain_).asDiagonal());
  }
  return J;
}

// ---------------------------------------------------------------------------
// AttractorDynamics
// ---------------------------------------------------------------------------

AttractorDynamics::AttractorDynamics(const SensoryModel* sensory, Goal goal)
    : sensory_(sensory), goal_(std::move(goal)) {
  goal_.validate();
  if (goal_.desired_visual)
    require(sensory_ != nullptr,
            "AttractorDynamics: visual goal requires a sensory model");
}

GeneralizedLatent AttractorDynamics::predict(const GeneralizedLatent& z) const {
  Eigen::VectorXd pull = Eigen::VectorXd::Zero(z.n_joints());
  if (goal_.desired_visual) {
    const Eigen::VectorXd& q = z.order(0);
    const Eigen::Vector2d residual = *goal_.desired_visual - sensory_->predict(q);
    pull += sensory_->jacobian(q).transpose() * residual;
  }
  if (goal_.desired_joints) {
    require(goal_.desired_joints->size() == z.n_joints(),
            "AttractorDynamics: joint goal length != n_joints");
    pull += *goal_.desired_joints - z.order(0);
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(z.max_order() + 1);
  out.push_back(std::move(pull));
  for (int k = 1; k <= z.max_order(); ++k)
    out.push_back(Eigen::VectorXd::Zero(z.n_joints()));
  return GeneralizedLatent(std::move(out));
}

Eigen::MatrixXd AttractorDynamics::jacobian(const GeneralizedLatent& z) const {
  // The analytic form needs the second derivative of g; central differences
  // on the stacked state are accurate enough at this scale.
  const double h = 1e-6;
  const int n = z.n_joints();
  const int N = n * (z.max_order() + 1);
  const Eigen::VectorXd base = z.stacked();
  Eigen::MatrixXd J(N, N);
  for (int c = 0; c < N; ++c) {
    Eigen::VectorXd plus = base, minus = base;
    plus[c] += h;
    minus[c] -= h;
    const Eigen::VectorXd fp =
        predict(GeneralizedLatent::from_stacked(plus, n, z.max_order())).stacked();
    const Eigen::VectorXd fm =
        predict(GeneralizedLatent::from_stacked(minus, n, z.max_order())).stacked();
    J.col(c) = (fp - fm) / (2.0 * h);
  }
  return J;
}

}  // namespace aif
