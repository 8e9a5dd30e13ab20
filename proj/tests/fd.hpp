// Central finite-difference helpers used as the independent gradient and
// Jacobian oracle throughout the tests.
#ifndef AIF_TESTS_FD_HPP
#define AIF_TESTS_FD_HPP

#include <Eigen/Dense>

namespace aif::testing {

// Gradient of a scalar function of a vector, three-point central stencil.
template <typename F>
Eigen::VectorXd fd_gradient(const F& f, const Eigen::VectorXd& x,
                            double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// Jacobian of a vector-valued function, column by column.
template <typename F>
Eigen::MatrixXd fd_jacobian(const F& f, const Eigen::VectorXd& x,
                            double h = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    J.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return J;
}

// Relative error with an absolute floor for near-zero references.
inline double rel_error(const Eigen::VectorXd& got, const Eigen::VectorXd& ref,
                        double floor = 1e-8) {
  const double scale = std::max(ref.norm(), floor);
  return (got - ref).norm() / scale;
}

inline double rel_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& ref,
                        double floor = 1e-8) {
  const double scale = std::max(ref.norm(), floor);
  return (got - ref).norm() / scale;
}

}  // namespace aif::testing

#endif  // AIF_TESTS_FD_HPP
