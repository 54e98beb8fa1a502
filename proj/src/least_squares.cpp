#include "twpa/least_squares.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "twpa/error.hpp"

namespace twpa {

namespace {

Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& q, Eigen::Index m) {
  const double rel = std::cbrt(std::numeric_limits<double>::epsilon());
  Eigen::MatrixXd J(m, q.size());
  Eigen::VectorXd qp = q;
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    const double h = rel * std::max(std::abs(q[j]), 1.0);
    qp[j] = q[j] + h;
    const Eigen::VectorXd fp = f(qp);
    qp[j] = q[j] - h;
    const Eigen::VectorXd fm = f(qp);
    qp[j] = q[j];
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

}  // namespace

LsqResult levenberg_marquardt(const ResidualFn& residuals, const Eigen::VectorXd& p0, const LsqOptions& opts) {
  const Eigen::Index n = p0.size();
  Eigen::VectorXd scale(n);
  for (Eigen::Index j = 0; j < n; ++j) scale[j] = p0[j] != 0.0 ? std::abs(p0[j]) : 1.0;

  auto f = [&](const Eigen::VectorXd& q) -> Eigen::VectorXd {
    return residuals(q.cwiseProduct(scale));
  };

  Eigen::VectorXd q = p0.cwiseQuotient(scale);
  Eigen::VectorXd r = f(q);
  const Eigen::Index m = r.size();
  if (m < n) throw Error(ErrorCode::InvalidArgument, "fewer residuals than parameters");
  if (!r.allFinite()) throw Error(ErrorCode::NoConvergence, "residuals are not finite at the starting point");
  double cost = r.squaredNorm();

  Eigen::MatrixXd J = numeric_jacobian(f, q, m);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (J.col(j).cwiseAbs().maxCoeff() == 0.0) {
      std::ostringstream msg;
      msg << "parameter " << j << " has no effect on the residuals";
      throw Error(ErrorCode::SingularJacobian, msg.str());
    }
  }

  // Iterations are driven by Eigen's MINPACK port; one outer step per iteration.
  struct Problem : Eigen::DenseFunctor<double> {
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f;
    Problem(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn, Eigen::Index n, Eigen::Index m)
        : DenseFunctor(static_cast<int>(n), static_cast<int>(m)), f(fn) {}
    int operator()(const InputType& x, ValueType& fvec) const {
      fvec = f(x);
      if (!fvec.allFinite()) fvec.setConstant(std::sqrt(std::numeric_limits<double>::max()) / 1e3);
      return 0;
    }
    int df(const InputType& x, JacobianType& fjac) const {
      fjac = numeric_jacobian(f, x, values());
      return 0;
    }
  };
  const std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn = f;
  Problem problem(fn, n, m);
  Eigen::LevenbergMarquardt<Problem> lm(problem);
  lm.setXtol(opts.step_tolerance);
  lm.setFtol(std::numeric_limits<double>::epsilon());
  lm.setGtol(0.0);
  lm.setFactor(100.0);
  lm.setMaxfev(1000 * static_cast<Eigen::Index>(opts.max_iterations));

  LsqResult out;
  using Eigen::LevenbergMarquardtSpace::Status;
  Status status = Status::RelativeErrorTooSmall;
  if (cost != 0.0) {
    status = lm.minimizeInit(q);
    if (status == Status::NotStarted) status = Status::Running;
  }
  int it = 0;
  while (status == Status::Running && it < opts.max_iterations) {
    status = lm.minimizeOneStep(q);
    ++it;
  }
  out.iterations = it;
  // Tolerance-too-small states mean no further progress at working precision.
  out.converged = status != Status::Running && status != Status::TooManyFunctionEvaluation &&
                  status != Status::ImproperInputParameters && status != Status::UserAsked;
  if (!out.converged) {
    std::ostringstream msg;
    msg << "no convergence after " << it << " iterations";
    throw Error(ErrorCode::NoConvergence, msg.str());
  }
  r = f(q);
  cost = r.squaredNorm();

  out.params = q.cwiseProduct(scale);
  out.residuals = r;
  out.residual_norm = r.norm();

  // Linearized covariance via SVD; directions with negligible singular
  // values are treated as unidentifiable.
  J = numeric_jacobian(f, q, m);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const Eigen::MatrixXd& V = svd.matrixV();
  const double cutoff = 1e-7 * (sv.size() > 0 ? sv[0] : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv[k] > cutoff) ++rank;
  const double dof = static_cast<double>(std::max<Eigen::Index>(m - rank, 1));
  const double s2 = cost / dof;

  Eigen::MatrixXd cov_q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < rank; ++k) cov_q += V.col(k) * V.col(k).transpose() / (sv[k] * sv[k]);
  cov_q *= s2;
  out.covariance = scale.asDiagonal() * cov_q * scale.asDiagonal();
  for (Eigen::Index k = rank; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(V(j, k)) > 1e-6) {
        out.covariance(j, j) = std::numeric_limits<double>::infinity();
      }
    }
  }
  out.standard_errors = out.covariance.diagonal().cwiseSqrt();
  return out;
}

}  // namespace twpa
