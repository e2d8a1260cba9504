#include "tadapt/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tadapt {

double check_jacobian(const Problem& problem, double t, const StateVector& udot,
                      const StateVector& u, double shift, int probes,
                      double relative_step) {
  if (probes < 1) throw InvalidInputError("check_jacobian: need at least one probe");
  const Eigen::Index n = u.size();

  const Eigen::SparseMatrix<double> J = problem.jacobian(t, udot, u, shift);
  const double h = relative_step * std::max(1.0, u.values.cwiseAbs().maxCoeff());

  std::mt19937 rng(0x5eed);  // fixed seed: the check must be reproducible
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  double worst = 0.0;
  for (int probe = 0; probe < probes; ++probe) {
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = unit(rng);
    d /= d.norm();

    // Perturb U and Udot together so the finite difference approximates the
    // action of the *shifted* Jacobian on d.
    StateVector up{u.values + h * d, u.layout};
    StateVector um{u.values - h * d, u.layout};
    StateVector dp{udot.values + shift * h * d, udot.layout};
    StateVector dm{udot.values - shift * h * d, udot.layout};

    const Vector fd = (problem.residual(t, dp, up) - problem.residual(t, dm, um)) / (2.0 * h);
    const Vector jd = J * d;

    const double scale = std::max({jd.cwiseAbs().maxCoeff(), fd.cwiseAbs().maxCoeff(), 1e-30});
    worst = std::max(worst, (fd - jd).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

}  // namespace tadapt
