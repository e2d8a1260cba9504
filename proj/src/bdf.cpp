#include "tadapt/bdf.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace tadapt {

BdfStencil compute_coefficients(int order, ConstVectorRef steps) {
  if (order < 1 || order > 3) {
    throw UnsupportedOrderError("BDF order " + std::to_string(order) +
                                " not supported (use 1, 2 or 3)");
  }
  if (steps.size() != order) {
    throw InvalidInputError("expected " + std::to_string(order) + " step sizes, got " +
                            std::to_string(steps.size()));
  }
  for (Eigen::Index i = 0; i < steps.size(); ++i) {
    if (!(steps[i] > 0.0) || !std::isfinite(steps[i])) {
      throw InvalidInputError("step sizes must be positive and finite");
    }
  }

  const int k = order;
  const double dt0 = steps[0];

  // Sample times relative to t_new, normalized by the newest step so the
  // Vandermonde matrix stays O(1) for any reasonable step ratio.
  Eigen::VectorXd tau(k + 1);
  tau[0] = 0.0;
  double acc = 0.0;
  for (int p = 1; p <= k; ++p) {
    acc += steps[p - 1];
    tau[p] = -acc / dt0;
  }

  // Exactness on monomials: sum_p xi_p tau_p^m = [m == 1] for m = 0..k
  // (in normalized time, so the derivative of t at t_new is 1).
  Eigen::MatrixXd A(k + 1, k + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
  for (int p = 0; p <= k; ++p) A(0, p) = 1.0;
  for (int m = 1; m <= k; ++m) {
    for (int p = 0; p <= k; ++p) A(m, p) = std::pow(tau[p], m);
  }
  b[1] = 1.0;

  Eigen::VectorXd xi = A.fullPivLu().solve(b);

  BdfStencil s;
  s.order = k;
  s.steps = steps;
  s.coefficients = xi / dt0;  // undo the time normalization
  return s;
}

HistoryBuffer::HistoryBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw InvalidInputError("history capacity must be positive");
}

void HistoryBuffer::push(double time, StateVector state) {
  if (!std::isfinite(time)) throw InvalidInputError("history time must be finite");
  if (!entries_.empty()) {
    if (!(time > entries_.front().time)) {
      throw InvalidInputError("history times must be strictly increasing (got " +
                              std::to_string(time) + " after " +
                              std::to_string(entries_.front().time) + ")");
    }
    require_same_layout(state, entries_.front().state, "HistoryBuffer::push");
  }
  entries_.push_front(Entry{time, std::move(state)});
  while (entries_.size() > capacity_) entries_.pop_back();
}

double HistoryBuffer::time(std::size_t i) const {
  if (i >= entries_.size()) throw HistoryUnderflowError("history index out of range");
  return entries_[i].time;
}

const StateVector& HistoryBuffer::state(std::size_t i) const {
  if (i >= entries_.size()) throw HistoryUnderflowError("history index out of range");
  return entries_[i].state;
}

double HistoryBuffer::step(std::size_t i) const {
  if (i + 1 >= entries_.size()) {
    throw HistoryUnderflowError("history too short for step index " + std::to_string(i));
  }
  return entries_[i].time - entries_[i + 1].time;
}

Eigen::VectorXd HistoryBuffer::steps_for(double dt_new, int order) const {
  if (order < 1) throw InvalidInputError("order must be positive");
  if (entries_.size() < static_cast<std::size_t>(order)) {
    throw HistoryUnderflowError("need " + std::to_string(order) +
                                " history states, have " + std::to_string(entries_.size()));
  }
  Eigen::VectorXd s(order);
  s[0] = dt_new;
  for (int j = 1; j < order; ++j) s[j] = step(static_cast<std::size_t>(j - 1));
  return s;
}

StateVector apply_xi(const BdfStencil& stencil, const StateVector& newest,
                     const HistoryBuffer& history) {
  const int k = stencil.order;
  if (history.size() < static_cast<std::size_t>(k)) {
    throw HistoryUnderflowError("stencil of order " + std::to_string(k) +
                                " needs " + std::to_string(k) + " history states");
  }
  // Trailing stencil steps must be the history's own spacing.
  for (int j = 1; j < k; ++j) {
    const double hs = history.step(static_cast<std::size_t>(j - 1));
    if (std::abs(hs - stencil.steps[j]) > 1e-12 * std::max(1.0, std::abs(hs))) {
      throw InvalidInputError("stencil steps do not match history spacing");
    }
  }
  require_same_layout(newest, history.state(0), "apply_xi");

  Vector out = stencil.coefficients[0] * newest.values;
  for (int p = 1; p <= k; ++p) {
    out += stencil.coefficients[p] * history.state(static_cast<std::size_t>(p - 1)).values;
  }
  return StateVector{std::move(out), newest.layout};
}

}  // namespace tadapt
