#pragma once

#include <Eigen/Core>

#include <deque>

#include "tadapt/types.hpp"

namespace tadapt {

/// Weights of a variable-step backward differentiation stencil
///
///   d/dt u(t_new)  ~=  xi[0] u_new + xi[1] u_n + ... + xi[k] u_{n-k+1}
///
/// where the sample times run backwards from t_new through k prior states.
/// coefficients[0] is the shift that multiplies dR/dUdot in the implicit
/// Jacobian.
struct BdfStencil {
  int order = 0;                 // k, in {1, 2, 3}
  Eigen::VectorXd steps;         // k step sizes, newest first; steps[0] = t_new - t_n
  Eigen::VectorXd coefficients;  // k + 1 weights, units 1/time

  [[nodiscard]] double shift() const { return coefficients[0]; }
};

/// Derives the stencil weights from the exactness conditions: the stencil must
/// differentiate polynomials up to degree k exactly on the given step pattern.
/// The conditions form a Vandermonde system in the (nonuniform) sample times,
/// which is solved in time normalized by steps[0] to keep it well conditioned.
///
/// Throws UnsupportedOrderError for order outside {1, 2, 3} and
/// InvalidInputError for nonpositive steps or a wrong step count.
[[nodiscard]] BdfStencil compute_coefficients(int order, ConstVectorRef steps);

/// Ring of recent accepted states, newest first, with strictly decreasing
/// times. Holds just enough history for a third order stencil plus one spare.
class HistoryBuffer {
 public:
  explicit HistoryBuffer(std::size_t capacity = 4);

  /// Pushes a new newest state. Its time must exceed the current newest.
  void push(double time, StateVector state);

  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }

  /// i = 0 is the newest entry.
  [[nodiscard]] double time(std::size_t i) const;
  [[nodiscard]] const StateVector& state(std::size_t i) const;

  /// Step between entries i and i+1 (both must exist).
  [[nodiscard]] double step(std::size_t i) const;

  /// Step pattern for advancing to a new time: [dt_new, step(0), ...],
  /// `order` entries total. Throws HistoryUnderflowError when the buffer is
  /// too short for the requested order.
  [[nodiscard]] Eigen::VectorXd steps_for(double dt_new, int order) const;

  void clear() { entries_.clear(); }

 private:
  struct Entry {
    double time;
    StateVector state;
  };
  std::deque<Entry> entries_;  // front = newest
  std::size_t capacity_;
};

/// Applies the stencil to a candidate newest state and the history behind it:
/// returns xi[0] u_new + sum_p xi[p] history[p-1]. The history steps must
/// match the stencil's trailing steps; layouts must agree.
[[nodiscard]] StateVector apply_xi(const BdfStencil& stencil, const StateVector& newest,
                                   const HistoryBuffer& history);

}  // namespace tadapt
