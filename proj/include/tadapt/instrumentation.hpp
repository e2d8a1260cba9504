#pragma once

namespace tadapt {

/// Tallies of the expensive operations performed since the last reset.
/// Used by tests to pin down how much work an algorithm is allowed to do
/// (e.g. the linear-implicit error estimate must cost exactly one assembly,
/// one factorization and one back substitution).
struct WorkCounters {
  long residual_evals = 0;
  long jacobian_evals = 0;
  long factorizations = 0;
  long back_solves = 0;

  void reset() { *this = WorkCounters{}; }
};

inline WorkCounters& work_counters() {
  thread_local WorkCounters counters;
  return counters;
}

}  // namespace tadapt
