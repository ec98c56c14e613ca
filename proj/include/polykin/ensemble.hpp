#pragma once

// Deterministic trajectory-parallel ensemble machinery.
//
// Every trajectory owns a counter-based random stream keyed by
// (master_seed, trajectory index), so its noise sequence never depends on
// scheduling.  Worker threads partition the trajectory array into disjoint
// contiguous ranges and never share mutable state; all reductions happen on
// the stored arrays afterwards.  Hence results are bitwise identical for any
// thread count.

#include "polykin/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace polykin {

template <class State>
struct Ensemble {
  std::vector<State> states;
  std::vector<RandomStream> streams;
  double time = 0.0;

  // init(stream) draws one initial state; it may consume stream words, which
  // become part of that trajectory's reproducible history.
  template <class InitFn>
  static Ensemble create(std::size_t n, std::uint64_t master_seed,
                         InitFn init) {
    Ensemble e;
    e.states.reserve(n);
    e.streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      e.streams.emplace_back(master_seed, i);
      e.states.push_back(init(e.streams.back()));
    }
    return e;
  }

  std::size_t size() const { return states.size(); }
};

namespace detail {

struct TrajectoryFailure {
  bool failed = false;
  std::size_t trajectory = 0;
  long step = 0;
  std::string message;
};

} // namespace detail

// Advance every trajectory n_steps of size dt with step(state, stream, dt).
// A non-finite state (or a throwing step) aborts with the trajectory index
// and the step count at which it was first detected; the report is
// deterministic across thread counts (lowest trajectory index wins).
template <class State, class StepFn>
void advance_ensemble(Ensemble<State>& ens, long n_steps, double dt,
                      StepFn step, int n_threads = 1) {
  if (n_steps < 0) throw std::invalid_argument("advance_ensemble: n_steps < 0");
  if (n_steps == 0) return;
  const std::size_t n = ens.size();
  if (n_threads < 1) n_threads = 1;
  if (static_cast<std::size_t>(n_threads) > n) n_threads = static_cast<int>(n ? n : 1);

  auto run_range = [&](std::size_t lo, std::size_t hi,
                       detail::TrajectoryFailure* fail) {
    for (std::size_t i = lo; i < hi; ++i) {
      for (long k = 0; k < n_steps; ++k) {
        try {
          step(ens.states[i], ens.streams[i], dt);
        } catch (const std::exception& ex) {
          if (!fail->failed || i < fail->trajectory) {
            *fail = {true, i, k + 1, ex.what()};
          }
          return;
        }
        if (!ens.states[i].is_finite()) {
          if (!fail->failed || i < fail->trajectory) {
            *fail = {true, i, k + 1, "non-finite state"};
          }
          return;
        }
      }
    }
  };

  std::vector<detail::TrajectoryFailure> fails(n_threads);
  if (n_threads == 1) {
    run_range(0, n, &fails[0]);
  } else {
    std::vector<std::thread> workers;
    std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      std::size_t lo = t * chunk;
      std::size_t hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      workers.emplace_back(run_range, lo, hi, &fails[t]);
    }
    for (auto& w : workers) w.join();
  }

  const detail::TrajectoryFailure* first = nullptr;
  for (const auto& f : fails) {
    if (f.failed && (!first || f.trajectory < first->trajectory)) first = &f;
  }
  if (first) {
    throw std::runtime_error(
        "ensemble aborted: trajectory " + std::to_string(first->trajectory) +
        " after step " + std::to_string(first->step) + " of this segment: " +
        first->message);
  }
  ens.time += n_steps * dt;
}

template <class State>
struct EnsembleObserver {
  double time = 0.0;
  std::function<void(const Ensemble<State>&)> callback;
};

// Advance to t_final in steps of dt (a shortened step lands exactly on
// observer times and on t_final).  Observers fire in time order once each.
template <class State, class StepFn>
void simulate_ensemble(Ensemble<State>& ens, double dt, double t_final,
                       StepFn step,
                       std::vector<EnsembleObserver<State>> observers = {},
                       int n_threads = 1) {
  if (!(dt > 0.0)) throw std::invalid_argument("simulate_ensemble: dt must be positive");
  if (t_final < ens.time - 1e-12) {
    throw std::invalid_argument("simulate_ensemble: t_final precedes ensemble time");
  }
  std::sort(observers.begin(), observers.end(),
            [](const auto& a, const auto& b) { return a.time < b.time; });
  std::size_t next_obs = 0;
  auto fire_due = [&]() {
    while (next_obs < observers.size() &&
           observers[next_obs].time <= ens.time + 1e-12) {
      if (observers[next_obs].callback) observers[next_obs].callback(ens);
      ++next_obs;
    }
  };
  fire_due();
  const double tol = 1e-12 * std::max(1.0, std::abs(t_final));
  while (ens.time < t_final - tol) {
    double target = t_final;
    if (next_obs < observers.size() && observers[next_obs].time < target) {
      target = std::max(observers[next_obs].time, ens.time);
    }
    double span = target - ens.time;
    long n_full = static_cast<long>(std::floor(span / dt + 1e-9));
    if (n_full > 0) advance_ensemble(ens, n_full, dt, step, n_threads);
    double rem = target - ens.time;
    if (rem > tol) advance_ensemble(ens, 1, rem, step, n_threads);
    ens.time = target; // absorb accumulated rounding
    fire_due();
  }
}

} // namespace polykin
