#pragma once

// Time loop shared by the Eulerian and Lagrangian solvers.

#include <algorithm>
#include <optional>
#include <string>

#include "multifluid/diagnostics.hpp"
#include "multifluid/state.hpp"

namespace multifluid::detail {

template <typename State, typename Stepper, typename DtRule>
Trajectory<State> run_time_loop(const Physics& physics, const State& initial, const TimeControl& control, Stepper&& stepper,
                      DtRule&& dt_rule) {
  Trajectory<State> trajectory(initial);
  trajectory.snapshot_stride = std::max(1, control.snapshot_stride);
  StepRecorder<State> recorder(physics);
  trajectory.records.push_back(recorder.record(initial, 0.0));
  trajectory.snapshots.push_back(initial);

  const double final_time = control.final_time;
  const double dt_min = control.effective_dt_min();
  const double landing = 1e-12 * std::max(1.0, final_time);
  State state = initial;
  while (final_time - state.time > landing) {
    double dt = control.dt_schedule.empty()
                    ? dt_rule(state)
                    : control.dt_schedule[std::min(std::size_t(trajectory.steps), control.dt_schedule.size() - 1)];
    dt = std::min(dt, final_time - state.time);
    if (final_time - (state.time + dt) < landing) dt = final_time - state.time;

    std::optional<State> next;
    while (!next) {
      try {
        next = stepper(state, dt);
      } catch (const TimestepRejected& e) {
        dt /= 2.0;
        if (dt < dt_min) {
          trajectory.aborted = true;
          trajectory.abort_reason = std::string(e.what()) + "; step size fell below dt_min";
          break;
        }
      } catch (const SingularPivotError& e) {
        trajectory.aborted = true;
        trajectory.abort_reason = e.what();
        break;
      }
    }
    if (!next) break;
    if (final_time - next->time < landing) next->time = final_time;
    state = std::move(*next);
    ++trajectory.steps;
    trajectory.records.push_back(recorder.record(state, dt));
    if (trajectory.steps % trajectory.snapshot_stride == 0) trajectory.snapshots.push_back(state);
  }
  trajectory.final_state = std::move(state);
  return trajectory;
}

}  // namespace multifluid::detail
