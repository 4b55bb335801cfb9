#pragma once
// Shared fixtures for the unit tests.
#include <cmath>
#include <vector>

#include "wavemap/estimates.hpp"
#include "wavemap/gauge.hpp"
#include "wavemap/error.hpp"
#include "wavemap/solver.hpp"

namespace testing_support {

using namespace wavemap;

inline InitialData bump(DataFamily family, double a, double w) {
  InitialData d;
  d.family = family;
  d.amplitude = a;
  d.width = w;
  return d;
}

// Every step saved, with frames, ready for windowed diagnostics.
struct Run {
  Trajectory traj;
  std::vector<GaugeFrame> frames;

  SliceWindow window(std::size_t i) const {
    return SliceWindow(traj.snapshots[i - 1], traj.snapshots[i], traj.snapshots[i + 1],
                       frames[i - 1], frames[i], frames[i + 1]);
  }
};

inline Run dense_run(const TargetManifold& target, const InitialData& data, double dr, double rmax,
                     double T, double cfl = 0.5) {
  const FieldState s = init_state(data, RadialGrid(dr, rmax), target, T);
  Run run;
  run.traj = evolve(s, T, cfl * dr);
  run.frames = build_frames(run.traj);
  return run;
}

// Time integral of a windowed functional over every interior slice.
template <class F>
double integrate_windows(const Run& run, F f) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < run.traj.snapshots.size(); ++i) s += f(run.window(i));
  return s * run.traj.dt;
}

inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace testing_support
