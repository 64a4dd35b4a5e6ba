#pragma once

#include <functional>
#include <vector>

namespace tdks {

/// Uniform time grid t_k = k * dt, k = 0..K, on [0, T].
struct TimeGrid {
  double horizon = 1.0;
  int steps = 1;

  static TimeGrid make(double horizon, int steps);

  double dt() const { return horizon / steps; }
  int nodes() const { return steps + 1; }
  double time(int k) const { return k == steps ? horizon : k * dt(); }
  bool operator==(const TimeGrid&) const = default;
};

/// Real control amplitude sampled at the nodes of a time grid.
struct ControlSignal {
  TimeGrid grid;
  std::vector<double> values;

  ControlSignal() = default;
  explicit ControlSignal(const TimeGrid& g) : grid(g), values(g.nodes(), 0.0) {}
  ControlSignal(const TimeGrid& g, std::vector<double> v);

  static ControlSignal sample(const TimeGrid& g,
                              const std::function<double(double)>& f);

  double operator[](int k) const { return values[k]; }
  double& operator[](int k) { return values[k]; }
};

}  // namespace tdks
