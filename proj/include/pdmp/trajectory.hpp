#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "pdmp/model.hpp"

namespace pdmp {

enum class EventKind : std::uint8_t { init, flip, reflect, refresh };

std::string_view to_string(EventKind kind);

struct Event {
  double time;
  EventKind kind;
  int coord;  ///< flipped coordinate (0-based) for flips, -1 otherwise
};

struct EventCounts {
  std::uint64_t flips = 0;
  std::uint64_t reflections = 0;
  std::uint64_t refreshes = 0;
  std::uint64_t total() const noexcept { return flips + reflections + refreshes; }
};

/// Event log of a piecewise deterministic path on [0, horizon].
///
/// Segment 0 starts at the initial state; segment k >= 1 starts at event k
/// with the state just after the jump. Between events the position moves as
/// position(k) + (t - time(k)) * flow * velocity(k), where `flow` is fixed
/// for the whole trajectory.
class Trajectory {
 public:
  Trajectory(Matrix flow, const Vector& position, const Vector& velocity);

  int dim() const noexcept { return dim_; }
  const Matrix& flow() const noexcept { return flow_; }
  double horizon() const noexcept { return horizon_; }
  void set_horizon(double horizon);

  /// Number of jump events (the initial state is not counted).
  std::size_t event_count() const noexcept { return times_.size() - 1; }
  /// Number of segments, event_count() + 1.
  std::size_t segment_count() const noexcept { return times_.size(); }

  Event event(std::size_t k) const { return {times_[k], kinds_[k], coords_[k]}; }
  double time(std::size_t k) const { return times_[k]; }
  Eigen::Map<const Vector> position(std::size_t k) const {
    return Eigen::Map<const Vector>(positions_.data() + k * dim_, dim_);
  }
  Eigen::Map<const Vector> velocity(std::size_t k) const {
    return Eigen::Map<const Vector>(velocities_.data() + k * dim_, dim_);
  }

  /// Index of the segment containing t (right-continuous at event times).
  std::size_t segment_at(double t) const;
  Vector position_at(double t) const;
  Vector velocity_at(double t) const;

  /// Record an event. Times must be strictly increasing.
  void append(double time, EventKind kind, int coord, const Vector& position,
              const Vector& velocity);

  void reserve(std::size_t events);

  EventCounts counts() const;

  /// One row per state (initial row first), floats at 17 significant digits.
  /// With `with_coord` the header is t,kind,coord,y1..yd,v1..vd and coord is
  /// 1-based (0 for rows that are not flips); otherwise t,kind,y1..yd,v1..vd.
  void write_csv(std::ostream& out, bool with_coord) const;

 private:
  int dim_;
  Matrix flow_;
  double horizon_ = 0.0;
  std::vector<double> times_;
  std::vector<EventKind> kinds_;
  std::vector<int> coords_;
  std::vector<double> positions_;
  std::vector<double> velocities_;
};

}  // namespace pdmp
