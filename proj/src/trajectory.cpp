#include "pdmp/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "pdmp/errors.hpp"

namespace pdmp {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::init: return "init";
    case EventKind::flip: return "flip";
    case EventKind::reflect: return "reflect";
    case EventKind::refresh: return "refresh";
  }
  return "unknown";
}

Trajectory::Trajectory(Matrix flow, const Vector& position, const Vector& velocity)
    : dim_(static_cast<int>(position.size())), flow_(std::move(flow)) {
  if (flow_.rows() != dim_ || velocity.size() != flow_.cols()) {
    throw InvalidArgument("Trajectory: flow shape does not match the state");
  }
  times_.push_back(0.0);
  kinds_.push_back(EventKind::init);
  coords_.push_back(-1);
  positions_.assign(position.data(), position.data() + dim_);
  velocities_.assign(velocity.data(), velocity.data() + velocity.size());
}

void Trajectory::set_horizon(double horizon) {
  if (horizon < times_.back()) throw InvalidArgument("Trajectory: horizon precedes last event");
  horizon_ = horizon;
}

void Trajectory::reserve(std::size_t events) {
  times_.reserve(events + 1);
  kinds_.reserve(events + 1);
  coords_.reserve(events + 1);
  positions_.reserve((events + 1) * dim_);
  velocities_.reserve((events + 1) * dim_);
}

void Trajectory::append(double time, EventKind kind, int coord, const Vector& position,
                        const Vector& velocity) {
  if (!(time > times_.back())) {
    throw InvalidArgument("Trajectory: event times must be strictly increasing");
  }
  times_.push_back(time);
  kinds_.push_back(kind);
  coords_.push_back(coord);
  positions_.insert(positions_.end(), position.data(), position.data() + dim_);
  velocities_.insert(velocities_.end(), velocity.data(), velocity.data() + velocity.size());
  horizon_ = std::max(horizon_, time);
}

std::size_t Trajectory::segment_at(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
}

Vector Trajectory::position_at(double t) const {
  const std::size_t k = segment_at(t);
  return position(k) + (t - times_[k]) * (flow_ * velocity(k));
}

Vector Trajectory::velocity_at(double t) const { return velocity(segment_at(t)); }

EventCounts Trajectory::counts() const {
  EventCounts c;
  for (std::size_t k = 1; k < kinds_.size(); ++k) {
    switch (kinds_[k]) {
      case EventKind::flip: ++c.flips; break;
      case EventKind::reflect: ++c.reflections; break;
      case EventKind::refresh: ++c.refreshes; break;
      case EventKind::init: break;
    }
  }
  return c;
}

void Trajectory::write_csv(std::ostream& out, bool with_coord) const {
  const auto vdim = velocities_.size() / times_.size();
  out << "t,kind";
  if (with_coord) out << ",coord";
  for (int i = 1; i <= dim_; ++i) out << ",y" << i;
  for (std::size_t i = 1; i <= vdim; ++i) out << ",v" << i;
  out << '\n';
  char buf[32];
  const auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << ',' << buf;
  };
  for (std::size_t k = 0; k < times_.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", times_[k]);
    out << buf << ',' << to_string(kinds_[k]);
    if (with_coord) out << ',' << coords_[k] + 1;
    for (int i = 0; i < dim_; ++i) put(positions_[k * dim_ + i]);
    for (std::size_t i = 0; i < vdim; ++i) put(velocities_[k * vdim + i]);
    out << '\n';
  }
}

}  // namespace pdmp
