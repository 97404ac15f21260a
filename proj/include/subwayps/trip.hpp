#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subwayps/detector.hpp"
#include "subwayps/error.hpp"
#include "subwayps/route.hpp"

namespace subwayps {

enum class stop_class { station, in_between };

struct trip_config {
  double in_between_ratio = 0.7;   // stops before this share of the scheduled time are unscheduled
  double approach_fraction = 0.9;  // ApproachingStation fires at this segment progress
  // Time the trip on transition onsets instead of detection instants, so the
  // delta_above / delta_below latencies do not bias elapsed times.
  bool compensate_latency = true;
};

inline double effective_time_ms(const motion_transition& tr, const trip_config& cfg) {
  return cfg.compensate_latency ? tr.onset_t_ms : tr.t_ms;
}

/// Stops strictly before ratio * scheduled are in-between stops.
inline stop_class classify_stop(double elapsed_s, double scheduled_s, double ratio = 0.7) {
  if (!(scheduled_s > 0.0)) throw schema_error("route data: scheduled segment duration must be > 0");
  return elapsed_s < ratio * scheduled_s ? stop_class::in_between : stop_class::station;
}

/// Linear progress along a segment, clamped to [0, 1].
inline double interpolate(double elapsed_s, double scheduled_s) {
  if (!(scheduled_s > 0.0)) throw schema_error("route data: scheduled segment duration must be > 0");
  return std::clamp(elapsed_s / scheduled_s, 0.0, 1.0);
}

enum class trip_phase { at_station, en_route, in_between_stop, arrived };

inline std::string_view to_string(trip_phase p) {
  switch (p) {
    case trip_phase::at_station: return "AtStation";
    case trip_phase::en_route: return "EnRoute";
    case trip_phase::in_between_stop: return "InBetweenStop";
    case trip_phase::arrived: return "Arrived";
  }
  return "?";
}

enum class event_kind {
  departed,
  station_arrival,
  in_between_stop,
  approaching_station,
  arrived_at_destination,
  unexpected_extra_stop,
};

inline std::string_view to_string(event_kind k) {
  switch (k) {
    case event_kind::departed: return "Departed";
    case event_kind::station_arrival: return "StationArrival";
    case event_kind::in_between_stop: return "InBetweenStop";
    case event_kind::approaching_station: return "ApproachingStation";
    case event_kind::arrived_at_destination: return "ArrivedAtDestination";
    case event_kind::unexpected_extra_stop: return "UnexpectedExtraStop";
  }
  return "?";
}

struct trip_event {
  double t_ms = 0.0;        // when the event was raised
  double onset_t_ms = 0.0;  // estimated physical onset of the underlying transition
  event_kind kind = event_kind::departed;
  std::string station_id;         // StationArrival, ApproachingStation
  std::optional<double> fraction;  // InBetweenStop

  friend bool operator==(const trip_event&, const trip_event&) = default;
};

/// Timestamps are on the configured time basis (onset or detection).
struct trip_state {
  std::size_t segment_index = 0;
  trip_phase phase = trip_phase::at_station;
  double departure_t_ms = 0.0;  // last departure from a station
  double stop_t_ms = 0.0;       // last StopDetected
  double paused_ms = 0.0;       // in-between dwell accumulated on the current segment
  double frozen_fraction = 0.0;
  std::optional<double> last_transition_t_ms;
  transition_kind last_kind = transition_kind::stop_detected;  // tracking starts Stopped
  bool approach_announced = false;
  bool moving_after_arrival = false;

  friend bool operator==(const trip_state&, const trip_state&) = default;
};

struct position_estimate {
  std::string prev_station;
  std::string next_station;
  double fraction = 0.0;
  trip_phase phase = trip_phase::at_station;
};

namespace detail {

inline double moving_elapsed_s(const trip_state& s, double now_ms) {
  return std::max(0.0, (now_ms - s.departure_t_ms - s.paused_ms) / 1000.0);
}

}  // namespace detail

/// Applies one detector transition to the trip state.
inline std::vector<trip_event> advance(trip_state& s, const motion_transition& tr,
                                       const trip_plan& plan, const trip_config& cfg = {}) {
  const double now = effective_time_ms(tr, cfg);
  if (s.last_transition_t_ms && now < *s.last_transition_t_ms)
    throw protocol_error("transition timestamps must be non-decreasing");
  if (tr.kind == s.last_kind)
    throw protocol_error("consecutive transitions must alternate kinds");
  s.last_transition_t_ms = now;
  s.last_kind = tr.kind;

  std::vector<trip_event> events;
  const auto& stations = plan.stations();
  const auto& durations = plan.segment_durations_s();

  if (s.phase == trip_phase::arrived) {
    if (tr.kind == transition_kind::moving_detected) {
      s.moving_after_arrival = true;
    } else if (s.moving_after_arrival) {
      s.moving_after_arrival = false;
      events.push_back({tr.t_ms, tr.onset_t_ms, event_kind::unexpected_extra_stop, {}, {}});
    }
    return events;
  }

  if (tr.kind == transition_kind::moving_detected) {
    if (s.phase == trip_phase::at_station) {
      s.departure_t_ms = now;
      s.paused_ms = 0.0;
      s.approach_announced = false;
    } else if (s.phase == trip_phase::in_between_stop) {
      s.paused_ms += now - s.stop_t_ms;
    }
    s.phase = trip_phase::en_route;
    events.push_back({tr.t_ms, tr.onset_t_ms, event_kind::departed, {}, {}});
    return events;
  }

  // StopDetected; alternation guarantees the previous phase was EnRoute.
  s.stop_t_ms = now;
  const double scheduled = durations[s.segment_index];
  const double elapsed = detail::moving_elapsed_s(s, now);
  if (classify_stop(elapsed, scheduled, cfg.in_between_ratio) == stop_class::in_between) {
    s.phase = trip_phase::in_between_stop;
    s.frozen_fraction = interpolate(elapsed, scheduled);
    events.push_back({tr.t_ms, tr.onset_t_ms, event_kind::in_between_stop, {}, s.frozen_fraction});
    return events;
  }

  const std::size_t arrived_at = s.segment_index + 1;
  events.push_back({tr.t_ms, tr.onset_t_ms, event_kind::station_arrival, stations[arrived_at].id, {}});
  if (arrived_at == stations.size() - 1) {
    s.phase = trip_phase::arrived;
    s.frozen_fraction = 1.0;
    events.push_back({tr.t_ms, tr.onset_t_ms, event_kind::arrived_at_destination,
                      stations[arrived_at].id, {}});
  } else {
    s.segment_index = arrived_at;
    s.phase = trip_phase::at_station;
    s.frozen_fraction = 0.0;
  }
  return events;
}

inline position_estimate estimate_position(const trip_state& s, double now_ms, const trip_plan& plan) {
  if (s.last_transition_t_ms && now_ms < *s.last_transition_t_ms)
    throw clock_error("position queried before the last processed transition");
  const auto& stations = plan.stations();
  position_estimate est{stations[s.segment_index].id, stations[s.segment_index + 1].id, 0.0, s.phase};
  switch (s.phase) {
    case trip_phase::at_station: est.fraction = 0.0; break;
    case trip_phase::in_between_stop: est.fraction = s.frozen_fraction; break;
    case trip_phase::arrived: est.fraction = 1.0; break;
    case trip_phase::en_route:
      est.fraction = interpolate(detail::moving_elapsed_s(s, now_ms),
                                 plan.segment_durations_s()[s.segment_index]);
      break;
  }
  return est;
}

/// Remaining scheduled seconds to the destination; 0 once arrived.
inline double eta(const trip_state& s, double now_ms, const trip_plan& plan) {
  if (s.phase == trip_phase::arrived) return 0.0;
  const auto& durations = plan.segment_durations_s();
  double remaining = 0.0;
  for (std::size_t i = s.segment_index + 1; i < durations.size(); ++i) remaining += durations[i];
  const double fraction = estimate_position(s, now_ms, plan).fraction;
  return remaining + (1.0 - fraction) * durations[s.segment_index];
}

/// Time-driven events; currently only ApproachingStation.
inline std::vector<trip_event> tick(trip_state& s, double now_ms, const trip_plan& plan,
                                    const trip_config& cfg = {}) {
  std::vector<trip_event> events;
  if (s.phase != trip_phase::en_route || s.approach_announced) return events;
  const auto est = estimate_position(s, now_ms, plan);
  if (est.fraction >= cfg.approach_fraction) {
    s.approach_announced = true;
    events.push_back({now_ms, now_ms, event_kind::approaching_station, est.next_station, {}});
  }
  return events;
}

/// Number of StationArrival events still expected.
inline std::size_t stops_remaining(const trip_state& s, const trip_plan& plan) {
  if (s.phase == trip_phase::arrived) return 0;
  return plan.segment_count() - s.segment_index;
}

/// Owns a plan and its state; the usual entry point for streaming use.
class trip_tracker {
 public:
  explicit trip_tracker(trip_plan plan, trip_config cfg = {}) : plan_(std::move(plan)), cfg_(cfg) {
    if (!(cfg_.in_between_ratio > 0.0 && cfg_.in_between_ratio <= 1.0))
      throw config_error("in-between ratio must lie in (0, 1]");
    if (!(cfg_.approach_fraction > 0.0 && cfg_.approach_fraction <= 1.0))
      throw config_error("approach fraction must lie in (0, 1]");
  }

  std::vector<trip_event> on_transition(const motion_transition& tr) {
    return advance(state_, tr, plan_, cfg_);
  }
  std::vector<trip_event> on_time(double now_ms) { return tick(state_, now_ms, plan_, cfg_); }

  position_estimate position(double now_ms) const { return estimate_position(state_, now_ms, plan_); }
  double eta_s(double now_ms) const { return eta(state_, now_ms, plan_); }

  const trip_state& state() const noexcept { return state_; }
  const trip_plan& plan() const noexcept { return plan_; }
  const trip_config& config() const noexcept { return cfg_; }

 private:
  trip_plan plan_;
  trip_config cfg_;
  trip_state state_;
};

}  // namespace subwayps
