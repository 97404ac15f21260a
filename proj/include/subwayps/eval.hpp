#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subwayps/error.hpp"
#include "subwayps/params.hpp"
#include "subwayps/pipeline.hpp"
#include "subwayps/route.hpp"
#include "subwayps/simulate.hpp"
#include "subwayps/trip.hpp"

namespace subwayps::eval {

using sim::ground_truth;
using sim::truth_label;
using sim::truth_stop;

struct detected_stop {
  double onset_ms = 0.0;  // estimated physical onset
  double t_ms = 0.0;      // detection time
  stop_class label = stop_class::station;
};

/// Stop-level view of a tracker event log.
inline std::vector<detected_stop> stops_from_events(std::span<const trip_event> events) {
  std::vector<detected_stop> out;
  for (const auto& e : events) {
    switch (e.kind) {
      case event_kind::station_arrival:
      case event_kind::unexpected_extra_stop:
        out.push_back({e.onset_t_ms, e.t_ms, stop_class::station});
        break;
      case event_kind::in_between_stop:
        out.push_back({e.onset_t_ms, e.t_ms, stop_class::in_between});
        break;
      default: break;
    }
  }
  return out;
}

struct stop_match {
  std::size_t truth_index = 0;
  std::optional<std::size_t> detected_index;
  bool correct = false;
  double time_error_s = 0.0;  // detected onset minus truth onset
};

struct match_result {
  std::vector<stop_match> matches;           // one per truth stop, in order
  std::vector<std::size_t> false_positives;  // unmatched detections
};

inline bool labels_agree(truth_label truth, stop_class detected) {
  return (truth == truth_label::in_between) == (detected == stop_class::in_between);
}

/// Greedy in-order pairing: each detection takes the earliest unmatched
/// truth stop whose onset lies within `tolerance_s` of its own onset.
inline match_result match_stops(std::span<const truth_stop> truth, std::span<const detected_stop> detected,
                                double tolerance_s = 30.0) {
  if (!(tolerance_s > 0.0)) throw config_error("tolerance must be > 0");
  match_result out;
  out.matches.resize(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) out.matches[i].truth_index = i;
  const double tol_ms = tolerance_s * 1000.0;
  for (std::size_t d = 0; d < detected.size(); ++d) {
    bool matched = false;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      auto& m = out.matches[i];
      if (m.detected_index) continue;
      const double diff = detected[d].onset_ms - truth[i].onset_ms;
      if (std::abs(diff) <= tol_ms) {
        m.detected_index = d;
        m.correct = labels_agree(truth[i].label, detected[d].label);
        m.time_error_s = diff / 1000.0;
        matched = true;
        break;
      }
    }
    if (!matched) out.false_positives.push_back(d);
  }
  return out;
}

inline bool fully_correct(const match_result& m) {
  if (!m.false_positives.empty()) return false;
  for (const auto& s : m.matches)
    if (!s.correct) return false;
  return true;
}

struct eval_report {
  std::size_t stops_total = 0;
  std::size_t stops_correct = 0;
  std::size_t stations_missed = 0;
  std::size_t inbetween_missed = 0;
  std::size_t false_positives = 0;
  std::size_t trips_total = 0;
  std::size_t trips_fully_correct = 0;

  // Origin stops never enter the denominator here.
  double accuracy_excl_start() const {
    return stops_total == 0 ? 1.0 : static_cast<double>(stops_correct) / static_cast<double>(stops_total);
  }
  // Each trip's origin counts as one correctly classified station stop.
  double accuracy_incl_start() const {
    const std::size_t denom = stops_total + trips_total;
    return denom == 0 ? 1.0 : static_cast<double>(stops_correct + trips_total) / static_cast<double>(denom);
  }
  double trip_accuracy() const {
    return trips_total == 0 ? 0.0
                            : static_cast<double>(trips_fully_correct) / static_cast<double>(trips_total);
  }

  void add_trip(std::span<const truth_stop> truth, const match_result& m) {
    ++trips_total;
    if (fully_correct(m)) ++trips_fully_correct;
    false_positives += m.false_positives.size();
    for (const auto& s : m.matches) {
      ++stops_total;
      if (s.correct)
        ++stops_correct;
      else if (truth[s.truth_index].label == truth_label::in_between)
        ++inbetween_missed;
      else
        ++stations_missed;
    }
  }

  eval_report& operator+=(const eval_report& o) {
    stops_total += o.stops_total;
    stops_correct += o.stops_correct;
    stations_missed += o.stations_missed;
    inbetween_missed += o.inbetween_missed;
    false_positives += o.false_positives;
    trips_total += o.trips_total;
    trips_fully_correct += o.trips_fully_correct;
    return *this;
  }
};

/// Share of trips with every stop matched, correctly labelled and no extras.
inline double trip_accuracy(std::span<const match_result> trips) {
  if (trips.empty()) throw config_error("trip accuracy is undefined for an empty trip list");
  std::size_t good = 0;
  for (const auto& t : trips) good += fully_correct(t) ? 1 : 0;
  return static_cast<double>(good) / static_cast<double>(trips.size());
}

/// Predicted arrival times (ms) at plan stations 1..N from a departure instant.
inline std::vector<double> cumulative_arrivals(const trip_plan& plan, double start_ms) {
  std::vector<double> out;
  double t = start_ms;
  for (double d : plan.segment_durations_s()) {
    t += d * 1000.0;
    out.push_back(t);
  }
  return out;
}

/// Official-schedule prediction anchored to the timetabled departure.
inline std::vector<double> timetable_baseline(const trip_plan& plan, double scheduled_departure_ms) {
  return cumulative_arrivals(plan, scheduled_departure_ms);
}

/// Scheduled travel times anchored to the observed departure.
inline std::vector<double> relative_time_baseline(const trip_plan& plan, double actual_departure_ms) {
  return cumulative_arrivals(plan, actual_departure_ms);
}

/// A baseline gets a trip right when every station arrival is within tolerance.
/// Baselines cannot see unscheduled stops, so those are not scored.
inline bool baseline_trip_correct(const trip_plan& plan, std::span<const truth_stop> truth,
                                  std::span<const double> predicted_ms, double tolerance_s = 30.0) {
  const auto& stations = plan.stations();
  for (std::size_t k = 1; k < stations.size(); ++k) {
    const truth_stop* arrival = nullptr;
    for (const auto& s : truth)
      if (s.label == truth_label::station && s.station_id == stations[k].id) {
        arrival = &s;
        break;
      }
    if (!arrival) return false;
    if (std::abs(arrival->onset_ms - predicted_ms[k - 1]) > tolerance_s * 1000.0) return false;
  }
  return true;
}

/// One recorded or simulated trip with its truth and plan.
struct corpus_trip {
  std::string name;
  std::vector<accel_sample> trace;
  ground_truth truth;
  trip_plan plan;
};

struct trip_outcome {
  std::string name;
  match_result match;
  eval_report report;
  bool timetable_correct = false;
  bool relative_correct = false;
};

struct corpus_evaluation {
  eval_report report;
  std::size_t timetable_trips_correct = 0;
  std::size_t relative_trips_correct = 0;
  std::vector<trip_outcome> trips;

  double timetable_accuracy() const {
    return trips.empty() ? 0.0 : static_cast<double>(timetable_trips_correct) / static_cast<double>(trips.size());
  }
  double relative_accuracy() const {
    return trips.empty() ? 0.0 : static_cast<double>(relative_trips_correct) / static_cast<double>(trips.size());
  }
};

inline trip_outcome evaluate_trip(const corpus_trip& trip, const detector_params& params, double tolerance_s,
                                  const trip_config& cfg = {}) {
  const auto run = replay(trip.trace, trip.plan, params, cfg, {}, false);
  const auto detected = stops_from_events(run.events);
  trip_outcome out;
  out.name = trip.name;
  out.match = match_stops(trip.truth.stops, detected, tolerance_s);
  out.report.add_trip(trip.truth.stops, out.match);
  out.timetable_correct = baseline_trip_correct(
      trip.plan, trip.truth.stops, timetable_baseline(trip.plan, trip.truth.scheduled_departure_ms), tolerance_s);
  out.relative_correct = baseline_trip_correct(
      trip.plan, trip.truth.stops, relative_time_baseline(trip.plan, trip.truth.departure_ms), tolerance_s);
  return out;
}

inline corpus_evaluation evaluate_corpus(std::span<const corpus_trip> corpus, const detector_params& params,
                                         double tolerance_s = 30.0, const trip_config& cfg = {}) {
  validate(params);
  corpus_evaluation out;
  for (const auto& trip : corpus) {
    auto outcome = evaluate_trip(trip, params, tolerance_s, cfg);
    out.report += outcome.report;
    out.timetable_trips_correct += outcome.timetable_correct ? 1 : 0;
    out.relative_trips_correct += outcome.relative_correct ? 1 : 0;
    out.trips.push_back(std::move(outcome));
  }
  return out;
}

struct tuning_grid {
  std::vector<double> gamma_ms2{0.2};
  std::vector<std::size_t> delta_below{250};
  std::vector<std::size_t> delta_above{250, 350, 500};
  std::vector<std::size_t> window_n{100};
  double nominal_rate_hz = 50.0;

  std::size_t size() const {
    return gamma_ms2.size() * delta_below.size() * delta_above.size() * window_n.size();
  }
};

struct tuning_cell {
  detector_params params;
  eval_report report;
};

struct tuning_result {
  detector_params best;
  std::vector<tuning_cell> table;  // grid order
};

namespace detail {

// True when `a` should replace the current best `b`.
inline bool preferred(const tuning_cell& a, const tuning_cell& b) {
  if (a.report.stops_correct != b.report.stops_correct) return a.report.stops_correct > b.report.stops_correct;
  if (a.params.delta_above != b.params.delta_above) return a.params.delta_above > b.params.delta_above;
  if (a.params.delta_below != b.params.delta_below) return a.params.delta_below > b.params.delta_below;
  return a.params.gamma_ms2 < b.params.gamma_ms2;
}

}  // namespace detail

/// Exhaustive grid search for the best stop classification accuracy.
/// Ties go to larger delta_above, then larger delta_below, then smaller gamma.
inline tuning_result tune(std::span<const corpus_trip> corpus, const tuning_grid& grid,
                          double tolerance_s = 30.0, const trip_config& cfg = {}) {
  if (corpus.empty()) throw config_error("tuning needs a non-empty corpus");
  if (grid.size() == 0) throw config_error("tuning needs a non-empty grid");
  tuning_result out;
  std::size_t best = 0;
  for (double gamma : grid.gamma_ms2)
    for (std::size_t below : grid.delta_below)
      for (std::size_t above : grid.delta_above)
        for (std::size_t n : grid.window_n) {
          const detector_params p{gamma, below, above, n, grid.nominal_rate_hz};
          tuning_cell cell{p, evaluate_corpus(corpus, p, tolerance_s, cfg).report};
          if (!out.table.empty() && detail::preferred(cell, out.table[best])) best = out.table.size();
          out.table.push_back(std::move(cell));
        }
  out.best = out.table[best].params;
  return out;
}

}  // namespace subwayps::eval
