#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "subwayps/error.hpp"
#include "subwayps/route.hpp"
#include "subwayps/signal.hpp"

namespace subwayps::sim {

/// Signal character of a train while moving and while standing.
///
/// Moving samples carry a constant-magnitude running vibration on the lateral
/// axes, raised-cosine longitudinal ramps at each start and stop, and per-axis
/// Gaussian noise. Standing samples carry only the dwell noise.
struct train_profile {
  double cruise_noise_sigma = 0.25;  // m/s^2 per axis while moving
  double dwell_noise_sigma = 0.02;   // m/s^2 per axis while stopped
  double vibration_ms2 = 0.3;        // deterministic running vibration amplitude
  double vibration_hz = 1.3;
  double ramp_seconds = 8.0;
  double ramp_peak_ms2 = 0.6;
  axis_bias bias{};  // constant sensor offset added to every sample
};

inline void validate(const train_profile& p) {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(p.cruise_noise_sigma) || !finite_nonneg(p.dwell_noise_sigma) ||
      !finite_nonneg(p.vibration_ms2) || !finite_nonneg(p.vibration_hz) ||
      !finite_nonneg(p.ramp_seconds) || !finite_nonneg(p.ramp_peak_ms2))
    throw config_error("train profile: values must be finite and >= 0");
  // Noise-free profiles (both sigmas zero) are allowed; otherwise moving must be noisier.
  const bool noise_free = p.cruise_noise_sigma == 0.0 && p.dwell_noise_sigma == 0.0;
  if (!noise_free && !(p.cruise_noise_sigma > p.dwell_noise_sigma))
    throw config_error("train profile: cruise noise must exceed dwell noise");
}

namespace profiles {

// Slow, gentle acceleration.
inline train_profile london_like() { return {0.25, 0.02, 0.30, 1.3, 10.0, 0.5, {}}; }

// Short, hard acceleration.
inline train_profile cologne_like() { return {0.30, 0.025, 0.35, 1.7, 4.0, 1.1, {}}; }

inline train_profile noise_free(train_profile p) {
  p.cruise_noise_sigma = 0.0;
  p.dwell_noise_sigma = 0.0;
  return p;
}

}  // namespace profiles

inline std::optional<train_profile> find_profile(std::string_view name) {
  if (name == "london_like") return profiles::london_like();
  if (name == "cologne_like") return profiles::cologne_like();
  return std::nullopt;
}

struct in_between_stop {
  std::size_t segment = 0;  // plan segment index
  double fraction = 0.5;    // share of the segment's moving time completed when the train halts
  double duration_s = 20.0;
};

struct handling_burst {
  double start_s = 0.0;
  double duration_s = 1.0;
  double amplitude_ms2 = 1.0;  // peak per-axis standard deviation
};

/// Everything needed to render one trip.
///
/// travel_s[i] is moving time on segment i excluding unscheduled holds.
/// dwell_s has one entry per plan station: the origin wait, intermediate
/// dwells, and the time spent standing at the destination before the trace ends.
struct trip_script {
  trip_plan plan;
  std::vector<double> travel_s;
  std::vector<double> dwell_s;
  std::vector<in_between_stop> in_between;
  std::vector<handling_burst> bursts;
  double schedule_offset_s = 0.0;  // actual departure minus timetabled departure
  std::uint64_t seed = 0;
};

enum class truth_label { origin, station, in_between };

inline std::string_view to_string(truth_label l) {
  switch (l) {
    case truth_label::origin: return "origin";
    case truth_label::station: return "station";
    case truth_label::in_between: return "in_between";
  }
  return "?";
}

struct truth_stop {
  double onset_ms = 0.0;
  double end_ms = 0.0;
  truth_label label = truth_label::station;
  std::string station_id;  // station stops
  double fraction = 0.0;   // in-between stops

  friend bool operator==(const truth_stop&, const truth_stop&) = default;
};

/// Labelled stationary intervals. `stops` excludes the origin wait, which
/// is summarized by departure_ms.
struct ground_truth {
  std::string origin_id;
  std::string destination_id;
  double departure_ms = 0.0;
  double scheduled_departure_ms = 0.0;
  std::vector<truth_stop> stops;

  friend bool operator==(const ground_truth&, const ground_truth&) = default;
};

struct simulation {
  std::vector<accel_sample> trace;
  ground_truth truth;
};

/// One contiguous interval of the rendered trip.
struct phase_interval {
  double start_s = 0.0;
  double end_s = 0.0;
  bool moving = false;
};

inline constexpr double min_moving_stretch_s = 1.0;

/// Lays out the script as alternating standing/moving intervals and the
/// matching ground truth. Throws script_error for inconsistent scripts.
inline std::vector<phase_interval> build_timeline(const trip_script& s, ground_truth* truth = nullptr) {
  const auto& plan = s.plan;
  const std::size_t segments = plan.segment_count();
  if (s.travel_s.size() != segments)
    throw script_error("script: travel_s must have one entry per segment");
  if (s.dwell_s.size() != plan.stations().size())
    throw script_error("script: dwell_s must have one entry per station");
  for (std::size_t i = 0; i < segments; ++i)
    if (!(s.travel_s[i] > 0.0) || !std::isfinite(s.travel_s[i]))
      throw script_error("script: travel_s[" + std::to_string(i) + "] must be > 0");
  for (std::size_t i = 0; i < s.dwell_s.size(); ++i)
    if (!(s.dwell_s[i] > 0.0) || !std::isfinite(s.dwell_s[i]))
      throw script_error("script: dwell_s[" + std::to_string(i) + "] must be > 0");
  if (!std::isfinite(s.schedule_offset_s)) throw script_error("script: schedule_offset_s must be finite");

  std::vector<std::vector<in_between_stop>> holds(segments);
  for (std::size_t k = 0; k < s.in_between.size(); ++k) {
    const auto& h = s.in_between[k];
    const std::string where = "script: in_between[" + std::to_string(k) + "]";
    if (h.segment >= segments) throw script_error(where + ".segment out of range");
    if (!(h.fraction > 0.0 && h.fraction < 1.0)) throw script_error(where + ".fraction must lie in (0, 1)");
    if (!(h.duration_s > 0.0) || !std::isfinite(h.duration_s))
      throw script_error(where + ".duration_s must be > 0");
    holds[h.segment].push_back(h);
  }

  ground_truth gt;
  gt.origin_id = plan.origin().id;
  gt.destination_id = plan.destination().id;

  std::vector<phase_interval> timeline;
  double t = s.dwell_s[0];
  timeline.push_back({0.0, t, false});
  gt.departure_ms = t * 1000.0;
  gt.scheduled_departure_ms = (t - s.schedule_offset_s) * 1000.0;

  for (std::size_t seg = 0; seg < segments; ++seg) {
    auto& hs = holds[seg];
    std::stable_sort(hs.begin(), hs.end(),
                     [](const auto& a, const auto& b) { return a.fraction < b.fraction; });
    const double travel = s.travel_s[seg];
    double moved = 0.0;
    for (const auto& h : hs) {
      const double stretch = h.fraction * travel - moved;
      if (stretch < min_moving_stretch_s)
        throw script_error("script: in-between stops on segment " + std::to_string(seg) +
                           " overlap or leave less than 1 s of movement");
      timeline.push_back({t, t + stretch, true});
      t += stretch;
      moved += stretch;
      gt.stops.push_back({t * 1000.0, (t + h.duration_s) * 1000.0, truth_label::in_between, {}, h.fraction});
      timeline.push_back({t, t + h.duration_s, false});
      t += h.duration_s;
    }
    const double last = travel - moved;
    if (last < min_moving_stretch_s)
      throw script_error("script: in-between stop on segment " + std::to_string(seg) +
                         " leaves less than 1 s of movement before the station");
    timeline.push_back({t, t + last, true});
    t += last;
    const double dwell = s.dwell_s[seg + 1];
    gt.stops.push_back({t * 1000.0, (t + dwell) * 1000.0, truth_label::station,
                        plan.stations()[seg + 1].id, 0.0});
    timeline.push_back({t, t + dwell, false});
    t += dwell;
  }

  std::vector<handling_burst> bursts = s.bursts;
  std::stable_sort(bursts.begin(), bursts.end(),
                   [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
  for (std::size_t k = 0; k < bursts.size(); ++k) {
    const auto& b = bursts[k];
    if (!(b.start_s >= 0.0) || !(b.duration_s > 0.0) || !(b.amplitude_ms2 >= 0.0) ||
        !std::isfinite(b.start_s + b.duration_s + b.amplitude_ms2))
      throw script_error("script: burst with invalid start, duration or amplitude");
    if (b.start_s + b.duration_s > t) throw script_error("script: burst extends past the end of the trip");
    if (k > 0 && b.start_s < bursts[k - 1].start_s + bursts[k - 1].duration_s)
      throw script_error("script: handling bursts overlap");
  }

  if (truth) *truth = std::move(gt);
  return timeline;
}

namespace detail {

// Raised-cosine longitudinal acceleration for a moving stretch: positive
// lobe while accelerating, negative lobe while braking.
inline double ramp_accel(double tau, double length, const train_profile& p) {
  const double r = std::min(p.ramp_seconds, length / 2.0);
  if (r <= 0.0) return 0.0;
  const double two_pi = 2.0 * std::numbers::pi;
  if (tau < r) return p.ramp_peak_ms2 * 0.5 * (1.0 - std::cos(two_pi * tau / r));
  if (tau > length - r) return -p.ramp_peak_ms2 * 0.5 * (1.0 - std::cos(two_pi * (tau - (length - r)) / r));
  return 0.0;
}

// Gaussian envelope with sigma = duration / 8, centred in the burst.
inline double burst_envelope(double tau, double duration) {
  const double sigma = duration / 8.0;
  const double u = (tau - duration / 2.0) / sigma;
  return std::exp(-0.5 * u * u);
}

}  // namespace detail

/// Renders the script at `rate_hz`. Deterministic for a given script seed.
inline simulation generate(const trip_script& script, const train_profile& profile, double rate_hz) {
  validate(profile);
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) throw config_error("sample rate must be > 0");

  simulation out;
  const auto timeline = build_timeline(script, &out.truth);
  const double total_s = timeline.back().end_s;
  const auto count = static_cast<std::size_t>(std::llround(total_s * rate_hz));

  std::vector<handling_burst> bursts = script.bursts;
  std::stable_sort(bursts.begin(), bursts.end(),
                   [](const auto& a, const auto& b) { return a.start_s < b.start_s; });

  std::mt19937_64 rng(script.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;

  out.trace.reserve(count);
  std::size_t phase = 0;
  std::size_t burst = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t_s = static_cast<double>(k) / rate_hz;
    while (phase + 1 < timeline.size() && t_s >= timeline[phase].end_s) ++phase;
    const auto& iv = timeline[phase];

    accel_sample s{static_cast<double>(k) * 1000.0 / rate_hz, 0.0, 0.0, 0.0};
    double sigma = profile.dwell_noise_sigma;
    if (iv.moving) {
      sigma = profile.cruise_noise_sigma;
      s.x = detail::ramp_accel(t_s - iv.start_s, iv.end_s - iv.start_s, profile);
      s.y = profile.vibration_ms2 * std::cos(two_pi * profile.vibration_hz * t_s);
      s.z = profile.vibration_ms2 * std::sin(two_pi * profile.vibration_hz * t_s);
    }
    s.x += sigma * gauss(rng);
    s.y += sigma * gauss(rng);
    s.z += sigma * gauss(rng);

    while (burst < bursts.size() && t_s >= bursts[burst].start_s + bursts[burst].duration_s) ++burst;
    if (burst < bursts.size() && t_s >= bursts[burst].start_s) {
      const auto& b = bursts[burst];
      const double amp = b.amplitude_ms2 * detail::burst_envelope(t_s - b.start_s, b.duration_s);
      s.x += amp * gauss(rng);
      s.y += amp * gauss(rng);
      s.z += amp * gauss(rng);
    }

    s.x += profile.bias.x;
    s.y += profile.bias.y;
    s.z += profile.bias.z;
    out.trace.push_back(s);
  }
  return out;
}

/// Trip-level delay model.
///
/// Every segment gets a small independent lognormal jitter; with probability
/// `disruption_probability` the whole trip is additionally stretched by a
/// lognormal factor (crowding at stations). The stretch mean is solved so
/// that the total trip time has standard deviation sigma_fraction * total.
struct delay_model {
  double sigma_fraction = 7.12 / 29.0;
  double disruption_probability = 0.35;
  double disruption_cv = 0.5;
  double jitter_share = 0.2;  // per-segment jitter sigma as a share of sigma_fraction
  double floor = 0.3;         // lower bound on any segment multiplier
};

namespace detail {

// Mean extra stretch of a disrupted trip so the total matches the target spread.
inline double solve_disruption_mean(std::span<const double> scheduled, const delay_model& m) {
  double total = 0.0;
  double squares = 0.0;
  for (double d : scheduled) {
    total += d;
    squares += d * d;
  }
  const double jitter = m.jitter_share * m.sigma_fraction;
  const double p = m.disruption_probability;
  const double c2 = m.disruption_cv * m.disruption_cv;
  const double target = m.sigma_fraction * m.sigma_fraction * total * total;
  auto variance = [&](double mean) {
    const double ef = 1.0 + p * mean;
    const double ef2 = 1.0 + 2.0 * p * mean + p * mean * mean * (1.0 + c2);
    return ef2 * (total * total + jitter * jitter * squares) - total * total * ef * ef;
  };
  if (variance(0.0) >= target || p <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (variance(hi) < target) hi *= 2.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (variance(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Lognormal draw with the given mean and standard deviation.
inline double lognormal(std::mt19937_64& rng, double mean, double sd) {
  if (sd <= 0.0) return mean;
  const double s2 = std::log(1.0 + (sd * sd) / (mean * mean));
  std::lognormal_distribution<double> dist(std::log(mean) - 0.5 * s2, std::sqrt(s2));
  return dist(rng);
}

}  // namespace detail

/// Actual seconds per segment for one realization of the delay model.
inline std::vector<double> sample_delays(std::span<const double> scheduled, const delay_model& m,
                                         std::mt19937_64& rng) {
  if (!(m.sigma_fraction >= 0.0)) throw config_error("delay model: sigma_fraction must be >= 0");
  if (!(m.disruption_probability >= 0.0 && m.disruption_probability <= 1.0))
    throw config_error("delay model: disruption_probability must lie in [0, 1]");
  std::vector<double> out(scheduled.begin(), scheduled.end());
  if (m.sigma_fraction == 0.0) return out;

  const double stretch_mean = detail::solve_disruption_mean(scheduled, m);
  double factor = 1.0;
  std::bernoulli_distribution disrupted(m.disruption_probability);
  if (disrupted(rng) && stretch_mean > 0.0)
    factor += detail::lognormal(rng, stretch_mean, stretch_mean * m.disruption_cv);
  const double jitter = m.jitter_share * m.sigma_fraction;
  for (auto& d : out) d *= std::max(m.floor, factor * detail::lognormal(rng, 1.0, jitter));
  return out;
}

inline std::vector<double> sample_delays(const route& r, double sigma_fraction, std::mt19937_64& rng) {
  delay_model m;
  m.sigma_fraction = sigma_fraction;
  return sample_delays(r.segment_durations_s, m, rng);
}

/// Converts timetable-level segment times into script travel times.
///
/// Segment i (i >= 1) of the timetable spans the dwell at its first station
/// plus the run to the next one, so travel_s[i] = actual[i] - dwell_s[i].
inline std::vector<double> travel_from_schedule(std::span<const double> actual_s,
                                                std::span<const double> dwell_s) {
  std::vector<double> travel(actual_s.begin(), actual_s.end());
  for (std::size_t i = 1; i < travel.size(); ++i)
    travel[i] = std::max(4.0 * min_moving_stretch_s, travel[i] - dwell_s[i]);
  return travel;
}

/// Derives independent per-trip seeds from a corpus seed (splitmix64).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Randomized trip generator used to build evaluation corpora.
struct scenario {
  train_profile profile = profiles::london_like();
  std::size_t stations_per_trip = 7;
  double origin_dwell_min_s = 20.0, origin_dwell_max_s = 40.0;
  double dwell_min_s = 15.0, dwell_max_s = 30.0;
  double in_between_probability = 0.0;  // per segment
  double in_between_min_fraction = 0.15, in_between_max_fraction = 0.55;
  double hold_min_s = 15.0, hold_max_s = 40.0;
  // A hop: after a hold the train creeps forward briefly and holds again.
  double hop_probability = 0.0;
  double hop_min_s = 4.8, hop_max_s = 6.0;
  double cruise_bursts_per_trip = 0.0;
  double cruise_burst_min_s = 1.0, cruise_burst_max_s = 4.9;
  double dwell_bursts_per_trip = 0.0;
  double dwell_burst_min_s = 1.0, dwell_burst_max_s = 6.9;
  double burst_min_amplitude = 0.5, burst_max_amplitude = 2.5;
  delay_model delays{0.0};
  double schedule_offset_sd_s = 0.0;
};

namespace scenarios {

// Gentle trains, frequent signal holds, some of them with a short creep.
inline scenario london() {
  scenario s;
  s.profile = profiles::london_like();
  s.in_between_probability = 0.35;
  s.hop_probability = 0.6;
  s.cruise_bursts_per_trip = 1.0;
  s.dwell_bursts_per_trip = 0.5;
  s.dwell_burst_max_s = 4.0;
  return s;
}

// Hard-accelerating trains with long phone handling while standing.
inline scenario cologne() {
  scenario s;
  s.profile = profiles::cologne_like();
  s.dwell_min_s = 20.0;
  s.dwell_max_s = 30.0;
  s.in_between_probability = 0.15;
  s.cruise_bursts_per_trip = 1.0;
  s.dwell_bursts_per_trip = 2.0;
  s.dwell_burst_min_s = 9.0;
  s.dwell_burst_max_s = 12.0;
  s.burst_min_amplitude = 1.0;
  s.burst_max_amplitude = 2.0;
  return s;
}

// Seven-station rides with day-to-day delays and timetable offsets.
inline scenario delayed() {
  scenario s;
  s.profile = profiles::cologne_like();
  s.in_between_probability = 0.1;
  s.cruise_bursts_per_trip = 1.0;
  s.dwell_bursts_per_trip = 0.5;
  s.dwell_burst_max_s = 6.0;
  s.delays = delay_model{};
  s.schedule_offset_sd_s = 30.0;
  return s;
}

}  // namespace scenarios

inline std::optional<scenario> find_scenario(std::string_view name) {
  if (name == "london") return scenarios::london();
  if (name == "cologne") return scenarios::cologne();
  if (name == "delayed") return scenarios::delayed();
  return std::nullopt;
}

/// A line with minute-precision segment times.
inline route synthetic_route(std::size_t stations, std::uint64_t seed, std::string line_id = "L1") {
  if (stations < 2) throw config_error("synthetic route needs at least 2 stations");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> minutes(2, 4);
  route r;
  r.line_id = std::move(line_id);
  for (std::size_t i = 0; i < stations; ++i) {
    const std::string id = "S" + std::to_string(i);
    r.stations.push_back({id, "Station " + std::to_string(i), std::nullopt, std::nullopt});
  }
  for (std::size_t i = 0; i + 1 < stations; ++i) r.segment_durations_s.push_back(60.0 * minutes(rng));
  return r;
}

namespace detail {

inline std::size_t poisson_count(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::size_t>(mean)(rng);
}

// Places non-overlapping bursts inside intervals of the requested kind,
// keeping `margin_s` clear of the interval edges.
inline void place_bursts(std::vector<handling_burst>& bursts, const std::vector<phase_interval>& timeline,
                         bool moving, std::size_t count, double min_s, double max_s, double min_amp,
                         double max_amp, double margin_s, std::mt19937_64& rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i < timeline.size(); ++i)
    if (timeline[i].moving == moving && timeline[i].end_s - timeline[i].start_s >= max_s + 2.0 * margin_s)
      candidates.push_back(i);
  if (candidates.empty()) return;
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t n = 0; n < count; ++n) {
    const auto& iv = timeline[candidates[pick(rng)]];
    const double duration = min_s + (max_s - min_s) * unit(rng);
    const double lo = iv.start_s + margin_s;
    const double hi = iv.end_s - margin_s - duration;
    const double start = lo + (hi - lo) * unit(rng);
    const double amplitude = min_amp + (max_amp - min_amp) * unit(rng);
    const handling_burst b{start, duration, amplitude};
    const bool clash = std::any_of(bursts.begin(), bursts.end(), [&](const handling_burst& o) {
      return b.start_s < o.start_s + o.duration_s + margin_s && o.start_s < b.start_s + b.duration_s + margin_s;
    });
    if (!clash) bursts.push_back(b);
  }
}

}  // namespace detail

/// Draws a random trip on `r` under scenario `sc`.
inline trip_script random_script(const route& r, const scenario& sc, std::uint64_t seed) {
  validate(r);
  if (sc.stations_per_trip < 2 || sc.stations_per_trip > r.stations.size())
    throw config_error("scenario: stations_per_trip must lie in [2, route stations]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const std::size_t span = sc.stations_per_trip - 1;
  std::uniform_int_distribution<std::size_t> first(0, r.stations.size() - 1 - span);
  const std::size_t a = first(rng);
  const bool reverse = unit(rng) < 0.5;
  trip_plan plan(r, reverse ? a + span : a, reverse ? a : a + span);

  std::vector<double> dwell(plan.stations().size());
  dwell.front() = uniform(sc.origin_dwell_min_s, sc.origin_dwell_max_s);
  for (std::size_t i = 1; i < dwell.size(); ++i) dwell[i] = uniform(sc.dwell_min_s, sc.dwell_max_s);

  const auto actual = sample_delays(plan.segment_durations_s(), sc.delays, rng);
  auto travel = travel_from_schedule(actual, dwell);

  std::vector<in_between_stop> holds;
  for (std::size_t seg = 0; seg < plan.segment_count(); ++seg) {
    if (unit(rng) >= sc.in_between_probability) continue;
    const double f = uniform(sc.in_between_min_fraction, sc.in_between_max_fraction);
    holds.push_back({seg, f, uniform(sc.hold_min_s, sc.hold_max_s)});
    if (unit(rng) < sc.hop_probability) {
      const double hop = uniform(sc.hop_min_s, sc.hop_max_s);
      const double f2 = f + hop / travel[seg];
      if (f2 < 0.9) holds.push_back({seg, f2, uniform(sc.hold_min_s, sc.hold_max_s)});
    }
  }

  trip_script script{std::move(plan), std::move(travel), std::move(dwell), std::move(holds), {},
                     sc.schedule_offset_sd_s > 0.0
                         ? std::normal_distribution<double>(0.0, sc.schedule_offset_sd_s)(rng)
                         : 0.0,
                     derive_seed(seed, 0x5157)};

  const auto timeline = build_timeline(script);
  const double margin = 2.0;
  detail::place_bursts(script.bursts, timeline, true, detail::poisson_count(rng, sc.cruise_bursts_per_trip),
                       sc.cruise_burst_min_s, sc.cruise_burst_max_s, sc.burst_min_amplitude,
                       sc.burst_max_amplitude, margin + sc.profile.ramp_seconds, rng);
  detail::place_bursts(script.bursts, timeline, false, detail::poisson_count(rng, sc.dwell_bursts_per_trip),
                       sc.dwell_burst_min_s, sc.dwell_burst_max_s, sc.burst_min_amplitude,
                       sc.burst_max_amplitude, margin, rng);
  return script;
}

}  // namespace subwayps::sim
