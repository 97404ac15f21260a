#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "subwayps/detector.hpp"
#include "subwayps/error.hpp"
#include "subwayps/eval.hpp"
#include "subwayps/params.hpp"
#include "subwayps/route.hpp"
#include "subwayps/signal.hpp"
#include "subwayps/simulate.hpp"
#include "subwayps/trip.hpp"

namespace subwayps::io {

/// Shortest round-trip decimal form.
inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

inline std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw io_error("cannot open '" + p.string() + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + p.string() + "' for writing");
  return out;
}

inline nlohmann::json read_json(const std::filesystem::path& p) {
  auto in = open_in(p);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw schema_error("'" + p.string() + "': " + e.what());
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view field, std::size_t row, std::string_view column) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc{} || ptr != last)
    throw schema_error("row " + std::to_string(row) + ": column '" + std::string(column) +
                       "' is not a number: '" + std::string(field) + "'");
  return v;
}

}  // namespace detail

inline constexpr std::string_view trace_header = "t_ms,ax,ay,az";
inline constexpr std::string_view magnitude_header = "t_ms,a_raw,a_smoothed";
inline constexpr std::string_view transition_header = "t_ms,onset_t_ms,kind";

/// Parses a trace CSV. Rows are numbered from 1 at the header line.
inline std::vector<accel_sample> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw schema_error("trace: empty file, expected header 't_ms,ax,ay,az'");
  if (!line.empty() && line.front() == '\xEF') line.erase(0, 3);  // UTF-8 BOM
  if (detail::trim(line) != trace_header)
    throw schema_error("row 1: expected header 't_ms,ax,ay,az'");
  std::vector<accel_sample> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line);
    if (f.size() != 4)
      throw schema_error("row " + std::to_string(row) + ": expected 4 columns, found " + std::to_string(f.size()));
    accel_sample s{detail::parse_double(f[0], row, "t_ms"), detail::parse_double(f[1], row, "ax"),
                   detail::parse_double(f[2], row, "ay"), detail::parse_double(f[3], row, "az")};
    try {
      validate(s);
    } catch (const rejected_sample& e) {
      throw rejected_sample(e.field(), "row " + std::to_string(row) + ": rejected sample: " + e.what());
    }
    if (!out.empty() && s.t_ms < out.back().t_ms)
      throw schema_error("row " + std::to_string(row) + ": t_ms decreases");
    out.push_back(s);
  }
  return out;
}

inline std::vector<accel_sample> read_trace_csv(const std::filesystem::path& p) {
  auto in = open_in(p);
  try {
    return read_trace_csv(in);
  } catch (const rejected_sample& e) {
    throw rejected_sample(e.field(), p.string() + ": " + e.what());
  } catch (const schema_error& e) {
    throw schema_error(p.string() + ": " + e.what());
  }
}

inline void write_trace_csv(std::ostream& out, std::span<const accel_sample> trace) {
  out << trace_header << '\n';
  for (const auto& s : trace)
    out << format_number(s.t_ms) << ',' << format_number(s.x) << ',' << format_number(s.y) << ','
        << format_number(s.z) << '\n';
}

struct magnitude_row {
  double t_ms = 0.0;
  double raw = 0.0;
  std::optional<double> smoothed;
};

inline void write_magnitudes_csv(std::ostream& out, std::span<const magnitude_row> rows) {
  out << magnitude_header << '\n';
  for (const auto& r : rows) {
    out << format_number(r.t_ms) << ',' << format_number(r.raw) << ',';
    if (r.smoothed) out << format_number(*r.smoothed);
    out << '\n';
  }
}

inline void write_transitions_csv(std::ostream& out, std::span<const motion_transition> transitions) {
  out << transition_header << '\n';
  for (const auto& t : transitions)
    out << format_number(t.t_ms) << ',' << format_number(t.onset_t_ms) << ',' << to_string(t.kind) << '\n';
}

inline std::vector<motion_transition> read_transitions_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != transition_header)
    throw schema_error("row 1: expected header 't_ms,onset_t_ms,kind'");
  std::vector<motion_transition> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line);
    if (f.size() != 3) throw schema_error("row " + std::to_string(row) + ": expected 3 columns");
    motion_transition t{detail::parse_double(f[0], row, "t_ms"), detail::parse_double(f[1], row, "onset_t_ms"),
                        transition_kind::stop_detected};
    if (f[2] == "STOP")
      t.kind = transition_kind::stop_detected;
    else if (f[2] == "MOVING")
      t.kind = transition_kind::moving_detected;
    else
      throw schema_error("row " + std::to_string(row) + ": kind must be STOP or MOVING");
    out.push_back(t);
  }
  return out;
}

// Event log -----------------------------------------------------------------

inline nlohmann::json event_to_json(const trip_event& e) {
  nlohmann::json j{{"t_ms", std::llround(e.t_ms)}, {"kind", std::string(to_string(e.kind))}};
  if (!e.station_id.empty()) j["station_id"] = e.station_id;
  if (e.fraction) j["fraction"] = *e.fraction;
  return j;
}

inline trip_event event_from_json(const nlohmann::json& j) {
  static constexpr event_kind kinds[] = {event_kind::departed, event_kind::station_arrival,
                                         event_kind::in_between_stop, event_kind::approaching_station,
                                         event_kind::arrived_at_destination, event_kind::unexpected_extra_stop};
  try {
    trip_event e;
    e.t_ms = static_cast<double>(j.at("t_ms").get<std::int64_t>());
    e.onset_t_ms = e.t_ms;
    const auto kind = j.at("kind").get<std::string>();
    bool known = false;
    for (auto k : kinds)
      if (to_string(k) == kind) {
        e.kind = k;
        known = true;
      }
    if (!known) throw schema_error("event log: unknown kind '" + kind + "'");
    if (j.contains("station_id")) e.station_id = j["station_id"].get<std::string>();
    if (j.contains("fraction")) e.fraction = j["fraction"].get<double>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw schema_error(std::string("event log: ") + ex.what());
  }
}

inline void write_events_jsonl(std::ostream& out, std::span<const trip_event> events) {
  for (const auto& e : events) out << event_to_json(e).dump() << '\n';
}

inline std::vector<trip_event> read_events_jsonl(std::istream& in) {
  std::vector<trip_event> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(event_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw schema_error("event log line " + std::to_string(row) + ": " + e.what());
    }
  }
  return out;
}

// Ground truth --------------------------------------------------------------

inline void write_truth_jsonl(std::ostream& out, const sim::ground_truth& truth) {
  nlohmann::json origin{{"label", "origin"},
                        {"station_id", truth.origin_id},
                        {"destination_id", truth.destination_id},
                        {"onset_t_ms", 0},
                        {"end_t_ms", truth.departure_ms},
                        {"scheduled_departure_t_ms", truth.scheduled_departure_ms}};
  out << origin.dump() << '\n';
  for (const auto& s : truth.stops) {
    nlohmann::json j{{"label", std::string(sim::to_string(s.label))},
                     {"onset_t_ms", s.onset_ms},
                     {"end_t_ms", s.end_ms}};
    if (s.label == sim::truth_label::station)
      j["station_id"] = s.station_id;
    else
      j["fraction"] = s.fraction;
    out << j.dump() << '\n';
  }
}

inline sim::ground_truth read_truth_jsonl(std::istream& in) {
  sim::ground_truth truth;
  std::string line;
  std::size_t row = 0;
  bool have_origin = false;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const std::string where = "truth line " + std::to_string(row) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      const auto label = j.at("label").get<std::string>();
      if (label == "origin") {
        truth.origin_id = j.at("station_id").get<std::string>();
        truth.destination_id = j.at("destination_id").get<std::string>();
        truth.departure_ms = j.at("end_t_ms").get<double>();
        truth.scheduled_departure_ms = j.value("scheduled_departure_t_ms", truth.departure_ms);
        have_origin = true;
        continue;
      }
      sim::truth_stop s;
      s.onset_ms = j.at("onset_t_ms").get<double>();
      s.end_ms = j.at("end_t_ms").get<double>();
      if (label == "station") {
        s.label = sim::truth_label::station;
        s.station_id = j.at("station_id").get<std::string>();
      } else if (label == "in_between") {
        s.label = sim::truth_label::in_between;
        s.fraction = j.at("fraction").get<double>();
      } else {
        throw schema_error(where + "unknown label '" + label + "'");
      }
      if (!truth.stops.empty() && s.onset_ms < truth.stops.back().end_ms)
        throw schema_error(where + "intervals must be disjoint and ordered");
      truth.stops.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw schema_error(where + e.what());
    }
  }
  if (!have_origin) throw schema_error("truth: missing origin line");
  return truth;
}

// Scripts -------------------------------------------------------------------

inline sim::trip_script script_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw script_error("script: expected a JSON object");
  try {
    route r;
    if (j.contains("route"))
      r = route_from_json(j["route"]);
    else if (j.contains("route_file"))
      r = route_from_json(read_json(base_dir / j["route_file"].get<std::string>()));
    else
      throw script_error("script: 'route' or 'route_file' is required");

    const auto origin = j.at("origin").get<std::string>();
    const auto destination = j.at("destination").get<std::string>();
    if (!r.index_of(origin)) throw config_error("script: unknown origin station '" + origin + "'");
    if (!r.index_of(destination)) throw config_error("script: unknown destination station '" + destination + "'");
    sim::trip_script s{trip_plan(r, origin, destination), {}, {}, {}, {}, 0.0, 0};
    s.travel_s = j.at("travel_s").get<std::vector<double>>();
    s.dwell_s = j.at("dwell_s").get<std::vector<double>>();
    for (const auto& h : j.value("in_between", nlohmann::json::array()))
      s.in_between.push_back({h.at("segment").get<std::size_t>(), h.at("fraction").get<double>(),
                              h.at("duration_s").get<double>()});
    for (const auto& b : j.value("bursts", nlohmann::json::array()))
      s.bursts.push_back({b.at("start_s").get<double>(), b.at("duration_s").get<double>(),
                          b.at("amplitude_ms2").get<double>()});
    s.schedule_offset_s = j.value("schedule_offset_s", 0.0);
    s.seed = j.value("seed", std::uint64_t{0});
    sim::build_timeline(s);  // reject inconsistent scripts early
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw script_error(std::string("script: ") + e.what());
  }
}

inline nlohmann::json script_to_json(const sim::trip_script& s) {
  const auto& plan = s.plan;
  route r{plan.line_id(), plan.stations(), plan.segment_durations_s()};
  nlohmann::json holds = nlohmann::json::array();
  for (const auto& h : s.in_between)
    holds.push_back({{"segment", h.segment}, {"fraction", h.fraction}, {"duration_s", h.duration_s}});
  nlohmann::json bursts = nlohmann::json::array();
  for (const auto& b : s.bursts)
    bursts.push_back({{"start_s", b.start_s}, {"duration_s", b.duration_s}, {"amplitude_ms2", b.amplitude_ms2}});
  return {{"route", route_to_json(r)},
          {"origin", plan.origin().id},
          {"destination", plan.destination().id},
          {"travel_s", s.travel_s},
          {"dwell_s", s.dwell_s},
          {"in_between", holds},
          {"bursts", bursts},
          {"schedule_offset_s", s.schedule_offset_s},
          {"seed", s.seed}};
}

inline sim::train_profile profile_from_json(const nlohmann::json& j) {
  sim::train_profile p;
  try {
    p.cruise_noise_sigma = j.at("cruise_noise_sigma").get<double>();
    p.dwell_noise_sigma = j.at("dwell_noise_sigma").get<double>();
    p.vibration_ms2 = j.value("vibration_ms2", p.vibration_ms2);
    p.vibration_hz = j.value("vibration_hz", p.vibration_hz);
    p.ramp_seconds = j.at("ramp_seconds").get<double>();
    p.ramp_peak_ms2 = j.at("ramp_peak_ms2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(std::string("profile: ") + e.what());
  }
  sim::validate(p);
  return p;
}

/// A preset name or a path to a parameter JSON file.
inline detector_params load_params(const std::string& preset_or_path) {
  if (auto p = find_preset(preset_or_path)) return *p;
  if (!std::filesystem::exists(preset_or_path))
    throw config_error("unknown parameter preset '" + preset_or_path +
                       "' (expected worldwide, london, cologne or a JSON file)");
  return read_json(preset_or_path).get<detector_params>();
}

inline eval::tuning_grid grid_from_json(const nlohmann::json& j) {
  eval::tuning_grid g;
  try {
    if (j.contains("gamma_ms2")) g.gamma_ms2 = j["gamma_ms2"].get<std::vector<double>>();
    if (j.contains("delta_below")) g.delta_below = j["delta_below"].get<std::vector<std::size_t>>();
    if (j.contains("delta_above")) g.delta_above = j["delta_above"].get<std::vector<std::size_t>>();
    if (j.contains("window_n")) g.window_n = j["window_n"].get<std::vector<std::size_t>>();
    g.nominal_rate_hz = j.value("nominal_rate_hz", 50.0);
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(std::string("grid: ") + e.what());
  }
  for (double gamma : g.gamma_ms2)
    if (!(gamma > 0.0)) throw config_error("grid: gamma_ms2 values must be > 0");
  for (const auto* v : {&g.delta_below, &g.delta_above, &g.window_n})
    for (auto x : *v)
      if (x < 1) throw config_error("grid: sample counts must be >= 1");
  if (g.size() == 0) throw config_error("grid: every axis needs at least one value");
  return g;
}

}  // namespace subwayps::io
