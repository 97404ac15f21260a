#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "subwayps/error.hpp"

namespace subwayps {

struct station {
  std::string id;
  std::string name;
  std::optional<double> lat;
  std::optional<double> lon;

  friend bool operator==(const station&, const station&) = default;
};

/// An ordered line with scheduled seconds between consecutive stations.
struct route {
  std::string line_id;
  std::vector<station> stations;
  std::vector<double> segment_durations_s;  // stations.size() - 1 entries, all > 0

  std::optional<std::size_t> index_of(std::string_view station_id) const {
    for (std::size_t i = 0; i < stations.size(); ++i)
      if (stations[i].id == station_id) return i;
    return std::nullopt;
  }

  friend bool operator==(const route&, const route&) = default;
};

inline void validate(const route& r) {
  if (r.stations.size() < 2) throw schema_error("route: at least 2 stations are required");
  if (r.segment_durations_s.size() != r.stations.size() - 1)
    throw schema_error("route: segment_durations_s must have stations - 1 entries");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < r.stations.size(); ++i)
    if (!ids.insert(r.stations[i].id).second)
      throw schema_error("route: stations[" + std::to_string(i) + "].id '" + r.stations[i].id +
                         "' is a duplicate");
  for (std::size_t i = 0; i < r.segment_durations_s.size(); ++i)
    if (!(r.segment_durations_s[i] > 0.0))
      throw schema_error("route: segment_durations_s[" + std::to_string(i) + "] must be > 0");
}

namespace detail {

// "HH:MM" or "HH:MM:SS" -> seconds since midnight.
inline double parse_clock(std::string_view text, const std::string& field) {
  int parts[3] = {0, 0, 0};
  std::size_t count = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  while (p < end && count < 3) {
    auto [next, ec] = std::from_chars(p, end, parts[count]);
    if (ec != std::errc{} || next == p) break;
    ++count;
    p = next;
    if (p < end && *p == ':') ++p;
    else break;
  }
  if (p != end || count < 2 || parts[1] > 59 || parts[2] > 59 || parts[0] < 0 || parts[1] < 0 ||
      parts[2] < 0)
    throw schema_error("route: " + field + " is not a valid HH:MM time: '" + std::string(text) + "'");
  return parts[0] * 3600.0 + parts[1] * 60.0 + parts[2];
}

}  // namespace detail

inline route route_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw schema_error("route: expected a JSON object");
  route r;
  try {
    r.line_id = j.value("line_id", std::string{});
    const auto& stations = j.at("stations");
    if (!stations.is_array()) throw schema_error("route: 'stations' must be an array");
    for (std::size_t i = 0; i < stations.size(); ++i) {
      const auto& s = stations[i];
      const std::string where = "stations[" + std::to_string(i) + "]";
      if (!s.is_object() || !s.contains("id") || !s["id"].is_string())
        throw schema_error("route: " + where + ".id must be a string");
      station st;
      st.id = s["id"].get<std::string>();
      st.name = s.value("name", st.id);
      if (s.contains("lat")) st.lat = s["lat"].get<double>();
      if (s.contains("lon")) st.lon = s["lon"].get<double>();
      r.stations.push_back(std::move(st));
    }
    if (r.stations.size() < 2) throw schema_error("route: at least 2 stations are required");

    if (j.contains("segment_durations_s")) {
      const auto& d = j["segment_durations_s"];
      if (!d.is_array()) throw schema_error("route: 'segment_durations_s' must be an array");
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (!d[i].is_number())
          throw schema_error("route: segment_durations_s[" + std::to_string(i) + "] must be a number");
        r.segment_durations_s.push_back(d[i].get<double>());
      }
    } else if (j.contains("departure_times")) {
      const auto& d = j["departure_times"];
      if (!d.is_array() || d.size() != r.stations.size())
        throw schema_error("route: 'departure_times' must have one entry per station");
      std::vector<double> clock;
      for (std::size_t i = 0; i < d.size(); ++i) {
        const std::string where = "departure_times[" + std::to_string(i) + "]";
        if (!d[i].is_string()) throw schema_error("route: " + where + " must be a string");
        clock.push_back(detail::parse_clock(d[i].get<std::string>(), where));
      }
      for (std::size_t i = 1; i < clock.size(); ++i) {
        if (clock[i] <= clock[i - 1])
          throw schema_error("route: departure_times[" + std::to_string(i) +
                             "] is not after the previous entry");
        r.segment_durations_s.push_back(clock[i] - clock[i - 1]);
      }
    } else {
      throw schema_error("route: one of 'segment_durations_s' or 'departure_times' is required");
    }
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(std::string("route: ") + e.what());
  }
  validate(r);
  return r;
}

inline nlohmann::json route_to_json(const route& r) {
  nlohmann::json stations = nlohmann::json::array();
  for (const auto& s : r.stations) {
    nlohmann::json js{{"id", s.id}, {"name", s.name}};
    if (s.lat) js["lat"] = *s.lat;
    if (s.lon) js["lon"] = *s.lon;
    stations.push_back(std::move(js));
  }
  return {{"line_id", r.line_id}, {"stations", stations}, {"segment_durations_s", r.segment_durations_s}};
}

inline route load_route(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open route file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw schema_error("route file '" + path + "': " + e.what());
  }
  return route_from_json(j);
}

/// A trip between two stations, stored origin -> destination.
class trip_plan {
 public:
  trip_plan(const route& r, std::size_t origin, std::size_t destination) {
    validate(r);
    if (origin >= r.stations.size() || destination >= r.stations.size())
      throw config_error("trip plan: station index out of range");
    if (origin == destination) throw config_error("trip plan: origin and destination must differ");
    line_id_ = r.line_id;
    const bool forward = origin < destination;
    const std::size_t lo = std::min(origin, destination);
    const std::size_t hi = std::max(origin, destination);
    stations_.assign(r.stations.begin() + static_cast<std::ptrdiff_t>(lo),
                     r.stations.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    segments_.assign(r.segment_durations_s.begin() + static_cast<std::ptrdiff_t>(lo),
                     r.segment_durations_s.begin() + static_cast<std::ptrdiff_t>(hi));
    if (!forward) {
      std::reverse(stations_.begin(), stations_.end());
      std::reverse(segments_.begin(), segments_.end());
    }
  }

  trip_plan(const route& r, std::string_view origin_id, std::string_view destination_id)
      : trip_plan(r, require(r, origin_id), require(r, destination_id)) {}

  const std::string& line_id() const noexcept { return line_id_; }
  const std::vector<station>& stations() const noexcept { return stations_; }
  const std::vector<double>& segment_durations_s() const noexcept { return segments_; }
  std::size_t segment_count() const noexcept { return segments_.size(); }
  const station& origin() const { return stations_.front(); }
  const station& destination() const { return stations_.back(); }

  double total_scheduled_s() const {
    double sum = 0.0;
    for (double d : segments_) sum += d;
    return sum;
  }

 private:
  static std::size_t require(const route& r, std::string_view id) {
    auto idx = r.index_of(id);
    if (!idx) throw config_error("trip plan: unknown station id '" + std::string(id) + "'");
    return *idx;
  }

  std::string line_id_;
  std::vector<station> stations_;
  std::vector<double> segments_;
};

}  // namespace subwayps
