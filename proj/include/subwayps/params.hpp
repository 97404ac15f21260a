#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "subwayps/error.hpp"

namespace subwayps {

/// Detector configuration. Sample counts are defined at `nominal_rate_hz`.
struct detector_params {
  double gamma_ms2 = 0.2;          // threshold on the smoothed magnitude
  std::size_t delta_below = 250;   // consecutive samples below gamma -> stop
  std::size_t delta_above = 350;   // consecutive samples above gamma -> moving
  std::size_t window_n = 100;      // rolling-average window
  double nominal_rate_hz = 50.0;

  double sample_period_ms() const { return 1000.0 / nominal_rate_hz; }

  friend bool operator==(const detector_params&, const detector_params&) = default;
};

inline void validate(const detector_params& p) {
  if (!(p.gamma_ms2 > 0.0) || !std::isfinite(p.gamma_ms2))
    throw config_error("gamma_ms2 must be a finite value > 0");
  if (p.delta_below < 1) throw config_error("delta_below must be >= 1");
  if (p.delta_above < 1) throw config_error("delta_above must be >= 1");
  if (p.window_n < 1) throw config_error("window_n must be >= 1");
  if (!(p.nominal_rate_hz > 0.0) || !std::isfinite(p.nominal_rate_hz))
    throw config_error("nominal_rate_hz must be a finite value > 0");
}

namespace presets {

inline constexpr detector_params worldwide{0.2, 250, 350, 100, 50.0};
inline constexpr detector_params london{0.2, 250, 250, 100, 50.0};
inline constexpr detector_params cologne{0.2, 250, 500, 100, 50.0};

}  // namespace presets

inline std::optional<detector_params> find_preset(std::string_view name) {
  if (name == "worldwide") return presets::worldwide;
  if (name == "london") return presets::london;
  if (name == "cologne") return presets::cologne;
  return std::nullopt;
}

inline void to_json(nlohmann::json& j, const detector_params& p) {
  j = nlohmann::json{{"gamma_ms2", p.gamma_ms2},
                     {"delta_below", p.delta_below},
                     {"delta_above", p.delta_above},
                     {"window_n", p.window_n},
                     {"nominal_rate_hz", p.nominal_rate_hz}};
}

inline void from_json(const nlohmann::json& j, detector_params& p) {
  if (!j.is_object()) throw schema_error("parameter file: expected a JSON object");
  auto count = [&](const char* key) -> std::size_t {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1)
      throw schema_error(std::string("parameter file: '") + key + "' must be an integer >= 1");
    return v.get<std::size_t>();
  };
  try {
    p.gamma_ms2 = j.at("gamma_ms2").get<double>();
    p.delta_below = count("delta_below");
    p.delta_above = count("delta_above");
    p.window_n = count("window_n");
    p.nominal_rate_hz = j.value("nominal_rate_hz", 50.0);
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(std::string("parameter file: ") + e.what());
  }
  validate(p);
}

}  // namespace subwayps
