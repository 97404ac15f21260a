#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subwayps/error.hpp"
#include "subwayps/params.hpp"

namespace subwayps {

/// One linear-acceleration reading (gravity already removed), device axes.
struct accel_sample {
  double t_ms = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const accel_sample&, const accel_sample&) = default;
};

/// Synthesized acceleration magnitude at a timestamp.
struct magnitude_sample {
  double t_ms = 0.0;
  double a = 0.0;

  friend bool operator==(const magnitude_sample&, const magnitude_sample&) = default;
};

/// Constant per-axis sensor offset, subtracted before synthesis.
struct axis_bias {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline void validate(const accel_sample& s) {
  if (!std::isfinite(s.t_ms)) throw rejected_sample("t_ms", "non-finite timestamp");
  if (s.t_ms < 0.0) throw rejected_sample("t_ms", "negative timestamp");
  if (!std::isfinite(s.x)) throw rejected_sample("ax", "non-finite x component");
  if (!std::isfinite(s.y)) throw rejected_sample("ay", "non-finite y component");
  if (!std::isfinite(s.z)) throw rejected_sample("az", "non-finite z component");
}

inline accel_sample subtract_bias(accel_sample s, const axis_bias& bias) {
  s.x -= bias.x;
  s.y -= bias.y;
  s.z -= bias.z;
  return s;
}

/// a = sqrt(x^2 + y^2 + z^2), computed without underflow. Throws rejected_sample on non-finite input.
inline magnitude_sample synthesize(const accel_sample& s) {
  validate(s);
  return {s.t_ms, std::hypot(s.x, s.y, s.z)};
}

/// Trailing rolling mean over the last n magnitudes.
///
/// Emits nothing until the window is full; afterwards every push yields the
/// mean of the newest n inputs, stamped with the newest timestamp. The sum is
/// kept with Neumaier compensation so long streams do not drift.
class rolling_mean {
 public:
  explicit rolling_mean(std::size_t n) : buffer_(n) {
    if (n < 1) throw config_error("smoothing window must be >= 1");
  }

  std::optional<magnitude_sample> push(const magnitude_sample& s) {
    if (filled_ == buffer_.size()) {
      accumulate(-buffer_[head_]);
    } else {
      ++filled_;
    }
    buffer_[head_] = s.a;
    accumulate(s.a);
    head_ = (head_ + 1) % buffer_.size();
    if (filled_ < buffer_.size()) return std::nullopt;
    return magnitude_sample{s.t_ms, (sum_ + compensation_) / static_cast<double>(buffer_.size())};
  }

  std::size_t window() const noexcept { return buffer_.size(); }
  std::size_t size() const noexcept { return filled_; }
  bool warm() const noexcept { return filled_ == buffer_.size(); }

  void reset() {
    filled_ = 0;
    head_ = 0;
    sum_ = 0.0;
    compensation_ = 0.0;
  }

 private:
  void accumulate(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      compensation_ += (sum_ - t) + v;
    else
      compensation_ += (v - t) + sum_;
    sum_ = t;
  }

  std::vector<double> buffer_;
  std::size_t filled_ = 0;
  std::size_t head_ = 0;
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Batch form of rolling_mean: returns size() - n + 1 outputs (or none).
inline std::vector<magnitude_sample> smooth(std::span<const magnitude_sample> input, std::size_t n) {
  rolling_mean window(n);
  std::vector<magnitude_sample> out;
  if (input.size() >= n) out.reserve(input.size() - n + 1);
  for (const auto& s : input)
    if (auto m = window.push(s)) out.push_back(*m);
  return out;
}

/// Rescales the sample-count parameters for a trace recorded at `actual_rate_hz`.
inline detector_params resample_params(const detector_params& p, double actual_rate_hz) {
  if (!(actual_rate_hz > 0.0) || !std::isfinite(actual_rate_hz))
    throw config_error("sample rate must be a finite value > 0");
  const double scale = actual_rate_hz / p.nominal_rate_hz;
  auto rescale = [scale](std::size_t count) {
    const auto r = std::llround(static_cast<double>(count) * scale);
    return static_cast<std::size_t>(r < 1 ? 1 : r);
  };
  detector_params out = p;
  out.window_n = rescale(p.window_n);
  out.delta_below = rescale(p.delta_below);
  out.delta_above = rescale(p.delta_above);
  out.nominal_rate_hz = actual_rate_hz;
  return out;
}

}  // namespace subwayps
