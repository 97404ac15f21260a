#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "subwayps/params.hpp"
#include "subwayps/signal.hpp"

namespace subwayps {

enum class motion { moving, stopped };

enum class transition_kind { stop_detected, moving_detected };

inline std::string_view to_string(transition_kind k) {
  return k == transition_kind::stop_detected ? "STOP" : "MOVING";
}

/// A Moving/Stopped change. `t_ms` is the sample that completed the run;
/// `onset_t_ms` backs off the run length to estimate when the change began.
struct motion_transition {
  double t_ms = 0.0;
  double onset_t_ms = 0.0;
  transition_kind kind = transition_kind::moving_detected;

  friend bool operator==(const motion_transition&, const motion_transition&) = default;
};

struct motion_state {
  motion current = motion::stopped;
  std::size_t counter = 0;  // consecutive qualifying samples, always < relevant delta
};

/// One step of the hysteresis state machine.
///
/// Moving: a < gamma extends the below-run, anything else resets it. A run of
/// delta_below samples switches to Stopped. Stopped mirrors this with a > gamma
/// and delta_above. Samples exactly at gamma reset either run.
inline std::optional<motion_transition> feed(motion_state& state, const magnitude_sample& s,
                                             const detector_params& p) {
  const bool moving = state.current == motion::moving;
  const bool qualifies = moving ? s.a < p.gamma_ms2 : s.a > p.gamma_ms2;
  if (!qualifies) {
    state.counter = 0;
    return std::nullopt;
  }
  const std::size_t needed = moving ? p.delta_below : p.delta_above;
  if (++state.counter < needed) return std::nullopt;

  state.counter = 0;
  state.current = moving ? motion::stopped : motion::moving;
  return motion_transition{
      s.t_ms, s.t_ms - static_cast<double>(needed - 1) * p.sample_period_ms(),
      moving ? transition_kind::stop_detected : transition_kind::moving_detected};
}

/// Stateful wrapper around feed() for streaming use.
class motion_detector {
 public:
  explicit motion_detector(detector_params p, motion initial = motion::stopped)
      : params_(p), state_{initial, 0} {
    validate(params_);
  }

  std::optional<motion_transition> push(const magnitude_sample& s) {
    return feed(state_, s, params_);
  }

  const motion_state& state() const noexcept { return state_; }
  const detector_params& params() const noexcept { return params_; }

 private:
  detector_params params_;
  motion_state state_;
};

/// Folds feed() over an already-smoothed trace.
inline std::vector<motion_transition> run_detector(std::span<const magnitude_sample> trace,
                                                   const detector_params& p,
                                                   motion initial = motion::stopped) {
  motion_detector detector(p, initial);
  std::vector<motion_transition> out;
  for (const auto& s : trace)
    if (auto tr = detector.push(s)) out.push_back(*tr);
  return out;
}

/// Raw samples through bias correction, synthesis, smoothing and detection.
class motion_pipeline {
 public:
  struct step {
    magnitude_sample raw;
    std::optional<magnitude_sample> smoothed;
    std::optional<motion_transition> transition;
  };

  explicit motion_pipeline(detector_params p, axis_bias bias = {},
                           motion initial = motion::stopped)
      : bias_(bias), window_(p.window_n), detector_(p, initial) {}

  step push(const accel_sample& s) {
    step out{synthesize(subtract_bias(s, bias_)), std::nullopt, std::nullopt};
    out.smoothed = window_.push(out.raw);
    if (out.smoothed) out.transition = detector_.push(*out.smoothed);
    return out;
  }

  const motion_detector& detector() const noexcept { return detector_; }

 private:
  axis_bias bias_;
  rolling_mean window_;
  motion_detector detector_;
};

inline std::vector<motion_transition> detect_transitions(std::span<const accel_sample> trace,
                                                         const detector_params& p,
                                                         axis_bias bias = {}) {
  motion_pipeline pipeline(p, bias);
  std::vector<motion_transition> out;
  for (const auto& s : trace)
    if (auto tr = pipeline.push(s).transition) out.push_back(*tr);
  return out;
}

}  // namespace subwayps
