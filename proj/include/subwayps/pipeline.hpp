#pragma once

#include <span>
#include <vector>

#include "subwayps/detector.hpp"
#include "subwayps/trip.hpp"

namespace subwayps {

struct replay_result {
  std::vector<motion_transition> transitions;
  std::vector<trip_event> events;
  trip_state final_state;
};

/// Runs raw samples through the detector and the trip tracker.
/// With `with_ticks`, ApproachingStation events are raised per smoothed sample.
inline replay_result replay(std::span<const accel_sample> trace, const trip_plan& plan,
                            const detector_params& params, const trip_config& cfg = {},
                            axis_bias bias = {}, bool with_ticks = true) {
  motion_pipeline pipeline(params, bias);
  trip_tracker tracker(plan, cfg);
  replay_result out;
  for (const auto& s : trace) {
    const auto step = pipeline.push(s);
    if (step.transition) {
      out.transitions.push_back(*step.transition);
      for (auto& e : tracker.on_transition(*step.transition)) out.events.push_back(std::move(e));
    }
    if (with_ticks && step.smoothed)
      for (auto& e : tracker.on_time(step.smoothed->t_ms)) out.events.push_back(std::move(e));
  }
  out.final_state = tracker.state();
  return out;
}

}  // namespace subwayps
