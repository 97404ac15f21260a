// Acceptance checks: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "subwayps/subwayps.hpp"

namespace fs = std::filesystem;
using namespace subwayps;

namespace {

struct outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<eval::corpus_trip> build_corpus(const sim::scenario& sc, std::size_t trips, std::uint64_t seed,
                                            std::size_t route_stations = 16) {
  const route r = sim::synthetic_route(route_stations, seed);
  std::vector<eval::corpus_trip> out;
  for (std::size_t i = 0; i < trips; ++i) {
    const auto script = sim::random_script(r, sc, sim::derive_seed(seed, i));
    auto s = sim::generate(script, sc.profile, 50.0);
    out.push_back({"trip_" + std::to_string(i), std::move(s.trace), std::move(s.truth), script.plan});
  }
  return out;
}

// 1 ---------------------------------------------------------------------------

outcome signal_oracle() {
  const auto start = std::chrono::steady_clock::now();
  constexpr std::size_t count = 1'000'000;
  constexpr std::size_t n = 100;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> mag(0.0, 3.0);
  std::vector<double> a(count);
  for (auto& v : a) v = mag(rng) * (rng() % 50 == 0 ? 1e4 : 1.0);

  rolling_mean mean(n);
  double worst = 0.0;
  std::size_t emitted = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const auto out = mean.push({static_cast<double>(k) * 20.0, a[k]});
    if (k + 1 < n) {
      if (out) return {false, fmt("output during warm-up at sample %zu", k)};
      continue;
    }
    if (!out) return {false, fmt("missing output at sample %zu", k)};
    ++emitted;
    double brute = 0.0;
    for (std::size_t i = k + 1 - n; i <= k; ++i) brute += a[i];
    brute /= static_cast<double>(n);
    worst = std::max(worst, std::abs(out->a - brute));
  }
  const double elapsed = seconds_since(start);
  const bool pass = worst <= 1e-9 && elapsed < 10.0 && emitted == count - n + 1;
  return {pass, fmt("max |stream - brute| = %.3g over %zu windows (<= 1e-9), %.2f s (< 10 s)", worst, emitted,
                    elapsed)};
}

// 2 ---------------------------------------------------------------------------

outcome detector_oracle() {
  std::mt19937_64 rng(2);
  const detector_params presets_list[] = {presets::worldwide, presets::london, presets::cologne,
                                          detector_params{0.2, 3, 5, 1, 50.0}};
  std::uniform_int_distribution<std::size_t> length(500, 6000);
  std::size_t mismatches = 0, transitions = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& p = presets_list[trial % 4];
    const std::size_t max_run = trial % 4 == 3 ? 10 : 700;
    const auto trace = oracle::random_magnitudes(rng, length(rng), p.gamma_ms2, max_run);
    const motion initial = trial % 2 == 0 ? motion::stopped : motion::moving;
    const auto streamed = run_detector(trace, p, initial);
    transitions += streamed.size();
    if (streamed != oracle::offline_scan(trace, p, initial)) ++mismatches;
  }
  return {mismatches == 0, fmt("%zu mismatching traces of 1000 (%zu transitions compared)", mismatches, transitions)};
}

// 3 ---------------------------------------------------------------------------

struct latency_stats {
  long stop_min = 1 << 30, stop_max = -(1 << 30), move_min = 1 << 30, move_max = -(1 << 30);
  long stop_hyst_min = 1 << 30, stop_hyst_max = -(1 << 30), move_hyst_min = 1 << 30, move_hyst_max = -(1 << 30);
  bool aligned = true;
};

outcome latency_bound(std::string& diagnostic) {
  const auto& p = presets::worldwide;
  const double period = p.sample_period_ms();
  latency_stats st;
  std::vector<sim::trip_script> scripts;
  const route r = sim::synthetic_route(16, 30);
  auto sc = sim::scenarios::london();
  sc.cruise_bursts_per_trip = 0;
  sc.dwell_bursts_per_trip = 0;
  sc.hop_probability = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) scripts.push_back(sim::random_script(r, sc, seed));
  std::size_t checked = 0;
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    const auto profile = sim::profiles::noise_free(i % 2 == 0 ? sim::profiles::london_like()
                                                              : sim::profiles::cologne_like());
    const auto sim = sim::generate(scripts[i], profile, p.nominal_rate_hz);

    // Scripted onsets in transition order: departure, then stop/departure pairs.
    std::vector<std::pair<transition_kind, double>> expected{{transition_kind::moving_detected, sim.truth.departure_ms}};
    for (std::size_t k = 0; k < sim.truth.stops.size(); ++k) {
      expected.push_back({transition_kind::stop_detected, sim.truth.stops[k].onset_ms});
      if (k + 1 < sim.truth.stops.size()) expected.push_back({transition_kind::moving_detected, sim.truth.stops[k].end_ms});
    }

    motion_pipeline pipeline(p);
    std::vector<motion_transition> found;
    std::vector<magnitude_sample> smoothed;
    for (const auto& s : sim.trace) {
      const auto step = pipeline.push(s);
      if (step.smoothed) smoothed.push_back(*step.smoothed);
      if (step.transition) found.push_back(*step.transition);
    }
    if (found.size() != expected.size()) {
      st.aligned = false;
      continue;
    }
    for (std::size_t k = 0; k < found.size(); ++k) {
      if (found[k].kind != expected[k].first) {
        st.aligned = false;
        break;
      }
      ++checked;
      const long lag = std::lround((found[k].t_ms - expected[k].second) / period);
      // First smoothed sample past the scripted onset that is on the new side of gamma.
      double crossing = found[k].t_ms;
      for (const auto& m : smoothed)
        if (m.t_ms >= expected[k].second &&
            (found[k].kind == transition_kind::stop_detected ? m.a < p.gamma_ms2 : m.a > p.gamma_ms2)) {
          crossing = m.t_ms;
          break;
        }
      const long hyst = std::lround((found[k].t_ms - crossing) / period) + 1;
      if (found[k].kind == transition_kind::stop_detected) {
        st.stop_min = std::min(st.stop_min, lag);
        st.stop_max = std::max(st.stop_max, lag);
        st.stop_hyst_min = std::min(st.stop_hyst_min, hyst);
        st.stop_hyst_max = std::max(st.stop_hyst_max, hyst);
      } else {
        st.move_min = std::min(st.move_min, lag);
        st.move_max = std::max(st.move_max, lag);
        st.move_hyst_min = std::min(st.move_hyst_min, hyst);
        st.move_hyst_max = std::max(st.move_hyst_max, hyst);
      }
    }
  }
  const bool pass = st.aligned && checked > 0 && st.stop_min >= 249 && st.stop_max <= 251 && st.move_min >= 349 &&
                    st.move_max <= 351;
  diagnostic = fmt("samples from smoothed gamma crossing to detection: stop [%ld, %ld], moving [%ld, %ld]",
                   st.stop_hyst_min, st.stop_hyst_max, st.move_hyst_min, st.move_hyst_max);
  return {pass, fmt("samples from scripted onset to detection: stop [%ld, %ld] (want 250 +/- 1), moving [%ld, %ld] "
                    "(want 350 +/- 1); %zu transitions, aligned=%s",
                    st.stop_min, st.stop_max, st.move_min, st.move_max, checked, st.aligned ? "yes" : "no")};
}

// 4 ---------------------------------------------------------------------------

// Greedy same-kind pairing within 30 s of the scripted onset; leftovers are false.
std::size_t false_transitions(const std::vector<motion_transition>& found, const sim::ground_truth& truth,
                              std::size_t& missed) {
  std::vector<std::pair<transition_kind, double>> expected{{transition_kind::moving_detected, truth.departure_ms}};
  for (std::size_t k = 0; k < truth.stops.size(); ++k) {
    expected.push_back({transition_kind::stop_detected, truth.stops[k].onset_ms});
    if (k + 1 < truth.stops.size()) expected.push_back({transition_kind::moving_detected, truth.stops[k].end_ms});
  }
  std::vector<bool> used(expected.size(), false);
  std::size_t extra = 0;
  for (const auto& t : found) {
    bool ok = false;
    for (std::size_t k = 0; k < expected.size() && !ok; ++k)
      if (!used[k] && expected[k].first == t.kind && std::abs(t.onset_t_ms - expected[k].second) <= 30000.0)
        used[k] = ok = true;
    extra += ok ? 0 : 1;
  }
  missed += static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
  return extra;
}

outcome burst_guard() {
  const auto& p = presets::worldwide;
  std::size_t extra = 0, missed = 0, bursts = 0, longest_dwell_burst = 0;
  for (int profile = 0; profile < 2; ++profile) {
    sim::scenario sc = profile == 0 ? sim::scenarios::london() : sim::scenarios::cologne();
    sc.in_between_probability = 0.2;
    sc.hop_probability = 0.0;
    sc.dwell_min_s = 20.0;
    sc.cruise_bursts_per_trip = 3.0;
    sc.cruise_burst_min_s = 1.0;
    sc.cruise_burst_max_s = 0.98 * static_cast<double>(p.delta_below) / p.nominal_rate_hz;
    sc.dwell_bursts_per_trip = 3.0;
    sc.dwell_burst_min_s = 1.0;
    sc.dwell_burst_max_s = 0.98 * static_cast<double>(p.delta_above) / p.nominal_rate_hz;
    sc.burst_min_amplitude = 0.5;
    sc.burst_max_amplitude = 2.5;
    const route r = sim::synthetic_route(16, 40 + profile);
    for (std::uint64_t i = 0; i < 250; ++i) {
      const auto script = sim::random_script(r, sc, sim::derive_seed(400 + profile, i));
      bursts += script.bursts.size();
      for (const auto& b : script.bursts)
        longest_dwell_burst = std::max(longest_dwell_burst, static_cast<std::size_t>(b.duration_s * 1000));
      const auto s = sim::generate(script, sc.profile, p.nominal_rate_hz);
      std::vector<motion_transition> found;
      motion_pipeline pipeline(p);
      for (const auto& x : s.trace)
        if (auto step = pipeline.push(x); step.transition) found.push_back(*step.transition);
      extra += false_transitions(found, s.truth, missed);
    }
  }
  return {extra == 0, fmt("%zu false transitions over 500 trips with %zu bursts (longest %.1f s); %zu scripted "
                          "transitions missed",
                          extra, bursts, longest_dwell_burst / 1000.0, missed)};
}

// 5 ---------------------------------------------------------------------------

outcome tuning_payoff() {
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = build_corpus(sim::scenarios::london(), 50, 5);
  const auto london = eval::evaluate_corpus(corpus, presets::london).report.accuracy_excl_start();
  const auto worldwide = eval::evaluate_corpus(corpus, presets::worldwide).report.accuracy_excl_start();
  const double elapsed = seconds_since(start);
  const bool pass = london >= 0.85 && london - worldwide >= 0.05 && elapsed < 120.0;
  return {pass, fmt("london %.1f%% vs worldwide %.1f%% (gap %.1f pp, want >= 5 and london >= 85%%), %.1f s",
                    100 * london, 100 * worldwide, 100 * (london - worldwide), elapsed)};
}

// 6 ---------------------------------------------------------------------------

outcome baseline_ordering() {
  // Trip-time spread of the delay model on a 29 min, 7-station trip.
  std::mt19937_64 rng(6);
  const std::vector<double> scheduled(6, 29.0 * 60.0 / 6.0);
  std::vector<double> totals;
  for (int i = 0; i < 10000; ++i) {
    const auto d = sim::sample_delays(scheduled, sim::delay_model{}, rng);
    totals.push_back(std::accumulate(d.begin(), d.end(), 0.0));
  }
  const double mean = std::accumulate(totals.begin(), totals.end(), 0.0) / totals.size();
  double ss = 0.0;
  for (double t : totals) ss += (t - mean) * (t - mean);
  const double sd_min = std::sqrt(ss / (totals.size() - 1)) / 60.0;
  const bool spread_ok = std::abs(sd_min - 7.12) <= 0.15 * 7.12;

  const auto corpus = build_corpus(sim::scenarios::delayed(), 100, 6);
  const auto ev = eval::evaluate_corpus(corpus, presets::cologne, 30.0);
  const double det = ev.report.trip_accuracy();
  const double rel = ev.relative_accuracy();
  const double tt = ev.timetable_accuracy();
  const bool pass = spread_ok && det - rel >= 0.10 && rel - tt >= 0.10;
  return {pass, fmt("trip-time sd %.2f min (want 7.12 +/- 15%%); trip accuracy detector %.0f%% > relative %.0f%% > "
                    "timetable %.0f%% (gaps %.0f / %.0f pp, want >= 10)",
                    sd_min, 100 * det, 100 * rel, 100 * tt, 100 * (det - rel), 100 * (rel - tt))};
}

// 7 ---------------------------------------------------------------------------

outcome trip_invariants() {
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  };
  check(classify_stop(83, 120) == stop_class::in_between, "83/120 not in-between");
  check(classify_stop(84, 120) == stop_class::station, "84/120 not station");

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t queries = 0;
  for (int trial = 0; trial < 500; ++trial) {
    route r{"T", {}, {}};
    const std::size_t segs = 1 + static_cast<std::size_t>(unit(rng) * 7);
    for (std::size_t i = 0; i <= segs; ++i) r.stations.push_back({"S" + std::to_string(i), "", {}, {}});
    for (std::size_t i = 0; i < segs; ++i) r.segment_durations_s.push_back(60 + 240 * unit(rng));
    const trip_plan plan(r, 0, segs);

    std::vector<motion_transition> seq;
    double t = 1000 * unit(rng);
    for (std::size_t i = 0; i < 2 * segs + 4; ++i) {
      const auto kind = i % 2 == 0 ? transition_kind::moving_detected : transition_kind::stop_detected;
      seq.push_back({t, t, kind});
      t += i % 2 == 0 ? 1000 * 1.3 * unit(rng) * r.segment_durations_s[std::min(i / 2, segs - 1)]
                      : 1000 * (5 + 40 * unit(rng));
    }

    trip_tracker tracker(plan);
    std::size_t last_segment = 0;
    std::vector<trip_event> first_run;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      for (auto& e : tracker.on_transition(seq[i])) first_run.push_back(e);
      const auto& st = tracker.state();
      check(st.segment_index >= last_segment, "segment index decreased");
      last_segment = st.segment_index;
      const double end = i + 1 < seq.size() ? seq[i + 1].t_ms : seq[i].t_ms + 600000;
      double prev_fraction = tracker.position(seq[i].t_ms).fraction;
      double prev_eta = tracker.eta_s(seq[i].t_ms);
      for (int q = 1; q <= 25; ++q) {
        const double now = seq[i].t_ms + (end - seq[i].t_ms) * q / 25.0;
        const double f = tracker.position(now).fraction;
        const double eta = tracker.eta_s(now);
        ++queries;
        check(f >= 0.0 && f <= 1.0, "fraction outside [0, 1]");
        if (st.phase == trip_phase::en_route) {
          check(f >= prev_fraction, "fraction decreased while en route");
          check(eta <= prev_eta + 1e-9, "eta increased while en route");
        }
        if (st.phase == trip_phase::arrived) check(eta == 0.0, "eta not zero after arrival");
        prev_fraction = f;
        prev_eta = eta;
      }
    }
    std::size_t arrivals = 0;
    for (const auto& e : first_run) arrivals += e.kind == event_kind::station_arrival ? 1 : 0;
    check(arrivals <= plan.segment_count(), "more arrivals than segments");

    trip_tracker again(plan);
    std::vector<trip_event> second_run;
    for (const auto& tr : seq)
      for (auto& e : again.on_transition(tr)) second_run.push_back(e);
    check(second_run == first_run, "replay not deterministic");
  }
  std::string detail = fmt("500 random trips, %zu position/eta queries", queries);
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

// 8 ---------------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SUBWAYPS_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs `args` (with {out} replaced) into two directories and compares every file.
bool same_outputs(const std::string& args, const fs::path& root, const std::string& name, std::string& why) {
  std::vector<fs::path> dirs{root / (name + ".1"), root / (name + ".2")};
  for (const auto& d : dirs) {
    std::string cmd = args;
    cmd.replace(cmd.find("{out}"), 5, "\"" + d.string() + "\"");
    if (run_cli(cmd) != 0) {
      why = name + ": command failed";
      return false;
    }
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    const auto other = dirs[1] / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      why = name + ": " + entry.path().filename().string() + " differs";
      return false;
    }
    ++files;
  }
  if (files == 0) {
    why = name + ": no outputs";
    return false;
  }
  return true;
}

outcome cli_determinism() {
  const fs::path samples = SUBWAYPS_SAMPLES;
  const fs::path root = fs::temp_directory_path() / "subwayps_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };

  if (run_cli("simulate --corpus 4 --scenario london --seed 8 --out " + q(root / "corpus")) != 0 ||
      run_cli("simulate --script " + q(samples / "script.json") + " --out " + q(root / "single")) != 0)
    return {false, "could not prepare inputs"};

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate-script", "simulate --script " + q(samples / "script.json") + " --seed 3 --out {out}"},
      {"simulate-corpus", "simulate --corpus 4 --scenario delayed --seed 8 --out {out}"},
      {"detect", "detect --trace " + q(root / "single" / "trace.csv") + " --out {out}"},
      {"replay", "replay --params london --trace " + q(root / "single" / "trace.csv") + " --route " +
                     q(samples / "route.json") + " --origin A --destination D --truth " +
                     q(root / "single" / "truth.jsonl") + " --out {out}"},
      {"evaluate", "evaluate --corpus " + q(root / "corpus") + " --out {out}"},
      {"tune", "tune --corpus " + q(root / "corpus") + " --grid " + q(samples / "grid.json") + " --out {out}"}};
  std::string why;
  for (const auto& [name, args] : commands)
    if (!same_outputs(args, root, name, why)) return {false, why};
  fs::remove_all(root);
  return {true, "simulate (script, corpus), detect, replay, evaluate, tune: byte-identical re-runs"};
}

}  // namespace

int main() {
  std::string latency_diagnostic;
  const std::vector<std::pair<std::string, std::function<outcome()>>> criteria{
      {"1 rolling mean vs brute force", signal_oracle},
      {"2 detector vs offline scanner", detector_oracle},
      {"3 noise-free detection latency", [&] { return latency_bound(latency_diagnostic); }},
      {"4 no false transitions from handling bursts", burst_guard},
      {"5 london tuning payoff", tuning_payoff},
      {"6 detector > relative > timetable", baseline_ordering},
      {"7 trip-model invariants", trip_invariants},
      {"8 CLI determinism", cli_determinism}};
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    if (name.front() == '3' && !latency_diagnostic.empty()) std::cout << "     note: " << latency_diagnostic << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
