// subwayps command-line frontend: detect, replay, simulate, evaluate, tune.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "subwayps/subwayps.hpp"

namespace fs = std::filesystem;
using namespace subwayps;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_io = 3;

struct common_options {
  std::string params = "worldwide";
  std::optional<double> rate_hz;
  double tolerance_s = 30.0;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

detector_params resolve_params(const common_options& o) {
  auto p = io::load_params(o.params);
  if (o.rate_hz) p = resample_params(p, *o.rate_hz);
  validate(p);
  return p;
}

axis_bias parse_bias(const std::string& text) {
  if (text.empty()) return {};
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw config_error("--bias expects three comma-separated numbers");
    }
  }
  if (v.size() != 3) throw config_error("--bias expects three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

// Writes `content` to dir/name; the directory is created on demand.
void write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  auto out = io::open_out(dir / name);
  out << content;
  if (!out) throw io_error("write failed for '" + (dir / name).string() + "'");
}

std::string report_json(const eval::eval_report& r) {
  nlohmann::json j{{"stops_total", r.stops_total},
                   {"stops_correct", r.stops_correct},
                   {"stations_missed", r.stations_missed},
                   {"inbetween_missed", r.inbetween_missed},
                   {"false_positives", r.false_positives},
                   {"accuracy_excl_start", r.accuracy_excl_start()},
                   {"accuracy_incl_start", r.accuracy_incl_start()},
                   {"trips_total", r.trips_total},
                   {"trips_fully_correct", r.trips_fully_correct}};
  return j.dump(2);
}

nlohmann::json report_object(const eval::eval_report& r) { return nlohmann::json::parse(report_json(r)); }

// detect ----------------------------------------------------------------------

int cmd_detect(const common_options& o, const std::string& trace_path, const std::string& bias_text) {
  const auto params = resolve_params(o);
  const auto bias = parse_bias(bias_text);
  const auto trace = io::read_trace_csv(trace_path);

  motion_pipeline pipeline(params, bias);
  std::vector<io::magnitude_row> rows;
  std::vector<motion_transition> transitions;
  rows.reserve(trace.size());
  for (const auto& s : trace) {
    const auto step = pipeline.push(s);
    rows.push_back({step.raw.t_ms, step.raw.a,
                    step.smoothed ? std::optional<double>(step.smoothed->a) : std::nullopt});
    if (step.transition) transitions.push_back(*step.transition);
  }

  std::ostringstream tcsv, mcsv;
  io::write_transitions_csv(tcsv, transitions);
  io::write_magnitudes_csv(mcsv, rows);
  write_file(o.out, "transitions.csv", tcsv.str());
  write_file(o.out, "magnitudes.csv", mcsv.str());
  std::cout << transitions.size() << " transitions from " << trace.size() << " samples\n";
  return exit_ok;
}

// replay ----------------------------------------------------------------------

int cmd_replay(const common_options& o, const std::string& trace_path, const std::string& route_path,
               const std::string& origin, const std::string& destination, const std::string& truth_path) {
  const auto params = resolve_params(o);
  const auto r = load_route(route_path);
  const trip_plan plan(r, origin, destination);
  std::optional<sim::ground_truth> truth;
  if (!truth_path.empty()) {
    auto in = io::open_in(truth_path);
    truth = io::read_truth_jsonl(in);
  }
  const auto trace = io::read_trace_csv(trace_path);

  const auto run = replay(trace, plan, params);
  std::ostringstream events;
  io::write_events_jsonl(events, run.events);

  nlohmann::json summary{{"line_id", plan.line_id()},
                         {"origin", plan.origin().id},
                         {"destination", plan.destination().id},
                         {"transitions", run.transitions.size()},
                         {"events", run.events.size()},
                         {"final_phase", std::string(to_string(run.final_state.phase))},
                         {"stops_remaining", stops_remaining(run.final_state, plan)}};
  if (truth) {
    const auto detected = eval::stops_from_events(run.events);
    const auto match = eval::match_stops(truth->stops, detected, o.tolerance_s);
    eval::eval_report report;
    report.add_trip(truth->stops, match);
    summary["report"] = report_object(report);
  }
  write_file(o.out, "events.jsonl", events.str());
  write_file(o.out, "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << '\n';
  return exit_ok;
}

// simulate --------------------------------------------------------------------

sim::train_profile resolve_profile(const std::string& name, const sim::train_profile& fallback) {
  if (name.empty()) return fallback;
  if (auto p = sim::find_profile(name)) return *p;
  if (!fs::exists(name))
    throw config_error("unknown profile '" + name + "' (expected london_like, cologne_like or a JSON file)");
  return io::profile_from_json(io::read_json(name));
}

std::string render_trace(const std::vector<accel_sample>& trace) {
  std::ostringstream s;
  io::write_trace_csv(s, trace);
  return s.str();
}

std::string render_truth(const sim::ground_truth& truth) {
  std::ostringstream s;
  io::write_truth_jsonl(s, truth);
  return s.str();
}

int cmd_simulate(const common_options& o, const std::string& script_path, std::size_t corpus_size,
                 const std::string& scenario_name, const std::string& route_path, const std::string& profile_name,
                 std::size_t route_stations) {
  const double rate = o.rate_hz.value_or(50.0);
  if (!(rate > 0.0)) throw config_error("--rate-hz must be > 0");

  if (!script_path.empty()) {
    auto script = io::script_from_json(io::read_json(script_path), fs::path(script_path).parent_path());
    if (o.seed) script.seed = *o.seed;
    const auto profile = resolve_profile(profile_name, sim::profiles::london_like());
    const auto result = sim::generate(script, profile, rate);
    const auto trace = render_trace(result.trace);
    const auto truth = render_truth(result.truth);
    write_file(o.out, "trace.csv", trace);
    write_file(o.out, "truth.jsonl", truth);
    std::cout << result.trace.size() << " samples, " << result.truth.stops.size() << " stops\n";
    return exit_ok;
  }

  if (corpus_size == 0) throw config_error("simulate needs --script or --corpus N");
  auto sc = sim::find_scenario(scenario_name);
  if (!sc) throw config_error("unknown scenario '" + scenario_name + "' (expected london, cologne or delayed)");
  sc->profile = resolve_profile(profile_name, sc->profile);
  const std::uint64_t seed = o.seed.value_or(1);
  const route r = route_path.empty() ? sim::synthetic_route(route_stations, seed) : load_route(route_path);
  if (sc->stations_per_trip > r.stations.size())
    throw config_error("route has fewer stations than the scenario's trip length");

  // Fail fast: build every script before any file is written.
  std::vector<sim::trip_script> scripts;
  for (std::size_t i = 0; i < corpus_size; ++i) scripts.push_back(sim::random_script(r, *sc, sim::derive_seed(seed, i)));

  write_file(o.out, "route.json", route_to_json(r).dump(2) + "\n");
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "trip_%03zu", i);
    const auto result = sim::generate(scripts[i], sc->profile, rate);
    write_file(o.out, std::string(stem) + ".trace.csv", render_trace(result.trace));
    write_file(o.out, std::string(stem) + ".truth.jsonl", render_truth(result.truth));
    write_file(o.out, std::string(stem) + ".script.json", io::script_to_json(scripts[i]).dump(2) + "\n");
  }
  std::cout << scripts.size() << " trips written to " << o.out << '\n';
  return exit_ok;
}

// corpus loading ----------------------------------------------------------------

std::vector<eval::corpus_trip> load_corpus(const std::string& dir) {
  if (!fs::is_directory(dir)) throw io_error("corpus directory '" + dir + "' does not exist");
  const auto r = load_route((fs::path(dir) / "route.json").string());
  std::vector<fs::path> traces;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.size() > 10 && name.ends_with(".trace.csv")) traces.push_back(entry.path());
  }
  std::sort(traces.begin(), traces.end());
  if (traces.empty()) throw schema_error("corpus '" + dir + "' contains no *.trace.csv files");

  std::vector<eval::corpus_trip> corpus;
  for (const auto& path : traces) {
    const auto file = path.filename().string();
    const auto stem = file.substr(0, file.size() - std::string(".trace.csv").size());
    const auto truth_path = path.parent_path() / (stem + ".truth.jsonl");
    if (!fs::exists(truth_path)) throw schema_error("corpus: '" + file + "' has no matching truth file");
    auto in = io::open_in(truth_path);
    auto truth = io::read_truth_jsonl(in);
    trip_plan plan(r, truth.origin_id, truth.destination_id);
    corpus.push_back({stem, io::read_trace_csv(path), std::move(truth), std::move(plan)});
  }
  return corpus;
}

// evaluate --------------------------------------------------------------------

int cmd_evaluate(const common_options& o, const std::string& corpus_dir) {
  const auto params = resolve_params(o);
  if (!(o.tolerance_s > 0.0)) throw config_error("--tolerance-s must be > 0");
  const auto corpus = load_corpus(corpus_dir);
  const auto result = eval::evaluate_corpus(corpus, params, o.tolerance_s);

  nlohmann::json j = report_object(result.report);
  j["params"] = params;
  j["tolerance_s"] = o.tolerance_s;
  j["trip_accuracy"] = result.report.trip_accuracy();
  j["timetable_baseline_trip_accuracy"] = result.timetable_accuracy();
  j["relative_baseline_trip_accuracy"] = result.relative_accuracy();
  nlohmann::json trips = nlohmann::json::array();
  for (const auto& t : result.trips) {
    nlohmann::json matches = nlohmann::json::array();
    for (const auto& m : t.match.matches) {
      nlohmann::json jm{{"truth_index", m.truth_index}, {"correct", m.correct}};
      if (m.detected_index) {
        jm["detected_index"] = *m.detected_index;
        jm["time_error_s"] = m.time_error_s;
      }
      matches.push_back(std::move(jm));
    }
    trips.push_back({{"name", t.name},
                     {"stops_total", t.report.stops_total},
                     {"stops_correct", t.report.stops_correct},
                     {"false_positives", t.report.false_positives},
                     {"fully_correct", t.report.trips_fully_correct == 1},
                     {"timetable_correct", t.timetable_correct},
                     {"relative_correct", t.relative_correct},
                     {"matches", matches},
                     {"unmatched_detections", t.match.false_positives}});
  }
  j["trips"] = trips;
  write_file(o.out, "report.json", j.dump(2) + "\n");
  std::cout << report_json(result.report) << '\n';
  return exit_ok;
}

// tune ------------------------------------------------------------------------

int cmd_tune(const common_options& o, const std::string& corpus_dir, const std::string& grid_path) {
  if (!(o.tolerance_s > 0.0)) throw config_error("--tolerance-s must be > 0");
  const auto grid = io::grid_from_json(io::read_json(grid_path));
  const auto corpus = load_corpus(corpus_dir);
  const auto result = eval::tune(corpus, grid, o.tolerance_s);

  std::ostringstream table;
  table << "gamma_ms2,delta_below,delta_above,window_n,stops_correct,stops_total,accuracy,false_positives\n";
  for (const auto& c : result.table)
    table << io::format_number(c.params.gamma_ms2) << ',' << c.params.delta_below << ',' << c.params.delta_above
          << ',' << c.params.window_n << ',' << c.report.stops_correct << ',' << c.report.stops_total << ','
          << io::format_number(c.report.accuracy_excl_start()) << ',' << c.report.false_positives << '\n';
  const nlohmann::json best = result.best;
  write_file(o.out, "best-params.json", best.dump(2) + "\n");
  write_file(o.out, "table.csv", table.str());
  std::cout << best.dump(2) << '\n';
  return exit_ok;
}

void add_common(CLI::App* cmd, common_options& o, bool params, bool tolerance) {
  if (params) cmd->add_option("--params", o.params, "Preset (worldwide|london|cologne) or parameter JSON file");
  cmd->add_option("--rate-hz", o.rate_hz, "Sample rate of the input traces");
  if (tolerance) cmd->add_option("--tolerance-s", o.tolerance_s, "Stop matching tolerance in seconds");
  cmd->add_option("--out", o.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Underground train positioning from linear-accelerometer traces"};
  app.require_subcommand(1);
  common_options o;

  std::string trace, route_file, origin, destination, truth, bias, script, scenario = "london", profile, corpus, grid;
  std::size_t corpus_size = 0;
  std::size_t route_stations = 16;

  auto* detect = app.add_subcommand("detect", "Detect Moving/Stopped transitions in a trace");
  detect->add_option("--trace", trace, "Trace CSV (t_ms,ax,ay,az)")->required();
  detect->add_option("--bias", bias, "Per-axis bias to subtract, 'x,y,z'");
  add_common(detect, o, true, false);

  auto* replay_cmd = app.add_subcommand("replay", "Track a trip along a route");
  replay_cmd->add_option("--trace", trace, "Trace CSV")->required();
  replay_cmd->add_option("--route", route_file, "Route JSON")->required();
  replay_cmd->add_option("--origin", origin, "Origin station id")->required();
  replay_cmd->add_option("--destination", destination, "Destination station id")->required();
  replay_cmd->add_option("--truth", truth, "Optional ground-truth JSONL for a summary report");
  add_common(replay_cmd, o, true, true);

  auto* simulate = app.add_subcommand("simulate", "Generate synthetic traces with ground truth");
  simulate->add_option("--script", script, "Trip script JSON");
  simulate->add_option("--corpus", corpus_size, "Generate N random trips instead of one script");
  simulate->add_option("--scenario", scenario, "Corpus scenario: london|cologne|delayed");
  simulate->add_option("--route", route_file, "Route JSON for corpus generation");
  simulate->add_option("--route-stations", route_stations, "Stations on the generated route");
  simulate->add_option("--profile", profile, "Train profile: london_like|cologne_like|JSON file");
  simulate->add_option("--seed", o.seed, "RNG seed");
  add_common(simulate, o, false, false);

  auto* evaluate = app.add_subcommand("evaluate", "Score the detector on a corpus");
  evaluate->add_option("--corpus", corpus, "Corpus directory")->required();
  add_common(evaluate, o, true, true);

  auto* tune_cmd = app.add_subcommand("tune", "Grid-search detector parameters on a corpus");
  tune_cmd->add_option("--corpus", corpus, "Corpus directory")->required();
  tune_cmd->add_option("--grid", grid, "Grid JSON")->required();
  add_common(tune_cmd, o, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  try {
    if (*detect) return cmd_detect(o, trace, bias);
    if (*replay_cmd) return cmd_replay(o, trace, route_file, origin, destination, truth);
    if (*simulate) return cmd_simulate(o, script, corpus_size, scenario, route_file, profile, route_stations);
    if (*evaluate) return cmd_evaluate(o, corpus);
    if (*tune_cmd) return cmd_tune(o, corpus, grid);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  }
  return exit_config;
}
