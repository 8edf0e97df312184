#include "erodewave/dispatch.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <stdexcept>

#include "erodewave/emit.hpp"
#include "erodewave/error.hpp"
#include "erodewave/stability.hpp"
#include "erodewave/stationary_profile.hpp"
#include "erodewave/traveling_wave.hpp"

namespace erodewave {

using nlohmann::json;

namespace {

struct Context {
  const RunSpec& spec;
  std::ostream& out;
  std::ostream& log;
  DispatchOptions opts;

  bool wants(const char* format) const {
    for (const auto& f : spec.output.formats) {
      if (f == format) return true;
    }
    return false;
  }
  std::string path(const std::string& name) const { return (std::filesystem::path(spec.output.dir) / name).string(); }
  void info(const std::string& msg) const {
    if (opts.log_level >= LogLevel::info) log << "[info] " << msg << "\n";
  }
  void debug(const std::string& msg) const {
    if (opts.log_level >= LogLevel::debug) log << "[debug] " << msg << "\n";
  }
  void write(const std::string& name, const std::string& content) const {
    write_text(path(name), content);
    info("wrote " + path(name));
  }
  void write_json(const std::string& name, json body) const {
    body["metadata"] = {{"run_spec", to_json(spec)}, {"version", kVersion}};
    write(name, body.dump(2) + "\n");
  }
};

// Four decimals with trailing zeros removed: 0.5, 1.2564, -0.1258.
std::string short_number(double v) {
  if (!std::isfinite(v)) return format_number(v);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string snapshot_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%03zu.csv", k);
  return buf;
}

int run_validate(const Context& ctx, const ErosionModel& model) {
  const ValidationReport rep = validate(model);
  json checks = json::array();
  for (const HypothesisCheck& c : rep.checks) {
    ctx.out << "check " << c.name << " " << (c.passed ? "pass" : "FAIL") << " worst_z=" << format_number(c.worst_z)
            << " margin=" << format_number(c.worst_margin) << "\n";
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"worst_z", number_json(c.worst_z)},
                      {"worst_margin", number_json(c.worst_margin)}});
  }
  if (ctx.wants("json")) ctx.write_json("validation.json", {{"passed", rep.all_passed()}, {"checks", checks}});
  return rep.all_passed() ? 0 : 1;
}

int run_classify(const Context& ctx, const ErosionModel& model, double D) {
  const StationaryWave wave = construct(model, D);
  const Classification c = classify(model, D);
  const double dhk = d_hk(model), dss = d_ss(model);
  ctx.out << "type=" << static_cast<int>(wave.wave_type)
          << " q_plus=" << (c.q_plus ? short_number(*c.q_plus) : std::string("none")) << " d_hk=" << short_number(dhk)
          << " d_ss=" << short_number(dss) << "\n";
  if (ctx.wants("json")) {
    ctx.write_json("classify.json", {{"type", static_cast<int>(wave.wave_type)},
                                     {"regime_case", c.regime_case},
                                     {"q_plus", c.q_plus ? json(*c.q_plus) : json(nullptr)},
                                     {"d_hk", number_json(dhk)},
                                     {"d_ss", number_json(dss)},
                                     {"total_drop", D}});
  }
  return 0;
}

int run_wave(const Context& ctx, const ErosionModel& model, double D) {
  const StationaryWave wave = construct(model, D);
  const QProfile p = sample_profile(wave, model, 2001);
  if (ctx.wants("csv")) ctx.write("wave.csv", profile_csv(p));
  if (ctx.wants("json")) {
    ctx.write_json("wave.json", {{"type", static_cast<int>(wave.wave_type)},
                                 {"shock_right", wave.shock_right ? json(*wave.shock_right) : json(nullptr)},
                                 {"profile", profile_json(p)}});
  }
  ctx.out << "type=" << static_cast<int>(wave.wave_type) << " samples=" << p.q.size() << "\n";
  return 0;
}

int run_physical(const Context& ctx, const ErosionModel& model, double D) {
  const StationaryWave wave = construct(model, D);
  const PhysicalWave pw = physical_wave(model, wave);
  if (!pw.diagnostic.empty()) ctx.info(pw.diagnostic);
  if (ctx.wants("csv")) ctx.write("physical.csv", physical_csv(pw.height_curve));
  if (ctx.wants("json")) {
    ctx.write_json("physical.json", {{"speed", pw.speed},
                                     {"phase_offset", pw.phase_offset},
                                     {"cross_check_error", pw.cross_check_error},
                                     {"height_curve", physical_json(pw.height_curve)}});
  }
  ctx.out << "type=" << static_cast<int>(wave.wave_type) << " speed=" << format_number(pw.speed)
          << " vertices=" << pw.height_curve.vertices.size() << "\n";
  return 0;
}

void write_run(const Context& ctx, const ErosionModel& model, const RunResult& r, json summary, const char* json_name) {
  json snaps = json::array();
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    const QProfile p = reconstruct(r.snapshots[k].state, model);
    if (ctx.wants("csv")) ctx.write(snapshot_name(k), profile_csv(p));
    json s = profile_json(p);
    s["t"] = r.snapshots[k].time;
    snaps.push_back(s);
  }
  if (ctx.wants("csv")) ctx.write("series.csv", series_csv(r.series));
  if (ctx.wants("json")) {
    json events = json::object();
    for (const Event& e : r.events) events[to_string(e.kind)] = events.value(to_string(e.kind), 0) + 1;
    summary["snapshots"] = snaps;
    summary["series"] = series_json(r.series);
    summary["event_counts"] = events;
    summary["stats"] = {{"steps", r.stats.steps},
                        {"dt_min", number_json(r.stats.dt_min)},
                        {"dt_max", number_json(r.stats.dt_max)},
                        {"max_markers", r.stats.max_markers}};
    ctx.write_json(json_name, summary);
  }
}

int run_simulate(const Context& ctx, const ErosionModel& model) {
  const ResolvedInitialData data = resolved_initial_data(ctx.spec, model);
  const SolverConfig cfg = resolved_solver(ctx.spec);
  const StationaryWave wave = construct(model, data.total_drop);
  MarkerField state = init_state(data.zeta0, data.total_drop, cfg);
  state.anchor_x = data.mean_x;
  ctx.debug("initial markers " + std::to_string(state.markers.size()));
  const RunResult r = run(state, model, cfg, &wave);
  const double l1 = l1_distance(r.final_state, wave, model);
  write_run(ctx, model, r, {{"final_l1", l1}, {"total_drop", data.total_drop}}, "simulate.json");
  ctx.out << "snapshots=" << r.snapshots.size() << " steps=" << r.stats.steps << " final_l1=" << format_number(l1)
          << "\n";
  return 0;
}

int run_converge(const Context& ctx, const ErosionModel& model) {
  const ResolvedInitialData data = resolved_initial_data(ctx.spec, model);
  const SolverConfig cfg = resolved_solver(ctx.spec);
  const ConvergenceResult res = convergence_experiment(model, data.zeta0, data.total_drop, cfg);
  const bool trend = windowed_max_nonincreasing(res.l1_series, 1.0);
  json summary = {{"type", static_cast<int>(res.wave.wave_type)},
                  {"total_drop", data.total_drop},
                  {"final_l1", res.final_l1},
                  {"speed_estimate", number_json(res.speed.speed)},
                  {"theorem_constant", res.theorem_constant},
                  {"windowed_max_nonincreasing", trend}};
  write_run(ctx, model, res.run, summary, "converge.json");
  ctx.out << "type=" << static_cast<int>(res.wave.wave_type) << " snapshots=" << res.run.snapshots.size()
          << " final_l1=" << format_number(res.final_l1) << " speed=" << format_number(res.speed.speed) << "\n";
  return 0;
}

json envelope_json(const Envelope& e) {
  return {{"kind", to_string(e.kind)},
          {"eps", e.eps},
          {"switch_point", number_json(e.switch_point)},
          {"validity_time", number_json(e.validity_time)},
          {"stage1_time", number_json(e.stage1_time)},
          {"ode_time", number_json(e.ode_time)},
          {"bound_time", number_json(e.bound_time)},
          {"v_eps", number_json(e.v_eps)},
          {"constant", e.constant},
          {"note", e.note}};
}

int run_envelope(const Context& ctx, const ErosionModel& model) {
  const ResolvedInitialData data = resolved_initial_data(ctx.spec, model);
  const double D = data.total_drop;
  const double eps = ctx.opts.eps;
  const StationaryWave wave = construct(model, D);

  Envelope upper = upper_envelope(model, D, eps, data.zeta0);
  if (D > d_hk(model)) upper = upper_stage2(model, D, eps, upper);
  std::optional<Envelope> lower;
  if (D < d_ss(model)) {
    lower = lower_envelope(model, D, eps, data.zeta0);
    if (lower->switch_point > -D) lower = lower_stage2(model, D, eps, *lower);
  }

  std::string csv = "q,upper,lower,wave\n";
  for (int i = 0; i <= 2000; ++i) {
    const double q = -D + D * i / 2000.0;
    const double z = evaluate(wave, model, q);
    // A pure-shock wave is its own lower barrier.
    const double lo = lower ? (*lower)(q) : z;
    csv += format_number(q) + "," + format_number(upper(q)) + "," + format_number(lo) + "," + format_number(z) + "\n";
  }
  if (ctx.wants("csv")) ctx.write("envelope.csv", csv);
  if (ctx.wants("json")) {
    ctx.write_json("envelope.json", {{"upper", envelope_json(upper)},
                                     {"lower", lower ? envelope_json(*lower) : json(nullptr)},
                                     {"theorem_constant", 2.0 * envelope_constant(model)}});
  }
  const double T = std::max(upper.validity_time, lower ? lower->validity_time : 0.0);
  ctx.out << "upper=" << to_string(upper.kind) << " lower=" << (lower ? to_string(lower->kind) : "wave")
          << " validity_time=" << format_number(T) << "\n";
  return 0;
}

}  // namespace

LogLevel parse_log_level(const char* s) {
  if (s == nullptr) return LogLevel::error;
  if (std::strcmp(s, "debug") == 0) return LogLevel::debug;
  if (std::strcmp(s, "info") == 0) return LogLevel::info;
  return LogLevel::error;
}

int dispatch(const RunSpec& spec, std::ostream& out, std::ostream& log, const DispatchOptions& opts) {
  const Context ctx{spec, out, log, opts};
  try {
    const ErosionModel model = make_model(spec.model);
    if (spec.mode == Mode::validate) return run_validate(ctx, model);
    const ValidationReport rep = validate(model);
    if (!rep.all_passed()) {
      for (const HypothesisCheck& c : rep.checks) {
        if (!c.passed) log << "error: model hypothesis " << c.name << " fails at z=" << format_number(c.worst_z) << "\n";
      }
      return 1;
    }
    const double D = resolved_drop(spec);
    ctx.info(std::string("mode ") + to_string(spec.mode) + " D=" + format_number(D));
    switch (spec.mode) {
      case Mode::classify: return run_classify(ctx, model, D);
      case Mode::wave: return run_wave(ctx, model, D);
      case Mode::physical: return run_physical(ctx, model, D);
      case Mode::simulate: return run_simulate(ctx, model);
      case Mode::converge: return run_converge(ctx, model);
      case Mode::envelope: return run_envelope(ctx, model);
      case Mode::validate: break;
    }
    return 0;
  } catch (const std::invalid_argument& e) {  // ModelError, ConfigError
    log << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {  // DomainError
    log << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {  // NumericalError, I/O
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace erodewave
