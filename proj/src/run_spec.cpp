#include "erodewave/run_spec.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <set>

#include "erodewave/stationary_profile.hpp"
#include "erodewave/traveling_wave.hpp"

namespace erodewave {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) fail(path.empty() ? k : path + "." + k, "unknown field");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) fail(path, "must be positive");
  return v;
}

InitialPiece parse_piece(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "lower", "upper", "value", "base", "amp", "rate", "offset"});
  InitialPiece p;
  if (!j.contains("kind") || !j["kind"].is_string()) fail(path + ".kind", "required string");
  const std::string kind = j["kind"];
  if (kind == "constant") {
    p.kind = InitialPiece::Kind::constant;
  } else if (kind == "exponential") {
    p.kind = InitialPiece::Kind::exponential;
  } else {
    fail(path + ".kind", "expected \"constant\" or \"exponential\"");
  }
  if (!j.contains("lower")) fail(path + ".lower", "required");
  p.lower = number(j["lower"], path + ".lower");
  if (j.contains("upper") && !j["upper"].is_null()) p.upper = number(j["upper"], path + ".upper");
  for (const char* key : {"value", "base", "amp", "rate", "offset"}) {
    if (!j.contains(key)) continue;
    const double v = number(j[key], path + "." + key);
    const std::string k = key;
    if (k == "value") p.value = v;
    if (k == "base") p.base = v;
    if (k == "amp") p.amp = v;
    if (k == "rate") p.rate = v;
    if (k == "offset") p.offset = v;
  }
  return p;
}

json piece_to_json(const InitialPiece& p) {
  json j;
  j["kind"] = p.kind == InitialPiece::Kind::constant ? "constant" : "exponential";
  j["lower"] = p.lower;
  j["upper"] = std::isfinite(p.upper) ? json(p.upper) : json(nullptr);
  if (p.kind == InitialPiece::Kind::constant) {
    j["value"] = p.value;
  } else {
    j["base"] = p.base;
    j["amp"] = p.amp;
    j["rate"] = p.rate;
    j["offset"] = p.offset;
  }
  return j;
}

bool needs_drop(Mode m) { return m != Mode::validate; }

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::validate: return "validate";
    case Mode::classify: return "classify";
    case Mode::wave: return "wave";
    case Mode::simulate: return "simulate";
    case Mode::converge: return "converge";
    case Mode::physical: return "physical";
    case Mode::envelope: return "envelope";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(const std::string& s) {
  for (Mode m : {Mode::validate, Mode::classify, Mode::wave, Mode::simulate, Mode::converge, Mode::physical,
                 Mode::envelope}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

RunSpec parse_config_json(const json& j) {
  check_keys(j, "", {"model", "mode", "total_drop", "initial_data", "solver", "output"});
  RunSpec spec;

  if (!j.contains("model")) fail("model", "required");
  const json& jm = j["model"];
  check_keys(jm, "model", {"builtin", "g_poly"});
  if (jm.contains("builtin") == jm.contains("g_poly")) fail("model", "exactly one of builtin or g_poly is required");
  if (jm.contains("builtin")) {
    if (!jm["builtin"].is_string()) fail("model.builtin", "expected a string");
    spec.model = ModelSpec::from_builtin(jm["builtin"].get<std::string>());
    try {
      (void)make_model(spec.model);
    } catch (const ModelError& e) {
      fail("model.builtin", e.what());
    }
  } else {
    if (!jm["g_poly"].is_array() || jm["g_poly"].empty()) fail("model.g_poly", "expected a non-empty array");
    std::vector<double> c;
    for (std::size_t i = 0; i < jm["g_poly"].size(); ++i) {
      c.push_back(number(jm["g_poly"][i], "model.g_poly[" + std::to_string(i) + "]"));
    }
    spec.model = ModelSpec::from_poly(std::move(c));
  }

  if (!j.contains("mode")) fail("mode", "required");
  if (!j["mode"].is_string()) fail("mode", "expected a string");
  const auto mode = parse_mode(j["mode"].get<std::string>());
  if (!mode) fail("mode", "unknown mode '" + j["mode"].get<std::string>() + "'");
  spec.mode = *mode;

  if (j.contains("total_drop")) spec.total_drop = positive(j["total_drop"], "total_drop");

  if (j.contains("initial_data")) {
    const json& ji = j["initial_data"];
    check_keys(ji, "initial_data", {"kind", "pieces"});
    InitialDataSpec id;
    if (!ji.contains("kind") || !ji["kind"].is_string()) fail("initial_data.kind", "required string");
    id.kind = ji["kind"].get<std::string>();
    if (id.kind != "stationary" && id.kind != "experiment" && id.kind != "pieces") {
      fail("initial_data.kind", "expected \"stationary\", \"experiment\" or \"pieces\"");
    }
    if (id.kind == "pieces") {
      if (!ji.contains("pieces") || !ji["pieces"].is_array() || ji["pieces"].empty()) {
        fail("initial_data.pieces", "required non-empty array");
      }
      for (std::size_t i = 0; i < ji["pieces"].size(); ++i) {
        id.pieces.push_back(parse_piece(ji["pieces"][i], "initial_data.pieces[" + std::to_string(i) + "]"));
      }
      try {
        (void)InitialData(id.pieces);
      } catch (const ModelError& e) {
        fail("initial_data.pieces", e.what());
      }
    } else if (ji.contains("pieces")) {
      fail("initial_data.pieces", "only allowed with kind \"pieces\"");
    }
    spec.initial_data = std::move(id);
  }

  if (j.contains("solver")) {
    const json& js = j["solver"];
    check_keys(js, "solver", {"delta_q", "cfl", "t_end", "snapshot_times", "clamp_eps"});
    if (js.contains("delta_q")) spec.solver.delta_q = positive(js["delta_q"], "solver.delta_q");
    if (js.contains("cfl")) {
      const double c = positive(js["cfl"], "solver.cfl");
      if (c > 1.0) fail("solver.cfl", "must lie in (0, 1]");
      spec.solver.cfl = c;
    }
    if (js.contains("t_end")) {
      const double t = number(js["t_end"], "solver.t_end");
      if (t < 0.0) fail("solver.t_end", "must be non-negative");
      spec.solver.t_end = t;
    }
    if (js.contains("snapshot_times")) {
      if (!js["snapshot_times"].is_array()) fail("solver.snapshot_times", "expected an array");
      std::vector<double> ts;
      for (std::size_t i = 0; i < js["snapshot_times"].size(); ++i) {
        const std::string p = "solver.snapshot_times[" + std::to_string(i) + "]";
        const double t = number(js["snapshot_times"][i], p);
        if (t < 0.0 || (!ts.empty() && t <= ts.back())) fail(p, "times must be non-negative and increasing");
        ts.push_back(t);
      }
      spec.solver.snapshot_times = std::move(ts);
    }
    if (js.contains("clamp_eps")) spec.solver.clamp_eps = positive(js["clamp_eps"], "solver.clamp_eps");
  }

  if (j.contains("output")) {
    const json& jo = j["output"];
    check_keys(jo, "output", {"dir", "formats"});
    if (jo.contains("dir")) {
      if (!jo["dir"].is_string()) fail("output.dir", "expected a string");
      spec.output.dir = jo["dir"].get<std::string>();
    }
    if (jo.contains("formats")) {
      if (!jo["formats"].is_array() || jo["formats"].empty()) fail("output.formats", "expected a non-empty array");
      spec.output.formats.clear();
      for (const auto& f : jo["formats"]) {
        if (!f.is_string() || (f != "csv" && f != "json")) fail("output.formats", "entries must be \"csv\" or \"json\"");
        spec.output.formats.push_back(f.get<std::string>());
      }
    }
  }

  const bool has_data_drop = spec.initial_data && spec.initial_data->kind != "stationary";
  if (needs_drop(spec.mode) && !spec.total_drop && !has_data_drop) {
    fail("total_drop", std::string("required for mode ") + to_string(spec.mode));
  }
  return spec;
}

RunSpec parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return parse_config_json(j);
}

json to_json(const RunSpec& spec) {
  json j;
  if (spec.model.builtin) {
    j["model"]["builtin"] = *spec.model.builtin;
  } else {
    j["model"]["g_poly"] = spec.model.g_poly;
  }
  j["mode"] = to_string(spec.mode);
  if (spec.total_drop) j["total_drop"] = *spec.total_drop;
  if (spec.initial_data) {
    j["initial_data"]["kind"] = spec.initial_data->kind;
    if (spec.initial_data->kind == "pieces") {
      json arr = json::array();
      for (const auto& p : spec.initial_data->pieces) arr.push_back(piece_to_json(p));
      j["initial_data"]["pieces"] = arr;
    }
  }
  json js = json::object();
  if (spec.solver.delta_q) js["delta_q"] = *spec.solver.delta_q;
  if (spec.solver.cfl) js["cfl"] = *spec.solver.cfl;
  if (spec.solver.t_end) js["t_end"] = *spec.solver.t_end;
  if (spec.solver.snapshot_times) js["snapshot_times"] = *spec.solver.snapshot_times;
  if (spec.solver.clamp_eps) js["clamp_eps"] = *spec.solver.clamp_eps;
  if (!js.empty()) j["solver"] = js;
  j["output"]["dir"] = spec.output.dir;
  j["output"]["formats"] = spec.output.formats;
  return j;
}

double resolved_drop(const RunSpec& spec) {
  if (spec.initial_data && spec.initial_data->kind == "experiment") return experiment_initial_data().total_drop();
  if (spec.initial_data && spec.initial_data->kind == "pieces") return InitialData(spec.initial_data->pieces).total_drop();
  if (spec.total_drop) return *spec.total_drop;
  throw ConfigError("total_drop: required");
}

SolverConfig resolved_solver(const RunSpec& spec) {
  SolverConfig c;
  const double D = resolved_drop(spec);
  c.delta_q = spec.solver.delta_q.value_or(1e-3 * D);
  c.cfl = spec.solver.cfl.value_or(0.4);
  c.clamp_eps = spec.solver.clamp_eps.value_or(1e-10);
  c.t_end = spec.solver.t_end.value_or(10.0);
  if (spec.solver.snapshot_times) c.snapshot_times = *spec.solver.snapshot_times;
  c.series_interval = 1.0;
  return c;
}

ResolvedInitialData resolved_initial_data(const RunSpec& spec, const ErosionModel& model) {
  ResolvedInitialData out;
  out.total_drop = resolved_drop(spec);
  const std::string kind = spec.initial_data ? spec.initial_data->kind : "stationary";
  if (kind == "stationary") {
    auto wave = std::make_shared<StationaryWave>(construct(model, out.total_drop));
    auto m = std::make_shared<ErosionModel>(model);
    out.zeta0 = [wave, m](double q) {
      if (q <= -wave->total_drop) return wave->shock_right ? 0.0 : phi(*m, -wave->total_drop);
      return evaluate(*wave, *m, q);
    };
    return out;
  }
  auto data = std::make_shared<InitialData>(kind == "experiment" ? experiment_initial_data()
                                                                   : InitialData(spec.initial_data->pieces));
  out.mean_x = data->mean_x();
  out.zeta0 = [data](double q) { return data->zeta(q); };
  return out;
}

}  // namespace erodewave
