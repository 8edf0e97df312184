#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "erodewave/dispatch.hpp"
#include "erodewave/error.hpp"
#include "erodewave/run_spec.hpp"

using namespace erodewave;

namespace {

struct Flags {
  std::string config;
  std::string out_dir;
  std::string format;
  std::string builtin;
  std::vector<double> g_poly;
  double drop = 0.0;
  double eps = 0.05;
};

RunSpec build_spec(Mode mode, const Flags& f) {
  RunSpec spec;
  if (!f.config.empty()) spec = parse_config(f.config);
  spec.mode = mode;
  if (!f.builtin.empty() && !f.g_poly.empty()) throw ConfigError("--builtin and --g-poly are mutually exclusive");
  if (!f.builtin.empty()) spec.model = ModelSpec::from_builtin(f.builtin);
  if (!f.g_poly.empty()) spec.model = ModelSpec::from_poly(f.g_poly);
  if (f.config.empty() && f.builtin.empty() && f.g_poly.empty()) throw ConfigError("model: give --config, --builtin or --g-poly");
  if (f.drop > 0.0) spec.total_drop = f.drop;
  if (!f.out_dir.empty()) spec.output.dir = f.out_dir;
  if (f.format == "both") {
    spec.output.formats = {"csv", "json"};
  } else if (!f.format.empty()) {
    spec.output.formats = {f.format};
  }
  // Re-run the schema checks on the merged spec.
  return parse_config_json(to_json(spec));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traveling waves of an erosion model: classification, profiles and front-tracking runs"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "JSON run specification");
  app.add_option("--out", flags.out_dir, "output directory");
  app.add_option("--format", flags.format, "output format")->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_option("--builtin", flags.builtin, "builtin erosion model (quadratic, example5)");
  app.add_option("--g-poly", flags.g_poly, "coefficients of g(z) in ascending powers")->delimiter(',');
  app.add_option("--drop", flags.drop, "total drop D")->check(CLI::PositiveNumber);
  app.add_option("--eps", flags.eps, "envelope shift (envelope mode)")->check(CLI::PositiveNumber);

  const std::vector<std::pair<Mode, const char*>> modes = {
      {Mode::validate, "check the erosion-function hypotheses"},
      {Mode::classify, "classify the traveling wave for a total drop"},
      {Mode::wave, "sample the stationary profile in the drop frame"},
      {Mode::simulate, "run the front-tracking solver"},
      {Mode::converge, "run the convergence experiment"},
      {Mode::physical, "reconstruct the physical height profile"},
      {Mode::envelope, "construct upper and lower envelopes"},
  };
  for (const auto& [mode, help] : modes) app.add_subcommand(to_string(mode), help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Mode mode = Mode::validate;
  for (const auto& [m, help] : modes) {
    if (app.got_subcommand(to_string(m))) mode = m;
  }

  DispatchOptions opts;
  opts.eps = flags.eps;
  opts.log_level = parse_log_level(std::getenv("ERODEWAVE_LOG"));
  try {
    return dispatch(build_spec(mode, flags), std::cout, std::cerr, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
