// su11: run measurement schemes, sweeps, tapping reports, synthetic spectra
// and the Monte Carlo agreement suite from the command line.
//
// exit codes: 0 ok, 2 config error, 3 numerical-validity error, 4 I/O error

#include "su11/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#ifndef SU11_DEFAULT_PRESETS
#define SU11_DEFAULT_PRESETS "presets/presets.json"
#endif

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::string presets_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SU11_PRESETS")) return env;
  return SU11_DEFAULT_PRESETS;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace su11;

  CLI::App app{"Gaussian-state simulator for SU(1,1) interferometric phase measurement"};
  app.require_subcommand(1);

  cli::ConfigSources sources;
  std::string preset_name, config_path, format_name = "csv", out_path, presets_file;
  std::uint64_t seed = oracle::kDefaultSeed;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) {
      sub->add_option("--preset", preset_name, "preset name from the catalogue");
      sub->add_option("--config", config_path, "flat JSON config file");
      sub->add_option("--set", sources.overrides, "override key=value (repeatable)");
    }
    sub->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_path, "output file (default stdout)");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--presets", presets_file, "preset catalogue (default $SU11_PRESETS or the installed file)");
  };

  auto* run = app.add_subcommand("run", "run one scheme");
  add_common(run, true);

  auto* sweep = app.add_subcommand("sweep", "sweep one numeric config key");
  add_common(sweep, true);
  std::string axis;
  double from = 0.0, to = 0.0, step = 0.0;
  std::vector<double> values;
  sweep->add_option("--axis", axis, "config key to sweep")->required();
  auto* from_opt = sweep->add_option("--from", from, "first value");
  auto* to_opt = sweep->add_option("--to", to, "last value (inclusive)");
  auto* step_opt = sweep->add_option("--step", step, "increment");
  auto* values_opt = sweep->add_option("--values", values, "explicit values")->delimiter(',');
  from_opt->needs(to_opt, step_opt)->excludes(values_opt);

  auto* tap = app.add_subcommand("tap", "tapping report of the dual-beam SUI");
  add_common(tap, true);

  auto* spectrum = app.add_subcommand("spectrum", "synthetic analyzer traces");
  add_common(spectrum, true);
  SpectrumOptions spec_opt;
  spectrum->add_option("--center-hz", spec_opt.center_hz, "analyzer center frequency");
  spectrum->add_option("--span-hz", spec_opt.span_hz, "analyzer span");
  spectrum->add_option("--rbw-hz", spec_opt.rbw_hz, "resolution bandwidth");
  spectrum->add_option("--normalize-port", spec_opt.normalize_port, "detector whose shot noise is 0 dB");

  auto* presets = app.add_subcommand("presets", "preset catalogue");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "list presets");
  add_common(presets_list, false);

  auto* oracle_cmd = app.add_subcommand("oracle", "Monte Carlo oracle");
  oracle_cmd->require_subcommand(1);
  auto* oracle_check = oracle_cmd->add_subcommand("check", "engine vs sampler on random pipelines");
  add_common(oracle_check, false);
  cli::OracleCheckOptions oracle_opt;
  oracle_check->add_option("--pipelines", oracle_opt.pipelines, "number of random pipelines");
  oracle_check->add_option("--samples", oracle_opt.samples, "samples per pipeline");
  oracle_check->add_option("--z-limit", oracle_opt.z_limit, "standard-error band");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (!preset_name.empty()) sources.preset = preset_name;
    if (!config_path.empty()) sources.config_path = config_path;
    const auto format = cli::parse_format(format_name);
    const std::optional<std::string> out = out_path.empty() ? std::nullopt : std::optional(out_path);

    std::optional<config::PresetCatalogue> catalogue;
    if (sources.preset || presets_list->parsed()) catalogue = config::PresetCatalogue::load(presets_path(presets_file));

    if (presets_list->parsed()) {
      cli::write_output(cli::cmd_presets_list(*catalogue, format), out, std::cout);
      return 0;
    }
    if (oracle_check->parsed()) {
      oracle_opt.seed = seed;
      const auto result = cli::oracle_check(oracle_opt);
      cli::write_output(cli::render("oracle", result.rows, format), out, std::cout);
      if (!result.all_passed) {
        std::cerr << "su11: oracle disagreement beyond " << oracle_opt.z_limit << " standard errors\n";
        return kExitNumerical;
      }
      return 0;
    }

    const SchemeConfig cfg = cli::resolve_config(sources, catalogue ? &*catalogue : nullptr);
    for (const auto& w : cli::depth_warnings(cfg)) std::cerr << "su11: warning: " << w << '\n';

    std::string text;
    if (run->parsed()) {
      text = cli::cmd_run(cfg, format);
    } else if (sweep->parsed()) {
      cli::SweepAxis sweep_axis{axis, {}};
      if (values_opt->count() > 0) {
        sweep_axis.values = values;
      } else if (from_opt->count() > 0) {
        sweep_axis.values = cli::sweep_range(from, to, step);
      } else {
        throw ConfigError("sweep", "give --from/--to/--step or --values");
      }
      text = cli::cmd_sweep(cfg, sweep_axis, format);
    } else if (tap->parsed()) {
      text = cli::cmd_tap(cfg, format);
    } else if (spectrum->parsed()) {
      text = cli::cmd_spectrum(cfg, spec_opt, format);
    }
    cli::write_output(text, out, std::cout);
    return 0;
  } catch (const IoError& e) {
    std::cerr << "su11: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "su11: config error in '" << e.field() << "': " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "su11: numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "su11: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "su11: error: " << e.what() << '\n';
    return 1;
  }
}
