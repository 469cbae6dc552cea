#include "orbitlab/cli/commands.hpp"
#include "orbitlab/errors.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace orbitlab::cli {

namespace {

std::string pointer_or_root(const std::string& path) { return path.empty() ? "/" : path; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Invertible optimization dynamics: orbits, constants of motion, chaos scans.",
               "orbitlab"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  app.add_option("--config", config_path, "Run configuration (JSON)");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random scans (overrides the config)");
  auto* tol_opt = app.add_option("--tolerance", tolerance,
                                 "Primary tolerance of the command (overrides the config)")
                      ->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Iterate a map and write trajectory CSVs");
  auto* invariant = app.add_subcommand("invariant", "Evaluate the configured invariant");
  auto* classify = app.add_subcommand("classify", "Decide whether two states share an orbit");
  auto* scan = app.add_subcommand("scan", "Seeded scrambled-pair scan with level-set confinement");
  auto* figures = app.add_subcommand("figures", "Emit the alternating-play figure data");
  std::string which;
  std::size_t figure_steps = 30;
  figures->add_option("which", which, "fig1 or fig2")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2"}));
  figures->add_option("--steps", figure_steps, "Steps per trajectory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    Context ctx;
    ctx.out_dir = out_dir;
    ctx.log = &out;
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) throw ConfigError(out_dir, "cannot create output directory: " + ec.message());

    if (figures->parsed()) return cmd_figures(which, figure_steps, ctx);

    if (config_path.empty()) throw ConfigError("--config", "this command needs --config <path>");
    RunConfig cfg = load_config(config_path);
    if (*seed_opt) cfg.seed = seed;
    if (*tol_opt) {
      cfg.tolerances.defect = tolerance;
      cfg.tolerance_overridden = true;
    }
    if (simulate->parsed()) return cmd_simulate(cfg, ctx);
    if (invariant->parsed()) return cmd_invariant(cfg, ctx);
    if (classify->parsed()) return cmd_classify(cfg, ctx);
    if (scan->parsed()) return cmd_scan(cfg, ctx);
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "config error at " << pointer_or_root(e.path()) << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure at step " << e.index() << ": " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const InversionError& e) {
    err << "numerical failure at step " << e.index() << ": " << e.what()
        << " (residual " << format_double(e.residual()) << ")\n";
    return kNumericalFailure;
  } catch (const StepSizeError& e) {
    err << "numerical failure at coordinate " << e.coordinate() << ": " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::logic_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace orbitlab::cli
