// Command-line front end for the squeezed-harmonics library.
//
// Verbs:
//   run                execute a scenario configuration
//   figure             run a canned figure configuration by id
//   validate-config    parse + validate a configuration without computing
//   convergence-check  rerun a spectrum config on refined grids and compare
//
// Exit codes: 0 success, 1 unexpected error, 2 invalid configuration or
// usage, 3 stage refused (cost guard), 4 numerical non-convergence.
#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include "CLI11.hpp"
#include "sqh/config.hpp"
#include "sqh/errors.hpp"
#include "sqh/runner.hpp"

namespace {

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const sqh::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const sqh::DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 2;
  } catch (const sqh::RefusalError& e) {
    std::fprintf(stderr, "refused: %s\n", e.what());
    return 3;
  } catch (const sqh::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

void print_result(const sqh::RunResult& res) {
  for (const std::string& f : res.output_files) {
    std::printf("wrote %s\n", f.c_str());
  }
  std::printf("manifest: %s\n", res.manifest_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"squeezed-harmonics: strong-field emission under a squeezed drive"};
  app.require_subcommand(1);

  std::string config_path;
  std::string figure_id;
  std::string out_dir = ".";
  int threads = 0;
  bool allow_expensive = false;
  bool list_figures = false;

  CLI::App* cmd_run = app.add_subcommand("run", "execute a scenario configuration");
  cmd_run->add_option("--config", config_path, "configuration file")->required();
  cmd_run->add_option("--out", out_dir, "output directory (default: .)");
  cmd_run->add_option("--threads", threads,
                      "worker threads (0: SQHARM_THREADS env or hardware)");
  cmd_run->add_flag("--allow-expensive", allow_expensive,
                    "lift cost-based stage refusals");

  CLI::App* cmd_fig =
      app.add_subcommand("figure", "run a canned figure configuration");
  cmd_fig->add_option("--figure", figure_id, "figure id (see --list)");
  cmd_fig->add_flag("--list", list_figures, "list available figure ids");
  cmd_fig->add_option("--out", out_dir, "output directory (default: .)");
  cmd_fig->add_option("--threads", threads,
                      "worker threads (0: SQHARM_THREADS env or hardware)");
  cmd_fig->add_flag("--allow-expensive", allow_expensive,
                    "lift cost-based stage refusals");

  CLI::App* cmd_val = app.add_subcommand(
      "validate-config", "parse and validate a configuration without running");
  cmd_val->add_option("--config", config_path, "configuration file")->required();

  CLI::App* cmd_conv = app.add_subcommand(
      "convergence-check",
      "rerun a spectrum configuration on refined time/momentum grids and "
      "report the largest relative band change");
  cmd_conv->add_option("--config", config_path, "configuration file")->required();
  cmd_conv->add_option("--threads", threads,
                       "worker threads (0: SQHARM_THREADS env or hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // usage problems are validation failures
  }

  sqh::RunOptions opt;
  opt.out_dir = out_dir;
  opt.threads = threads;
  opt.allow_expensive = allow_expensive;

  if (cmd_run->parsed()) {
    return run_guarded([&] {
      const sqh::Config cfg = sqh::Config::parse_file(config_path);
      print_result(sqh::run_scenario(cfg, opt));
      return 0;
    });
  }
  if (cmd_fig->parsed()) {
    return run_guarded([&] {
      if (list_figures) {
        for (const std::string& id : sqh::figure_ids()) {
          std::printf("%s\n", id.c_str());
        }
        return 0;
      }
      if (figure_id.empty()) {
        throw sqh::ConfigError("figure: give --figure ID or --list");
      }
      print_result(sqh::reproduce_figure(figure_id, opt));
      return 0;
    });
  }
  if (cmd_val->parsed()) {
    return run_guarded([&] {
      sqh::validate_config(sqh::Config::parse_file(config_path));
      std::printf("ok: %s\n", config_path.c_str());
      return 0;
    });
  }
  if (cmd_conv->parsed()) {
    return run_guarded([&] {
      const sqh::Config cfg = sqh::Config::parse_file(config_path);
      const double dev = sqh::convergence_check(cfg, opt);
      std::printf("converged: max relative band change %.6g\n", dev);
      return 0;
    });
  }
  std::fprintf(stderr, "no verb given\n");
  return 2;
}
