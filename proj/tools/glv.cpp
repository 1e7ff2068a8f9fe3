#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "glv/config.hpp"
#include "glv/errors.hpp"
#include "glv/io.hpp"
#include "glv/parallel.hpp"
#include "glv/report.hpp"
#include "runner.hpp"

namespace {

// exit codes: 0 all reports pass, 1 some report fails, 2 bad config or
// usage, 3 runtime failure
constexpr int kFail = 1, kUsage = 2, kRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ginzburg-Landau vortex lab"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  bool strict = false;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  std::string inspect;

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"profile", "radial vortex profiles"},
      {"ansatz", "build product ansatz fields and their energies"},
      {"solve", "relax a field to a critical point on a disk"},
      {"analyze", "clusters, pointwise bounds, beta potential, good slices"},
      {"identity", "energy identity experiments"},
      {"sweep", "density sweep over tau"},
      {"monotonicity", "monotonicity audit of a solved field"},
      {"clearing", "clearing-out threshold sweep"},
      {"helix", "helical energy audit"},
      {"dump", "write the configured field as GLF1, or inspect one"},
      {"report", "run the experiment named in the config"},
  };
  for (const auto& [name, help] : subs) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", config_path, "config file")->check(CLI::ExistingFile);
    s->add_option("--out", out_dir, "output directory");
    s->add_flag("--strict", strict, "reject unknown config keys");
    s->add_option("--threads", threads, "worker threads (0: all cores)");
    s->add_option("--seed", seed, "placement jitter seed");
    if (name == "dump") s->add_option("--inspect", inspect, "print the header of a GLF1 file");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    glv::set_thread_count(threads);
    if (sub == "dump" && !inspect.empty()) {
      const glv::ComplexField u = glv::load_field(inspect);
      const auto& g = u.grid();
      std::printf("dim %d nx %zu ny %zu nt %zu h %.17g eps %.17g topology %d\n", g.dim(), g.nx, g.ny,
                  g.dim() == 3 ? g.nt : std::size_t(1), g.h, u.epsilon(), int(g.topology));
      return 0;
    }
    std::vector<std::string> warnings;
    glv::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = glv::load_config(config_path, strict, &warnings);
    } else if (sub == "report") {
      std::cerr << "report needs --config\n";
      return kUsage;
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (sub != "report" && sub != "dump") cfg.experiment = sub;
    if (sub == "dump") cfg.experiment = "ansatz";
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();

    if (sub == "dump") {
      std::filesystem::create_directories(cfg.out_dir);
      const auto path = std::filesystem::path(cfg.out_dir) / "field.glf";
      glv::dump_field(glv::cli::config_field(cfg), path);
      std::printf("%s\n", path.string().c_str());
      return 0;
    }
    const auto reports = glv::cli::run_experiment(cfg, cfg.out_dir);
    glv::emit_report(reports, cfg.out_dir);
    bool ok = true;
    for (const auto& r : reports) {
      std::printf("%-26s predicted %-12.6g measured %-12.6g tolerance %-10.4g %s\n", r.name.c_str(),
                  r.predicted, r.measured, r.tolerance, r.pass ? "PASS" : "FAIL");
      ok = ok && r.pass;
    }
    return ok ? 0 : kFail;
  } catch (const glv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const glv::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
