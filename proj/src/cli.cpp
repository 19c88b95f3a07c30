#include "ouhardy/cli.hpp"

#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ouhardy/checks.hpp"

namespace ouh::cli {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Usage:
    case ErrorKind::Dimension:
    case ErrorKind::DefiniteMatrix:
    case ErrorKind::Geometry:
    case ErrorKind::Input:
    case ErrorKind::Domain:
    case ErrorKind::Resolution:
    case ErrorKind::Stability:
      return 2;
    default:
      return 1;
  }
}

namespace {

using Driver = std::function<RunResult(const ProblemConfig&, const RunOptions&)>;

struct Command {
  std::string name;
  std::string help;
  Driver driver;
  CLI::App* app = nullptr;
};

struct Flags {
  std::string config;
  std::string out = ".";
  int m = 0;
  std::uint64_t seed = 0;
  double coupling = 0.0;
  int bumps = 0;
  int one_pole_bumps = 0;
  std::vector<double> k_cuts;
  std::vector<double> gammas;
  double k_cut = 0.0;
  double dt = 0.0;
  double t_final = 0.0;
  double rho = 0.5;
  std::string profile = "cosine";
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_number(v[i]);
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted multipolar Hardy inequality and Ornstein-Uhlenbeck evolution checks", "ouhardy"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::vector<Command> commands = {
      {"measure-check", "Normalization, Gamma identity, drift bound, weight equivalence, moments", measure_check},
      {"verify-hardy", "Weighted Hardy inequality on a random bump suite", verify_hardy},
      {"improved", "Improved inequality with coupling c0/n, including a one-pole run", improved_check},
      {"lambda1", "Bottom of the discrete spectrum across cut-offs", lambda1_scan},
      {"optimality", "Rayleigh quotient bound along gamma towards 1 - N/2", optimality_scan},
      {"ims-check", "Partition of unity, localization identity and lower-bound chain", ims_check},
      {"evolve", "Cut-off evolution with growth-rate fit", evolve_run},
      {"blowup-scan", "Cut-off scan and bounded/growing verdict", blowup_run},
      {"suite", "Every check in dependency order", run_suite},
  };

  Flags f;
  std::map<std::string, CLI::Option*> opt;
  for (auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    c.app = sub;
    sub->add_option("config", f.config, "JSON configuration file")->required();
    sub->add_option("--out", f.out, "Output directory")->capture_default_str();
    auto reg = [&](CLI::Option* o) { opt[c.name + o->get_name()] = o; };
    reg(sub->add_option("--m", f.m, "Points per axis")->check(CLI::PositiveNumber));
    reg(sub->add_option("--seed", f.seed, "Random seed"));
    reg(sub->add_option("--c", f.coupling, "Coupling override")->check(CLI::NonNegativeNumber));
    const bool bumped = c.name == "verify-hardy" || c.name == "improved" || c.name == "ims-check" || c.name == "suite";
    if (bumped) reg(sub->add_option("--bumps", f.bumps, "Number of random bumps")->check(CLI::PositiveNumber));
    if (c.name == "improved")
      reg(sub->add_option("--one-pole-bumps", f.one_pole_bumps, "Bumps for the one-pole run")->check(CLI::PositiveNumber));
    if (c.name == "lambda1" || c.name == "blowup-scan")
      reg(sub->add_option("--k-cuts", f.k_cuts, "Increasing cut-off indices")->delimiter(','));
    if (c.name == "optimality") reg(sub->add_option("--gammas", f.gammas, "Exponents in (1 - N/2, 0)")->delimiter(','));
    if (c.name == "ims-check") {
      reg(sub->add_option("--rho", f.rho, "Plateau fraction of r0")->check(CLI::Range(0.0, 1.0)));
      reg(sub->add_option("--profile", f.profile, "cosine or smoothstep"));
    }
    if (c.name == "evolve") reg(sub->add_option("--k", f.k_cut, "Cut-off index")->check(CLI::PositiveNumber));
    if (c.name == "evolve" || c.name == "blowup-scan") {
      reg(sub->add_option("--dt", f.dt, "Time step")->check(CLI::PositiveNumber));
      reg(sub->add_option("--t-final", f.t_final, "Final time")->check(CLI::PositiveNumber));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const Command* cmd = nullptr;
  for (const auto& c : commands)
    if (c.app->parsed()) cmd = &c;

  auto given = [&](const std::string& name) {
    auto it = opt.find(cmd->name + name);
    return it != opt.end() && it->second->count() > 0;
  };

  try {
    RunOptions o;
    std::ostringstream overrides;
    if (given("--m")) {
      o.points_per_axis = f.m;
      overrides << " m=" << f.m;
    }
    if (given("--seed")) {
      o.seed = f.seed;
      overrides << " seed=" << f.seed;
    }
    if (given("--c")) {
      o.coupling = f.coupling;
      overrides << " c=" << format_number(f.coupling);
    }
    if (given("--bumps")) {
      o.bumps = f.bumps;
      overrides << " bumps=" << f.bumps;
    }
    if (given("--one-pole-bumps")) {
      o.one_pole_bumps = f.one_pole_bumps;
      overrides << " one_pole_bumps=" << f.one_pole_bumps;
    }
    if (given("--k-cuts")) {
      for (std::size_t i = 1; i < f.k_cuts.size(); ++i)
        if (!(f.k_cuts[i] > f.k_cuts[i - 1])) throw Error(ErrorKind::Usage, "--k-cuts must be increasing");
      o.k_cuts = f.k_cuts;
      overrides << " k_cuts=" << join(f.k_cuts);
    }
    if (given("--gammas")) {
      o.gammas = f.gammas;
      overrides << " gammas=" << join(f.gammas);
    }
    if (given("--rho")) {
      o.rho = f.rho;
      overrides << " rho=" << format_number(f.rho);
    }
    if (given("--profile")) {
      o.profile = parse_profile(f.profile);
      overrides << " profile=" << f.profile;
    }
    if (given("--k")) {
      o.k_cut = f.k_cut;
      overrides << " k=" << format_number(f.k_cut);
    }
    if (given("--dt")) {
      o.dt = f.dt;
      overrides << " dt=" << format_number(f.dt);
    }
    if (given("--t-final")) {
      o.t_final = f.t_final;
      overrides << " t_final=" << format_number(f.t_final);
    }

    const ProblemConfig cfg = effective_config(load_config(f.config), o);
    const RunResult r = cmd->driver(cfg, o);

    CsvTable manifest({"key", "value"});
    manifest.add({"tool_version", kToolVersion});
    manifest.add({"subcommand", cmd->name});
    manifest.add({"config_hash", config_hash(cfg)});
    manifest.add({"seed", std::to_string(cfg.seed)});
    const std::string ov = overrides.str();
    manifest.add({"overrides", ov.empty() ? "" : ov.substr(1)});
    std::string files;
    for (const auto& [name, table] : r.files) files += (files.empty() ? "" : " ") + name;
    manifest.add({"outputs", files});
    manifest.add({"status", r.ok() ? "ok" : "failed"});

    const std::filesystem::path dir(f.out);
    r.write(dir);
    manifest.write(dir / "manifest.csv");

    out << cmd->name << " config_hash=" << config_hash(cfg) << '\n';
    out << summary_table(r);
    for (const auto& [name, table] : r.files) out << "wrote " << name << " (" << table.rows() << " rows)\n";
    return r.ok() ? 0 : 1;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ouh::cli
