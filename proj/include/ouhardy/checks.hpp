#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ouhardy/config.hpp"
#include "ouhardy/ims.hpp"
#include "ouhardy/report.hpp"

namespace ouh {

inline constexpr const char* kToolVersion = "1.0.0";

enum class CheckStatus { Pass, Fail, Skip };
std::string to_string(CheckStatus s);

struct CheckOutcome {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

struct RunResult {
  std::vector<std::pair<std::string, CsvTable>> files;
  std::vector<CheckOutcome> checks;

  void check(const std::string& name, bool passed, const std::string& detail);
  void skip(const std::string& name, const std::string& detail);
  void merge(RunResult other);
  // No check failed (skipped checks do not count).
  bool ok() const;
  const CheckOutcome* find(const std::string& name) const;
  const CsvTable* file(const std::string& name) const;
  void write(const std::filesystem::path& dir) const;
};

// Overrides shared by the drivers; unset fields select each driver's default.
struct RunOptions {
  int points_per_axis = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> coupling;
  int bumps = 0;
  int one_pole_bumps = 0;
  std::vector<double> k_cuts;
  std::vector<double> gammas;
  std::optional<double> k_cut;
  std::optional<double> dt;
  std::optional<double> t_final;
  double rho = 0.5;
  Profile profile = Profile::Cosine;
};

// The configuration with the option overrides applied and validated.
ProblemConfig effective_config(const ProblemConfig& cfg, const RunOptions& opts);

// sigma_N \int_0^L r^{2 beta + N - 1} e^{-r^2/2} dr by composite Simpson.
double radial_moment(double beta, int dimension, int steps = 200000);

RunResult measure_check(const ProblemConfig& cfg, const RunOptions& opts = {});
RunResult verify_hardy(const ProblemConfig& cfg, const RunOptions& opts = {});
RunResult improved_check(const ProblemConfig& cfg, const RunOptions& opts = {});
RunResult lambda1_scan(const ProblemConfig& cfg, const RunOptions& opts = {});
RunResult optimality_scan(const ProblemConfig& cfg, const RunOptions& opts = {});
RunResult ims_check(const ProblemConfig& cfg, const RunOptions& opts = {});
RunResult evolve_run(const ProblemConfig& cfg, const RunOptions& opts = {});
RunResult blowup_run(const ProblemConfig& cfg, const RunOptions& opts = {});

// Every driver in dependency order.
RunResult run_suite(const ProblemConfig& cfg, const RunOptions& opts = {});

// One line per check, fixed column widths, no timings.
std::string summary_table(const RunResult& r);

}  // namespace ouh
