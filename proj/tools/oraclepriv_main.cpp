//
// Copyright 2026 The OraclePriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Experiment runner and audit harness for oracle-efficient semi-private
// learning.  Subcommands: run, audit, plot, params.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oraclepriv/config.hpp"
#include "oraclepriv/plot.hpp"
#include "oraclepriv/runner.hpp"

namespace {

using oraclepriv::ConfigError;
using oraclepriv::ExperimentConfig;
using oraclepriv::SolverError;

uint64_t ResolveSeed(const std::optional<uint64_t>& flag_seed,
                     const ExperimentConfig& cfg) {
  if (flag_seed) return *flag_seed;
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("ORACLEPRIV_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  throw ConfigError("seed: not set (use --seed, config seed, or ORACLEPRIV_SEED)");
}

int RunCommand(const std::string& config_path, std::optional<uint64_t> seed_flag,
               int workers, bool timings) {
  std::string raw;
  ExperimentConfig cfg = oraclepriv::LoadConfigFile(config_path, &raw);
  uint64_t seed = ResolveSeed(seed_flag, cfg);
  oraclepriv::RunOutput out =
      oraclepriv::RunExperiment(cfg, seed, workers, raw, timings);
  std::cout << "wrote " << out.rows.size() << " rows to " << out.results_csv_path
            << "\n";
  return 0;
}

int AuditCommand(const std::string& config_path, const std::string& kind,
                 std::optional<uint64_t> seed_flag, int workers, bool strict) {
  std::string raw;
  ExperimentConfig cfg = oraclepriv::LoadConfigFile(config_path, &raw);
  uint64_t seed = ResolveSeed(seed_flag, cfg);
  std::vector<oraclepriv::AuditRow> rows =
      oraclepriv::RunAudit(cfg, kind, seed, workers);
  std::string path = oraclepriv::WriteAuditCsv(cfg, rows);
  long failures = 0;
  for (const auto& r : rows) {
    if (r.report.verdict == oraclepriv::Verdict::kFail) ++failures;
  }
  std::cout << "wrote " << rows.size() << " audit rows to " << path << " ("
            << failures << " failing)\n";
  if (strict && failures > 0) return 2;
  return 0;
}

int PlotCommand(const std::string& csv_path, const oraclepriv::PlotOptions& opt,
                const std::string& out_path) {
  oraclepriv::CsvTable table = oraclepriv::ReadCsv(csv_path);
  oraclepriv::RenderSvg(table, opt, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int ParamsCommand(const std::string& theorem, double alpha, double beta,
                  double epsilon, double delta, double sigma, double lambda,
                  double d, double constant) {
  oraclepriv::Hyperparams hp = oraclepriv::HyperparamsCalc(
      oraclepriv::TheoremFromName(theorem), alpha, beta, epsilon, delta, sigma,
      lambda, d, constant);
  std::cout << "{\n"
            << "  \"theorem\": \"" << theorem << "\",\n"
            << "  \"eta\": " << oraclepriv::FormatDouble(hp.eta) << ",\n"
            << "  \"gamma\": " << oraclepriv::FormatDouble(hp.gamma) << ",\n"
            << "  \"m\": " << hp.m << ",\n"
            << "  \"J\": " << hp.J << ",\n"
            << "  \"n\": " << hp.n << ",\n"
            << "  \"epsilon\": " << oraclepriv::FormatDouble(hp.budget.epsilon)
            << ",\n"
            << "  \"delta\": " << oraclepriv::FormatDouble(hp.budget.delta)
            << "\n}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oracle-efficient semi-private learning experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string kind;
  std::optional<uint64_t> seed_flag;
  int workers = 1;
  bool strict = false;
  bool timings = false;

  CLI::App* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("--config", config_path, "JSON experiment config")->required();
  run->add_option("--seed", seed_flag, "master seed (overrides config)");
  run->add_option("--workers", workers, "worker threads (never affects results)");
  run->add_flag("--timings", timings,
                "record wall-clock runtime_ms (off keeps output byte-reproducible)");

  CLI::App* audit = app.add_subcommand("audit", "run an audit suite");
  audit->add_option("--config", config_path, "JSON experiment config")->required();
  audit
      ->add_option("--kind", kind,
                   "stability | ftpl-tail | psi | rrspm-privacy | "
                   "continuous-privacy | norms | complexity")
      ->required();
  audit->add_option("--seed", seed_flag, "master seed (overrides config)");
  audit->add_option("--workers", workers, "worker threads (never affects results)");
  audit->add_flag("--strict", strict, "exit 2 when any verdict is fail");

  std::string csv_path, out_path;
  oraclepriv::PlotOptions popt;
  CLI::App* plot = app.add_subcommand("plot", "render a results CSV to SVG");
  plot->add_option("csv", csv_path, "input CSV")->required();
  plot->add_option("--x", popt.x, "x column")->required();
  plot->add_option("--y", popt.y, "y column")->required();
  plot->add_option("--group", popt.group, "series column");
  plot->add_option("--out", out_path, "output SVG path")->required();
  plot->add_flag("--logx", popt.log_x, "log-scale x");
  plot->add_flag("--logy", popt.log_y, "log-scale y");

  std::string theorem;
  double alpha = 0.1, beta = 0.05, epsilon = 1.0, delta = 0.0, sigma = 1.0,
         lambda = 1.0, d = 1.0, constant = 1.0;
  CLI::App* params = app.add_subcommand("params", "print theorem hyperparameters");
  params
      ->add_option("--theorem", theorem,
                   "general_full | ftrl_full_gaussian | ftrl_full_laplace | "
                   "rrspm_pure | rrspm_approx")
      ->required();
  params->add_option("--alpha", alpha)->required();
  params->add_option("--beta", beta)->required();
  params->add_option("--epsilon", epsilon)->required();
  params->add_option("--delta", delta);
  params->add_option("--sigma", sigma);
  params->add_option("--lambda", lambda);
  params->add_option("--d", d)->required();
  params->add_option("--constant", constant);

  try {
    app.parse(argc, argv);
    if (run->parsed()) return RunCommand(config_path, seed_flag, workers, timings);
    if (audit->parsed()) {
      return AuditCommand(config_path, kind, seed_flag, workers, strict);
    }
    if (plot->parsed()) return PlotCommand(csv_path, popt, out_path);
    if (params->parsed()) {
      return ParamsCommand(theorem, alpha, beta, epsilon, delta, sigma, lambda, d,
                           constant);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const oraclepriv::PlotError& e) {
    std::cerr << "plot error: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
