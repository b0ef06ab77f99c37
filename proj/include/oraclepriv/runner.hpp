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

#ifndef ORACLEPRIV_RUNNER_H_
#define ORACLEPRIV_RUNNER_H_

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "oraclepriv/audit.hpp"
#include "oraclepriv/config.hpp"
#include "oraclepriv/core.hpp"
#include "oraclepriv/dists.hpp"
#include "oraclepriv/learners.hpp"
#include "oraclepriv/oracle.hpp"
#include "oraclepriv/rng.hpp"

namespace oraclepriv {

// Locale-independent shortest round-trip formatting; CSV cells must be
// byte-stable across runs.
inline std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

struct ResultRow {
  long trial = 0;
  std::string algorithm;
  size_t n = 0;
  size_t m = 0;
  double eta = 0.0;
  double gamma = 0.0;
  size_t J = 1;
  double epsilon = 0.0;
  double delta = 0.0;
  double sigma = 1.0;
  double excess_risk = 0.0;
  double fbar_risk = 0.0;
  int oracle_calls = 0;
  long runtime_ms = 0;
  uint64_t seed = 0;
};

inline const char* kResultHeader =
    "trial,algorithm,n,m,eta,gamma,J,epsilon,delta,sigma,excess_risk,"
    "fbar_risk,oracle_calls,runtime_ms,seed";

inline std::string FormatRow(const ResultRow& r) {
  std::string s;
  s += std::to_string(r.trial);
  s += ',';
  s += r.algorithm;
  s += ',';
  s += std::to_string(r.n);
  s += ',';
  s += std::to_string(r.m);
  s += ',';
  s += FormatDouble(r.eta);
  s += ',';
  s += FormatDouble(r.gamma);
  s += ',';
  s += std::to_string(r.J);
  s += ',';
  s += FormatDouble(r.epsilon);
  s += ',';
  s += FormatDouble(r.delta);
  s += ',';
  s += FormatDouble(r.sigma);
  s += ',';
  s += FormatDouble(r.excess_risk);
  s += ',';
  s += FormatDouble(r.fbar_risk);
  s += ',';
  s += std::to_string(r.oracle_calls);
  s += ',';
  s += std::to_string(r.runtime_ms);
  s += ',';
  s += std::to_string(r.seed);
  return s;
}

namespace internal {

// Index-addressed parallel loop; results land in preallocated slots so the
// outcome is independent of scheduling and worker count.
inline void ParallelFor(size_t count, int workers,
                        const std::function<void(size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  int k = std::min<int>(workers, static_cast<int>(count));
  threads.reserve(static_cast<size_t>(k));
  for (int w = 0; w < k; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline PublicSample BuildPublic(const ExperimentConfig& cfg, const Hyperparams& hp,
                                Rng rng) {
  PublicSample pub = DrawPublic(cfg.base, hp.m, rng);
  if (cfg.anchor_fraction > 0.0) pub = AnchorAugment(pub, cfg.anchor_fraction);
  return pub;
}

inline LearnerOutput RunAlgorithm(const ExperimentConfig& cfg, const Hyperparams& hp,
                                  const LabeledDataset& data,
                                  const PublicSample& pub, Rng rng) {
  switch (cfg.algorithm) {
    case Algorithm::kFtpl:
      return FtplLearn(data, pub, cfg.function_class, cfg.loss, hp,
                       NoiseSpec{NoiseKind::kGaussianStd}, rng);
    case Algorithm::kFtrlGaussian:
      return FtrlLearn(data, pub, cfg.function_class, cfg.loss, hp,
                       NoiseSpec{NoiseKind::kGaussianStd}, rng);
    case Algorithm::kFtrlLaplace:
      return FtrlLearn(data, pub, cfg.function_class, cfg.loss, hp,
                       NoiseSpec{NoiseKind::kLaplaceStd}, rng);
    case Algorithm::kRrspmLaplace:
      return RrspmLearn(data, pub, cfg.function_class, hp.budget,
                        NoiseKind::kLaplaceStd, rng);
    case Algorithm::kRrspmGaussian:
      return RrspmLearn(data, pub, cfg.function_class, hp.budget,
                        NoiseKind::kGaussianStd, rng);
  }
  throw ConfigError("algorithm: unsupported");
}

}  // namespace internal

struct RunOutput {
  std::vector<ResultRow> rows;
  std::string results_csv_path;
};

// Runs the configured experiment over (sweep value, trial) cells.  Every RNG
// stream derives from hash(master seed, sweep index, trial, role), so any
// subset of rows is reproducible in isolation and the worker count never
// affects the output bytes.
inline RunOutput RunExperiment(const ExperimentConfig& cfg, uint64_t master_seed,
                               int workers, const std::string& raw_config,
                               bool timings = false) {
  std::vector<double> sweep_values = {0.0};
  std::string sweep_param;
  if (cfg.sweep) {
    sweep_values = cfg.sweep->values;
    sweep_param = cfg.sweep->parameter;
  }
  size_t cells = sweep_values.size() * static_cast<size_t>(cfg.trials);
  std::vector<ResultRow> rows(cells);
  internal::ParallelFor(cells, workers, [&](size_t cell) {
    size_t sweep_idx = cell / static_cast<size_t>(cfg.trials);
    long trial = static_cast<long>(cell % static_cast<size_t>(cfg.trials));
    Hyperparams hp = cfg.hyperparams;
    if (cfg.sweep) hp = ApplySweep(hp, sweep_param, sweep_values[sweep_idx]);
    auto t0 = std::chrono::steady_clock::now();
    Rng pub_rng(StreamKey(master_seed, sweep_idx, static_cast<uint64_t>(trial), "public_data"));
    Rng data_rng(StreamKey(master_seed, sweep_idx, static_cast<uint64_t>(trial), "private_data"));
    Rng learner_rng(StreamKey(master_seed, sweep_idx, static_cast<uint64_t>(trial), "learner"));
    Rng eval_rng(StreamKey(master_seed, sweep_idx, static_cast<uint64_t>(trial), "evaluation"));
    PublicSample pub = internal::BuildPublic(cfg, hp, pub_rng);
    LabeledDataset data = DrawPrivate(cfg.target, cfg.labels, hp.n, data_rng);
    LearnerOutput out = internal::RunAlgorithm(cfg, hp, data, pub, learner_rng);
    // Excess risk of fhat and fbar against a non-private ERM baseline fit on
    // an independent sample of 10x the test size.
    LabeledDataset test = DrawPrivate(cfg.target, cfg.labels, cfg.test_n,
                                      eval_rng.Substream(RoleTag("test_data")));
    LabeledDataset train = DrawPrivate(cfg.target, cfg.labels, 10 * cfg.test_n,
                                       eval_rng.Substream(RoleTag("baseline_data")));
    ObjectiveSpec base_obj;
    base_obj.loss_terms = internal::PrivateLossTerms(train, cfg.loss);
    Predictor fbest = Erm(cfg.function_class, base_obj).minimizer;
    double risk_hat = 0.0, risk_bar = 0.0, risk_best = 0.0;
    for (const auto& [x, y] : test.points) {
      risk_hat += LossValue(cfg.loss, Evaluate(out.fhat, x), y);
      risk_bar += LossValue(cfg.loss, Evaluate(out.fbar, x), y);
      risk_best += LossValue(cfg.loss, Evaluate(fbest, x), y);
    }
    double tn = static_cast<double>(test.n());
    auto t1 = std::chrono::steady_clock::now();
    ResultRow& row = rows[cell];
    row.trial = trial;
    row.algorithm = AlgorithmName(cfg.algorithm);
    row.n = hp.n;
    row.m = hp.m;
    row.eta = hp.eta;
    row.gamma = hp.gamma;
    row.J = hp.J;
    row.epsilon = hp.budget.epsilon;
    row.delta = hp.budget.delta;
    row.sigma = cfg.target.sigma;
    row.excess_risk = (risk_hat - risk_best) / tn;
    row.fbar_risk = (risk_bar - risk_best) / tn;
    row.oracle_calls = out.oracle_calls;
    row.runtime_ms = timings
                         ? std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
                         : 0;
    row.seed = StreamKey(master_seed, sweep_idx, static_cast<uint64_t>(trial), "row");
  });

  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  RunOutput out;
  out.rows = std::move(rows);
  out.results_csv_path = (fs::path(cfg.output_dir) / "results.csv").string();
  {
    std::ofstream csv(out.results_csv_path, std::ios::binary);
    csv << kResultHeader << '\n';
    for (const auto& r : out.rows) csv << FormatRow(r) << '\n';
  }
  {
    std::ofstream echo(fs::path(cfg.output_dir) / "config_echo.json", std::ios::binary);
    echo << raw_config;
  }
  {
    std::ofstream manifest(fs::path(cfg.output_dir) / "manifest.json", std::ios::binary);
    manifest << "{\n  \"schema_version\": 1,\n  \"master_seed\": " << master_seed
             << ",\n  \"rows\": " << out.rows.size()
             << ",\n  \"results\": \"results.csv\"\n}\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Audit driver: builds per-kind instance families from the config and runs
// the audit module over them.
// ---------------------------------------------------------------------------

struct AuditRow {
  std::string kind;
  std::string instance_id;
  AuditReport report;
};

inline const char* kAuditHeader =
    "kind,instance_id,estimate,ci_low,ci_high,bound,trials,verdict";

inline std::string FormatAuditRow(const AuditRow& r) {
  std::string s;
  s += r.kind;
  s += ',';
  s += r.instance_id;
  s += ',';
  s += FormatDouble(r.report.estimate);
  s += ',';
  s += FormatDouble(r.report.ci_low);
  s += ',';
  s += FormatDouble(r.report.ci_high);
  s += ',';
  s += FormatDouble(r.report.bound);
  s += ',';
  s += std::to_string(r.report.trials);
  s += ',';
  s += VerdictName(r.report.verdict);
  return s;
}

namespace internal {

inline NeighborPair DrawNeighborPair(const ExperimentConfig& cfg,
                                     const Hyperparams& hp, Rng rng) {
  LabeledDataset base = DrawPrivate(cfg.target, cfg.labels, hp.n,
                                    rng.Substream(RoleTag("pair_base")));
  Rng swap_rng = rng.Substream(RoleTag("pair_swap"));
  size_t index = static_cast<size_t>(
      swap_rng.UniformInt(0, static_cast<int64_t>(base.n()) - 1));
  FeaturePoint x = DrawFrom(cfg.base, swap_rng);
  double y;
  if (cfg.function_class.output_range == OutputRange::kBinary) {
    y = swap_rng.NextU64() & 1 ? 1.0 : 0.0;
  } else {
    y = swap_rng.Uniform() * 2.0 - 1.0;
  }
  return MakeNeighborPair(base, index, std::move(x), y);
}

}  // namespace internal

inline std::vector<AuditRow> RunAudit(const ExperimentConfig& cfg,
                                      const std::string& kind,
                                      uint64_t master_seed, int workers) {
  std::vector<AuditRow> out;
  const Hyperparams& hp = cfg.hyperparams;
  Rng root(StreamKey(master_seed, 0, 0, "audit_" + kind));
  auto add = [&out, &kind](const std::string& instance, AuditReport report) {
    out.push_back(AuditRow{kind, instance, std::move(report)});
  };

  if (kind == "stability") {
    int instances = cfg.audit.instances;
    std::vector<AuditReport> reports(static_cast<size_t>(instances));
    internal::ParallelFor(static_cast<size_t>(instances), workers, [&](size_t i) {
      Rng rng = root.Substream(RoleTag("instance"), i);
      NeighborPair pair = internal::DrawNeighborPair(cfg, hp, rng);
      PublicSample pub = internal::BuildPublic(cfg, hp, rng.Substream(RoleTag("pub")));
      reports[i] = FtrlStabilityCheck(pair, pub, cfg.function_class, cfg.loss, hp.eta);
    });
    for (int i = 0; i < instances; ++i) {
      add("pair_" + std::to_string(i), reports[static_cast<size_t>(i)]);
    }
  } else if (kind == "ftpl-tail") {
    Rng rng = root.Substream(RoleTag("instance"), 0);
    NeighborPair pair = internal::DrawNeighborPair(cfg, hp, rng);
    PublicSample pub = internal::BuildPublic(cfg, hp, rng.Substream(RoleTag("pub")));
    std::vector<AuditReport> reports = FtplTailCheck(
        pair, pub, cfg.function_class, cfg.loss, hp.eta, cfg.audit.rho_grid,
        static_cast<int>(cfg.audit.trials), rng.Substream(RoleTag("mc")));
    for (size_t i = 0; i < reports.size(); ++i) {
      add("rho_" + FormatDouble(cfg.audit.rho_grid[i]), reports[i]);
    }
  } else if (kind == "psi") {
    Rng rng = root.Substream(RoleTag("instance"), 0);
    NeighborPair pair = internal::DrawNeighborPair(cfg, hp, rng);
    PublicSample pub = DrawPublic(cfg.base, hp.m, rng.Substream(RoleTag("pub")));
    std::vector<uint8_t> ytilde(pub.m_total());
    Rng label_rng = rng.Substream(RoleTag("ytilde"));
    for (auto& y : ytilde) y = label_rng.NextU64() & 1 ? 1 : 0;
    add("coupling", PsiCouplingTest(pair, pub, ytilde, cfg.function_class,
                                    static_cast<int>(cfg.audit.trials),
                                    hp.budget.epsilon, rng.Substream(RoleTag("mc"))));
  } else if (kind == "rrspm-privacy") {
    Rng rng = root.Substream(RoleTag("instance"), 0);
    LabeledDataset base = DrawPrivate(cfg.target, cfg.labels, hp.n,
                                      rng.Substream(RoleTag("pair_base")));
    PublicSample pub = DrawPublic(cfg.base, hp.m, rng.Substream(RoleTag("pub")));
    RrspmAuditOptions opt;
    opt.epsilon_audit = hp.budget.epsilon;
    opt.epsilon_mechanism = cfg.audit.epsilon_mechanism > 0.0
                                ? cfg.audit.epsilon_mechanism
                                : hp.budget.epsilon;
    opt.delta = hp.budget.delta;
    opt.noise_kind = cfg.algorithm == Algorithm::kRrspmGaussian
                         ? NoiseKind::kGaussianStd
                         : NoiseKind::kLaplaceStd;
    opt.trials = cfg.audit.trials;
    // Worst-case instance: candidate replacements on a grid, pseudo-labels
    // searched, scored under the mechanism's own noise.
    std::vector<FeaturePoint> candidates;
    Rng cand_rng = rng.Substream(RoleTag("candidates"));
    for (int i = 0; i < 16; ++i) candidates.push_back(DrawFrom(cfg.base, cand_rng));
    double mech_scale = RrspmNoiseScale(
        pub.m_total(), PrivacyBudget{opt.epsilon_mechanism, opt.delta},
        opt.noise_kind, opt.gaussian_constant);
    RrspmAuditInstance instance = WorstCaseRrspmInstance(
        base, candidates, pub, cfg.function_class, mech_scale, opt.noise_kind,
        rng.Substream(RoleTag("worst_case")));
    std::vector<AuditReport> reports =
        RrspmPrivacyAudit(instance.pair, pub, instance.ytilde, cfg.function_class,
                          opt, rng.Substream(RoleTag("mc")));
    for (size_t i = 0; i < reports.size(); ++i) {
      add(reports[i].quantity, reports[i]);
    }
  } else if (kind == "continuous-privacy") {
    Rng rng = root.Substream(RoleTag("instance"), 0);
    NeighborPair pair = internal::DrawNeighborPair(cfg, hp, rng);
    PublicSample pub = internal::BuildPublic(cfg, hp, rng.Substream(RoleTag("pub")));
    auto learner = [&](const LabeledDataset& data, Rng r) {
      return internal::RunAlgorithm(cfg, hp, data, pub, r);
    };
    NoiseSpec spec{cfg.algorithm == Algorithm::kFtrlLaplace
                       ? NoiseKind::kLaplaceStd
                       : NoiseKind::kGaussianStd};
    double rho = 2.0 / std::sqrt(hp.eta * static_cast<double>(hp.n));
    double budget = PrivacyFromStability(pub.m_total(), hp.gamma, rho,
                                         spec.kind == NoiseKind::kGaussianStd
                                             ? std::max(hp.budget.delta, 1e-9)
                                             : 0.0,
                                         spec);
    add("epsilon_lower_bound",
        ContinuousPrivacyAudit(learner, pair, pub, cfg.audit.bins,
                               static_cast<int>(cfg.audit.trials), budget,
                               rng.Substream(RoleTag("mc"))));
  } else if (kind == "norms") {
    NormComparisonOptions opt;
    opt.beta = cfg.audit.norm_beta;
    opt.slack_constant = cfg.audit.slack_constant;
    for (size_t m : cfg.audit.norm_m_values) {
      Rng rng = root.Substream(RoleTag("norm_m"), m);
      add("m_" + std::to_string(m),
          NormComparisonCheck(cfg.function_class, cfg.base, m,
                              static_cast<int>(cfg.audit.trials), opt, rng));
    }
  } else if (kind == "complexity") {
    Rng rng = root.Substream(RoleTag("instance"), 0);
    PublicSample pub = internal::BuildPublic(cfg, hp, rng.Substream(RoleTag("pub")));
    add("estimate",
        GaussianComplexityEstimate(cfg.function_class, pub,
                                   static_cast<int>(cfg.audit.trials),
                                   rng.Substream(RoleTag("mc"))));
  } else {
    throw ConfigError("audit kind: unknown value '" + kind + "'");
  }
  return out;
}

inline std::string WriteAuditCsv(const ExperimentConfig& cfg,
                                 const std::vector<AuditRow>& rows) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  std::string path = (fs::path(cfg.output_dir) / "audit.csv").string();
  std::ofstream csv(path, std::ios::binary);
  csv << kAuditHeader << '\n';
  for (const auto& r : rows) csv << FormatAuditRow(r) << '\n';
  return path;
}

}  // namespace oraclepriv

#endif  // ORACLEPRIV_RUNNER_H_
