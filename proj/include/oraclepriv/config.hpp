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

#ifndef ORACLEPRIV_CONFIG_H_
#define ORACLEPRIV_CONFIG_H_

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "oraclepriv/core.hpp"
#include "oraclepriv/dists.hpp"
#include "oraclepriv/learners.hpp"
#include "oraclepriv/mech.hpp"

namespace oraclepriv {

// Config problems carry the offending field so the CLI can print an exact
// diagnostic and exit 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Algorithm { kFtpl, kFtrlGaussian, kFtrlLaplace, kRrspmLaplace, kRrspmGaussian };

inline Algorithm AlgorithmFromName(const std::string& name) {
  if (name == "ftpl") return Algorithm::kFtpl;
  if (name == "ftrl_gaussian") return Algorithm::kFtrlGaussian;
  if (name == "ftrl_laplace") return Algorithm::kFtrlLaplace;
  if (name == "rrspm_laplace") return Algorithm::kRrspmLaplace;
  if (name == "rrspm_gaussian") return Algorithm::kRrspmGaussian;
  throw ConfigError("algorithm: unknown value '" + name + "'");
}

inline const char* AlgorithmName(Algorithm a) {
  switch (a) {
    case Algorithm::kFtpl: return "ftpl";
    case Algorithm::kFtrlGaussian: return "ftrl_gaussian";
    case Algorithm::kFtrlLaplace: return "ftrl_laplace";
    case Algorithm::kRrspmLaplace: return "rrspm_laplace";
    case Algorithm::kRrspmGaussian: return "rrspm_gaussian";
  }
  return "unknown";
}

// Per-kind knobs for the audit subcommand.
struct AuditConfig {
  long trials = 10000;
  int instances = 50;
  std::vector<double> rho_grid = {0.3, 0.5, 0.8};
  double epsilon_mechanism = 0.0;  // 0: same as the audited budget
  int bins = 16;
  std::vector<size_t> norm_m_values = {16, 64, 256};
  double norm_beta = 0.05;
  double slack_constant = 8.0;
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kRrspmLaplace;
  FunctionClassDesc function_class;
  BaseDist base;
  SmoothTarget target;
  LabelModel labels;
  LossKind loss = LossKind::kZeroOne;
  Hyperparams hyperparams;
  double anchor_fraction = 0.0;
  std::optional<SweepSpec> sweep;
  long trials = 1;
  size_t test_n = 2000;
  std::optional<uint64_t> seed;
  std::string output_dir = "out";
  AuditConfig audit;
};

namespace internal {

using nlohmann::json;

inline const json& Require(const json& j, const std::string& key,
                           const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + key + ": missing required field");
  return j.at(key);
}

inline double RequireNumber(const json& j, const std::string& key,
                            const std::string& path) {
  const json& v = Require(j, key, path);
  if (!v.is_number()) throw ConfigError(path + key + ": expected a number");
  return v.get<double>();
}

inline double OptionalNumber(const json& j, const std::string& key, double dflt) {
  if (!j.contains(key)) return dflt;
  return j.at(key).get<double>();
}

inline std::string RequireString(const json& j, const std::string& key,
                                 const std::string& path) {
  const json& v = Require(j, key, path);
  if (!v.is_string()) throw ConfigError(path + key + ": expected a string");
  return v.get<std::string>();
}

inline FunctionClassDesc ParseClass(const json& j) {
  std::string kind = RequireString(j, "kind", "function_class.");
  if (kind == "threshold1d") return Threshold1dClass();
  int dim = static_cast<int>(RequireNumber(j, "dim", "function_class."));
  if (kind == "halfspace") return HalfspaceClass(dim);
  if (kind == "linear_ball") return LinearBallClass(dim);
  throw ConfigError("function_class.kind: unknown value '" + kind + "'");
}

inline BaseDist ParseBase(const json& j) {
  std::string kind = RequireString(j, "kind", "base.");
  if (kind == "uniform_interval") return UniformInterval();
  if (kind == "uniform_grid") {
    return UniformGrid(static_cast<int>(RequireNumber(j, "atoms", "base.")));
  }
  if (kind == "uniform_ball") {
    return UniformBall(static_cast<int>(RequireNumber(j, "dim", "base.")));
  }
  throw ConfigError("base.kind: unknown value '" + kind + "'");
}

inline SmoothTarget ParseTarget(const json& j, const BaseDist& base) {
  std::vector<double> weights;
  if (j.contains("weights")) {
    for (const auto& w : j.at("weights")) weights.push_back(w.get<double>());
  } else {
    weights = {1.0};
  }
  double sigma = OptionalNumber(j, "sigma", 1.0);
  try {
    return MakeSmoothTarget(base, weights, sigma);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("target: ") + e.what());
  }
}

inline LabelModel ParseLabels(const json& j, const FunctionClassDesc& cls) {
  std::string kind = RequireString(j, "kind", "labels.");
  if (kind == "realizable") {
    const json& params = Require(j, "predictor_params", "labels.");
    std::vector<double> p;
    for (const auto& x : params) p.push_back(x.get<double>());
    if (p.size() != ExpectedParamCount(cls)) {
      throw ConfigError("labels.predictor_params: wrong parameter count for class");
    }
    return RealizableLabels(Predictor{cls, p}, OptionalNumber(j, "flip_rate", 0.0));
  }
  if (kind == "agnostic_linear") {
    const json& params = Require(j, "wstar", "labels.");
    std::vector<double> w;
    for (const auto& x : params) w.push_back(x.get<double>());
    return AgnosticLinearLabels(w, OptionalNumber(j, "noise_sd", 0.0));
  }
  throw ConfigError("labels.kind: unknown value '" + kind + "'");
}

inline LossKind ParseLoss(const std::string& name) {
  if (name == "zero_one") return LossKind::kZeroOne;
  if (name == "absolute") return LossKind::kAbsolute;
  if (name == "squared") return LossKind::kSquared;
  if (name == "hinge_clipped") return LossKind::kHingeClipped;
  throw ConfigError("loss: unknown value '" + name + "'");
}

inline Hyperparams ParseHyperparams(const json& j) {
  Hyperparams hp;
  if (j.contains("theorem")) {
    std::string theorem = RequireString(j, "theorem", "hyperparams.");
    hp = HyperparamsCalc(TheoremFromName(theorem),
                         RequireNumber(j, "alpha", "hyperparams."),
                         RequireNumber(j, "beta", "hyperparams."),
                         RequireNumber(j, "epsilon", "hyperparams."),
                         OptionalNumber(j, "delta", 0.0),
                         OptionalNumber(j, "sigma", 1.0),
                         OptionalNumber(j, "lambda", 1.0),
                         RequireNumber(j, "d", "hyperparams."),
                         OptionalNumber(j, "constant", 1.0));
    if (j.contains("gamma")) hp.gamma = j.at("gamma").get<double>();
    if (j.contains("eta")) hp.eta = j.at("eta").get<double>();
    return hp;
  }
  hp.eta = OptionalNumber(j, "eta", 0.0);
  hp.gamma = OptionalNumber(j, "gamma", 0.0);
  hp.m = static_cast<size_t>(RequireNumber(j, "m", "hyperparams."));
  hp.J = static_cast<size_t>(OptionalNumber(j, "J", 1));
  hp.n = static_cast<size_t>(RequireNumber(j, "n", "hyperparams."));
  hp.budget.epsilon = OptionalNumber(j, "epsilon", 1.0);
  hp.budget.delta = OptionalNumber(j, "delta", 0.0);
  hp.alpha = OptionalNumber(j, "alpha", 0.1);
  hp.beta = OptionalNumber(j, "beta", 0.05);
  hp.sigma = OptionalNumber(j, "sigma", 1.0);
  hp.lambda = OptionalNumber(j, "lambda", 1.0);
  hp.d = OptionalNumber(j, "d", 1.0);
  if (hp.m < 1) throw ConfigError("hyperparams.m: must be at least 1");
  if (hp.n < 1) throw ConfigError("hyperparams.n: must be at least 1");
  if (hp.J < 1) throw ConfigError("hyperparams.J: must be at least 1");
  return hp;
}

}  // namespace internal

inline ExperimentConfig ParseConfig(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("json parse error: ") + e.what());
  }
  using internal::OptionalNumber;
  using internal::Require;
  using internal::RequireNumber;
  using internal::RequireString;
  if (static_cast<int>(RequireNumber(j, "schema_version", "")) != 1) {
    throw ConfigError("schema_version: only version 1 is supported");
  }
  ExperimentConfig cfg;
  cfg.algorithm = AlgorithmFromName(RequireString(j, "algorithm", ""));
  cfg.function_class = internal::ParseClass(Require(j, "function_class", ""));
  cfg.base = internal::ParseBase(Require(j, "base", ""));
  cfg.target = internal::ParseTarget(
      j.contains("target") ? j.at("target") : nlohmann::json::object(), cfg.base);
  cfg.labels = internal::ParseLabels(Require(j, "labels", ""), cfg.function_class);
  bool binary = cfg.function_class.output_range == OutputRange::kBinary;
  cfg.loss = j.contains("loss")
                 ? internal::ParseLoss(j.at("loss").get<std::string>())
                 : (binary ? LossKind::kZeroOne : LossKind::kAbsolute);
  cfg.hyperparams = internal::ParseHyperparams(Require(j, "hyperparams", ""));
  cfg.anchor_fraction = OptionalNumber(j, "anchor_fraction", 0.0);
  if (cfg.anchor_fraction < 0.0 || cfg.anchor_fraction >= 1.0) {
    throw ConfigError("anchor_fraction: must lie in [0, 1)");
  }
  bool is_rrspm = cfg.algorithm == Algorithm::kRrspmLaplace ||
                  cfg.algorithm == Algorithm::kRrspmGaussian;
  if (is_rrspm && cfg.anchor_fraction > 0.0) {
    throw ConfigError("anchor_fraction: rrspm takes an unanchored public sample");
  }
  if (is_rrspm && !binary) {
    throw ConfigError("algorithm: rrspm requires a binary function class");
  }
  if (!is_rrspm && cfg.function_class.kind != ClassKind::kLinearBall) {
    throw ConfigError("algorithm: ftpl/ftrl require the linear_ball class");
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    SweepSpec sweep;
    sweep.parameter = RequireString(s, "parameter", "sweep.");
    const nlohmann::json& values = Require(s, "values", "sweep.");
    if (!values.is_array() || values.empty()) {
      throw ConfigError("sweep.values: expected a nonempty array");
    }
    for (const auto& v : values) sweep.values.push_back(v.get<double>());
    static const char* kSweepable[] = {"n", "m", "eta", "gamma", "J", "epsilon", "delta"};
    bool ok = false;
    for (const char* p : kSweepable) ok = ok || sweep.parameter == p;
    if (!ok) throw ConfigError("sweep.parameter: '" + sweep.parameter + "' is not sweepable");
    cfg.sweep = std::move(sweep);
  }
  cfg.trials = static_cast<long>(OptionalNumber(j, "trials", 1));
  if (cfg.trials < 1) throw ConfigError("trials: must be at least 1");
  cfg.test_n = static_cast<size_t>(OptionalNumber(j, "test_n", 2000));
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  cfg.output_dir = j.contains("output_dir") ? j.at("output_dir").get<std::string>() : "out";
  if (j.contains("audit")) {
    const auto& a = j.at("audit");
    cfg.audit.trials = static_cast<long>(OptionalNumber(a, "trials", 10000));
    cfg.audit.instances = static_cast<int>(OptionalNumber(a, "instances", 50));
    cfg.audit.epsilon_mechanism = OptionalNumber(a, "epsilon_mechanism", 0.0);
    cfg.audit.bins = static_cast<int>(OptionalNumber(a, "bins", 16));
    cfg.audit.norm_beta = OptionalNumber(a, "norm_beta", 0.05);
    cfg.audit.slack_constant = OptionalNumber(a, "slack_constant", 8.0);
    if (a.contains("rho_grid")) {
      cfg.audit.rho_grid.clear();
      for (const auto& r : a.at("rho_grid")) cfg.audit.rho_grid.push_back(r.get<double>());
    }
    if (a.contains("norm_m_values")) {
      cfg.audit.norm_m_values.clear();
      for (const auto& m : a.at("norm_m_values")) {
        cfg.audit.norm_m_values.push_back(m.get<size_t>());
      }
    }
  }
  return cfg;
}

inline ExperimentConfig LoadConfigFile(const std::string& path, std::string* raw_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (raw_out != nullptr) *raw_out = ss.str();
  return ParseConfig(ss.str());
}

// Applies a sweep value to the resolved hyperparameters.
inline Hyperparams ApplySweep(const Hyperparams& base, const std::string& parameter,
                              double value) {
  Hyperparams hp = base;
  if (parameter == "n") {
    hp.n = static_cast<size_t>(value);
  } else if (parameter == "m") {
    hp.m = static_cast<size_t>(value);
  } else if (parameter == "eta") {
    hp.eta = value;
  } else if (parameter == "gamma") {
    hp.gamma = value;
  } else if (parameter == "J") {
    hp.J = static_cast<size_t>(value);
  } else if (parameter == "epsilon") {
    hp.budget.epsilon = value;
  } else if (parameter == "delta") {
    hp.budget.delta = value;
  } else {
    throw ConfigError("sweep.parameter: '" + parameter + "' is not sweepable");
  }
  return hp;
}

}  // namespace oraclepriv

#endif  // ORACLEPRIV_CONFIG_H_
