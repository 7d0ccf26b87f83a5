#include "lsds/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "lsds/random.hpp"
#include "lsds/version.hpp"

namespace lsds {

namespace {

// Below this deflection an equal-covariance detector cannot beat chance.
constexpr double kDegenerateQ = 1e-10;

bool covariances_match(const GaussianObservationModel& a, const GaussianObservationModel& b) {
  return std::abs(a.cov_scale - b.cov_scale) <=
         1e-9 * std::max(std::abs(a.cov_scale), std::abs(b.cov_scale));
}

struct PointModels {
  AttackStrategy attack;
  GaussianObservationModel null;
  GaussianObservationModel alt;
};

ScenarioParams apply_overrides(const ExperimentConfig& config) {
  ScenarioParams s = config.scenario;
  if (config.overrides.n_m)
    s.mal_array = UlaConfig(*config.overrides.n_m, s.mal_array.spacing, s.mal_array.orientation);
  if (config.overrides.k_m) s.k_mal = *config.overrides.k_m;
  return s;
}

PolarLocation attacker_location(const ExperimentConfig& config, const ScenarioParams& s) {
  if (config.overrides.theta_m) {
    try {
      return PolarLocation(config.overrides.d_m.value_or(s.claimed.d), *config.overrides.theta_m);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(config.source_path + ": bad attacker location: " + std::string(e.what()));
    }
  }
  if (config.road) return optimal_location(*config.road, s.claimed, s.falsehood_radius);
  throw ConfigError(config.source_path +
                    ": attacker location unspecified; set theta_m_rad (and optionally d_m_m) "
                    "or road_theta_rad_list/road_d_m_list");
}

PointModels prepare_point(const ScenarioParams& s, const PolarLocation& loc) {
  AttackStrategy attack = build_attack_at(s, loc);
  GaussianObservationModel null = null_model(s);
  GaussianObservationModel alt = alt_model(s, attack.location, attack.tx_power, attack.beamformer);
  return PointModels{std::move(attack), std::move(null), std::move(alt)};
}

struct MethodPlan {
  bool closed_form = false;
  bool monte_carlo = false;
};

// Resolves the requested method against the covariance regime. The closed
// form only exists when R0 = R1; asking for it explicitly outside that
// regime is a config error, while auto/both quietly fall back to sampling.
MethodPlan plan_methods(RunMethod requested, bool equal_cov, bool mc_default) {
  MethodPlan plan;
  switch (requested) {
    case RunMethod::closed_form:
      if (!equal_cov)
        throw ConfigError(
            "closed form requires matching covariances (equal K-factors and noise with "
            "SNR-matched power); use monte-carlo");
      plan.closed_form = true;
      break;
    case RunMethod::monte_carlo:
      plan.monte_carlo = true;
      break;
    case RunMethod::both:
      plan.closed_form = equal_cov;
      plan.monte_carlo = true;
      break;
    case RunMethod::auto_select:
      if (mc_default || !equal_cov)
        plan.monte_carlo = true;
      else
        plan.closed_form = true;
      break;
  }
  return plan;
}

void add_row(ResultTable& table, std::vector<double> values, std::string tag) {
  table.rows.push_back(std::move(values));
  table.method.push_back(std::move(tag));
}

double binomial_stderr(double p, long n) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

const std::vector<std::string> kSweepColumns = {
    "sweep_value", "alpha",           "alpha_stderr", "beta",
    "beta_stderr", "min_total_error", "mte_stderr"};

// Emits one sweep row per method at one grid point and tracks the argmax of
// the minimum total error per method tag.
struct ArgmaxTracker {
  std::map<std::string, std::pair<double, double>> best;  // tag -> (mte, sweep value)

  void offer(const std::string& tag, double mte, double sweep_value) {
    auto it = best.find(tag);
    if (it == best.end() || mte > it->second.first) best[tag] = {mte, sweep_value};
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [tag, entry] : best)
      j[tag] = {{"min_total_error", entry.first}, {"sweep_value", entry.second}};
    return j;
  }
};

void emit_sweep_point(ResultTable& table, ArgmaxTracker& argmax, const ExperimentConfig& config,
                      const PointModels& pm, const MethodPlan& plan, double sweep_value,
                      long trials, std::uint64_t point_seed) {
  if (plan.closed_form) {
    const double q = deflection(pm.null, pm.alt);
    if (q <= kDegenerateQ) {
      add_row(table, {sweep_value, 0.5, 0.0, 0.5, 0.0, 1.0, 0.0}, "uninformative");
      argmax.offer("uninformative", 1.0, sweep_value);
    } else {
      const double alpha = q_function(std::sqrt(q / 2.0));
      add_row(table, {sweep_value, alpha, 0.0, 1.0 - alpha, 0.0, 2.0 * alpha, 0.0},
              "closed-form");
      argmax.offer("closed-form", 2.0 * alpha, sweep_value);
    }
  }
  if (plan.monte_carlo) {
    const MinErrorEstimate est =
        monte_carlo_min_total_error(pm.null, pm.alt, trials, point_seed, config.workers);
    add_row(table,
            {sweep_value, est.alpha, binomial_stderr(est.alpha, trials), est.beta,
             binomial_stderr(est.beta, trials), est.value, est.std_error},
            "monte-carlo");
    argmax.offer("monte-carlo", est.value, sweep_value);
  }
}

template <typename Mutate>
ResultTable run_parameter_sweep(const ExperimentConfig& config, bool mc_default, Mutate mutate) {
  if (config.sweep.empty()) throw ConfigError(config.source_path + ": empty sweep grid");
  const ScenarioParams base = apply_overrides(config);
  const long trials = config.trials > 0 ? config.trials : 100000;

  ResultTable table;
  table.columns = kSweepColumns;
  ArgmaxTracker argmax;
  for (std::size_t i = 0; i < config.sweep.size(); ++i) {
    ScenarioParams s = base;
    mutate(s, config.sweep[i]);
    const PointModels pm = prepare_point(s, attacker_location(config, s));
    const MethodPlan plan =
        plan_methods(config.method, covariances_match(pm.null, pm.alt), mc_default);
    emit_sweep_point(table, argmax, config, pm, plan, config.sweep[i].display, trials,
                     derive_seed(config.seed, i));
  }
  table.diagnostics["argmax"] = argmax.to_json();
  table.diagnostics["trials"] = trials;
  return table;
}

}  // namespace

ResultTable run_roc(const ExperimentConfig& config) {
  const ScenarioParams base = apply_overrides(config);
  const long trials = config.trials > 0 ? config.trials : 10000;
  if (config.snr_list.empty()) throw ConfigError(config.source_path + ": empty SNR list");

  std::vector<double> thetas = config.theta_m_list;
  double d_m = config.overrides.d_m.value_or(base.claimed.d);
  if (thetas.empty()) {
    if (!config.road)
      throw ConfigError(config.source_path +
                        ": no attacker bearing; set theta_m_rad_list, theta_m_rad, or a road");
    const PolarLocation loc = optimal_location(*config.road, base.claimed, base.falsehood_radius);
    thetas = {loc.theta};
    d_m = loc.d;
  }

  ResultTable table;
  table.columns = {"snr_db", "theta_m_rad", "ln_lambda", "alpha", "alpha_stderr",
                   "beta",   "beta_stderr"};
  std::uint64_t curve_index = 0;
  for (const SweepPoint& snr : config.snr_list) {
    ScenarioParams s = base;
    s.p_leg = s.power_for_snr(snr.linear);
    for (double theta : thetas) {
      const PointModels pm = prepare_point(s, PolarLocation(d_m, theta));
      const bool equal = covariances_match(pm.null, pm.alt);
      MethodPlan plan = plan_methods(config.method, equal, /*mc_default=*/false);
      if (config.method == RunMethod::auto_select) plan.monte_carlo = true;  // roc default: both

      const double pseudo_q = (pm.alt.mean - pm.null.mean).squaredNorm() / pm.null.cov_scale;
      if (plan.closed_form && equal && pseudo_q <= kDegenerateQ) {
        // Attacker statistically identical to the legitimate vehicle: the
        // ROC is the chance diagonal at every threshold.
        for (int i = 0; i < config.roc_points; ++i) {
          const double alpha =
              (1.0 - 1e-4) - (1.0 - 2e-4) * static_cast<double>(i) /
                                 static_cast<double>(config.roc_points - 1);
          add_row(table, {snr.display, theta, 0.0, alpha, 0.0, alpha, 0.0}, "uninformative");
        }
        plan.closed_form = false;
      }
      if (plan.closed_form) {
        const RocCurve curve =
            roc_curve(pm.null, pm.alt, config.roc_points, RocMethod::closed_form);
        for (std::size_t i = 0; i < curve.points.size(); ++i)
          add_row(table,
                  {snr.display, theta, curve.thresholds[i], curve.points[i].first, 0.0,
                   curve.points[i].second, 0.0},
                  "closed-form");
      }
      if (plan.monte_carlo) {
        const RocCurve curve =
            roc_curve(pm.null, pm.alt, config.roc_points, RocMethod::monte_carlo, trials,
                      derive_seed(config.seed, curve_index), config.workers);
        for (std::size_t i = 0; i < curve.points.size(); ++i)
          add_row(table,
                  {snr.display, theta, curve.thresholds[i], curve.points[i].first,
                   curve.alpha_stderr[i], curve.points[i].second, curve.beta_stderr[i]},
                  "monte-carlo");
      }
      ++curve_index;
    }
  }
  table.diagnostics["trials"] = trials;
  return table;
}

ResultTable run_sweep_nm(const ExperimentConfig& config) {
  return run_parameter_sweep(config, /*mc_default=*/false,
                             [](ScenarioParams& s, const SweepPoint& point) {
                               s.mal_array = UlaConfig(static_cast<int>(point.linear),
                                                       s.mal_array.spacing,
                                                       s.mal_array.orientation);
                             });
}

ResultTable run_sweep_km(const ExperimentConfig& config) {
  // K_M != K_L makes R0 != R1, so this sweep samples the general log-LRT at
  // every point to keep one estimator across the grid.
  return run_parameter_sweep(config, /*mc_default=*/true,
                             [](ScenarioParams& s, const SweepPoint& point) {
                               s.k_mal = point.linear;
                             });
}

ResultTable run_sweep_snr(const ExperimentConfig& config) {
  return run_parameter_sweep(config, /*mc_default=*/false,
                             [](ScenarioParams& s, const SweepPoint& point) {
                               s.p_leg = s.power_for_snr(point.linear);
                             });
}

ResultTable run_single(const ExperimentConfig& config) {
  const ScenarioParams s = apply_overrides(config);
  const PointModels pm = prepare_point(s, attacker_location(config, s));
  const bool equal = covariances_match(pm.null, pm.alt);
  const long trials = config.trials > 0 ? config.trials : 100000;
  MethodPlan plan = plan_methods(config.method, equal, /*mc_default=*/false);

  ResultTable table;
  table.columns = kSweepColumns;
  table.diagnostics["d_m"] = pm.attack.location.d;
  table.diagnostics["theta_m_rad"] = pm.attack.location.theta;
  table.diagnostics["p_m_star"] = pm.attack.tx_power;
  table.diagnostics["phi_star_rad"] = pm.attack.beam_direction;
  table.diagnostics["kl_divergence"] = kl_divergence(pm.alt, pm.null);
  table.diagnostics["equal_covariances"] = equal;
  table.diagnostics["trials"] = trials;

  if (plan.closed_form) {
    const double q = deflection(pm.null, pm.alt);
    table.diagnostics["deflection"] = q;
    if (q <= kDegenerateQ) {
      table.diagnostics["uninformative"] = true;
      table.diagnostics["min_total_error"] = 1.0;
      add_row(table, {config.ln_lambda, 0.5, 0.0, 0.5, 0.0, 1.0, 0.0}, "uninformative");
    } else {
      const DetectionMetrics m = closed_form_rates(q, config.ln_lambda);
      table.diagnostics["min_total_error"] = min_total_error(q);
      add_row(table,
              {config.ln_lambda, m.alpha, 0.0, m.beta, 0.0, min_total_error(q), 0.0},
              "closed-form");
    }
  }
  if (plan.monte_carlo) {
    const DetectionMetrics m = monte_carlo_rates(pm.null, pm.alt, config.ln_lambda, trials,
                                                 derive_seed(config.seed, 0), config.workers);
    const MinErrorEstimate est = monte_carlo_min_total_error(pm.null, pm.alt, trials,
                                                             derive_seed(config.seed, 1),
                                                             config.workers);
    table.diagnostics["min_total_error_mc"] = est.value;
    add_row(table,
            {config.ln_lambda, m.alpha, m.alpha_stderr, m.beta, m.beta_stderr, est.value,
             est.std_error},
            "monte-carlo");
  }
  return table;
}

ResultTable run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::roc: return run_roc(config);
    case ExperimentKind::sweep_nm: return run_sweep_nm(config);
    case ExperimentKind::sweep_km: return run_sweep_km(config);
    case ExperimentKind::sweep_snr: return run_sweep_snr(config);
    case ExperimentKind::single_point: return run_single(config);
  }
  throw ConfigError("unhandled experiment kind");
}

void write_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << table.columns[c] << ",";
  out << "method\n";
  char cell[64];
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (double v : table.rows[r]) {
      std::snprintf(cell, sizeof(cell), "%.12g", v);
      out << cell << ",";
    }
    out << table.method[r] << "\n";
  }
}

void write_metadata(const ResultTable& table, const ExperimentConfig& config,
                    double runtime_seconds, const std::string& csv_path) {
  nlohmann::json meta;
  meta["tool"] = "lsds-sim";
  meta["version"] = kVersion;
  meta["kind"] = to_string(config.kind);
  meta["config_path"] = config.source_path;
  meta["config_hash"] = config.config_hash;
  meta["seed"] = config.seed;
  meta["workers"] = config.workers;
  meta["rows"] = table.rows.size();
  meta["runtime_seconds"] = runtime_seconds;
  meta["diagnostics"] = table.diagnostics;
  std::ofstream out(csv_path + ".meta.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + csv_path + ".meta.json'");
  out << meta.dump(2) << "\n";
}

}  // namespace lsds
