#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "lsds/experiments.hpp"

namespace lsds {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(where + ": empty value");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw ConfigError(where + ": cannot parse number '" + t + "'");
  return v;
}

// Plain radians, or a multiple of pi with a "pi" suffix ("0.45pi", "pi").
double parse_angle(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    const std::string head = trim(t.substr(0, t.size() - 2));
    if (head.empty()) return kPi;
    if (head == "-") return -kPi;
    return parse_number(head, where) * kPi;
  }
  return parse_number(t, where);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct RawEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

class KeyValueFile {
 public:
  KeyValueFile(const std::string& text, std::string name) : name_(std::move(name)) {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(at(number) + ": expected 'key = value', got '" + line + "'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError(at(number) + ": missing key");
      if (entries_.count(key))
        throw ConfigError(at(number) + ": duplicate key '" + key + "' (first at line " +
                          std::to_string(entries_[key].line) + ")");
      entries_[key] = RawEntry{value, number, false};
    }
  }

  bool has(const std::string& key) {
    auto it = entries_.find(key);
    return it != entries_.end();
  }

  std::string raw(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(name_ + ": missing required field '" + key + "'");
    it->second.used = true;
    return it->second.value;
  }

  std::string where(const std::string& key) {
    auto it = entries_.find(key);
    return it == entries_.end() ? name_ : at(it->second.line) + " ('" + key + "')";
  }

  double number(const std::string& key) { return parse_number(raw(key), where(key)); }
  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  double angle(const std::string& key) { return parse_angle(raw(key), where(key)); }
  double angle_or(const std::string& key, double fallback) {
    return has(key) ? angle(key) : fallback;
  }

  double linear_from_db(const std::string& key) { return db_to_linear(number(key)); }
  double linear_from_db_or(const std::string& key, double fallback_db) {
    return db_to_linear(number_or(key, fallback_db));
  }

  long integer(const std::string& key) {
    const double v = number(key);
    if (v != std::floor(v)) throw ConfigError(where(key) + ": expected an integer");
    return static_cast<long>(v);
  }
  long integer_or(const std::string& key, long fallback) {
    return has(key) ? integer(key) : fallback;
  }

  std::vector<std::string> items(const std::string& key) {
    std::vector<std::string> out;
    std::stringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (out.empty() || (out.size() == 1 && out[0].empty()))
      throw ConfigError(where(key) + ": empty list");
    return out;
  }

  std::vector<double> number_list(const std::string& key) {
    std::vector<double> out;
    for (const auto& item : items(key)) out.push_back(parse_number(item, where(key)));
    return out;
  }

  std::vector<double> angle_list(const std::string& key) {
    std::vector<double> out;
    for (const auto& item : items(key)) out.push_back(parse_angle(item, where(key)));
    return out;
  }

  void finish() const {
    for (const auto& [key, entry] : entries_) {
      if (!entry.used)
        throw ConfigError(at(entry.line) + ": unknown key '" + key + "'");
    }
  }

 private:
  std::string at(int line) const { return name_ + ":" + std::to_string(line); }

  std::map<std::string, RawEntry> entries_;
  std::string name_;
};

std::vector<SweepPoint> db_sweep(KeyValueFile& kv, const std::string& key) {
  std::vector<SweepPoint> out;
  for (double db : kv.number_list(key)) out.push_back({db, db_to_linear(db)});
  return out;
}

}  // namespace

ExperimentKind kind_from_string(const std::string& name) {
  if (name == "roc") return ExperimentKind::roc;
  if (name == "sweep-nm") return ExperimentKind::sweep_nm;
  if (name == "sweep-km") return ExperimentKind::sweep_km;
  if (name == "sweep-snr") return ExperimentKind::sweep_snr;
  if (name == "single") return ExperimentKind::single_point;
  throw ConfigError("unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::roc: return "roc";
    case ExperimentKind::sweep_nm: return "sweep-nm";
    case ExperimentKind::sweep_km: return "sweep-km";
    case ExperimentKind::sweep_snr: return "sweep-snr";
    case ExperimentKind::single_point: return "single";
  }
  return "?";
}

RunMethod method_from_string(const std::string& name) {
  if (name == "closed-form") return RunMethod::closed_form;
  if (name == "monte-carlo") return RunMethod::monte_carlo;
  if (name == "both") return RunMethod::both;
  throw ConfigError("unknown method '" + name + "' (closed-form, monte-carlo, both)");
}

ExperimentConfig parse_experiment_config(const std::string& path, ExperimentKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config_text(buffer.str(), kind, path);
}

ExperimentConfig parse_experiment_config_text(const std::string& text, ExperimentKind kind,
                                              const std::string& name) {
  KeyValueFile kv(text, name);

  PathLossModel path_loss;
  path_loss.f0 = kv.number_or("carrier_hz", 5.9e9);
  path_loss.c = kv.number_or("wave_speed_mps", 3.0e8);
  path_loss.d0 = kv.number_or("ref_distance_m", 1.0);
  path_loss.eta = kv.number_or("path_loss_exp", 2.0);

  const int n_b = static_cast<int>(kv.integer("n_b"));
  const int n_l = static_cast<int>(kv.integer("n_l"));
  const int n_m = static_cast<int>(kv.integer_or("n_m", n_l));  // attacker mirrors N_L by default
  const double default_spacing = half_wavelength_spacing(path_loss);
  UlaConfig bs_array(n_b, kv.number_or("spacing_b_m", default_spacing),
                     kv.angle_or("psi_b_rad", 0.0));
  UlaConfig leg_array(n_l, kv.number_or("spacing_l_m", default_spacing),
                      kv.angle_or("psi_l_rad", kPi / 2.0));
  UlaConfig mal_array(n_m, kv.number_or("spacing_m_m", default_spacing),
                      kv.angle_or("psi_m_rad", kPi / 2.0));

  PolarLocation claimed(kv.number_or("d_l_m", 100.0), kv.angle("theta_l_rad"));

  ScenarioParams scenario{claimed, bs_array, leg_array, mal_array};
  scenario.path_loss = path_loss;
  scenario.k_leg = kv.linear_from_db_or("k_l_db", 1.0);
  scenario.k_mal = kv.has("k_m_db") ? kv.linear_from_db("k_m_db") : scenario.k_leg;
  scenario.noise_leg = kv.linear_from_db_or("noise_l_db", 0.0);
  scenario.noise_mal = kv.has("noise_m_db") ? kv.linear_from_db("noise_m_db") : scenario.noise_leg;
  scenario.falsehood_radius = kv.number_or("falsehood_radius_m", 10.0);

  if (kv.has("mean_scale_convention")) {
    const std::string conv = kv.raw("mean_scale_convention");
    if (conv == "tx_elements")
      scenario.mean_convention = MeanScaleConvention::tx_elements;
    else if (conv == "bs_elements")
      scenario.mean_convention = MeanScaleConvention::bs_elements;
    else
      throw ConfigError(kv.where("mean_scale_convention") +
                        ": expected tx_elements or bs_elements");
  }

  double snr_db = 0.0;
  if (kv.has("p_l_w")) {
    if (kv.has("snr_l_db"))
      throw ConfigError(kv.where("p_l_w") + ": give either p_l_w or snr_l_db, not both");
    scenario.p_leg = kv.number("p_l_w");
    snr_db = 10.0 * std::log10(scenario.legitimate_snr());
  } else {
    snr_db = kv.number_or("snr_l_db", 0.0);
    scenario.p_leg = scenario.power_for_snr(db_to_linear(snr_db));
  }

  ExperimentConfig config{scenario};
  config.kind = kind;

  if (kv.has("theta_m_rad")) config.overrides.theta_m = kv.angle("theta_m_rad");
  if (kv.has("d_m_m")) config.overrides.d_m = kv.number("d_m_m");
  if (kv.has("road_theta_rad_list")) {
    const std::vector<double> thetas = kv.angle_list("road_theta_rad_list");
    const std::vector<double> dists = kv.number_list("road_d_m_list");
    if (thetas.size() != dists.size())
      throw ConfigError(kv.where("road_d_m_list") +
                        ": road_d_m_list and road_theta_rad_list differ in length");
    RoadGeometry road;
    for (std::size_t i = 0; i < thetas.size(); ++i)
      road.candidates.emplace_back(dists[i], thetas[i]);
    config.road = std::move(road);
  } else if (kv.has("road_d_m_list")) {
    throw ConfigError(kv.where("road_d_m_list") + ": road_theta_rad_list is missing");
  }

  config.seed = static_cast<std::uint64_t>(kv.integer_or("seed", 12345));
  config.trials = kv.integer_or("trials", 0);
  if (kv.has("trials") && config.trials < 1)
    throw ConfigError(kv.where("trials") + ": trials must be >= 1");
  config.workers = static_cast<unsigned>(kv.integer_or("workers", 1));
  if (config.workers < 1) throw ConfigError(kv.where("workers") + ": workers must be >= 1");
  config.roc_points = static_cast<int>(kv.integer_or("roc_points", 101));
  if (config.roc_points < 2)
    throw ConfigError(kv.where("roc_points") + ": roc_points must be >= 2");
  config.ln_lambda = kv.number_or("ln_lambda", 0.0);

  switch (kind) {
    case ExperimentKind::roc:
      if (kv.has("snr_l_db_list"))
        config.snr_list = db_sweep(kv, "snr_l_db_list");
      else
        config.snr_list = {{snr_db, db_to_linear(snr_db)}};
      if (kv.has("theta_m_rad_list"))
        config.theta_m_list = kv.angle_list("theta_m_rad_list");
      else if (config.overrides.theta_m)
        config.theta_m_list = {*config.overrides.theta_m};
      break;
    case ExperimentKind::sweep_nm:
      for (double v : kv.number_list("sweep_n_m_list")) {
        if (v != std::floor(v) || v < 1.0)
          throw ConfigError(kv.where("sweep_n_m_list") + ": element counts must be integers >= 1");
        config.sweep.push_back({v, v});
      }
      break;
    case ExperimentKind::sweep_km:
      config.sweep = db_sweep(kv, "sweep_k_m_db_list");
      break;
    case ExperimentKind::sweep_snr:
      config.sweep = db_sweep(kv, "sweep_snr_db_list");
      break;
    case ExperimentKind::single_point:
      break;
  }

  kv.finish();
  config.source_path = name;
  config.config_hash = fnv1a64_hex(text);
  return config;
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return std::string(out);
}

}  // namespace lsds
