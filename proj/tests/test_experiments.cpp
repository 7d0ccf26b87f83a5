#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "lsds/experiments.hpp"
#include "lsds/metrics.hpp"

using namespace lsds;
namespace fs = std::filesystem;

namespace {

const char* kBaseConfig = R"(# baseline ROC scenario
n_b = 4
n_l = 3
n_m = 3
theta_l_rad = 0.5pi
d_l_m = 100
k_l_db = 1
noise_l_db = 0
snr_l_db = 0
falsehood_radius_m = 10
theta_m_rad = 0.45pi
seed = 2025
)";

ExperimentConfig parse(const std::string& text, ExperimentKind kind) {
  return parse_experiment_config_text(text, kind, "test.conf");
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("lsds_test_" + name);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LSDS_SIM_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::vector<std::size_t> rows_tagged(const ResultTable& t, const std::string& tag) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.method.size(); ++i)
    if (t.method[i] == tag) idx.push_back(i);
  return idx;
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("config parsing") {
  SUBCASE("baseline fields and unit conversions") {
    const ExperimentConfig c = parse(kBaseConfig, ExperimentKind::single_point);
    CHECK(c.scenario.bs_array.n == 4);
    CHECK(c.scenario.leg_array.n == 3);
    CHECK(c.scenario.mal_array.n == 3);
    CHECK(c.scenario.claimed.theta == doctest::Approx(kPi / 2.0));
    CHECK(c.scenario.claimed.d == doctest::Approx(100.0));
    CHECK(c.scenario.k_leg == doctest::Approx(std::pow(10.0, 0.1)).epsilon(1e-12));
    CHECK(c.scenario.k_mal == doctest::Approx(c.scenario.k_leg));  // defaulted
    CHECK(c.scenario.noise_leg == doctest::Approx(1.0));
    CHECK(c.scenario.legitimate_snr() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.overrides.theta_m.value() == doctest::Approx(0.45 * kPi));
    CHECK(c.seed == 2025);
    CHECK_FALSE(c.config_hash.empty());
  }
  SUBCASE("n_m defaults to n_l") {
    const ExperimentConfig c =
        parse("n_b = 4\nn_l = 5\ntheta_l_rad = 0.5pi\n", ExperimentKind::single_point);
    CHECK(c.scenario.mal_array.n == 5);
  }
  SUBCASE("angle forms") {
    const ExperimentConfig c = parse(
        "n_b = 2\nn_l = 2\ntheta_l_rad = pi\ntheta_m_rad = 1.0471975512\n",
        ExperimentKind::single_point);
    CHECK(c.scenario.claimed.theta == doctest::Approx(kPi));
    CHECK(c.overrides.theta_m.value() == doctest::Approx(1.0471975512));
  }
  SUBCASE("missing required field names the field") {
    CHECK_THROWS_WITH_AS(parse("n_b = 4\nn_l = 3\n", ExperimentKind::single_point),
                         doctest::Contains("theta_l_rad"), ConfigError);
  }
  SUBCASE("unknown keys are reported with their line") {
    CHECK_THROWS_WITH_AS(
        parse("n_b = 4\nn_l = 3\ntheta_l_rad = 0.5pi\nbogus_key = 1\n",
              ExperimentKind::single_point),
        doctest::Contains("bogus_key"), ConfigError);
  }
  SUBCASE("duplicate keys are rejected") {
    CHECK_THROWS_AS(parse("n_b = 4\nn_b = 5\nn_l = 3\ntheta_l_rad = 0.5pi\n",
                          ExperimentKind::single_point),
                    ConfigError);
  }
  SUBCASE("explicit power and SNR are mutually exclusive") {
    CHECK_THROWS_AS(
        parse("n_b = 4\nn_l = 3\ntheta_l_rad = 0.5pi\np_l_w = 2\nsnr_l_db = 0\n",
              ExperimentKind::single_point),
        ConfigError);
  }
  SUBCASE("road lists must have matching lengths") {
    CHECK_THROWS_AS(
        parse("n_b = 4\nn_l = 3\ntheta_l_rad = 0.5pi\n"
              "road_d_m_list = 100, 120\nroad_theta_rad_list = 0.4pi\n",
              ExperimentKind::single_point),
        ConfigError);
  }
  SUBCASE("sweep grids are kind-checked") {
    const std::string base = "n_b = 4\nn_l = 3\ntheta_l_rad = 0.5pi\ntheta_m_rad = 0.4pi\n";
    CHECK_THROWS_AS(parse(base, ExperimentKind::sweep_nm), ConfigError);  // missing grid
    CHECK_THROWS_AS(parse(base + "sweep_n_m_list = 1.5, 2\n", ExperimentKind::sweep_nm),
                    ConfigError);
    const ExperimentConfig c =
        parse(base + "sweep_k_m_db_list = -inf, 0, 3\n", ExperimentKind::sweep_km);
    REQUIRE(c.sweep.size() == 3);
    CHECK(c.sweep[0].linear == 0.0);  // -inf dB is a pure Rayleigh attacker
    CHECK(c.sweep[2].linear == doctest::Approx(std::pow(10.0, 0.3)));
  }
}

TEST_CASE("run_single diagnostics") {
  SUBCASE("baseline scenario: positive deflection, KL equals deflection") {
    ExperimentConfig c = parse(kBaseConfig, ExperimentKind::single_point);
    const ResultTable t = run_single(c);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.method[0] == "closed-form");
    const double q = t.diagnostics.at("deflection").get<double>();
    const double kl = t.diagnostics.at("kl_divergence").get<double>();
    CHECK(q > 0.0);
    CHECK(kl == doctest::Approx(q).epsilon(1e-9));  // R0 = R1 collapses KL to q
    CHECK(t.diagnostics.at("p_m_star").get<double>() > 0.0);
  }
  SUBCASE("attacker at the claimed location is flagged uninformative") {
    ExperimentConfig c = parse(
        "n_b = 4\nn_l = 3\ntheta_l_rad = 0.5pi\ntheta_m_rad = 0.5pi\n",
        ExperimentKind::single_point);
    const ResultTable t = run_single(c);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.method[0] == "uninformative");
    CHECK(t.rows[0][5] == 1.0);  // min total error
    CHECK(t.diagnostics.at("uninformative").get<bool>());
  }
  SUBCASE("missing attacker location is a config error") {
    ExperimentConfig c =
        parse("n_b = 4\nn_l = 3\ntheta_l_rad = 0.5pi\n", ExperimentKind::single_point);
    CHECK_THROWS_AS(run_single(c), ConfigError);
  }
}

TEST_CASE("run_roc orderings and self-consistency") {
  ExperimentConfig c = parse(
      "n_b = 4\nn_l = 3\nn_m = 3\ntheta_l_rad = 0.5pi\nk_l_db = 1\n"
      "snr_l_db_list = 0, 5\ntheta_m_rad_list = 0.45pi, 0.35pi\n"
      "roc_points = 21\ntrials = 5000\nseed = 31\ntheta_m_rad = 0.45pi\n",
      ExperimentKind::roc);
  c.method = RunMethod::both;
  const ResultTable t = run_roc(c);

  // columns: snr_db, theta_m_rad, ln_lambda, alpha, alpha_stderr, beta, beta_stderr
  auto curve = [&](const std::string& tag, double snr, double theta) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (t.method[i] == tag && t.rows[i][0] == snr &&
          std::abs(t.rows[i][1] - theta) < 1e-12)
        pts.emplace_back(t.rows[i][3], t.rows[i][5]);
    }
    return pts;
  };

  SUBCASE("all rates lie in [0,1] and standard errors are nonnegative") {
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      CHECK(t.rows[i][3] >= 0.0);
      CHECK(t.rows[i][3] <= 1.0);
      CHECK(t.rows[i][5] >= 0.0);
      CHECK(t.rows[i][5] <= 1.0);
      CHECK(t.rows[i][4] >= 0.0);
      CHECK(t.rows[i][6] >= 0.0);
    }
  }
  SUBCASE("5 dB dominates 0 dB pointwise (closed form)") {
    const auto low = curve("closed-form", 0.0, 0.45 * kPi);
    const auto high = curve("closed-form", 5.0, 0.45 * kPi);
    REQUIRE(low.size() == 21);
    REQUIRE(high.size() == 21);
    for (std::size_t i = 0; i < low.size(); ++i) CHECK(high[i].second >= low[i].second);
  }
  SUBCASE("larger bearing separation dominates (closed form)") {
    const auto near = curve("closed-form", 0.0, 0.45 * kPi);
    const auto far = curve("closed-form", 0.0, 0.35 * kPi);
    for (std::size_t i = 0; i < near.size(); ++i) CHECK(far[i].second >= near[i].second);
  }
  SUBCASE("Monte Carlo rows stay within 3 sigma of the closed form") {
    const auto cf = curve("closed-form", 0.0, 0.45 * kPi);
    const auto mc = curve("monte-carlo", 0.0, 0.45 * kPi);
    REQUIRE(cf.size() == mc.size());
    for (std::size_t i = 0; i < cf.size(); ++i) {
      const double band =
          3.0 * std::sqrt(cf[i].second * (1.0 - cf[i].second) / 5000.0) + 1e-9;
      CHECK(std::abs(mc[i].second - cf[i].second) <= band);
    }
  }
}

TEST_CASE("run_roc flags the uninformative configuration") {
  ExperimentConfig c = parse(
      "n_b = 4\nn_l = 3\ntheta_l_rad = 0.5pi\ntheta_m_rad = 0.5pi\nroc_points = 11\n"
      "trials = 2000\n",
      ExperimentKind::roc);
  const ResultTable t = run_roc(c);
  const auto diag = rows_tagged(t, "uninformative");
  REQUIRE(diag.size() == 11);
  for (std::size_t i : diag) CHECK(t.rows[i][3] == t.rows[i][5]);  // alpha == beta
}

TEST_CASE("run_sweep_nm argmax lands on N_L") {
  ExperimentConfig c = parse(
      "n_b = 4\nn_l = 3\ntheta_l_rad = 0.3333333333333333pi\ntheta_m_rad = 0.25pi\n"
      "sweep_n_m_list = 1, 2, 3, 4, 5, 6, 7, 8\nseed = 5\n",
      ExperimentKind::sweep_nm);
  const ResultTable t = run_sweep_nm(c);  // auto resolves to closed form here
  REQUIRE(t.rows.size() == 8);
  for (const auto& row : t.rows) CHECK(t.columns.size() == row.size());
  const auto argmax = t.diagnostics.at("argmax");
  CHECK(argmax.at("closed-form").at("sweep_value").get<double>() == 3.0);
}

TEST_CASE("run_sweep_nm single-element grid") {
  ExperimentConfig c = parse(
      "n_b = 4\nn_l = 3\ntheta_l_rad = 0.5pi\ntheta_m_rad = 0.4pi\nsweep_n_m_list = 2\n",
      ExperimentKind::sweep_nm);
  const ResultTable t = run_sweep_nm(c);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][0] == 2.0);
}

TEST_CASE("run_sweep_km peaks at K_L and handles the Rayleigh point") {
  ExperimentConfig c = parse(
      "n_b = 4\nn_l = 3\nn_m = 3\ntheta_l_rad = 0.3333333333333333pi\n"
      "theta_m_rad = 0.25pi\nk_l_db = 1\nsweep_k_m_db_list = -inf, -3, 1, 5\n"
      "trials = 30000\nseed = 17\n",
      ExperimentKind::sweep_km);
  const ResultTable t = run_sweep_km(c);
  const auto mc = rows_tagged(t, "monte-carlo");
  REQUIRE(mc.size() == 4);
  for (std::size_t i : mc) {
    CHECK(t.rows[i][5] > 0.0);
    CHECK(t.rows[i][5] <= 1.0);
  }
  CHECK(t.diagnostics.at("argmax").at("monte-carlo").at("sweep_value").get<double>() == 1.0);
}

TEST_CASE("sweep-km at K_L agrees with sweep-nm at N_L") {
  const std::string base =
      "n_b = 4\nn_l = 3\nn_m = 3\ntheta_l_rad = 0.3333333333333333pi\n"
      "theta_m_rad = 0.25pi\nk_l_db = 1\ntrials = 20000\nseed = 6\n";
  ExperimentConfig km = parse(base + "sweep_k_m_db_list = 1\n", ExperimentKind::sweep_km);
  ExperimentConfig nm = parse(base + "sweep_n_m_list = 3\n", ExperimentKind::sweep_nm);
  nm.method = RunMethod::monte_carlo;
  const ResultTable a = run_sweep_km(km);
  const ResultTable b = run_sweep_nm(nm);
  REQUIRE(a.rows.size() == 1);
  REQUIRE(b.rows.size() == 1);
  const double band = 3.0 * std::hypot(a.rows[0][6], b.rows[0][6]) + 1e-9;
  CHECK(std::abs(a.rows[0][5] - b.rows[0][5]) <= band);
}

TEST_CASE("method resolution") {
  ExperimentConfig c = parse(
      "n_b = 4\nn_l = 3\ntheta_l_rad = 0.5pi\ntheta_m_rad = 0.4pi\nk_m_db = 4\n"
      "sweep_snr_db_list = 0, 3\ntrials = 2000\n",
      ExperimentKind::sweep_snr);
  SUBCASE("auto falls back to sampling when covariances differ") {
    const ResultTable t = run_sweep_snr(c);
    for (const auto& tag : t.method) CHECK(tag == "monte-carlo");
  }
  SUBCASE("an explicit closed-form request outside the regime fails") {
    c.method = RunMethod::closed_form;
    CHECK_THROWS_AS(run_sweep_snr(c), ConfigError);
  }
}

TEST_CASE("deterministic output files independent of worker count") {
  ExperimentConfig c = parse(
      "n_b = 4\nn_l = 3\nn_m = 3\ntheta_l_rad = 0.5pi\ntheta_m_rad = 0.42pi\n"
      "sweep_k_m_db_list = 0, 1, 2\ntrials = 12000\nseed = 99\n",
      ExperimentKind::sweep_km);

  const ResultTable t1 = run_sweep_km(c);
  const ResultTable t2 = run_sweep_km(c);
  c.workers = 4;
  const ResultTable t4 = run_sweep_km(c);
  REQUIRE(t1.rows.size() == t4.rows.size());
  for (std::size_t i = 0; i < t1.rows.size(); ++i) {
    CHECK(t1.rows[i] == t2.rows[i]);
    CHECK(t1.rows[i] == t4.rows[i]);
  }

  const fs::path p1 = temp_file("det1.csv"), p4 = temp_file("det4.csv");
  write_csv(t1, p1.string());
  write_csv(t4, p4.string());
  CHECK(slurp(p1) == slurp(p4));
  fs::remove(p1);
  fs::remove(p4);
}

TEST_CASE("csv format and metadata sidecar") {
  ExperimentConfig c = parse(kBaseConfig, ExperimentKind::single_point);
  const ResultTable t = run_single(c);
  const fs::path csv = temp_file("fmt.csv");
  write_csv(t, csv.string());
  write_metadata(t, c, 0.25, csv.string());

  const std::string text = slurp(csv);
  CHECK(text.rfind("sweep_value,alpha,alpha_stderr,beta,beta_stderr,min_total_error,"
                   "mte_stderr,method\n", 0) == 0);

  const nlohmann::json meta = nlohmann::json::parse(slurp(csv.string() + ".meta.json"));
  CHECK(meta.at("seed").get<std::uint64_t>() == 2025);
  CHECK(meta.at("kind").get<std::string>() == "single");
  CHECK(meta.at("config_hash").get<std::string>() == c.config_hash);
  CHECK(meta.contains("runtime_seconds"));
  fs::remove(csv);
  fs::remove(csv.string() + ".meta.json");
}

TEST_CASE("command line interface exit codes") {
  const fs::path conf = temp_file("cli.conf");
  const fs::path out = temp_file("cli.csv");
  {
    std::ofstream o(conf);
    o << kBaseConfig << "trials = 2000\n";
  }

  SUBCASE("successful run writes the CSV and sidecar") {
    REQUIRE(run_cli("single --config " + conf.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out));
    CHECK(fs::exists(out.string() + ".meta.json"));
  }
  SUBCASE("config errors exit with 2") {
    const fs::path bad = temp_file("cli_bad.conf");
    {
      std::ofstream o(bad);
      o << "n_b = 4\nn_l = 3\n";  // theta_l_rad missing
    }
    CHECK(run_cli("single --config " + bad.string() + " --out " + out.string()) == 2);
    fs::remove(bad);
  }
  SUBCASE("explicit closed form on an asymmetric sweep exits with 2") {
    const fs::path conf2 = temp_file("cli_km.conf");
    {
      std::ofstream o(conf2);
      o << kBaseConfig << "k_m_db = 4\nsweep_snr_db_list = 0, 3\ntrials = 2000\n";
    }
    CHECK(run_cli("sweep-snr --config " + conf2.string() + " --out " + out.string() +
                  " --method closed-form") == 2);
    fs::remove(conf2);
  }
  SUBCASE("infeasible road exits with 3") {
    const fs::path conf3 = temp_file("cli_road.conf");
    {
      std::ofstream o(conf3);
      o << "n_b = 4\nn_l = 3\ntheta_l_rad = 0.5pi\nfalsehood_radius_m = 50\n"
           "road_d_m_list = 100\nroad_theta_rad_list = 0.5pi\ntrials = 1000\n";
    }
    CHECK(run_cli("single --config " + conf3.string() + " --out " + out.string()) == 3);
    fs::remove(conf3);
  }
  fs::remove(conf);
  fs::remove(out);
  fs::remove(out.string() + ".meta.json");
}

TEST_SUITE_END();
