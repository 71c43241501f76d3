// Release gate: ten end-to-end checks, one line of output each, nonzero
// exit when any of them fails. Tolerances are pinned here, in code, so the
// gate cannot drift without a visible diff.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "storesim/basket.hpp"
#include "storesim/errors.hpp"
#include "storesim/experiment.hpp"
#include "storesim/poisson.hpp"
#include "storesim/rng.hpp"
#include "storesim/samplesize.hpp"
#include "storesim/sim_config.hpp"
#include "storesim/sim_engine.hpp"
#include "storesim/store_layout.hpp"
#include "storesim/torus.hpp"
#include "support/cli_runner.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace storesim;
using nlohmann::json;
using testsupport::TempDir;
using testsupport::run_cli;
using testsupport::slurp;

namespace {

constexpr const char* kBinary = STORESIM_CLI_PATH;
constexpr const char* kGridLayout = STORESIM_FIXTURE_DIR "/grid_3x3.layout.json";
constexpr const char* kCorridorLayout =
    STORESIM_FIXTURE_DIR "/corridor.layout.json";
constexpr const char* kDefaultConfig =
    STORESIM_FIXTURE_DIR "/default.config.json";

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// ---- 1: sample-size worked example through the CLI ----------------------

Outcome check_sample_size() {
  const auto start = std::chrono::steady_clock::now();
  const testsupport::CliResult res =
      run_cli(kBinary, {"samplesize", "--z", "1.96", "--sigma", "200",
                        "--halfwidth", "50", "--json"});
  const double elapsed = seconds_since(start);
  Outcome out;
  if (res.exit_code != 0) {
    out.detail = "cli exit " + std::to_string(res.exit_code);
    return out;
  }
  const json doc = json::parse(res.output, nullptr, false);
  if (doc.is_discarded()) {
    out.detail = "unparseable output: " + res.output;
    return out;
  }
  const double n_raw = doc["n_raw"].get<double>();
  const long long n = doc["n"].get<long long>();
  out.pass = std::fabs(n_raw - 61.4656) <= 1e-3 && n == 62 && elapsed < 1.0;
  std::ostringstream d;
  d << "n_raw=" << n_raw << " n=" << n << " (tol 1e-3, budget 1s)";
  out.detail = d.str();
  return out;
}

// ---- 2: seeded exponential streams recover their rate -------------------

Outcome check_poisson_streams() {
  const auto start = std::chrono::steady_clock::now();
  constexpr double kRate = 0.2;       // events per second
  constexpr double kHorizon = 1e5;    // seconds
  constexpr double kWindow = 60.0;    // seconds
  int good = 0;
  double worst_p = 1.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed);
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(kRate * kHorizon * 1.2));
    double t = 0.0;
    while ((t += rng.exponential(kRate)) < kHorizon) {
      times.push_back(t);
    }
    const collision::PoissonModel fitted =
        collision::estimate_lambda(times.size(), kHorizon);
    const bool rate_ok = std::fabs(fitted.lambda / kRate - 1.0) <= 0.05;
    const collision::CollisionHistogram hist =
        collision::histogram_from_times(times, kWindow, kHorizon);
    const collision::FitResult fit = collision::fit_test(hist, fitted);
    worst_p = std::min(worst_p, fit.p_value);
    if (rate_ok && fit.p_value > 0.01) {
      ++good;
    }
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = good >= 95 && elapsed < 30.0;
  std::ostringstream d;
  d << good << "/100 seeds within 5% with p>0.01 (worst p=" << worst_p
    << ", budget 30s)";
  out.detail = d.str();
  return out;
}

// ---- 3: pmf ratio recurrence -------------------------------------------

Outcome check_pmf_recurrence() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(12345);
  double worst_rel = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    const double lambda = rng.uniform_range(0.02, 1.0);
    const double t = rng.uniform_range(1.0, 50.0);
    const collision::PoissonModel model{lambda};
    for (long long n = 1; n <= 30; ++n) {
      const double ratio =
          collision::pmf(model, n, t) / collision::pmf(model, n - 1, t);
      const double expected = lambda * t / static_cast<double>(n);
      worst_rel = std::max(worst_rel,
                           std::fabs(ratio - expected) / expected);
    }
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = worst_rel <= 1e-12 && elapsed < 1.0;
  std::ostringstream d;
  d << "100 (rate,window) pairs, n=1..30, worst rel err=" << worst_rel
    << " (tol 1e-12)";
  out.detail = d.str();
  return out;
}

// ---- 4: rotation numbers of rigid rotations ----------------------------

Outcome check_rotation_numbers() {
  const auto start = std::chrono::steady_clock::now();
  const double three_sevenths = 3.0 / 7.0;
  const torus::RotationNumber rational = torus::rotation_number(
      [three_sevenths](double x) { return x + three_sevenths; }, 0.0, 100000,
      1e-6);
  const bool rational_ok =
      std::fabs(rational.alpha - three_sevenths) <= 1e-6 &&
      rational.rational.has_value() && rational.rational->first == 3 &&
      rational.rational->second == 7 &&
      rational.classification == torus::OrbitClass::kRecurrent;

  const double golden = 0.6180339887498949;  // 1/phi
  const torus::RotationNumber dense = torus::rotation_number(
      [golden](double x) { return x + golden; }, 0.0, 100000, 1e-9);
  const bool dense_ok = !dense.rational.has_value() &&
                        dense.classification == torus::OrbitClass::kDense &&
                        std::fabs(dense.alpha - golden) <= 1e-6;

  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = rational_ok && dense_ok && elapsed < 5.0;
  std::ostringstream d;
  d << "3/7 -> alpha=" << rational.alpha << " period="
    << (rational.rational ? rational.rational->second : -1)
    << "; golden -> " << (dense.rational ? "recurrent" : "dense")
    << " (1e5 iters, budget 5s)";
  out.detail = d.str();
  return out;
}

// ---- 5: embedded points satisfy the tube equation ----------------------

Outcome check_tube_equation() {
  Rng rng(777);
  const torus::TorusGeometry g{2.0, 1.0};
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const torus::TorusPoint p{rng.uniform_range(0.0, torus::kTwoPi),
                              rng.uniform_range(0.0, torus::kTwoPi)};
    const torus::Vec3 v = torus::embed(g, p);
    const double radial = std::sqrt(v.x * v.x + v.y * v.y) - g.major_radius;
    worst = std::max(
        worst, std::fabs(radial * radial + v.z * v.z -
                         g.tube_radius * g.tube_radius));
  }
  Outcome out;
  out.pass = worst <= 1e-9;
  std::ostringstream d;
  d << "10000 random angle pairs, worst |tube residual|=" << worst
    << " (tol 1e-9)";
  out.detail = d.str();
  return out;
}

// ---- 6: cluster recovery on disjoint-support populations ---------------

Outcome check_cluster_recovery() {
  const auto start = std::chrono::steady_clock::now();

  // Two populations of 50 customers, each population defined by its own
  // five-product shelf; every member buys that full shelf, so the data's
  // true structure is exactly two groups with disjoint support.
  std::vector<basket::Transaction> transactions;
  std::map<std::string, int> truth;
  std::vector<std::string> catalog;
  for (int group = 0; group < 2; ++group) {
    const char shelf = group == 0 ? 'a' : 'b';
    for (int p = 0; p < 5; ++p) {
      catalog.push_back(std::string(1, shelf) + std::to_string(p));
    }
    for (int n = 0; n < 50; ++n) {
      basket::Transaction tx;
      tx.customer = "g" + std::to_string(group) + "_" +
                    (n < 10 ? "0" : "") + std::to_string(n);
      for (int p = 0; p < 5; ++p) {
        tx.products.push_back(std::string(1, shelf) + std::to_string(p));
      }
      truth[tx.customer] = group;
      transactions.push_back(std::move(tx));
    }
  }
  const basket::BasketMatrix matrix = basket::build_matrix(transactions, catalog);

  int pure = 0;
  int picked_two = 0;
  double worst_purity = 1.0;
  const std::vector<int> candidates{1, 2, 3, 4, 5};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    basket::ClusterOptions options;
    options.k = 2;
    options.seed = seed;
    const basket::ClusterResult result = basket::cluster(matrix, options);
    std::vector<std::vector<std::string>> members;
    for (const auto& c : result.clusters) {
      members.push_back(c.member_customers);
    }
    const double p = oracle::purity(members, truth);
    worst_purity = std::min(worst_purity, p);
    if (p >= 0.95) {
      ++pure;
    }
    if (basket::select_k(matrix, candidates, options).k == 2) {
      ++picked_two;
    }
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = pure == 20 && picked_two >= 18 && elapsed < 10.0;
  std::ostringstream d;
  d << pure << "/20 seeds at purity>=0.95 (worst=" << worst_purity << "), "
    << picked_two << "/20 picked k=2 from 1..5 (budget 10s)";
  out.detail = d.str();
  return out;
}

// ---- 7: determinism of record streams and aggregates -------------------

Outcome check_determinism() {
  TempDir dir("acc-det");
  const store::StoreLayout layout = store::load_layout(kGridLayout);
  const SimConfig config = load_config(kDefaultConfig);

  {
    engine::JsonlSimSink sink(dir.file("a.jsonl"));
    engine::run(layout, config, &sink);
  }
  {
    engine::JsonlSimSink sink(dir.file("b.jsonl"));
    engine::run(layout, config, &sink);
  }
  const std::string a = slurp(dir.file("a.jsonl"));
  const std::string b = slurp(dir.file("b.jsonl"));
  const bool bytes_equal = !a.empty() && a == b;

  // Same sweep at different worker-pool widths must aggregate identically.
  auto manifest = [&](const std::string& sink, int parallelism) {
    experiment::ExperimentManifest m;
    m.experiment_id = "det-check";
    m.layout = kCorridorLayout;
    m.grid.emplace_back("agents_total",
                        std::vector<experiment::ParamValue>{2LL, 3LL});
    m.replicates = 2;
    m.base_seed = 5;
    m.parallelism = parallelism;
    m.sink = dir.file(sink).string();
    return m;
  };
  const experiment::ExperimentManifest serial = manifest("s1", 1);
  const experiment::ExperimentManifest wide = manifest("s2", 4);
  experiment::execute(serial, experiment::expand(serial));
  experiment::execute(wide, experiment::expand(wide));
  const std::string agg1 = experiment::aggregate_to_json_string(
      experiment::aggregate(dir.file("s1"), 5.0));
  const std::string agg2 = experiment::aggregate_to_json_string(
      experiment::aggregate(dir.file("s2"), 5.0));

  Outcome out;
  out.pass = bytes_equal && agg1 == agg2;
  std::ostringstream d;
  d << "same-seed streams " << (bytes_equal ? "byte-identical" : "DIFFER")
    << " (" << a.size() << " bytes); pool-width aggregates "
    << (agg1 == agg2 ? "identical" : "DIFFER");
  out.detail = d.str();
  return out;
}

// ---- 8: distancing flag raises collision counts ------------------------

Outcome check_distancing_effect() {
  const store::StoreLayout layout = store::load_layout(kGridLayout);
  const SimConfig base = load_config(kDefaultConfig);
  int non_strict = 0;
  int strict = 0;
  std::ostringstream pairs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimConfig off = base;
    off.seed = seed;
    SimConfig on = off;
    on.features.violate_social_distancing = true;
    const std::size_t n_off = engine::run(layout, off).events.size();
    const std::size_t n_on = engine::run(layout, on).events.size();
    if (n_on >= n_off) {
      ++non_strict;
    }
    if (n_on > n_off) {
      ++strict;
    }
    pairs << (seed == 1 ? "" : " ") << n_off << "/" << n_on;
  }
  Outcome out;
  out.pass = non_strict == 10 && strict >= 8;
  std::ostringstream d;
  d << "off/on collisions per seed: " << pairs.str() << " (" << non_strict
    << "/10 >=, " << strict << "/10 strict)";
  out.detail = d.str();
  return out;
}

// ---- 9: throughput under parallel load ---------------------------------

Outcome check_throughput(const std::filesystem::path& sweep_sink) {
  const store::StoreLayout layout = store::load_layout(kGridLayout);
  const SimConfig base = load_config(kDefaultConfig);

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::thread> threads;
  std::vector<long long> ticks(9, 0);
  for (int i = 0; i < 9; ++i) {
    threads.emplace_back([&, i] {
      SimConfig config = base;
      config.seed = 1000 + static_cast<std::uint64_t>(i);
      ticks[static_cast<std::size_t>(i)] = engine::run(layout, config).ticks_run;
    });
  }
  for (auto& t : threads) {
    t.join();
  }
  const double wall = seconds_since(start);
  long long total_ticks = 0;
  for (long long t : ticks) {
    total_ticks += t;
  }
  const double per_sim_rate =
      static_cast<double>(total_ticks) / 9.0 / wall;

  // Statistically sized sweep: 62 replicates of the default scenario.
  experiment::ExperimentManifest m;
  m.experiment_id = "post-hoc-validation";
  m.layout = kGridLayout;
  m.grid.emplace_back("agents_total",
                      std::vector<experiment::ParamValue>{50LL});
  m.replicates = 62;
  m.base_seed = 4242;
  m.parallelism = 4;
  m.sink = sweep_sink.string();
  const auto sweep_start = std::chrono::steady_clock::now();
  const experiment::ExecutionReport report =
      experiment::execute(m, experiment::expand(m));
  const double sweep_wall = seconds_since(sweep_start);

  Outcome out;
  out.pass = per_sim_rate >= 1000.0 && report.failed == 0 &&
             report.completed == 62 && sweep_wall < 300.0;
  std::ostringstream d;
  d << "9 parallel sims at " << static_cast<long long>(per_sim_rate)
    << " ticks/s/sim (floor 1000); 62-replicate sweep in " << sweep_wall
    << "s (budget 300s, " << report.completed << " completed)";
  out.detail = d.str();
  return out;
}

// ---- 10: aggregation finds every record it expects ---------------------

Outcome check_traceability(const std::filesystem::path& sweep_sink) {
  const testsupport::CliResult res = run_cli(
      kBinary, {"analyze", "--sink", sweep_sink.string(), "--json"});
  Outcome out;
  if (res.exit_code != 0) {
    out.detail = "analyze exit " + std::to_string(res.exit_code) + ": " +
                 res.output;
    return out;
  }
  const json doc = json::parse(res.output, nullptr, false);
  if (doc.is_discarded()) {
    out.detail = "unparseable analyze output";
    return out;
  }
  const long long orphans = doc["orphan_records"].get<long long>();
  const long long records = doc["total_records"].get<long long>();
  const int found = doc["jobs"][0]["sims_found"].get<int>();
  out.pass = orphans == 0 && found == 62 && records > 0;
  std::ostringstream d;
  d << records << " records, " << orphans << " orphans, " << found
    << "/62 sims matched to the manifest";
  out.detail = d.str();
  return out;
}

}  // namespace

int main() {
  TempDir sweep_dir("acc-sweep");
  const std::filesystem::path sweep_sink = sweep_dir.file("sink");

  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"sample-size worked example", check_sample_size},
      {"poisson stream recovery", check_poisson_streams},
      {"pmf ratio recurrence", check_pmf_recurrence},
      {"rotation-number classification", check_rotation_numbers},
      {"torus tube equation", check_tube_equation},
      {"basket cluster recovery", check_cluster_recovery},
      {"deterministic replay", check_determinism},
      {"distancing flag effect", check_distancing_effect},
      {"parallel throughput", [&] { return check_throughput(sweep_sink); }},
      {"sweep traceability", [&] { return check_traceability(sweep_sink); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = checks[i].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = seconds_since(start);
    if (!outcome.pass) {
      ++failures;
    }
    std::ostringstream line;
    line << (i + 1 < 10 ? " " : "") << (i + 1);
    std::cout << "[" << line.str() << "/10] "
              << (outcome.pass ? "PASS" : "FAIL") << " (" << std::fixed
              << std::setprecision(2) << elapsed << "s) "
              << checks[i].first << ": " << outcome.detail << "\n"
              << std::defaultfloat;
  }
  std::cout << (10 - failures) << "/10 checks passed\n";
  return failures == 0 ? 0 : 1;
}
