// storesim: one binary, six subcommands (simulate, experiment, cluster,
// samplesize, torus, analyze). Every subcommand is a thin wrapper over the
// core library: parse flags, delegate, format. Human-readable summaries go
// to stdout; --json switches them to single-line JSON. Machine records go
// only to files.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "storesim/basket.hpp"
#include "storesim/errors.hpp"
#include "storesim/experiment.hpp"
#include "storesim/samplesize.hpp"
#include "storesim/sim_config.hpp"
#include "storesim/sim_engine.hpp"
#include "storesim/store_layout.hpp"
#include "storesim/torus.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_file(const fs::path& path, const std::string& label) {
  if (!fs::exists(path)) {
    throw storesim::ParseError(label + " not found: " + path.string());
  }
}

// ---- simulate -----------------------------------------------------------

struct SimulateArgs {
  std::string layout;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool as_json = false;
};

int run_simulate(const SimulateArgs& args) {
  require_file(args.layout, "layout");
  require_file(args.config, "config");
  const storesim::store::StoreLayout layout =
      storesim::store::load_layout(args.layout);
  storesim::SimConfig config = storesim::load_config(args.config);
  if (args.seed.has_value()) {
    config.seed = *args.seed;
  }
  storesim::engine::JsonlSimSink sink(args.out);
  const storesim::engine::SimResult result =
      storesim::engine::run(layout, config, &sink);

  if (args.as_json) {
    json doc{{"sim_id", result.sim_id},
             {"ticks", result.ticks_run},
             {"collisions", result.events.size()},
             {"near_misses", result.near_misses},
             {"at_risk", result.at_risk.size()},
             {"truncated", result.truncated},
             {"out", args.out}};
    doc["half_empty_s"] = result.half_empty_s.has_value()
                              ? json(*result.half_empty_s)
                              : json(nullptr);
    std::cout << doc.dump() << "\n";
  } else {
    std::cout << "sim_id=" << result.sim_id << " ticks=" << result.ticks_run
              << " collisions=" << result.events.size()
              << " near_misses=" << result.near_misses
              << " at_risk=" << result.at_risk.size() << " half_empty_s=";
    if (result.half_empty_s.has_value()) {
      std::cout << *result.half_empty_s;
    } else {
      std::cout << "n/a";
    }
    std::cout << " truncated=" << (result.truncated ? "true" : "false")
              << " out=" << args.out << "\n";
  }
  return 0;
}

// ---- samplesize ---------------------------------------------------------

struct SampleSizeArgs {
  std::optional<double> z;
  std::optional<double> alpha;
  std::optional<double> sigma;
  std::optional<double> range;
  double halfwidth = 0.0;
  std::optional<long long> population;
  bool as_json = false;
};

int run_samplesize(const SampleSizeArgs& args) {
  storesim::stats::SampleSizeParams params;
  params.z = args.z.has_value() ? *args.z
                                : storesim::stats::z_from_alpha(*args.alpha);
  params.alpha = args.alpha;
  params.sigma = args.sigma.has_value()
                     ? *args.sigma
                     : storesim::stats::sigma_from_range(*args.range);
  params.half_length = args.halfwidth;
  params.population = args.population;
  const storesim::stats::SampleSize result =
      storesim::stats::min_samples(params);
  if (args.as_json) {
    std::cout << json{{"n_raw", result.n_raw}, {"n", result.n}}.dump() << "\n";
  } else {
    std::cout << result.n_raw << " → " << result.n << "\n";
  }
  return 0;
}

// ---- cluster ------------------------------------------------------------

struct ClusterArgs {
  std::string transactions;
  std::string layout;
  std::optional<int> k;
  std::string k_range;  // "A:B" inclusive
  std::uint64_t seed = 1;
  std::string out;
  bool raw = false;
  bool as_json = false;
};

int run_cluster(const ClusterArgs& args) {
  require_file(args.transactions, "transactions");
  require_file(args.layout, "layout");
  const storesim::store::StoreLayout layout =
      storesim::store::load_layout(args.layout);
  const std::vector<storesim::basket::Transaction> transactions =
      storesim::basket::load_transactions(args.transactions);
  const auto& catalog_set = layout.product_catalog();
  const storesim::basket::BasketMatrix matrix = storesim::basket::build_matrix(
      transactions,
      std::vector<std::string>(catalog_set.begin(), catalog_set.end()));

  storesim::basket::ClusterOptions options;
  options.seed = args.seed;
  options.raw_features = args.raw;

  std::vector<std::pair<int, double>> bic_table;
  if (args.k.has_value()) {
    options.k = *args.k;
  } else {
    const auto colon = args.k_range.find(':');
    if (colon == std::string::npos) {
      throw storesim::ValidationError("--k-range must be A:B");
    }
    const int lo = std::stoi(args.k_range.substr(0, colon));
    const int hi = std::stoi(args.k_range.substr(colon + 1));
    if (lo < 1 || hi < lo) {
      throw storesim::ValidationError("--k-range must be A:B with 1 <= A <= B");
    }
    std::vector<int> candidates(static_cast<std::size_t>(hi - lo + 1));
    std::iota(candidates.begin(), candidates.end(), lo);
    const storesim::basket::SelectKResult chosen =
        storesim::basket::select_k(matrix, candidates, options);
    options.k = chosen.k;
    bic_table = chosen.bic_table;
  }

  storesim::basket::ClusterResult result =
      storesim::basket::cluster(matrix, options);
  storesim::basket::attach_bay_sequences(result, layout);
  if (bic_table.empty()) {
    bic_table.emplace_back(options.k, result.bic);
  }
  storesim::basket::write_cluster_report(args.out, result, options, bic_table);

  if (args.as_json) {
    json clusters = json::array();
    for (const auto& c : result.clusters) {
      clusters.push_back({{"id", c.id},
                          {"weight", c.weight},
                          {"members", c.member_customers.size()},
                          {"bays", c.bay_sequence}});
    }
    std::cout << json{{"k", options.k},
                      {"bic", result.bic},
                      {"iterations", result.log_likelihood.size()},
                      {"clusters", std::move(clusters)},
                      {"out", args.out}}
                     .dump()
              << "\n";
  } else {
    std::cout << "k=" << options.k << " bic=" << result.bic
              << " iterations=" << result.log_likelihood.size()
              << " out=" << args.out << "\n";
  }
  return 0;
}

// ---- experiment ---------------------------------------------------------

struct ExperimentArgs {
  std::string manifest;
  bool as_json = false;
  bool quiet = false;
};

int run_experiment(const ExperimentArgs& args) {
  require_file(args.manifest, "manifest");
  const storesim::experiment::ExperimentManifest manifest =
      storesim::experiment::load_manifest(args.manifest);
  const std::vector<storesim::experiment::JobRecord> jobs =
      storesim::experiment::expand(manifest);
  const storesim::experiment::ExecutionReport report =
      storesim::experiment::execute(manifest, jobs,
                                    args.quiet ? nullptr : &std::cout);
  if (args.as_json) {
    json failures = json::array();
    for (const auto& [sim_id, error] : report.failures) {
      failures.push_back({{"sim_id", sim_id}, {"error", error}});
    }
    std::cout << json{{"experiment_id", manifest.experiment_id},
                      {"jobs", jobs.size()},
                      {"sims", report.total},
                      {"completed", report.completed},
                      {"failed", report.failed},
                      {"failures", std::move(failures)},
                      {"sink", manifest.sink}}
                     .dump()
              << "\n";
  } else {
    std::cout << "experiment=" << manifest.experiment_id
              << " jobs=" << jobs.size() << " sims=" << report.total
              << " completed=" << report.completed
              << " failed=" << report.failed << " sink=" << manifest.sink
              << "\n";
  }
  return report.exit_code();
}

// ---- torus --------------------------------------------------------------

struct TorusRotationArgs {
  std::optional<long long> p;
  std::optional<long long> q;
  std::optional<double> alpha;
  long long iters = 100000;
  double tol = 1e-9;
  bool as_json = false;
};

int run_torus_rotation(const TorusRotationArgs& args) {
  double angle = 0.0;
  if (args.alpha.has_value()) {
    angle = *args.alpha;
  } else {
    if (*args.q <= 0) {
      throw storesim::ValidationError("--q must be positive");
    }
    angle = static_cast<double>(*args.p) / static_cast<double>(*args.q);
  }
  const storesim::torus::RotationNumber rn = storesim::torus::rotation_number(
      [angle](double x) { return x + angle; }, 0.0, args.iters, args.tol);

  if (args.as_json) {
    json doc{{"alpha", rn.alpha}};
    if (rn.rational.has_value()) {
      doc["rational"] = {rn.rational->first, rn.rational->second};
      doc["classification"] = "recurrent";
      doc["period"] = rn.rational->second;
    } else {
      doc["rational"] = nullptr;
      doc["classification"] = "dense";
    }
    std::cout << doc.dump() << "\n";
  } else if (rn.rational.has_value()) {
    std::cout << "alpha=" << rn.rational->first << "/" << rn.rational->second
              << " recurrent period=" << rn.rational->second << "\n";
  } else {
    std::cout << "alpha=" << std::setprecision(10) << rn.alpha << " dense\n";
  }
  return 0;
}

struct TorusEmbedArgs {
  double R = 2.0;
  double r = 1.0;
  double theta = 0.0;
  double phi = 0.0;
  bool as_json = false;
};

int run_torus_embed(const TorusEmbedArgs& args) {
  const storesim::torus::TorusPoint point{
      storesim::torus::reduce_angle(args.theta),
      storesim::torus::reduce_angle(args.phi)};
  const storesim::torus::Vec3 v =
      storesim::torus::embed({args.R, args.r}, point);
  if (args.as_json) {
    std::cout << json{{"x", v.x}, {"y", v.y}, {"z", v.z}}.dump() << "\n";
  } else {
    std::cout << "x=" << v.x << " y=" << v.y << " z=" << v.z << "\n";
  }
  return 0;
}

struct TorusFlowArgs {
  double R = 2.0;
  double r = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double lam = 0.0;
  double mu = 0.0;
  double t = 0.0;
  bool as_json = false;
};

int run_torus_flow(const TorusFlowArgs& args) {
  const storesim::torus::Vec3 v = storesim::torus::flow_position(
      {args.R, args.r}, {args.x0, args.y0, args.lam, args.mu}, args.t);
  if (args.as_json) {
    std::cout << json{{"x", v.x}, {"y", v.y}, {"z", v.z}}.dump() << "\n";
  } else {
    std::cout << "x=" << v.x << " y=" << v.y << " z=" << v.z << "\n";
  }
  return 0;
}

struct TorusIntersectArgs {
  double R = 2.0;
  double r = 1.0;
  std::vector<double> a;  // x0, y0, lam, mu
  std::vector<double> b;
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-3;
  double radius = 0.05;
  bool as_json = false;
};

int run_torus_intersections(const TorusIntersectArgs& args) {
  const storesim::torus::TorusFlow fa{args.a[0], args.a[1], args.a[2],
                                      args.a[3]};
  const storesim::torus::TorusFlow fb{args.b[0], args.b[1], args.b[2],
                                      args.b[3]};
  const storesim::torus::IntersectionResult result =
      storesim::torus::count_intersections({args.R, args.r}, fa, fb, args.t0,
                                           args.t1, args.dt, args.radius);
  if (args.as_json) {
    json events = json::array();
    for (const auto& e : result.events) {
      events.push_back({{"first_time", e.first_time},
                        {"last_time", e.last_time},
                        {"min_distance", e.min_distance}});
    }
    std::cout << json{{"count", result.count()}, {"events", std::move(events)}}
                     .dump()
              << "\n";
  } else {
    std::cout << "count=" << result.count() << "\n";
    for (const auto& e : result.events) {
      std::cout << "event first=" << e.first_time << " last=" << e.last_time
                << " min_distance=" << e.min_distance << "\n";
    }
  }
  return 0;
}

// ---- analyze ------------------------------------------------------------

struct AnalyzeArgs {
  std::string sink;
  double halfwidth = 5.0;
  bool merge = false;
  bool as_json = false;
};

int run_analyze(const AnalyzeArgs& args) {
  const storesim::experiment::AggregateReport report =
      storesim::experiment::aggregate(args.sink, args.halfwidth);
  long long merged = -1;
  if (args.merge) {
    merged = storesim::experiment::write_merged_stream(args.sink);
  }
  if (args.as_json) {
    std::cout << storesim::experiment::aggregate_to_json_string(report) << "\n";
  } else {
    std::cout << "experiment=" << report.experiment_id << "\n";
    for (const auto& job : report.jobs) {
      std::cout << job.job_id << ": sims=" << job.sims_found << "/"
                << job.sims_expected
                << " mean_collisions=" << job.mean_collisions
                << " stddev=" << job.stddev_collisions
                << " mean_total_time_s=" << job.mean_total_time_s
                << " lambda_hat=" << job.lambda_hat << " fit_p=";
      if (job.fit_p_value.has_value()) {
        std::cout << *job.fit_p_value;
      } else {
        std::cout << "n/a (" << job.fit_note << ")";
      }
      std::cout << " min_samples=" << job.min_samples_required
                << " sample_size_ok="
                << (job.sample_size_ok ? "true" : "false") << "\n";
    }
    std::cout << "records=" << report.total_records
              << " orphans=" << report.orphan_records
              << " issues=" << report.issues.size() << "\n";
    for (const auto& issue : report.issues) {
      std::cout << "issue: " << issue << "\n";
    }
  }
  if (merged >= 0 && !args.as_json) {
    std::cout << "merged=" << merged << " -> "
              << (fs::path(args.sink) / "merged.jsonl").string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic store-customer simulator and experiment sweep "
               "toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run one seeded simulation to JSONL");
  simulate->add_option("--layout", sim_args.layout, "Store layout JSON file")
      ->required();
  simulate->add_option("--config", sim_args.config, "Simulation config JSON")
      ->required();
  simulate->add_option("--out", sim_args.out, "Output JSONL path")->required();
  simulate->add_option("--seed", sim_args.seed,
                       "Override the config's RNG seed");
  simulate->add_flag("--json", sim_args.as_json, "Single-line JSON summary");

  SampleSizeArgs size_args;
  CLI::App* samplesize = app.add_subcommand(
      "samplesize", "Minimum replicate count for a target precision");
  CLI::Option* opt_z =
      samplesize->add_option("--z", size_args.z, "Reliability coefficient z");
  samplesize->add_option("--alpha", size_args.alpha, "Significance level")
      ->excludes(opt_z);
  CLI::Option* opt_sigma = samplesize->add_option(
      "--sigma", size_args.sigma, "Population standard deviation");
  samplesize
      ->add_option("--range", size_args.range,
                   "Population range (sigma = range/6)")
      ->excludes(opt_sigma);
  samplesize
      ->add_option("--halfwidth", size_args.halfwidth,
                   "Confidence interval half-length")
      ->required();
  samplesize->add_option("--population", size_args.population,
                         "Finite population size");
  samplesize->add_flag("--json", size_args.as_json, "Single-line JSON output");

  ClusterArgs cluster_args;
  CLI::App* cluster = app.add_subcommand(
      "cluster", "Cluster basket data into customer journeys");
  cluster
      ->add_option("--transactions", cluster_args.transactions,
                   "CSV or JSONL basket file")
      ->required();
  cluster->add_option("--layout", cluster_args.layout, "Store layout JSON")
      ->required();
  CLI::Option* opt_k =
      cluster->add_option("--k", cluster_args.k, "Number of clusters");
  cluster
      ->add_option("--k-range", cluster_args.k_range,
                   "Candidate range A:B, choose k by BIC")
      ->excludes(opt_k);
  cluster->add_option("--seed", cluster_args.seed, "Clustering RNG seed");
  cluster->add_option("--out", cluster_args.out, "Cluster report JSON path")
      ->required();
  cluster->add_flag("--raw", cluster_args.raw,
                    "Cluster raw basket columns instead of similarity rows");
  cluster->add_flag("--json", cluster_args.as_json, "Single-line JSON summary");

  ExperimentArgs exp_args;
  CLI::App* experiment =
      app.add_subcommand("experiment", "Expand and run an experiment manifest");
  experiment->add_option("--manifest", exp_args.manifest, "Manifest JSON path")
      ->required();
  experiment->add_flag("--json", exp_args.as_json, "Single-line JSON summary");
  experiment->add_flag("--quiet", exp_args.quiet, "Suppress progress lines");

  CLI::App* torus = app.add_subcommand("torus", "Torus flow analysis");
  torus->require_subcommand(1);

  TorusRotationArgs rot_args;
  CLI::App* rotation = torus->add_subcommand(
      "rotation", "Rotation number and orbit class of a rigid rotation");
  CLI::Option* opt_p = rotation->add_option("--p", rot_args.p,
                                            "Rotation numerator");
  CLI::Option* opt_q = rotation->add_option("--q", rot_args.q,
                                            "Rotation denominator");
  opt_p->needs(opt_q);
  opt_q->needs(opt_p);
  rotation->add_option("--alpha", rot_args.alpha, "Rotation angle in [0,1)")
      ->excludes(opt_p)
      ->excludes(opt_q);
  rotation->add_option("--iters", rot_args.iters, "Iteration count");
  rotation->add_option("--tol", rot_args.tol, "Rationality tolerance");
  rotation->add_flag("--json", rot_args.as_json, "Single-line JSON output");

  TorusEmbedArgs embed_args;
  CLI::App* embed =
      torus->add_subcommand("embed", "Embed torus angles into 3-D space");
  embed->add_option("--R", embed_args.R, "Major radius");
  embed->add_option("--r", embed_args.r, "Tube radius");
  embed->add_option("--theta", embed_args.theta, "Tube angle, radians")
      ->required();
  embed->add_option("--phi", embed_args.phi, "Axial angle, radians")
      ->required();
  embed->add_flag("--json", embed_args.as_json, "Single-line JSON output");

  TorusFlowArgs flow_args;
  CLI::App* flow =
      torus->add_subcommand("flow", "Position of a linear flow at time t");
  flow->add_option("--R", flow_args.R, "Major radius");
  flow->add_option("--r", flow_args.r, "Tube radius");
  flow->add_option("--x0", flow_args.x0, "Initial theta angle, radians");
  flow->add_option("--y0", flow_args.y0, "Initial phi angle, radians");
  flow->add_option("--lam", flow_args.lam, "Theta velocity, rad/s");
  flow->add_option("--mu", flow_args.mu, "Phi velocity, rad/s");
  flow->add_option("--t", flow_args.t, "Sample time, seconds")->required();
  flow->add_flag("--json", flow_args.as_json, "Single-line JSON output");

  TorusIntersectArgs isect_args;
  CLI::App* intersections = torus->add_subcommand(
      "intersections", "Proximity events between two sampled flows");
  intersections->add_option("--R", isect_args.R, "Major radius");
  intersections->add_option("--r", isect_args.r, "Tube radius");
  intersections
      ->add_option("--a", isect_args.a, "Flow a: x0,y0,lam,mu")
      ->delimiter(',')
      ->expected(4)
      ->required();
  intersections
      ->add_option("--b", isect_args.b, "Flow b: x0,y0,lam,mu")
      ->delimiter(',')
      ->expected(4)
      ->required();
  intersections->add_option("--t0", isect_args.t0, "Window start, seconds");
  intersections->add_option("--t1", isect_args.t1, "Window end, seconds")
      ->required();
  intersections->add_option("--dt", isect_args.dt, "Sample step, seconds");
  intersections->add_option("--radius", isect_args.radius,
                            "Proximity radius in embedded space");
  intersections->add_flag("--json", isect_args.as_json,
                          "Single-line JSON output");

  AnalyzeArgs analyze_args;
  CLI::App* analyze =
      app.add_subcommand("analyze", "Aggregate an experiment sink");
  analyze->add_option("--sink", analyze_args.sink, "Experiment sink directory")
      ->required();
  analyze->add_option("--halfwidth", analyze_args.halfwidth,
                      "Target half-length for the sample-size check");
  analyze->add_flag("--merge", analyze_args.merge,
                    "Also write sink/merged.jsonl with provenance wrappers");
  analyze->add_flag("--json", analyze_args.as_json, "Single-line JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(simulate)) {
      return run_simulate(sim_args);
    }
    if (app.got_subcommand(samplesize)) {
      if (!size_args.z.has_value() && !size_args.alpha.has_value()) {
        throw storesim::ValidationError("one of --z or --alpha is required");
      }
      if (!size_args.sigma.has_value() && !size_args.range.has_value()) {
        throw storesim::ValidationError("one of --sigma or --range is required");
      }
      return run_samplesize(size_args);
    }
    if (app.got_subcommand(cluster)) {
      if (!cluster_args.k.has_value() && cluster_args.k_range.empty()) {
        throw storesim::ValidationError("one of --k or --k-range is required");
      }
      return run_cluster(cluster_args);
    }
    if (app.got_subcommand(experiment)) {
      return run_experiment(exp_args);
    }
    if (app.got_subcommand(torus)) {
      if (torus->got_subcommand(rotation)) {
        if (!rot_args.alpha.has_value() && !rot_args.p.has_value()) {
          throw storesim::ValidationError(
              "one of --alpha or --p/--q is required");
        }
        return run_torus_rotation(rot_args);
      }
      if (torus->got_subcommand(embed)) {
        return run_torus_embed(embed_args);
      }
      if (torus->got_subcommand(flow)) {
        return run_torus_flow(flow_args);
      }
      if (torus->got_subcommand(intersections)) {
        return run_torus_intersections(isect_args);
      }
    }
    if (app.got_subcommand(analyze)) {
      return run_analyze(analyze_args);
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  std::cerr << "no subcommand\n";
  return 1;
}
