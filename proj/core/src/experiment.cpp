#include "storesim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "config_json.hpp"
#include "storesim/errors.hpp"
#include "storesim/jsonl.hpp"
#include "storesim/poisson.hpp"
#include "storesim/rng.hpp"
#include "storesim/samplesize.hpp"
#include "storesim/sim_engine.hpp"
#include "storesim/store_layout.hpp"
#include "storesim/uuid.hpp"

namespace storesim::experiment {

namespace {

using nlohmann::json;

// Window length for the pooled collision-rate goodness-of-fit.
constexpr double kFitWindowSeconds = 60.0;
constexpr double kSampleSizeAlpha = 0.05;

ParamValue param_from_json(const json& value) {
  if (value.is_boolean()) {
    return value.get<bool>();
  }
  if (value.is_number_integer() || value.is_number_unsigned()) {
    return value.get<long long>();
  }
  if (value.is_number_float()) {
    return value.get<double>();
  }
  if (value.is_string()) {
    return value.get<std::string>();
  }
  throw ParseError("manifest: grid values must be scalars");
}

json param_to_json(const ParamValue& value) {
  return std::visit([](const auto& v) { return json(v); }, value);
}

std::filesystem::path resolve_against(const std::filesystem::path& base,
                                      const std::string& path) {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

std::string param_value_str(const ParamValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          std::ostringstream out;
          out << v;
          return out.str();
        }
      },
      value);
}

ExperimentManifest manifest_from_json_string(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ParseError("manifest: malformed JSON");
  }
  static const std::set<std::string> known{
      "experiment_id", "layout", "grid",        "replicates",
      "base_seed",     "sink",   "parallelism",
  };
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) {
      throw ParseError("manifest: unknown key: " + key);
    }
  }
  for (const auto& key : {"experiment_id", "layout", "grid", "replicates",
                          "base_seed", "sink"}) {
    if (!doc.contains(key)) {
      throw ParseError(std::string("manifest: missing key: ") + key);
    }
  }

  ExperimentManifest m;
  m.experiment_id = doc.at("experiment_id").get<std::string>();
  if (m.experiment_id.empty()) {
    throw ValidationError("manifest: experiment_id must be non-empty");
  }
  m.layout = doc.at("layout").get<std::string>();
  m.sink = doc.at("sink").get<std::string>();
  m.replicates = doc.at("replicates").get<int>();
  if (m.replicates < 1) {
    throw ValidationError("manifest: replicates must be at least 1");
  }
  m.base_seed = doc.at("base_seed").get<std::uint64_t>();
  m.parallelism = doc.value("parallelism", 1);
  if (m.parallelism < 1) {
    throw ValidationError("manifest: parallelism must be at least 1");
  }

  const json& grid = doc.at("grid");
  if (!grid.is_object() || grid.empty()) {
    throw ValidationError("manifest: grid must be a non-empty object");
  }
  for (const auto& [name, values] : grid.items()) {
    if (!values.is_array()) {
      throw ParseError("manifest: grid." + name + " must be an array");
    }
    std::vector<ParamValue> list;
    for (const auto& v : values) {
      list.push_back(param_from_json(v));
    }
    m.grid.emplace_back(name, std::move(list));
  }
  std::sort(m.grid.begin(), m.grid.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("manifest not found: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ExperimentManifest m = manifest_from_json_string(buffer.str());
  const auto base = path.has_parent_path() ? path.parent_path()
                                           : std::filesystem::path(".");
  m.layout = resolve_against(base, m.layout).string();
  m.sink = resolve_against(base, m.sink).string();
  return m;
}

std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& job_id,
                          int replicate) {
  std::uint64_t state = base_seed ^ fnv1a64(job_id);
  const std::uint64_t mixed = splitmix64(state);
  state ^= static_cast<std::uint64_t>(replicate) * 0x9e3779b97f4a7c15ULL;
  return mixed ^ splitmix64(state);
}

std::vector<JobRecord> expand(const ExperimentManifest& manifest) {
  std::size_t total = 1;
  for (const auto& [name, values] : manifest.grid) {
    if (name == "seed") {
      throw ValidationError(
          "manifest: grid may not set seed; per-sim seeds derive from "
          "base_seed");
    }
    total *= values.size();  // an empty value list yields zero jobs
  }
  if (total == 0) {
    return {};
  }

  std::vector<JobRecord> jobs;
  jobs.reserve(total);
  std::vector<std::size_t> odo(manifest.grid.size(), 0);
  for (std::size_t index = 0; index < total; ++index) {
    JobRecord job;
    job.experiment_id = manifest.experiment_id;
    char buf[32];
    std::snprintf(buf, sizeof buf, "job-%04zu", index);
    job.job_id = buf;
    job.config = SimConfig{};
    for (std::size_t p = 0; p < manifest.grid.size(); ++p) {
      const auto& [name, values] = manifest.grid[p];
      const ParamValue& value = values[odo[p]];
      detail::apply_config_param(job.config, name, param_to_json(value));
      job.params.emplace_back(name, value);
    }
    job.config.validate();
    for (int r = 0; r < manifest.replicates; ++r) {
      SimRef ref;
      ref.replicate = r;
      ref.seed = derive_seed(manifest.base_seed, job.job_id, r);
      ref.sim_id = uuid5(storesim_namespace(),
                         manifest.experiment_id + "/" + job.job_id + "/" +
                             std::to_string(r))
                       .str();
      job.sims.push_back(std::move(ref));
    }
    jobs.push_back(std::move(job));

    // Odometer: last parameter varies fastest, so jobs come out in
    // lexicographic (param name, value order) sequence.
    for (std::size_t p = manifest.grid.size(); p-- > 0;) {
      if (++odo[p] < manifest.grid[p].second.size()) {
        break;
      }
      odo[p] = 0;
    }
  }
  return jobs;
}

namespace {

json manifest_to_json(const ExperimentManifest& manifest) {
  json grid;
  for (const auto& [name, values] : manifest.grid) {
    json list = json::array();
    for (const auto& v : values) {
      list.push_back(param_to_json(v));
    }
    grid[name] = std::move(list);
  }
  return json{{"experiment_id", manifest.experiment_id},
              {"layout", manifest.layout},
              {"grid", std::move(grid)},
              {"replicates", manifest.replicates},
              {"base_seed", manifest.base_seed},
              {"parallelism", manifest.parallelism},
              {"sink", manifest.sink}};
}

json jobs_to_json(const std::vector<JobRecord>& jobs) {
  json out = json::array();
  for (const auto& job : jobs) {
    json params;
    for (const auto& [name, value] : job.params) {
      params[name] = param_to_json(value);
    }
    json sims = json::array();
    for (const auto& sim : job.sims) {
      sims.push_back({{"sim_id", sim.sim_id},
                      {"seed", sim.seed},
                      {"replicate", sim.replicate}});
    }
    out.push_back({{"experiment_id", job.experiment_id},
                   {"job_id", job.job_id},
                   {"params", std::move(params)},
                   {"config", detail::config_to_json(job.config)},
                   {"sims", std::move(sims)}});
  }
  return out;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw ParseError("cannot write: " + path.string());
  }
  out << text;
  if (!out) {
    throw ParseError("write failed: " + path.string());
  }
}

}  // namespace

ExecutionReport execute(const ExperimentManifest& manifest,
                        const std::vector<JobRecord>& jobs,
                        std::ostream* progress) {
  namespace fs = std::filesystem;
  const fs::path sink(manifest.sink);
  fs::create_directories(sink);
  write_text_file(sink / "manifest.json", manifest_to_json(manifest).dump(2));
  write_text_file(sink / "jobs.json", jobs_to_json(jobs).dump(2));

  struct Task {
    const JobRecord* job;
    const SimRef* sim;
  };
  std::vector<Task> tasks;
  for (const auto& job : jobs) {
    for (const auto& sim : job.sims) {
      tasks.push_back({&job, &sim});
    }
  }

  ExecutionReport report;
  report.total = static_cast<int>(tasks.size());
  if (tasks.empty()) {
    return report;
  }

  const store::StoreLayout layout = store::load_layout(manifest.layout);

  std::atomic<std::size_t> next{0};
  std::atomic<int> done{0};
  std::atomic<int> failed{0};
  std::mutex failures_mutex;
  std::vector<std::pair<std::string, std::string>> failures;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) {
        return;
      }
      const Task& task = tasks[i];
      SimConfig config = task.job->config;
      config.seed = task.sim->seed;
      const fs::path out = sink / task.job->experiment_id /
                           task.job->job_id / (task.sim->sim_id + ".jsonl");
      try {
        engine::JsonlSimSink file_sink(out);
        engine::run(layout, config, &file_sink, task.sim->sim_id);
        done.fetch_add(1);
      } catch (const std::exception& e) {
        failed.fetch_add(1);
        std::lock_guard<std::mutex> lock(failures_mutex);
        failures.emplace_back(task.sim->sim_id, e.what());
      }
    }
  };

  const int pool = std::min<int>(manifest.parallelism,
                                 static_cast<int>(tasks.size()));
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (int i = 0; i < pool; ++i) {
    threads.emplace_back(worker);
  }

  using clock = std::chrono::steady_clock;
  auto last_line = clock::now();
  while (done.load() + failed.load() < report.total) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (progress != nullptr &&
        clock::now() - last_line >= std::chrono::seconds(1)) {
      const int d = done.load();
      const int f = failed.load();
      *progress << "progress: done=" << d << " running="
                << std::min<int>(pool, report.total - d - f)
                << " failed=" << f << std::endl;
      last_line = clock::now();
    }
  }
  for (auto& t : threads) {
    t.join();
  }

  report.completed = done.load();
  report.failed = failed.load();
  std::sort(failures.begin(), failures.end());
  report.failures = std::move(failures);
  if (!report.failures.empty()) {
    std::ostringstream lines;
    for (const auto& [sim_id, error] : report.failures) {
      lines << json{{"sim_id", sim_id}, {"error", error}}.dump() << "\n";
    }
    write_text_file(sink / manifest.experiment_id / "failures.jsonl",
                    lines.str());
  }
  if (progress != nullptr) {
    *progress << "progress: done=" << report.completed << " running=0"
              << " failed=" << report.failed << std::endl;
  }
  return report;
}

namespace {

struct SimStats {
  long long collisions = 0;
  double mean_agent_total_s = 0.0;
  double duration_s = 0.0;
  std::vector<double> event_times;  // seconds
  bool has_summary = false;
};

double sample_stddev(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) {
    return 0.0;
  }
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

AggregateReport aggregate(const std::filesystem::path& sink_dir,
                          double halfwidth) {
  namespace fs = std::filesystem;
  if (!(halfwidth > 0.0)) {
    throw ValidationError("aggregate: halfwidth must be positive");
  }
  if (!fs::exists(sink_dir / "jobs.json") ||
      !fs::exists(sink_dir / "manifest.json")) {
    throw ValidationError("no records");
  }

  std::ifstream jobs_in(sink_dir / "jobs.json");
  json jobs_doc = json::parse(jobs_in, nullptr, false);
  if (jobs_doc.is_discarded() || !jobs_doc.is_array()) {
    throw ParseError("jobs.json: malformed JSON");
  }

  AggregateReport report;
  {
    std::ifstream manifest_in(sink_dir / "manifest.json");
    json manifest_doc = json::parse(manifest_in, nullptr, false);
    if (manifest_doc.is_discarded()) {
      throw ParseError("manifest.json: malformed JSON");
    }
    report.experiment_id = manifest_doc.value("experiment_id", "");
  }

  // Referential base: sim -> job and job -> (config, expected sims).
  struct JobInfo {
    SimConfig config;
    std::set<std::string> sims;
  };
  std::map<std::string, JobInfo> job_info;      // by job_id
  std::map<std::string, std::string> sim_job;   // sim_id -> job_id
  for (const auto& job : jobs_doc) {
    JobInfo info;
    info.config = detail::config_from_json(job.at("config"));
    for (const auto& sim : job.at("sims")) {
      const auto sim_id = sim.at("sim_id").get<std::string>();
      info.sims.insert(sim_id);
      sim_job[sim_id] = job.at("job_id").get<std::string>();
    }
    job_info.emplace(job.at("job_id").get<std::string>(), std::move(info));
  }

  std::map<std::string, std::map<std::string, SimStats>> per_job;  // job->sim
  const fs::path exp_dir = sink_dir / report.experiment_id;

  std::vector<fs::path> files;
  if (fs::exists(exp_dir)) {
    for (const auto& entry : fs::recursive_directory_iterator(exp_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl" &&
          entry.path().filename() != "failures.jsonl") {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());

  for (const auto& file : files) {
    const std::string sim_id = file.stem().string();
    const std::string dir_job = file.parent_path().filename().string();
    const auto mapped = sim_job.find(sim_id);
    const bool known = mapped != sim_job.end() && mapped->second == dir_job &&
                       job_info.count(dir_job) > 0;

    std::ifstream in(file);
    std::string line;
    long long line_no = 0;
    SimStats stats;
    double tick_length = 0.1;
    if (known) {
      tick_length = job_info[dir_job].config.tick_length;
    }
    long long last_tick = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) {
        continue;
      }
      ++report.total_records;
      if (!known) {
        ++report.orphan_records;
        continue;
      }
      json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.is_object()) {
        report.issues.push_back(file.string() + ":" +
                                std::to_string(line_no) + ": corrupt record");
        continue;
      }
      if (rec.contains("agent_a")) {  // collision event
        if (rec.value("sim_id", "") != sim_id) {
          ++report.orphan_records;
          continue;
        }
        ++stats.collisions;
        const auto start = rec.value("start_tick", 0LL);
        stats.event_times.push_back(static_cast<double>(start) * tick_length);
        last_tick = std::max(last_tick, rec.value("end_tick", 0LL));
      } else if (rec.contains("timers")) {  // summary
        if (rec.value("sim_id", "") != sim_id) {
          ++report.orphan_records;
          continue;
        }
        stats.has_summary = true;
        double total = 0.0;
        long long agents = 0;
        for (const auto& t : rec.at("timers")) {
          total += t.value("total_s", 0.0);
          ++agents;
        }
        stats.mean_agent_total_s = agents > 0 ? total / agents : 0.0;
      } else if (rec.contains("tick")) {  // metrics frame
        last_tick = std::max(last_tick, rec.value("tick", 0LL));
      } else {
        report.issues.push_back(file.string() + ":" +
                                std::to_string(line_no) +
                                ": unrecognized record");
      }
    }
    if (!known) {
      report.issues.push_back(file.string() + ": not in jobs.json");
      continue;
    }
    stats.duration_s = static_cast<double>(last_tick + 1) * tick_length;
    if (!stats.has_summary) {
      report.issues.push_back(file.string() + ": missing summary record");
    }
    per_job[dir_job].emplace(sim_id, std::move(stats));
  }

  if (report.total_records == 0) {
    throw ValidationError("no records");
  }

  for (const auto& [job_id, info] : job_info) {
    JobAggregate agg;
    agg.job_id = job_id;
    agg.sims_expected = static_cast<int>(info.sims.size());

    std::vector<double> collisions;
    std::vector<double> times;
    double exposure = 0.0;
    std::size_t events = 0;
    collision::CollisionHistogram pooled;
    pooled.window_length = kFitWindowSeconds;
    const auto found = per_job.find(job_id);
    if (found != per_job.end()) {
      for (const auto& [sim_id, stats] : found->second) {
        if (!stats.has_summary) {
          continue;  // incomplete sim: listed in issues, not aggregated
        }
        collisions.push_back(static_cast<double>(stats.collisions));
        times.push_back(stats.mean_agent_total_s);
        exposure += stats.duration_s;
        events += static_cast<std::size_t>(stats.collisions);
        const collision::CollisionHistogram h = collision::histogram_from_times(
            stats.event_times, kFitWindowSeconds, stats.duration_s);
        for (const auto& [count, windows] : h.counts) {
          pooled.counts[count] += windows;
        }
      }
    }
    agg.sims_found = static_cast<int>(collisions.size());
    if (agg.sims_found > 0) {
      double sum = 0.0;
      for (double c : collisions) {
        sum += c;
      }
      agg.mean_collisions = sum / agg.sims_found;
      agg.stddev_collisions = sample_stddev(collisions, agg.mean_collisions);
      double time_sum = 0.0;
      for (double t : times) {
        time_sum += t;
      }
      agg.mean_total_time_s = time_sum / agg.sims_found;
      agg.lambda_hat =
          exposure > 0.0
              ? collision::estimate_lambda(events, exposure).lambda
              : 0.0;
      try {
        const collision::FitResult fit =
            collision::fit_test(pooled, collision::PoissonModel{agg.lambda_hat});
        agg.fit_p_value = fit.p_value;
      } catch (const ValidationError& e) {
        agg.fit_note = e.what();
      }
      if (agg.stddev_collisions > 0.0) {
        stats::SampleSizeParams params;
        params.z = stats::z_from_alpha(kSampleSizeAlpha);
        params.sigma = agg.stddev_collisions;
        params.half_length = halfwidth;
        agg.min_samples_required = stats::min_samples(params).n;
      } else {
        agg.min_samples_required = 1;  // zero observed variance
      }
      agg.sample_size_ok = agg.sims_found >= agg.min_samples_required;
    }
    report.jobs.push_back(std::move(agg));
  }
  return report;
}

std::string aggregate_to_json_string(const AggregateReport& report) {
  json jobs = json::array();
  for (const auto& job : report.jobs) {
    json j{{"job_id", job.job_id},
           {"sims_expected", job.sims_expected},
           {"sims_found", job.sims_found},
           {"mean_collisions", job.mean_collisions},
           {"stddev_collisions", job.stddev_collisions},
           {"mean_total_time_s", job.mean_total_time_s},
           {"lambda_hat", job.lambda_hat},
           {"min_samples_required", job.min_samples_required},
           {"sample_size_ok", job.sample_size_ok}};
    if (job.fit_p_value.has_value()) {
      j["fit_p_value"] = *job.fit_p_value;
    } else {
      j["fit_p_value"] = nullptr;
      j["fit_note"] = job.fit_note;
    }
    jobs.push_back(std::move(j));
  }
  const json doc{{"experiment_id", report.experiment_id},
                 {"jobs", std::move(jobs)},
                 {"issues", report.issues},
                 {"total_records", report.total_records},
                 {"orphan_records", report.orphan_records}};
  return doc.dump();
}

long long write_merged_stream(const std::filesystem::path& sink_dir) {
  namespace fs = std::filesystem;
  std::ifstream manifest_in(sink_dir / "manifest.json");
  if (!manifest_in) {
    throw ValidationError("no records");
  }
  json manifest_doc = json::parse(manifest_in, nullptr, false);
  if (manifest_doc.is_discarded()) {
    throw ParseError("manifest.json: malformed JSON");
  }
  const std::string experiment_id = manifest_doc.value("experiment_id", "");
  const fs::path exp_dir = sink_dir / experiment_id;

  std::vector<fs::path> files;
  if (fs::exists(exp_dir)) {
    for (const auto& entry : fs::recursive_directory_iterator(exp_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl" &&
          entry.path().filename() != "failures.jsonl") {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());

  JsonlWriter merged(sink_dir / "merged.jsonl");
  long long count = 0;
  for (const auto& file : files) {
    const std::string sim_id = file.stem().string();
    const std::string job_id = file.parent_path().filename().string();
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) {
        continue;
      }
      json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded()) {
        continue;
      }
      merged.write_line(json{{"experiment_id", experiment_id},
                             {"job_id", job_id},
                             {"sim_id", sim_id},
                             {"record", std::move(rec)}}
                            .dump());
      ++count;
    }
  }
  return count;
}

}  // namespace storesim::experiment
