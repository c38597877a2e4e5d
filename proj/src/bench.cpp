//
// SPDX-License-Identifier: Apache-2.0
//

#include "qubo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qubo/error.hpp"
#include "qubo/io.hpp"
#include "qubo/rng.hpp"

namespace qubo::bench {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return parts;
}

template <typename T> T parse_number(std::string_view text,
                                     std::string_view what) {
  T value{};
  const auto *end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw FormatError("bad " + std::string(what) + " value '" +
                      std::string(text) + "'");
  }
  return value;
}

std::string join_doubles(const std::vector<double> &values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k)
    out += (k ? "," : "") + format_double(values[k]);
  return out;
}

} // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void validate(const ExperimentSpec &spec) {
  if (spec.sizes.empty() || spec.thresholds.empty() || spec.backends.empty())
    throw ValidationError("sizes, thresholds and backends must be non-empty");
  for (const auto n : spec.sizes)
    if (n == 0)
      throw ValidationError("sizes must be positive");
  for (const double t : spec.thresholds)
    if (!(t > 0.0) || !std::isfinite(t))
      throw ValidationError("thresholds must be positive");
  if (spec.repeats == 0 || spec.instances_per_size == 0)
    throw ValidationError("repeats and instances_per_size must be positive");
  if (spec.max_steps == 0 || spec.sweeps == 0 || spec.reads == 0)
    throw ValidationError("max_steps, sweeps and reads must be positive");
  if (!(spec.slope > 0.0))
    throw ValidationError("slope must be positive");
}

ExperimentSpec parse_spec(std::istream &in) {
  ExperimentSpec spec;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#')
      continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw FormatError("line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));

    if (key == "sizes") {
      spec.sizes.clear();
      for (const auto &v : split(value, ','))
        spec.sizes.push_back(parse_number<std::size_t>(v, key));
    } else if (key == "thresholds") {
      spec.thresholds.clear();
      for (const auto &v : split(value, ','))
        spec.thresholds.push_back(parse_number<double>(v, key));
    } else if (key == "backends") {
      spec.backends.clear();
      for (const auto &v : split(value, ','))
        spec.backends.push_back(parse_backend(v));
    } else if (key == "repeats") {
      spec.repeats = parse_number<std::size_t>(value, key);
    } else if (key == "instances_per_size") {
      spec.instances_per_size = parse_number<std::size_t>(value, key);
    } else if (key == "seed_base") {
      spec.seed_base = parse_number<std::uint64_t>(value, key);
    } else if (key == "output_dir") {
      spec.output_dir = value;
    } else if (key == "threads") {
      spec.threads = parse_number<std::size_t>(value, key);
    } else if (key == "slope") {
      spec.slope = parse_number<double>(value, key);
    } else if (key == "max_steps") {
      spec.max_steps = parse_number<std::size_t>(value, key);
    } else if (key == "sweeps") {
      spec.sweeps = parse_number<std::size_t>(value, key);
    } else if (key == "reads") {
      spec.reads = parse_number<std::size_t>(value, key);
    } else {
      throw FormatError("line " + std::to_string(lineno) + ": unknown key '" +
                        key + "'");
    }
  }
  return spec;
}

ExperimentSpec load_spec(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  return parse_spec(in);
}

std::string format_spec(const ExperimentSpec &spec) {
  std::ostringstream out;
  out << "sizes = ";
  for (std::size_t k = 0; k < spec.sizes.size(); ++k)
    out << (k ? "," : "") << spec.sizes[k];
  out << "\nthresholds = " << join_doubles(spec.thresholds);
  out << "\nbackends = ";
  for (std::size_t k = 0; k < spec.backends.size(); ++k)
    out << (k ? "," : "") << to_string(spec.backends[k]);
  out << "\nrepeats = " << spec.repeats
      << "\ninstances_per_size = " << spec.instances_per_size
      << "\nseed_base = " << spec.seed_base;
  if (!spec.output_dir.empty())
    out << "\noutput_dir = " << spec.output_dir.string();
  if (spec.threads != 0)
    out << "\nthreads = " << spec.threads;
  out << "\nslope = " << format_double(spec.slope)
      << "\nmax_steps = " << spec.max_steps << "\nsweeps = " << spec.sweeps
      << "\nreads = " << spec.reads << '\n';
  return out.str();
}

std::uint64_t instance_seed(std::uint64_t seed_base, std::size_t n,
                            std::size_t index) {
  return splitmix64(seed_base ^ splitmix64(n)) + index;
}

SolverConfig cell_config(const ExperimentSpec &spec, Backend backend,
                         double threshold) {
  SolverConfig config = default_config(backend);
  config.threshold = threshold;
  config.max_steps = spec.max_steps;
  config.slope = spec.slope;
  config.seed = spec.seed_base;
  config.anneal.schedule.sweeps = spec.sweeps;
  config.anneal.reads = spec.reads;
  return config;
}

fs::path matrix_path(const fs::path &out_dir, std::size_t n,
                     std::size_t instance_id) {
  return out_dir / "matrices" /
         ("n" + std::to_string(n) + "_i" + std::to_string(instance_id) +
          ".qbin");
}

fs::path solution_path(const fs::path &out_dir, const BenchRecord &record) {
  return out_dir / "solutions" /
         ("n" + std::to_string(record.n) + "_i" +
          std::to_string(record.instance_id) + "_" +
          std::string(to_string(record.backend)) + "_t" +
          format_double(record.threshold) + "_s" +
          std::to_string(record.seed) + ".json");
}

void write_records_csv(std::ostream &out,
                       const std::vector<BenchRecord> &records) {
  out << kCsvHeader << '\n';
  for (const auto &r : records) {
    out << r.instance_id << ',' << to_string(r.backend) << ',' << r.n << ','
        << format_double(r.threshold) << ',' << r.seed << ','
        << format_double(r.energy) << ',' << r.steps << ','
        << format_double(r.wall_time_s) << ',' << to_string(r.stop_reason)
        << '\n';
  }
}

void write_records_csv(const fs::path &path,
                       const std::vector<BenchRecord> &records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  write_records_csv(out, records);
  if (!out)
    throw IoError("write failed: " + path.string());
}

std::vector<BenchRecord> read_records_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader)
    throw FormatError("records CSV header mismatch");
  std::vector<BenchRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty())
      continue;
    const auto cols = split(line, ',');
    if (cols.size() != 9) {
      throw FormatError("records CSV line " + std::to_string(lineno) +
                        ": expected 9 columns");
    }
    BenchRecord r;
    r.instance_id = parse_number<std::size_t>(cols[0], "instance_id");
    r.backend = parse_backend(cols[1]);
    r.n = parse_number<std::size_t>(cols[2], "n");
    r.threshold = parse_number<double>(cols[3], "threshold");
    r.seed = parse_number<std::uint64_t>(cols[4], "seed");
    r.energy = parse_number<double>(cols[5], "energy");
    r.steps = parse_number<std::size_t>(cols[6], "steps");
    r.wall_time_s = parse_number<double>(cols[7], "wall_time_s");
    r.stop_reason = parse_stop_reason(cols[8]);
    records.push_back(r);
  }
  return records;
}

std::vector<BenchRecord> read_records_csv(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  return read_records_csv(in);
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0)
    return requested;
  if (const char *env = std::getenv("QF_THREADS")) {
    const auto value = parse_number<std::size_t>(trim(env), "QF_THREADS");
    if (value == 0)
      throw ValidationError("QF_THREADS must be positive");
    return value;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

struct Job {
  std::size_t size_index;
  std::size_t instance;
  Backend backend;
  double threshold;
  std::size_t repeat;
};

void write_manifest(const ExperimentSpec &spec, std::size_t threads) {
  nlohmann::ordered_json doc;
  doc["tool"] = "qubobench";
  doc["version"] = kToolVersion;
  doc["spec"] = format_spec(spec);
  doc["threads"] = threads;
  doc["csv_header"] = kCsvHeader;
  doc["seeds"] = {
      {"instance", "splitmix64(seed_base ^ splitmix64(n)) + instance_id"},
      {"solver", "seed_base + repeat"}};
  const fs::path path = spec.output_dir / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out)
    throw IoError("write failed: " + path.string());
}

} // namespace

std::vector<BenchRecord> run_experiment(const ExperimentSpec &spec) {
  validate(spec);
  if (spec.output_dir.empty())
    throw ValidationError("output_dir is required");

  const std::size_t threads = resolve_threads(spec.threads);
  std::error_code ec;
  fs::create_directories(spec.output_dir / "matrices", ec);
  fs::create_directories(spec.output_dir / "solutions", ec);
  if (ec)
    throw IoError("cannot create " + spec.output_dir.string() + ": " +
                  ec.message());
  // Fails fast on an unwritable directory before any solve starts.
  write_manifest(spec, threads);

  std::vector<std::vector<QuboMatrix>> matrices(spec.sizes.size());
  for (std::size_t s = 0; s < spec.sizes.size(); ++s) {
    const std::size_t n = spec.sizes[s];
    for (std::size_t i = 0; i < spec.instances_per_size; ++i) {
      matrices[s].push_back(
          generate_qubo(n, instance_seed(spec.seed_base, n, i)));
      io::write_qbin(matrix_path(spec.output_dir, n, i), matrices[s].back());
    }
  }

  // Each repeat of a cell is its own job; the seeds are those of
  // solve_repeated (seed_base + repeat).
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < spec.sizes.size(); ++s)
    for (std::size_t i = 0; i < spec.instances_per_size; ++i)
      for (const Backend b : spec.backends)
        for (const double t : spec.thresholds)
          for (std::size_t k = 0; k < spec.repeats; ++k)
            jobs.push_back({s, i, b, t, k});

  std::vector<BenchRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= jobs.size())
        return;
      const Job &job = jobs[idx];
      const QuboMatrix &q = matrices[job.size_index][job.instance];

      BenchRecord &rec = records[idx];
      rec.instance_id = job.instance;
      rec.backend = job.backend;
      rec.n = q.size();
      rec.threshold = job.threshold;

      SolverConfig config = cell_config(spec, job.backend, job.threshold);
      config.seed = spec.seed_base + job.repeat;
      rec.seed = config.seed;
      try {
        const SolveResult result = solve(q, config);
        rec.energy = result.energy;
        rec.steps = result.steps;
        rec.wall_time_s = result.wall_time_s;
        rec.stop_reason = result.stop_reason;
        io::write_solution(solution_path(spec.output_dir, rec), result.bits,
                           result.energy);
      } catch (const std::exception &) {
        rec.energy = std::nan("");
        rec.steps = 0;
        rec.wall_time_s = 0.0;
        rec.stop_reason = StopReason::kNumericFailure;
      }
    }
  };

  const std::size_t pool = std::min(threads, jobs.size());
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(pool);
    for (std::size_t w = 0; w < pool; ++w)
      workers.emplace_back(worker);
  }

  write_records_csv(spec.output_dir / "records.csv", records);
  return records;
}

} // namespace qubo::bench
