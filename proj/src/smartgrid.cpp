#include "stc/smartgrid.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "stc/error.hpp"

namespace stc::smartgrid {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Trace meter_trace(const Path& path, double consumption) {
  Trace t;
  t.path = path;
  t.type_name = std::string(kMeterType);
  t.attributes.emplace(std::string(kConsumption), consumption);
  return t;
}

Trace grid_trace(std::size_t meter_count) {
  Trace t;
  t.path = Path::root();
  t.type_name = std::string(kGridType);
  t.children.reserve(meter_count);
  for (std::size_t i = 0; i < meter_count; ++i) t.children.push_back(meter_path(i));
  return t;
}

void require_empty(const VersionStore& store) {
  if (store.stats().entry_count != 0) {
    throw Error(ErrorCode::kStoreNotEmpty, "ingest needs an empty store");
  }
}

double consumption_of(const ElementHandle& h) {
  auto it = h.trace.attributes.find(std::string(kConsumption));
  const double* v = it == h.trace.attributes.end() ? nullptr : std::get_if<double>(&it->second);
  if (!v) {
    throw Error(ErrorCode::kInvalidArgument,
                path_to_string(h.path) + " at " + to_string(h.resolved_at) +
                    " has no decimal consumption");
  }
  return *v;
}

void check_window(std::size_t k) {
  if (k < 2 || k % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "window size must be even and >= 2, got " + std::to_string(k));
  }
}

[[noreturn]] void insufficient(const Path& meter, std::size_t have, std::size_t k) {
  throw Error(ErrorCode::kInsufficientHistory,
              path_to_string(meter) + " has " + std::to_string(have) + " of " +
                  std::to_string(k) + " required values");
}

}  // namespace

Path meter_path(std::size_t meter_index) {
  char key[32];
  std::snprintf(key, sizeof key, "m%03zu", meter_index);
  return Path::root().child(std::string(kMetersRelationship), key);
}

void WorkloadSpec::validate() const {
  if (meter_count == 0 || history_length == 0 || sampling_interval_ms == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "meter count, history length and interval must be positive");
  }
  if (curve.period_ms == 0) throw Error(ErrorCode::kInvalidArgument, "zero load period");
}

std::vector<Sample> generate_workload(const WorkloadSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<double> phase(spec.meter_count);
  for (auto& p : phase) p = phase_dist(rng);

  const auto& c = spec.curve;
  std::vector<Sample> out;
  out.reserve(spec.total_values());
  for (std::size_t k = 0; k < spec.history_length; ++k) {
    const std::uint64_t t = k * spec.sampling_interval_ms;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(t % c.period_ms) /
                         static_cast<double>(c.period_ms);
    for (std::size_t m = 0; m < spec.meter_count; ++m) {
      double v = c.base_kwh + c.amplitude_kwh * std::sin(angle + phase[m]) +
                 c.noise_kwh * noise(rng);
      out.push_back({m, TimePoint{t, 0}, std::max(0.0, v)});
    }
  }
  return out;
}

TimePoint final_tick(const WorkloadSpec& spec) {
  return {(spec.history_length - 1) * spec.sampling_interval_ms, 0};
}

std::string_view to_string(Strategy s) noexcept {
  return s == Strategy::kSampling ? "sampling" : "continuum";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "sampling") return Strategy::kSampling;
  if (name == "continuum") return Strategy::kContinuum;
  throw Error(ErrorCode::kInvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

IngestResult ingest_continuum(VersionStore& store, const WorkloadSpec& spec) {
  require_empty(store);
  const auto samples = generate_workload(spec);
  std::vector<Path> meters;
  for (std::size_t m = 0; m < spec.meter_count; ++m) meters.push_back(meter_path(m));

  IngestResult result;
  const auto start = Clock::now();
  store.put(Path::root(), samples.front().time, grid_trace(spec.meter_count));
  ++result.entries_written;
  for (const auto& s : samples) {
    store.put(meters[s.meter], s.time, meter_trace(meters[s.meter], s.consumption));
    ++result.entries_written;
  }
  store.flush();
  result.insert_time_ms = elapsed_ms(start);
  return result;
}

IngestResult ingest_sampling(VersionStore& store, const WorkloadSpec& spec) {
  require_empty(store);
  const auto samples = generate_workload(spec);
  std::vector<Path> meters;
  for (std::size_t m = 0; m < spec.meter_count; ++m) meters.push_back(meter_path(m));

  IngestResult result;
  std::vector<double> latest(spec.meter_count, 0.0);
  const auto start = Clock::now();
  const Trace grid = grid_trace(spec.meter_count);
  std::size_t i = 0;
  while (i < samples.size()) {
    const TimePoint tick = samples[i].time;
    for (; i < samples.size() && samples[i].time == tick; ++i) {
      latest[samples[i].meter] = samples[i].consumption;
    }
    store.put(Path::root(), tick, grid);
    ++result.entries_written;
    for (std::size_t m = 0; m < spec.meter_count; ++m) {
      store.put(meters[m], tick, meter_trace(meters[m], latest[m]));
      ++result.entries_written;
    }
    store.flush();
  }
  result.insert_time_ms = elapsed_ms(start);
  return result;
}

IngestResult ingest(VersionStore& store, const WorkloadSpec& spec, Strategy s) {
  return s == Strategy::kSampling ? ingest_sampling(store, spec) : ingest_continuum(store, spec);
}

ReasonerVerdict judge_window(const Path& meter, const std::vector<double>& window,
                             double threshold_factor) {
  check_window(window.size());
  const std::size_t half = window.size() / 2;
  double baseline = 0.0;
  double recent = 0.0;
  for (std::size_t i = 0; i < half; ++i) baseline += window[i];
  for (std::size_t i = half; i < window.size(); ++i) recent += window[i];
  baseline /= static_cast<double>(half);
  recent /= static_cast<double>(half);
  return {meter, recent > threshold_factor * baseline, recent, baseline};
}

ReasonerVerdict reason_last_k(const NavigationContext& ctx, const Path& meter, TimePoint at,
                              std::size_t k, double threshold_factor) {
  check_window(k);
  std::vector<double> window;
  window.reserve(k);
  try {
    ElementHandle h = ctx.resolve(meter, at);
    window.push_back(consumption_of(h));
    while (window.size() < k) {
      h = ctx.previous(h);
      window.push_back(consumption_of(h));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotYetExisting && e.code() != ErrorCode::kNoPredecessor) throw;
    insufficient(meter, window.size(), k);
  }
  std::reverse(window.begin(), window.end());
  return judge_window(meter, window, threshold_factor);
}

ReasonerVerdict reason_last_k_snapshots(const NavigationContext& ctx, const Path& meter,
                                        TimePoint at, std::size_t k,
                                        double threshold_factor) {
  check_window(k);
  std::vector<double> window;
  window.reserve(k);
  try {
    ElementHandle snapshot = ctx.resolve(meter.parent(), at);
    while (true) {
      bool found = false;
      for (const auto& h : ctx.navigate(snapshot, meter.last_relationship())) {
        if (h.path == meter) {
          window.push_back(consumption_of(h));
          found = true;
          break;
        }
      }
      if (!found) insufficient(meter, window.size(), k);
      if (window.size() == k) break;
      snapshot = ctx.previous(snapshot);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotYetExisting && e.code() != ErrorCode::kNoPredecessor &&
        e.code() != ErrorCode::kUnknownRelationship) {
      throw;
    }
    insufficient(meter, window.size(), k);
  }
  std::reverse(window.begin(), window.end());
  return judge_window(meter, window, threshold_factor);
}

BenchReport run_benchmark(const WorkloadSpec& spec, Strategy strategy,
                          const BenchOptions& options) {
  spec.validate();
  check_window(options.k);

  static std::atomic<unsigned> counter{0};
  const auto dir =
      options.work_dir.empty() ? std::filesystem::temp_directory_path() : options.work_dir;
  const auto file = dir / ("stc-bench-" + std::string(to_string(strategy)) + "-" +
                           std::to_string(::getpid()) + "-" + std::to_string(counter++) +
                           ".kvlog");
  std::filesystem::remove(file);

  BenchReport report;
  report.strategy = strategy;
  report.meter_count = spec.meter_count;
  report.history_length = spec.history_length;
  {
    FileLogStore store(file);
    const IngestResult ingested = ingest(store, spec, strategy);
    report.entries_written = ingested.entries_written;
    report.insert_time_ms = ingested.insert_time_ms;

    const NavigationContext ctx(store);
    const TimePoint at = final_tick(spec);
    std::vector<Path> meters;
    for (std::size_t m = 0; m < spec.meter_count; ++m) meters.push_back(meter_path(m));
    auto reason = strategy == Strategy::kSampling ? &reason_last_k_snapshots : &reason_last_k;

    for (const auto& m : meters) reason(ctx, m, at, options.k, options.threshold_factor);

    report.verdicts.reserve(meters.size());
    const auto start = Clock::now();
    for (const auto& m : meters) {
      report.verdicts.push_back(reason(ctx, m, at, options.k, options.threshold_factor));
    }
    report.reasoning_time_ms = elapsed_ms(start);
    store.close();
  }
  if (!options.keep_store) std::filesystem::remove(file);
  return report;
}

BenchReport run_benchmark_median(const WorkloadSpec& spec, Strategy strategy,
                                 const BenchOptions& options, std::size_t runs,
                                 std::size_t warmup) {
  if (runs == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one run");
  for (std::size_t i = 0; i < warmup; ++i) run_benchmark(spec, strategy, options);

  std::vector<double> inserts;
  std::vector<double> reasonings;
  BenchReport last;
  for (std::size_t i = 0; i < runs; ++i) {
    last = run_benchmark(spec, strategy, options);
    inserts.push_back(last.insert_time_ms);
    reasonings.push_back(last.reasoning_time_ms);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  };
  last.insert_time_ms = median(inserts);
  last.reasoning_time_ms = median(reasonings);
  return last;
}

std::string to_csv_row(const BenchReport& r) {
  auto fixed1 = [](double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 1);
    return std::string(buf, res.ptr);
  };
  return std::string(to_string(r.strategy)) + "," + std::to_string(r.meter_count) + "," +
         std::to_string(r.history_length) + "," + std::to_string(r.entries_written) + "," +
         fixed1(r.insert_time_ms) + "," + fixed1(r.reasoning_time_ms);
}

void append_csv(const std::filesystem::path& out, const std::vector<BenchReport>& rows) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(out, ec) || std::filesystem::file_size(out, ec) == 0;
  std::ofstream f(out, std::ios::app);
  if (!f) throw Error(ErrorCode::kIoFailure, "cannot open " + out.string());
  if (fresh) f << kCsvHeader << '\n';
  for (const auto& r : rows) f << to_csv_row(r) << '\n';
  if (!f.flush()) throw Error(ErrorCode::kIoFailure, "cannot write " + out.string());
}

}  // namespace stc::smartgrid
