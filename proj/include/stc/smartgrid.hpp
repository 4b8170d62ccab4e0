#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "stc/path.hpp"
#include "stc/resolution.hpp"
#include "stc/time_point.hpp"
#include "stc/version_store.hpp"

namespace stc::smartgrid {

// Grid model layout: the root element (type "Grid") contains M elements of
// type "SmartMeter" through the "meters" relationship, keyed m000, m001, ...
// Each meter carries a decimal "consumption" attribute (kWh per interval).
inline constexpr std::string_view kGridType = "Grid";
inline constexpr std::string_view kMeterType = "SmartMeter";
inline constexpr std::string_view kMetersRelationship = "meters";
inline constexpr std::string_view kConsumption = "consumption";

Path meter_path(std::size_t meter_index);

/// Parameters of the synthetic load curve:
/// base + amplitude * sin(2*pi*t/period + phase_i) + N(0, noise), clamped at 0.
struct LoadCurve {
  double base_kwh = 0.5;
  double amplitude_kwh = 0.3;
  double noise_kwh = 0.05;
  std::uint64_t period_ms = 86'400'000;
};

struct WorkloadSpec {
  std::size_t meter_count = 100;
  std::size_t history_length = 1000;
  std::uint64_t sampling_interval_ms = 20 * 60 * 1000;
  std::uint64_t seed = 42;
  LoadCurve curve{};

  std::uint64_t total_values() const noexcept { return meter_count * history_length; }
  /// Throws kInvalidArgument for zero counts or interval.
  void validate() const;
};

struct Sample {
  std::size_t meter;
  TimePoint time;
  double consumption;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Tick-major stream: all meters at timestamp 0, then at one interval, ...
/// Every sample has sequence 0. Deterministic for a given spec.
std::vector<Sample> generate_workload(const WorkloadSpec& spec);

/// Time of the last tick.
TimePoint final_tick(const WorkloadSpec& spec);

enum class Strategy { kSampling, kContinuum };

std::string_view to_string(Strategy s) noexcept;
/// "sampling" or "continuum"; throws kInvalidArgument otherwise.
Strategy parse_strategy(std::string_view name);

struct IngestResult {
  std::uint64_t entries_written = 0;
  double insert_time_ms = 0.0;
};

/// Writes the root once and one meter version per sample. Flushes once at the
/// end. Throws kStoreNotEmpty on a non-empty store.
IngestResult ingest_continuum(VersionStore& store, const WorkloadSpec& spec);

/// Writes the entire model (root and every meter with its latest value) at
/// every tick and flushes the store after each tick. Throws kStoreNotEmpty.
IngestResult ingest_sampling(VersionStore& store, const WorkloadSpec& spec);

IngestResult ingest(VersionStore& store, const WorkloadSpec& spec, Strategy s);

struct ReasonerVerdict {
  Path meter_path;
  bool increased = false;
  double recent_mean = 0.0;
  double baseline_mean = 0.0;

  friend bool operator==(const ReasonerVerdict&, const ReasonerVerdict&) = default;
};

/// Verdict over a window of k values, oldest first.
ReasonerVerdict judge_window(const Path& meter, const std::vector<double>& window,
                             double threshold_factor);

/// Load-increase check over the last k values of a meter, collected by
/// resolving the meter at `at` and stepping back k-1 times with previous().
/// k must be even and >= 2. Throws kInsufficientHistory.
ReasonerVerdict reason_last_k(const NavigationContext& ctx, const Path& meter,
                              TimePoint at, std::size_t k, double threshold_factor);

/// The same check as seen by a snapshot-sampled model: steps back over the k
/// last snapshots of the root and re-enters each snapshot through the root's
/// containment to reach the meter.
ReasonerVerdict reason_last_k_snapshots(const NavigationContext& ctx, const Path& meter,
                                        TimePoint at, std::size_t k,
                                        double threshold_factor);

struct BenchOptions {
  std::size_t k = 20;
  double threshold_factor = 1.1;
  /// Directory for the temporary .kvlog file; the system temp dir if empty.
  std::filesystem::path work_dir{};
  bool keep_store = false;
};

struct BenchReport {
  Strategy strategy = Strategy::kContinuum;
  std::size_t meter_count = 0;
  std::size_t history_length = 0;
  std::uint64_t entries_written = 0;
  double insert_time_ms = 0.0;
  double reasoning_time_ms = 0.0;
  std::vector<ReasonerVerdict> verdicts;
};

/// Ingests into a fresh file-backed store with the chosen strategy, runs one
/// untimed warm-up reasoning pass and then one timed pass over every meter at
/// the final tick.
BenchReport run_benchmark(const WorkloadSpec& spec, Strategy strategy,
                          const BenchOptions& options = {});

/// `warmup` discarded runs, then `runs` measured ones. Insert and reasoning
/// times are the per-column medians; verdicts come from the last run.
BenchReport run_benchmark_median(const WorkloadSpec& spec, Strategy strategy,
                                 const BenchOptions& options, std::size_t runs,
                                 std::size_t warmup = 1);

inline constexpr std::string_view kCsvHeader =
    "strategy,meter_count,history_length,entries_written,insert_time_ms,reasoning_time_ms";

/// One CSV row without trailing newline; times with 0.1 ms resolution.
std::string to_csv_row(const BenchReport& r);

/// Appends the row to `out`, writing the header first when the file is new
/// or empty. Throws kIoFailure.
void append_csv(const std::filesystem::path& out, const std::vector<BenchReport>& rows);

}  // namespace stc::smartgrid
