#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "stc/error.hpp"
#include "stc/resolution.hpp"
#include "stc/smartgrid.hpp"
#include "stc/version_store.hpp"

namespace stc::cli {

namespace {

namespace fs = std::filesystem;
namespace sg = stc::smartgrid;

struct Options {
  std::string store;

  // ingest / bench workload
  std::size_t meters = 100;
  std::size_t history = 1000;
  std::uint64_t interval_ms = 20 * 60 * 1000;
  std::uint64_t seed = 42;
  std::string strategy = "continuum";
  bool force = false;

  // query / walk
  std::string path;
  std::string at;
  std::string op = "previous";
  std::size_t repeat = 1;

  // bench
  std::size_t k = 20;
  double threshold = 1.1;
  std::string out_csv;
  std::vector<std::string> strategies{"sampling", "continuum"};
  std::size_t runs = 1;
  std::size_t warmup = 0;
  std::string work_dir;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedPath:
    case ErrorCode::kInvalidArgument:
      return kUsage;
    case ErrorCode::kNotYetExisting:
    case ErrorCode::kNoPredecessor:
    case ErrorCode::kNoSuccessor:
      return kNotResolved;
    default:
      return kFailure;
  }
}

std::string decimal(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed1(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 1);
  return std::string(buf, res.ptr);
}

void print_handle(std::ostream& out, const ElementHandle& h, std::size_t depth = 0) {
  out << std::string(2 * depth, ' ') << path_to_string(h.path)
      << " resolved_at=" << to_string(h.resolved_at) << " now=" << to_string(h.now);
  auto it = h.trace.attributes.find(std::string(sg::kConsumption));
  if (it != h.trace.attributes.end()) {
    if (const double* v = std::get_if<double>(&it->second)) out << " consumption=" << decimal(*v);
  }
  out << '\n';
}

void print_tree(std::ostream& out, const HandleTree& tree, std::size_t depth = 0) {
  print_handle(out, tree.handle, depth);
  for (const auto& c : tree.children) print_tree(out, c, depth + 1);
}

std::optional<int> require_store(const Options& o, std::ostream& err) {
  if (o.store.empty()) {
    err << "--store is required\n";
    return kUsage;
  }
  if (!fs::exists(o.store)) {
    err << "store not found: " << o.store << '\n';
    return kFailure;
  }
  return std::nullopt;
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.store.empty()) {
    err << "--store is required\n";
    return kUsage;
  }
  const fs::path store_path(o.store);
  if (fs::exists(store_path)) {
    if (!o.force) {
      err << "store exists: " << o.store << " (use --force to replace it)\n";
      return kFailure;
    }
    fs::remove(store_path);
  }
  const fs::path parent = store_path.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    err << "directory does not exist: " << parent.string() << '\n';
    return kFailure;
  }

  sg::WorkloadSpec spec;
  spec.meter_count = o.meters;
  spec.history_length = o.history;
  spec.sampling_interval_ms = o.interval_ms;
  spec.seed = o.seed;

  FileLogStore store(store_path);
  const auto result = sg::ingest(store, spec, sg::parse_strategy(o.strategy));
  store.close();
  out << "entries=" << result.entries_written << '\n'
      << "insert_time_ms=" << fixed1(result.insert_time_ms) << '\n';
  return kOk;
}

int cmd_query(const Options& o, std::ostream& out, std::ostream& err) {
  if (auto rc = require_store(o, err)) return *rc;
  const Path path = string_to_path(o.path);
  const TimePoint at = parse_timepoint(o.at);
  FileLogStore store(o.store);
  const NavigationContext ctx(store);
  const ElementHandle h = ctx.resolve(path, at);
  out << encode_trace(h.trace) << "resolved_at=" << to_string(h.resolved_at)
      << " now=" << to_string(h.now) << '\n';
  return kOk;
}

int cmd_walk(const Options& o, std::ostream& out, std::ostream& err) {
  if (auto rc = require_store(o, err)) return *rc;

  enum class Op { kPrevious, kNext, kShift, kDeepShift } op;
  TimePoint target{};
  if (o.op == "previous") {
    op = Op::kPrevious;
  } else if (o.op == "next") {
    op = Op::kNext;
  } else if (o.op.rfind("shift:", 0) == 0) {
    op = Op::kShift;
    target = parse_timepoint(o.op.substr(6));
  } else if (o.op.rfind("deepshift:", 0) == 0) {
    op = Op::kDeepShift;
    target = parse_timepoint(o.op.substr(10));
  } else {
    err << "unknown --op '" << o.op << "' (previous|next|shift:<t>|deepshift:<t>)\n";
    return kUsage;
  }

  const Path path = string_to_path(o.path);
  const TimePoint at = parse_timepoint(o.at);
  FileLogStore store(o.store);
  const NavigationContext ctx(store);

  ElementHandle h = ctx.resolve(path, at);
  print_handle(out, h);
  for (std::size_t i = 0; i < o.repeat; ++i) {
    switch (op) {
      case Op::kPrevious: h = ctx.previous(h); break;
      case Op::kNext: h = ctx.next(h); break;
      case Op::kShift: h = ctx.shift(h, target); break;
      case Op::kDeepShift: {
        HandleTree tree = ctx.deep_shift(h, target);
        print_tree(out, tree);
        h = tree.handle;
        continue;
      }
    }
    print_handle(out, h);
  }
  return kOk;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  sg::WorkloadSpec spec;
  spec.meter_count = o.meters;
  spec.history_length = o.history;
  spec.sampling_interval_ms = o.interval_ms;
  spec.seed = o.seed;

  sg::BenchOptions options;
  options.k = o.k;
  options.threshold_factor = o.threshold;
  options.work_dir = o.work_dir;

  std::vector<sg::BenchReport> reports;
  for (const auto& name : o.strategies) {
    reports.push_back(
        sg::run_benchmark_median(spec, sg::parse_strategy(name), options, o.runs, o.warmup));
  }

  out << sg::kCsvHeader << '\n';
  for (const auto& r : reports) out << sg::to_csv_row(r) << '\n';
  if (!o.out_csv.empty()) sg::append_csv(o.out_csv, reports);

  auto find = [&reports](sg::Strategy s) -> const sg::BenchReport* {
    for (const auto& r : reports) {
      if (r.strategy == s) return &r;
    }
    return nullptr;
  };
  const auto* sampling = find(sg::Strategy::kSampling);
  const auto* continuum = find(sg::Strategy::kContinuum);
  if (sampling && continuum) {
    out << "insert_speedup=" << fixed1(sampling->insert_time_ms / continuum->insert_time_ms)
        << '\n'
        << "reasoning_speedup="
        << fixed1(sampling->reasoning_time_ms / continuum->reasoning_time_ms) << '\n'
        << "verdicts_identical=" << (sampling->verdicts == continuum->verdicts ? "true" : "false")
        << '\n';
    if (sampling->verdicts != continuum->verdicts) {
      err << "strategies disagree on reasoner verdicts\n";
      return kFailure;
    }
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Temporal object-graph store: ingest, query, walk and benchmark"};
  app.name("stc");
  app.require_subcommand(1);
  app.add_option("--store", o.store, "Path of the .kvlog store file");

  auto workload_flags = [&o](CLI::App* cmd) {
    cmd->add_option("--meters", o.meters, "Number of smart meters")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--history", o.history, "Values per meter")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--interval-ms", o.interval_ms, "Sampling interval in milliseconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  };

  auto* ingest = app.add_subcommand("ingest", "Generate a smart-grid workload into a store");
  ingest->fallthrough();
  workload_flags(ingest);
  ingest->add_option("--strategy", o.strategy, "Storage strategy")
      ->check(CLI::IsMember({"continuum", "sampling"}))
      ->capture_default_str();
  ingest->add_flag("--force", o.force, "Replace an existing store");

  auto* query = app.add_subcommand("query", "Resolve one element at a point in time");
  query->fallthrough();
  query->add_option("--path", o.path, "Element path, e.g. /meters[m000]")->required();
  query->add_option("--at", o.at, "Time as <timestamp>[:<sequence>]")->required();

  auto* walk = app.add_subcommand("walk", "Apply previous/next/shift/deepshift repeatedly");
  walk->fallthrough();
  walk->add_option("--path", o.path, "Element path")->required();
  walk->add_option("--at", o.at, "Start time as <timestamp>[:<sequence>]")->required();
  walk->add_option("--op", o.op, "previous | next | shift:<t> | deepshift:<t>")
      ->capture_default_str();
  walk->add_option("--repeat", o.repeat, "Number of steps")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Compare sampling and continuum strategies");
  workload_flags(bench);
  bench->add_option("--k", o.k, "Reasoning window")->capture_default_str();
  bench->add_option("--threshold", o.threshold, "Load increase factor")->capture_default_str();
  bench->add_option("--out", o.out_csv, "CSV file to append results to");
  bench->add_option("--strategies", o.strategies, "Comma-separated strategies")
      ->delimiter(',')
      ->check(CLI::IsMember({"continuum", "sampling"}));
  bench->add_option("--runs", o.runs, "Measured runs per strategy (median reported)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--warmup", o.warmup, "Discarded runs per strategy")->capture_default_str();
  bench->add_option("--work-dir", o.work_dir, "Directory for temporary stores");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    app.failure_message(CLI::FailureMessage::help);
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) return cmd_ingest(o, out, err);
    if (*query) return cmd_query(o, out, err);
    if (*walk) return cmd_walk(o, out, err);
    return cmd_bench(o, out, err);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace stc::cli
