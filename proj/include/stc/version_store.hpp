#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stc/path.hpp"
#include "stc/time_point.hpp"
#include "stc/trace.hpp"

namespace stc {

struct StoreStats {
  std::uint64_t entry_count = 0;
  std::uint64_t distinct_paths = 0;
  std::uint64_t bytes_written = 0;

  friend bool operator==(const StoreStats&, const StoreStats&) = default;
};

struct Version {
  TimePoint time;
  Trace trace;

  friend bool operator==(const Version&, const Version&) = default;
};

/// Ordered (Path, TimePoint) -> Trace storage.
///
/// Single writer, many readers: const member functions may run concurrently
/// with each other, but never concurrently with put() or flush().
class VersionStore {
 public:
  virtual ~VersionStore() = default;

  /// Later puts with the same key overwrite. Throws kPathMismatch when
  /// trace.path != path and kInvalidTrace when the trace is invalid.
  virtual void put(const Path& path, TimePoint time, const Trace& trace) = 0;

  virtual std::optional<Trace> resolve_exact(const Path& path,
                                             TimePoint time) const = 0;

  /// Greatest version with time <= `time`.
  virtual std::optional<Version> floor_version(const Path& path,
                                               TimePoint time) const = 0;

  /// Smallest version with time >= `time`.
  virtual std::optional<Version> ceiling_version(const Path& path,
                                                 TimePoint time) const = 0;

  /// Strictly ascending.
  virtual std::vector<TimePoint> versions_of(const Path& path) const = 0;

  virtual StoreStats stats() const = 0;

  /// Makes all puts so far durable. No-op for volatile stores.
  virtual void flush() {}

  /// (timestamp, 1 + highest sequence already used at that timestamp), or
  /// (timestamp, 0) when the path has no version there.
  TimePoint next_sequence(const Path& path, std::uint64_t timestamp) const;
};

namespace detail {

// Ordered index over encoded version keys, shared by both backends.
template <typename Value>
class KeyIndex {
 public:
  using Map = std::map<std::string, Value, std::less<>>;
  using const_iterator = typename Map::const_iterator;

  // Returns true when the key was new.
  bool upsert(std::string key, Value value);

  const Value* find(std::string_view key) const;
  std::optional<const_iterator> floor(const Path& path, TimePoint time) const;
  std::optional<const_iterator> ceiling(const Path& path, TimePoint time) const;
  std::vector<TimePoint> times_of(const Path& path) const;

  std::uint64_t size() const noexcept { return map_.size(); }
  std::uint64_t distinct_paths() const noexcept { return distinct_paths_; }
  static TimePoint time_of(const const_iterator& it);

 private:
  Map map_;
  std::uint64_t distinct_paths_ = 0;
};

}  // namespace detail

/// Volatile store over an ordered map; traces are held decoded.
class InMemoryStore final : public VersionStore {
 public:
  void put(const Path& path, TimePoint time, const Trace& trace) override;
  std::optional<Trace> resolve_exact(const Path& path, TimePoint time) const override;
  std::optional<Version> floor_version(const Path& path, TimePoint time) const override;
  std::optional<Version> ceiling_version(const Path& path, TimePoint time) const override;
  std::vector<TimePoint> versions_of(const Path& path) const override;
  StoreStats stats() const override;

 private:
  detail::KeyIndex<Trace> index_;
  std::uint64_t bytes_written_ = 0;
};

/// Durable store: an append-only `.kvlog` record file plus an in-memory
/// ordered index of record locations, rebuilt by a full scan on open.
///
/// Record layout: <u32 BE key length><key bytes><u32 BE value length><value
/// bytes>, where the key is an encoded version key and the value an encoded
/// trace. The last record for a key wins. An incomplete record at the tail
/// (torn write) is truncated away on open.
class FileLogStore final : public VersionStore {
 public:
  /// Opens or creates the log. Throws Error(kIoFailure).
  explicit FileLogStore(std::filesystem::path file);
  ~FileLogStore() override;

  FileLogStore(const FileLogStore&) = delete;
  FileLogStore& operator=(const FileLogStore&) = delete;

  void put(const Path& path, TimePoint time, const Trace& trace) override;
  std::optional<Trace> resolve_exact(const Path& path, TimePoint time) const override;
  std::optional<Version> floor_version(const Path& path, TimePoint time) const override;
  std::optional<Version> ceiling_version(const Path& path, TimePoint time) const override;
  std::vector<TimePoint> versions_of(const Path& path) const override;
  StoreStats stats() const override;

  /// Writes buffered records and syncs them to disk.
  void flush() override;

  /// Flushes and releases the file. Further use throws kIoFailure.
  void close();

  const std::filesystem::path& file() const noexcept { return file_; }

 private:
  struct Location {
    std::uint64_t offset;  // of the value bytes
    std::uint32_t length;
  };

  void rebuild_index();
  void write_pending();
  std::string read_value(const Location& loc) const;
  void ensure_open() const;

  std::filesystem::path file_;
  int fd_ = -1;
  detail::KeyIndex<Location> index_;
  std::uint64_t file_size_ = 0;  // bytes handed to the OS
  std::string pending_;           // appended but not yet written
  std::uint64_t bytes_written_ = 0;
};

}  // namespace stc
