#include "stc/version_store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "stc/error.hpp"
#include "stc/version_key.hpp"

namespace stc {

TimePoint VersionStore::next_sequence(const Path& path, std::uint64_t timestamp) const {
  auto latest = floor_version(path, {timestamp, TimePoint::kMaxSequence});
  if (!latest || latest->time.timestamp != timestamp) return {timestamp, 0};
  if (latest->time.sequence == TimePoint::kMaxSequence) {
    throw Error(ErrorCode::kInvalidArgument,
                "sequence space exhausted at " + std::to_string(timestamp) + " for " +
                    path_to_string(path));
  }
  return {timestamp, latest->time.sequence + 1};
}

namespace detail {

namespace {

bool same_path(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         a.substr(0, a.size() - kTimePointBytes) == b.substr(0, b.size() - kTimePointBytes);
}

bool has_prefix(std::string_view key, std::string_view prefix) {
  return key.substr(0, prefix.size()) == prefix;
}

}  // namespace

template <typename Value>
bool KeyIndex<Value>::upsert(std::string key, Value value) {
  auto [it, inserted] = map_.insert_or_assign(std::move(key), std::move(value));
  if (inserted) {
    bool seen = (it != map_.begin() && same_path(std::prev(it)->first, it->first)) ||
                (std::next(it) != map_.end() && same_path(std::next(it)->first, it->first));
    if (!seen) ++distinct_paths_;
  }
  return inserted;
}

template <typename Value>
const Value* KeyIndex<Value>::find(std::string_view key) const {
  auto it = map_.find(key);
  return it == map_.end() ? nullptr : &it->second;
}

template <typename Value>
auto KeyIndex<Value>::floor(const Path& path, TimePoint time) const
    -> std::optional<const_iterator> {
  std::string key = encode_version_key(path, time);
  auto it = map_.upper_bound(key);
  if (it == map_.begin()) return std::nullopt;
  --it;
  if (!has_prefix(it->first, std::string_view(key).substr(0, key.size() - kTimePointBytes))) {
    return std::nullopt;
  }
  return it;
}

template <typename Value>
auto KeyIndex<Value>::ceiling(const Path& path, TimePoint time) const
    -> std::optional<const_iterator> {
  std::string key = encode_version_key(path, time);
  auto it = map_.lower_bound(key);
  if (it == map_.end() ||
      !has_prefix(it->first, std::string_view(key).substr(0, key.size() - kTimePointBytes))) {
    return std::nullopt;
  }
  return it;
}

template <typename Value>
std::vector<TimePoint> KeyIndex<Value>::times_of(const Path& path) const {
  std::string prefix = encode_path_prefix(path);
  std::vector<TimePoint> out;
  for (auto it = map_.lower_bound(prefix); it != map_.end() && has_prefix(it->first, prefix);
       ++it) {
    out.push_back(time_of(it));
  }
  return out;
}

template <typename Value>
TimePoint KeyIndex<Value>::time_of(const const_iterator& it) {
  std::string_view key = it->first;
  return decode_timepoint(key.substr(key.size() - kTimePointBytes));
}

}  // namespace detail

namespace {

void check_put(const Path& path, const Trace& trace) {
  if (trace.path != path) {
    throw Error(ErrorCode::kPathMismatch,
                "trace for " + path_to_string(trace.path) + " put under " + path_to_string(path));
  }
  trace.validate();
}

}  // namespace

// ---------------------------------------------------------------------------
// InMemoryStore

void InMemoryStore::put(const Path& path, TimePoint time, const Trace& trace) {
  check_put(path, trace);
  std::string key = encode_version_key(path, time);
  bytes_written_ += key.size() + encode_trace(trace).size();
  index_.upsert(std::move(key), trace);
}

std::optional<Trace> InMemoryStore::resolve_exact(const Path& path, TimePoint time) const {
  if (const Trace* t = index_.find(encode_version_key(path, time))) return *t;
  return std::nullopt;
}

std::optional<Version> InMemoryStore::floor_version(const Path& path, TimePoint time) const {
  auto it = index_.floor(path, time);
  if (!it) return std::nullopt;
  return Version{index_.time_of(*it), (*it)->second};
}

std::optional<Version> InMemoryStore::ceiling_version(const Path& path, TimePoint time) const {
  auto it = index_.ceiling(path, time);
  if (!it) return std::nullopt;
  return Version{index_.time_of(*it), (*it)->second};
}

std::vector<TimePoint> InMemoryStore::versions_of(const Path& path) const {
  return index_.times_of(path);
}

StoreStats InMemoryStore::stats() const {
  return {index_.size(), index_.distinct_paths(), bytes_written_};
}

// ---------------------------------------------------------------------------
// FileLogStore

namespace {

constexpr std::size_t kWriteBatch = 1 << 20;

[[noreturn]] void io_failure(const std::filesystem::path& file, const std::string& what) {
  throw Error(ErrorCode::kIoFailure,
              file.string() + ": " + what + (errno ? std::string(" (") + std::strerror(errno) + ")" : ""));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xff));
  }
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

}  // namespace

FileLogStore::FileLogStore(std::filesystem::path file) : file_(std::move(file)) {
  errno = 0;
  fd_ = ::open(file_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) io_failure(file_, "cannot open");
  try {
    rebuild_index();
  } catch (...) {
    ::close(fd_);
    fd_ = -1;
    throw;
  }
}

FileLogStore::~FileLogStore() {
  if (fd_ < 0) return;
  try {
    flush();
  } catch (const Error&) {
    // Destructors cannot report; callers wanting the error use close().
  }
  ::close(fd_);
}

void FileLogStore::rebuild_index() {
  struct stat st {};
  if (::fstat(fd_, &st) != 0) io_failure(file_, "cannot stat");
  std::string data(static_cast<std::size_t>(st.st_size), '\0');
  std::size_t got = 0;
  while (got < data.size()) {
    ssize_t n = ::pread(fd_, data.data() + got, data.size() - got, static_cast<off_t>(got));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) io_failure(file_, "read failed during index rebuild");
    got += static_cast<std::size_t>(n);
  }

  std::size_t pos = 0;
  while (pos < data.size()) {
    const std::size_t start = pos;
    if (data.size() - pos < 4) break;
    std::uint32_t klen = get_u32(data.data() + pos);
    pos += 4;
    if (data.size() - pos < std::uint64_t{klen} + 4) {
      pos = start;
      break;
    }
    std::string key = data.substr(pos, klen);
    pos += klen;
    std::uint32_t vlen = get_u32(data.data() + pos);
    pos += 4;
    if (data.size() - pos < vlen) {
      pos = start;
      break;
    }
    if (key.size() < kTimePointBytes + 2 || key[key.size() - kTimePointBytes - 1] != '\0') {
      errno = 0;
      io_failure(file_, "corrupt record key at offset " + std::to_string(start));
    }
    index_.upsert(std::move(key), Location{pos, vlen});
    pos += vlen;
  }

  if (pos < data.size()) {
    // Torn tail from an interrupted append.
    if (::ftruncate(fd_, static_cast<off_t>(pos)) != 0) io_failure(file_, "cannot truncate");
  }
  file_size_ = pos;
}

void FileLogStore::ensure_open() const {
  if (fd_ < 0) {
    errno = 0;
    io_failure(file_, "store is closed");
  }
}

void FileLogStore::put(const Path& path, TimePoint time, const Trace& trace) {
  ensure_open();
  check_put(path, trace);
  std::string key = encode_version_key(path, time);
  std::string value = encode_trace(trace);

  const std::uint64_t record_start = file_size_ + pending_.size();
  put_u32(pending_, static_cast<std::uint32_t>(key.size()));
  pending_ += key;
  put_u32(pending_, static_cast<std::uint32_t>(value.size()));
  pending_ += value;
  const std::uint64_t value_offset = record_start + 8 + key.size();
  bytes_written_ += 8 + key.size() + value.size();
  index_.upsert(std::move(key), Location{value_offset, static_cast<std::uint32_t>(value.size())});

  if (pending_.size() >= kWriteBatch) write_pending();
}

void FileLogStore::write_pending() {
  std::size_t done = 0;
  while (done < pending_.size()) {
    ssize_t n = ::pwrite(fd_, pending_.data() + done, pending_.size() - done,
                         static_cast<off_t>(file_size_ + done));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) io_failure(file_, "write failed");
    done += static_cast<std::size_t>(n);
  }
  file_size_ += pending_.size();
  pending_.clear();
}

void FileLogStore::flush() {
  ensure_open();
  write_pending();
  if (::fdatasync(fd_) != 0) io_failure(file_, "sync failed");
}

void FileLogStore::close() {
  if (fd_ < 0) return;
  flush();
  if (::close(fd_) != 0) {
    fd_ = -1;
    io_failure(file_, "close failed");
  }
  fd_ = -1;
}

std::string FileLogStore::read_value(const Location& loc) const {
  if (loc.offset >= file_size_) {
    return pending_.substr(loc.offset - file_size_, loc.length);
  }
  std::string out(loc.length, '\0');
  std::size_t got = 0;
  while (got < out.size()) {
    ssize_t n = ::pread(fd_, out.data() + got, out.size() - got,
                        static_cast<off_t>(loc.offset + got));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) io_failure(file_, "read failed");
    got += static_cast<std::size_t>(n);
  }
  return out;
}

std::optional<Trace> FileLogStore::resolve_exact(const Path& path, TimePoint time) const {
  ensure_open();
  if (const Location* loc = index_.find(encode_version_key(path, time))) {
    return decode_trace(read_value(*loc));
  }
  return std::nullopt;
}

std::optional<Version> FileLogStore::floor_version(const Path& path, TimePoint time) const {
  ensure_open();
  auto it = index_.floor(path, time);
  if (!it) return std::nullopt;
  return Version{index_.time_of(*it), decode_trace(read_value((*it)->second))};
}

std::optional<Version> FileLogStore::ceiling_version(const Path& path, TimePoint time) const {
  ensure_open();
  auto it = index_.ceiling(path, time);
  if (!it) return std::nullopt;
  return Version{index_.time_of(*it), decode_trace(read_value((*it)->second))};
}

std::vector<TimePoint> FileLogStore::versions_of(const Path& path) const {
  ensure_open();
  return index_.times_of(path);
}

StoreStats FileLogStore::stats() const {
  return {index_.size(), index_.distinct_paths(), bytes_written_};
}

}  // namespace stc
