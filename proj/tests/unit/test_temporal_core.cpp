#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "stc/error.hpp"
#include "stc/path.hpp"
#include "stc/time_point.hpp"
#include "stc/trace.hpp"
#include "stc/version_key.hpp"

using namespace stc;
using stc::testing::Gen;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an stc::Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("compare_timepoints examples") {
  CHECK(compare_timepoints({100, 0}, {100, 0}) == std::strong_ordering::equal);
  CHECK(compare_timepoints({100, 5}, {101, 0}) == std::strong_ordering::less);
  CHECK(compare_timepoints({100, 2}, {100, 1}) == std::strong_ordering::greater);
}

TEST_CASE("TimePoint order is a strict total order matching (timestamp, sequence)") {
  Gen gen(7);
  for (int i = 0; i < 5000; ++i) {
    TimePoint a = gen.time(5, 3), b = gen.time(5, 3), c = gen.time(5, 3);
    // Exactly one of <, ==, > holds and it matches the lexicographic rule.
    CHECK((a < b) + (a == b) + (a > b) == 1);
    CHECK((a < b) == stc::testing::lex_less(a, b));
    CHECK((a < b) == (b > a));
    if (a < b && b < c) CHECK(a < c);
  }
}

TEST_CASE("TimePoint predecessor and successor are adjacent") {
  CHECK_FALSE(TimePoint{0, 0}.predecessor());
  CHECK(TimePoint{5, 0}.predecessor() == TimePoint{4, TimePoint::kMaxSequence});
  CHECK(TimePoint{5, 3}.predecessor() == TimePoint{5, 2});
  CHECK(TimePoint{5, TimePoint::kMaxSequence}.successor() == TimePoint{6, 0});
  Gen gen(3);
  for (int i = 0; i < 1000; ++i) {
    TimePoint t = gen.time(1000, 5);
    if (auto p = t.predecessor()) CHECK(p->successor() == t);
  }
}

TEST_CASE("parse_timepoint") {
  CHECK(parse_timepoint("100:2") == TimePoint{100, 2});
  CHECK(parse_timepoint("100") == TimePoint{100, TimePoint::kMaxSequence});
  CHECK(parse_timepoint("100", 0) == TimePoint{100, 0});
  CHECK(to_string(TimePoint{7, 1}) == "7:1");
  for (const char* bad : {"", ":", "1:", "x", "1:2:3", "-4", "1:99999999999"}) {
    CHECK(code_of([&] { parse_timepoint(bad); }) == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("path_to_string examples") {
  CHECK(path_to_string(Path::root()) == "/");
  CHECK(path_to_string(Path::root().child("meters", "m42")) == "/meters[m42]");
  const Path slashed = Path::root().child("meters", "a/b");
  CHECK(path_to_string(slashed) == "/meters[a\\/b]");
  CHECK(string_to_path("/meters[a\\/b]") == slashed);
}

TEST_CASE("string_to_path examples and errors") {
  CHECK(string_to_path("/").is_root());
  const Path two = string_to_path("/meters[m42]/samples[s1]");
  REQUIRE(two.depth() == 2);
  CHECK(two.segments()[0] == PathSegment{"meters", "m42"});
  CHECK(two.segments()[1] == PathSegment{"samples", "s1"});

  for (const char* bad : {"meters[m42]", "", "//", "/meters", "/meters[m42", "/meters[]",
                          "/[k]", "/a[b]c", "/a[b]/", "/a[b\\q]", "/a[b\\", "/a[b[c]]",
                          "/a/b[c]"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { string_to_path(bad); }) == ErrorCode::kMalformedPath);
  }
}

TEST_CASE("Path rejects empty names and NUL") {
  CHECK(code_of([] { Path::root().child("", "k"); }) == ErrorCode::kMalformedPath);
  CHECK(code_of([] { Path::root().child("r", ""); }) == ErrorCode::kMalformedPath);
  CHECK(code_of([] { Path::root().child("r", std::string("a\0b", 3)); }) ==
        ErrorCode::kMalformedPath);
}

TEST_CASE("path string form round-trips for randomized names with separators") {
  Gen gen(11);
  for (int i = 0; i < 3000; ++i) {
    const Path p = gen.path(5);
    const std::string s = path_to_string(p);
    CHECK(string_to_path(s) == p);
  }
}

TEST_CASE("Path structure helpers") {
  const Path m = Path::root().child("meters", "m1");
  CHECK(Path::root().is_parent_of(m));
  CHECK_FALSE(m.is_parent_of(Path::root()));
  CHECK_FALSE(Path::root().is_parent_of(m.child("x", "y")));
  CHECK(m.child("x", "y").parent() == m);
  CHECK(m.last_relationship() == "meters");
  CHECK(Path::root().last_relationship().empty());
}

namespace {

Trace sample_trace() {
  Trace t;
  t.path = Path::root().child("meters", "m1");
  t.type_name = "SmartMeter";
  t.attributes["consumption"] = 0.25;
  t.attributes["label"] = std::string("a=b,c");
  t.attributes["online"] = true;
  t.attributes["phase"] = std::int64_t{-3};
  t.relationships["feeds"] = {Path::root().child("meters", "m2"),
                              Path::root().child("meters", "x,y")};
  t.children = {t.path.child("samples", "s1"), t.path.child("samples", "s0")};
  return t;
}

}  // namespace

TEST_CASE("trace text format is bit-exact") {
  const std::string expected =
      "T SmartMeter\n"
      "P /meters[m1]\n"
      "A consumption=d:0.25\n"
      "A label=s:a\\=b\\,c\n"
      "A online=b:true\n"
      "A phase=i:-3\n"
      "R feeds->/meters[m2],/meters[x\\,y]\n"
      "C /meters[m1]/samples[s1]\n"
      "C /meters[m1]/samples[s0]\n"
      "E\n";
  CHECK(encode_trace(sample_trace()) == expected);
  CHECK(decode_trace(expected) == sample_trace());
}

TEST_CASE("empty trace round-trips") {
  Trace t;
  t.type_name = "Grid";
  CHECK(encode_trace(t) == "T Grid\nP /\nE\n");
  CHECK(decode_trace(encode_trace(t)) == t);
}

TEST_CASE("attribute insertion order does not change the encoding") {
  std::vector<std::pair<std::string, AttributeValue>> attrs = {
      {"alpha", std::int64_t{1}}, {"beta", 2.5}, {"gamma", std::string("g")}};
  std::vector<int> order{0, 1, 2};
  std::string first;
  do {
    Trace t;
    t.type_name = "X";
    for (int i : order) t.attributes.insert(attrs[i]);
    const std::string bytes = encode_trace(t);
    if (first.empty()) first = bytes;
    CHECK(bytes == first);
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("every proper prefix of an encoding is MalformedTrace") {
  const std::string bytes = encode_trace(sample_trace());
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    CAPTURE(n);
    CHECK(code_of([&] { decode_trace(std::string_view(bytes).substr(0, n)); }) ==
          ErrorCode::kMalformedTrace);
  }
}

TEST_CASE("corrupt encodings are MalformedTrace") {
  for (const char* bad : {
           "T X\nP /\nE\nextra",           // trailing bytes
           "T X\nE\n",                     // no path line
           "T X\nP /\nA b=i:1\nA a=i:1\nE\n",  // unsorted attributes
           "T X\nP /\nA a=i:1\nA a=i:2\nE\n",  // duplicate attribute
           "T X\nP /\nA a=q:1\nE\n",       // unknown tag
           "T X\nP /\nA a=d:1.50\nE\n",    // non-canonical decimal
           "T X\nP /\nA a=b:yes\nE\n",
           "T X\nP /\nA a=i:1x\nE\n",
           "T X\nP /\nR r->/a[b],\nE\n",   // empty target
           "T X\nP /\nC /a[b]/c[d]\nE\n",  // grandchild listed as child
           "T X\nP /\nC /a[b]\nC /a[b]\nE\n",
           "T X\nP /\nR a->\nC /a[b]\nE\n",  // reference shadows containment
           "T \nP /\nE\n",                 // empty type
           "T X\nP /\nA a=s:\\q\nE\n",     // bad escape
           "T X=Y\nP /\nE\n",              // unescaped '='
       }) {
    CAPTURE(bad);
    CHECK(code_of([&] { decode_trace(bad); }) == ErrorCode::kMalformedTrace);
  }
}

TEST_CASE("random traces round-trip and encoding is injective") {
  Gen gen(5);
  std::vector<std::pair<Trace, std::string>> seen;
  for (int i = 0; i < 400; ++i) {
    const Trace t = gen.trace(gen.path(3));
    const std::string bytes = encode_trace(t);
    CHECK(decode_trace(bytes) == t);
    seen.emplace_back(t, bytes);
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    for (std::size_t j = i + 1; j < seen.size(); ++j) {
      if (seen[i].first != seen[j].first) CHECK(seen[i].second != seen[j].second);
    }
  }
}

TEST_CASE("decimals round-trip exactly") {
  Gen gen(9);
  for (int i = 0; i < 2000; ++i) {
    Trace t;
    t.type_name = "D";
    const double d = std::uniform_real_distribution<double>(-1e9, 1e9)(gen.engine());
    t.attributes["v"] = d;
    CHECK(std::get<double>(decode_trace(encode_trace(t)).attributes.at("v")) == d);
  }
}

TEST_CASE("validate rejects broken traces") {
  Trace t;
  t.type_name = "X";
  t.attributes["nan"] = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { t.validate(); }) == ErrorCode::kInvalidTrace);
}

TEST_CASE("version key encoding preserves (canonical path, time) order") {
  Gen gen(13);
  std::vector<VersionKey> keys;
  for (int i = 0; i < 2000; ++i) {
    // Small alphabets so that shared prefixes are common.
    Path p;
    const std::size_t depth = gen.uniform(0, 3);
    for (std::size_t d = 0; d < depth; ++d) {
      p = p.child(std::string(1, "ab/"[gen.uniform(0, 2)]),
                  std::string(gen.uniform(1, 2), "ab["[gen.uniform(0, 2)]));
    }
    keys.push_back({p, gen.time(3, 2)});
  }

  std::vector<std::size_t> by_bytes(keys.size()), by_fields(keys.size());
  std::iota(by_bytes.begin(), by_bytes.end(), 0);
  std::iota(by_fields.begin(), by_fields.end(), 0);
  std::vector<std::string> encoded;
  for (const auto& k : keys) encoded.push_back(encode_version_key(k));

  std::stable_sort(by_bytes.begin(), by_bytes.end(),
                   [&](auto a, auto b) { return encoded[a] < encoded[b]; });
  std::stable_sort(by_fields.begin(), by_fields.end(), [&](auto a, auto b) {
    const std::string pa = path_to_string(keys[a].path), pb = path_to_string(keys[b].path);
    if (pa != pb) return pa < pb;
    return stc::testing::lex_less(keys[a].time, keys[b].time);
  });
  CHECK(by_bytes == by_fields);

  for (std::size_t i = 0; i < keys.size(); ++i) {
    CHECK(decode_version_key(encoded[i]) == keys[i]);
  }
}

TEST_CASE("version key layout") {
  const std::string k = encode_version_key(Path::root().child("a", "b"), {0x0102, 0x0304});
  const std::string expected = std::string("/a[b]") + '\0' +
                               std::string("\0\0\0\0\0\0\x01\x02\0\0\x03\x04", 12);
  CHECK(k == expected);
  // "/a[b]" sorts before "/a[b]/..." and before "/a[bc]" for every time point.
  const std::string longer = encode_version_key(Path::root().child("a", "bc"), {0, 0});
  const std::string nested =
      encode_version_key(Path::root().child("a", "b").child("c", "d"), {0, 0});
  const std::string latest =
      encode_version_key(Path::root().child("a", "b"), {~0ull, TimePoint::kMaxSequence});
  CHECK(latest < longer);
  CHECK(latest < nested);
}
