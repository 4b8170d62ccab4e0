#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>

#include "stc/error.hpp"
#include "stc/resolution.hpp"
#include "stc/smartgrid.hpp"
#include "stc/trace.hpp"
#include "stc/version_store.hpp"

namespace py = pybind11;
using namespace stc;

namespace {

// Python bool is an int subclass, so the variant caster would store True as
// the integer 1. Convert by hand to keep the four tags distinct.
AttributeValue to_attribute(const py::handle& v) {
  if (py::isinstance<py::bool_>(v)) return v.cast<bool>();
  if (py::isinstance<py::int_>(v)) return v.cast<std::int64_t>();
  if (py::isinstance<py::float_>(v)) return v.cast<double>();
  if (py::isinstance<py::str>(v)) return v.cast<std::string>();
  throw py::type_error("attribute values must be str, int, float or bool");
}

py::object from_attribute(const AttributeValue& v) {
  return std::visit([](const auto& x) -> py::object { return py::cast(x); }, v);
}

py::dict attributes_of(const Trace& t) {
  py::dict out;
  for (const auto& [name, value] : t.attributes) out[py::str(name)] = from_attribute(value);
  return out;
}

void set_attributes(Trace& t, const py::dict& d) {
  std::map<std::string, AttributeValue> attrs;
  for (const auto& [k, v] : d) attrs.emplace(k.cast<std::string>(), to_attribute(v));
  t.attributes = std::move(attrs);
}

py::object version_or_none(const std::optional<Version>& v) {
  if (!v) return py::none();
  return py::make_tuple(v->time, v->trace);
}

py::dict stats_dict(const StoreStats& s) {
  py::dict d;
  d["entry_count"] = s.entry_count;
  d["distinct_paths"] = s.distinct_paths;
  d["bytes_written"] = s.bytes_written;
  return d;
}

smartgrid::Strategy strategy_of(const std::string& name) { return smartgrid::parse_strategy(name); }

py::dict verdict_dict(const smartgrid::ReasonerVerdict& v) {
  py::dict d;
  d["meter_path"] = path_to_string(v.meter_path);
  d["increased"] = v.increased;
  d["recent_mean"] = v.recent_mean;
  d["baseline_mean"] = v.baseline_mean;
  return d;
}

py::dict report_dict(const smartgrid::BenchReport& r) {
  py::dict d;
  d["strategy"] = std::string(smartgrid::to_string(r.strategy));
  d["meter_count"] = r.meter_count;
  d["history_length"] = r.history_length;
  d["entries_written"] = r.entries_written;
  d["insert_time_ms"] = r.insert_time_ms;
  d["reasoning_time_ms"] = r.reasoning_time_ms;
  py::list verdicts;
  for (const auto& v : r.verdicts) verdicts.append(verdict_dict(v));
  d["verdicts"] = verdicts;
  d["csv_row"] = smartgrid::to_csv_row(r);
  return d;
}

smartgrid::WorkloadSpec make_spec(std::size_t meters, std::size_t history,
                                  std::uint64_t interval_ms, std::uint64_t seed) {
  smartgrid::WorkloadSpec spec;
  spec.meter_count = meters;
  spec.history_length = history;
  spec.sampling_interval_ms = interval_ms;
  spec.seed = seed;
  spec.validate();
  return spec;
}

}  // namespace

PYBIND11_MODULE(_stc, m) {
  m.doc() = "Temporal object-graph store";

  // StcError carries the error code name as `.code`.
  // The type lives as long as the interpreter; the reference is never dropped.
  static py::handle stc_error =
      py::exception<Error>(m, "StcError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::handle type = stc_error;
      py::object inst = type(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(type.ptr(), inst.ptr());
    }
  });

  py::class_<TimePoint>(m, "TimePoint")
      .def(py::init<>())
      .def(py::init([](std::uint64_t ts, std::uint32_t seq) { return TimePoint{ts, seq}; }),
           py::arg("timestamp"), py::arg("sequence") = 0)
      .def_readwrite("timestamp", &TimePoint::timestamp)
      .def_readwrite("sequence", &TimePoint::sequence)
      .def_readonly_static("MAX_SEQUENCE", &TimePoint::kMaxSequence)
      .def_static("parse", &parse_timepoint, py::arg("text"),
                  py::arg("default_sequence") = TimePoint::kMaxSequence)
      .def("predecessor", &TimePoint::predecessor)
      .def("successor", &TimePoint::successor)
      .def(py::self == py::self)
      .def(py::self != py::self)
      .def(py::self < py::self)
      .def(py::self <= py::self)
      .def(py::self > py::self)
      .def(py::self >= py::self)
      .def("__hash__", [](const TimePoint& t) {
        return py::hash(py::make_tuple(t.timestamp, t.sequence));
      })
      .def("__str__", [](const TimePoint& t) { return to_string(t); })
      .def("__repr__", [](const TimePoint& t) { return "TimePoint(" + to_string(t) + ")"; });

  py::class_<Path>(m, "Path")
      .def(py::init<>())
      .def(py::init(&string_to_path), py::arg("text"))
      .def_static("root", &Path::root)
      .def_property_readonly("is_root", &Path::is_root)
      .def_property_readonly("depth", &Path::depth)
      .def_property_readonly("segments",
                             [](const Path& p) {
                               py::list out;
                               for (const auto& s : p.segments()) {
                                 out.append(py::make_tuple(s.relationship, s.key));
                               }
                               return out;
                             })
      .def("child", &Path::child, py::arg("relationship"), py::arg("key"))
      .def("parent", &Path::parent)
      .def("is_parent_of", &Path::is_parent_of)
      .def(py::self == py::self)
      .def(py::self != py::self)
      .def(py::self < py::self)
      .def("__hash__", [](const Path& p) { return py::hash(py::str(path_to_string(p))); })
      .def("__str__", &path_to_string)
      .def("__repr__", [](const Path& p) { return "Path('" + path_to_string(p) + "')"; });
  py::implicitly_convertible<std::string, Path>();

  py::class_<Trace>(m, "Trace")
      .def(py::init([](Path path, std::string type_name, py::dict attributes,
                       std::map<std::string, std::vector<Path>> relationships,
                       std::vector<Path> children) {
             Trace t;
             t.path = std::move(path);
             t.type_name = std::move(type_name);
             set_attributes(t, attributes);
             t.relationships = std::move(relationships);
             t.children = std::move(children);
             return t;
           }),
           py::arg("path"), py::arg("type_name"), py::arg("attributes") = py::dict(),
           py::arg("relationships") = std::map<std::string, std::vector<Path>>{},
           py::arg("children") = std::vector<Path>{})
      .def_readwrite("path", &Trace::path)
      .def_readwrite("type_name", &Trace::type_name)
      .def_property("attributes", &attributes_of, &set_attributes)
      .def_readwrite("relationships", &Trace::relationships)
      .def_readwrite("children", &Trace::children)
      .def("validate", &Trace::validate)
      .def(py::self == py::self)
      .def(py::self != py::self)
      .def("__repr__", [](const Trace& t) {
        return "Trace(" + path_to_string(t.path) + ", " + t.type_name + ")";
      });

  m.def("encode_trace", [](const Trace& t) { return py::bytes(encode_trace(t)); });
  m.def("decode_trace", [](const py::bytes& b) { return decode_trace(std::string(b)); });

  py::class_<VersionStore>(m, "VersionStore")
      .def("put", &VersionStore::put, py::arg("path"), py::arg("time"), py::arg("trace"))
      .def("resolve_exact", &VersionStore::resolve_exact)
      .def("floor_version", [](const VersionStore& s, const Path& p,
                               TimePoint t) { return version_or_none(s.floor_version(p, t)); })
      .def("ceiling_version", [](const VersionStore& s, const Path& p,
                                 TimePoint t) { return version_or_none(s.ceiling_version(p, t)); })
      .def("versions_of", &VersionStore::versions_of)
      .def("stats", [](const VersionStore& s) { return stats_dict(s.stats()); })
      .def("flush", &VersionStore::flush);

  py::class_<InMemoryStore, VersionStore>(m, "InMemoryStore").def(py::init<>());

  py::class_<FileLogStore, VersionStore>(m, "FileLogStore")
      .def(py::init<std::filesystem::path>(), py::arg("file"))
      .def("close", &FileLogStore::close)
      .def_property_readonly("file", &FileLogStore::file)
      .def("__enter__", [](FileLogStore& s) -> FileLogStore& { return s; },
           py::return_value_policy::reference)
      .def("__exit__", [](FileLogStore& s, py::args) { s.close(); });

  py::class_<ElementHandle>(m, "ElementHandle")
      .def_readonly("path", &ElementHandle::path)
      .def_readonly("now", &ElementHandle::now)
      .def_readonly("resolved_at", &ElementHandle::resolved_at)
      .def_readonly("trace", &ElementHandle::trace)
      .def(py::self == py::self)
      .def("__repr__", [](const ElementHandle& h) {
        return "ElementHandle(" + path_to_string(h.path) + " resolved_at=" +
               to_string(h.resolved_at) + " now=" + to_string(h.now) + ")";
      });

  py::class_<HandleTree>(m, "HandleTree")
      .def_readonly("handle", &HandleTree::handle)
      .def_readonly("children", &HandleTree::children)
      .def("size", &HandleTree::size)
      .def("flatten", &HandleTree::flatten);

  py::class_<NavigationContext>(m, "NavigationContext")
      .def(py::init<const VersionStore&>(), py::arg("store"), py::keep_alive<1, 2>())
      .def("resolve", &NavigationContext::resolve, py::arg("path"), py::arg("time"))
      .def("navigate", &NavigationContext::navigate, py::arg("handle"), py::arg("relationship"))
      .def("shift", &NavigationContext::shift, py::arg("handle"), py::arg("time"))
      .def("deep_shift", &NavigationContext::deep_shift, py::arg("handle"), py::arg("time"))
      .def("previous", &NavigationContext::previous)
      .def("next", &NavigationContext::next);

  auto sg = m.def_submodule("smartgrid", "Smart-grid workload and storage benchmark");
  sg.def("meter_path", &smartgrid::meter_path);
  sg.def(
      "generate_workload",
      [](std::size_t meters, std::size_t history, std::uint64_t interval_ms, std::uint64_t seed) {
        py::list out;
        for (const auto& s : smartgrid::generate_workload(make_spec(meters, history, interval_ms, seed))) {
          out.append(py::make_tuple(s.meter, s.time, s.consumption));
        }
        return out;
      },
      py::arg("meters"), py::arg("history"), py::arg("interval_ms") = 1'200'000,
      py::arg("seed") = 42);
  sg.def(
      "ingest",
      [](VersionStore& store, const std::string& strategy, std::size_t meters,
         std::size_t history, std::uint64_t interval_ms, std::uint64_t seed) {
        const auto spec = make_spec(meters, history, interval_ms, seed);
        const auto s = strategy_of(strategy);
        smartgrid::IngestResult r;
        {
          py::gil_scoped_release release;
          r = smartgrid::ingest(store, spec, s);
        }
        py::dict d;
        d["entries_written"] = r.entries_written;
        d["insert_time_ms"] = r.insert_time_ms;
        return d;
      },
      py::arg("store"), py::arg("strategy"), py::arg("meters"), py::arg("history"),
      py::arg("interval_ms") = 1'200'000, py::arg("seed") = 42);
  sg.def(
      "reason_last_k",
      [](const NavigationContext& ctx, const Path& meter, TimePoint at, std::size_t k,
         double threshold) {
        return verdict_dict(smartgrid::reason_last_k(ctx, meter, at, k, threshold));
      },
      py::arg("ctx"), py::arg("meter"), py::arg("at"), py::arg("k") = 20,
      py::arg("threshold") = 1.1);
  sg.def(
      "run_benchmark",
      [](const std::string& strategy, std::size_t meters, std::size_t history,
         std::uint64_t interval_ms, std::uint64_t seed, std::size_t k, double threshold,
         std::filesystem::path work_dir, std::size_t runs, std::size_t warmup) {
        const auto spec = make_spec(meters, history, interval_ms, seed);
        smartgrid::BenchOptions options;
        options.k = k;
        options.threshold_factor = threshold;
        options.work_dir = std::move(work_dir);
        const auto s = strategy_of(strategy);
        smartgrid::BenchReport r;
        {
          py::gil_scoped_release release;
          r = runs <= 1 && warmup == 0
                  ? smartgrid::run_benchmark(spec, s, options)
                  : smartgrid::run_benchmark_median(spec, s, options, std::max<std::size_t>(runs, 1),
                                                    warmup);
        }
        return report_dict(r);
      },
      py::arg("strategy"), py::arg("meters") = 100, py::arg("history") = 1000,
      py::arg("interval_ms") = 1'200'000, py::arg("seed") = 42, py::arg("k") = 20,
      py::arg("threshold") = 1.1, py::arg("work_dir") = std::filesystem::path{},
      py::arg("runs") = 1, py::arg("warmup") = 0);
  sg.attr("CSV_HEADER") = std::string(smartgrid::kCsvHeader);
}
