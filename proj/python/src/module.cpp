#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cpsforge/laws.hpp"
#include "cpsforge/parser.hpp"
#include "cpsforge/pipeline.hpp"

namespace py = pybind11;
using namespace cpsforge;

namespace {

PipelineOptions options(bool optimize, bool callchain, bool coloring) {
  PipelineOptions po;
  po.optimize = optimize;
  po.callchain = callchain;
  po.coloring = coloring;
  return po;
}

py::dict to_dict(const Observable& o) {
  py::dict d;
  d["text"] = o.text();
  d["monad"] = o.monad;
  d["result"] = o.result;
  d["paths"] = o.paths;
  d["finalizers"] = o.finalizers;
  d["failed"] = o.failed;
  d["counters"] = o.counters;
  d["visits"] = o.visits;
  return d;
}

MonadId monad_or_raise(const std::string& name) {
  auto m = monad_id(name);
  if (!m) throw py::value_error("unknown monad '" + name + "'");
  return *m;
}

}  // namespace

PYBIND11_MODULE(_cpsforge, m) {
  m.doc() = "async/await to monadic CPS translation for MiniCPS";

  static py::exception<Error> cps_error(m, "CpsError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::tuple args = py::make_tuple(e.what(), std::string(error_kind_name(e.kind())), e.span().line, e.span().col);
      PyErr_SetObject(cps_error.ptr(), args.ptr());
    }
  });

  m.def(
      "pretty", [](const std::string& src) { return pretty(parse_program(src)); }, py::arg("source"),
      "Parse and pretty-print a program.");

  m.def(
      "transform",
      [](const std::string& src, bool optimize, bool callchain, bool coloring) {
        return pretty(compile(src, options(optimize, callchain, coloring)).transformed);
      },
      py::arg("source"), py::arg("optimize") = true, py::arg("callchain") = true, py::arg("coloring") = false);

  m.def(
      "run",
      [](const std::string& src, bool optimize, bool callchain, bool coloring) {
        Compiled c = compile(src, options(optimize, callchain, coloring));
        InterpOptions io;
        io.registry = &c.registry;
        return to_dict(eval(c.transformed, io));
      },
      py::arg("source"), py::arg("optimize") = true, py::arg("callchain") = true, py::arg("coloring") = false,
      "Translate and evaluate; returns the observable result as a dict.");

  m.def(
      "oracle",
      [](const std::string& src) { return to_dict(oracle(typecheck(parse_program(src)).program)); },
      py::arg("source"), "Direct-style reference evaluation.");

  m.def(
      "compare",
      [](const std::string& src, bool optimize) {
        Comparison c = compare(parse_program(src), options(optimize, true, false));
        py::dict d;
        d["equivalent"] = c.equivalent;
        d["oracle"] = to_dict(c.oracle);
        d["eval"] = to_dict(c.eval);
        return d;
      },
      py::arg("source"), py::arg("optimize") = true);

  m.def(
      "stats",
      [](const std::string& src, bool coloring) {
        Program parsed = parse_program(src);
        Program typed = coloring ? color_program(parsed).program : typecheck(parsed).program;
        Stats s = stats(typed);
        py::dict d;
        d["awaits"] = s.awaits;
        d["binds"] = s.binds;
        d["optimized_binds"] = s.optimized_binds;
        return d;
      },
      py::arg("source"), py::arg("coloring") = false);

  m.def(
      "check_coloring",
      [](const std::string& src) {
        ColoringResult r = color_program(parse_program(src), {}, true);
        py::list out;
        for (const auto& v : r.report.vars) {
          py::dict d;
          d["name"] = v.name;
          d["verdict"] = verdict_name(v.verdict);
          d["sync"] = v.sync;
          d["async"] = v.async;
          out.append(d);
        }
        return out;
      },
      py::arg("source"), "Coloring verdict of every monadic variable.");

  m.def(
      "gen_source",
      [](std::uint64_t seed, const std::string& monad, int budget, bool straight_line) {
        monad_or_raise(monad);
        GenOptions go;
        go.budget = budget;
        go.straight_line = straight_line;
        return gen_source(seed, monad, go);
      },
      py::arg("seed"), py::arg("monad") = "option", py::arg("budget") = 4, py::arg("straight_line") = false);

  m.def(
      "check_monad_laws",
      [](const std::string& monad, int cases, std::uint64_t seed) {
        LawReport r = check_monad_laws(monad_or_raise(monad), cases, seed);
        py::dict d;
        d["cases"] = r.cases;
        d["left_identity_failures"] = r.left_identity_failures;
        d["right_identity_failures"] = r.right_identity_failures;
        d["associativity_failures"] = r.associativity_failures;
        d["ok"] = r.ok();
        return d;
      },
      py::arg("monad"), py::arg("cases") = 200, py::arg("seed") = 0);

  m.def("monads", [] {
    std::vector<std::string> out;
    for (const auto& d : all_monads()) out.push_back(d.name);
    return out;
  });
}
