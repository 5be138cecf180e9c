#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cpsforge/coloring.hpp"
#include "cpsforge/parser.hpp"
#include "cpsforge/pipeline.hpp"

using namespace cpsforge;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Flags {
  bool no_opt = false;
  bool no_callchain = false;
  bool coloring = false;
  bool trace = false;
  std::string emit = "pretty";
};

bool use_color() {
  const char* env = std::getenv("CPSFORGE_COLOR");
  if (env && std::string(env) == "0") return false;
  return isatty(STDERR_FILENO);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineOptions options(const Flags& f) {
  PipelineOptions o;
  o.optimize = !f.no_opt;
  o.callchain = !f.no_callchain;
  o.coloring = f.coloring;
  o.trace = f.trace || f.emit == "trace";
  return o;
}

void add_pipeline_flags(CLI::App* c, Flags& f) {
  c->add_flag("--no-opt", f.no_opt, "Disable the optimizing translation");
  c->add_flag("--no-callchain", f.no_callchain, "Disable call-chain fusion of withFilter");
  c->add_flag("--coloring", f.coloring, "Insert awaits automatically before translating");
  c->add_flag("--trace", f.trace, "Print the rule trace after the program");
}

// Test-only: perturb every integer literal of the transformed program.
ExprPtr bump_literals(const ExprPtr& e) {
  if (!e) return e;
  auto n = std::make_shared<Expr>(*e);
  if (n->is(ExprKind::Lit))
    if (auto* i = std::get_if<std::int64_t>(&n->lit)) *i += 1;
  for (auto& k : n->kids) k = bump_literals(k);
  return n;
}

Program break_transform(const Program& p) {
  Program out = p;
  for (auto& d : out.defs) d.body = bump_literals(d.body);
  out.main = bump_literals(out.main);
  return out;
}

void report_mismatch(const std::string& label, const Program& src, const PipelineOptions& po) {
  auto failing = [&](const Program& cand) {
    try {
      return !compare(cand, po).equivalent;
    } catch (const Error&) {
      return false;
    }
  };
  Program small = minimize(src, failing);
  Comparison c = compare(small, po);
  std::cout << "mismatch: " << label << "\n"
            << "--- source (minimized)\n"
            << pretty(small)
            << "--- transformed\n"
            << pretty(c.compiled.transformed)
            << "--- oracle\n"
            << c.oracle.text() << "--- eval\n"
            << c.eval.text();
}

int cmd_transform(const std::string& file, const Flags& f) {
  Compiled c = compile(read_file(file), options(f));
  if (f.emit == "report") {
    ColoringResult r = color_program(parse_program(read_file(file)), {}, true);
    std::cout << r.report.text();
    return kOk;
  }
  if (f.emit != "trace") std::cout << pretty(c.transformed);
  if (f.trace || f.emit == "trace") std::cout << format_trace(c.trace);
  return kOk;
}

int cmd_run(const std::string& file, const Flags& f) {
  Compiled c = compile(read_file(file), options(f));
  InterpOptions io;
  io.registry = &c.registry;
  Observable o = eval(c.transformed, io);
  std::cout << o.text();
  if (f.trace) std::cout << format_trace(c.trace);
  return o.failed ? kFail : kOk;
}

int cmd_stats(const std::string& file, const Flags& f) {
  PipelineOptions po = options(f);
  Program parsed = parse_program(read_file(file));
  Program typed = f.coloring ? color_program(parsed).program : typecheck(parsed).program;
  std::cout << stats(typed, po).text() << "\n";
  return kOk;
}

int cmd_check_coloring(const std::string& file) {
  ColoringResult r = color_program(parse_program(read_file(file)), {}, true);
  std::cout << r.report.text();
  return r.report.has_errors() ? kFail : kOk;
}

struct CompareArgs {
  std::string file;
  std::uint64_t seed = 0;
  int count = 0;
  std::string monad = "option";
  int budget = 6;
  bool straight_line = false;
  bool broken = false;
};

int cmd_compare(const CompareArgs& a, const Flags& f) {
  PipelineOptions po = options(f);
  if (a.broken) po.mutate = break_transform;
  if (!a.file.empty()) {
    Program p = parse_program(read_file(a.file));
    if (compare(p, po).equivalent) {
      std::cout << "equivalent\n";
      return kOk;
    }
    report_mismatch(a.file, p, po);
    return kFail;
  }
  GenOptions go;
  go.budget = a.budget;
  go.straight_line = a.straight_line;
  int n = a.count > 0 ? a.count : 1;
  for (int i = 0; i < n; ++i) {
    std::uint64_t s = a.seed + static_cast<std::uint64_t>(i);
    Program p = parse_program(gen_source(s, a.monad, go));
    if (!compare(p, po).equivalent) {
      std::cout << i << "/" << n << " equivalent\n";
      report_mismatch("seed " + std::to_string(s), p, po);
      return kFail;
    }
  }
  std::cout << n << "/" << n << " equivalent\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpsforge: async/await to monadic CPS translator for MiniCPS"};
  app.require_subcommand(1, 1);
  app.footer(
      "Exit codes: 0 success, 1 program or pipeline error (or a failed result for run), 2 usage error.\n"
      "Awaiting option inside result converts None to Err \"empty\".\n"
      "Set CPSFORGE_COLOR=0 to disable ANSI colors in diagnostics.");

  Flags flags;
  std::string file;

  auto* t = app.add_subcommand("transform", "Print the translated program");
  t->add_option("file", file, "MiniCPS source")->required()->check(CLI::ExistingFile);
  add_pipeline_flags(t, flags);
  t->add_option("--emit", flags.emit, "Output: pretty, trace or report")
      ->check(CLI::IsMember({"pretty", "trace", "report"}));

  auto* r = app.add_subcommand("run", "Translate and evaluate, printing the observable result");
  r->add_option("file", file, "MiniCPS source")->required()->check(CLI::ExistingFile);
  add_pipeline_flags(r, flags);

  CompareArgs ca;
  auto* c = app.add_subcommand("compare", "Check the translation against the direct-style oracle");
  c->add_option("file", ca.file, "MiniCPS source (omit to use generated programs)")->check(CLI::ExistingFile);
  c->add_option("--seed", ca.seed, "First generator seed");
  c->add_option("--count", ca.count, "Number of generated programs");
  c->add_option("--monad", ca.monad, "Monad of generated programs")
      ->check(CLI::IsMember({"ident", "option", "result", "nondet"}));
  c->add_option("--budget", ca.budget, "Generator size budget");
  c->add_flag("--straight-line", ca.straight_line, "Generate straight-line programs only");
  c->add_flag("--break-transform", ca.broken, "Perturb the translation (harness self-test)")->group("");
  add_pipeline_flags(c, flags);

  auto* s = app.add_subcommand("stats", "Print await and bind counts");
  s->add_option("file", file, "MiniCPS source")->required()->check(CLI::ExistingFile);
  s->add_flag("--no-callchain", flags.no_callchain, "Disable call-chain fusion of withFilter");
  s->add_flag("--coloring", flags.coloring, "Insert awaits automatically first");

  auto* k = app.add_subcommand("check-coloring", "Print the coloring verdict of every monadic variable");
  k->add_option("file", file, "MiniCPS source")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  std::string diag_file = *c ? ca.file : file;
  try {
    if (*t) return cmd_transform(file, flags);
    if (*r) return cmd_run(file, flags);
    if (*c) return cmd_compare(ca, flags);
    if (*s) return cmd_stats(file, flags);
    if (*k) return cmd_check_coloring(file);
  } catch (const Error& e) {
    std::cerr << format_diagnostic(diag_file.empty() ? "<generated>" : diag_file, e.diag(), use_color()) << "\n";
    return kFail;
  }
  return kUsage;
}
