#include "cpsforge/pipeline.hpp"

#include "cpsforge/parser.hpp"
#include "cpsforge/typer.hpp"

namespace cpsforge {

namespace {

void each_async(const ExprPtr& e, const std::function<void(const ExprPtr&)>& fn) {
  if (!e) return;
  if (e->is(ExprKind::Async)) {
    fn(e);
    return;
  }
  for (const auto& k : e->kids) each_async(k, fn);
}

void each_async(const Program& p, const std::function<void(const ExprPtr&)>& fn) {
  for (const auto& d : p.defs) each_async(d.body, fn);
  each_async(p.main, fn);
}

int program_binds(const Program& typed, bool optimize, const ShiftRegistry& reg) {
  TransformOptions to;
  to.optimize = optimize;
  int n = 0;
  each_async(typed, [&](const ExprPtr& a) { n += count_binds(transform(a->kid(0), a->name, to, reg).transformed); });
  return n;
}

}  // namespace

Compiled compile(const std::string& source, const PipelineOptions& opts) {
  return compile(parse_program(source), opts);
}

Compiled compile(const Program& parsed, const PipelineOptions& opts) {
  Compiled c;
  ShiftOptions so;
  so.callchain = opts.callchain;
  c.registry = ShiftRegistry::builtin(so);
  if (opts.coloring) {
    ColoringResult r = color_program(parsed);
    c.typed = std::move(r.program);
    c.color = std::move(r.report);
  } else {
    c.typed = typecheck(parsed).program;
  }
  TransformOptions to;
  to.optimize = opts.optimize;
  to.coloring = opts.coloring;
  to.trace = opts.trace;
  c.transformed = transform_program(c.typed, to, c.registry, opts.trace ? &c.trace : nullptr);
  if (opts.mutate) c.transformed = opts.mutate(c.transformed);
  return c;
}

std::string Stats::text() const {
  return "awaits=" + std::to_string(awaits) + " binds=" + std::to_string(binds) +
         " optimized_binds=" + std::to_string(optimized_binds);
}

Stats stats(const Program& typed, const PipelineOptions& opts) {
  ShiftOptions so;
  so.callchain = opts.callchain;
  ShiftRegistry reg = ShiftRegistry::builtin(so);
  Stats s;
  each_async(typed, [&](const ExprPtr& a) { s.awaits += count_awaits(a->kid(0)); });
  s.binds = program_binds(typed, false, reg);
  s.optimized_binds = program_binds(typed, true, reg);
  return s;
}

Comparison compare(const Program& parsed, const PipelineOptions& opts) {
  Comparison c;
  c.compiled = compile(parsed, opts);
  InterpOptions io;
  io.registry = &c.compiled.registry;
  c.oracle = oracle(c.compiled.typed, io);
  c.eval = eval(c.compiled.transformed, io);
  c.equivalent = c.oracle.same_result(c.eval);
  return c;
}

namespace {

// Every program obtained from `e` by one shrinking step.
void shrink(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (!e) return;
  if (e->is(ExprKind::Block) && e->kids.size() > 1) {
    for (std::size_t i = 0; i + 1 < e->kids.size(); ++i) {
      auto ks = e->kids;
      ks.erase(ks.begin() + static_cast<long>(i));
      out.push_back(ks.size() == 1 ? ks[0] : with_kids(e, std::move(ks)));
    }
  }
  if ((e->is(ExprKind::ValDef) || e->is(ExprKind::VarDef)) && !free_vars(e->kid(1)).contains(e->name))
    out.push_back(e->kid(1));
  if (e->is(ExprKind::If)) {
    out.push_back(e->kid(1));
    out.push_back(e->kid(2));
  }
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    std::vector<ExprPtr> sub;
    shrink(e->kid(i), sub);
    for (auto& v : sub) {
      auto ks = e->kids;
      ks[i] = std::move(v);
      out.push_back(with_kids(e, std::move(ks)));
    }
  }
}

}  // namespace

Program minimize(const Program& parsed, const std::function<bool(const Program&)>& failing, int max_steps) {
  Program cur = parsed;
  for (int step = 0; step < max_steps; ++step) {
    bool progressed = false;
    for (std::size_t d = 0; d < cur.defs.size() && !progressed; ++d) {
      Program cand = cur;
      cand.defs.erase(cand.defs.begin() + static_cast<long>(d));
      if (failing(cand)) {
        cur = std::move(cand);
        progressed = true;
      }
    }
    if (!progressed) {
      std::vector<ExprPtr> cands;
      shrink(cur.main, cands);
      for (auto& c : cands) {
        Program cand = cur;
        cand.main = c;
        if (failing(cand)) {
          cur = std::move(cand);
          progressed = true;
          break;
        }
      }
    }
    if (!progressed) break;
  }
  return cur;
}

}  // namespace cpsforge
