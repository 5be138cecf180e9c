#include "cpsforge/coloring.hpp"

#include <functional>

#include "cpsforge/monads.hpp"

namespace cpsforge {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::CachedSync: return "CachedSync";
    case Verdict::PlainSync: return "PlainSync";
    case Verdict::Async: return "Async";
    case Verdict::MixedError: return "MixedError";
    case Verdict::ExternalMultiSyncError: return "ExternalMultiSyncError";
  }
  return "?";
}

bool is_error(Verdict v) { return v == Verdict::MixedError || v == Verdict::ExternalMultiSyncError; }

bool ColorReport::has_errors() const {
  for (const auto& v : vars)
    if (is_error(v.verdict)) return true;
  return false;
}

std::string ColorReport::text() const {
  std::string out;
  for (const auto& v : vars)
    out += v.name + " " + verdict_name(v.verdict) + " sync=" + std::to_string(v.sync) +
           " async=" + std::to_string(v.async) + "\n";
  return out;
}

bool DiscardRegistry::allows(const TyPtr& t) const {
  if (!t) return false;
  if (t->is(TyKind::Nothing)) return true;
  return value_types.contains(show_ty(t));
}

namespace {

class Analyzer {
 public:
  Analyzer(const std::string& f, const std::set<int>& implicit) : f_(f), implicit_(implicit) {}

  ColorReport run(const ExprPtr& body) {
    walk(body, 0);
    for (auto& v : rep_.vars) v.verdict = decide(v);
    return std::move(rep_);
  }

 private:
  const std::string& f_;
  const std::set<int>& implicit_;
  ColorReport rep_;
  // name -> record (-1 shadows a tracked name)
  std::vector<std::pair<std::string, long>> scope_;
  std::vector<int> depth_of_;  // loop/lambda depth at definition, per record
  std::map<std::string, std::size_t> externals_;

  static Verdict decide(const VarReport& v) {
    if (v.mutable_var) return Verdict::MixedError;
    if (v.sync > 0 && v.async > 0) return Verdict::MixedError;
    if (!v.defined_inside && v.sync > 1) return Verdict::ExternalMultiSyncError;
    if (v.sync >= 2) return Verdict::CachedSync;
    if (v.sync == 1) return Verdict::PlainSync;
    return Verdict::Async;
  }

  long find(const std::string& n) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == n) return it->second;
    return -2;
  }

  bool monadic(const TyPtr& t) const { return t && t->is_monad(f_); }

  std::size_t add(const std::string& name, bool inside, bool is_mut, Span span, int depth) {
    VarReport r;
    r.name = name;
    r.defined_inside = inside;
    r.mutable_var = is_mut;
    r.span = span;
    rep_.vars.push_back(r);
    depth_of_.push_back(depth);
    return rep_.vars.size() - 1;
  }

  /// Record for a variable occurrence, creating external records on demand.
  long record_for(const ExprPtr& v) {
    long idx = find(v->name);
    if (idx >= 0) return idx;
    if (idx == -1 || !monadic(v->ty)) return -1;
    auto it = externals_.find(v->name);
    if (it != externals_.end()) return static_cast<long>(it->second);
    std::size_t r = add(v->name, false, false, v->span, 0);
    externals_[v->name] = r;
    return static_cast<long>(r);
  }

  void use(const ExprPtr& v, bool sync, int depth) {
    long r = record_for(v);
    if (r < 0) return;
    int mult = depth > depth_of_[r] ? 2 : 1;
    (sync ? rep_.vars[r].sync : rep_.vars[r].async) += mult;
    rep_.uses[v->id] = static_cast<std::size_t>(r);
  }

  void shadow(const std::string& n) { scope_.push_back({n, -1}); }

  void walk(const ExprPtr& e, int depth) {
    if (!e) return;
    switch (e->kind) {
      case ExprKind::Async: return;
      case ExprKind::Var: use(e, implicit_.contains(e->id), depth); return;
      case ExprKind::Await:
        if (e->kid(0)->is(ExprKind::Var)) {
          use(e->kid(0), true, depth);
          return;
        }
        walk(e->kid(0), depth);
        return;
      case ExprKind::ValDef:
      case ExprKind::VarDef: {
        walk(e->kid(0), depth);
        if (monadic(e->kid(0)->ty)) {
          std::size_t r = add(e->name, true, e->is(ExprKind::VarDef), e->span, depth);
          rep_.defs[e->id] = r;
          scope_.push_back({e->name, static_cast<long>(r)});
        } else {
          shadow(e->name);
        }
        walk(e->kid(1), depth);
        scope_.pop_back();
        return;
      }
      case ExprKind::Lambda:
        for (const auto& p : e->params) shadow(p.name);
        walk(e->kid(0), depth + 1);
        for (std::size_t i = 0; i < e->params.size(); ++i) scope_.pop_back();
        return;
      case ExprKind::While:
        walk(e->kid(0), depth + 1);
        walk(e->kid(1), depth + 1);
        return;
      case ExprKind::Match:
        walk(e->kid(0), depth);
        for (std::size_t i = 0; i < e->pats.size(); ++i) {
          bool b = e->pats[i].kind == Pattern::Kind::Bind;
          if (b) shadow(e->pats[i].name);
          walk(e->kid(i + 1), depth);
          if (b) scope_.pop_back();
        }
        return;
      case ExprKind::Try:
        walk(e->kid(0), depth);
        if (e->kids.size() > 1 && e->kid(1)) {
          shadow(e->name);
          walk(e->kid(1), depth);
          scope_.pop_back();
        }
        if (e->kids.size() > 2) walk(e->kid(2), depth);
        return;
      case ExprKind::Assign: {
        long r = find(e->name);
        if (r >= 0) rep_.vars[r].async++;
        walk(e->kid(0), depth);
        return;
      }
      default:
        for (const auto& k : e->kids) walk(k, depth);
    }
  }
};

ExprPtr map_asyncs(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& fn) {
  if (!e) return e;
  bool changed = false;
  std::vector<ExprPtr> kids;
  for (const auto& k : e->kids) {
    kids.push_back(map_asyncs(k, fn));
    if (kids.back() != k) changed = true;
  }
  ExprPtr n = changed ? with_kids(e, std::move(kids)) : e;
  if (n->is(ExprKind::Async)) return fn(n);
  return n;
}

Program map_program(const Program& p, const std::function<ExprPtr(const ExprPtr&)>& fn) {
  Program out = p;
  for (auto& d : out.defs) d.body = map_asyncs(d.body, fn);
  out.main = map_asyncs(out.main, fn);
  return out;
}

}  // namespace

ColorReport analyze(const ExprPtr& body, const std::string& f, const std::set<int>& implicit) {
  return Analyzer(f, implicit).run(body);
}

ExprPtr apply_coloring(const ExprPtr& body, const std::string& f, const ColorReport& report,
                       const std::set<int>& implicit) {
  for (const auto& v : report.vars) {
    if (v.verdict == Verdict::MixedError)
      throw Error(ErrorKind::Coloring, v.span,
                  v.mutable_var ? "monadic var '" + v.name + "' cannot be colored"
                                : "variable '" + v.name + "' is used both as a value and as " + f + "[_]");
    if (v.verdict == Verdict::ExternalMultiSyncError)
      throw Error(ErrorKind::Coloring, v.span,
                  "external variable '" + v.name + "' is used as a value more than once");
    if (v.verdict == Verdict::CachedSync && !descriptor(monad_id_or_throw(f)).has_memoization)
      throw Error(ErrorKind::Memoization, v.span,
                  "variable '" + v.name + "' needs memoization, which " + f + " does not support");
  }
  std::function<ExprPtr(const ExprPtr&)> rw = [&](const ExprPtr& e) -> ExprPtr {
    if (!e || e->is(ExprKind::Async)) return e;
    if (e->is(ExprKind::Await) && e->kid(0)->is(ExprKind::Var)) return e;
    std::vector<ExprPtr> kids;
    bool changed = false;
    for (const auto& k : e->kids) {
      kids.push_back(rw(k));
      if (kids.back() != k) changed = true;
    }
    ExprPtr n = changed ? with_kids(e, std::move(kids)) : e;
    if (auto it = report.defs.find(e->id); it != report.defs.end() &&
                                           report.vars[it->second].verdict == Verdict::CachedSync) {
      auto k2 = n->kids;
      k2[0] = mk::await(mk::call("memoize", {k2[0]}, k2[0]->span), k2[0]->span);
      n = with_kids(n, std::move(k2));
    }
    if (implicit.contains(e->id)) n = mk::await(n, e->span);
    return n;
  };
  return rw(body);
}

ExprPtr transform_discards(const ExprPtr& body, const std::string& f, const DiscardRegistry& reg,
                           std::vector<DiscardRecord>* records) {
  std::function<ExprPtr(const ExprPtr&)> rw = [&](const ExprPtr& e) -> ExprPtr {
    if (!e || e->is(ExprKind::Async)) return e;
    std::vector<ExprPtr> kids;
    bool changed = false;
    for (const auto& k : e->kids) {
      kids.push_back(rw(k));
      if (kids.back() != k) changed = true;
    }
    if (e->is(ExprKind::Block)) {
      for (std::size_t i = 0; i + 1 < kids.size(); ++i) {
        const TyPtr& t = e->kid(i)->ty;
        if (!t || t->is(TyKind::Unit) || t->is(TyKind::Nothing)) continue;
        std::string ts = show_ty(t);
        if (t->is_monad(f) && reg.await_discard) {
          kids[i] = mk::await(kids[i], kids[i]->span);
          if (records) records->push_back({e->kid(i)->span, ts, true});
        } else if (reg.allows(t)) {
          kids[i] = mk::call("discard", {kids[i]}, kids[i]->span);
          if (records) records->push_back({e->kid(i)->span, ts, false});
        } else {
          throw Error(ErrorKind::Discard, e->kid(i)->span, "cannot discard a value of type " + ts);
        }
        changed = true;
      }
    }
    return changed ? with_kids(e, std::move(kids)) : e;
  };
  return rw(body);
}

ColoringResult color_program(const Program& p, const DiscardRegistry& reg, bool report_only) {
  ColoringResult out;
  TypedProgram t1 = typecheck(p, {true});
  Program p2 = map_program(t1.program, [&](const ExprPtr& a) {
    return with_kids(a, {transform_discards(a->kid(0), a->name, reg, &out.report.discards)});
  });
  TypedProgram t2 = typecheck(p2, {true});
  Program p3 = map_program(t2.program, [&](const ExprPtr& a) {
    ColorReport r = analyze(a->kid(0), a->name, t2.implicit_awaits);
    std::size_t off = out.report.vars.size();
    for (auto& v : r.vars) out.report.vars.push_back(v);
    for (auto& [id, i] : r.defs) out.report.defs[id] = i + off;
    for (auto& [id, i] : r.uses) out.report.uses[id] = i + off;
    if (report_only) return a;
    return with_kids(a, {apply_coloring(a->kid(0), a->name, r, t2.implicit_awaits)});
  });
  if (report_only) return out;
  out.program = typecheck(p3).program;
  return out;
}

}  // namespace cpsforge
