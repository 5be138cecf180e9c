#include "cpsforge/ast.hpp"

#include <algorithm>
#include <atomic>
#include <functional>

namespace cpsforge {

// ---------------------------------------------------------------------------
// Ty

namespace {
TyPtr make_ty(TyKind k, std::string name = {}, std::vector<TyPtr> args = {}) {
  auto t = std::make_shared<Ty>();
  t->kind = k;
  t->name = std::move(name);
  t->args = std::move(args);
  return t;
}
}  // namespace

TyPtr Ty::int_() {
  static const TyPtr t = make_ty(TyKind::Int);
  return t;
}
TyPtr Ty::bool_() {
  static const TyPtr t = make_ty(TyKind::Bool);
  return t;
}
TyPtr Ty::str() {
  static const TyPtr t = make_ty(TyKind::Str);
  return t;
}
TyPtr Ty::unit() {
  static const TyPtr t = make_ty(TyKind::Unit);
  return t;
}
TyPtr Ty::nothing() {
  static const TyPtr t = make_ty(TyKind::Nothing);
  return t;
}
TyPtr Ty::list(TyPtr elem) { return make_ty(TyKind::List, {}, {std::move(elem)}); }
TyPtr Ty::option(TyPtr elem) { return make_ty(TyKind::Option, {}, {std::move(elem)}); }
TyPtr Ty::fun(std::vector<TyPtr> params, TyPtr ret) {
  params.push_back(std::move(ret));
  return make_ty(TyKind::Fun, {}, std::move(params));
}
TyPtr Ty::monad(std::string monad, TyPtr elem) {
  return make_ty(TyKind::Monad, std::move(monad), {std::move(elem)});
}
TyPtr Ty::receiver(std::string name, std::vector<TyPtr> args) {
  return make_ty(TyKind::Receiver, std::move(name), std::move(args));
}

bool ty_eq(const TyPtr& a, const TyPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!ty_eq(a->args[i], b->args[i])) return false;
  return true;
}

std::string show_ty(const TyPtr& t) {
  if (!t) return "?";
  switch (t->kind) {
    case TyKind::Int: return "Int";
    case TyKind::Bool: return "Bool";
    case TyKind::Str: return "Str";
    case TyKind::Unit: return "Unit";
    case TyKind::Nothing: return "Nothing";
    case TyKind::List: return "List[" + show_ty(t->elem()) + "]";
    case TyKind::Option: return "Option[" + show_ty(t->elem()) + "]";
    case TyKind::Monad: return t->name + "[" + show_ty(t->elem()) + "]";
    case TyKind::Fun: {
      std::string s = "(";
      for (std::size_t i = 0; i + 1 < t->args.size(); ++i) {
        if (i) s += ", ";
        s += show_ty(t->args[i]);
      }
      return s + ") -> " + show_ty(t->ret());
    }
    case TyKind::Receiver: {
      std::string s = t->name;
      if (!t->args.empty()) {
        s += "[";
        for (std::size_t i = 0; i < t->args.size(); ++i) {
          if (i) s += ", ";
          s += show_ty(t->args[i]);
        }
        s += "]";
      }
      return s;
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Expr construction

std::string_view kind_name(ExprKind k) {
  switch (k) {
    case ExprKind::Lit: return "Lit";
    case ExprKind::Var: return "Var";
    case ExprKind::Block: return "Block";
    case ExprKind::ValDef: return "ValDef";
    case ExprKind::VarDef: return "VarDef";
    case ExprKind::Assign: return "Assign";
    case ExprKind::If: return "If";
    case ExprKind::While: return "While";
    case ExprKind::Match: return "Match";
    case ExprKind::Try: return "Try";
    case ExprKind::Throw: return "Throw";
    case ExprKind::Lambda: return "Lambda";
    case ExprKind::Apply: return "Apply";
    case ExprKind::MethodCall: return "MethodCall";
    case ExprKind::Await: return "Await";
    case ExprKind::Async: return "Async";
    case ExprKind::Pure: return "Pure";
    case ExprKind::FlatMap: return "FlatMap";
    case ExprKind::Map: return "Map";
    case ExprKind::FlatMapTry: return "FlatMapTry";
    case ExprKind::MonadError: return "MonadError";
    case ExprKind::AdoptAwait: return "AdoptAwait";
    case ExprKind::Convert: return "Convert";
    case ExprKind::WhileHelper: return "WhileHelper";
    case ExprKind::ShiftCall: return "ShiftCall";
    case ExprKind::ChainOp: return "ChainOp";
    case ExprKind::FinishChain: return "FinishChain";
    case ExprKind::CpsBlock: return "CpsBlock";
  }
  return "?";
}

int next_node_id() {
  static std::atomic<int> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

ExprPtr with_ty(const ExprPtr& e, TyPtr t) {
  auto c = std::make_shared<Expr>(*e);
  c->ty = std::move(t);
  return c;
}

ExprPtr with_kids(const ExprPtr& e, std::vector<ExprPtr> kids) {
  auto c = std::make_shared<Expr>(*e);
  c->kids = std::move(kids);
  return c;
}

namespace mk {

ExprPtr node(ExprKind k, std::vector<ExprPtr> kids, std::string name, Span span) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = span;
  e->id = next_node_id();
  e->kids = std::move(kids);
  e->name = std::move(name);
  return e;
}

ExprPtr lit(Literal v, Span span) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Lit;
  e->span = span;
  e->id = next_node_id();
  e->lit = std::move(v);
  return e;
}

ExprPtr var(std::string name, Span span) { return node(ExprKind::Var, {}, std::move(name), span); }
ExprPtr block(std::vector<ExprPtr> stmts, Span span) {
  return node(ExprKind::Block, std::move(stmts), {}, span);
}
ExprPtr val(std::string name, ExprPtr rhs, ExprPtr body, Span span) {
  return node(ExprKind::ValDef, {std::move(rhs), std::move(body)}, std::move(name), span);
}
ExprPtr var_def(std::string name, ExprPtr rhs, ExprPtr body, Span span) {
  return node(ExprKind::VarDef, {std::move(rhs), std::move(body)}, std::move(name), span);
}
ExprPtr assign(std::string name, ExprPtr rhs, Span span) {
  return node(ExprKind::Assign, {std::move(rhs)}, std::move(name), span);
}
ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr e, Span span) {
  return node(ExprKind::If, {std::move(c), std::move(t), std::move(e)}, {}, span);
}
ExprPtr while_(ExprPtr c, ExprPtr b, Span span) {
  return node(ExprKind::While, {std::move(c), std::move(b)}, {}, span);
}
ExprPtr match(ExprPtr scrut, std::vector<std::pair<Pattern, ExprPtr>> cases, Span span) {
  std::vector<ExprPtr> kids{std::move(scrut)};
  std::vector<Pattern> pats;
  for (auto& [p, b] : cases) {
    pats.push_back(std::move(p));
    kids.push_back(std::move(b));
  }
  auto e = std::make_shared<Expr>(*node(ExprKind::Match, std::move(kids), {}, span));
  e->pats = std::move(pats);
  return e;
}
ExprPtr try_(ExprPtr body, std::string catch_name, ExprPtr handler, ExprPtr fin, Span span) {
  return node(ExprKind::Try, {std::move(body), std::move(handler), std::move(fin)},
              std::move(catch_name), span);
}
ExprPtr throw_(ExprPtr msg, Span span) { return node(ExprKind::Throw, {std::move(msg)}, {}, span); }
ExprPtr lambda(std::vector<Param> params, ExprPtr body, Span span) {
  auto e = std::make_shared<Expr>(*node(ExprKind::Lambda, {std::move(body)}, {}, span));
  e->params = std::move(params);
  return e;
}
ExprPtr apply(ExprPtr fn, std::vector<ExprPtr> args, Span span) {
  args.insert(args.begin(), std::move(fn));
  return node(ExprKind::Apply, std::move(args), {}, span);
}
ExprPtr call(std::string fn, std::vector<ExprPtr> args, Span span) {
  return apply(var(std::move(fn), span), std::move(args), span);
}
ExprPtr method(ExprPtr recv, std::string name, std::vector<ExprPtr> args, Span span) {
  args.insert(args.begin(), std::move(recv));
  return node(ExprKind::MethodCall, std::move(args), std::move(name), span);
}
ExprPtr await(ExprPtr inner, Span span) { return node(ExprKind::Await, {std::move(inner)}, {}, span); }
ExprPtr async(std::string monad, ExprPtr body, Span span) {
  return node(ExprKind::Async, {std::move(body)}, std::move(monad), span);
}

ExprPtr pure(ExprPtr e) { return node(ExprKind::Pure, {std::move(e)}); }
ExprPtr flat_map(ExprPtr fa, std::string binder, ExprPtr body) {
  return node(ExprKind::FlatMap, {std::move(fa), std::move(body)}, std::move(binder));
}
ExprPtr map(ExprPtr fa, std::string binder, ExprPtr body) {
  return node(ExprKind::Map, {std::move(fa), std::move(body)}, std::move(binder));
}
ExprPtr flat_map_try(ExprPtr fa, std::string ok, ExprPtr on_ok, std::string err, ExprPtr on_err) {
  auto e = std::make_shared<Expr>(
      *node(ExprKind::FlatMapTry, {std::move(fa), std::move(on_ok), std::move(on_err)}, std::move(ok)));
  e->name2 = std::move(err);
  return e;
}
ExprPtr error(ExprPtr msg) { return node(ExprKind::MonadError, {std::move(msg)}); }
ExprPtr adopt(ExprPtr e, int await_id) {
  auto n = std::make_shared<Expr>(*node(ExprKind::AdoptAwait, {std::move(e)}));
  n->ref = await_id;
  return n;
}
ExprPtr convert(std::string from, std::string to, ExprPtr e) {
  auto n = std::make_shared<Expr>(*node(ExprKind::Convert, {std::move(e)}, std::move(from)));
  n->name2 = std::move(to);
  return n;
}
ExprPtr while_helper(ExprPtr c, ExprPtr b) { return node(ExprKind::WhileHelper, {std::move(c), std::move(b)}); }
ExprPtr shift_call(std::string tag, ExprPtr recv, std::string method, std::vector<ExprPtr> args) {
  args.insert(args.begin(), std::move(recv));
  auto n = std::make_shared<Expr>(*node(ExprKind::ShiftCall, std::move(args), std::move(method)));
  n->name2 = std::move(tag);
  return n;
}
ExprPtr chain_op(ExprPtr builder, std::string op, ExprPtr fn) {
  return node(ExprKind::ChainOp, {std::move(builder), std::move(fn)}, std::move(op));
}
ExprPtr finish_chain(ExprPtr builder) { return node(ExprKind::FinishChain, {std::move(builder)}); }
ExprPtr cps_block(std::string monad, ExprPtr body) {
  return node(ExprKind::CpsBlock, {std::move(body)}, std::move(monad));
}

}  // namespace mk

// ---------------------------------------------------------------------------
// struct_eq

namespace {
bool pat_eq(const Pattern& a, const Pattern& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Pattern::Kind::Lit) return a.lit == b.lit;
  if (a.kind == Pattern::Kind::Bind) return a.name == b.name;
  return true;
}
}  // namespace

bool struct_eq(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->name != b->name || a->name2 != b->name2) return false;
  if (a->kind == ExprKind::Lit && !(a->lit == b->lit)) return false;
  if (a->kids.size() != b->kids.size() || a->params.size() != b->params.size() ||
      a->pats.size() != b->pats.size())
    return false;
  for (std::size_t i = 0; i < a->params.size(); ++i) {
    if (a->params[i].name != b->params[i].name) return false;
    // Core-syntax binders carry no annotation; compare only when both do.
    if (a->params[i].ty && b->params[i].ty && !ty_eq(a->params[i].ty, b->params[i].ty)) return false;
  }
  for (std::size_t i = 0; i < a->pats.size(); ++i)
    if (!pat_eq(a->pats[i], b->pats[i])) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!struct_eq(a->kids[i], b->kids[i])) return false;
  return true;
}

bool struct_eq(const Program& a, const Program& b) {
  if (a.defs.size() != b.defs.size()) return false;
  for (std::size_t i = 0; i < a.defs.size(); ++i) {
    const auto& x = a.defs[i];
    const auto& y = b.defs[i];
    if (x.name != y.name || x.params.size() != y.params.size() || !ty_eq(x.ret, y.ret)) return false;
    for (std::size_t j = 0; j < x.params.size(); ++j)
      if (x.params[j].name != y.params[j].name || !ty_eq(x.params[j].ty, y.params[j].ty)) return false;
    if (!struct_eq(x.body, y.body)) return false;
  }
  return struct_eq(a.main, b.main);
}

// ---------------------------------------------------------------------------
// Binders, free variables, renaming

namespace {

/// Names bound by `e` for child `i` (empty when the child sees no new binder).
std::vector<std::string> binders_for(const Expr& e, std::size_t i) {
  switch (e.kind) {
    case ExprKind::ValDef:
    case ExprKind::VarDef:
      if (i == 1) return {e.name};
      break;
    case ExprKind::Match:
      if (i >= 1 && e.pats[i - 1].kind == Pattern::Kind::Bind) return {e.pats[i - 1].name};
      break;
    case ExprKind::Try:
      if (i == 1 && !e.name.empty()) return {e.name};
      break;
    case ExprKind::Lambda: {
      std::vector<std::string> names;
      for (const auto& p : e.params) names.push_back(p.name);
      return names;
    }
    case ExprKind::FlatMap:
    case ExprKind::Map:
      if (i == 1) return {e.name};
      break;
    case ExprKind::FlatMapTry:
      if (i == 1) return {e.name};
      if (i == 2) return {e.name2};
      break;
    default: break;
  }
  return {};
}

void collect_free(const ExprPtr& e, std::multiset<std::string>& bound, std::set<std::string>& out) {
  if (!e) return;
  if ((e->kind == ExprKind::Var || e->kind == ExprKind::Assign) && !bound.contains(e->name))
    out.insert(e->name);
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    auto names = binders_for(*e, i);
    for (auto& n : names) bound.insert(n);
    collect_free(e->kids[i], bound, out);
    for (auto& n : names) bound.erase(bound.find(n));
  }
}

}  // namespace

std::set<std::string> free_vars(const ExprPtr& e) {
  std::multiset<std::string> bound;
  std::set<std::string> out;
  collect_free(e, bound, out);
  out.erase("_");
  return out;
}

ExprPtr rename_free(const ExprPtr& e, const std::string& from, const std::string& to) {
  if (!e) return e;
  bool changed = false;
  std::shared_ptr<Expr> copy;
  auto ensure_copy = [&] {
    if (!copy) copy = std::make_shared<Expr>(*e);
    changed = true;
  };
  if ((e->kind == ExprKind::Var || e->kind == ExprKind::Assign) && e->name == from) {
    ensure_copy();
    copy->name = to;
  }
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    auto names = binders_for(*e, i);
    bool shadowed = std::find(names.begin(), names.end(), from) != names.end();
    if (shadowed || !e->kids[i]) continue;
    auto k = rename_free(e->kids[i], from, to);
    if (k != e->kids[i]) {
      ensure_copy();
      copy->kids[i] = std::move(k);
    }
  }
  return changed ? ExprPtr(copy) : e;
}

// ---------------------------------------------------------------------------
// Operator sugar

namespace {
struct OpName {
  std::string_view method;
  std::string_view op;
};
constexpr OpName kOps[] = {
    {"plus", "+"}, {"minus", "-"}, {"times", "*"}, {"div", "/"},  {"mod", "%"},
    {"lt", "<"},   {"le", "<="},   {"gt", ">"},    {"ge", ">="},  {"eq", "=="},
    {"ne", "!="},  {"and", "&&"},  {"or", "||"},
};
}  // namespace

bool is_monad_name(std::string_view name) {
  return name == "ident" || name == "option" || name == "result" || name == "nondet" ||
         name == "eventual" || name == "resource";
}

std::string_view binary_op_for(std::string_view method) {
  for (const auto& o : kOps)
    if (o.method == method) return o.op;
  return {};
}

std::string_view method_for_op(std::string_view op) {
  for (const auto& o : kOps)
    if (o.op == op) return o.method;
  return {};
}

}  // namespace cpsforge
