#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cpsforge {

struct Span {
  int line = 0;
  int col = 0;
};

// ---------------------------------------------------------------------------
// Types

enum class TyKind { Int, Bool, Str, Unit, List, Option, Fun, Monad, Receiver, Nothing };

struct Ty;
using TyPtr = std::shared_ptr<const Ty>;

/// Monomorphic MiniCPS type. `args` holds the element type for List/Option/Monad,
/// the parameter types followed by the result type for Fun, and type arguments
/// for receivers such as `WithFilter[Int]`. `Nothing` is the internal bottom type
/// given to `throw`.
struct Ty {
  TyKind kind = TyKind::Unit;
  std::string name;
  std::vector<TyPtr> args;

  static TyPtr int_();
  static TyPtr bool_();
  static TyPtr str();
  static TyPtr unit();
  static TyPtr nothing();
  static TyPtr list(TyPtr elem);
  static TyPtr option(TyPtr elem);
  static TyPtr fun(std::vector<TyPtr> params, TyPtr ret);
  static TyPtr monad(std::string monad, TyPtr elem);
  static TyPtr receiver(std::string name, std::vector<TyPtr> args = {});

  const TyPtr& elem() const { return args.front(); }
  const TyPtr& ret() const { return args.back(); }
  std::size_t arity() const { return kind == TyKind::Fun ? args.size() - 1 : 0; }
  bool is(TyKind k) const { return kind == k; }
  bool is_monad(std::string_view m) const { return kind == TyKind::Monad && name == m; }
};

bool ty_eq(const TyPtr& a, const TyPtr& b);
std::string show_ty(const TyPtr& t);

// ---------------------------------------------------------------------------
// Expressions

struct UnitLit {
  bool operator==(const UnitLit&) const = default;
};
using Literal = std::variant<UnitLit, std::int64_t, bool, std::string>;

struct Pattern {
  enum class Kind { Lit, Wild, Bind };
  Kind kind = Kind::Wild;
  Literal lit;
  std::string name;
};

enum class ExprKind {
  // surface syntax
  Lit,
  Var,
  Block,
  ValDef,
  VarDef,
  Assign,
  If,
  While,
  Match,
  Try,
  Throw,
  Lambda,
  Apply,
  MethodCall,
  Await,
  Async,
  // monadic core produced by the transformer
  Pure,
  FlatMap,
  Map,
  FlatMapTry,
  MonadError,
  AdoptAwait,
  Convert,
  WhileHelper,
  ShiftCall,
  ChainOp,
  FinishChain,
  CpsBlock,
};

std::string_view kind_name(ExprKind k);

struct Param {
  std::string name;
  TyPtr ty;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// One AST node. Children live in `kids` with a per-kind layout:
///
///   Block        stmts...
///   ValDef/VarDef [rhs, body]              name = bound variable
///   Assign       [rhs]                    name = target
///   If           [cond, then, else]
///   While        [cond, body]
///   Match        [scrutinee, bodies...]   pats[i] guards kids[i + 1]
///   Try          [body, handler?, finally?]  name = catch binder (empty when no catch)
///   Throw        [message]
///   Lambda       [body]                   params
///   Apply        [fn, args...]
///   MethodCall   [receiver, args...]      name = method
///   Await        [inner]
///   Async        [body]                   name = monad
///   Pure         [e]
///   FlatMap/Map  [fa, body]               name = binder
///   FlatMapTry   [fa, onSuccess, onFailure]  name = success binder, name2 = failure binder
///   MonadError   [message]
///   AdoptAwait   [e]                      ref = id of the originating Await
///   Convert      [e]                      name = source monad, name2 = target monad
///   WhileHelper  [cond, body]
///   ShiftCall    [receiver, args...]      name = method, name2 = case tag
///   ChainOp      [builder, fn]            name = op
///   FinishChain  [builder]
///   CpsBlock     [body]                   name = monad
///
/// Missing optional children (Try handler/finally) are null pointers.
struct Expr {
  ExprKind kind = ExprKind::Lit;
  Span span;
  int id = 0;
  int ref = 0;
  TyPtr ty;
  Literal lit;
  std::string name;
  std::string name2;
  std::vector<ExprPtr> kids;
  std::vector<Param> params;
  std::vector<Pattern> pats;

  const ExprPtr& kid(std::size_t i) const { return kids[i]; }
  bool is(ExprKind k) const { return kind == k; }
};

/// Fresh node identity. Ids are unique within a process.
int next_node_id();

/// Copy of `e` carrying type `t`.
ExprPtr with_ty(const ExprPtr& e, TyPtr t);
/// Copy of `e` with replaced children.
ExprPtr with_kids(const ExprPtr& e, std::vector<ExprPtr> kids);

namespace mk {
ExprPtr node(ExprKind k, std::vector<ExprPtr> kids = {}, std::string name = {}, Span span = {});
ExprPtr lit(Literal v, Span span = {});
inline ExprPtr int_(std::int64_t v) { return lit(Literal{v}); }
inline ExprPtr bool_(bool v) { return lit(Literal{v}); }
inline ExprPtr str(std::string v) { return lit(Literal{std::move(v)}); }
inline ExprPtr unit() { return lit(Literal{UnitLit{}}); }
ExprPtr var(std::string name, Span span = {});
ExprPtr block(std::vector<ExprPtr> stmts, Span span = {});
ExprPtr val(std::string name, ExprPtr rhs, ExprPtr body, Span span = {});
ExprPtr var_def(std::string name, ExprPtr rhs, ExprPtr body, Span span = {});
ExprPtr assign(std::string name, ExprPtr rhs, Span span = {});
ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr e, Span span = {});
ExprPtr while_(ExprPtr c, ExprPtr b, Span span = {});
ExprPtr match(ExprPtr scrut, std::vector<std::pair<Pattern, ExprPtr>> cases, Span span = {});
ExprPtr try_(ExprPtr body, std::string catch_name, ExprPtr handler, ExprPtr fin, Span span = {});
ExprPtr throw_(ExprPtr msg, Span span = {});
ExprPtr lambda(std::vector<Param> params, ExprPtr body, Span span = {});
ExprPtr apply(ExprPtr fn, std::vector<ExprPtr> args, Span span = {});
ExprPtr call(std::string fn, std::vector<ExprPtr> args, Span span = {});
ExprPtr method(ExprPtr recv, std::string name, std::vector<ExprPtr> args, Span span = {});
ExprPtr await(ExprPtr inner, Span span = {});
ExprPtr async(std::string monad, ExprPtr body, Span span = {});

ExprPtr pure(ExprPtr e);
ExprPtr flat_map(ExprPtr fa, std::string binder, ExprPtr body);
ExprPtr map(ExprPtr fa, std::string binder, ExprPtr body);
ExprPtr flat_map_try(ExprPtr fa, std::string ok, ExprPtr on_ok, std::string err, ExprPtr on_err);
ExprPtr error(ExprPtr msg);
ExprPtr adopt(ExprPtr e, int await_id);
ExprPtr convert(std::string from, std::string to, ExprPtr e);
ExprPtr while_helper(ExprPtr c, ExprPtr b);
ExprPtr shift_call(std::string tag, ExprPtr recv, std::string method, std::vector<ExprPtr> args);
ExprPtr chain_op(ExprPtr builder, std::string op, ExprPtr fn);
ExprPtr finish_chain(ExprPtr builder);
ExprPtr cps_block(std::string monad, ExprPtr body);

inline Pattern lit_pat(Literal v) { return Pattern{Pattern::Kind::Lit, std::move(v), {}}; }
inline Pattern wild_pat() { return Pattern{Pattern::Kind::Wild, {}, {}}; }
inline Pattern bind_pat(std::string n) { return Pattern{Pattern::Kind::Bind, {}, std::move(n)}; }
}  // namespace mk

// ---------------------------------------------------------------------------
// Programs

struct FunDef {
  std::string name;
  std::vector<Param> params;
  TyPtr ret;
  ExprPtr body;
  Span span;
};

struct Program {
  std::vector<FunDef> defs;
  ExprPtr main;
};

// ---------------------------------------------------------------------------
// Structural operations

/// Structural equality ignoring spans, node ids and type annotations.
bool struct_eq(const ExprPtr& a, const ExprPtr& b);
bool struct_eq(const Program& a, const Program& b);

/// Concrete-syntax rendering. Surface nodes print as MiniCPS source; monadic
/// core nodes print in the `F.flatMap(fa)(x => ...)` notation the parser also
/// accepts. Deterministic.
std::string pretty(const ExprPtr& e);
std::string pretty(const Program& p);
std::string pretty_literal(const Literal& l);
std::string pretty_pattern(const Pattern& p);

/// Free variables (names read or assigned but not bound inside `e`).
std::set<std::string> free_vars(const ExprPtr& e);
/// Rename free occurrences of `from` to `to`. `to` must be fresh.
ExprPtr rename_free(const ExprPtr& e, const std::string& from, const std::string& to);

/// The compiled-in monad names: ident, option, result, nondet, eventual, resource.
bool is_monad_name(std::string_view name);

/// Binary operator spelling for a sugar method (`plus` -> `+`), or empty.
std::string_view binary_op_for(std::string_view method);
/// Method name for a binary operator spelling (`+` -> `plus`), or empty.
std::string_view method_for_op(std::string_view op);

}  // namespace cpsforge
