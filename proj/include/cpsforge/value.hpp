#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cpsforge/ast.hpp"

namespace cpsforge {

struct Value;
struct MVal;
struct Closure;
struct ChainState;

using ValueList = std::shared_ptr<const std::vector<Value>>;
using MValPtr = std::shared_ptr<const MVal>;
using ClosurePtr = std::shared_ptr<const Closure>;

struct UnitV {};
struct RangeV {
  std::int64_t lo = 0, hi = 0;
};
struct CacheV {
  int id = 0;
};
struct BoxV {
  std::shared_ptr<const Value> inner;
};
struct FileV {
  int id = 0;
};
struct BufferV {
  std::int64_t size = 0;
};
struct OptionV {
  std::shared_ptr<const Value> inner;  // null for None
};
/// `List.withFilter` result: the source plus predicates not yet applied.
struct WithFilterV {
  ValueList items;
  std::vector<ClosurePtr> preds;
};
struct ChainV {
  std::shared_ptr<ChainState> state;
};

struct Value {
  std::variant<UnitV, std::int64_t, bool, std::string, ValueList, ClosurePtr, MValPtr, RangeV, CacheV, BoxV, FileV,
               BufferV, OptionV, WithFilterV, ChainV>
      v;

  Value() = default;
  template <class T>
  Value(T x) : v(std::move(x)) {}

  std::int64_t as_int() const;
  bool as_bool() const;
  const std::string& as_str() const;
  const ValueList& as_list() const;
  const ClosurePtr& as_closure() const;
  const MValPtr& as_m() const;
  template <class T>
  const T* get() const {
    return std::get_if<T>(&v);
  }
};

Value make_list(std::vector<Value> xs);

struct Env;
using EnvPtr = std::shared_ptr<const Env>;

/// Lexical bindings. Vals hold their value; vars hold an index into
/// World::cells so that every closure sees assignments.
struct Env {
  std::string name;
  Value value;
  int cell = -1;
  EnvPtr parent;
};

EnvPtr env_bind(EnvPtr parent, std::string name, Value v);
EnvPtr env_bind_cell(EnvPtr parent, std::string name, int cell);
const Env* env_find(const EnvPtr& env, const std::string& name);

/// A callable. Interpreted closures carry the monad in which they were
/// created so that monadic core nodes in their body know their F; native
/// closures wrap C++ code (builtins and shifted-library helpers).
struct Closure {
  std::vector<std::string> params;
  ExprPtr body;
  EnvPtr env;
  std::string monad;
  int arity = 0;
  std::function<Value(std::vector<Value>)> native;
};

struct FileData {
  std::int64_t size = 0;
};
struct Handle {
  std::string name;
  std::int64_t pos = 0;
};

/// All mutable program state. Copyable: nondet branches carry snapshots.
struct World {
  std::vector<Value> cells;
  std::map<std::string, std::int64_t> counters;
  std::vector<std::map<std::int64_t, std::int64_t>> caches;
  std::map<std::string, FileData> files;
  std::vector<Handle> handles;
  std::vector<std::string> discards;
  std::vector<int> adopt_log;
  std::int64_t visits = 0;
};

std::string show_value(const Value& v);
/// Structural equality on data values; closures compare by identity.
bool value_eq(const Value& a, const Value& b);

/// Raised by `throw` in direct-style code.
struct ThrowSignal {
  std::string msg;
};

}  // namespace cpsforge
