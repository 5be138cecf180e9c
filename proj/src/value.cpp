#include "cpsforge/value.hpp"

#include "cpsforge/monads.hpp"

namespace cpsforge {

namespace {
[[noreturn]] void bad(const char* want, const Value& v) {
  kernel_fault(std::string("expected ") + want + ", got " + show_value(v));
}
}  // namespace

std::int64_t Value::as_int() const {
  if (auto* p = get<std::int64_t>()) return *p;
  bad("Int", *this);
}
bool Value::as_bool() const {
  if (auto* p = get<bool>()) return *p;
  bad("Bool", *this);
}
const std::string& Value::as_str() const {
  if (auto* p = get<std::string>()) return *p;
  bad("Str", *this);
}
const ValueList& Value::as_list() const {
  if (auto* p = get<ValueList>()) return *p;
  bad("List", *this);
}
const ClosurePtr& Value::as_closure() const {
  if (auto* p = get<ClosurePtr>()) return *p;
  bad("function", *this);
}
const MValPtr& Value::as_m() const {
  if (auto* p = get<MValPtr>()) return *p;
  bad("monadic value", *this);
}

Value make_list(std::vector<Value> xs) { return Value(ValueList(std::make_shared<const std::vector<Value>>(std::move(xs)))); }

EnvPtr env_bind(EnvPtr parent, std::string name, Value v) {
  auto e = std::make_shared<Env>();
  e->name = std::move(name);
  e->value = std::move(v);
  e->parent = std::move(parent);
  return e;
}

EnvPtr env_bind_cell(EnvPtr parent, std::string name, int cell) {
  auto e = std::make_shared<Env>();
  e->name = std::move(name);
  e->cell = cell;
  e->parent = std::move(parent);
  return e;
}

const Env* env_find(const EnvPtr& env, const std::string& name) {
  for (const Env* e = env.get(); e; e = e->parent.get())
    if (e->name == name) return e;
  return nullptr;
}

namespace {
std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string show_m(const MVal& m) {
  switch (m.m) {
    case MonadId::Ident: return "ident(" + show_value(m.v) + ")";
    case MonadId::Option: return m.ok ? "option(Some " + show_value(m.v) + ")" : "option(None)";
    case MonadId::Result: return m.ok ? "result(Ok " + show_value(m.v) + ")" : "result(Err " + m.err + ")";
    case MonadId::Nondet: {
      std::string s = "nondet(";
      for (std::size_t i = 0; i < m.branches.size(); ++i) {
        if (i) s += ", ";
        s += show_value(m.branches[i].v);
      }
      return s + ")";
    }
    case MonadId::Eventual: return "eventual(#" + std::to_string(m.cell) + ")";
    case MonadId::Resource: return "resource(<plan>)";
  }
  return "?";
}
}  // namespace

std::string show_value(const Value& val) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, UnitV>)
          return "unit";
        else if constexpr (std::is_same_v<T, std::int64_t>)
          return std::to_string(x);
        else if constexpr (std::is_same_v<T, bool>)
          return x ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::string>)
          return quote(x);
        else if constexpr (std::is_same_v<T, ValueList>) {
          std::string s = "[";
          for (std::size_t i = 0; i < x->size(); ++i) {
            if (i) s += ", ";
            s += show_value((*x)[i]);
          }
          return s + "]";
        } else if constexpr (std::is_same_v<T, ClosurePtr>)
          return "<fun>";
        else if constexpr (std::is_same_v<T, MValPtr>)
          return show_m(*x);
        else if constexpr (std::is_same_v<T, RangeV>)
          return "range(" + std::to_string(x.lo) + ", " + std::to_string(x.hi) + ")";
        else if constexpr (std::is_same_v<T, CacheV>)
          return "<cache>";
        else if constexpr (std::is_same_v<T, BoxV>)
          return "box(" + show_value(*x.inner) + ")";
        else if constexpr (std::is_same_v<T, FileV>)
          return "<file>";
        else if constexpr (std::is_same_v<T, BufferV>)
          return "<buffer " + std::to_string(x.size) + ">";
        else if constexpr (std::is_same_v<T, OptionV>)
          return x.inner ? "Some(" + show_value(*x.inner) + ")" : "None";
        else if constexpr (std::is_same_v<T, WithFilterV>)
          return "<withFilter>";
        else
          return "<chain>";
      },
      val.v);
}

bool value_eq(const Value& a, const Value& b) {
  if (a.v.index() != b.v.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.v);
        if constexpr (std::is_same_v<T, UnitV>)
          return true;
        else if constexpr (std::is_same_v<T, std::int64_t> || std::is_same_v<T, bool> ||
                           std::is_same_v<T, std::string>)
          return x == y;
        else if constexpr (std::is_same_v<T, ValueList>) {
          if (x->size() != y->size()) return false;
          for (std::size_t i = 0; i < x->size(); ++i)
            if (!value_eq((*x)[i], (*y)[i])) return false;
          return true;
        } else if constexpr (std::is_same_v<T, RangeV>)
          return x.lo == y.lo && x.hi == y.hi;
        else if constexpr (std::is_same_v<T, CacheV> || std::is_same_v<T, FileV>)
          return x.id == y.id;
        else if constexpr (std::is_same_v<T, BufferV>)
          return x.size == y.size;
        else if constexpr (std::is_same_v<T, BoxV>)
          return value_eq(*x.inner, *y.inner);
        else if constexpr (std::is_same_v<T, OptionV>)
          return (!x.inner && !y.inner) || (x.inner && y.inner && value_eq(*x.inner, *y.inner));
        else if constexpr (std::is_same_v<T, ClosurePtr> || std::is_same_v<T, MValPtr>)
          return x == y;
        else if constexpr (std::is_same_v<T, ChainV>)
          return x.state == y.state;
        else
          return false;
      },
      a.v);
}

}  // namespace cpsforge
