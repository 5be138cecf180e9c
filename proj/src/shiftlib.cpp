#include "cpsforge/shiftlib.hpp"

namespace cpsforge {

std::string tag_name(ShiftTag t) {
  switch (t) {
    case ShiftTag::AsyncShiftFO: return "asyncShift-fo";
    case ShiftTag::AsyncShiftO: return "asyncShift-o";
    case ShiftTag::InplaceF: return "inplace-f";
    case ShiftTag::Inplace: return "inplace";
  }
  return "?";
}

std::optional<ShiftTag> tag_from_name(std::string_view s) {
  for (ShiftTag t : {ShiftTag::AsyncShiftFO, ShiftTag::AsyncShiftO, ShiftTag::InplaceF, ShiftTag::Inplace})
    if (tag_name(t) == s) return t;
  return std::nullopt;
}

std::string return_kind_name(ReturnKind k) {
  switch (k) {
    case ReturnKind::Plain: return "Plain";
    case ReturnKind::Wrapped: return "Wrapped";
    case ReturnKind::CallChain: return "CallChain";
  }
  return "?";
}

std::string resolution_name(const Resolution& r) {
  switch (r.kind) {
    case ResolutionKind::Unchanged: return "unchanged";
    case ResolutionKind::Monadic: return "monadic";
    case ResolutionKind::Shifted: return tag_name(r.entry->tag);
  }
  return "?";
}

std::string receiver_kind(const TyPtr& t) {
  switch (t->kind) {
    case TyKind::Int: return "Int";
    case TyKind::Bool: return "Bool";
    case TyKind::Str: return "Str";
    case TyKind::Unit: return "Unit";
    case TyKind::List: return "List";
    case TyKind::Option: return "Option";
    case TyKind::Fun: return "Fun";
    case TyKind::Monad: return t->name;
    case TyKind::Receiver: return t->name;
    case TyKind::Nothing: return "Nothing";
  }
  return "?";
}

std::string receiver_kind(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, UnitV>) return "Unit";
        else if constexpr (std::is_same_v<T, std::int64_t>) return "Int";
        else if constexpr (std::is_same_v<T, bool>) return "Bool";
        else if constexpr (std::is_same_v<T, std::string>) return "Str";
        else if constexpr (std::is_same_v<T, ValueList>) return "List";
        else if constexpr (std::is_same_v<T, ClosurePtr>) return "Fun";
        else if constexpr (std::is_same_v<T, MValPtr>) return monad_name(x->m);
        else if constexpr (std::is_same_v<T, RangeV>) return "Range";
        else if constexpr (std::is_same_v<T, CacheV>) return "Cache";
        else if constexpr (std::is_same_v<T, BoxV>) return "Box";
        else if constexpr (std::is_same_v<T, FileV>) return "File";
        else if constexpr (std::is_same_v<T, BufferV>) return "Buffer";
        else if constexpr (std::is_same_v<T, OptionV>) return "Option";
        else if constexpr (std::is_same_v<T, WithFilterV>) return "WithFilter";
        else return "Chain";
      },
      v.v);
}

void ShiftRegistry::add(ShiftEntry e) {
  for (auto& x : entries_)
    if (x.receiver == e.receiver && x.method == e.method && x.tag == e.tag && x.monad == e.monad) {
      x = std::move(e);
      return;
    }
  entries_.push_back(std::move(e));
}

const ShiftEntry* ShiftRegistry::find(const std::string& receiver, const std::string& method, ShiftTag tag,
                                      MonadId f) const {
  for (const auto& e : entries_) {
    if (e.receiver != receiver || e.method != method || e.tag != tag) continue;
    if (e.monad && *e.monad != f) continue;
    return &e;
  }
  return nullptr;
}

const ShiftEntry* ShiftRegistry::lookup(const std::string& receiver, const std::string& method, MonadId f) const {
  for (ShiftTag t : {ShiftTag::InplaceF, ShiftTag::Inplace, ShiftTag::AsyncShiftFO, ShiftTag::AsyncShiftO})
    if (const auto* e = find(receiver, method, t, f)) return e;
  return nullptr;
}

Resolution resolve(const ShiftRegistry& reg, const TyPtr& recv_ty, const std::string& method,
                   const std::vector<bool>& effectful, const std::vector<bool>& monadic, const std::string& f,
                   Span span) {
  bool any = false, all_monadic = true;
  for (std::size_t i = 0; i < effectful.size(); ++i) {
    if (!effectful[i]) continue;
    any = true;
    if (i >= monadic.size() || !monadic[i]) all_monadic = false;
  }
  if (!any) return {ResolutionKind::Unchanged, nullptr};
  if (all_monadic) return {ResolutionKind::Monadic, nullptr};
  std::string kind = receiver_kind(recv_ty);
  auto m = monad_id(f);
  if (m)
    if (const auto* e = reg.lookup(kind, method, *m)) return {ResolutionKind::Shifted, e};
  throw Error(ErrorKind::ShiftResolution, span,
              "no shifted implementation of " + kind + "." + method + " for async[" + f + "]");
}

Value shifted_call(const ShiftEntry& e, Kernel& k, MonadId f, const Value& recv, const std::vector<Value>& args) {
  Value r = e.impl(k, f, recv, args);
  if (e.ret == ReturnKind::Plain) return Value(k.pure(f, std::move(r)));
  return r;
}

namespace {

/// One monadic traversal step per element, stopping early when `done` holds.
struct Loop {
  std::function<MValPtr(const Value& x, const Value& acc)> step;
  std::function<bool(const Value& acc)> done;
  std::function<Value(const Value& acc)> result;
};

MValPtr run_loop(Kernel& k, MonadId f, ValueList xs, std::size_t i, Value acc, std::shared_ptr<const Loop> L) {
  while (true) {
    if (i == xs->size() || (L->done && L->done(acc))) return k.pure(f, L->result ? L->result(acc) : acc);
    k.world.visits++;
    MValPtr r = L->step((*xs)[i], acc);
    // Plain ident steps need no continuation; iterate to keep the stack flat.
    if (r->m == MonadId::Ident && f == MonadId::Ident) {
      acc = r->v;
      ++i;
      continue;
    }
    return k.flat_map(r, [&k, f, xs, i, L](const Value& a) { return run_loop(k, f, xs, i + 1, a, L); });
  }
}

MValPtr loop(Kernel& k, MonadId f, ValueList xs, Value init, Loop L) {
  return run_loop(k, f, std::move(xs), 0, std::move(init), std::make_shared<const Loop>(std::move(L)));
}

MValPtr call_m(Kernel& k, MonadId f, const Value& fn, std::vector<Value> args) {
  return k.guarded(f, [&] { return Kernel::expect_monad(k.call(fn, std::move(args)), f); });
}

Value appended(const Value& acc, const Value& x) {
  std::vector<Value> v = *acc.as_list();
  v.push_back(x);
  return make_list(std::move(v));
}

ValueList range_items(const Value& recv) {
  const auto* r = recv.get<RangeV>();
  if (!r) kernel_fault("expected Range, got " + show_value(recv));
  std::vector<Value> v;
  for (std::int64_t i = r->lo; i < r->hi; ++i) v.push_back(Value(i));
  return std::make_shared<const std::vector<Value>>(std::move(v));
}

void need_args(const std::vector<Value>& args, std::size_t n, const char* what) {
  if (args.size() != n)
    kernel_fault(std::string(what) + ": expected " + std::to_string(n) + " arguments, got " +
                 std::to_string(args.size()));
}

MValPtr map_items(Kernel& k, MonadId f, ValueList xs, const Value& fn) {
  return loop(k, f, std::move(xs), make_list({}),
              {[&k, f, fn](const Value& x, const Value& acc) {
                 return k.map(call_m(k, f, fn, {x}), [acc](const Value& y) { return appended(acc, y); });
               },
               nullptr, nullptr});
}

MValPtr filter_items(Kernel& k, MonadId f, ValueList xs, const Value& p) {
  return loop(k, f, std::move(xs), make_list({}),
              {[&k, f, p](const Value& x, const Value& acc) {
                 return k.map(call_m(k, f, p, {x}), [acc, x](const Value& b) { return b.as_bool() ? appended(acc, x) : acc; });
               },
               nullptr, nullptr});
}

MValPtr foreach_items(Kernel& k, MonadId f, ValueList xs, const Value& fn) {
  return loop(k, f, std::move(xs), Value(UnitV{}),
              {[&k, f, fn](const Value& x, const Value&) {
                 return k.map(call_m(k, f, fn, {x}), [](const Value&) { return Value(UnitV{}); });
               },
               nullptr, nullptr});
}

const WithFilterV& as_wf(const Value& v) {
  const auto* w = v.get<WithFilterV>();
  if (!w) kernel_fault("expected WithFilter, got " + show_value(v));
  return *w;
}

bool passes(Kernel& k, const WithFilterV& w, const Value& x) {
  for (const auto& p : w.preds)
    if (!k.call(Value(p), {x}).as_bool()) return false;
  return true;
}

/// Traverse a WithFilter source, applying its pure predicates before `step`.
MValPtr wf_loop(Kernel& k, MonadId f, const WithFilterV& w, Value init,
                std::function<MValPtr(const Value& x, const Value& acc)> step) {
  WithFilterV wc = w;
  return loop(k, f, w.items, std::move(init),
              {[&k, f, wc, step](const Value& x, const Value& acc) {
                 if (!passes(k, wc, x)) return k.pure(f, acc);
                 return step(x, acc);
               },
               nullptr, nullptr});
}

Value wf_value(const Value& list) { return Value(WithFilterV{list.as_list(), {}}); }

/// Apply chain ops j.. to `x`; the result is OptionV (None when filtered out).
MValPtr chain_element(Kernel& k, MonadId f, std::shared_ptr<const ChainState> st, std::size_t j, const Value& x) {
  if (j == st->ops.size()) return k.pure(f, Value(OptionV{std::make_shared<const Value>(x)}));
  const auto& [op, fn] = st->ops[j];
  if (op == "filter" || op == "withFilter")
    return k.flat_map(call_m(k, f, fn, {x}), [&k, f, st, j, x](const Value& b) {
      if (!b.as_bool()) return k.pure(f, Value(OptionV{}));
      return chain_element(k, f, st, j + 1, x);
    });
  if (op == "map" || op == "foreach")
    return k.flat_map(call_m(k, f, fn, {x}),
                      [&k, f, st, j](const Value& y) { return chain_element(k, f, st, j + 1, y); });
  kernel_fault("unknown chain op " + op);
}

}  // namespace

Value chain_start(const ValueList& source, const Value& pred) {
  auto st = std::make_shared<ChainState>();
  st->source = source;
  st->ops.push_back({"filter", pred});
  return Value(ChainV{st});
}

Value chain_append(const Value& builder, const std::string& op, const Value& fn) {
  const auto* c = builder.get<ChainV>();
  if (!c) kernel_fault("expected chain builder, got " + show_value(builder));
  if (c->state->finished) kernel_fault("chain builder used after finish");
  if (op != "filter" && op != "withFilter" && op != "map" && op != "foreach")
    kernel_fault("unsupported chain op " + op);
  auto st = std::make_shared<ChainState>(*c->state);
  st->ops.push_back({op, fn});
  return Value(ChainV{st});
}

MValPtr chain_finish(Kernel& k, MonadId f, const Value& builder) {
  const auto* c = builder.get<ChainV>();
  if (!c) kernel_fault("expected chain builder, got " + show_value(builder));
  if (c->state->finished) kernel_fault("chain builder used after finish");
  c->state->finished = true;
  auto st = std::make_shared<const ChainState>(*c->state);
  std::string last = st->ops.back().first;
  MValPtr r = loop(k, f, st->source, make_list({}),
                   {[&k, f, st](const Value& x, const Value& acc) {
                      return k.map(chain_element(k, f, st, 0, x), [acc](const Value& o) {
                        const auto& ov = *o.get<OptionV>();
                        return ov.inner ? appended(acc, *ov.inner) : acc;
                      });
                    },
                    nullptr, nullptr});
  if (last == "map") return r;
  if (last == "foreach") return k.map(r, [](const Value&) { return Value(UnitV{}); });
  return k.map(r, [](const Value& xs) { return wf_value(xs); });
}

ShiftRegistry ShiftRegistry::builtin(const ShiftOptions& opts) {
  ShiftRegistry reg;
  auto fo = [&](std::string recv, std::string method, std::string shifted, ReturnKind ret, ShiftImpl impl) {
    reg.add({std::move(recv), std::move(method), ShiftTag::AsyncShiftFO, ret, std::nullopt, std::move(shifted),
             std::move(impl)});
  };

  fo("List", "map", "mapAsync", ReturnKind::Wrapped, [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
    need_args(a, 1, "List.map");
    return Value(map_items(k, f, r.as_list(), a[0]));
  });
  fo("List", "filter", "filterAsync", ReturnKind::Wrapped,
     [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
       need_args(a, 1, "List.filter");
       return Value(filter_items(k, f, r.as_list(), a[0]));
     });
  fo("List", "foreach", "foreachAsync", ReturnKind::Wrapped,
     [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
       need_args(a, 1, "List.foreach");
       return Value(foreach_items(k, f, r.as_list(), a[0]));
     });
  fo("List", "fold", "foldAsync", ReturnKind::Wrapped, [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
    need_args(a, 2, "List.fold");
    Value g = a[1];
    return Value(loop(k, f, r.as_list(), a[0],
                      {[&k, f, g](const Value& x, const Value& acc) { return call_m(k, f, g, {acc, x}); }, nullptr,
                       nullptr}));
  });
  fo("List", "getOrElse", "getOrElseAsync", ReturnKind::Wrapped,
     [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
       need_args(a, 2, "List.getOrElse");
       const auto& xs = *r.as_list();
       std::int64_t i = a[0].as_int();
       if (i >= 0 && i < static_cast<std::int64_t>(xs.size())) return Value(k.pure(f, xs[i]));
       return Value(call_m(k, f, a[1], {}));
     });
  if (opts.callchain) {
    fo("List", "withFilter", "withFilterAsync", ReturnKind::CallChain,
       [](Kernel&, MonadId, const Value& r, const std::vector<Value>& a) {
         need_args(a, 1, "List.withFilter");
         return chain_start(r.as_list(), a[0]);
       });
  } else {
    fo("List", "withFilter", "withFilterAsync", ReturnKind::Wrapped,
       [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
         need_args(a, 1, "List.withFilter");
         return Value(k.map(filter_items(k, f, r.as_list(), a[0]), wf_value));
       });
  }
  fo("Range", "foreach", "foreachAsync", ReturnKind::Wrapped,
     [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
       need_args(a, 1, "Range.foreach");
       return Value(foreach_items(k, f, range_items(r), a[0]));
     });
  fo("Range", "filter", "filterAsync", ReturnKind::Wrapped,
     [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
       need_args(a, 1, "Range.filter");
       return Value(filter_items(k, f, range_items(r), a[0]));
     });
  fo("Cache", "getOrUpdate", "getOrUpdateAsync", ReturnKind::Wrapped,
     [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
       need_args(a, 2, "Cache.getOrUpdate");
       int id = r.get<CacheV>()->id;
       std::int64_t key = a[0].as_int();
       auto& c = k.world.caches.at(id);
       if (auto it = c.find(key); it != c.end()) return Value(k.pure(f, Value(it->second)));
       return Value(k.flat_map(call_m(k, f, a[1], {}), [&k, f, id, key](const Value& v) {
         k.world.caches.at(id)[key] = v.as_int();
         return k.pure(f, v);
       }));
     });
  fo("WithFilter", "map", "mapAsync", ReturnKind::Wrapped,
     [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
       need_args(a, 1, "WithFilter.map");
       Value fn = a[0];
       return Value(wf_loop(k, f, as_wf(r), make_list({}), [&k, f, fn](const Value& x, const Value& acc) {
         return k.map(call_m(k, f, fn, {x}), [acc](const Value& y) { return appended(acc, y); });
       }));
     });
  fo("WithFilter", "foreach", "foreachAsync", ReturnKind::Wrapped,
     [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
       need_args(a, 1, "WithFilter.foreach");
       Value fn = a[0];
       return Value(wf_loop(k, f, as_wf(r), Value(UnitV{}), [&k, f, fn](const Value& x, const Value&) {
         return k.map(call_m(k, f, fn, {x}), [](const Value&) { return Value(UnitV{}); });
       }));
     });
  for (const char* name : {"filter", "withFilter"})
    fo("WithFilter", name, "filterAsync", ReturnKind::Wrapped,
       [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
         need_args(a, 1, "WithFilter.filter");
         Value p = a[0];
         MValPtr kept = wf_loop(k, f, as_wf(r), make_list({}), [&k, f, p](const Value& x, const Value& acc) {
           return k.map(call_m(k, f, p, {x}), [acc, x](const Value& b) { return b.as_bool() ? appended(acc, x) : acc; });
         });
         return Value(k.map(kept, wf_value));
       });

  // Monad-specific instances: one registration per target monad.
  for (const auto& d : all_monads()) {
    MonadId m = d.id;
    reg.add({"List", "exists", ShiftTag::AsyncShiftO, ReturnKind::Wrapped, m, "existsAsync",
             [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
               need_args(a, 1, "List.exists");
               Value p = a[0];
               return Value(loop(k, f, r.as_list(), Value(false),
                                 {[&k, f, p](const Value& x, const Value&) { return call_m(k, f, p, {x}); },
                                  [](const Value& acc) { return acc.as_bool(); }, nullptr}));
             }});
    reg.add({"Cache", "getOrElse", ShiftTag::AsyncShiftO, ReturnKind::Wrapped, m, "getOrElseAsync",
             [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
               need_args(a, 2, "Cache.getOrElse");
               const auto& c = k.world.caches.at(r.get<CacheV>()->id);
               if (auto it = c.find(a[0].as_int()); it != c.end()) return Value(k.pure(f, Value(it->second)));
               return Value(call_m(k, f, a[1], {}));
             }});
  }

  // Box carries its own shifted methods.
  reg.add({"Box", "map", ShiftTag::InplaceF, ReturnKind::Wrapped, std::nullopt, "mapAsync",
           [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
             need_args(a, 1, "Box.map");
             return Value(k.map(call_m(k, f, a[0], {*r.get<BoxV>()->inner}),
                                [](const Value& u) { return Value(BoxV{std::make_shared<const Value>(u)}); }));
           }});
  reg.add({"Box", "apply", ShiftTag::Inplace, ReturnKind::Wrapped, std::nullopt, "applyAsync",
           [](Kernel& k, MonadId f, const Value& r, const std::vector<Value>& a) {
             need_args(a, 1, "Box.apply");
             return Value(call_m(k, f, a[0], {*r.get<BoxV>()->inner}));
           }});
  return reg;
}

}  // namespace cpsforge
