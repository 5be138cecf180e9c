#include "cpsforge/monads.hpp"

#include <algorithm>

namespace cpsforge {

namespace {

constexpr std::size_t kMaxPaths = 1000000;

const std::vector<MonadDescriptor> kMonads = {
    {MonadId::Ident, "ident", false, true, false},       {MonadId::Option, "option", false, true, false},
    {MonadId::Result, "result", true, true, false},      {MonadId::Nondet, "nondet", false, false, true},
    {MonadId::Eventual, "eventual", true, true, false},  {MonadId::Resource, "resource", true, true, false},
};

std::shared_ptr<MVal> fresh(MonadId m) {
  auto v = std::make_shared<MVal>();
  v->m = m;
  return v;
}

void check_paths(std::size_t n) {
  if (n > kMaxPaths)
    throw Error(ErrorKind::PathExplosion, {}, "nondeterministic paths exceed " + std::to_string(kMaxPaths));
}

}  // namespace

[[noreturn]] void kernel_fault(const std::string& msg) { throw Error(ErrorKind::Kernel, {}, msg); }

std::optional<MonadId> monad_id(std::string_view name) {
  for (const auto& d : kMonads)
    if (d.name == name) return d.id;
  return std::nullopt;
}

MonadId monad_id_or_throw(std::string_view name) {
  auto m = monad_id(name);
  if (!m) kernel_fault("unknown monad '" + std::string(name) + "'");
  return *m;
}

std::string monad_name(MonadId m) { return descriptor(m).name; }

const MonadDescriptor& descriptor(MonadId m) { return kMonads[static_cast<std::size_t>(m)]; }
const std::vector<MonadDescriptor>& all_monads() { return kMonads; }

bool conversion_registered(std::string_view from, std::string_view to) {
  if (from == to) return true;
  if (from == "ident") return monad_id(to).has_value();
  return (from == "option" && (to == "result" || to == "nondet")) || (from == "result" && to == "eventual");
}

// ---------------------------------------------------------------------------
// Scheduler

int Scheduler::new_cell() {
  cells_.emplace_back();
  return static_cast<int>(cells_.size()) - 1;
}

void Scheduler::complete(int cell, Outcome o) {
  Cell& c = cells_.at(cell);
  if (c.out) kernel_fault("eventual cell #" + std::to_string(cell) + " completed twice");
  c.out = o;
  order_.push_back(cell);
  auto waiters = std::move(c.waiters);
  c.waiters.clear();
  for (auto& w : waiters) enqueue([w = std::move(w), o]() { w(o); });
}

void Scheduler::on_complete(int cell, std::function<void(const Outcome&)> cb) {
  Cell& c = cells_.at(cell);
  if (c.out) {
    Outcome o = *c.out;
    enqueue([cb = std::move(cb), o]() { cb(o); });
  } else {
    c.waiters.push_back(std::move(cb));
  }
}

void Scheduler::enqueue(std::function<void()> task) { queue_.push_back(std::move(task)); }

bool Scheduler::step() {
  if (queue_.empty()) return false;
  auto t = std::move(queue_.front());
  queue_.pop_front();
  t();
  return true;
}

void Scheduler::run_until_idle() {
  while (step()) {
  }
}

bool Scheduler::drive_until(int cell) {
  while (!cells_.at(cell).out)
    if (!step()) return false;
  return true;
}

const Outcome* Scheduler::result(int cell) const {
  const auto& c = cells_.at(cell);
  return c.out ? &*c.out : nullptr;
}

std::vector<int> Scheduler::pending_cells() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (!cells_[i].out) out.push_back(static_cast<int>(i));
  return out;
}

// ---------------------------------------------------------------------------
// Kernel

MValPtr Kernel::expect_monad(const Value& v, MonadId m) {
  const MValPtr* p = v.get<MValPtr>();
  if (!p || !*p) kernel_fault("expected a " + monad_name(m) + " value, got " + show_value(v));
  if ((*p)->m != m) kernel_fault("expected a " + monad_name(m) + " value, got a " + monad_name((*p)->m) + " value");
  return *p;
}

MValPtr Kernel::guarded(MonadId m, const Thunk& f) {
  MValPtr r;
  try {
    r = f();
  } catch (const ThrowSignal& t) {
    if (descriptor(m).has_error_channel) return error(m, t.msg);
    throw;
  }
  if (!r) kernel_fault("continuation returned no value");
  if (r->m != m) kernel_fault("mixing " + monad_name(r->m) + " into " + monad_name(m));
  return r;
}

MValPtr Kernel::pure(MonadId m, Value v) {
  auto r = fresh(m);
  switch (m) {
    case MonadId::Ident:
    case MonadId::Option:
    case MonadId::Result: r->v = std::move(v); break;
    case MonadId::Nondet: r->branches.push_back(Branch{std::move(v), nullptr}); break;
    case MonadId::Eventual:
      r->cell = sched.new_cell();
      sched.complete(r->cell, Outcome{true, std::move(v), {}});
      break;
    case MonadId::Resource: {
      Outcome o{true, std::move(v), {}};
      r->plan = std::make_shared<const Plan>([o](ResCtx&) { return o; });
      break;
    }
  }
  return r;
}

MValPtr Kernel::error(MonadId m, const std::string& msg) {
  auto r = fresh(m);
  switch (m) {
    case MonadId::Result:
      r->ok = false;
      r->err = msg;
      break;
    case MonadId::Eventual:
      r->cell = sched.new_cell();
      sched.complete(r->cell, Outcome{false, {}, msg});
      break;
    case MonadId::Resource: {
      Outcome o{false, {}, msg};
      r->plan = std::make_shared<const Plan>([o](ResCtx&) { return o; });
      break;
    }
    default:
      throw Error(ErrorKind::Capability, {}, "monad " + monad_name(m) + " has no error channel");
  }
  return r;
}

Outcome Kernel::run_plan(const MValPtr& v, ResCtx& ctx) {
  if (v->m != MonadId::Resource || !v->plan) kernel_fault("expected a resource plan");
  return (*v->plan)(ctx);
}

MValPtr Kernel::flat_map(const MValPtr& fa, Fn f) {
  const MonadId m = fa->m;
  switch (m) {
    case MonadId::Ident: return guarded(m, [&] { return f(fa->v); });
    case MonadId::Option:
    case MonadId::Result:
      if (!fa->ok) return fa;
      return guarded(m, [&] { return f(fa->v); });
    case MonadId::Nondet: return flat_map_nondet(fa, f);
    case MonadId::Eventual: {
      auto r = fresh(m);
      int out = r->cell = sched.new_cell();
      sched.on_complete(fa->cell, [this, f = std::move(f), out](const Outcome& o) {
        if (!o.ok) {
          sched.complete(out, o);
          return;
        }
        auto next = guarded(MonadId::Eventual, [&] { return f(o.v); });
        sched.on_complete(next->cell, [this, out](const Outcome& o2) { sched.complete(out, o2); });
      });
      return r;
    }
    case MonadId::Resource: {
      auto r = fresh(m);
      r->plan = std::make_shared<const Plan>([this, fa, f = std::move(f)](ResCtx& ctx) {
        Outcome o = run_plan(fa, ctx);
        if (!o.ok) return o;
        auto next = guarded(MonadId::Resource, [&] { return f(o.v); });
        return run_plan(next, ctx);
      });
      return r;
    }
  }
  kernel_fault("unreachable");
}

MValPtr Kernel::flat_map_nondet(const MValPtr& fa, const Fn& f) {
  World w0 = world;
  auto r = fresh(MonadId::Nondet);
  for (const auto& b : fa->branches) {
    world = b.world ? *b.world : w0;
    auto next = guarded(MonadId::Nondet, [&] { return f(b.v); });
    std::shared_ptr<const World> here;
    for (const auto& nb : next->branches) {
      if (nb.world) {
        r->branches.push_back(nb);
      } else {
        if (!here) here = std::make_shared<const World>(world);
        r->branches.push_back(Branch{nb.v, here});
      }
    }
    check_paths(r->branches.size());
  }
  world = std::move(w0);
  return r;
}

MValPtr Kernel::map(const MValPtr& fa, ValFn f) {
  MonadId m = fa->m;
  return flat_map(fa, [this, m, f = std::move(f)](const Value& v) { return pure(m, f(v)); });
}

MValPtr Kernel::flat_map_try(const MValPtr& fa, TryFn f) {
  const MonadId m = fa->m;
  switch (m) {
    case MonadId::Result: {
      Outcome o{fa->ok, fa->v, fa->err};
      return guarded(m, [&] { return f(o); });
    }
    case MonadId::Eventual: {
      auto r = fresh(m);
      int out = r->cell = sched.new_cell();
      sched.on_complete(fa->cell, [this, f = std::move(f), out](const Outcome& o) {
        auto next = guarded(MonadId::Eventual, [&] { return f(o); });
        sched.on_complete(next->cell, [this, out](const Outcome& o2) { sched.complete(out, o2); });
      });
      return r;
    }
    case MonadId::Resource: {
      auto r = fresh(m);
      r->plan = std::make_shared<const Plan>([this, fa, f = std::move(f)](ResCtx& ctx) {
        Outcome o = run_plan(fa, ctx);
        auto next = guarded(MonadId::Resource, [&] { return f(o); });
        return run_plan(next, ctx);
      });
      return r;
    }
    default:
      throw Error(ErrorKind::Capability, {}, "flatMapTry: monad " + monad_name(m) + " has no error channel");
  }
}

MValPtr Kernel::convert(MonadId from, MonadId to, const MValPtr& v) {
  if (v->m != from) kernel_fault("convert: value is " + monad_name(v->m) + ", expected " + monad_name(from));
  if (from == to) return v;
  if (from == MonadId::Ident) return pure(to, v->v);
  if (from == MonadId::Option && to == MonadId::Result)
    return v->ok ? pure(to, v->v) : error(to, "empty");
  if (from == MonadId::Option && to == MonadId::Nondet) {
    auto r = fresh(to);
    if (v->ok) r->branches.push_back(Branch{v->v, nullptr});
    return r;
  }
  if (from == MonadId::Result && to == MonadId::Eventual) return v->ok ? pure(to, v->v) : error(to, v->err);
  kernel_fault("no conversion from " + monad_name(from) + " to " + monad_name(to));
}

MValPtr Kernel::memoize(const MValPtr& v) {
  switch (v->m) {
    case MonadId::Ident:
    case MonadId::Option:
    case MonadId::Result:
    case MonadId::Eventual:
      // Strict values are already computed, and a cell caches its outcome.
      return pure(v->m, Value(v));
    case MonadId::Resource: {
      auto r = fresh(MonadId::Resource);
      r->plan = std::make_shared<const Plan>([this, v](ResCtx& ctx) {
        Outcome o = run_plan(v, ctx);
        auto handle = fresh(MonadId::Resource);
        handle->plan = std::make_shared<const Plan>([o](ResCtx&) { return o; });
        return Outcome{true, Value(MValPtr(handle)), {}};
      });
      return r;
    }
    case MonadId::Nondet: break;
  }
  throw Error(ErrorKind::Capability, {}, "memoization is not supported for multi-shot monad nondet");
}

MValPtr Kernel::adopt_await(int node_id, const MValPtr& v) {
  world.adopt_log.push_back(node_id);
  return v;
}

MValPtr Kernel::while_helper(MonadId m, const Thunk& cond, const Thunk& body) {
  switch (m) {
    case MonadId::Ident:
    case MonadId::Option:
    case MonadId::Result:
      for (;;) {
        auto c = guarded(m, cond);
        if (!c->ok) return c;
        if (!c->v.as_bool()) return pure(m, UnitV{});
        auto b = guarded(m, body);
        if (!b->ok) return b;
      }
    case MonadId::Nondet: {
      World w0 = world;
      auto r = fresh(m);
      std::vector<World> todo{world};
      while (!todo.empty()) {
        world = std::move(todo.back());
        todo.pop_back();
        auto c = guarded(m, cond);
        World after_c = world;
        for (const auto& cb : c->branches) {
          world = cb.world ? *cb.world : after_c;
          if (!cb.v.as_bool()) {
            r->branches.push_back(Branch{UnitV{}, std::make_shared<const World>(world)});
            continue;
          }
          auto b = guarded(m, body);
          World after_b = world;
          for (const auto& bb : b->branches) todo.push_back(bb.world ? *bb.world : after_b);
          check_paths(todo.size() + r->branches.size());
        }
      }
      world = std::move(w0);
      return r;
    }
    case MonadId::Eventual: {
      auto r = fresh(m);
      int out = r->cell = sched.new_cell();
      auto step = std::make_shared<std::function<void()>>();
      // The loop re-enters through scheduler tasks, never through the C++ stack.
      *step = [this, out, cond, body, wstep = std::weak_ptr<std::function<void()>>(step)]() {
        auto c = guarded(MonadId::Eventual, cond);
        sched.on_complete(c->cell, [this, out, body, wstep](const Outcome& o) {
          if (!o.ok) return sched.complete(out, o);
          if (!o.v.as_bool()) return sched.complete(out, Outcome{true, UnitV{}, {}});
          auto b = guarded(MonadId::Eventual, body);
          sched.on_complete(b->cell, [this, out, wstep](const Outcome& o2) {
            if (!o2.ok) return sched.complete(out, o2);
            if (auto s = wstep.lock()) (*s)();
          });
        });
      };
      loops_.push_back(step);
      (*step)();
      return r;
    }
    case MonadId::Resource: {
      auto r = fresh(m);
      r->plan = std::make_shared<const Plan>([this, cond, body](ResCtx& ctx) {
        for (;;) {
          Outcome c = run_plan(guarded(MonadId::Resource, cond), ctx);
          if (!c.ok) return c;
          if (!c.v.as_bool()) return Outcome{true, UnitV{}, {}};
          Outcome b = run_plan(guarded(MonadId::Resource, body), ctx);
          if (!b.ok) return b;
        }
      });
      return r;
    }
  }
  kernel_fault("unreachable");
}

MValPtr Kernel::option_of(bool some, Value v) {
  auto r = fresh(MonadId::Option);
  r->ok = some;
  if (some) r->v = std::move(v);
  return r;
}

MValPtr Kernel::result_of(bool ok, Value v, std::string err) {
  auto r = fresh(MonadId::Result);
  r->ok = ok;
  r->v = std::move(v);
  r->err = std::move(err);
  return r;
}

MValPtr Kernel::nondet_of(const std::vector<Value>& xs) {
  auto r = fresh(MonadId::Nondet);
  for (const auto& x : xs) r->branches.push_back(Branch{x, nullptr});
  return r;
}

MValPtr Kernel::eventual_task(std::function<Outcome()> task) {
  auto r = fresh(MonadId::Eventual);
  int cell = r->cell = sched.new_cell();
  sched.enqueue([this, cell, task = std::move(task)]() { sched.complete(cell, task()); });
  return r;
}

MValPtr Kernel::eventual_never() {
  auto r = fresh(MonadId::Eventual);
  r->cell = sched.new_cell();
  return r;
}

MValPtr Kernel::resource_of(Plan p) {
  auto r = fresh(MonadId::Resource);
  r->plan = std::make_shared<const Plan>(std::move(p));
  return r;
}

// ---------------------------------------------------------------------------
// Observation

void Kernel::finish_world(Observable& o, const World& w) {
  o.adopt_log = w.adopt_log;
  o.counters = w.counters;
  o.visits = w.visits;
  o.discards = w.discards;
}

Observable Kernel::observe_plain(const Value& v) {
  Observable o;
  o.result = show_value(v);
  finish_world(o, world);
  return o;
}

Observable Kernel::run(const MValPtr& v) {
  Observable o;
  o.monad = monad_name(v->m);
  switch (v->m) {
    case MonadId::Ident: o.result = show_value(v->v); break;
    case MonadId::Option: o.result = v->ok ? "Some " + show_value(v->v) : "None"; break;
    case MonadId::Result:
      o.result = v->ok ? "Ok " + show_value(v->v) : "Err " + v->err;
      o.failed = !v->ok;
      break;
    case MonadId::Nondet: {
      for (const auto& b : v->branches) {
        o.paths.push_back(show_value(b.v));
        o.path_counters.push_back(b.world ? b.world->counters : world.counters);
      }
      std::sort(o.paths.begin(), o.paths.end());
      o.result = "paths: " + std::to_string(o.paths.size());
      break;
    }
    case MonadId::Eventual: {
      sched.run_until_idle();
      const Outcome* r = sched.result(v->cell);
      if (!r) {
        std::string ids;
        for (int c : sched.pending_cells()) ids += (ids.empty() ? "#" : ", #") + std::to_string(c);
        throw Error(ErrorKind::Deadlock, {}, "eventual result never completed; pending cells: " + ids);
      }
      o.result = r->ok ? "Ok " + show_value(r->v) : "Err " + r->err;
      o.failed = !r->ok;
      o.completion_order = sched.completion_order();
      break;
    }
    case MonadId::Resource: {
      ResCtx ctx;
      Outcome r = run_plan(v, ctx);
      sched.run_until_idle();
      for (auto it = ctx.acquired.rbegin(); it != ctx.acquired.rend(); ++it) o.finalizers.push_back(*it);
      o.result = r.ok ? "Ok " + show_value(r.v) : "Err " + r.err;
      o.failed = !r.ok;
      break;
    }
  }
  finish_world(o, world);
  return o;
}

std::string Observable::text() const {
  std::string s = result + "\n";
  for (const auto& p : paths) s += "path: " + p + "\n";
  if (monad == "resource") {
    s += "finalizers:";
    for (std::size_t i = 0; i < finalizers.size(); ++i) s += (i ? ", " : " ") + finalizers[i];
    s += "\n";
  }
  return s;
}

}  // namespace cpsforge
