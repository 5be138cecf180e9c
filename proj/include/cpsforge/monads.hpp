#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpsforge/diagnostics.hpp"
#include "cpsforge/value.hpp"

namespace cpsforge {

enum class MonadId { Ident, Option, Result, Nondet, Eventual, Resource };

std::optional<MonadId> monad_id(std::string_view name);
MonadId monad_id_or_throw(std::string_view name);
std::string monad_name(MonadId m);

struct MonadDescriptor {
  MonadId id;
  std::string name;
  bool has_error_channel;
  bool has_memoization;
  bool multi_shot;
};

const MonadDescriptor& descriptor(MonadId m);
const std::vector<MonadDescriptor>& all_monads();

/// Registered conversions G -> F: ident -> any, option -> result,
/// option -> nondet, result -> eventual.
bool conversion_registered(std::string_view from, std::string_view to);

/// Success or failure of one step; failures carry the throw message.
struct Outcome {
  bool ok = true;
  Value v;
  std::string err;
};

/// Resource scope: names acquired so far, released in reverse at the end of
/// the outermost run.
struct ResCtx {
  std::vector<std::string> acquired;
};
using Plan = std::function<Outcome(ResCtx&)>;

struct Branch {
  Value v;
  std::shared_ptr<const World> world;  // null: the world current at bind time
};

/// Runtime representation of `M[T]`.
struct MVal {
  MonadId m = MonadId::Ident;
  // ident / option / result
  bool ok = true;
  Value v;
  std::string err;
  // nondet
  std::vector<Branch> branches;
  // eventual
  int cell = -1;
  // resource
  std::shared_ptr<const Plan> plan;
};

struct Observable {
  std::string monad;  // empty when main is not monadic
  std::string result;
  std::vector<std::string> paths;
  std::vector<std::string> finalizers;
  bool failed = false;
  // traces, excluded from equivalence
  std::vector<int> adopt_log;
  std::map<std::string, std::int64_t> counters;
  std::vector<std::map<std::string, std::int64_t>> path_counters;
  std::int64_t visits = 0;
  std::vector<std::string> discards;
  std::vector<int> completion_order;

  /// Normalized text form: `Ok v`, `Err msg`, `Some v`, `None`, a plain
  /// value, or `paths: n` followed by sorted `path: v` lines; resource runs
  /// add `finalizers: a, b`.
  std::string text() const;
  bool same_result(const Observable& o) const {
    return monad == o.monad && result == o.result && paths == o.paths && finalizers == o.finalizers;
  }
};

/// Deterministic single-threaded event loop standing in for futures.
class Scheduler {
 public:
  int new_cell();
  void complete(int cell, Outcome o);
  /// Run `cb` once `cell` is complete, always as a separate queued task.
  void on_complete(int cell, std::function<void(const Outcome&)> cb);
  void enqueue(std::function<void()> task);
  bool step();
  void run_until_idle();
  /// Drive tasks until `cell` completes; false on quiescence without it.
  bool drive_until(int cell);
  const Outcome* result(int cell) const;
  std::vector<int> pending_cells() const;
  const std::vector<int>& completion_order() const { return order_; }

 private:
  struct Cell {
    std::optional<Outcome> out;
    std::vector<std::function<void(const Outcome&)>> waiters;
  };
  std::vector<Cell> cells_;
  std::deque<std::function<void()>> queue_;
  std::vector<int> order_;
};

using Fn = std::function<MValPtr(const Value&)>;
using ValFn = std::function<Value(const Value&)>;
using TryFn = std::function<MValPtr(const Outcome&)>;
using Thunk = std::function<MValPtr()>;

/// The monad kernel: descriptor operations over runtime values plus the
/// mutable state they act on. One kernel per evaluation.
class Kernel {
 public:
  World world;
  Scheduler sched;
  /// Calls a closure value; installed by the interpreter.
  std::function<Value(const Value& fn, std::vector<Value> args)> call;

  MValPtr pure(MonadId m, Value v);
  MValPtr error(MonadId m, const std::string& msg);
  MValPtr flat_map(const MValPtr& fa, Fn f);
  MValPtr map(const MValPtr& fa, ValFn f);
  MValPtr flat_map_try(const MValPtr& fa, TryFn f);
  MValPtr convert(MonadId from, MonadId to, const MValPtr& v);
  /// F[T] -> F[F[T]]: the outer value performs the effect once, the inner
  /// handle replays its outcome.
  MValPtr memoize(const MValPtr& v);
  MValPtr adopt_await(int node_id, const MValPtr& v);
  /// Stack-safe loop: bind cond; if true bind body and repeat, else unit.
  MValPtr while_helper(MonadId m, const Thunk& cond, const Thunk& body);

  /// Evaluate `f`, turning an escaping throw into `error` when `m` has an
  /// error channel.
  MValPtr guarded(MonadId m, const Thunk& f);

  /// Runs `v` to its observable normal form (drives the scheduler, releases
  /// resources).
  Observable run(const MValPtr& v);
  Observable observe_plain(const Value& v);

  /// Resource plans run in this scope when one is active.
  Outcome run_plan(const MValPtr& v, ResCtx& ctx);

  /// Monad-specific constructors used by builtins.
  MValPtr option_of(bool some, Value v);
  MValPtr result_of(bool ok, Value v, std::string err);
  MValPtr nondet_of(const std::vector<Value>& xs);
  MValPtr eventual_task(std::function<Outcome()> task);
  MValPtr eventual_never();
  MValPtr resource_of(Plan p);

  static MValPtr expect_monad(const Value& v, MonadId m);

 private:
  MValPtr flat_map_nondet(const MValPtr& fa, const Fn& f);
  void finish_world(Observable& o, const World& w);
  std::vector<std::shared_ptr<std::function<void()>>> loops_;
};

[[noreturn]] void kernel_fault(const std::string& msg);

}  // namespace cpsforge
