#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpsforge/ast.hpp"
#include "cpsforge/monads.hpp"

namespace cpsforge {

enum class ShiftTag { AsyncShiftFO, AsyncShiftO, InplaceF, Inplace };
enum class ReturnKind { Plain, Wrapped, CallChain };

std::string tag_name(ShiftTag t);
std::optional<ShiftTag> tag_from_name(std::string_view s);
std::string return_kind_name(ReturnKind k);

/// Shifted implementation. Function arguments arrive as closures returning
/// monadic values; by-name arguments as zero-argument closures.
using ShiftImpl = std::function<Value(Kernel& k, MonadId f, const Value& recv, const std::vector<Value>& args)>;

struct ShiftEntry {
  std::string receiver;  // receiver kind: List, Range, Cache, WithFilter, Box
  std::string method;
  ShiftTag tag = ShiftTag::AsyncShiftFO;
  ReturnKind ret = ReturnKind::Wrapped;
  /// asyncShift-o entries are bound to one target monad.
  std::optional<MonadId> monad;
  /// Name of the substitute (`mapAsync`, `getOrUpdate`, ...), for display.
  std::string shifted_name;
  ShiftImpl impl;
};

struct ShiftOptions {
  /// When false, withFilter is a Wrapped two-pass implementation.
  bool callchain = true;
};

class ShiftRegistry {
 public:
  static ShiftRegistry builtin(const ShiftOptions& opts = {});

  void add(ShiftEntry e);
  /// Lookup order: inplace methods on the receiver first, then asyncShift-fo,
  /// then asyncShift-o for `f`.
  const ShiftEntry* lookup(const std::string& receiver, const std::string& method, MonadId f) const;
  const ShiftEntry* find(const std::string& receiver, const std::string& method, ShiftTag tag, MonadId f) const;
  const std::vector<ShiftEntry>& entries() const { return entries_; }

 private:
  std::vector<ShiftEntry> entries_;
};

enum class ResolutionKind { Unchanged, Monadic, Shifted };

struct Resolution {
  ResolutionKind kind = ResolutionKind::Unchanged;
  const ShiftEntry* entry = nullptr;
};

std::string resolution_name(const Resolution& r);

/// Receiver kind of a static type (`List`, `Cache`, ...).
std::string receiver_kind(const TyPtr& t);
std::string receiver_kind(const Value& v);

/// Decide how a higher-order call with function arguments is translated.
/// `effectful[i]` tells whether argument i contains await; `monadic[i]`
/// whether such a lambda already returns `F[_]`. Throws a shift resolution
/// error when an effectful call has no substitute.
Resolution resolve(const ShiftRegistry& reg, const TyPtr& recv_ty, const std::string& method,
                   const std::vector<bool>& effectful, const std::vector<bool>& monadic, const std::string& f,
                   Span span = {});

/// Execute a shifted call; the result follows the entry's return kind
/// (Plain results are wrapped in pure here).
Value shifted_call(const ShiftEntry& e, Kernel& k, MonadId f, const Value& recv, const std::vector<Value>& args);

/// Call-chain builder operations.
struct ChainState {
  ValueList source;
  std::vector<std::pair<std::string, Value>> ops;
  bool finished = false;
};

Value chain_start(const ValueList& source, const Value& pred);
Value chain_append(const Value& builder, const std::string& op, const Value& fn);
MValPtr chain_finish(Kernel& k, MonadId f, const Value& builder);

}  // namespace cpsforge
