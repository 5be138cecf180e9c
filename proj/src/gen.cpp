#include <random>
#include <sstream>

#include "cpsforge/interp.hpp"
#include "cpsforge/parser.hpp"
#include "cpsforge/typer.hpp"

namespace cpsforge {

namespace {

enum class K { Int, Bool, List };

struct VarInfo {
  std::string name;
  K ty;
  bool mut;
};

struct Helper {
  std::string name;
  bool monadic;
};

// Emits MiniCPS source; the result is parsed and typechecked afterwards.
class Gen {
 public:
  Gen(std::uint64_t seed, std::string f, const GenOptions& o) : rng_(seed), f_(std::move(f)), opts_(o) {
    fuel_ = o.budget * 3;
  }

  std::string program() {
    std::string defs;
    if (!opts_.straight_line) {
      int n = static_cast<int>(pick(3));
      // helper calls may repeat, so helpers never branch
      paths_log_ = 1000;
      for (int i = 0; i < n; ++i) {
        fuel_ = opts_.budget * 2;
        defs += helper();
      }
      paths_log_ = 0;
      fuel_ = opts_.budget * 3;
    }
    std::string body = opts_.straight_line ? straight_body() : block(K::Int, 0);
    return defs + "async[" + f_ + "] " + body + "\n";
  }

 private:
  std::mt19937_64 rng_;
  std::string f_;
  GenOptions opts_;
  int fuel_;
  int fresh_ = 0;
  int paths_log_ = 0;
  int mult_ = 1;  // worst-case executions of the current position
  std::size_t assign_floor_ = 0;
  std::vector<VarInfo> scope_;
  std::vector<Helper> helpers_;

  std::uint64_t pick(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  bool chance(int pct) { return static_cast<int>(pick(100)) < pct; }
  std::string name(const char* p) { return p + std::to_string(fresh_++); }
  bool spend() {
    if (fuel_ <= 0) return false;
    --fuel_;
    return true;
  }
  bool has_error() const { return f_ == "result"; }

  K any_kind() {
    auto r = pick(10);
    return r < 6 ? K::Int : r < 8 ? K::Bool : K::List;
  }

  std::vector<std::string> vars_of(K k) const {
    std::vector<std::string> out;
    for (const auto& v : scope_)
      if (v.ty == k) out.push_back(v.name);
    return out;
  }

  std::vector<std::string> assignable(K k) const {
    std::vector<std::string> out;
    for (std::size_t i = assign_floor_; i < scope_.size(); ++i)
      if (scope_[i].mut && scope_[i].ty == k) out.push_back(scope_[i].name);
    return out;
  }

  std::string dflt(K k) {
    switch (k) {
      case K::Int: return "0";
      case K::Bool: return "true";
      case K::List: return "nil_of(0)";
    }
    return "";
  }

  std::string int_lit() { return std::to_string(pick(10)); }

  // -- pure expressions -------------------------------------------------------

  std::string leaf(K k) {
    auto vs = vars_of(k);
    if (!vs.empty() && chance(60)) return vs[pick(vs.size())];
    switch (k) {
      case K::Int: return int_lit();
      case K::Bool: return chance(50) ? "true" : "false";
      case K::List: {
        int n = 1 + static_cast<int>(pick(3));
        std::string s = "list(";
        for (int i = 0; i < n; ++i) s += (i ? ", " : "") + int_lit();
        return s + ")";
      }
    }
    return "";
  }

  std::string lambda1(const std::string& body_kind_src, const std::string& p) {
    return "fun(" + p + ": Int) => " + body_kind_src;
  }

  // Expression `k` with no await unless `eff`.
  std::string expr(K k, int d, bool eff) {
    if (d >= opts_.budget || !spend()) return eff && chance(30) ? await_of(k, d) : leaf(k);
    if (eff && chance(25)) return await_of(k, d);
    switch (k) {
      case K::Int: return int_expr(d, eff);
      case K::Bool: return bool_expr(d, eff);
      case K::List: return list_expr(d, eff);
    }
    return "";
  }

  std::string int_expr(int d, bool eff) {
    switch (pick(eff ? 10 : 8)) {
      case 0:
      case 1: {
        static const char* ops[] = {"+", "-", "*"};
        return "(" + expr(K::Int, d + 1, eff) + " " + ops[pick(3)] + " " + expr(K::Int, d + 1, eff) + ")";
      }
      case 2: return "(" + expr(K::Int, d + 1, eff) + " / " + std::to_string(1 + pick(4)) + ")";
      case 3: return expr(K::List, d + 1, eff) + ".size()";
      case 4:
        return "(if " + expr(K::Bool, d + 1, eff) + " then " + expr(K::Int, d + 1, eff) + " else " +
               expr(K::Int, d + 1, eff) + ")";
      case 5: {
        std::string a = name("a"), x = name("x");
        return expr(K::List, d + 1, eff) + ".fold(" + expr(K::Int, d + 1, eff) + ", fun(" + a + ": Int, " + x +
               ": Int) => " + lam_body(K::Int, d + 1, eff, {{a, K::Int, false}, {x, K::Int, false}}) + ")";
      }
      case 6: return call_helper(d, eff);
      case 7: return match_expr(K::Int, d, eff);
      case 8: return block(K::Int, d + 1, eff);
      default:
        if (has_error() && chance(50))
          return "(if " + expr(K::Bool, d + 1, eff) + " then throw \"e" + std::to_string(fresh_++) + "\" else " +
                 expr(K::Int, d + 1, eff) + ")";
        return block(K::Int, d + 1, eff);
    }
  }

  std::string bool_expr(int d, bool eff) {
    switch (pick(eff ? 7 : 6)) {
      case 0: {
        static const char* ops[] = {"<", "<=", "==", "!=", ">"};
        return "(" + expr(K::Int, d + 1, eff) + " " + ops[pick(5)] + " " + expr(K::Int, d + 1, eff) + ")";
      }
      case 1: return "not(" + expr(K::Bool, d + 1, eff) + ")";
      case 2: return "(" + expr(K::Bool, d + 1, eff) + (chance(50) ? " && " : " || ") + expr(K::Bool, d + 1, eff) + ")";
      case 3: return expr(K::List, d + 1, eff) + ".contains(" + expr(K::Int, d + 1, eff) + ")";
      case 4: {
        std::string x = name("x");
        return expr(K::List, d + 1, eff) + ".exists(" +
               lambda1(lam_body(K::Bool, d + 1, eff, {{x, K::Int, false}}), x) + ")";
      }
      case 5:
        return "(if " + expr(K::Bool, d + 1, eff) + " then " + expr(K::Bool, d + 1, eff) + " else " +
               expr(K::Bool, d + 1, eff) + ")";
      default: return block(K::Bool, d + 1, eff);
    }
  }

  std::string list_expr(int d, bool eff) {
    switch (pick(eff ? 7 : 6)) {
      case 0: return "list(" + expr(K::Int, d + 1, eff) + ", " + expr(K::Int, d + 1, eff) + ")";
      case 1: return expr(K::List, d + 1, eff) + ".appended(" + expr(K::Int, d + 1, eff) + ")";
      case 2: {
        std::string x = name("x");
        return expr(K::List, d + 1, eff) + ".map(" + lambda1(lam_body(K::Int, d + 1, eff, {{x, K::Int, false}}), x) +
               ")";
      }
      case 3: {
        std::string x = name("x");
        return expr(K::List, d + 1, eff) + ".filter(" +
               lambda1(lam_body(K::Bool, d + 1, eff, {{x, K::Int, false}}), x) + ")";
      }
      case 4: {
        std::string x = name("x");
        return "range(0, " + std::to_string(pick(4)) + ").filter(" +
               lambda1(lam_body(K::Bool, d + 1, eff, {{x, K::Int, false}}), x) + ")";
      }
      case 5:
        return "(if " + expr(K::Bool, d + 1, eff) + " then " + expr(K::List, d + 1, eff) + " else " +
               expr(K::List, d + 1, eff) + ")";
      default: return block(K::List, d + 1, eff);
    }
  }

  // Body of a lambda passed directly to a call; may await when `eff`.
  std::string lam_body(K k, int d, bool eff, std::vector<VarInfo> params) {
    std::size_t mark = scope_.size();
    std::size_t floor = assign_floor_;
    for (auto& p : params) scope_.push_back(std::move(p));
    assign_floor_ = scope_.size();
    mult_ *= 4;
    std::string body = chance(40) ? block(k, d + 1, eff) : expr(k, d + 1, eff);
    mult_ /= 4;
    assign_floor_ = floor;
    scope_.resize(mark);
    return body;
  }

  std::string match_expr(K k, int d, bool eff) {
    std::string s = "(match " + expr(K::Int, d + 1, eff) + " {";
    int n = 1 + static_cast<int>(pick(2));
    for (int i = 0; i < n; ++i) s += " case " + std::to_string(i) + " => " + block(k, d + 1, eff);
    if (chance(50)) {
      std::string b = name("m");
      scope_.push_back({b, K::Int, false});
      s += " case " + b + " => " + block(k, d + 1, eff);
      scope_.pop_back();
    } else {
      s += " case _ => " + block(k, d + 1, eff);
    }
    return s + " })";
  }

  std::string call_helper(int d, bool eff) {
    std::vector<const Helper*> hs;
    for (const auto& h : helpers_)
      if (!h.monadic || eff) hs.push_back(&h);
    if (hs.empty()) return leaf(K::Int);
    const Helper* h = hs[pick(hs.size())];
    std::string c = h->name + "(" + expr(K::Int, d + 1, eff) + ")";
    return h->monadic ? "await(" + c + ")" : c;
  }

  // -- monadic values ----------------------------------------------------------

  std::string monadic(K k, int d) {
    if (d + 1 < opts_.budget && chance(10) && spend()) return "async[" + f_ + "] " + block(k, d + 1);
    std::string e = expr(k, d + 1, false);
    if (f_ == "ident") return "pure_ident(" + e + ")";
    if (f_ == "option") return chance(15) ? "none_of(" + dflt(k) + ")" : "some(" + e + ")";
    if (f_ == "result")
      return chance(15) ? "err_of(" + dflt(k) + ", \"r" + std::to_string(fresh_++) + "\")" : "ok(" + e + ")";
    // nondet: the branching factor is kept within a global path budget
    if (chance(5)) return "choose(nil_of(" + dflt(k) + "))";
    int cost = mult_;
    if (paths_log_ + cost <= 10 && chance(70)) {
      paths_log_ += cost;
      return "choose(list(" + e + ", " + expr(k, d + 1, false) + "))";
    }
    return "choose(list(" + e + "))";
  }

  std::string await_of(K k, int d) { return "await(" + monadic(k, d) + ")"; }

  // -- statements ----------------------------------------------------------------

  std::string block(K k, int d, bool eff = true) {
    std::size_t mark = scope_.size();
    std::string s = "{ ";
    int n = static_cast<int>(pick(4));
    for (int i = 0; i < n && fuel_ > 0; ++i) s += stmt(d, eff) + "; ";
    s += expr(k, d + 1, eff);
    scope_.resize(mark);
    return s + " }";
  }

  std::string stmt(int d, bool eff) {
    switch (pick(10)) {
      case 0:
      case 1:
      case 2: {
        K k = any_kind();
        std::string n = name("v");
        std::string r = "val " + n + " = " + expr(k, d + 1, eff);
        scope_.push_back({n, k, false});
        return r;
      }
      case 3: {
        K k = chance(80) ? K::Int : any_kind();
        std::string n = name("w");
        std::string r = "var " + n + " = " + expr(k, d + 1, eff);
        scope_.push_back({n, k, true});
        return r;
      }
      case 4:
      case 5: {
        K k = any_kind();
        auto as = assignable(k);
        if (as.empty()) return expr(k, d + 1, eff);
        return as[pick(as.size())] + " = " + expr(k, d + 1, eff);
      }
      case 6: return while_stmt(d, eff);
      case 7:
        if (has_error()) return try_stmt(d, eff);
        return expr(any_kind(), d + 1, eff);
      case 8: {
        std::string x = name("x");
        return expr(K::List, d + 1, eff) + ".foreach(" +
               lambda1(lam_body(K::Int, d + 1, eff, {{x, K::Int, false}}), x) + ")";
      }
      default: return expr(any_kind(), d + 1, eff);
    }
  }

  std::string while_stmt(int d, bool eff) {
    std::string i = name("i");
    std::string bound = std::to_string(1 + pick(3));
    std::string cond = i + " < " + (eff && chance(30) ? "await(" + monadic_small(bound) + ")" : bound);
    mult_ *= 3;
    std::string s = "var " + i + " = 0; while " + cond + " do { ";
    scope_.push_back({i, K::Int, false});
    std::size_t mark = scope_.size();
    int n = 1 + static_cast<int>(pick(2));
    for (int k = 0; k < n; ++k) s += stmt(d + 1, eff) + "; ";
    scope_.resize(mark);
    s += i + " = " + i + " + 1 }";
    mult_ /= 3;
    return s;
  }

  // A loop bound in the monad; never the failing variant so loops terminate.
  std::string monadic_small(const std::string& b) {
    if (f_ == "ident") return "pure_ident(" + b + ")";
    if (f_ == "option") return "some(" + b + ")";
    if (f_ == "result") return "ok(" + b + ")";
    return "choose(list(" + b + "))";
  }

  std::string try_stmt(int d, bool eff) {
    std::string e = name("e");
    std::string s = "try " + block(K::Int, d + 1, eff);
    bool fin = chance(50);
    if (!fin || chance(70)) s += " catch " + e + " => " + block(K::Int, d + 1, eff);
    if (fin) {
      auto as = assignable(K::Int);
      std::string v = as.empty() ? std::string() : as[pick(as.size())];
      s += " finally { " + (v.empty() ? std::string("unit") : v + " = " + v + " + 1") + " }";
    }
    return s;
  }

  std::string helper() {
    std::string h = name("h");
    std::string a = name("p");
    bool m = chance(60);
    scope_.push_back({a, K::Int, false});
    std::size_t floor = assign_floor_;
    assign_floor_ = scope_.size();
    std::string body = m ? "async[" + f_ + "] " + block(K::Int, 1) : block(K::Int, 1, false);
    assign_floor_ = floor;
    scope_.pop_back();
    helpers_.push_back({h, m});
    return "def " + h + "(" + a + ": Int): " + (m ? f_ + "[Int]" : std::string("Int")) + " = { " + body + " }\n";
  }

  // -- straight-line fragment ------------------------------------------------------

  std::string straight_body() {
    std::string s = "{ ";
    int n = 2 + static_cast<int>(pick(static_cast<std::uint64_t>(opts_.budget) + 1));
    for (int i = 0; i < n; ++i) {
      auto r = pick(6);
      if (r < 2) {
        std::string v = name("v");
        s += "val " + v + " = " + sl_await() + "; ";
        scope_.push_back({v, K::Int, false});
      } else if (r < 4) {
        std::string v = name("v");
        s += "val " + v + " = list(" + sl_pure() + ", " + sl_await() + ").size() + " + sl_pure() + "; ";
        scope_.push_back({v, K::Int, false});
      } else if (r < 5) {
        std::string v = name("v");
        s += "val " + v + " = " + sl_pure() + "; ";
        scope_.push_back({v, K::Int, false});
      } else {
        s += sl_await() + "; ";
      }
    }
    return s + sl_pure() + " }";
  }

  std::string sl_pure() {
    auto vs = vars_of(K::Int);
    std::string a = vs.empty() ? int_lit() : vs[pick(vs.size())];
    return chance(50) ? a : "(" + a + " + " + int_lit() + ")";
  }

  std::string sl_await() {
    std::string e = sl_pure();
    if (f_ == "ident") return "await(pure_ident(" + e + "))";
    if (f_ == "option") return "await(some(" + e + "))";
    if (f_ == "result") return "await(ok(" + e + "))";
    return "await(choose(list(" + e + (paths_log_ < 8 && chance(50) ? (++paths_log_, ", " + sl_pure()) : "") + ")))";
  }
};

}  // namespace

std::string gen_source(std::uint64_t seed, const std::string& f, const GenOptions& opts) {
  return Gen(seed, f, opts).program();
}

Program gen_program(std::uint64_t seed, const std::string& f, const GenOptions& opts) {
  return typecheck(parse_program(gen_source(seed, f, opts))).program;
}

}  // namespace cpsforge
