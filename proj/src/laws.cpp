#include "cpsforge/laws.hpp"

#include <functional>
#include <random>

namespace cpsforge {

namespace {

// A random monadic computation, parameterized by an input Int.
struct Desc {
  int kind = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
};

Desc random_desc(std::mt19937_64& rng) {
  return Desc{static_cast<int>(rng() % 3), static_cast<std::int64_t>(rng() % 7) - 3,
              static_cast<std::int64_t>(rng() % 11) - 5};
}

MValPtr build(Kernel& k, MonadId m, const Desc& d, std::int64_t x) {
  std::int64_t y = d.a * x + d.b;
  std::string tag = "t" + std::to_string(d.a);
  bool effects = m != MonadId::Nondet;
  switch (d.kind) {
    case 0: return k.pure(m, Value(y));
    case 1:
      switch (m) {
        case MonadId::Ident: return k.pure(m, Value(x - d.b));
        case MonadId::Option: return k.option_of(false, Value(UnitV{}));
        case MonadId::Nondet: return k.nondet_of({});
        case MonadId::Eventual:
          return k.eventual_task([d] { return Outcome{false, {}, "e" + std::to_string(d.a)}; });
        case MonadId::Resource:
          return k.resource_of([d](ResCtx&) { return Outcome{false, {}, "e" + std::to_string(d.a)}; });
        default: return k.error(m, "e" + std::to_string(d.a));
      }
    default:
      switch (m) {
        case MonadId::Nondet: return k.nondet_of({Value(x), Value(y)});
        case MonadId::Eventual:
          return k.eventual_task([&k, tag, y] {
            k.world.counters[tag]++;
            return Outcome{true, Value(y), {}};
          });
        case MonadId::Resource:
          return k.resource_of([&k, tag, y](ResCtx& rc) {
            rc.acquired.push_back("r" + tag);
            k.world.counters[tag]++;
            return Outcome{true, Value(y), {}};
          });
        default:
          if (effects) k.world.counters[tag]++;
          return k.pure(m, Value(y + 1));
      }
  }
}

// f(x) picks one of two computations by the parity of x.
struct FnDesc {
  Desc even, odd;
  MValPtr operator()(Kernel& k, MonadId m, const Value& v) const {
    std::int64_t x = v.as_int();
    return build(k, m, x % 2 == 0 ? even : odd, x);
  }
};

Observable observe(const std::function<MValPtr(Kernel&)>& make) {
  Kernel k;
  return k.run(make(k));
}

bool same(const Observable& a, const Observable& b) { return a.same_result(b) && a.counters == b.counters; }

}  // namespace

LawReport check_monad_laws(MonadId m, int cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LawReport r;
  auto fail = [&](int& counter, const std::string& law, const Observable& l, const Observable& rr) {
    counter++;
    if (r.first_failure.empty())
      r.first_failure = monad_name(m) + " " + law + ": " + l.text() + " vs " + rr.text();
  };
  for (int i = 0; i < cases; ++i) {
    r.cases++;
    std::int64_t a = static_cast<std::int64_t>(rng() % 21) - 10;
    Desc md = random_desc(rng);
    FnDesc f{random_desc(rng), random_desc(rng)};
    FnDesc g{random_desc(rng), random_desc(rng)};

    Observable l1 = observe([&](Kernel& k) {
      return k.flat_map(k.pure(m, Value(a)), [&k, m, f](const Value& v) { return f(k, m, v); });
    });
    Observable r1 = observe([&](Kernel& k) { return f(k, m, Value(a)); });
    if (!same(l1, r1)) fail(r.left_identity_failures, "left identity", l1, r1);

    Observable l2 = observe([&](Kernel& k) {
      return k.flat_map(build(k, m, md, a), [&k, m](const Value& v) { return k.pure(m, v); });
    });
    Observable r2 = observe([&](Kernel& k) { return build(k, m, md, a); });
    if (!same(l2, r2)) fail(r.right_identity_failures, "right identity", l2, r2);

    Observable l3 = observe([&](Kernel& k) {
      auto inner = k.flat_map(build(k, m, md, a), [&k, m, f](const Value& v) { return f(k, m, v); });
      return k.flat_map(inner, [&k, m, g](const Value& v) { return g(k, m, v); });
    });
    Observable r3 = observe([&](Kernel& k) {
      return k.flat_map(build(k, m, md, a), [&k, m, f, g](const Value& v) {
        return k.flat_map(f(k, m, v), [&k, m, g](const Value& w) { return g(k, m, w); });
      });
    });
    if (!same(l3, r3)) fail(r.associativity_failures, "associativity", l3, r3);
  }
  return r;
}

}  // namespace cpsforge
