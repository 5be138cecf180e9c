#include "doctest.h"

#include "cpsforge/laws.hpp"

using namespace cpsforge;

TEST_CASE("monad laws hold for every instance") {
  for (const auto& d : all_monads()) {
    CAPTURE(d.name);
    LawReport r = check_monad_laws(d.id, 200, 11);
    CHECK(r.cases == 200);
    CHECK_MESSAGE(r.ok(), r.first_failure);
  }
}

TEST_CASE("kernel basics") {
  Kernel k;
  CHECK(k.run(k.pure(MonadId::Option, Value(std::int64_t{3}))).text() == "Some 3\n");
  CHECK(k.run(k.error(MonadId::Result, "bad")).text() == "Err bad\n");
  Observable nd = k.run(k.nondet_of({Value(std::int64_t{2}), Value(std::int64_t{1})}));
  CHECK(nd.paths.size() == 2);
  auto doubled = k.flat_map(k.nondet_of({Value(std::int64_t{1}), Value(std::int64_t{2})}),
                            [&](const Value& v) { return k.nondet_of({v, v}); });
  CHECK(k.run(doubled).paths.size() == 4);
}

TEST_CASE("conversion of None inside result") {
  Kernel k;
  Observable o = k.run(k.convert(MonadId::Option, MonadId::Result, k.option_of(false, Value(UnitV{}))));
  CHECK(o.text() == "Err empty\n");
}
