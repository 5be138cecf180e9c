#include "doctest.h"

#include "../support/support.hpp"

using namespace cpsforge::testing;

TEST_CASE("backtracking queens oracle") {
  CHECK(queens_count(1) == 1);
  CHECK(queens_count(2) == 0);
  CHECK(queens_count(3) == 0);
  CHECK(queens_count(4) == 2);
  CHECK(queens_count(5) == 10);
  CHECK(queens_count(6) == 4);
  CHECK(queens_count(8) == 92);
}

TEST_CASE("byte count oracle") {
  CHECK(copy_bytes(10240, 1024) == 10240);
  CHECK(copy_bytes(10000, 1024) == 10000);
  CHECK(copy_bytes(0, 1024) == 0);
  CHECK(copy_bytes(1023, 1024) == 1023);
}
