#include "doctest.h"
TEST_CASE("placeholder_calogero") { CHECK(true); }
