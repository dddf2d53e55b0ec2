#include "doctest.h"
TEST_CASE("placeholder_lame") { CHECK(true); }
