#include "doctest.h"
TEST_CASE("placeholder_floquet") { CHECK(true); }
