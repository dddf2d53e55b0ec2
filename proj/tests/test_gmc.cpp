#include "doctest.h"
TEST_CASE("placeholder_gmc") { CHECK(true); }
