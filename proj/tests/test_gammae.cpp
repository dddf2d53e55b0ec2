#include "doctest.h"
TEST_CASE("placeholder_gammae") { CHECK(true); }
