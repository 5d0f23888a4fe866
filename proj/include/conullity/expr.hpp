#pragma once

// Tiny closed-form expression language used by configs and tests:
//   +  -  *  /  ^   sin  cos  sinh  cosh  exp   numeric literals, pi, x, u
// Exponents of ^ must be constants. Parsed expressions evaluate through
// Taylor jets, so derivatives are exact to round-off.

#include <string>

#include "conullity/fields.hpp"

namespace conullity {

// Function of x alone (mentioning u is an error). Derivatives up to order 6.
Field1 parse_field1(const std::string& text);

// Function of (x, u). Mixed partials up to order 4 in each variable.
Field2 parse_field2(const std::string& text);

}  // namespace conullity
