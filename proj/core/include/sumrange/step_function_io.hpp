#pragma once

#include <string>
#include <string_view>

#include "sumrange/step_function.hpp"

namespace sumrange {

/// Single-line JSON text for a step function:
///
///   {"domain":[1,2],"terms":[{"cube":1,"box":{"2":["0/1","1/2"]},"value":"1/1"}]}
///
/// Rationals are "num/den" strings and boxes list only constrained
/// coordinates, in increasing order. The output is canonical, so equal
/// functions serialize to identical bytes.
std::string to_text(const StepFunction& f);

/// Inverse of to_text; the input terms may overlap and are summed.
/// Throws ParseError on malformed input.
StepFunction step_function_from_text(std::string_view text);

} // namespace sumrange
