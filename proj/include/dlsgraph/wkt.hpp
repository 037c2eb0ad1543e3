#pragma once

#include <string_view>
#include <vector>

#include "dlsgraph/topology.hpp"

namespace dlsgraph {

/// Parses `POINT(x y)`. Keyword is case-insensitive; whitespace around tokens is allowed.
/// Throws ParseError carrying the byte offset of the first bad character.
Point parse_wkt_point(std::string_view text);

/// Parses `LINESTRING(x y, x y, ...)`, collapsing consecutive duplicate points.
/// At least two distinct points must remain.
std::vector<Point> parse_wkt_linestring(std::string_view text);

}  // namespace dlsgraph
