#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

#include "sumrange/family.hpp"

namespace sumrange {

/// Line-oriented family file:
///
///   sumrange-family v1
///   flavor three-kadets
///   depth 2
///   points 3
///   sizes 1 2 3 4
///   cubes 3
///   terms 29
///   f.1.1<TAB>{"domain":[1,2,3],"terms":[...]}
///   ...
///   end
///
/// Transformed families add "base-flavor <name>" and
/// "matrix <row>;<row>;..." after "points". Terms appear in canonical
/// order, so equal families produce identical bytes.
void write_family(std::ostream& os, const Family& family);

/// Throws ParseError on malformed or truncated input, or when the term
/// table does not match the manifest.
Family read_family(std::istream& is);

void save_family(const std::filesystem::path& path, const Family& family);
Family load_family(const std::filesystem::path& path);

/// Whitespace-separated rationals, one matrix row per line; blank lines
/// and '#' comments are ignored.
TransformSpec parse_transform(std::string_view text);
TransformSpec load_transform(const std::filesystem::path& path);
/// "r00 r01;r10 r11" form used inside family files.
std::string transform_inline(const TransformSpec& t);

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never observe a partial file.
void write_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

} // namespace sumrange
