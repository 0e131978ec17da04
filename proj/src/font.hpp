#pragma once

#include <cstdint>

namespace tibi::detail {

inline constexpr int kGlyphWidth = 6;
inline constexpr int kGlyphHeight = 11;

// kGlyphHeight rows for a printable ASCII character; others map to '?'.
const std::uint8_t* glyph_rows(char c);

}  // namespace tibi::detail
