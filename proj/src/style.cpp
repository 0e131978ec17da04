#include "tibi/style.hpp"

#include <array>
#include <cmath>

#include "tibi/errors.hpp"

namespace tibi {

namespace {

// ColorBrewer "Paired" colors in table order.
constexpr std::array<Rgb, kEscCodes> kCodeColors{{
    {227, 26, 28},    // red
    {178, 223, 138},  // bright green
    {255, 127, 0},    // orange
    {166, 206, 227},  // bright blue
    {31, 120, 180},   // blue
    {253, 191, 111},  // bright orange
    {51, 160, 44},    // green
    {251, 154, 153},  // rose
}};

constexpr std::array<TilePosition, kEscCodes> kOuterCells{{
    {0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}, {2, 2},
}};

}  // namespace

TileStyle code_tile(int code) {
    if (code < 0 || code >= kEscCodes) throw DomainError("ESC code " + std::to_string(code) + " outside [0,8)");
    const auto i = static_cast<std::size_t>(code);
    return TileStyle{code, kOuterCells[i], kCodeColors[i]};
}

TileStyle length_tile(int category) {
    if (category < 0 || category >= kLengthCategories) {
        throw DomainError("length category " + std::to_string(category) + " outside [0,5)");
    }
    // Same colors and reading-order positions as the first five codes.
    const auto i = static_cast<std::size_t>(category);
    return TileStyle{category, kOuterCells[i], kCodeColors[i]};
}

TileStyle category_tile(CategoryMode mode, int category) {
    return mode == CategoryMode::EscCode ? code_tile(category) : length_tile(category);
}

Rgb composite_on_white(Rgb color, double opacity) {
    if (!(opacity >= 0.0 && opacity <= 1.0)) throw DomainError("opacity outside [0,1]");
    auto blend = [opacity](std::uint8_t c) {
        return static_cast<std::uint8_t>(std::lround(opacity * c + (1.0 - opacity) * 255.0));
    };
    return Rgb{blend(color.r), blend(color.g), blend(color.b)};
}

}  // namespace tibi
