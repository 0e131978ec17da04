#pragma once

// Tile placement within the 3x3 bin subdivision and category colors.

#include <cstdint>

#include "tibi/model.hpp"

namespace tibi {

struct Rgb {
    std::uint8_t r = 255;
    std::uint8_t g = 255;
    std::uint8_t b = 255;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kWhite{255, 255, 255};

// Row and column in the 3x3 tile grid; (1,1) is the white center.
struct TilePosition {
    int row = 0;
    int col = 0;

    friend bool operator==(const TilePosition&, const TilePosition&) = default;
};

struct TileStyle {
    int category = 0;
    TilePosition position;
    Rgb color;
};

// ESC codes fill the outer cells in reading order: code 0 upper left,
// code 2 upper right, code 7 lower right.
TileStyle code_tile(int code);

// Length categories 0..4 at (0,0), (0,1), (0,2), (1,0), (1,2).
TileStyle length_tile(int category);

TileStyle category_tile(CategoryMode mode, int category);

// Blends `color` at `opacity` over white, rounding each channel.
Rgb composite_on_white(Rgb color, double opacity);

}  // namespace tibi
