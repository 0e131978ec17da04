#pragma once

// Vector scene for the tiled binned scatterplot matrix, SVG serialization and
// PNG rasterization.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tibi/binning.hpp"
#include "tibi/style.hpp"
#include "tibi/view.hpp"

namespace tibi {

struct Box {
    double x = 0;
    double y = 0;
    double w = 0;
    double h = 0;

    friend bool operator==(const Box&, const Box&) = default;
};

enum class RectRole : std::uint8_t { Frame, Tile, Bar };

struct RectShape {
    Box box;
    std::optional<Rgb> fill;
    std::optional<Rgb> stroke;
    RectRole role = RectRole::Tile;
    int category = -1;  // tiles and bars only
};

struct LineShape {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    Rgb stroke{0, 0, 0};
};

enum class TextAnchor : std::uint8_t { Start, Middle, End };

struct TextShape {
    double x = 0;
    double y = 0;
    std::string text;
    double size = 10;
    TextAnchor anchor = TextAnchor::Start;
    bool vertical = false;  // rotated -90 degrees about (x, y)
};

using Shape = std::variant<RectShape, LineShape, TextShape>;

// Shapes of one matrix cell (or the labels layer), emitted as an SVG group.
struct Fragment {
    std::string cls;  // "scatter", "histogram", "labels"
    int row = -1;
    int col = -1;
    std::vector<Shape> shapes;

    std::size_t count(RectRole role) const;
};

struct Document {
    double width = 0;
    double height = 0;
    std::vector<Fragment> fragments;
};

// Uniform grid of n x n cells with margins for descriptors and endpoint labels.
struct SplomLayout {
    double width = 0;
    double height = 0;
    int n = kAttributes;
    static constexpr double kMarginLeft = 56;
    static constexpr double kMarginTop = 22;
    static constexpr double kMarginRight = 10;
    static constexpr double kMarginBottom = 18;
    static constexpr double kGap = 6;

    SplomLayout(double width, double height, int n = kAttributes);
    Box cell(int row, int col) const;
    double cell_width() const;
    double cell_height() const;
};

// Bins sit between their interval borders (y grows upward); each non-empty
// bin gets one tile per present category in its 3x3 position. Empty bins and
// the center tile emit nothing so the white background shows through.
Fragment render_scatter_cell(const BinGrid& grid, Scaling scaling, std::span<const std::int64_t> category_totals,
                             const Box& cell);

// Each bin is split into ncat equal sub-columns in category order; height is
// count / max (Local) or log1p(count) / log1p(max) (Global).
Fragment render_histogram_cell(const HistGrid& hist, Scaling scaling, const Box& cell);

// Full 8x8 matrix, or the single zoomed cell when view.zoom is set.
Document render_splom(const Dataset& dataset, const ViewState& view, double width, double height);

enum class ExportFormat : std::uint8_t { Svg, Png };

// Accepts "svg" or "png" (case-insensitive); anything else is a DomainError
// listing the supported formats.
ExportFormat parse_export_format(std::string_view token);

std::string to_svg(const Document& doc, double width, double height);
inline std::string to_svg(const Document& doc) { return to_svg(doc, doc.width, doc.height); }

struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    Rgb pixel(int x, int y) const {
        const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
        return Rgb{rgb[i], rgb[i + 1], rgb[i + 2]};
    }
};

// Scan-converts rectangles and lines by pixel-center sampling, scaled from
// document units to width x height. Text uses a fixed 6x11 bitmap font.
RasterImage rasterize(const Document& doc, int width, int height);

std::vector<std::uint8_t> encode_png(const RasterImage& image);

std::vector<std::uint8_t> export_image(const Document& doc, ExportFormat format, int width, int height);

}  // namespace tibi
