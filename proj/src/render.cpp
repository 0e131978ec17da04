#include "tibi/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tibi/errors.hpp"

namespace tibi {

namespace {

constexpr Rgb kFrameColor{190, 190, 190};
constexpr double kLabelSize = 10;

std::string format_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void check_box(const Box& cell) {
    if (!(cell.w > 0 && cell.h > 0)) throw DomainError("cell rectangle has zero area");
}

// N equal slices of [a, b]; consecutive slices share edges.
template <std::size_t N>
std::array<double, N + 1> slices(double a, double b) {
    std::array<double, N + 1> e{};
    for (std::size_t k = 0; k <= N; ++k) e[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(N);
    e[N] = b;
    return e;
}

RectShape frame_for(const Box& cell) {
    return RectShape{cell, std::nullopt, kFrameColor, RectRole::Frame, -1};
}

void axis_labels(Fragment& labels, const Box& cell, const Range& x, const Range& y, bool x_ticks, bool y_ticks) {
    const double below = cell.y + cell.h + kLabelSize + 2;
    if (x_ticks) {
        labels.shapes.push_back(TextShape{cell.x, below, format_tick(x.lo), kLabelSize, TextAnchor::Start, false});
        labels.shapes.push_back(
            TextShape{cell.x + cell.w, below, format_tick(x.hi), kLabelSize, TextAnchor::End, false});
    }
    if (y_ticks) {
        const double left = cell.x - 3;
        labels.shapes.push_back(TextShape{left, cell.y + cell.h, format_tick(y.lo), kLabelSize, TextAnchor::End, false});
        labels.shapes.push_back(
            TextShape{left, cell.y + kLabelSize, format_tick(y.hi), kLabelSize, TextAnchor::End, false});
    }
}

void descriptors(Fragment& labels, const Box& cell, std::string_view top, std::string_view left) {
    labels.shapes.push_back(
        TextShape{cell.x + cell.w / 2, cell.y - 6, std::string(top), kLabelSize + 1, TextAnchor::Middle, false});
    labels.shapes.push_back(TextShape{SplomLayout::kMarginLeft - 38, cell.y + cell.h / 2, std::string(left),
                                      kLabelSize + 1, TextAnchor::Middle, true});
}

}  // namespace

std::size_t Fragment::count(RectRole role) const {
    return static_cast<std::size_t>(std::count_if(shapes.begin(), shapes.end(), [role](const Shape& s) {
        const auto* r = std::get_if<RectShape>(&s);
        return r != nullptr && r->role == role;
    }));
}

void ViewState::validate() const {
    if (nx < 1 || ny < 1) throw DomainError("bin counts must be at least 1");
    if (zoom && (zoom->row < 0 || zoom->row >= kAttributes || zoom->col < 0 || zoom->col >= kAttributes)) {
        throw DomainError("zoom cell outside the 8x8 matrix");
    }
}

SplomLayout::SplomLayout(double width_, double height_, int n_) : width(width_), height(height_), n(n_) {
    if (n < 1) throw DomainError("layout needs at least one cell");
    if (cell_width() <= 0 || cell_height() <= 0) {
        throw DomainError("canvas " + format_tick(width) + "x" + format_tick(height) + " too small for the matrix");
    }
}

double SplomLayout::cell_width() const {
    return (width - kMarginLeft - kMarginRight - kGap * (n - 1)) / n;
}

double SplomLayout::cell_height() const {
    return (height - kMarginTop - kMarginBottom - kGap * (n - 1)) / n;
}

Box SplomLayout::cell(int row, int col) const {
    if (row < 0 || row >= n || col < 0 || col >= n) throw DomainError("cell outside layout");
    const double w = cell_width();
    const double h = cell_height();
    return Box{kMarginLeft + col * (w + kGap), kMarginTop + row * (h + kGap), w, h};
}

Fragment render_scatter_cell(const BinGrid& grid, Scaling scaling, std::span<const std::int64_t> category_totals,
                             const Box& cell) {
    check_box(cell);
    if (static_cast<int>(category_totals.size()) != grid.ncat) {
        throw DomainError("category totals do not match the grid's category count");
    }
    Fragment frag;
    frag.cls = "scatter";
    const double x_end = cell.x + cell.w;
    const double y_end = cell.y + cell.h;
    for (int i = 0; i < grid.nx; ++i) {
        const double x0 = cell.x + cell.w * i / grid.nx;
        const double x1 = i + 1 == grid.nx ? x_end : cell.x + cell.w * (i + 1) / grid.nx;
        const auto xs = slices<3>(x0, x1);
        for (int j = 0; j < grid.ny; ++j) {
            const std::int64_t total = grid.total(i, j);
            if (total == 0) continue;
            // Bin j counts upward from the bottom edge.
            const double top = j + 1 == grid.ny ? cell.y : y_end - cell.h * (j + 1) / grid.ny;
            const double bottom = y_end - cell.h * j / grid.ny;
            const auto ys = slices<3>(top, bottom);
            for (int cat = 0; cat < grid.ncat; ++cat) {
                const std::int64_t c = grid.count(i, j, cat);
                if (c == 0) continue;
                const TileStyle style = category_tile(grid.mode, cat);
                const double a = alpha(scaling, c, total, category_totals[static_cast<std::size_t>(cat)]);
                const auto r = static_cast<std::size_t>(style.position.row);
                const auto col = static_cast<std::size_t>(style.position.col);
                Box tile{xs[col], ys[r], xs[col + 1] - xs[col], ys[r + 1] - ys[r]};
                frag.shapes.push_back(
                    RectShape{tile, composite_on_white(style.color, a), std::nullopt, RectRole::Tile, cat});
            }
        }
    }
    frag.shapes.push_back(frame_for(cell));
    return frag;
}

Fragment render_histogram_cell(const HistGrid& hist, Scaling scaling, const Box& cell) {
    check_box(cell);
    Fragment frag;
    frag.cls = "histogram";
    const std::int64_t max = hist.max_count();
    if (max > 0) {
        const double denom = scaling == Scaling::Local ? static_cast<double>(max) : std::log1p(static_cast<double>(max));
        const double y_end = cell.y + cell.h;
        for (int i = 0; i < hist.n; ++i) {
            const double x0 = cell.x + cell.w * i / hist.n;
            const double x1 = i + 1 == hist.n ? cell.x + cell.w : cell.x + cell.w * (i + 1) / hist.n;
            for (int cat = 0; cat < hist.ncat; ++cat) {
                const std::int64_t c = hist.count(i, cat);
                if (c == 0) continue;
                const double scaled = scaling == Scaling::Local ? static_cast<double>(c) : std::log1p(static_cast<double>(c));
                const double height = c == max ? cell.h : cell.h * scaled / denom;
                const double left = x0 + (x1 - x0) * cat / hist.ncat;
                const double right = cat + 1 == hist.ncat ? x1 : x0 + (x1 - x0) * (cat + 1) / hist.ncat;
                frag.shapes.push_back(RectShape{Box{left, y_end - height, right - left, height},
                                                category_tile(hist.mode, cat).color, std::nullopt, RectRole::Bar,
                                                cat});
            }
        }
    }
    frag.shapes.push_back(frame_for(cell));
    return frag;
}

Document render_splom(const Dataset& dataset, const ViewState& view, double width, double height) {
    view.validate();
    Document doc;
    doc.width = width;
    doc.height = height;
    auto totals = dataset.category_totals(view.mode);
    Fragment labels;
    labels.cls = "labels";

    if (view.zoom) {
        const SplomLayout layout(width, height, 1);
        const Box box = layout.cell(0, 0);
        const int row = view.zoom->row;
        const int col = view.zoom->col;
        const AttributeId ax(col), ay(row);
        Fragment frag;
        if (row == col) {
            auto hist = compute_histogram_bins(dataset, ax, view.nx, view.filters, view.mode);
            frag = render_histogram_cell(hist, view.scaling, box);
            axis_labels(labels, box, hist.range, Range{0, static_cast<double>(hist.max_count())}, true, true);
        } else {
            auto grid = compute_scatter_bins(dataset, ax, ay, view.nx, view.ny, view.filters, view.mode);
            frag = render_scatter_cell(grid, view.scaling, totals, box);
            axis_labels(labels, box, grid.x_range, grid.y_range, true, true);
        }
        frag.row = row;
        frag.col = col;
        descriptors(labels, box, ax.descriptor(), ay.descriptor());
        doc.fragments.push_back(std::move(frag));
        doc.fragments.push_back(std::move(labels));
        return doc;
    }

    const SplomLayout layout(width, height);
    const SplomBins bins = compute_splom_bins(dataset, view.nx, view.ny, view.filters, view.mode);
    doc.fragments.reserve(kAttributes * kAttributes + 1);
    for (int row = 0; row < kAttributes; ++row) {
        for (int col = 0; col < kAttributes; ++col) {
            const Box box = layout.cell(row, col);
            Fragment frag = row == col ? render_histogram_cell(bins.histogram(col), view.scaling, box)
                                       : render_scatter_cell(bins.scatter(row, col), view.scaling, totals, box);
            frag.row = row;
            frag.col = col;
            doc.fragments.push_back(std::move(frag));
        }
    }
    for (int k = 0; k < kAttributes; ++k) {
        const AttributeId attr(k);
        const Range r = view.filters.range(attr);
        axis_labels(labels, layout.cell(kAttributes - 1, k), r, r, true, false);
        // Row 0's first cell is a histogram; its y ticks are counts, not attribute values.
        if (k > 0) axis_labels(labels, layout.cell(k, 0), r, r, false, true);
        labels.shapes.push_back(TextShape{layout.cell(0, k).x + layout.cell_width() / 2, SplomLayout::kMarginTop - 6,
                                          std::string(attr.descriptor()), kLabelSize + 1, TextAnchor::Middle, false});
        const Box left = layout.cell(k, 0);
        labels.shapes.push_back(TextShape{SplomLayout::kMarginLeft - 38, left.y + left.h / 2,
                                          std::string(attr.descriptor()), kLabelSize + 1, TextAnchor::Middle, true});
    }
    doc.fragments.push_back(std::move(labels));
    return doc;
}

}  // namespace tibi
