#pragma once

// 2D bin counts per category, diagonal histograms, range filters and the two
// opacity scalings.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tibi/model.hpp"

namespace tibi {

enum class Scaling : std::uint8_t { Local, Global };

std::string_view to_string(Scaling s);  // "local" / "global"
Scaling parse_scaling(std::string_view s);

// Selected (lo, hi) per attribute, in attribute units. A segment is shown iff
// it lies inside every range (bounds inclusive).
class FilterState {
public:
    // Coverages and CpG-density over [0,1], length over [200, longest segment].
    static FilterState full(const Dataset& dataset);

    const Range& range(AttributeId attr) const { return ranges_[static_cast<std::size_t>(attr.index())]; }
    const std::array<Range, kAttributes>& ranges() const { return ranges_; }

    bool passes(const Dataset& dataset, std::size_t segment) const;

    friend bool operator==(const FilterState&, const FilterState&) = default;

private:
    friend FilterState apply_filter(const FilterState&, AttributeId, double, double);
    std::array<Range, kAttributes> ranges_{};
};

// Copy of `state` with one attribute's range replaced. Rejects lo > hi,
// non-finite bounds, coverage/CpG bounds outside [0,1] and negative lengths.
FilterState apply_filter(const FilterState& state, AttributeId attr, double lo, double hi);

// floor(n * (value - lo) / (hi - lo)), with value == hi in the last bin.
int bin_index(double value, double lo, double hi, int n);

struct BinGrid {
    AttributeId attr_x;
    AttributeId attr_y;
    int nx = 1;
    int ny = 1;
    Range x_range;
    Range y_range;
    CategoryMode mode = CategoryMode::EscCode;
    int ncat = kEscCodes;
    std::vector<std::int64_t> counts;      // [(i * ny + j) * ncat + cat]
    std::vector<std::int64_t> bin_totals;  // [i * ny + j]

    std::int64_t count(int i, int j, int cat) const {
        return counts[(static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j)) *
                          static_cast<std::size_t>(ncat) +
                      static_cast<std::size_t>(cat)];
    }
    std::int64_t total(int i, int j) const {
        return bin_totals[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j)];
    }
    std::int64_t filtered_total() const;

    friend bool operator==(const BinGrid&, const BinGrid&) = default;
};

struct HistGrid {
    AttributeId attr;
    int n = 1;
    Range range;
    CategoryMode mode = CategoryMode::EscCode;
    int ncat = kEscCodes;
    std::vector<std::int64_t> counts;  // [i * ncat + cat]

    std::int64_t count(int i, int cat) const {
        return counts[static_cast<std::size_t>(i) * static_cast<std::size_t>(ncat) + static_cast<std::size_t>(cat)];
    }
    std::int64_t total(int i) const;
    std::int64_t max_count() const;
    std::int64_t filtered_total() const;

    friend bool operator==(const HistGrid&, const HistGrid&) = default;
};

// Axis ranges come from the filter. A degenerate range (lo == hi) collapses
// that axis to a single bin.
BinGrid compute_scatter_bins(const Dataset& dataset, AttributeId attr_x, AttributeId attr_y, int nx, int ny,
                             const FilterState& filter, CategoryMode mode);

HistGrid compute_histogram_bins(const Dataset& dataset, AttributeId attr, int n, const FilterState& filter,
                                CategoryMode mode);

// All 64 matrix cells at once: row i is the y attribute, column j the x
// attribute; diagonal cells are histograms with nx bins. Shares the filter
// pass and per-attribute bin lookups across cells and spreads cells over
// `threads` workers (0 = hardware concurrency).
class SplomBins {
public:
    const BinGrid& scatter(int row, int col) const;
    const HistGrid& histogram(int attr) const { return hists_.at(static_cast<std::size_t>(attr)); }

private:
    friend SplomBins compute_splom_bins(const Dataset&, int, int, const FilterState&, CategoryMode, unsigned);
    std::vector<BinGrid> scatter_;  // row-major, diagonal slots unused
    std::vector<HistGrid> hists_;
};

SplomBins compute_splom_bins(const Dataset& dataset, int nx, int ny, const FilterState& filter, CategoryMode mode,
                             unsigned threads = 0);

// #(cat, bin) / #(bin); 0 for an empty bin. Used as tile opacity.
double alpha_local(std::int64_t count, std::int64_t bin_total);

// log(1 + #(cat, bin)) / log(1 + #(cat)); 0 when either count is 0.
double alpha_global(std::int64_t count, std::int64_t category_total);

double alpha(Scaling scaling, std::int64_t count, std::int64_t bin_total, std::int64_t category_total);

}  // namespace tibi
