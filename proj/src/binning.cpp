#include "tibi/binning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "text_util.hpp"
#include "tibi/errors.hpp"

namespace tibi {

namespace {

struct Axis {
    Range range;
    int n = 1;
    bool degenerate = false;
};

Axis make_axis(const Range& range, int n) {
    if (n < 1) throw DomainError("bin count must be at least 1");
    if (range.lo == range.hi) return Axis{range, 1, true};
    return Axis{range, n, false};
}

// Indices of segments inside every filter range.
std::vector<std::uint32_t> passing_segments(const Dataset& dataset, const FilterState& filter) {
    const std::size_t n = dataset.size();
    std::vector<std::uint8_t> keep(n, 1);
    for (AttributeId attr : all_attributes()) {
        const Range r = filter.range(attr);
        auto col = dataset.column(attr);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = col[i];
            keep[i] &= static_cast<std::uint8_t>(v >= r.lo && v <= r.hi);
        }
    }
    std::vector<std::uint32_t> idx;
    idx.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) idx.push_back(static_cast<std::uint32_t>(i));
    }
    return idx;
}

std::vector<std::uint32_t> axis_bins(const Dataset& dataset, AttributeId attr, const Axis& axis,
                                     const std::vector<std::uint32_t>& idx) {
    std::vector<std::uint32_t> out(idx.size());
    auto col = dataset.column(attr);
    if (axis.degenerate) return out;
    const double lo = axis.range.lo;
    const double hi = axis.range.hi;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out[k] = static_cast<std::uint32_t>(bin_index(col[idx[k]], lo, hi, axis.n));
    }
    return out;
}

BinGrid empty_scatter(AttributeId ax, AttributeId ay, const Axis& x, const Axis& y, CategoryMode mode) {
    BinGrid g;
    g.attr_x = ax;
    g.attr_y = ay;
    g.nx = x.n;
    g.ny = y.n;
    g.x_range = x.range;
    g.y_range = y.range;
    g.mode = mode;
    g.ncat = category_count(mode);
    g.counts.assign(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny) * static_cast<std::size_t>(g.ncat), 0);
    g.bin_totals.assign(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny), 0);
    return g;
}

HistGrid empty_hist(AttributeId attr, const Axis& axis, CategoryMode mode) {
    HistGrid h;
    h.attr = attr;
    h.n = axis.n;
    h.range = axis.range;
    h.mode = mode;
    h.ncat = category_count(mode);
    h.counts.assign(static_cast<std::size_t>(h.n) * static_cast<std::size_t>(h.ncat), 0);
    return h;
}

void fill_scatter(BinGrid& g, std::span<const std::uint32_t> bx, std::span<const std::uint32_t> by,
                  std::span<const std::uint8_t> cats, const std::vector<std::uint32_t>& idx) {
    const std::size_t ny = static_cast<std::size_t>(g.ny);
    const std::size_t ncat = static_cast<std::size_t>(g.ncat);
    std::int64_t* counts = g.counts.data();
    for (std::size_t k = 0; k < idx.size(); ++k) {
        ++counts[(bx[k] * ny + by[k]) * ncat + cats[idx[k]]];
    }
    for (std::size_t b = 0; b < g.bin_totals.size(); ++b) {
        g.bin_totals[b] = std::accumulate(counts + b * ncat, counts + (b + 1) * ncat, std::int64_t{0});
    }
}

void fill_hist(HistGrid& h, std::span<const std::uint32_t> bins, std::span<const std::uint8_t> cats,
               const std::vector<std::uint32_t>& idx) {
    const std::size_t ncat = static_cast<std::size_t>(h.ncat);
    for (std::size_t k = 0; k < idx.size(); ++k) ++h.counts[bins[k] * ncat + cats[idx[k]]];
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += threads) fn(i);
        });
    }
}

}  // namespace

std::string_view to_string(Scaling s) { return s == Scaling::Local ? "local" : "global"; }

Scaling parse_scaling(std::string_view s) {
    if (detail::iequals(s, "local")) return Scaling::Local;
    if (detail::iequals(s, "global")) return Scaling::Global;
    throw DomainError("unknown scaling '" + std::string(s) + "' (expected local or global)");
}

FilterState FilterState::full(const Dataset& dataset) {
    FilterState f;
    for (AttributeId attr : all_attributes()) {
        f.ranges_[static_cast<std::size_t>(attr.index())] =
            attr.is_length() ? Range{static_cast<double>(kMinSegmentLength), static_cast<double>(dataset.max_length())}
                             : Range{0.0, 1.0};
    }
    return f;
}

bool FilterState::passes(const Dataset& dataset, std::size_t segment) const {
    for (AttributeId attr : all_attributes()) {
        const double v = dataset.column(attr)[segment];
        const Range& r = range(attr);
        if (v < r.lo || v > r.hi) return false;
    }
    return true;
}

FilterState apply_filter(const FilterState& state, AttributeId attr, double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("filter bounds must be finite");
    if (lo > hi) throw DomainError("inverted filter range for " + std::string(attr.descriptor()));
    if (attr.is_length()) {
        if (lo < 0.0) throw DomainError("length filter must be non-negative");
    } else if (lo < 0.0 || hi > 1.0) {
        throw DomainError(std::string(attr.descriptor()) + " filter must lie within [0,1]");
    }
    FilterState next = state;
    next.ranges_[static_cast<std::size_t>(attr.index())] = Range{lo, hi};
    return next;
}

int bin_index(double value, double lo, double hi, int n) {
    if (n < 1) throw DomainError("bin count must be at least 1");
    if (!(lo < hi)) throw DomainError("empty axis range");
    if (!(value >= lo && value <= hi)) throw RangeError("value outside axis range");
    if (value == hi) return n - 1;
    auto i = static_cast<int>(std::floor(static_cast<double>(n) * (value - lo) / (hi - lo)));
    // Rounding can push values just below hi onto n.
    return std::min(i, n - 1);
}

std::int64_t BinGrid::filtered_total() const {
    return std::accumulate(bin_totals.begin(), bin_totals.end(), std::int64_t{0});
}

std::int64_t HistGrid::total(int i) const {
    std::int64_t t = 0;
    for (int c = 0; c < ncat; ++c) t += count(i, c);
    return t;
}

std::int64_t HistGrid::max_count() const {
    return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

std::int64_t HistGrid::filtered_total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

BinGrid compute_scatter_bins(const Dataset& dataset, AttributeId attr_x, AttributeId attr_y, int nx, int ny,
                             const FilterState& filter, CategoryMode mode) {
    Axis x = make_axis(filter.range(attr_x), nx);
    Axis y = make_axis(filter.range(attr_y), ny);
    BinGrid g = empty_scatter(attr_x, attr_y, x, y, mode);
    auto idx = passing_segments(dataset, filter);
    auto bx = axis_bins(dataset, attr_x, x, idx);
    auto by = axis_bins(dataset, attr_y, y, idx);
    fill_scatter(g, bx, by, dataset.categories(mode), idx);
    return g;
}

HistGrid compute_histogram_bins(const Dataset& dataset, AttributeId attr, int n, const FilterState& filter,
                                CategoryMode mode) {
    Axis axis = make_axis(filter.range(attr), n);
    HistGrid h = empty_hist(attr, axis, mode);
    auto idx = passing_segments(dataset, filter);
    auto bins = axis_bins(dataset, attr, axis, idx);
    fill_hist(h, bins, dataset.categories(mode), idx);
    return h;
}

const BinGrid& SplomBins::scatter(int row, int col) const {
    if (row == col) throw DomainError("diagonal cells hold histograms");
    return scatter_.at(static_cast<std::size_t>(row * kAttributes + col));
}

SplomBins compute_splom_bins(const Dataset& dataset, int nx, int ny, const FilterState& filter, CategoryMode mode,
                             unsigned threads) {
    auto idx = passing_segments(dataset, filter);
    std::array<Axis, kAttributes> x_axes, y_axes;
    std::array<std::vector<std::uint32_t>, kAttributes> x_bins, y_bins;
    for (AttributeId attr : all_attributes()) {
        const auto a = static_cast<std::size_t>(attr.index());
        x_axes[a] = make_axis(filter.range(attr), nx);
        y_axes[a] = make_axis(filter.range(attr), ny);
    }
    const bool shared_bins = nx == ny;
    parallel_for(2 * kAttributes, threads, [&](std::size_t k) {
        const std::size_t a = k % kAttributes;
        AttributeId attr(static_cast<int>(a));
        if (k < kAttributes) {
            x_bins[a] = axis_bins(dataset, attr, x_axes[a], idx);
        } else if (!shared_bins) {
            y_bins[a] = axis_bins(dataset, attr, y_axes[a], idx);
        }
    });
    const auto& y_source = shared_bins ? x_bins : y_bins;

    SplomBins out;
    out.scatter_.resize(kAttributes * kAttributes);
    out.hists_.resize(kAttributes);
    auto cats = dataset.categories(mode);
    parallel_for(kAttributes * kAttributes, threads, [&](std::size_t cell) {
        const int row = static_cast<int>(cell) / kAttributes;
        const int col = static_cast<int>(cell) % kAttributes;
        const auto r = static_cast<std::size_t>(row);
        const auto c = static_cast<std::size_t>(col);
        if (row == col) {
            HistGrid h = empty_hist(AttributeId(col), x_axes[c], mode);
            fill_hist(h, x_bins[c], cats, idx);
            out.hists_[c] = std::move(h);
        } else {
            BinGrid g = empty_scatter(AttributeId(col), AttributeId(row), x_axes[c], y_axes[r], mode);
            fill_scatter(g, x_bins[c], y_source[r], cats, idx);
            out.scatter_[cell] = std::move(g);
        }
    });
    return out;
}

double alpha_local(std::int64_t count, std::int64_t bin_total) {
    if (count < 0 || count > bin_total) throw DomainError("category count exceeds bin total");
    if (bin_total == 0) return 0.0;
    return static_cast<double>(count) / static_cast<double>(bin_total);
}

double alpha_global(std::int64_t count, std::int64_t category_total) {
    if (count < 0 || count > category_total) throw DomainError("bin count exceeds category total");
    if (count == 0 || category_total == 0) return 0.0;
    if (count == category_total) return 1.0;
    return std::log1p(static_cast<double>(count)) / std::log1p(static_cast<double>(category_total));
}

double alpha(Scaling scaling, std::int64_t count, std::int64_t bin_total, std::int64_t category_total) {
    return scaling == Scaling::Local ? alpha_local(count, bin_total) : alpha_global(count, category_total);
}

}  // namespace tibi
