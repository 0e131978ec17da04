// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "support/test_support.hpp"
#include "tibi/service.hpp"

using namespace tibi;
namespace tt = tibi::testing;

namespace {

constexpr double kAlphaSumTolerance = 1e-12;
constexpr int kOracleConfigs = 120;
constexpr std::size_t kOracleMaxSegments = 10000;
constexpr double kOracleBudgetSeconds = 30.0;
constexpr int kAlphaPairs = 100000;
constexpr int kSegmentationTrials = 200;
constexpr std::size_t kScaleSegments = 1000000;
constexpr double kScaleBinningSeconds = 5.0;
constexpr double kScaleExportSeconds = 15.0;
constexpr double kGeometrySeconds = 1.0;

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// ---------------------------------------------------------------- criteria

Outcome bin_geometry() {
    Outcome out;
    const auto t0 = Clock::now();
    const double width = (1.0 - 0.0) / 50;
    if (width != 0.02) out.fail("bin width " + fmt(width));
    if (bin_index(1.0, 0.0, 1.0, 50) != 49) out.fail("1.0 not in bin 49");
    if (bin_index(0.0, 0.0, 1.0, 50) != 0) out.fail("0.0 not in bin 0");

    // Same geometry as reported by the grid and the bin info endpoint.
    Dataset ds = tt::synthetic_dataset(200, 1);
    ViewState view = ViewState::defaults(ds);
    BinGrid g = compute_scatter_bins(ds, AttributeId(1), AttributeId(0), 50, 50, view.filters, view.mode);
    if (g.nx != 50 || g.x_range.lo != 0.0 || g.x_range.hi != 1.0) out.fail("grid axis is not 50 bins over [0,1]");
    BinInfo info = compute_bin_info(ds, view, CellRef{0, 1}, 0, 0);
    if (info.x_bin.min != 0.0 || info.x_bin.max != 0.02) out.fail("first bin is not [0, 0.02]");
    BinInfo last = compute_bin_info(ds, view, CellRef{0, 1}, 49, 49);
    if (last.x_bin.max != 1.0) out.fail("last bin does not end at 1.0");

    const double secs = seconds_since(t0);
    if (secs >= kGeometrySeconds) out.fail("took " + fmt(secs) + " s");
    if (out.ok) out.detail = "width 0.02, 1.0 -> bin 49";
    return out;
}

Outcome color_position_tables() {
    Outcome out;
    // ColorBrewer Paired; red is 227,26,28.
    const Rgb code_colors[8] = {{227, 26, 28},   {178, 223, 138}, {255, 127, 0},  {166, 206, 227},
                                {31, 120, 180},  {253, 191, 111}, {51, 160, 44},  {251, 154, 153}};
    const TilePosition code_positions[8] = {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}, {2, 2}};
    for (int c = 0; c < 8; ++c) {
        const TileStyle s = code_tile(c);
        if (!(s.color == code_colors[c])) out.fail("code " + std::to_string(c) + " color");
        if (!(s.position == code_positions[c])) out.fail("code " + std::to_string(c) + " position");
        if (s.position == TilePosition{1, 1}) out.fail("code tile on the white center");
    }
    if (!(code_tile(0).position == TilePosition{0, 0})) out.fail("code 0 is not upper left");
    if (!(code_tile(2).position == TilePosition{0, 2})) out.fail("code 2 is not upper right");

    // Length positions listed 1-based (row, column).
    const int length_positions[5][2] = {{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 3}};
    for (int k = 0; k < 5; ++k) {
        const TileStyle s = length_tile(k);
        if (!(s.color == code_colors[k])) out.fail("length " + std::to_string(k) + " color");
        if (!(s.position == TilePosition{length_positions[k][0] - 1, length_positions[k][1] - 1})) {
            out.fail("length " + std::to_string(k) + " position");
        }
    }
    if (out.ok) out.detail = "8 code tiles, 5 length tiles";
    return out;
}

Outcome esc_code_bijection() {
    Outcome out;
    // Binary reading of (H3K4me3, H3K27me3, H3K9me3).
    std::set<int> seen;
    for (int k4 = 0; k4 < 2; ++k4) {
        for (int k27 = 0; k27 < 2; ++k27) {
            for (int k9 = 0; k9 < 2; ++k9) {
                const int code = esc_code({double(k4), double(k27), double(k9)});
                if (code != k4 * 4 + k27 * 2 + k9) out.fail("wrong code for a triple");
                seen.insert(code);
            }
        }
    }
    if (seen.size() != 8) out.fail("codes are not distinct");
    if (esc_code({1, 0, 0}) != 4) out.fail("100 H3K4me3 is not 4");
    if (esc_code({0, 0, 1}) != 1) out.fail("001 H3K9me3 is not 1");
    if (out.ok) out.detail = "8 triples -> 0..7";
    return out;
}

FilterState random_filter(std::mt19937_64& rng, const Dataset& ds) {
    FilterState f = FilterState::full(ds);
    std::uniform_int_distribution<int> how_many(0, 3), attr(0, kAttributes - 1), grid(0, 50);
    const int n = how_many(rng);
    for (int k = 0; k < n; ++k) {
        const AttributeId a(attr(rng));
        double lo, hi;
        if (a.is_length()) {
            std::uniform_int_distribution<std::int64_t> len(200, 4000);
            lo = static_cast<double>(len(rng));
            hi = static_cast<double>(len(rng));
        } else {
            lo = grid(rng) / 50.0;
            hi = grid(rng) / 50.0;
            if (a.index() == AttributeId::kCpg) {
                lo *= 0.12;
                hi *= 0.12;
            }
        }
        if (lo > hi) std::swap(lo, hi);
        f = apply_filter(f, a, lo, hi);
    }
    return f;
}

Outcome oracle_binning() {
    Outcome out;
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> size(0, kOracleMaxSegments);
    std::uniform_int_distribution<int> bins(1, 100), attr(0, kAttributes - 1), mode(0, 1);
    const auto t0 = Clock::now();
    int scatter_checks = 0, hist_checks = 0;
    for (int cfg = 0; cfg < kOracleConfigs && out.ok; ++cfg) {
        const auto segments = tt::synthetic_segments(size(rng), rng());
        const Dataset ds(segments, CellType::ESC, true);
        const FilterState f = random_filter(rng, ds);
        const int nx = bins(rng), ny = bins(rng);
        const CategoryMode m = mode(rng) ? CategoryMode::LengthCategory : CategoryMode::EscCode;
        int ax = attr(rng), ay = attr(rng);
        if (ax == ay) ay = (ay + 1) % kAttributes;

        const BinGrid g = compute_scatter_bins(ds, AttributeId(ax), AttributeId(ay), nx, ny, f, m);
        if (tt::sparse(g) != tt::oracle_scatter(segments, ax, ay, tt::oracle_bins(f.range(AttributeId(ax)), nx),
                                                tt::oracle_bins(f.range(AttributeId(ay)), ny), f, m)) {
            out.fail("scatter mismatch in config " + std::to_string(cfg));
        }
        ++scatter_checks;
        const HistGrid h = compute_histogram_bins(ds, AttributeId(ax), nx, f, m);
        if (tt::sparse(h) != tt::oracle_hist(segments, ax, tt::oracle_bins(f.range(AttributeId(ax)), nx), f, m)) {
            out.fail("histogram mismatch in config " + std::to_string(cfg));
        }
        ++hist_checks;

        // Every tenth configuration also checks the whole matrix path.
        if (cfg % 10 == 0 && segments.size() <= 3000) {
            const SplomBins splom = compute_splom_bins(ds, nx, ny, f, m, 2);
            for (int r = 0; r < kAttributes; ++r) {
                for (int c = 0; c < kAttributes; ++c) {
                    if (r == c) {
                        if (tt::sparse(splom.histogram(c)) !=
                            tt::oracle_hist(segments, c, tt::oracle_bins(f.range(AttributeId(c)), nx), f, m)) {
                            out.fail("matrix histogram mismatch");
                        }
                        ++hist_checks;
                    } else {
                        if (tt::sparse(splom.scatter(r, c)) !=
                            tt::oracle_scatter(segments, c, r, tt::oracle_bins(f.range(AttributeId(c)), nx),
                                               tt::oracle_bins(f.range(AttributeId(r)), ny), f, m)) {
                            out.fail("matrix scatter mismatch");
                        }
                        ++scatter_checks;
                    }
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= kOracleBudgetSeconds) out.fail("took " + fmt(secs) + " s");
    if (out.ok) {
        out.detail = std::to_string(kOracleConfigs) + " configs, " + std::to_string(scatter_checks) + " scatter + " +
                     std::to_string(hist_checks) + " histogram grids equal, " + fmt(secs) + " s";
    }
    return out;
}

Outcome alpha_invariants() {
    Outcome out;
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::int64_t> total_dist(1, 1000000);
    double worst = 0;
    for (int k = 0; k < kAlphaPairs; ++k) {
        const std::int64_t total = k % 2 ? total_dist(rng) : std::uniform_int_distribution<std::int64_t>(1, 20)(rng);
        const std::int64_t count = std::uniform_int_distribution<std::int64_t>(0, total)(rng);
        const double a = alpha_global(count, total);
        if (!(a >= 0.0 && a <= 1.0)) out.fail("alpha_global outside [0,1]");
        if (count < total && alpha_global(count + 1, total) < a) out.fail("alpha_global not monotone");
        if (count == total && a != 1.0) out.fail("alpha_global(total, total) != 1");

        // Split the bin's total into up to 8 category counts.
        std::array<std::int64_t, kEscCodes> parts{};
        std::int64_t left = total;
        for (std::size_t c = 0; c + 1 < parts.size(); ++c) {
            parts[c] = std::uniform_int_distribution<std::int64_t>(0, left)(rng);
            left -= parts[c];
        }
        parts.back() = left;
        double sum = 0;
        for (auto p : parts) {
            const double l = alpha_local(p, total);
            if (!(l >= 0.0 && l <= 1.0)) out.fail("alpha_local outside [0,1]");
            sum += l;
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }

    // The same sum over every non-empty bin of real grids.
    Dataset ds = tt::synthetic_dataset(20000, 78);
    const SplomBins splom = compute_splom_bins(ds, 37, 23, FilterState::full(ds), CategoryMode::EscCode, 2);
    for (int r = 0; r < kAttributes; ++r) {
        for (int c = 0; c < kAttributes; ++c) {
            if (r == c) continue;
            const BinGrid& g = splom.scatter(r, c);
            for (int i = 0; i < g.nx; ++i) {
                for (int j = 0; j < g.ny; ++j) {
                    const auto total = g.total(i, j);
                    if (total == 0) continue;
                    double sum = 0;
                    for (int cat = 0; cat < g.ncat; ++cat) sum += alpha_local(g.count(i, j, cat), total);
                    worst = std::max(worst, std::abs(sum - 1.0));
                }
            }
        }
    }
    if (worst > kAlphaSumTolerance) out.fail("local alpha sum off by " + fmt(worst));
    if (out.ok) out.detail = std::to_string(kAlphaPairs) + " pairs, max |sum-1| = " + fmt(worst);
    return out;
}

Outcome segmentation_invariants() {
    Outcome out;
    std::mt19937_64 rng(4242);
    std::size_t total_segments = 0;
    for (int trial = 0; trial < kSegmentationTrials && out.ok; ++trial) {
        const int nchrom = std::uniform_int_distribution<int>(1, 5)(rng);
        std::vector<Chromosome> chroms;
        for (int c = 0; c < nchrom; ++c) {
            chroms.push_back({"chr" + std::to_string(c + 1), std::uniform_int_distribution<std::int64_t>(50, 8000)(rng),
                              std::nullopt});
        }
        const int nregions = std::uniform_int_distribution<int>(0, 100)(rng);
        TrackSet tracks;
        std::array<std::vector<Region>, kTracks> per_track;
        for (int k = 0; k < nregions; ++k) {
            const auto& c = chroms[rng() % chroms.size()];
            const auto a = std::uniform_int_distribution<std::int64_t>(0, c.length - 1)(rng);
            const auto b = std::min(c.length, a + std::uniform_int_distribution<std::int64_t>(1, 2000)(rng));
            per_track[rng() % kTracks].push_back({c.name, a, b});
        }
        std::vector<Region> reference;
        for (int t = 0; t < kTracks; ++t) {
            const auto cell = static_cast<CellType>(t / kModifications);
            const auto mod = static_cast<Modification>(t % kModifications);
            for (auto& r : per_track[static_cast<std::size_t>(t)]) {
                r.cell_type = cell;
                r.modification = mod;
            }
            if (cell == CellType::ESC) {
                reference.insert(reference.end(), per_track[static_cast<std::size_t>(t)].begin(),
                                 per_track[static_cast<std::size_t>(t)].end());
            }
            tracks.set(cell, mod, per_track[static_cast<std::size_t>(t)]);
        }

        const Dataset ds = build_dataset(chroms, tracks);
        const auto expected = tt::oracle_segmentation(chroms, reference, 200);
        if (ds.size() != expected.size()) {
            out.fail("trial " + std::to_string(trial) + ": " + std::to_string(ds.size()) + " segments, oracle " +
                     std::to_string(expected.size()));
            break;
        }
        total_segments += ds.size();
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const Segment& s = ds.segments()[i];
            if (s.chrom != expected[i].chrom || s.start != expected[i].start || s.end != expected[i].end) {
                out.fail("segment differs from the oracle");
            }
            if (s.length < 200) out.fail("segment shorter than 200");
            if (i > 0 && ds.segments()[i - 1].chrom == s.chrom && ds.segments()[i - 1].end > s.start) {
                out.fail("overlapping segments");
            }
            for (int t = 0; t < kTracks; ++t) {
                const double cov = s.coverage[static_cast<std::size_t>(t)];
                if (cov != tt::oracle_coverage(s.chrom, s.start, s.end, per_track[static_cast<std::size_t>(t)])) {
                    out.fail("coverage differs from the per-base count");
                }
                if (t < kModifications && cov != 0.0 && cov != 1.0) out.fail("fractional reference coverage");
            }
        }
    }
    if (out.ok) {
        out.detail = std::to_string(kSegmentationTrials) + " region sets, " + std::to_string(total_segments) +
                     " segments match";
    }
    return out;
}

Outcome filter_round_trip() {
    Outcome out;
    std::mt19937_64 rng(99);
    const Dataset ds = tt::synthetic_dataset(8000, 100);
    const FilterState full = FilterState::full(ds);
    const SplomBins before = compute_splom_bins(ds, 40, 30, full, CategoryMode::EscCode, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const FilterState f = random_filter(rng, ds);
        (void)compute_splom_bins(ds, 40, 30, f, CategoryMode::EscCode, 2);
        FilterState reset = f;
        for (const AttributeId a : all_attributes()) {
            const Range r = full.range(a);
            reset = apply_filter(reset, a, r.lo, r.hi);
        }
        if (!(reset == full)) out.fail("reset filter differs from the full range");
        const SplomBins after = compute_splom_bins(ds, 40, 30, reset, CategoryMode::EscCode, 2);
        for (int r = 0; r < kAttributes; ++r) {
            for (int c = 0; c < kAttributes; ++c) {
                const bool same = r == c ? after.histogram(c) == before.histogram(c)
                                         : after.scatter(r, c) == before.scatter(r, c);
                if (!same) out.fail("grid differs after reset");
            }
        }
    }
    if (out.ok) out.detail = "20 filter/reset cycles, 64 grids identical";
    return out;
}

Outcome rendering() {
    Outcome out;
    const Dataset ds = tt::synthetic_dataset(3000, 5);
    ViewState view = ViewState::defaults(ds);
    view.nx = 20;
    view.ny = 15;
    const std::string a = to_svg(render_splom(ds, view, 900, 800));
    const std::string b = to_svg(render_splom(ds, view, 900, 800));
    if (a != b) out.fail("SVG renders differ");
    const auto pa = export_image(render_splom(ds, view, 500, 400), ExportFormat::Png, 500, 400);
    const auto pb = export_image(render_splom(ds, view, 500, 400), ExportFormat::Png, 500, 400);
    if (pa != pb) out.fail("PNG renders differ");

    // Known case: zoomed scatter of x = MEF:H3K27me3, y = MEF:H3K4me3 with two
    // x bins and one y bin. Codes 0 x3 and 4 x1 in bin 0; codes 0 x1 and 7 x1
    // in bin 1.
    auto seg = [](std::int64_t start, int code, double x) {
        Segment s;
        s.chrom = "chr1";
        s.start = start;
        s.end = start + 300;
        s.length = 300;
        s.coverage[0] = code >> 2 & 1;
        s.coverage[1] = code >> 1 & 1;
        s.coverage[2] = code & 1;
        s.coverage[4] = x;
        s.coverage[3] = 0.5;
        return s;
    };
    const Dataset tiny({seg(0, 0, 0.1), seg(1000, 0, 0.2), seg(2000, 0, 0.3), seg(3000, 4, 0.4), seg(4000, 0, 0.9),
                        seg(5000, 7, 1.0)},
                       CellType::ESC, true);
    struct Expected {
        int bin;
        int code;
        double opacity;
    };
    // Opacities straight from the definitions: local c/#(bin), global
    // log(1+c)/log(1+#(code)) with #(0)=4, #(4)=1, #(7)=1.
    const std::vector<Expected> local{{0, 0, 3.0 / 4}, {0, 4, 1.0 / 4}, {1, 0, 1.0 / 2}, {1, 7, 1.0 / 2}};
    const std::vector<Expected> global{
        {0, 0, std::log(4.0) / std::log(5.0)}, {0, 4, 1.0}, {1, 0, std::log(2.0) / std::log(5.0)}, {1, 7, 1.0}};
    const Rgb palette[8] = {{227, 26, 28},  {178, 223, 138}, {255, 127, 0}, {166, 206, 227},
                            {31, 120, 180}, {253, 191, 111}, {51, 160, 44}, {251, 154, 153}};
    const int pos[8][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}, {2, 2}};

    for (const auto scaling : {Scaling::Local, Scaling::Global}) {
        ViewState v = ViewState::defaults(tiny);
        v.nx = 2;
        v.ny = 1;
        v.scaling = scaling;
        v.zoom = CellRef{0, 1};
        const std::string svg = to_svg(render_splom(tiny, v, 666, 640));
        const auto frames = tt::svg_rects(svg, "frame");
        auto tiles = tt::svg_rects(svg, "tile");
        if (frames.size() != 1) {
            out.fail("expected one frame");
            continue;
        }
        const auto& expected = scaling == Scaling::Local ? local : global;
        if (tiles.size() != expected.size()) {
            out.fail("expected " + std::to_string(expected.size()) + " tiles, got " + std::to_string(tiles.size()));
            continue;
        }
        const auto& fr = frames[0];
        for (const auto& e : expected) {
            const double bw = fr.w / 2;
            const double x = fr.x + e.bin * bw + pos[e.code][1] * bw / 3;
            const double y = fr.y + pos[e.code][0] * fr.h / 3;
            const Rgb c = palette[e.code];
            auto blend = [&](int ch) { return static_cast<int>(std::lround(255 - e.opacity * (255 - ch))); };
            const std::string fill = tt::hex(Rgb{static_cast<std::uint8_t>(blend(c.r)),
                                                 static_cast<std::uint8_t>(blend(c.g)),
                                                 static_cast<std::uint8_t>(blend(c.b))});
            const std::string from_style = tt::hex(composite_on_white(code_tile(e.code).color, e.opacity));
            bool found = false;
            for (const auto& t : tiles) {
                if (t.category == e.code && t.x == x && t.y == y && t.w == bw / 3 && t.h == fr.h / 3 &&
                    t.fill == fill && t.fill == from_style) {
                    found = true;
                }
            }
            if (!found) out.fail("missing tile for code " + std::to_string(e.code) + " in bin " + std::to_string(e.bin));
        }
    }
    if (out.ok) out.detail = "byte-identical SVG/PNG, 2-bin case matches 4+4 tiles";
    return out;
}

Outcome scale() {
    Outcome out;
    const Dataset ds = tt::synthetic_dataset(kScaleSegments, 1000000);
    const ViewState view = ViewState::defaults(ds);

    auto t0 = Clock::now();
    const SplomBins splom = compute_splom_bins(ds, 50, 50, view.filters, view.mode);
    const double binning = seconds_since(t0);
    if (splom.histogram(0).filtered_total() != static_cast<std::int64_t>(kScaleSegments)) out.fail("lost segments");

    t0 = Clock::now();
    const std::string svg = to_svg(render_splom(ds, view, 1000, 1000));
    const double exporting = seconds_since(t0);

    if (binning >= kScaleBinningSeconds) out.fail("binning took " + fmt(binning) + " s");
    if (exporting >= kScaleExportSeconds) out.fail("SVG export took " + fmt(exporting) + " s");
    const std::string summary = "1M segments: binning " + fmt(binning) + " s, SVG export " + fmt(exporting) + " s (" +
                                std::to_string(svg.size() / 1000000) + " MB)";
    if (out.ok) {
        out.detail = summary;
    } else {
        out.detail += "; " + summary;
    }
    return out;
}

Outcome bathtub() {
    Outcome out;
    std::mt19937_64 rng(1234);
    std::vector<Segment> segments;
    std::int64_t pos = 0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50000; ++i) {
        Segment s = tt::synthetic_segment(rng, pos);
        pos = s.end;
        for (int t = 3; t < kTracks; ++t) {
            const double r = u(rng);
            s.coverage[static_cast<std::size_t>(t)] = r < 0.45 ? 0.0 : r < 0.85 ? 1.0 : u(rng);
        }
        segments.push_back(s);
    }
    const Dataset ds(std::move(segments), CellType::ESC, true);
    for (int a = 0; a < 6; ++a) {
        const HistGrid h = compute_histogram_bins(ds, AttributeId(a), 50, FilterState::full(ds), CategoryMode::EscCode);
        std::int64_t interior = 0;
        for (int i = 1; i + 1 < h.n; ++i) interior = std::max(interior, h.total(i));
        if (!(h.total(0) > interior && h.total(h.n - 1) > interior)) {
            out.fail(std::string(AttributeId(a).descriptor()) + " histogram is not bathtub shaped");
        }
    }
    if (out.ok) out.detail = "6 coverage histograms: both end bins exceed every interior bin";
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"bin geometry", bin_geometry},
        {"color/position tables", color_position_tables},
        {"esc_code bijection", esc_code_bijection},
        {"oracle binning equivalence", oracle_binning},
        {"alpha invariants", alpha_invariants},
        {"segmentation invariants", segmentation_invariants},
        {"filter round-trip", filter_round_trip},
        {"rendering determinism and structure", rendering},
        {"scale/performance", scale},
        {"bathtub histogram shape", bathtub},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        if (!o.ok) ++failures;
        std::printf("%s  %-38s %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
