#pragma once

// Genome segmentation from histone-mark region files.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tibi {

class Dataset;

enum class CellType : std::uint8_t { ESC = 0, MEF = 1, NPC = 2 };
enum class Modification : std::uint8_t { H3K4me3 = 0, H3K27me3 = 1, H3K9me3 = 2 };

inline constexpr int kCellTypes = 3;
inline constexpr int kModifications = 3;
inline constexpr int kTracks = kCellTypes * kModifications;
inline constexpr std::int64_t kMinSegmentLength = 200;

std::string_view to_string(CellType c);
std::string_view to_string(Modification m);
CellType parse_cell_type(std::string_view s);
Modification parse_modification(std::string_view s);

// Position of a (cell, modification) track in Segment::coverage.
constexpr int track_index(CellType c, Modification m) {
    return static_cast<int>(c) * kModifications + static_cast<int>(m);
}

// "ESC:H3K4me3" style label for a track index.
std::string track_label(int track);

// Half-open, 0-based genomic interval [start, end).
struct Interval {
    std::string chrom;
    std::int64_t start = 0;
    std::int64_t end = 0;

    std::int64_t length() const { return end - start; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Region {
    std::string chrom;
    std::int64_t start = 0;
    std::int64_t end = 0;
    CellType cell_type = CellType::ESC;
    Modification modification = Modification::H3K4me3;

    friend bool operator==(const Region&, const Region&) = default;
};

struct Chromosome {
    std::string name;
    std::int64_t length = 0;
    std::optional<std::string> sequence;
};

struct Segment {
    std::string chrom;
    std::int64_t start = 0;
    std::int64_t end = 0;
    // ESC, MEF, NPC x (H3K4me3, H3K27me3, H3K9me3), see track_index().
    std::array<double, kTracks> coverage{};
    double cpg_density = 0.0;
    std::int64_t length = 0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

// One line of a CpG track file: precomputed density over an interval.
struct CpgInterval {
    std::string chrom;
    std::int64_t start = 0;
    std::int64_t end = 0;
    double density = 0.0;
};

// Parses `chrom<TAB>start<TAB>end[...]` lines. '#' lines and blank lines are
// skipped; extra columns (BED name, score, ...) are ignored.
std::vector<Region> parse_region_file(std::string_view text, CellType cell, Modification mod);

// FASTA with one record per chromosome. Sequence is upper-cased.
std::vector<Chromosome> parse_fasta(std::string_view text);

// `chrom<TAB>length` lines (UCSC chrom.sizes).
std::vector<Chromosome> parse_chrom_sizes(std::string_view text);

std::vector<CpgInterval> parse_cpg_track(std::string_view text);

// Projects every region boundary onto its chromosome together with the
// chromosome ends; consecutive boundaries delimit candidate segments and
// candidates shorter than `min_len` are dropped (no merging).
// Result is sorted by (chrom, start).
std::vector<Interval> es_segmentation(const std::vector<Chromosome>& chromosomes,
                                      const std::vector<Region>& reference_regions,
                                      std::int64_t min_len = kMinSegmentLength);

// Union of possibly overlapping intervals on one or more chromosomes, with
// prefix sums so covered-base queries are logarithmic.
class IntervalUnion {
public:
    IntervalUnion() = default;
    explicit IntervalUnion(const std::vector<Region>& regions);

    // Bases of [start, end) on `chrom` covered by the union.
    std::int64_t covered(std::string_view chrom, std::int64_t start, std::int64_t end) const;

private:
    struct Merged {
        std::vector<std::int64_t> starts;
        std::vector<std::int64_t> ends;
        std::vector<std::int64_t> prefix;  // prefix[i] = bases in intervals [0, i)
    };
    std::vector<std::pair<std::string, Merged>> by_chrom_;  // sorted by name

    const Merged* find(std::string_view chrom) const;
};

double coverage_fraction(const Interval& segment, const std::vector<Region>& track_regions);
double coverage_fraction(const Interval& segment, const IntervalUnion& track);

// Non-overlapping "CG" count scanned left to right, divided by floor(len/2).
// Case-insensitive. Sequences shorter than 2 yield 0.
double cpg_density(std::string_view sequence);

// The nine input tracks. An absent track is a configuration error; an empty
// one is fine.
class TrackSet {
public:
    void set(CellType cell, Modification mod, std::vector<Region> regions);
    bool has(CellType cell, Modification mod) const;
    const std::vector<Region>& get(CellType cell, Modification mod) const;
    const std::vector<Region>& get(int track) const;
    bool complete() const;

private:
    std::array<std::optional<std::vector<Region>>, kTracks> tracks_;
};

struct BuildOptions {
    CellType reference = CellType::ESC;
    std::int64_t min_len = kMinSegmentLength;
    // Used for CpG density when the chromosomes carry no sequence.
    std::optional<std::vector<CpgInterval>> cpg_track;
};

Dataset build_dataset(const std::vector<Chromosome>& chromosomes, const TrackSet& tracks,
                      const BuildOptions& options = {});

}  // namespace tibi
