#pragma once

// Attribute registry, categorical encodings and the immutable Dataset.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tibi/segdata.hpp"

namespace tibi {

inline constexpr int kAttributes = 8;

// One of the eight scatterplot-matrix attributes, in matrix row/column order:
// MEF H3K4me3, MEF H3K27me3, MEF H3K9me3, NPC H3K4me3, NPC H3K27me3,
// NPC H3K9me3, CpG-density, length.
class AttributeId {
public:
    static constexpr int kCpg = 6;
    static constexpr int kLength = 7;

    constexpr AttributeId() = default;
    explicit AttributeId(int index);  // throws DomainError outside [0, 8)

    constexpr int index() const { return index_; }
    bool is_coverage() const { return index_ < kCpg; }
    bool is_length() const { return index_ == kLength; }
    std::string_view descriptor() const;

    friend constexpr bool operator==(AttributeId, AttributeId) = default;

private:
    int index_ = 0;
};

// Accepts an index ("0".."7") or a descriptor ("MEF:H3K4me3", "CpG-density",
// "length"), case-insensitively. Short aliases "cpg" and "len" also work.
AttributeId parse_attribute(std::string_view token);

std::array<AttributeId, kAttributes> all_attributes();

enum class CategoryMode : std::uint8_t { EscCode, LengthCategory };

inline constexpr int kEscCodes = 8;
inline constexpr int kLengthCategories = 5;
inline constexpr int kMaxCategories = 8;

constexpr int category_count(CategoryMode mode) {
    return mode == CategoryMode::EscCode ? kEscCodes : kLengthCategories;
}

std::string_view to_string(CategoryMode mode);  // "code" / "length"
CategoryMode parse_category_mode(std::string_view s);

// "000 none", "100 H3K4me3", ... or "200-400", ..., ">1000".
std::string category_label(CategoryMode mode, int category);

struct Range {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    friend bool operator==(const Range&, const Range&) = default;
};

// Reference coverages (H3K4me3, H3K27me3, H3K9me3), each exactly 0 or 1,
// read as a binary number with H3K4me3 as the high bit.
int esc_code(const std::array<double, 3>& reference_coverage);

// 0: [200,400], 1: (400,600], 2: (600,800], 3: (800,1000], 4: >1000.
int length_category(std::int64_t length);

double attribute_value(const Segment& segment, AttributeId attr);

struct NormalizedValue {
    double value = 0.0;
    bool clamped = false;
};

class Dataset;

// Slider position in [0,1] for an attribute value. Coverages and CpG pass
// through; length is log-scaled between 200 and the dataset's longest segment.
NormalizedValue normalize_for_filter(double value, AttributeId attr, const Dataset& dataset);

// Inverse of normalize_for_filter for an in-range position.
double denormalize_for_filter(double position, AttributeId attr, const Dataset& dataset);

class Dataset {
public:
    Dataset() : Dataset(std::vector<Segment>{}, CellType::ESC, true) {}

    // Throws ConsistencyError when a reference coverage is not exactly 0 or 1
    // and DomainError when a segment is shorter than 200 bp.
    Dataset(std::vector<Segment> segments, CellType reference, bool cpg_available);

    const std::vector<Segment>& segments() const { return segments_; }
    std::size_t size() const { return segments_.size(); }
    bool empty() const { return segments_.empty(); }

    CellType reference() const { return reference_; }
    bool cpg_available() const { return cpg_available_; }

    std::span<const double> column(AttributeId attr) const {
        return columns_[static_cast<std::size_t>(attr.index())];
    }
    std::span<const std::uint8_t> categories(CategoryMode mode) const {
        return mode == CategoryMode::EscCode ? codes_ : length_categories_;
    }
    // #(category) over all segments, indexed by category.
    std::span<const std::int64_t> category_totals(CategoryMode mode) const;

    // Observed (min, max); {0,0} for an empty dataset.
    Range attribute_range(AttributeId attr) const {
        return ranges_[static_cast<std::size_t>(attr.index())];
    }
    std::int64_t max_length() const { return max_length_; }

private:
    std::vector<Segment> segments_;
    CellType reference_;
    bool cpg_available_;
    std::array<std::vector<double>, kAttributes> columns_;
    std::vector<std::uint8_t> codes_;
    std::vector<std::uint8_t> length_categories_;
    std::array<std::int64_t, kEscCodes> code_totals_{};
    std::array<std::int64_t, kLengthCategories> length_totals_{};
    std::array<Range, kAttributes> ranges_{};
    std::int64_t max_length_ = kMinSegmentLength;
};

}  // namespace tibi
