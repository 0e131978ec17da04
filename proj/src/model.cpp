#include "tibi/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "text_util.hpp"
#include "tibi/errors.hpp"

namespace tibi {

namespace {

constexpr std::array<std::string_view, kAttributes> kDescriptors{
    "MEF:H3K4me3", "MEF:H3K27me3", "MEF:H3K9me3", "NPC:H3K4me3",
    "NPC:H3K27me3", "NPC:H3K9me3", "CpG-density", "length"};

constexpr std::array<std::string_view, kEscCodes> kCodeLabels{
    "000 none",
    "001 H3K9me3",
    "010 H3K27me3",
    "011 H3K27me3, H3K9me3",
    "100 H3K4me3",
    "101 H3K4me3, H3K9me3",
    "110 H3K4me3, H3K27me3",
    "111 H3K4me3, H3K27me3, H3K9me3"};

constexpr std::array<std::string_view, kLengthCategories> kLengthLabels{
    "200-400", "401-600", "601-800", "801-1000", ">1000"};

}  // namespace

AttributeId::AttributeId(int index) : index_(index) {
    if (index < 0 || index >= kAttributes) {
        throw DomainError("attribute index " + std::to_string(index) + " outside [0,8)");
    }
}

std::string_view AttributeId::descriptor() const { return kDescriptors[static_cast<std::size_t>(index_)]; }

AttributeId parse_attribute(std::string_view token) {
    token = detail::trim(token);
    if (auto idx = detail::parse_int(token)) return AttributeId(static_cast<int>(*idx));
    for (int i = 0; i < kAttributes; ++i) {
        if (detail::iequals(token, kDescriptors[static_cast<std::size_t>(i)])) return AttributeId(i);
    }
    if (detail::iequals(token, "cpg")) return AttributeId(AttributeId::kCpg);
    if (detail::iequals(token, "len")) return AttributeId(AttributeId::kLength);
    throw DomainError("unknown attribute '" + std::string(token) + "'");
}

std::array<AttributeId, kAttributes> all_attributes() {
    std::array<AttributeId, kAttributes> out;
    for (int i = 0; i < kAttributes; ++i) out[static_cast<std::size_t>(i)] = AttributeId(i);
    return out;
}

std::string_view to_string(CategoryMode mode) { return mode == CategoryMode::EscCode ? "code" : "length"; }

CategoryMode parse_category_mode(std::string_view s) {
    if (detail::iequals(s, "code") || detail::iequals(s, "esc")) return CategoryMode::EscCode;
    if (detail::iequals(s, "length")) return CategoryMode::LengthCategory;
    throw DomainError("unknown category mode '" + std::string(s) + "' (expected code or length)");
}

std::string category_label(CategoryMode mode, int category) {
    if (category < 0 || category >= category_count(mode)) {
        throw DomainError("category " + std::to_string(category) + " out of range");
    }
    return std::string(mode == CategoryMode::EscCode ? kCodeLabels[static_cast<std::size_t>(category)]
                                                     : kLengthLabels[static_cast<std::size_t>(category)]);
}

int esc_code(const std::array<double, 3>& reference_coverage) {
    int code = 0;
    for (double v : reference_coverage) {
        if (v != 0.0 && v != 1.0) throw DomainError("reference coverage must be exactly 0 or 1");
        code = code * 2 + (v == 1.0 ? 1 : 0);
    }
    return code;
}

int length_category(std::int64_t length) {
    if (length < kMinSegmentLength) throw DomainError("segment length " + std::to_string(length) + " below 200");
    if (length <= 400) return 0;
    if (length <= 600) return 1;
    if (length <= 800) return 2;
    if (length <= 1000) return 3;
    return 4;
}

double attribute_value(const Segment& segment, AttributeId attr) {
    if (attr.is_coverage()) return segment.coverage[static_cast<std::size_t>(attr.index() + kModifications)];
    if (attr.index() == AttributeId::kCpg) return segment.cpg_density;
    return static_cast<double>(segment.length);
}

NormalizedValue normalize_for_filter(double value, AttributeId attr, const Dataset& dataset) {
    if (!attr.is_length()) {
        double v = std::clamp(value, 0.0, 1.0);
        return {v, v != value};
    }
    const double lo = static_cast<double>(kMinSegmentLength);
    const double hi = static_cast<double>(dataset.max_length());
    double v = std::clamp(value, lo, hi);
    bool clamped = v != value;
    if (hi <= lo) return {0.0, clamped};
    return {std::log(v / lo) / std::log(hi / lo), clamped};
}

double denormalize_for_filter(double position, AttributeId attr, const Dataset& dataset) {
    position = std::clamp(position, 0.0, 1.0);
    if (!attr.is_length()) return position;
    const double lo = static_cast<double>(kMinSegmentLength);
    const double hi = static_cast<double>(dataset.max_length());
    if (position == 1.0) return hi;
    return lo * std::pow(hi / lo, position);
}

Dataset::Dataset(std::vector<Segment> segments, CellType reference, bool cpg_available)
    : segments_(std::move(segments)), reference_(reference), cpg_available_(cpg_available) {
    const std::size_t n = segments_.size();
    for (auto& col : columns_) col.resize(n);
    codes_.resize(n);
    length_categories_.resize(n);
    const auto ref_offset = static_cast<std::size_t>(static_cast<int>(reference) * kModifications);

    for (std::size_t i = 0; i < n; ++i) {
        const Segment& s = segments_[i];
        if (s.length != s.end - s.start) {
            throw ConsistencyError("segment " + s.chrom + ":" + std::to_string(s.start) + " length mismatch");
        }
        for (double c : s.coverage) {
            if (!(c >= 0.0 && c <= 1.0)) throw DomainError("coverage outside [0,1] in " + s.chrom);
        }
        if (!(s.cpg_density >= 0.0 && s.cpg_density <= 1.0)) {
            throw DomainError("CpG density outside [0,1] in " + s.chrom);
        }
        std::array<double, 3> ref{s.coverage[ref_offset], s.coverage[ref_offset + 1], s.coverage[ref_offset + 2]};
        try {
            codes_[i] = static_cast<std::uint8_t>(esc_code(ref));
        } catch (const DomainError&) {
            throw ConsistencyError("segment " + s.chrom + ":" + std::to_string(s.start) +
                                   " has a fractional reference coverage");
        }
        length_categories_[i] = static_cast<std::uint8_t>(length_category(s.length));
        for (int a = 0; a < kAttributes; ++a) {
            columns_[static_cast<std::size_t>(a)][i] = attribute_value(s, AttributeId(a));
        }
        ++code_totals_[codes_[i]];
        ++length_totals_[length_categories_[i]];
        max_length_ = std::max(max_length_, s.length);
    }

    for (int a = 0; a < kAttributes; ++a) {
        const auto& col = columns_[static_cast<std::size_t>(a)];
        if (col.empty()) continue;
        auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        ranges_[static_cast<std::size_t>(a)] = Range{*mn, *mx};
    }
}

std::span<const std::int64_t> Dataset::category_totals(CategoryMode mode) const {
    if (mode == CategoryMode::EscCode) return code_totals_;
    return length_totals_;
}

}  // namespace tibi
