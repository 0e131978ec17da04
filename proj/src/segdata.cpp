#include "tibi/segdata.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "text_util.hpp"
#include "tibi/errors.hpp"
#include "tibi/model.hpp"

namespace tibi {

namespace {

constexpr std::array<std::string_view, kCellTypes> kCellNames{"ESC", "MEF", "NPC"};
constexpr std::array<std::string_view, kModifications> kModNames{"H3K4me3", "H3K27me3", "H3K9me3"};

std::unordered_map<std::string, std::int64_t> chromosome_lengths(const std::vector<Chromosome>& chromosomes) {
    std::unordered_map<std::string, std::int64_t> lengths;
    for (const auto& c : chromosomes) {
        if (c.name.empty()) throw ConfigError("chromosome with empty name");
        if (c.length <= 0) throw ConfigError("chromosome " + c.name + " has non-positive length");
        if (c.sequence && static_cast<std::int64_t>(c.sequence->size()) != c.length) {
            throw ConfigError("chromosome " + c.name + ": sequence length differs from declared length");
        }
        if (!lengths.emplace(c.name, c.length).second) {
            throw ConfigError("duplicate chromosome " + c.name);
        }
    }
    return lengths;
}

void check_region(const Region& r, const std::unordered_map<std::string, std::int64_t>& lengths) {
    auto it = lengths.find(r.chrom);
    if (it == lengths.end()) throw ReferenceError("unknown chromosome " + r.chrom);
    if (r.start < 0 || r.end > it->second || r.start >= r.end) {
        throw BoundsError("region " + r.chrom + ":" + std::to_string(r.start) + "-" + std::to_string(r.end) +
                          " outside chromosome of length " + std::to_string(it->second));
    }
}

// CpG track lookup: intervals per chromosome sorted by start, with a running
// maximum of ends so overlapping intervals are still found by binary search.
class CpgLookup {
public:
    explicit CpgLookup(const std::vector<CpgInterval>& track) {
        for (const auto& iv : track) by_chrom_[iv.chrom].items.push_back(iv);
        for (auto& [name, entry] : by_chrom_) {
            auto& items = entry.items;
            std::sort(items.begin(), items.end(),
                      [](const CpgInterval& a, const CpgInterval& b) { return a.start < b.start; });
            std::int64_t running = 0;
            entry.max_end.reserve(items.size());
            for (const auto& iv : items) {
                running = std::max(running, iv.end);
                entry.max_end.push_back(running);
            }
        }
    }

    // Overlap-weighted mean density over [start, end); 0 if nothing overlaps.
    double density(const std::string& chrom, std::int64_t start, std::int64_t end) const {
        auto it = by_chrom_.find(chrom);
        if (it == by_chrom_.end()) return 0.0;
        const auto& entry = it->second;
        auto first = std::upper_bound(entry.max_end.begin(), entry.max_end.end(), start);
        double weighted = 0.0;
        std::int64_t bases = 0;
        for (auto i = static_cast<std::size_t>(first - entry.max_end.begin()); i < entry.items.size(); ++i) {
            const auto& iv = entry.items[i];
            if (iv.start >= end) break;
            std::int64_t overlap = std::min(end, iv.end) - std::max(start, iv.start);
            if (overlap <= 0) continue;
            weighted += static_cast<double>(overlap) * iv.density;
            bases += overlap;
        }
        return bases == 0 ? 0.0 : weighted / static_cast<double>(bases);
    }

private:
    struct Entry {
        std::vector<CpgInterval> items;
        std::vector<std::int64_t> max_end;
    };
    std::unordered_map<std::string, Entry> by_chrom_;
};

}  // namespace

std::string_view to_string(CellType c) { return kCellNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(Modification m) { return kModNames[static_cast<std::size_t>(m)]; }

CellType parse_cell_type(std::string_view s) {
    for (int i = 0; i < kCellTypes; ++i) {
        if (detail::iequals(s, kCellNames[static_cast<std::size_t>(i)])) return static_cast<CellType>(i);
    }
    throw ConfigError("unknown cell type '" + std::string(s) + "'");
}

Modification parse_modification(std::string_view s) {
    for (int i = 0; i < kModifications; ++i) {
        if (detail::iequals(s, kModNames[static_cast<std::size_t>(i)])) return static_cast<Modification>(i);
    }
    throw ConfigError("unknown modification '" + std::string(s) + "'");
}

std::string track_label(int track) {
    return std::string(kCellNames[static_cast<std::size_t>(track / kModifications)]) + ":" +
           std::string(kModNames[static_cast<std::size_t>(track % kModifications)]);
}

std::vector<Region> parse_region_file(std::string_view text, CellType cell, Modification mod) {
    std::vector<Region> regions;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (detail::is_blank(line) || line.front() == '#') return;
        // UCSC browser/track header lines
        if (line.starts_with("track") || line.starts_with("browser")) return;
        auto fields = detail::split(line);
        if (fields.size() < 3) throw ParseError(line_no, "expected chrom, start, end");
        auto start = detail::parse_int(fields[1]);
        auto end = detail::parse_int(fields[2]);
        if (!start || !end) throw ParseError(line_no, "non-integer coordinate");
        if (*start < 0) throw ParseError(line_no, "negative start");
        if (*start >= *end) throw ParseError(line_no, "start must be less than end");
        auto chrom = detail::trim(fields[0]);
        if (chrom.empty()) throw ParseError(line_no, "empty chromosome name");
        regions.push_back(Region{std::string(chrom), *start, *end, cell, mod});
    });
    return regions;
}

std::vector<Chromosome> parse_fasta(std::string_view text) {
    std::vector<Chromosome> out;
    std::size_t header_line = 0;
    auto finish = [&] {
        if (out.empty()) return;
        auto& c = out.back();
        c.length = static_cast<std::int64_t>(c.sequence->size());
        if (c.length == 0) throw ParseError(header_line, "empty sequence for " + c.name);
    };
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (line.empty() || line.front() == ';') return;
        if (line.front() == '>') {
            finish();
            auto name = detail::trim(line.substr(1));
            name = name.substr(0, name.find_first_of(" \t"));
            if (name.empty()) throw ParseError(line_no, "FASTA header without a name");
            out.push_back(Chromosome{std::string(name), 0, std::string{}});
            header_line = line_no;
            return;
        }
        if (out.empty()) throw ParseError(line_no, "sequence data before first FASTA header");
        auto& seq = *out.back().sequence;
        for (char ch : line) {
            if (ch == ' ' || ch == '\t') continue;
            seq.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
        }
    });
    finish();
    return out;
}

std::vector<Chromosome> parse_chrom_sizes(std::string_view text) {
    std::vector<Chromosome> out;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (detail::is_blank(line) || line.front() == '#') return;
        auto fields = detail::split(line);
        if (fields.size() < 2) throw ParseError(line_no, "expected chrom and length");
        auto len = detail::parse_int(fields[1]);
        if (!len || *len <= 0) throw ParseError(line_no, "invalid chromosome length");
        out.push_back(Chromosome{std::string(detail::trim(fields[0])), *len, std::nullopt});
    });
    return out;
}

std::vector<CpgInterval> parse_cpg_track(std::string_view text) {
    std::vector<CpgInterval> out;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (detail::is_blank(line) || line.front() == '#') return;
        auto fields = detail::split(line);
        if (fields.size() < 4) throw ParseError(line_no, "expected chrom, start, end, density");
        auto start = detail::parse_int(fields[1]);
        auto end = detail::parse_int(fields[2]);
        auto density = detail::parse_double(fields[3]);
        if (!start || !end) throw ParseError(line_no, "non-integer coordinate");
        if (*start < 0 || *start >= *end) throw ParseError(line_no, "invalid interval");
        if (!density || *density < 0.0 || *density > 1.0) throw ParseError(line_no, "density must be in [0,1]");
        out.push_back(CpgInterval{std::string(detail::trim(fields[0])), *start, *end, *density});
    });
    return out;
}

std::vector<Interval> es_segmentation(const std::vector<Chromosome>& chromosomes,
                                      const std::vector<Region>& reference_regions, std::int64_t min_len) {
    auto lengths = chromosome_lengths(chromosomes);
    if (!reference_regions.empty()) {
        CellType cell = reference_regions.front().cell_type;
        for (const auto& r : reference_regions) {
            if (r.cell_type != cell) throw DomainError("reference regions span more than one cell type");
        }
    }

    std::unordered_map<std::string, std::vector<std::int64_t>> boundaries;
    for (const auto& c : chromosomes) boundaries[c.name] = {0, c.length};
    for (const auto& r : reference_regions) {
        check_region(r, lengths);
        auto& b = boundaries[r.chrom];
        b.push_back(r.start);
        b.push_back(r.end);
    }

    std::vector<const Chromosome*> order;
    for (const auto& c : chromosomes) order.push_back(&c);
    std::sort(order.begin(), order.end(), [](const Chromosome* a, const Chromosome* b) { return a->name < b->name; });

    std::vector<Interval> segments;
    for (const Chromosome* c : order) {
        auto& b = boundaries[c->name];
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        for (std::size_t i = 0; i + 1 < b.size(); ++i) {
            if (b[i + 1] - b[i] >= min_len) segments.push_back(Interval{c->name, b[i], b[i + 1]});
        }
    }
    return segments;
}

IntervalUnion::IntervalUnion(const std::vector<Region>& regions) {
    std::unordered_map<std::string, std::vector<std::pair<std::int64_t, std::int64_t>>> grouped;
    for (const auto& r : regions) grouped[r.chrom].emplace_back(r.start, r.end);
    for (auto& [name, ivs] : grouped) {
        std::sort(ivs.begin(), ivs.end());
        Merged m;
        for (const auto& [s, e] : ivs) {
            if (!m.ends.empty() && s <= m.ends.back()) {
                m.ends.back() = std::max(m.ends.back(), e);
            } else {
                m.starts.push_back(s);
                m.ends.push_back(e);
            }
        }
        m.prefix.resize(m.starts.size() + 1, 0);
        for (std::size_t i = 0; i < m.starts.size(); ++i) {
            m.prefix[i + 1] = m.prefix[i] + (m.ends[i] - m.starts[i]);
        }
        by_chrom_.emplace_back(name, std::move(m));
    }
    std::sort(by_chrom_.begin(), by_chrom_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
}

const IntervalUnion::Merged* IntervalUnion::find(std::string_view chrom) const {
    auto it = std::lower_bound(by_chrom_.begin(), by_chrom_.end(), chrom,
                               [](const auto& entry, std::string_view key) { return entry.first < key; });
    if (it == by_chrom_.end() || it->first != chrom) return nullptr;
    return &it->second;
}

std::int64_t IntervalUnion::covered(std::string_view chrom, std::int64_t start, std::int64_t end) const {
    const Merged* m = find(chrom);
    if (m == nullptr || start >= end) return 0;
    // First merged interval ending after `start`, first starting at or after `end`.
    auto lo = static_cast<std::size_t>(std::upper_bound(m->ends.begin(), m->ends.end(), start) - m->ends.begin());
    auto hi = static_cast<std::size_t>(std::lower_bound(m->starts.begin(), m->starts.end(), end) - m->starts.begin());
    if (lo >= hi) return 0;
    std::int64_t total = m->prefix[hi] - m->prefix[lo];
    total -= std::max<std::int64_t>(0, start - m->starts[lo]);
    total -= std::max<std::int64_t>(0, m->ends[hi - 1] - end);
    return total;
}

double coverage_fraction(const Interval& segment, const IntervalUnion& track) {
    if (segment.length() <= 0) return 0.0;
    return static_cast<double>(track.covered(segment.chrom, segment.start, segment.end)) /
           static_cast<double>(segment.length());
}

double coverage_fraction(const Interval& segment, const std::vector<Region>& track_regions) {
    return coverage_fraction(segment, IntervalUnion(track_regions));
}

double cpg_density(std::string_view sequence) {
    if (sequence.size() < 2) return 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + 1 < sequence.size();) {
        char a = static_cast<char>(std::toupper(static_cast<unsigned char>(sequence[i])));
        char b = static_cast<char>(std::toupper(static_cast<unsigned char>(sequence[i + 1])));
        if (a == 'C' && b == 'G') {
            ++count;
            i += 2;
        } else {
            ++i;
        }
    }
    return static_cast<double>(count) / static_cast<double>(sequence.size() / 2);
}

void TrackSet::set(CellType cell, Modification mod, std::vector<Region> regions) {
    tracks_[static_cast<std::size_t>(track_index(cell, mod))] = std::move(regions);
}

bool TrackSet::has(CellType cell, Modification mod) const {
    return tracks_[static_cast<std::size_t>(track_index(cell, mod))].has_value();
}

const std::vector<Region>& TrackSet::get(int track) const {
    const auto& t = tracks_.at(static_cast<std::size_t>(track));
    if (!t) throw ConfigError("missing track " + track_label(track));
    return *t;
}

const std::vector<Region>& TrackSet::get(CellType cell, Modification mod) const {
    return get(track_index(cell, mod));
}

bool TrackSet::complete() const {
    return std::all_of(tracks_.begin(), tracks_.end(), [](const auto& t) { return t.has_value(); });
}

Dataset build_dataset(const std::vector<Chromosome>& chromosomes, const TrackSet& tracks,
                      const BuildOptions& options) {
    for (int t = 0; t < kTracks; ++t) (void)tracks.get(t);  // throws on a missing track

    auto lengths = chromosome_lengths(chromosomes);
    std::vector<Region> reference;
    for (int m = 0; m < kModifications; ++m) {
        const auto& regions = tracks.get(options.reference, static_cast<Modification>(m));
        reference.insert(reference.end(), regions.begin(), regions.end());
    }
    auto intervals = es_segmentation(chromosomes, reference, options.min_len);

    std::array<IntervalUnion, kTracks> unions;
    for (int t = 0; t < kTracks; ++t) {
        const auto& regions = tracks.get(t);
        for (const auto& r : regions) check_region(r, lengths);
        unions[static_cast<std::size_t>(t)] = IntervalUnion(regions);
    }

    bool have_sequence =
        !chromosomes.empty() && std::all_of(chromosomes.begin(), chromosomes.end(),
                                            [](const Chromosome& c) { return c.sequence.has_value(); });
    std::optional<CpgLookup> cpg_lookup;
    if (!have_sequence && options.cpg_track) cpg_lookup.emplace(*options.cpg_track);
    std::unordered_map<std::string, const Chromosome*> by_name;
    for (const auto& c : chromosomes) by_name[c.name] = &c;

    std::vector<Segment> segments;
    segments.reserve(intervals.size());
    for (const auto& iv : intervals) {
        Segment s;
        s.chrom = iv.chrom;
        s.start = iv.start;
        s.end = iv.end;
        s.length = iv.length();
        for (int t = 0; t < kTracks; ++t) {
            s.coverage[static_cast<std::size_t>(t)] = coverage_fraction(iv, unions[static_cast<std::size_t>(t)]);
        }
        if (have_sequence) {
            const auto& seq = *by_name.at(iv.chrom)->sequence;
            s.cpg_density = cpg_density(std::string_view(seq).substr(static_cast<std::size_t>(iv.start),
                                                                     static_cast<std::size_t>(iv.length())));
        } else if (cpg_lookup) {
            s.cpg_density = cpg_lookup->density(iv.chrom, iv.start, iv.end);
        }
        segments.push_back(std::move(s));
    }
    // Dataset re-checks that the reference coverages are exactly 0 or 1.
    return Dataset(std::move(segments), options.reference, have_sequence || cpg_lookup.has_value());
}

}  // namespace tibi
