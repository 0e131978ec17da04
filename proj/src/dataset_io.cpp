#include "tibi/dataset_io.hpp"

#include <fstream>
#include "json.hpp"
#include <sstream>

#include "text_util.hpp"
#include "tibi/errors.hpp"

namespace tibi {

namespace {

constexpr std::size_t kColumns = 3 + kTracks + 3;

std::vector<std::string> header_columns() {
    std::vector<std::string> cols{"chrom", "start", "end"};
    for (int t = 0; t < kTracks; ++t) cols.push_back(track_label(t));
    cols.insert(cols.end(), {"cpg_density", "length", "esc_code"});
    return cols;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("write failed for " + path.string());
}

std::string write_dataset_tsv(const Dataset& dataset) {
    std::string out;
    out.reserve(64 + dataset.size() * 120);
    out += "#tibi-dataset\treference=";
    out += to_string(dataset.reference());
    out += "\tcpg_available=";
    out += dataset.cpg_available() ? "1" : "0";
    out += '\n';
    const auto cols = header_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += '\t';
        out += cols[i];
    }
    out += '\n';
    auto codes = dataset.categories(CategoryMode::EscCode);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Segment& s = dataset.segments()[i];
        out += s.chrom;
        out += '\t';
        detail::append_int(out, s.start);
        out += '\t';
        detail::append_int(out, s.end);
        for (double c : s.coverage) {
            out += '\t';
            detail::append_double(out, c);
        }
        out += '\t';
        detail::append_double(out, s.cpg_density);
        out += '\t';
        detail::append_int(out, s.length);
        out += '\t';
        detail::append_int(out, codes[i]);
        out += '\n';
    }
    return out;
}

Dataset read_dataset_tsv(std::string_view text) {
    CellType reference = CellType::ESC;
    bool cpg_available = true;
    bool have_header = false;
    const auto expected = header_columns();
    std::vector<Segment> segments;
    std::vector<int> codes;

    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (detail::is_blank(line)) return;
        if (line.front() == '#') {
            for (auto field : detail::split(line.substr(1))) {
                auto eq = field.find('=');
                if (eq == std::string_view::npos) continue;
                auto key = field.substr(0, eq);
                auto value = field.substr(eq + 1);
                if (key == "reference") {
                    reference = parse_cell_type(value);
                } else if (key == "cpg_available") {
                    cpg_available = value != "0";
                }
            }
            return;
        }
        auto fields = detail::split(line);
        if (!have_header) {
            if (fields.size() != kColumns) throw ParseError(line_no, "dataset header has wrong column count");
            for (std::size_t i = 0; i < kColumns; ++i) {
                if (fields[i] != expected[i]) {
                    throw ParseError(line_no, "unexpected column '" + std::string(fields[i]) + "', expected '" +
                                                  expected[i] + "'");
                }
            }
            have_header = true;
            return;
        }
        if (fields.size() != kColumns) throw ParseError(line_no, "expected " + std::to_string(kColumns) + " columns");
        Segment s;
        s.chrom = std::string(fields[0]);
        auto start = detail::parse_int(fields[1]);
        auto end = detail::parse_int(fields[2]);
        if (!start || !end || *start < 0 || *start >= *end) throw ParseError(line_no, "invalid coordinates");
        s.start = *start;
        s.end = *end;
        for (int t = 0; t < kTracks; ++t) {
            auto v = detail::parse_double(fields[static_cast<std::size_t>(3 + t)]);
            if (!v) throw ParseError(line_no, "invalid coverage value");
            s.coverage[static_cast<std::size_t>(t)] = *v;
        }
        auto cpg = detail::parse_double(fields[3 + kTracks]);
        auto length = detail::parse_int(fields[4 + kTracks]);
        auto code = detail::parse_int(fields[5 + kTracks]);
        if (!cpg || !length || !code) throw ParseError(line_no, "invalid numeric field");
        if (*length != s.end - s.start) throw ParseError(line_no, "length does not equal end - start");
        s.cpg_density = *cpg;
        s.length = *length;
        segments.push_back(std::move(s));
        codes.push_back(static_cast<int>(*code));
    });
    if (!have_header && !text.empty() && !segments.empty()) throw ParseError(1, "missing header row");

    Dataset dataset(std::move(segments), reference, cpg_available);
    auto computed = dataset.categories(CategoryMode::EscCode);
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i] != computed[i]) {
            throw ConsistencyError("data row " + std::to_string(i + 1) + ": esc_code column disagrees with the reference coverages");
        }
    }
    return dataset;
}

Dataset load_dataset(const std::filesystem::path& path) {
    try {
        return read_dataset_tsv(read_file(path));
    } catch (const ParseError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    write_file(path, write_dataset_tsv(dataset));
}

Manifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("manifest must be a JSON object");

    auto get_string = [&](const nlohmann::json& obj, const char* key) -> std::optional<std::string> {
        if (!obj.contains(key)) return std::nullopt;
        if (!obj[key].is_string()) throw ConfigError(std::string("manifest field '") + key + "' must be a string");
        return obj[key].get<std::string>();
    };

    Manifest m;
    if (auto ref = get_string(j, "reference")) m.reference = parse_cell_type(*ref);
    if (j.contains("min_length")) {
        if (!j["min_length"].is_number_integer()) throw ConfigError("min_length must be an integer");
        m.min_length = j["min_length"].get<std::int64_t>();
        if (m.min_length < kMinSegmentLength) throw ConfigError("min_length must be at least 200");
    }
    if (auto p = get_string(j, "genome")) m.fasta = resolve(base_dir, *p);
    if (auto p = get_string(j, "chrom_sizes")) m.chrom_sizes = resolve(base_dir, *p);
    if (auto p = get_string(j, "cpg_track")) m.cpg_track = resolve(base_dir, *p);
    if (m.fasta && m.chrom_sizes) throw ConfigError("manifest names both genome and chrom_sizes");
    if (!m.fasta && !m.chrom_sizes) throw ConfigError("manifest needs a genome FASTA or chrom_sizes");

    if (!j.contains("tracks") || !j["tracks"].is_object()) throw ConfigError("manifest lacks a tracks object");
    const auto& tracks = j["tracks"];
    for (int c = 0; c < kCellTypes; ++c) {
        const std::string cell(to_string(static_cast<CellType>(c)));
        if (!tracks.contains(cell) || !tracks[cell].is_object()) throw ConfigError("missing tracks for " + cell);
        for (int mod = 0; mod < kModifications; ++mod) {
            const std::string name(to_string(static_cast<Modification>(mod)));
            auto p = get_string(tracks[cell], name.c_str());
            if (!p) throw ConfigError("missing track " + cell + ":" + name);
            m.tracks[static_cast<std::size_t>(c * kModifications + mod)] = resolve(base_dir, *p);
        }
    }
    return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
    return parse_manifest(read_file(path), path.parent_path());
}

Dataset build_from_manifest(const Manifest& manifest) {
    auto with_path = [](const std::filesystem::path& p, auto&& fn) {
        try {
            return fn(read_file(p));
        } catch (const ParseError& e) {
            throw ConfigError(p.string() + ": " + e.what());
        }
    };
    std::vector<Chromosome> chromosomes =
        manifest.fasta ? with_path(*manifest.fasta, [](const std::string& t) { return parse_fasta(t); })
                       : with_path(*manifest.chrom_sizes, [](const std::string& t) { return parse_chrom_sizes(t); });
    TrackSet tracks;
    for (int t = 0; t < kTracks; ++t) {
        const auto cell = static_cast<CellType>(t / kModifications);
        const auto mod = static_cast<Modification>(t % kModifications);
        tracks.set(cell, mod, with_path(manifest.tracks[static_cast<std::size_t>(t)], [&](const std::string& text) {
                       return parse_region_file(text, cell, mod);
                   }));
    }
    BuildOptions options;
    options.reference = manifest.reference;
    options.min_len = manifest.min_length;
    if (manifest.cpg_track) {
        options.cpg_track = with_path(*manifest.cpg_track, [](const std::string& t) { return parse_cpg_track(t); });
    }
    return build_dataset(chromosomes, tracks, options);
}

}  // namespace tibi
