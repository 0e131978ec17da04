#pragma once

// Dataset TSV persistence and the segmentation manifest.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "tibi/model.hpp"

namespace tibi {

// Header row (after an optional "#tibi-dataset" metadata comment):
// chrom start end <9 coverage columns> cpg_density length esc_code
std::string write_dataset_tsv(const Dataset& dataset);
Dataset read_dataset_tsv(std::string_view text);

Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

// JSON manifest naming the nine region files, the genome source and the
// reference cell type. Relative paths resolve against the manifest's folder.
//
//   {
//     "reference": "ESC",
//     "genome": "genome.fa",                 // FASTA, or:
//     "chrom_sizes": "chrom.sizes",          //   lengths only, plus an
//     "cpg_track": "cpg.tsv",                //   optional CpG track
//     "min_length": 200,
//     "tracks": { "ESC": { "H3K4me3": "esc_k4.bed", ... }, "MEF": {...}, "NPC": {...} }
//   }
struct Manifest {
    CellType reference = CellType::ESC;
    std::int64_t min_length = kMinSegmentLength;
    std::optional<std::filesystem::path> fasta;
    std::optional<std::filesystem::path> chrom_sizes;
    std::optional<std::filesystem::path> cpg_track;
    std::array<std::filesystem::path, kTracks> tracks;
};

Manifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

Dataset build_from_manifest(const Manifest& manifest);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace tibi
