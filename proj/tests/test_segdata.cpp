#include <random>

#include "doctest.h"
#include "support/test_support.hpp"
#include "tibi/errors.hpp"
#include "tibi/model.hpp"
#include "tibi/segdata.hpp"

using namespace tibi;
using tibi::testing::oracle_coverage;
using tibi::testing::oracle_cpg;
using tibi::testing::oracle_segmentation;

namespace {

Region esc(const std::string& chrom, std::int64_t s, std::int64_t e, Modification m = Modification::H3K4me3) {
    return Region{chrom, s, e, CellType::ESC, m};
}

std::vector<Chromosome> one_chrom(std::int64_t len) { return {Chromosome{"chr1", len, std::nullopt}}; }

TrackSet empty_tracks() {
    TrackSet t;
    for (int c = 0; c < kCellTypes; ++c)
        for (int m = 0; m < kModifications; ++m) t.set(static_cast<CellType>(c), static_cast<Modification>(m), {});
    return t;
}

}  // namespace

TEST_CASE("parse_region_file maps fields and preserves order") {
    auto regions = parse_region_file("chr1\t100\t500\n", CellType::ESC, Modification::H3K4me3);
    REQUIRE(regions.size() == 1);
    CHECK(regions[0] == Region{"chr1", 100, 500, CellType::ESC, Modification::H3K4me3});

    auto three = parse_region_file("# header\nchr1\t1\t5\n\nchr2\t7\t9\tpeak\t3\nchr1\t0\t2\r\n", CellType::MEF,
                                   Modification::H3K9me3);
    REQUIRE(three.size() == 3);
    CHECK(three[0].start == 1);
    CHECK(three[1].chrom == "chr2");
    CHECK(three[2].end == 2);
    CHECK(three[2].cell_type == CellType::MEF);

    CHECK(parse_region_file("", CellType::ESC, Modification::H3K4me3).empty());
}

TEST_CASE("parse_region_file reports the offending line") {
    try {
        parse_region_file("chr1\t500\t500", CellType::ESC, Modification::H3K4me3);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
    try {
        parse_region_file("chr1\t1\t5\nchr1\tx\t9\n", CellType::ESC, Modification::H3K4me3);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_region_file("chr1\t10", CellType::ESC, Modification::H3K4me3), ParseError);
    CHECK_THROWS_AS(parse_region_file("chr1\t-5\t10", CellType::ESC, Modification::H3K4me3), ParseError);
}

TEST_CASE("es_segmentation projects boundaries including chromosome ends") {
    auto segs = es_segmentation(one_chrom(2000), {esc("chr1", 500, 1000)});
    CHECK(segs == std::vector<Interval>{{"chr1", 0, 500}, {"chr1", 500, 1000}, {"chr1", 1000, 2000}});

    CHECK(es_segmentation(one_chrom(1000), {}) == std::vector<Interval>{{"chr1", 0, 1000}});
}

TEST_CASE("es_segmentation drops short candidates without merging") {
    std::vector<Region> regions{esc("chr1", 100, 500), esc("chr1", 300, 700, Modification::H3K27me3)};
    auto expected = oracle_segmentation(one_chrom(2000), regions, 200);
    // Boundaries {0,100,300,500,700,2000}; (0,100) is eliminated.
    CHECK(expected == std::vector<Interval>{{"chr1", 100, 300}, {"chr1", 300, 500}, {"chr1", 500, 700}, {"chr1", 700, 2000}});
    CHECK(es_segmentation(one_chrom(2000), regions) == expected);
}

TEST_CASE("es_segmentation validates regions") {
    CHECK_THROWS_AS(es_segmentation(one_chrom(1000), {esc("chr1", 900, 1001)}), BoundsError);
    CHECK_THROWS_AS(es_segmentation(one_chrom(1000), {esc("chrX", 0, 10)}), ReferenceError);
    CHECK_THROWS_AS(
        es_segmentation(one_chrom(1000), {esc("chr1", 0, 10), Region{"chr1", 5, 9, CellType::MEF, Modification::H3K4me3}}),
        DomainError);
}

TEST_CASE("es_segmentation sorts chromosomes and matches the per-base oracle") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Chromosome> chroms;
        const int nchrom = std::uniform_int_distribution<int>(1, 5)(rng);
        for (int c = 0; c < nchrom; ++c) {
            chroms.push_back(Chromosome{"chr" + std::to_string(nchrom - c),
                                        std::uniform_int_distribution<std::int64_t>(50, 5000)(rng), std::nullopt});
        }
        std::vector<Region> regions;
        const int nreg = std::uniform_int_distribution<int>(0, 100)(rng);
        for (int i = 0; i < nreg; ++i) {
            const auto& c = chroms[std::uniform_int_distribution<std::size_t>(0, chroms.size() - 1)(rng)];
            if (c.length < 2) continue;
            auto a = std::uniform_int_distribution<std::int64_t>(0, c.length - 1)(rng);
            auto b = std::uniform_int_distribution<std::int64_t>(a + 1, std::min(c.length, a + 800))(rng);
            regions.push_back(esc(c.name, a, b, static_cast<Modification>(i % 3)));
        }
        auto segs = es_segmentation(chroms, regions);
        REQUIRE(segs == oracle_segmentation(chroms, regions, 200));
        for (std::size_t i = 0; i < segs.size(); ++i) {
            CHECK(segs[i].length() >= 200);
            if (i > 0 && segs[i].chrom == segs[i - 1].chrom) CHECK(segs[i - 1].end <= segs[i].start);
            // No reference boundary falls strictly inside a retained segment.
            for (const auto& r : regions) {
                if (r.chrom != segs[i].chrom) continue;
                CHECK_FALSE((r.start > segs[i].start && r.start < segs[i].end));
                CHECK_FALSE((r.end > segs[i].start && r.end < segs[i].end));
            }
        }
    }
}

TEST_CASE("coverage_fraction unions overlapping regions") {
    auto r = [](std::int64_t s, std::int64_t e) { return Region{"chr1", s, e, CellType::MEF, Modification::H3K4me3}; };
    CHECK(coverage_fraction(Interval{"chr1", 100, 300}, {r(100, 500)}) == 1.0);
    CHECK(coverage_fraction(Interval{"chr1", 0, 400}, {r(200, 400)}) == 0.5);

    std::vector<Region> regions{r(0, 300), r(200, 600), r(900, 950)};
    const double expected = oracle_coverage("chr1", 0, 1000, regions);
    CHECK(expected == 0.65);
    CHECK(coverage_fraction(Interval{"chr1", 0, 1000}, regions) == expected);
    CHECK(coverage_fraction(Interval{"chr2", 0, 1000}, regions) == 0.0);
}

TEST_CASE("coverage_fraction agrees with per-base counting on random instances") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Region> regions;
        const int n = std::uniform_int_distribution<int>(0, 10)(rng);
        for (int i = 0; i < n; ++i) {
            auto a = std::uniform_int_distribution<std::int64_t>(0, 1200)(rng);
            auto b = std::uniform_int_distribution<std::int64_t>(a + 1, a + 400)(rng);
            regions.push_back(Region{"chr1", a, b, CellType::NPC, Modification::H3K27me3});
        }
        auto s = std::uniform_int_distribution<std::int64_t>(0, 400)(rng);
        auto e = std::uniform_int_distribution<std::int64_t>(s + 1, s + 1000)(rng);
        REQUIRE(coverage_fraction(Interval{"chr1", s, e}, regions) == oracle_coverage("chr1", s, e, regions));
    }
}

TEST_CASE("cpg_density counts non-overlapping CG pairs") {
    CHECK(cpg_density("CGCGCG") == 1.0);
    CHECK(cpg_density("AAAAAA") == 0.0);
    CHECK(oracle_cpg("ACGTCGAT") == 0.5);
    CHECK(cpg_density("ACGTCGAT") == oracle_cpg("ACGTCGAT"));
    CHECK(cpg_density("cgcg") == 1.0);
    CHECK(cpg_density("CNG") == 0.0);
    CHECK(cpg_density("C") == 0.0);
    CHECK(cpg_density("") == 0.0);
    for (int k = 1; k < 50; ++k) {
        std::string s;
        for (int i = 0; i < k; ++i) s += "CG";
        CHECK(cpg_density(s) == 1.0);
    }

    std::mt19937_64 rng(3);
    const char alphabet[] = "ACGTN";
    for (int trial = 0; trial < 300; ++trial) {
        std::string s(std::uniform_int_distribution<std::size_t>(2, 60)(rng), 'A');
        for (auto& ch : s) ch = alphabet[std::uniform_int_distribution<int>(0, 4)(rng)];
        REQUIRE(cpg_density(s) == oracle_cpg(s));
    }
}

TEST_CASE("parse_fasta and parse_chrom_sizes") {
    auto chroms = parse_fasta(">chr1 description\nACgt\nCG\n>chr2\nNNNN\n");
    REQUIRE(chroms.size() == 2);
    CHECK(chroms[0].name == "chr1");
    CHECK(chroms[0].length == 6);
    CHECK(*chroms[0].sequence == "ACGTCG");
    CHECK(chroms[1].length == 4);
    CHECK_THROWS_AS(parse_fasta("ACGT\n"), ParseError);
    CHECK_THROWS_AS(parse_fasta(">chr1\n>chr2\nAC\n"), ParseError);

    auto sizes = parse_chrom_sizes("chr1\t1000\nchr2\t50\n");
    REQUIRE(sizes.size() == 2);
    CHECK(sizes[1].length == 50);
    CHECK_FALSE(sizes[1].sequence.has_value());
    CHECK_THROWS_AS(parse_chrom_sizes("chr1\t0\n"), ParseError);

    auto cpg = parse_cpg_track("chr1\t0\t100\t0.02\n");
    REQUIRE(cpg.size() == 1);
    CHECK(cpg[0].density == 0.02);
    CHECK_THROWS_AS(parse_cpg_track("chr1\t0\t100\t1.5\n"), ParseError);
}

TEST_CASE("build_dataset computes coverage vectors") {
    auto tracks = empty_tracks();
    tracks.set(CellType::ESC, Modification::H3K4me3, {esc("chr1", 0, 500)});
    auto ds = build_dataset(one_chrom(1000), tracks);
    REQUIRE(ds.size() == 2);
    const auto& a = ds.segments()[0];
    CHECK(a.start == 0);
    CHECK(a.end == 500);
    CHECK(a.coverage == std::array<double, kTracks>{1, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(ds.segments()[1].coverage == std::array<double, kTracks>{});
    CHECK(ds.categories(CategoryMode::EscCode)[0] == 4);
    CHECK(ds.categories(CategoryMode::EscCode)[1] == 0);
    CHECK_FALSE(ds.cpg_available());

    const Region mef{"chr1", 250, 750, CellType::MEF, Modification::H3K4me3};
    tracks.set(CellType::MEF, Modification::H3K4me3, {mef});
    auto with_mef = build_dataset(one_chrom(1000), tracks);
    const double expected = oracle_coverage("chr1", 0, 500, {mef});
    CHECK(expected == 0.5);
    CHECK(with_mef.segments()[0].coverage[track_index(CellType::MEF, Modification::H3K4me3)] == expected);
}

TEST_CASE("build_dataset with empty tracks yields one code-0 segment per chromosome") {
    auto ds = build_dataset({Chromosome{"chr1", 1000, std::nullopt}, Chromosome{"chr2", 300, std::nullopt}},
                            empty_tracks());
    REQUIRE(ds.size() == 2);
    CHECK(ds.category_totals(CategoryMode::EscCode)[0] == 2);
}

TEST_CASE("build_dataset CpG sources") {
    std::string seq(1000, 'A');
    for (int i = 0; i < 100; ++i) seq[static_cast<std::size_t>(2 * i)] = 'C', seq[static_cast<std::size_t>(2 * i + 1)] = 'G';
    auto tracks = empty_tracks();
    tracks.set(CellType::ESC, Modification::H3K9me3, {esc("chr1", 0, 400, Modification::H3K9me3)});
    auto ds = build_dataset({Chromosome{"chr1", 1000, seq}}, tracks);
    REQUIRE(ds.size() == 2);
    CHECK(ds.cpg_available());
    CHECK(ds.segments()[0].cpg_density == oracle_cpg(seq.substr(0, 400)));
    CHECK(ds.segments()[1].cpg_density == 0.0);

    BuildOptions opts;
    opts.cpg_track = std::vector<CpgInterval>{{"chr1", 0, 200, 0.1}, {"chr1", 200, 400, 0.3}};
    auto from_track = build_dataset(one_chrom(1000), tracks, opts);
    CHECK(from_track.cpg_available());
    CHECK(from_track.segments()[0].cpg_density == doctest::Approx(0.2));
    CHECK(from_track.segments()[1].cpg_density == 0.0);
}

TEST_CASE("build_dataset reference coverages are always exactly 0 or 1") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto tracks = empty_tracks();
        for (int m = 0; m < kModifications; ++m) {
            std::vector<Region> regions;
            for (int i = 0; i < 10; ++i) {
                auto a = std::uniform_int_distribution<std::int64_t>(0, 4000)(rng);
                auto b = std::uniform_int_distribution<std::int64_t>(a + 1, std::min<std::int64_t>(5000, a + 900))(rng);
                regions.push_back(esc("chr1", a, b, static_cast<Modification>(m)));
            }
            tracks.set(CellType::ESC, static_cast<Modification>(m), regions);
        }
        auto ds = build_dataset(one_chrom(5000), tracks);
        for (const auto& s : ds.segments()) {
            for (int t = 0; t < 3; ++t) {
                const double v = s.coverage[static_cast<std::size_t>(t)];
                CHECK((v == 0.0 || v == 1.0));
            }
        }
    }
}

TEST_CASE("build_dataset configuration errors") {
    TrackSet partial;
    partial.set(CellType::ESC, Modification::H3K4me3, {});
    CHECK_THROWS_AS(build_dataset(one_chrom(1000), partial), ConfigError);

    auto tracks = empty_tracks();
    tracks.set(CellType::NPC, Modification::H3K4me3, {Region{"chr1", 0, 2000, CellType::NPC, Modification::H3K4me3}});
    CHECK_THROWS_AS(build_dataset(one_chrom(1000), tracks), BoundsError);
    CHECK_THROWS_AS(build_dataset({Chromosome{"chr1", 10, std::string("ACG")}}, empty_tracks()), ConfigError);
}
