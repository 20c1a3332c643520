#include <cmath>
#include <fstream>
#include <string>

#include "doctest.h"

#include "ensreg/csv.hpp"
#include "ensreg/image_io.hpp"
#include "ensreg/synth.hpp"
#include "test_util.hpp"

using namespace ensreg;
using test_util::slurp;
using test_util::TempDir;

namespace {

void spit(const std::filesystem::path& p, const std::string& data) {
    std::ofstream out(p, std::ios::binary);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

} // namespace

TEST_CASE("P2 ASCII parsing") {
    TempDir dir("pgm");
    const auto path = dir.path() / "a.pgm";
    spit(path, "P2\n2 2\n255\n0 1\n2 3");
    const Image img = read_pgm(path);
    CHECK(img.width == 2);
    CHECK(img.height == 2);
    CHECK(img.pixels == std::vector<double>{0, 1, 2, 3});
}

TEST_CASE("P2 and P5 parses of the same pixels agree") {
    TempDir dir("pgm");
    const auto p2 = dir.path() / "a.pgm";
    const auto p5 = dir.path() / "b.pgm";
    spit(p2, "P2\n2 2\n255\n0 1\n2 3");
    spit(p5, std::string("P5\n2 2\n255\n") + '\0' + '\1' + '\2' + '\3');
    const Image a = read_pgm(p2);
    const Image b = read_pgm(p5);
    CHECK(a.pixels == b.pixels);
}

TEST_CASE("16-bit P5 samples are big-endian") {
    TempDir dir("pgm");
    const auto path = dir.path() / "wide.pgm";
    std::string raster;
    raster += static_cast<char>(1); // 256 + 44 = 300
    raster += static_cast<char>(44);
    raster += static_cast<char>(0);
    raster += static_cast<char>(7);
    spit(path, "P5\n2 1\n300\n" + raster);
    const Image img = read_pgm(path);
    CHECK(img.pixels == std::vector<double>{300, 7});
}

TEST_CASE("PGM parse errors carry byte offsets") {
    TempDir dir("pgm");

    const auto bad_magic = dir.path() / "magic.pgm";
    spit(bad_magic, "P7\n2 2\n255\n0 0 0 0");
    CHECK_THROWS_WITH_AS(read_pgm(bad_magic),
                         doctest::Contains("unsupported magic"), parse_error);

    const auto big_maxval = dir.path() / "maxval.pgm";
    spit(big_maxval, "P2\n2 2\n70000\n0 0 0 0");
    try {
        read_pgm(big_maxval);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(std::string(e.what()).find("maxval") != std::string::npos);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
        CHECK(e.byte_offset > 0);
    }

    const auto truncated = dir.path() / "short.pgm";
    spit(truncated, std::string("P5\n2 2\n255\n") + '\0' + '\1');
    CHECK_THROWS_AS(read_pgm(truncated), parse_error);

    const auto malformed = dir.path() / "weird.pgm";
    spit(malformed, "P2\nab cd\n255\n");
    CHECK_THROWS_AS(read_pgm(malformed), parse_error);

    CHECK_THROWS_AS(read_pgm(dir.path() / "missing.pgm"), io_error);
}

TEST_CASE("PGM write-read round trip is exact on byte images") {
    TempDir dir("pgm");
    NoiseGenerator gen(91);
    for (int rep = 0; rep < 5; ++rep) {
        const int w = 1 + static_cast<int>(gen.next_u32() % 20);
        const int h = 1 + static_cast<int>(gen.next_u32() % 20);
        Image img(w, h);
        for (double& p : img.pixels) p = gen.next_u32() % 256;
        const auto path = dir.path() / "round.pgm";
        write_pgm(img, path);
        const Image back = read_pgm(path);
        CHECK(back.pixels == img.pixels);
    }
}

TEST_CASE("heat map stops and interpolation") {
    CHECK(heatmap_color(0.0) == std::array<int, 3>{0, 0, 128});
    CHECK(heatmap_color(0.25) == std::array<int, 3>{0, 128, 255});
    CHECK(heatmap_color(0.5) == std::array<int, 3>{0, 255, 0});
    CHECK(heatmap_color(0.75) == std::array<int, 3>{255, 255, 0});
    CHECK(heatmap_color(1.0) == std::array<int, 3>{255, 0, 0});
    // Between the first two stops, round half up: blue = 191.5 -> 192.
    CHECK(heatmap_color(0.125) == std::array<int, 3>{0, 64, 192});

    TempDir dir("ppm");
    const ScalarField flat(2, 2, 5.0);
    const auto path = dir.path() / "flat.ppm";
    write_ppm_heatmap(flat, path, 5.0, 6.0); // every voxel at t = 0
    const std::string data = slurp(path);
    const std::string raster = data.substr(data.size() - 12);
    for (int i = 0; i < 4; ++i) {
        CHECK(static_cast<unsigned char>(raster[3 * i + 0]) == 0);
        CHECK(static_cast<unsigned char>(raster[3 * i + 1]) == 0);
        CHECK(static_cast<unsigned char>(raster[3 * i + 2]) == 128);
    }
}

TEST_CASE("heat map rejects an empty range") {
    TempDir dir("ppm");
    const ScalarField flat(2, 2, 5.0);
    CHECK_THROWS_AS(write_ppm_heatmap(flat, dir.path() / "bad.ppm", 1.0, 1.0),
                    invalid_argument_error);
}

TEST_CASE("scalar field CSV format is exact") {
    TempDir dir("csv");
    ScalarField field(1, 1, 2.0);
    const auto path = dir.path() / "field.csv";
    write_csv(field, path);
    CHECK(slurp(path) == "x,y,value\n0,0,2.000000000\n");
}

TEST_CASE("ensemble CSV rows for the 50/200 cell") {
    TempDir dir("csv");
    ScalarEnsembleField field(1, 1);
    field.cell(0, 0) = {{50.0, 0.7}, {200.0, 0.3}};
    const auto path = dir.path() / "ens.csv";
    write_csv(field, path);
    CHECK(slurp(path) ==
          "x,y,value,weight\n"
          "0,0,50.000000000,0.700000000\n"
          "0,0,200.000000000,0.300000000\n");
}

TEST_CASE("vector ensemble CSV encodes components with a semicolon") {
    TempDir dir("csv");
    VectorEnsembleField field(1, 1);
    field.cell(0, 0) = {{Vec2{-1.0, 2.0}, 1.0}};
    const auto path = dir.path() / "vec.csv";
    write_csv(field, path);
    CHECK(slurp(path) == "x,y,value,weight\n0,0,-1.000000000;2.000000000,1.000000000\n");
}

TEST_CASE("posterior CSV round trip") {
    TempDir dir("csv");
    NoiseGenerator gen(97);
    const PosteriorField post = test_util::random_posterior(gen, 5, 4, 7);
    const auto path = dir.path() / "post.csv";
    write_csv(post, path);
    const PosteriorField back = read_posterior_csv(path);
    REQUIRE(back.width == 5);
    REQUIRE(back.height == 4);
    REQUIRE(back.num_displacements == 7);
    for (std::size_t i = 0; i < post.probs.size(); ++i) {
        CHECK(std::abs(back.probs[i] - post.probs[i]) <= 1e-8);
    }
    validate(back);
}

TEST_CASE("posterior CSV rejects incomplete and invalid data") {
    TempDir dir("csv");
    const auto path = dir.path() / "bad.csv";
    spit(path, "x,y,k,p\n0,0,0,0.5\n0,0,1,0.5\n1,0,0,1.0\n");
    CHECK_THROWS_AS(read_posterior_csv(path), parse_error); // (1,0,k=1) missing

    const auto negative = dir.path() / "neg.csv";
    spit(negative, "x,y,k,p\n0,0,0,1.5\n0,0,1,-0.5\n");
    CHECK_THROWS_AS(read_posterior_csv(negative), error);

    const auto junk = dir.path() / "junk.csv";
    spit(junk, "x,y,k,p\n0,0,zero,1.0\n");
    CHECK_THROWS_AS(read_posterior_csv(junk), parse_error);
}

TEST_CASE("scalar ensemble CSV round trip") {
    TempDir dir("csv");
    ScalarEnsembleField field(2, 1);
    field.cell(0, 0) = {{50.0, 0.7}, {200.0, 0.3}};
    field.cell(1, 0) = {{10.0, 1.0}};
    const auto path = dir.path() / "ens.csv";
    write_csv(field, path);
    const ScalarEnsembleField back = read_scalar_ensemble_csv(path);
    REQUIRE(back.cell(0, 0).size() == 2);
    CHECK(std::abs(back.cell(0, 0)[0].weight - 0.7) <= 1e-8);
    CHECK(back.cell(1, 0)[0].value == 10.0);

    const auto vec = dir.path() / "vec.csv";
    spit(vec, "x,y,value,weight\n0,0,1.0;2.0,1.0\n");
    CHECK_THROWS_AS(read_scalar_ensemble_csv(vec), parse_error);
}

TEST_CASE("failed writes leave no partial output") {
    const ScalarField field(2, 2, 1.0);
    CHECK_THROWS_AS(write_csv(field, "/nonexistent_dir_zz/out.csv"), io_error);
    CHECK(!std::filesystem::exists("/nonexistent_dir_zz/out.csv"));
}
