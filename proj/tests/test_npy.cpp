#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "lfs/errors.hpp"
#include "lfs/npy.hpp"

#include "testutil.hpp"

using namespace lfs;

namespace {

// Files produced by the reference writer (numpy format version 1.0) for
// [[0, 0.5, 1], [-1.25, 3.5, -2]] float32 and [1..6] float32.
const std::string kGolden2x3Hex =
    "934e554d5059010076007b276465736372273a20273c6634272c2027666f727472616e5f6f7264657227"
    "3a2046616c73652c20277368617065273a2028322c2033292c207d20202020202020202020202020202020"
    "2020202020202020202020202020202020202020202020202020202020202020202020202020202020200a"
    "000000000000003f0000803f0000a0bf00006040000000c0";
const std::string kGolden1dHex =
    "934e554d5059010076007b276465736372273a20273c6634272c2027666f727472616e5f6f7264657227"
    "3a2046616c73652c20277368617065273a2028362c292c207d202020202020202020202020202020202020"
    "2020202020202020202020202020202020202020202020202020202020202020202020202020202020200a"
    "0000803f0000004000004040000080400000a0400000c040";

npy::Array golden_2x3() {
    npy::Array a;
    a.shape = {2, 3};
    a.data = {0.0f, 0.5f, 1.0f, -1.25f, 3.5f, -2.0f};
    return a;
}

} // namespace

TEST_CASE("encode matches the reference writer byte for byte") {
    const auto bytes = npy::encode(golden_2x3());
    CHECK(bytes == testutil::from_hex(kGolden2x3Hex));
    CHECK(bytes.size() == 152);

    npy::Array v;
    v.shape = {6};
    v.data = {1, 2, 3, 4, 5, 6};
    CHECK(npy::encode(v) == testutil::from_hex(kGolden1dHex));
}

TEST_CASE("decode reads reference bytes back") {
    const auto a = npy::decode(testutil::from_hex(kGolden2x3Hex));
    CHECK(a.shape == std::vector<size_t>{2, 3});
    CHECK(a.data == golden_2x3().data);
    CHECK(a.rows() == 2);
    CHECK(a.cols() == 3);

    const auto v = npy::decode(testutil::from_hex(kGolden1dHex));
    CHECK(v.shape == std::vector<size_t>{6});
    CHECK(v.data == std::vector<float>{1, 2, 3, 4, 5, 6});
    CHECK(v.cols() == 1);
}

TEST_CASE("file round-trip is byte-identical") {
    testutil::TempDir tmp;
    const auto path = tmp / "a.npy";
    npy::save(path, golden_2x3());
    CHECK(testutil::read_bytes(path) == testutil::from_hex(kGolden2x3Hex));
    const auto back = npy::load(path);
    CHECK(back.shape == golden_2x3().shape);
    CHECK(back.data == golden_2x3().data);
    CHECK_THROWS_AS(npy::load(tmp / "missing.npy"), IoError);
}

TEST_CASE("decode rejects malformed containers") {
    const auto golden = testutil::from_hex(kGolden2x3Hex);

    auto bad_magic = golden;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(npy::decode(bad_magic), FormatError);

    auto bad_version = golden;
    bad_version[6] = 2;
    CHECK_THROWS_AS(npy::decode(bad_version), FormatError);

    auto short_prefix = golden;
    short_prefix.resize(8);
    CHECK_THROWS_AS(npy::decode(short_prefix), FormatError);

    auto short_header = golden;
    short_header.resize(50);
    CHECK_THROWS_AS(npy::decode(short_header), FormatError);

    auto truncated_data = golden;
    truncated_data.resize(golden.size() - 4);
    CHECK_THROWS_AS(npy::decode(truncated_data), FormatError);

    auto trailing = golden;
    trailing.insert(trailing.end(), {0, 0, 0, 0});
    CHECK_THROWS_AS(npy::decode(trailing), FormatError);

    // descr '<f4' -> '<f8' in the header text (same length)
    auto f8 = golden;
    for (size_t i = 0; i + 2 < f8.size(); ++i)
        if (f8[i] == '<' && f8[i + 1] == 'f' && f8[i + 2] == '4') f8[i + 2] = '8';
    CHECK_THROWS_AS(npy::decode(f8), FormatError);

    // 'False' -> 'True ' (same length) for fortran_order
    auto fortran = golden;
    const std::string text(fortran.begin(), fortran.end());
    const size_t at = text.find("False");
    REQUIRE(at != std::string::npos);
    const char* rep = "True ";
    for (size_t i = 0; i < 5; ++i) fortran[at + i] = static_cast<unsigned char>(rep[i]);
    CHECK_THROWS_AS(npy::decode(fortran), FormatError);
}

TEST_CASE("encode validates shape against data") {
    npy::Array a;
    a.shape = {2, 3};
    a.data = {1, 2, 3}; // 3 != 6
    CHECK_THROWS_AS(npy::encode(a), InvalidArgument);
    a.shape = {2, 3, 1};
    a.data.assign(6, 0.0f);
    CHECK_THROWS_AS(npy::encode(a), InvalidArgument);
    a.shape = {};
    CHECK_THROWS_AS(npy::encode(a), InvalidArgument);
}

TEST_CASE("matrix and latent conversions narrow explicitly to float32") {
    Matrix m(2, 2);
    m(0, 0) = 0.1; // not representable exactly in f4
    m(0, 1) = -2.0;
    m(1, 0) = 1e-7;
    m(1, 1) = 3.25;
    const npy::Array a = npy::from_matrix(m);
    const Matrix back = npy::to_matrix(a);
    CHECK(back(0, 0) == doctest::Approx(0.1).epsilon(1e-7));
    CHECK(back(0, 0) != 0.1); // narrowed
    CHECK(back(0, 1) == -2.0);
    CHECK(back(1, 1) == 3.25);

    const std::vector<LatentVector> latents{{1.0, 2.0}, {3.0, 4.0}};
    const auto arr = npy::from_latents(latents);
    CHECK(arr.shape == std::vector<size_t>{2, 2});
    CHECK(npy::to_latents(arr) == latents);

    npy::Array one_d;
    one_d.shape = {4};
    one_d.data = {1, 2, 3, 4};
    CHECK_THROWS_AS(npy::to_matrix(one_d), FormatError);
    CHECK_THROWS_AS(npy::to_latents(one_d), FormatError);

    const std::vector<LatentVector> ragged{{1.0, 2.0}, {3.0}};
    CHECK_THROWS_AS(npy::from_latents(ragged), InvalidArgument);
}

TEST_CASE("second save of a loaded array reproduces the first file") {
    testutil::TempDir tmp;
    Matrix m(3, 2);
    for (size_t i = 0; i < 3; ++i)
        for (size_t j = 0; j < 2; ++j) m(i, j) = 0.1 * static_cast<double>(i) + 0.7;
    const auto p1 = tmp / "one.npy";
    const auto p2 = tmp / "two.npy";
    npy::save(p1, npy::from_matrix(m));
    npy::save(p2, npy::from_matrix(npy::to_matrix(npy::load(p1))));
    CHECK(testutil::read_bytes(p1) == testutil::read_bytes(p2));
}
