#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "songtuple/duration_codec.hpp"
#include "songtuple/errors.hpp"

using namespace songtuple;

// Expected values below were evaluated at 50 significant digits with an
// arbitrary-precision library, independently of this implementation.
TEST_CASE("encode maps the clip range onto the first and last bins") {
    CHECK(encode_duration(-0.3) == 0);
    CHECK(encode_duration(6.0) == 511);
    CHECK(encode_duration(9.0) == 511);
    CHECK(encode_duration(-5.0) == 0);
}

TEST_CASE("encode of interior durations") {
    CHECK(encode_duration(0.5) == 169);  // 169.1375...
    CHECK(encode_duration(1.0) == 233);  // 232.9812...
    CHECK(encode_duration(0.0) == encode_duration(-0.0));
}

TEST_CASE("decode inverts the warp at bin centres") {
    CHECK(decode_duration(0) == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(std::abs(decode_duration(0) + 0.3) <= 1e-9);
    CHECK(std::abs(decode_duration(511) - 6.0) <= 1e-9);
    CHECK(std::abs(decode_duration(169) - 0.49907068169517798) <= 1e-12);
    CHECK(std::abs(decode_duration(233) - 1.0001691697717664) <= 1e-12);
}

TEST_CASE("bin widths grow with the bin index") {
    CHECK(std::abs(bin_width_at(0) - 0.0031613433713728861) <= 1e-12);
    CHECK(std::abs(bin_width_at(510) - 0.031471302864160174) <= 1e-12);
    for (int b = 1; b <= 510; ++b) CHECK(bin_width_at(b) > bin_width_at(b - 1));
}

TEST_CASE("codec errors") {
    CHECK_THROWS_AS(encode_duration(std::numeric_limits<double>::quiet_NaN()), InvalidDuration);
    CHECK_THROWS_AS(encode_duration(std::numeric_limits<double>::infinity()), InvalidDuration);
    CHECK_THROWS_AS(decode_duration(-1), InvalidBin);
    CHECK_THROWS_AS(decode_duration(512), InvalidBin);
    CHECK_THROWS_AS(bin_width_at(511), InvalidBin);
    CHECK_THROWS_AS(encode_duration(1.0, CodecConfig{-1.0, 6.0, 512, 1.0}), InvalidConfig);
    CHECK_THROWS_AS(encode_duration(1.0, CodecConfig{0.0, 6.0, 1, 1.0}), InvalidConfig);
}

TEST_CASE("every bin is a fixpoint of decode then encode") {
    for (int b = 0; b < 512; ++b) {
        const double x = decode_duration(b);
        CHECK(encode_duration(x) == b);
        CHECK(std::abs(decode_duration(encode_duration(x)) - x) <= 1e-9);
    }
}

TEST_CASE("round trip error stays within one bin width and encode is monotone") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-0.3, 6.0);
    std::vector<double> xs(5000);
    for (auto& x : xs) x = dist(rng);
    std::sort(xs.begin(), xs.end());
    int previous = 0;
    for (double x : xs) {
        const int bin = encode_duration(x);
        CHECK(bin >= previous);
        previous = bin;
        CHECK(std::abs(decode_duration(bin) - x) <= bin_width_at(std::min(bin, 510)));
    }
}

TEST_CASE("custom configurations") {
    const CodecConfig small{0.0, 1.0, 2, 1.0};
    CHECK(encode_duration(0.0, small) == 0);
    CHECK(encode_duration(1.0, small) == 1);
    CHECK(decode_duration(1, small) == doctest::Approx(1.0));
}
