#include "vitdesc/binning.hpp"
#include "vitdesc/correspondence.hpp"
#include "vitdesc/errors.hpp"

#include "oracles.hpp"
#include "synthetic.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace vitdesc;
using vitdesc::testing::make_meta;
using vitdesc::testing::Points;

namespace {

Points rows_of(const DescriptorField& f) {
    Points p;
    for (std::size_t i = 0; i < f.cells(); ++i) {
        auto c = f.cell(i);
        p.emplace_back(c.begin(), c.end());
    }
    return p;
}

std::set<std::pair<std::size_t, std::size_t>> pair_set(const MatchSet& m) {
    std::set<std::pair<std::size_t, std::size_t>> out;
    const int sw = m.src_meta.grid_w();
    const int tw = m.tgt_meta.grid_w();
    for (const auto& p : m.pairs) {
        out.emplace(static_cast<std::size_t>(p.src.row * sw + p.src.col),
                    static_cast<std::size_t>(p.tgt.row * tw + p.tgt.col));
    }
    return out;
}

DescriptorMatrix bank_of(const Points& pts) {
    DescriptorMatrix m;
    m.rows = pts.size();
    m.dim = pts[0].size();
    for (const auto& p : pts) {
        for (double v : p) m.data.push_back(static_cast<float>(v));
    }
    return m;
}

}  // namespace

TEST_CASE("nearest neighbour finds the query itself") {
    std::mt19937_64 rng(1);
    const auto f = vitdesc::testing::random_field(rng, "b", 10, 1, 8);
    const auto bank = stack_fields(std::span<const DescriptorField>(&f, 1));
    for (std::size_t i = 0; i < bank.rows; ++i) {
        const auto hit = nearest_neighbor(bank.row(i), bank);
        CHECK(hit.index == i);
        CHECK(hit.similarity == doctest::Approx(1.0));
    }
}

TEST_CASE("nearest neighbour of an orthogonal construction") {
    const Points bank{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const std::vector<float> q{0.0f, 0.0f, 2.0f};
    CHECK(nearest_neighbor(q, bank_of(bank)).index == 2);
}

TEST_CASE("nearest neighbour agrees with an exhaustive scan") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0, 1);
    for (int t = 0; t < 50; ++t) {
        Points bank(10, std::vector<double>(8));
        for (auto& r : bank) {
            for (auto& v : r) v = static_cast<float>(n(rng));
        }
        std::vector<double> q(8);
        for (auto& v : q) v = static_cast<float>(n(rng));
        const std::vector<float> qf(q.begin(), q.end());
        CHECK(nearest_neighbor(qf, bank_of(bank)).index == vitdesc::testing::brute_nearest(q, bank));
    }
}

TEST_CASE("ties resolve to the lowest index") {
    const Points bank{{0, 1}, {1, 0}, {2, 0}, {1, 0}};
    const std::vector<float> q{3.0f, 0.0f};
    CHECK(nearest_neighbor(q, bank_of(bank)).index == 1);
}

TEST_CASE("zero vectors and dim mismatches are input errors") {
    const Points bank{{1, 0}, {0, 0}};
    const std::vector<float> q{1.0f, 0.0f};
    CHECK_THROWS_AS(nearest_neighbor(q, bank_of(bank)), InputError);
    const std::vector<float> zero{0.0f, 0.0f};
    CHECK_THROWS_AS(nearest_neighbor(zero, bank_of({{1, 0}})), InputError);
    const std::vector<float> three{1.0f, 0.0f, 0.0f};
    CHECK_THROWS_AS(nearest_neighbor(three, bank_of({{1, 0}})), InputError);
}

TEST_CASE("identical fields pair every cell with itself") {
    std::mt19937_64 rng(3);
    const auto f = vitdesc::testing::random_field(rng, "s", 5, 6, 7);
    const auto m = best_buddies(f, f);
    REQUIRE(m.pairs.size() == 30);
    for (const auto& p : m.pairs) {
        CHECK(p.src == p.tgt);
        CHECK(p.similarity == doctest::Approx(1.0));
    }
}

TEST_CASE("pigeonhole: one target cell pairs with its closest source") {
    DescriptorField src(make_meta("s", 1, 2, 2), {1.0f, 0.1f, 0.0f, 1.0f});
    DescriptorField tgt(make_meta("t", 1, 1, 2), {1.0f, 0.0f});
    const auto m = best_buddies(src, tgt);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].src == GridCell{0, 0});
    CHECK(m.pairs[0].tgt == GridCell{0, 0});
}

TEST_CASE("best buddies equal the exhaustive mutual scan") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        const auto a = vitdesc::testing::random_field(rng, "a", 5, 6, 12);
        const auto b = vitdesc::testing::random_field(rng, "b", 6, 5, 12);
        const auto m = best_buddies(a, b);
        CHECK(pair_set(m) == vitdesc::testing::brute_best_buddies(rows_of(a), rows_of(b)));
        for (std::size_t i = 1; i < m.pairs.size(); ++i) {
            const auto& x = m.pairs[i - 1].src;
            const auto& y = m.pairs[i].src;
            CHECK((x.row < y.row || (x.row == y.row && x.col < y.col)));
        }
    }
}

TEST_CASE("best buddies are symmetric") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto a = vitdesc::testing::random_field(rng, "a", 4, 7, 6);
        const auto b = vitdesc::testing::random_field(rng, "b", 6, 3, 6);
        std::set<std::pair<std::size_t, std::size_t>> flipped;
        for (auto [i, j] : pair_set(best_buddies(b, a))) flipped.emplace(j, i);
        CHECK(pair_set(best_buddies(a, b)) == flipped);
    }
}

TEST_CASE("best buddies ignore positive scaling") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<float> scale(0.1f, 10.0f);
    const auto a = vitdesc::testing::random_field(rng, "a", 6, 6, 8);
    const auto b = vitdesc::testing::random_field(rng, "b", 6, 6, 8);
    std::vector<float> scaled(a.data().begin(), a.data().end());
    for (std::size_t c = 0; c < a.cells(); ++c) {
        // Powers of two keep the scaled floats exact.
        const float s = std::ldexp(1.0f, static_cast<int>(scale(rng)) - 3);
        for (std::size_t d = 0; d < 8; ++d) scaled[c * 8 + d] *= s;
    }
    DescriptorField as(a.meta(), std::move(scaled));
    CHECK(pair_set(best_buddies(a, b)) == pair_set(best_buddies(as, b)));
}

TEST_CASE("best buddies across thread counts and block boundaries") {
    std::mt19937_64 rng(7);
    // More than one 256-row block on both sides.
    const auto a = vitdesc::testing::random_field(rng, "a", 20, 20, 16);
    const auto b = vitdesc::testing::random_field(rng, "b", 18, 19, 16);
    const auto m1 = best_buddies(a, b, 1);
    const auto m4 = best_buddies(a, b, 4);
    CHECK(pair_set(m1) == pair_set(m4));
    CHECK(pair_set(m1) == vitdesc::testing::brute_best_buddies(rows_of(a), rows_of(b)));
}

TEST_CASE("keypoints map to their own center for identical fields") {
    std::mt19937_64 rng(8);
    const auto f = vitdesc::testing::random_field(rng, "k", 6, 6, 5);
    std::vector<PixelCoord> kps{{3.5, 3.5}, {20.0, 41.0}, {47.0, 0.0}};
    const auto out = match_keypoints(kps, f, f, BinningConfig{2, 2});
    REQUIRE(out.size() == 3);
    for (std::size_t i = 0; i < kps.size(); ++i) {
        const auto cell = pixel_to_patch(kps[i].y, kps[i].x, f.meta());
        CHECK(out[i] == patch_center_px(cell.row, cell.col, f.meta()));
    }
}

TEST_CASE("keypoint finds the single matching target cell") {
    std::vector<float> src(3 * 3 * 4, 0.0f);
    std::vector<float> tgt(3 * 3 * 4, 0.0f);
    for (std::size_t c = 0; c < 9; ++c) {
        src[c * 4 + 0] = 1.0f;
        tgt[c * 4 + 1] = 1.0f;
    }
    tgt[(2 * 3 + 1) * 4 + 0] = 1.0f;
    tgt[(2 * 3 + 1) * 4 + 1] = 0.0f;
    DescriptorField s(make_meta("s", 3, 3, 4), src);
    DescriptorField t(make_meta("t", 3, 3, 4), tgt);
    const std::vector<PixelCoord> kp{{12.0, 12.0}};
    const auto out = match_keypoints(kp, s, t, BinningConfig{0, 2});
    CHECK(out[0] == patch_center_px(2, 1, t.meta()));
}

TEST_CASE("keypoint matching equals a brute-force scan over binned cells") {
    std::mt19937_64 rng(9);
    const BinningConfig cfg{2, 2};
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = vitdesc::testing::random_field(rng, "s", 8, 7, 6);
        const auto t = vitdesc::testing::random_field(rng, "t", 7, 9, 6);
        std::uniform_real_distribution<double> uy(0, 63.0), ux(0, 55.0);
        std::vector<PixelCoord> kps;
        for (int i = 0; i < 10; ++i) kps.push_back({uy(rng), ux(rng)});
        const auto scored = match_keypoints_scored(kps, s, t, cfg);
        const auto bs = rows_of(log_bin(s, cfg));
        const auto bt = rows_of(log_bin(t, cfg));
        for (std::size_t i = 0; i < kps.size(); ++i) {
            const auto cell = pixel_to_patch(kps[i].y, kps[i].x, s.meta());
            const auto j = vitdesc::testing::brute_nearest(bs[cell.row * 7 + cell.col], bt);
            CHECK(scored[i].source_cell == cell);
            CHECK(scored[i].target_cell == GridCell{static_cast<int>(j / 9), static_cast<int>(j % 9)});
        }
    }
}
