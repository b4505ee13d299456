#include "vitdesc/binning.hpp"
#include "vitdesc/errors.hpp"

#include "synthetic.hpp"

#include <doctest.h>

using namespace vitdesc;
using vitdesc::testing::make_meta;

namespace {

// 3x3 grid, cell (r, c) holds the one-hot vector e_{3r+c}.
DescriptorField one_hot_grid() {
    std::vector<float> data(9 * 9, 0.0f);
    for (int i = 0; i < 9; ++i) data[static_cast<std::size_t>(i) * 9 + i] = 1.0f;
    return DescriptorField(make_meta("onehot", 3, 3, 9), std::move(data));
}

// Hand-listed neighbourhood of the centre cell (1, 1) at distance 1.
const int kCentreNeighbours[8] = {0, 1, 2, 3, 5, 6, 7, 8};

int hot_index(std::span<const float> slot) {
    int hot = -1;
    for (std::size_t i = 0; i < slot.size(); ++i) {
        if (slot[i] == 1.0f) {
            if (hot != -1) return -2;
            hot = static_cast<int>(i);
        } else if (slot[i] != 0.0f) {
            return -2;
        }
    }
    return hot;
}

}  // namespace

TEST_CASE("zero levels is the identity") {
    std::mt19937_64 rng(1);
    const auto f = vitdesc::testing::random_field(rng, "a", 4, 5, 3);
    CHECK(log_bin(f, BinningConfig{0, 2}) == f);
}

TEST_CASE("single cell gets zero neighbour slots") {
    DescriptorField f(make_meta("one", 1, 1, 2), {1.5f, -2.0f});
    const auto out = log_bin(f, BinningConfig{1, 2});
    REQUIRE(out.dim() == 18);
    const auto cell = out.at(0, 0);
    CHECK(cell[0] == 1.5f);
    CHECK(cell[1] == -2.0f);
    for (int i = 2; i < 18; ++i) CHECK(cell[i] == 0.0f);
}

TEST_CASE("3x3 one-hot centre cell lists its neighbours in order") {
    const auto out = log_bin(one_hot_grid(), BinningConfig{1, 2});
    REQUIRE(out.dim() == 81);
    const auto cell = out.at(1, 1);
    CHECK(hot_index(cell.subspan(0, 9)) == 4);
    for (int slot = 0; slot < 8; ++slot) {
        CHECK(hot_index(cell.subspan(static_cast<std::size_t>(slot + 1) * 9, 9)) == kCentreNeighbours[slot]);
    }
}

TEST_CASE("corner cells zero-pad the missing neighbours") {
    const auto out = log_bin(one_hot_grid(), BinningConfig{1, 2});
    const auto corner = out.at(0, 0);
    // Only (0,+1), (+1,0), (+1,+1) exist: slots 5, 7, 8.
    const int expect[8] = {-1, -1, -1, -1, 1, -1, 3, 4};
    for (int slot = 0; slot < 8; ++slot) {
        CHECK(hot_index(corner.subspan(static_cast<std::size_t>(slot + 1) * 9, 9)) == expect[slot]);
    }
}

TEST_CASE("second level samples at the dilated distance") {
    std::vector<float> data(25);
    for (int i = 0; i < 25; ++i) data[i] = static_cast<float>(i + 1);
    DescriptorField f(make_meta("g", 5, 5, 1), std::move(data));
    const auto out = log_bin(f, BinningConfig{2, 2});
    REQUIRE(out.dim() == 17);
    const auto cell = out.at(2, 2);
    const float level2[8] = {1, 3, 5, 11, 15, 21, 23, 25};
    for (int i = 0; i < 8; ++i) CHECK(cell[9 + i] == level2[i]);
    const auto b3 = log_bin(f, BinningConfig{2, 3});
    // Distance 3 from (2,2) leaves the 5x5 grid in every direction.
    for (int i = 0; i < 8; ++i) CHECK(b3.at(2, 2)[9 + i] == 0.0f);
}

TEST_CASE("output dim is D(1 + 8L) for every level count") {
    std::mt19937_64 rng(5);
    for (int dim : {1, 3, 7}) {
        const auto f = vitdesc::testing::random_field(rng, "d", 6, 4, dim);
        for (int levels = 0; levels <= 4; ++levels) {
            const auto out = log_bin(f, BinningConfig{levels, 2});
            CHECK(out.dim() == static_cast<std::size_t>(dim * (1 + 8 * levels)));
            CHECK(out.grid_h() == 6);
            CHECK(out.grid_w() == 4);
            CHECK(out.meta().descriptor_dim == dim * (1 + 8 * levels));
        }
    }
}

TEST_CASE("interior cells are translation equivariant") {
    std::mt19937_64 rng(9);
    const auto f = vitdesc::testing::random_field(rng, "t", 10, 10, 2);
    // Same field shifted one cell right, new first column random.
    std::vector<float> shifted(f.data().begin(), f.data().end());
    for (int r = 0; r < 10; ++r) {
        for (int c = 9; c >= 1; --c) {
            for (int d = 0; d < 2; ++d) shifted[(r * 10 + c) * 2 + d] = f.data()[(r * 10 + c - 1) * 2 + d];
        }
    }
    DescriptorField g(f.meta(), std::move(shifted));
    const BinningConfig cfg{2, 2};
    const auto bf = log_bin(f, cfg);
    const auto bg = log_bin(g, cfg);
    // Cells whose full 2-level neighbourhood lies inside both grids.
    for (int r = 2; r < 8; ++r) {
        for (int c = 2; c < 7; ++c) {
            const auto a = bf.at(r, c);
            const auto b = bg.at(r, c + 1);
            CHECK(std::equal(a.begin(), a.end(), b.begin()));
        }
    }
}

TEST_CASE("thread count does not change the output") {
    std::mt19937_64 rng(11);
    const auto f = vitdesc::testing::random_field(rng, "p", 12, 9, 5);
    CHECK(log_bin(f, BinningConfig{3, 2}, 1) == log_bin(f, BinningConfig{3, 2}, 4));
}

TEST_CASE("invalid configs are rejected") {
    CHECK_THROWS_AS((BinningConfig{-1, 2}.validate()), InputError);
    CHECK_THROWS_AS((BinningConfig{1, 0}.validate()), InputError);
}
