#include "vitdesc/errors.hpp"
#include "vitdesc/feature_analysis.hpp"
#include "vitdesc/image_io.hpp"

#include "synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <set>

using namespace vitdesc;

namespace {

DescriptorMatrix matrix_of(std::size_t rows, std::size_t dim, std::vector<float> data) {
    DescriptorMatrix m;
    m.rows = rows;
    m.dim = dim;
    m.data = std::move(data);
    return m;
}

DescriptorMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t dim) {
    std::normal_distribution<float> n(0.0f, 1.0f);
    std::vector<float> data(rows * dim);
    for (auto& v : data) v = n(rng);
    return matrix_of(rows, dim, std::move(data));
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("points on a line give one component along it") {
    std::vector<float> data;
    for (int i = 0; i < 10; ++i) {
        data.push_back(static_cast<float>(i));
        data.push_back(static_cast<float>(2 * i));
    }
    const auto r = pca(matrix_of(10, 2, data), 2);
    const double s = 1.0 / std::sqrt(5.0);
    CHECK(r.component(0)[0] == doctest::Approx(s));
    CHECK(r.component(0)[1] == doctest::Approx(2 * s));
    CHECK(r.explained_variance[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.explained_variance[0] == doctest::Approx(r.total_variance));
    CHECK_FALSE(r.degenerate);
}

TEST_CASE("symmetric cross has equal variances") {
    const auto r = pca(matrix_of(4, 2, {1, 0, -1, 0, 0, 1, 0, -1}), 2);
    CHECK(r.explained_variance[0] == doctest::Approx(r.explained_variance[1]));
    CHECK(r.explained_variance[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("all components reconstruct the data") {
    std::mt19937_64 rng(1);
    const auto m = random_matrix(rng, 50, 8);
    const auto r = pca(m, 8);
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t d = 0; d < 8; ++d) {
            double v = r.mean[d];
            for (int c = 0; c < 8; ++c) v += r.projected[i * 8 + c] * r.component(c)[d];
            CHECK(std::abs(v - m.data[i * 8 + d]) < 1e-5);
        }
    }
}

TEST_CASE("components are orthonormal and variances are ordered") {
    std::mt19937_64 rng(2);
    const auto r = pca(random_matrix(rng, 30, 6), 5);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            CHECK(dot(r.component(i), r.component(j)) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
        }
        if (i > 0) CHECK(r.explained_variance[i] <= r.explained_variance[i - 1]);
        // Largest-magnitude entry is positive.
        const auto c = r.component(i);
        const auto big = std::max_element(c.begin(), c.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        CHECK(*big > 0.0);
    }
    double sum = 0.0;
    for (double v : r.explained_variance) sum += v;
    CHECK(sum <= r.total_variance * (1 + 1e-12));
}

TEST_CASE("shifting every row leaves components unchanged") {
    std::mt19937_64 rng(3);
    auto m = random_matrix(rng, 40, 5);
    const auto a = pca(m, 3);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t d = 0; d < 5; ++d) m.data[i * 5 + d] += 4.0f + static_cast<float>(d);
    }
    const auto b = pca(m, 3);
    for (std::size_t k = 0; k < a.components.size(); ++k) CHECK(std::abs(a.components[k] - b.components[k]) < 1e-4);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(a.explained_variance[k] == doctest::Approx(b.explained_variance[k]).epsilon(1e-4));
    }
}

TEST_CASE("constant data is flagged degenerate") {
    const auto r = pca(matrix_of(5, 3, std::vector<float>(15, 2.0f)), 3);
    CHECK(r.degenerate);
    for (double v : r.explained_variance) CHECK(v == 0.0);
    for (int i = 0; i < 3; ++i) CHECK(dot(r.component(i), r.component(i)) == doctest::Approx(1.0));
}

TEST_CASE("bad component counts") {
    std::mt19937_64 rng(4);
    const auto m = random_matrix(rng, 5, 3);
    CHECK_THROWS_AS(pca(m, 0), InputError);
    CHECK_THROWS_AS(pca(m, 4), InputError);
    CHECK_THROWS_AS(pca(random_matrix(rng, 1, 3), 1), InputError);
}

TEST_CASE("two-valued descriptors give a two-valued first map") {
    std::vector<DescriptorField> fields;
    for (int n = 0; n < 2; ++n) {
        std::vector<float> data;
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 5; ++c) {
                const bool left = (c + n) < 3;
                for (float v : left ? std::vector<float>{1, 0, 2, 0} : std::vector<float>{0, 3, 0, 1}) {
                    data.push_back(v);
                }
            }
        }
        fields.emplace_back(vitdesc::testing::make_meta("t" + std::to_string(n), 4, 5, 4), std::move(data));
    }
    const auto r = pca(stack_fields(fields), 4);
    const auto maps = component_maps(fields, r);
    REQUIRE(maps.size() == 2);
    std::set<double> values;
    for (const auto& m : maps) {
        CHECK(m.height == 4);
        CHECK(m.width == 5);
        CHECK(m.rgb.size() == 60);
        for (double v : m.first) values.insert(std::round(v * 1e9) / 1e9);
    }
    CHECK(values.size() == 2);

    const auto dir = std::filesystem::temp_directory_path() / "vitdesc_pca_maps";
    std::filesystem::remove_all(dir);
    const auto written = render_component_maps(fields, r, dir);
    CHECK(written.size() == 4);
    const auto img = read_png(dir / "t0_pca1.png");
    std::set<int> px;
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) px.insert(img.pixels[i]);
    CHECK(px == std::set<int>{0, 255});
}

TEST_CASE("constant field renders a flat map; fewer than four components skip RGB") {
    std::vector<DescriptorField> fields{
        DescriptorField(vitdesc::testing::make_meta("flat", 3, 3, 2), std::vector<float>(18, 1.0f))};
    const auto r = pca(stack_fields(fields), 2);
    const auto dir = std::filesystem::temp_directory_path() / "vitdesc_pca_flat";
    std::filesystem::remove_all(dir);
    const auto written = render_component_maps(fields, r, dir);
    CHECK(written.size() == 1);
    const auto img = read_png(dir / "flat_pca1.png");
    std::set<int> px(img.pixels.begin(), img.pixels.end());
    CHECK(px.size() == 1);
    CHECK(component_maps(fields, r)[0].rgb.empty());
}

TEST_CASE("components round-trip through a descriptor field") {
    std::mt19937_64 rng(5);
    const auto f = vitdesc::testing::random_field(rng, "src", 6, 6, 7);
    const auto r = pca(stack_fields(std::span<const DescriptorField>(&f, 1)), 4);
    const auto field = components_as_field(r, f.meta());
    CHECK(field.grid_h() == 4);
    CHECK(field.grid_w() == 1);
    CHECK(field.dim() == 7);
    for (int i = 0; i < 4; ++i) {
        for (std::size_t d = 0; d < 7; ++d) CHECK(field.at(i, 0)[d] == static_cast<float>(r.component(i)[d]));
    }
}
