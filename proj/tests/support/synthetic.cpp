#include "synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace vitdesc::testing {

FieldMeta make_meta(const std::string& id, int grid_h, int grid_w, int dim, int patch, int stride) {
    FieldMeta m;
    m.image_id = id;
    m.image_height_px = (grid_h - 1) * stride + patch;
    m.image_width_px = (grid_w - 1) * stride + patch;
    m.patch_size_px = patch;
    m.stride_px = stride;
    m.layer_index = 11;
    m.facet = Facet::key;
    m.model_id = "synthetic";
    m.descriptor_dim = dim;
    return m;
}

DescriptorField random_field(std::mt19937_64& rng, const std::string& id, int grid_h, int grid_w, int dim) {
    std::normal_distribution<float> normal(0.0f, 1.0f);
    std::vector<float> data(static_cast<std::size_t>(grid_h) * grid_w * dim);
    for (auto& v : data) v = normal(rng);
    return DescriptorField(make_meta(id, grid_h, grid_w, dim), std::move(data));
}

std::vector<float> random_direction(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(dim);
    double sq = 0.0;
    for (auto& x : v) {
        x = normal(rng);
        sq += x * x;
    }
    std::vector<float> out(dim);
    for (int i = 0; i < dim; ++i) out[i] = static_cast<float>(v[i] / std::sqrt(sq));
    return out;
}

namespace {

void fill_cell(std::vector<float>& data, std::size_t cell, const std::vector<float>& mean, double noise,
               std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, noise);
    const std::size_t d = mean.size();
    for (std::size_t c = 0; c < d; ++c) data[cell * d + c] = static_cast<float>(mean[c] + normal(rng));
}

struct Rect {
    int r0, r1, c0, c1;  // half-open
};

Rect random_rect(std::mt19937_64& rng, int grid) {
    std::uniform_int_distribution<int> size(grid / 3, 2 * grid / 3);
    const int h = size(rng);
    const int w = size(rng);
    std::uniform_int_distribution<int> top(0, grid - h);
    std::uniform_int_distribution<int> left(0, grid - w);
    const int r0 = top(rng);
    const int c0 = left(rng);
    return {r0, r0 + h, c0, c0 + w};
}

}  // namespace

CosegFixture planted_coseg(std::uint64_t seed, int num_images, int grid, int dim, double noise) {
    std::mt19937_64 rng(seed);
    const auto fg_mean = random_direction(rng, dim);
    const std::vector<std::vector<float>> bg_means = {random_direction(rng, dim), random_direction(rng, dim)};

    CosegFixture fx;
    for (int img = 0; img < num_images; ++img) {
        const std::string id = "img" + std::to_string(img);
        const Rect fg = random_rect(rng, grid);
        const int split = grid / 2;
        std::vector<float> data(static_cast<std::size_t>(grid) * grid * dim);
        std::vector<float> sal(static_cast<std::size_t>(grid) * grid, 0.0f);
        LabelMask gt(id, grid, grid);
        for (int r = 0; r < grid; ++r) {
            for (int c = 0; c < grid; ++c) {
                const std::size_t cell = static_cast<std::size_t>(r) * grid + c;
                const bool inside = r >= fg.r0 && r < fg.r1 && c >= fg.c0 && c < fg.c1;
                if (inside) {
                    fill_cell(data, cell, fg_mean, noise, rng);
                    sal[cell] = 1.0f;
                    gt.labels[cell] = 1;
                } else {
                    fill_cell(data, cell, bg_means[r < split ? 0 : 1], noise, rng);
                }
            }
        }
        fx.fields.emplace_back(make_meta(id, grid, grid, dim), std::move(data));
        fx.saliencies.emplace_back(make_meta(id, grid, grid, 1), std::move(sal));
        fx.ground_truth.push_back(std::move(gt));
    }
    return fx;
}

PartsFixture planted_parts(std::uint64_t seed, int num_images, int num_parts, int grid, int dim, double noise) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<float>> part_means;
    for (int p = 0; p < num_parts; ++p) part_means.push_back(random_direction(rng, dim));
    const auto bg_mean = random_direction(rng, dim);

    PartsFixture fx;
    for (int img = 0; img < num_images; ++img) {
        const std::string id = "img" + std::to_string(img);
        Rect fg = random_rect(rng, grid);
        // Enough rows for every part band.
        if (fg.r1 - fg.r0 < num_parts) fg.r1 = std::min(grid, fg.r0 + num_parts);
        if (fg.r1 - fg.r0 < num_parts) fg.r0 = fg.r1 - num_parts;
        std::vector<float> data(static_cast<std::size_t>(grid) * grid * dim);
        std::vector<float> sal(static_cast<std::size_t>(grid) * grid, 0.0f);
        LabelMask mask(id, grid, grid);
        LabelMask parts(id, grid, grid);
        const int height = fg.r1 - fg.r0;
        for (int r = 0; r < grid; ++r) {
            for (int c = 0; c < grid; ++c) {
                const std::size_t cell = static_cast<std::size_t>(r) * grid + c;
                const bool inside = r >= fg.r0 && r < fg.r1 && c >= fg.c0 && c < fg.c1;
                if (inside) {
                    const int part = (r - fg.r0) * num_parts / height;
                    fill_cell(data, cell, part_means[part], noise, rng);
                    sal[cell] = 1.0f;
                    mask.labels[cell] = 1;
                    parts.labels[cell] = part + 1;
                } else {
                    fill_cell(data, cell, bg_mean, noise, rng);
                }
            }
        }
        fx.fields.emplace_back(make_meta(id, grid, grid, dim), std::move(data));
        fx.saliencies.emplace_back(make_meta(id, grid, grid, 1), std::move(sal));
        fx.foreground.push_back(std::move(mask));
        fx.parts.push_back(std::move(parts));
    }
    return fx;
}

}  // namespace vitdesc::testing
