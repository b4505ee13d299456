#include "vitdesc/binning.hpp"

#include "vitdesc/errors.hpp"
#include "vitdesc/parallel.hpp"

#include <algorithm>
#include <array>

namespace vitdesc {

void BinningConfig::validate() const {
    if (levels < 0) throw InputError("binning levels must be non-negative");
    if (dilation_base < 1) throw InputError("binning dilation base must be at least 1");
}

DescriptorField log_bin(const DescriptorField& field, const BinningConfig& cfg, unsigned threads) {
    cfg.validate();
    if (cfg.levels == 0) return field;

    constexpr std::array<std::array<int, 2>, 8> kOffsets = {{
        {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1},
    }};

    const int h = field.grid_h();
    const int w = field.grid_w();
    const auto d = static_cast<std::size_t>(field.dim());
    const std::size_t slots = 1 + 8 * static_cast<std::size_t>(cfg.levels);
    const std::size_t out_dim = d * slots;

    std::vector<int> dilations(cfg.levels);
    int dil = 1;
    for (int l = 0; l < cfg.levels; ++l) {
        dilations[l] = dil;
        dil *= cfg.dilation_base;
    }

    std::vector<float> out(field.cells() * out_dim, 0.0f);
    parallel_for(field.cells(), threads, [&](std::size_t linear) {
        const int row = static_cast<int>(linear / w);
        const int col = static_cast<int>(linear % w);
        float* dst = out.data() + linear * out_dim;
        auto own = field.cell(linear);
        std::copy(own.begin(), own.end(), dst);
        std::size_t slot = 1;
        for (int dl : dilations) {
            for (const auto& off : kOffsets) {
                const int r = row + off[0] * dl;
                const int c = col + off[1] * dl;
                if (r >= 0 && r < h && c >= 0 && c < w) {
                    auto nb = field.cell(static_cast<std::size_t>(r) * w + c);
                    std::copy(nb.begin(), nb.end(), dst + slot * d);
                }
                ++slot;
            }
        }
    });

    FieldMeta meta = field.meta();
    meta.descriptor_dim = static_cast<int>(out_dim);
    return DescriptorField(std::move(meta), std::move(out));
}

}  // namespace vitdesc
