#include "vitdesc/part_cosegmentation.hpp"

#include "vitdesc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vitdesc {

PartResult part_segment(std::span<const DescriptorField> fields, std::span<const LabelMask> fg_masks,
                        const PartOptions& options) {
    if (options.num_parts <= 0) throw InputError("part_segment: num_parts must be positive");
    if (fields.empty()) throw InputError("part_segment: no fields");
    if (fields.size() != fg_masks.size()) throw InputError("part_segment: one mask per field required");

    DescriptorMatrix bag;
    bag.dim = static_cast<std::size_t>(fields.front().dim());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& f = fields[i];
        const auto& mask = fg_masks[i];
        if (static_cast<std::size_t>(f.dim()) != bag.dim) throw InputError("part_segment: descriptor dim mismatch");
        if (mask.height != f.grid_h() || mask.width != f.grid_w()) {
            throw InputError("part_segment: mask does not match field grid for " + f.meta().image_id);
        }
        bag.image_ids.push_back(f.meta().image_id);
        for (int r = 0; r < f.grid_h(); ++r) {
            for (int c = 0; c < f.grid_w(); ++c) {
                if (mask.at(r, c) == 0) continue;
                auto d = f.at(r, c);
                bag.data.insert(bag.data.end(), d.begin(), d.end());
                bag.provenance.push_back({i, r, c});
            }
        }
    }
    bag.rows = bag.provenance.size();
    if (bag.rows < static_cast<std::size_t>(options.num_parts)) {
        throw InputError("part_segment: fewer foreground patches than requested parts");
    }
    if (options.l2_normalize) l2_normalize_rows(bag);

    PartResult result;
    result.model = kmeans(bag, {options.num_parts, options.seed, options.max_iters, options.tol, options.restarts,
                                options.threads});

    const auto sizes = result.model.cluster_sizes();
    std::vector<double> norms(options.num_parts);
    for (int j = 0; j < options.num_parts; ++j) {
        double sq = 0.0;
        for (double v : result.model.centroid(j)) sq += v * v;
        norms[j] = std::sqrt(sq);
    }
    std::vector<int> order(options.num_parts);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
        if (norms[a] != norms[b]) return norms[a] < norms[b];
        return a < b;
    });
    result.cluster_to_part.assign(options.num_parts, -1);
    for (int rank = 0; rank < options.num_parts; ++rank) {
        if (sizes[order[rank]] == 0) break;
        result.cluster_to_part[order[rank]] = rank + 1;
        result.parts_used = rank + 1;
    }

    for (const auto& f : fields) result.part_masks.emplace_back(f.meta().image_id, f.grid_h(), f.grid_w());
    for (std::size_t r = 0; r < bag.rows; ++r) {
        const auto& p = bag.provenance[r];
        result.part_masks[p.image].at(p.row, p.col) = result.cluster_to_part[result.model.labels[r]];
    }
    return result;
}

}  // namespace vitdesc
