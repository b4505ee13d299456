#pragma once

#include "vitdesc/clustering.hpp"
#include "vitdesc/descriptor_store.hpp"
#include "vitdesc/label_mask.hpp"

#include <span>
#include <vector>

namespace vitdesc {

struct PartOptions {
    int num_parts = 4;
    bool l2_normalize = true;
    std::uint64_t seed = 0;
    int max_iters = 100;
    double tol = 1e-4;
    int restarts = 1;
    unsigned threads = 1;
};

struct PartResult {
    ClusterModel model;
    // cluster index -> part label (1-based); -1 for clusters left empty.
    std::vector<int> cluster_to_part;
    int parts_used = 0;
    std::vector<LabelMask> part_masks;  // labels 0..parts_used, 0 = background
};

// k-means with k = num_parts over the foreground descriptors of all images.
// Part ids follow cluster size (largest first), ties by smaller centroid norm,
// so the numbering is stable between runs. fg_masks[i] must match fields[i].
PartResult part_segment(std::span<const DescriptorField> fields, std::span<const LabelMask> fg_masks,
                        const PartOptions& options);

}  // namespace vitdesc
