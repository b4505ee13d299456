#pragma once

#include "vitdesc/binning.hpp"
#include "vitdesc/descriptor_store.hpp"

#include <span>
#include <vector>

namespace vitdesc {

struct NeighborHit {
    std::size_t index = 0;
    double similarity = 0.0;
};

// Cosine nearest neighbour by exhaustive scan; ties go to the lowest index.
// Throws InputError on an empty bank, mismatched dims or zero-norm vectors.
NeighborHit nearest_neighbor(std::span<const float> query, const DescriptorMatrix& bank);

struct Match {
    GridCell src;
    GridCell tgt;
    double similarity = 0.0;  // cosine of the two descriptors
};

struct MatchSet {
    std::vector<Match> pairs;  // ordered by source cell, row-major
    FieldMeta src_meta;
    FieldMeta tgt_meta;
};

// Mutual nearest neighbours (best buddies) under cosine similarity.
MatchSet best_buddies(const DescriptorField& source, const DescriptorField& target, unsigned threads = 1);

struct KeypointMatch {
    GridCell source_cell;
    GridCell target_cell;
    PixelCoord target;  // center of target_cell
    double similarity = 0.0;
};

// match_keypoints with the matched cells and cosine similarities.
std::vector<KeypointMatch> match_keypoints_scored(std::span<const PixelCoord> source_keypoints,
                                                 const DescriptorField& source, const DescriptorField& target,
                                                 const BinningConfig& binning, unsigned threads = 1);

// Bins both fields, looks up the source patch under each keypoint and returns
// the center of its cosine nearest neighbour in the binned target field.
std::vector<PixelCoord> match_keypoints(std::span<const PixelCoord> source_keypoints, const DescriptorField& source,
                                        const DescriptorField& target, const BinningConfig& binning,
                                        unsigned threads = 1);

}  // namespace vitdesc
