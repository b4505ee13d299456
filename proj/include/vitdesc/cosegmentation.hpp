#pragma once

#include "vitdesc/clustering.hpp"
#include "vitdesc/descriptor_store.hpp"
#include "vitdesc/image_io.hpp"
#include "vitdesc/label_mask.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace vitdesc {

enum class VoteRule {
    // Each image where the cluster's segment saliency reaches tau casts a
    // vote; foreground needs at least vote_fraction * num_images votes.
    per_image,
    // Sum of segment saliencies over images must reach
    // tau * vote_fraction * num_images.
    summed,
};

struct VotingConfig {
    double tau = 0.2;
    double vote_fraction = 0.75;
    VoteRule rule = VoteRule::per_image;

    void validate() const;
};

// Mean saliency over the patches labelled cluster_id; nullopt when the
// cluster has no patch in this image.
std::optional<double> segment_saliency(const LabelMask& cluster_labels, const SaliencyField& saliency,
                                       int cluster_id);

// cluster id -> segment saliency in each image where the cluster is present.
using SegmentSaliencies = std::map<int, std::vector<double>>;

std::set<int> vote_foreground(const SegmentSaliencies& saliencies, const VotingConfig& cfg, int num_images);

// 1 where the cell's cluster is in fg, else 0.
std::vector<LabelMask> build_masks(std::span<const LabelMask> cluster_labels, const std::set<int>& fg);

// Grid mask -> pixel mask; every pixel takes the label of its nearest patch
// center (pixel_to_patch).
LabelMask upsample_nearest(const LabelMask& grid_mask, const FieldMeta& meta);

// Simplified colour-model refinement of a pixel-resolution binary seed.
// One diagonal Gaussian in RGB is fitted to seed foreground and one to seed
// background; each pixel takes the likelier label, then only foreground
// components (4-connected) touching the seed foreground survive. All-fg or
// all-bg seeds come back unchanged.
LabelMask refine_mask(const LabelMask& seed, const Image& image_rgb);

// Per-part variant: inside the foreground, each pixel moves to the part whose
// colour model is likeliest. Background pixels are untouched.
LabelMask refine_parts(const LabelMask& parts, const Image& image_rgb);

struct CosegOptions {
    bool l2_normalize = true;
    std::optional<int> k;  // fixed cluster count; elbow selection when unset
    int elbow_k_min = 2;
    int elbow_k_max = 12;
    double drop_threshold = 0.05;
    std::uint64_t seed = 0;
    int max_iters = 100;
    double tol = 1e-4;
    int restarts = 1;
    unsigned threads = 1;
    VotingConfig voting;
};

struct CosegResult {
    int k = 0;
    std::vector<double> elbow_inertias;  // empty when k was fixed
    ClusterModel model;
    SegmentSaliencies segment_saliencies;
    std::set<int> foreground;
    // Per non-augmented input field, in input order.
    std::vector<std::string> image_ids;
    std::vector<LabelMask> cluster_labels;
    std::vector<LabelMask> masks;  // binary, grid resolution
};

// Clusters every field (augmented ones included), votes with the saliency
// field of each non-augmented image (matched by image_id), and returns grid
// masks for the non-augmented images.
CosegResult cosegment(std::span<const DescriptorField> fields, std::span<const SaliencyField> saliencies,
                      const CosegOptions& options);

}  // namespace vitdesc
