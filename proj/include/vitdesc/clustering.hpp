#pragma once

#include "vitdesc/descriptor_store.hpp"
#include "vitdesc/label_mask.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vitdesc {

struct KMeansOptions {
    int k = 2;
    std::uint64_t seed = 0;
    int max_iters = 100;
    double tol = 1e-4;   // stop once no centroid moves farther than this
    int restarts = 1;    // independent seedings; the lowest-inertia run wins
    unsigned threads = 1;
};

struct ClusterModel {
    int k = 0;
    std::size_t dim = 0;
    std::vector<double> centroids;  // k x dim, row-major
    std::vector<int> labels;        // one per training row
    double inertia = 0.0;           // sum of squared distances to assigned centroid
    // Inertia after every assignment step of the winning run.
    std::vector<double> inertia_history;
    int iterations = 0;
    bool converged = false;

    std::span<const double> centroid(int j) const {
        return {centroids.data() + static_cast<std::size_t>(j) * dim, dim};
    }
    std::vector<int> cluster_sizes() const;
};

// Lloyd's algorithm with k-means++ seeding. Rows are used as given; callers
// that want cosine-like behaviour normalize first (l2_normalize_rows).
// Empty clusters are reseeded at the row farthest from its own centroid
// (lowest row index on ties). Deterministic for fixed inputs, independent of
// options.threads.
ClusterModel kmeans(const DescriptorMatrix& matrix, const KMeansOptions& options);

// Nearest centroid per row; ties go to the lower cluster index.
std::vector<int> assign_rows(const ClusterModel& model, const DescriptorMatrix& matrix, unsigned threads = 1);

// Per-cell nearest centroid. With l2_normalize the cell descriptors are
// normalized first, matching a model trained on normalized rows.
LabelMask assign(const ClusterModel& model, const DescriptorField& field, bool l2_normalize = true);

struct ElbowOptions {
    int k_min = 2;
    int k_max = 12;
    std::uint64_t seed = 0;
    double drop_threshold = 0.05;
    int max_iters = 100;
    double tol = 1e-4;
    int restarts = 1;
    unsigned threads = 1;
};

struct ElbowResult {
    int k = 0;
    std::vector<double> inertias;  // inertias[i] belongs to k_min + i
};

// Smallest k in [k_min, k_max) whose relative inertia drop to k + 1 is below
// drop_threshold; k_max when no k qualifies. A zero inertia counts as no drop.
ElbowResult elbow_select_k(const DescriptorMatrix& matrix, const ElbowOptions& options);

}  // namespace vitdesc
