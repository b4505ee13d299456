#include "vitdesc/clustering.hpp"

#include "vitdesc/errors.hpp"
#include "vitdesc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace vitdesc {

namespace {

double squared_distance(std::span<const float> x, std::span<const double> c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = static_cast<double>(x[i]) - c[i];
        acc += diff * diff;
    }
    return acc;
}

// Uniform double in [0, 1) from the top 53 bits; stable across standard
// library implementations, unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
    // splitmix64 step keeps restart streams decorrelated.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(restart + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<double> seed_plus_plus(const DescriptorMatrix& m, int k, std::mt19937_64& rng) {
    const std::size_t n = m.rows;
    const std::size_t d = m.dim;
    std::vector<double> centroids(static_cast<std::size_t>(k) * d);
    auto set_centroid = [&](int j, std::size_t row) {
        auto src = m.row(row);
        std::copy(src.begin(), src.end(), centroids.begin() + static_cast<std::ptrdiff_t>(j * d));
    };

    const auto first = std::min<std::size_t>(static_cast<std::size_t>(unit_uniform(rng) * n), n - 1);
    set_centroid(0, first);
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(m.row(i), {centroids.data(), d});

    for (int j = 1; j < k; ++j) {
        double total = 0.0;
        for (double v : nearest) total += v;
        std::size_t pick = n - 1;
        if (total > 0.0) {
            const double target = unit_uniform(rng) * total;
            double cumulative = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cumulative += nearest[i];
                if (cumulative > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = std::min<std::size_t>(static_cast<std::size_t>(unit_uniform(rng) * n), n - 1);
        }
        set_centroid(j, pick);
        std::span<const double> c{centroids.data() + j * d, d};
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_distance(m.row(i), c));
    }
    return centroids;
}

struct Assignment {
    std::vector<int> labels;
    std::vector<double> distances;
    double inertia = 0.0;
};

Assignment assign_all(const DescriptorMatrix& m, std::span<const double> centroids, int k, unsigned threads) {
    Assignment a;
    a.labels.assign(m.rows, 0);
    a.distances.assign(m.rows, 0.0);
    const std::size_t d = m.dim;
    parallel_for(m.rows, threads, [&](std::size_t i) {
        double best = std::numeric_limits<double>::infinity();
        int best_j = 0;
        for (int j = 0; j < k; ++j) {
            const double dist = squared_distance(m.row(i), centroids.subspan(j * d, d));
            if (dist < best) {
                best = dist;
                best_j = j;
            }
        }
        a.labels[i] = best_j;
        a.distances[i] = best;
    });
    for (double v : a.distances) a.inertia += v;
    return a;
}

std::vector<double> update_centroids(const DescriptorMatrix& m, const Assignment& a,
                                     std::span<const double> previous, int k, unsigned threads) {
    const std::size_t d = m.dim;
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < m.rows; ++i) members[a.labels[i]].push_back(i);

    std::vector<double> next(previous.begin(), previous.end());
    parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t j) {
        if (members[j].empty()) return;
        std::vector<double> sum(d, 0.0);
        for (std::size_t row : members[j]) {
            auto x = m.row(row);
            for (std::size_t c = 0; c < d; ++c) sum[c] += x[c];
        }
        const double inv = 1.0 / static_cast<double>(members[j].size());
        for (std::size_t c = 0; c < d; ++c) next[j * d + c] = sum[c] * inv;
    });

    // Reseed empties at the row farthest from its (updated) centroid.
    std::vector<double> far(m.rows);
    bool have_far = false;
    for (int j = 0; j < k; ++j) {
        if (!members[j].empty()) continue;
        if (!have_far) {
            for (std::size_t i = 0; i < m.rows; ++i) {
                far[i] = squared_distance(m.row(i), std::span<const double>(next).subspan(a.labels[i] * d, d));
            }
            have_far = true;
        }
        std::size_t pick = 0;
        for (std::size_t i = 1; i < m.rows; ++i) {
            if (far[i] > far[pick]) pick = i;
        }
        auto x = m.row(pick);
        std::copy(x.begin(), x.end(), next.begin() + static_cast<std::ptrdiff_t>(j * d));
        far[pick] = 0.0;
    }
    return next;
}

ClusterModel run_once(const DescriptorMatrix& m, const KMeansOptions& opt, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ClusterModel model;
    model.k = opt.k;
    model.dim = m.dim;
    model.centroids = seed_plus_plus(m, opt.k, rng);

    Assignment a = assign_all(m, model.centroids, opt.k, opt.threads);
    model.inertia_history.push_back(a.inertia);
    for (int iter = 1; iter <= opt.max_iters; ++iter) {
        auto next = update_centroids(m, a, model.centroids, opt.k, opt.threads);
        double shift = 0.0;
        for (int j = 0; j < opt.k; ++j) {
            double sq = 0.0;
            for (std::size_t c = 0; c < m.dim; ++c) {
                const double diff = next[j * m.dim + c] - model.centroids[j * m.dim + c];
                sq += diff * diff;
            }
            shift = std::max(shift, std::sqrt(sq));
        }
        model.centroids = std::move(next);
        Assignment fresh = assign_all(m, model.centroids, opt.k, opt.threads);
        model.inertia_history.push_back(fresh.inertia);
        model.iterations = iter;
        const bool unchanged = fresh.labels == a.labels;
        a = std::move(fresh);
        if (unchanged || shift < opt.tol) {
            model.converged = true;
            break;
        }
    }
    model.labels = std::move(a.labels);
    model.inertia = a.inertia;
    return model;
}

void check_matrix(const DescriptorMatrix& m) {
    if (m.rows == 0 || m.dim == 0) throw InputError("kmeans: empty matrix");
    if (m.data.size() != m.rows * m.dim) throw InputError("kmeans: matrix data size mismatch");
}

}  // namespace

std::vector<int> ClusterModel::cluster_sizes() const {
    std::vector<int> sizes(k, 0);
    for (int l : labels) ++sizes[l];
    return sizes;
}

ClusterModel kmeans(const DescriptorMatrix& matrix, const KMeansOptions& options) {
    check_matrix(matrix);
    if (options.k <= 0) throw InputError("kmeans: k must be positive");
    if (static_cast<std::size_t>(options.k) > matrix.rows) throw InputError("kmeans: k exceeds number of rows");
    if (!(options.tol > 0.0)) throw InputError("kmeans: tol must be positive");
    if (options.max_iters < 0 || options.restarts < 1) throw InputError("kmeans: invalid iteration settings");

    ClusterModel best;
    for (int r = 0; r < options.restarts; ++r) {
        const std::uint64_t seed = options.restarts == 1 ? options.seed : restart_seed(options.seed, r);
        ClusterModel candidate = run_once(matrix, options, seed);
        if (r == 0 || candidate.inertia < best.inertia) best = std::move(candidate);
    }
    if (!std::isfinite(best.inertia)) throw NumericalError("kmeans: non-finite inertia");
    return best;
}

std::vector<int> assign_rows(const ClusterModel& model, const DescriptorMatrix& matrix, unsigned threads) {
    if (matrix.dim != model.dim) throw InputError("assign: descriptor dim does not match centroids");
    return assign_all(matrix, model.centroids, model.k, threads).labels;
}

LabelMask assign(const ClusterModel& model, const DescriptorField& field, bool l2_normalize) {
    if (static_cast<std::size_t>(field.dim()) != model.dim) {
        throw InputError("assign: descriptor dim does not match centroids");
    }
    DescriptorMatrix m = stack_fields(std::span<const DescriptorField>(&field, 1));
    if (l2_normalize) l2_normalize_rows(m);
    LabelMask mask(field.meta().image_id, field.grid_h(), field.grid_w());
    const auto labels = assign_rows(model, m);
    std::copy(labels.begin(), labels.end(), mask.labels.begin());
    return mask;
}

ElbowResult elbow_select_k(const DescriptorMatrix& matrix, const ElbowOptions& options) {
    check_matrix(matrix);
    if (options.k_min < 1 || options.k_min >= options.k_max ||
        static_cast<std::size_t>(options.k_max) > matrix.rows) {
        throw InputError("elbow_select_k: need 1 <= k_min < k_max <= rows");
    }
    ElbowResult result;
    for (int k = options.k_min; k <= options.k_max; ++k) {
        KMeansOptions km{k, options.seed, options.max_iters, options.tol, options.restarts, options.threads};
        result.inertias.push_back(kmeans(matrix, km).inertia);
    }
    result.k = options.k_max;
    for (int k = options.k_min; k < options.k_max; ++k) {
        const double cur = result.inertias[k - options.k_min];
        const double nxt = result.inertias[k + 1 - options.k_min];
        const double drop = cur > 0.0 ? (cur - nxt) / cur : 0.0;
        if (drop < options.drop_threshold) {
            result.k = k;
            break;
        }
    }
    return result;
}

}  // namespace vitdesc
