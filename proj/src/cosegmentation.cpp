#include "vitdesc/cosegmentation.hpp"

#include "vitdesc/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace vitdesc {

void VotingConfig::validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("tau must lie in [0, 1]");
    if (!(vote_fraction > 0.0 && vote_fraction <= 1.0)) throw InputError("vote_fraction must lie in (0, 1]");
}

std::optional<double> segment_saliency(const LabelMask& cluster_labels, const SaliencyField& saliency,
                                       int cluster_id) {
    if (cluster_labels.height != saliency.grid_h() || cluster_labels.width != saliency.grid_w()) {
        throw InputError("segment_saliency: label grid does not match saliency grid");
    }
    double sum = 0.0;
    std::size_t count = 0;
    const auto values = saliency.values();
    for (std::size_t i = 0; i < cluster_labels.size(); ++i) {
        if (cluster_labels.labels[i] == cluster_id) {
            sum += values[i];
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

std::set<int> vote_foreground(const SegmentSaliencies& saliencies, const VotingConfig& cfg, int num_images) {
    cfg.validate();
    if (num_images <= 0) throw InputError("vote_foreground: num_images must be positive");
    // Counts are compared against fraction * n with a small slack so that
    // e.g. 0.7 * 10 is not rounded above 7.
    constexpr double kSlack = 1e-9;
    std::set<int> fg;
    for (const auto& [cluster, values] : saliencies) {
        if (cfg.rule == VoteRule::per_image) {
            const auto votes = std::count_if(values.begin(), values.end(), [&](double s) { return s >= cfg.tau; });
            if (static_cast<double>(votes) >= cfg.vote_fraction * num_images - kSlack) fg.insert(cluster);
        } else {
            double total = 0.0;
            for (double s : values) total += s;
            if (total >= cfg.tau * cfg.vote_fraction * num_images - kSlack) fg.insert(cluster);
        }
    }
    return fg;
}

std::vector<LabelMask> build_masks(std::span<const LabelMask> cluster_labels, const std::set<int>& fg) {
    std::vector<LabelMask> out;
    out.reserve(cluster_labels.size());
    for (const auto& labels : cluster_labels) {
        LabelMask mask(labels.image_id, labels.height, labels.width);
        for (std::size_t i = 0; i < labels.size(); ++i) mask.labels[i] = fg.contains(labels.labels[i]) ? 1 : 0;
        out.push_back(std::move(mask));
    }
    return out;
}

LabelMask upsample_nearest(const LabelMask& grid_mask, const FieldMeta& meta) {
    if (grid_mask.height != meta.grid_h() || grid_mask.width != meta.grid_w()) {
        throw InputError("upsample_nearest: mask does not match field grid");
    }
    LabelMask out(grid_mask.image_id, meta.image_height_px, meta.image_width_px);
    std::vector<int> col_of(meta.image_width_px);
    for (int x = 0; x < meta.image_width_px; ++x) col_of[x] = pixel_to_patch(0, x, meta).col;
    for (int y = 0; y < meta.image_height_px; ++y) {
        const int row = pixel_to_patch(y, 0, meta).row;
        for (int x = 0; x < meta.image_width_px; ++x) out.at(y, x) = grid_mask.at(row, col_of[x]);
    }
    return out;
}

namespace {

// Diagonal Gaussian colour model. Variances are floored at one grey level
// squared so flat colour regions stay well defined.
struct ColorModel {
    std::array<double, 3> mean{};
    std::array<double, 3> var{};
    double log_norm = 0.0;

    double log_likelihood(const std::uint8_t* px) const {
        double acc = log_norm;
        for (int c = 0; c < 3; ++c) {
            const double d = px[c] - mean[c];
            acc -= 0.5 * d * d / var[c];
        }
        return acc;
    }
};

constexpr double kVarianceFloor = 1.0;

template <typename Pred>
std::optional<ColorModel> fit_color_model(const Image& img, Pred&& include) {
    std::array<double, 3> sum{}, sq{};
    std::size_t n = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!include(y, x)) continue;
            const auto* px = img.at(y, x);
            for (int c = 0; c < 3; ++c) {
                sum[c] += px[c];
                sq[c] += static_cast<double>(px[c]) * px[c];
            }
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    ColorModel m;
    for (int c = 0; c < 3; ++c) {
        m.mean[c] = sum[c] / n;
        m.var[c] = std::max(kVarianceFloor, sq[c] / n - m.mean[c] * m.mean[c]);
        m.log_norm -= 0.5 * std::log(m.var[c]);
    }
    return m;
}

void check_image(const LabelMask& mask, const Image& img) {
    if (img.channels != 3) throw InputError("refinement needs an RGB image");
    if (img.height != mask.height || img.width != mask.width) {
        throw InputError("refinement: mask and image sizes differ");
    }
}

}  // namespace

LabelMask refine_mask(const LabelMask& seed, const Image& image_rgb) {
    check_image(seed, image_rgb);
    const auto fg_count = std::count_if(seed.labels.begin(), seed.labels.end(), [](int v) { return v != 0; });
    if (fg_count == 0 || static_cast<std::size_t>(fg_count) == seed.size()) return seed;

    const auto fg_model = fit_color_model(image_rgb, [&](int y, int x) { return seed.at(y, x) != 0; });
    const auto bg_model = fit_color_model(image_rgb, [&](int y, int x) { return seed.at(y, x) == 0; });

    LabelMask relabeled(seed.image_id, seed.height, seed.width);
    for (int y = 0; y < seed.height; ++y) {
        for (int x = 0; x < seed.width; ++x) {
            const auto* px = image_rgb.at(y, x);
            const double lf = fg_model->log_likelihood(px);
            const double lb = bg_model->log_likelihood(px);
            relabeled.at(y, x) = lf > lb ? 1 : (lf < lb ? 0 : (seed.at(y, x) != 0 ? 1 : 0));
        }
    }

    // Keep foreground components that overlap the seed foreground.
    LabelMask out(seed.image_id, seed.height, seed.width);
    std::vector<char> visited(seed.size(), 0);
    std::vector<std::size_t> component;
    std::queue<std::size_t> frontier;
    const int w = seed.width;
    for (std::size_t start = 0; start < seed.size(); ++start) {
        if (visited[start] || relabeled.labels[start] == 0) continue;
        component.clear();
        bool touches_seed = false;
        visited[start] = 1;
        frontier.push(start);
        while (!frontier.empty()) {
            const std::size_t idx = frontier.front();
            frontier.pop();
            component.push_back(idx);
            touches_seed = touches_seed || seed.labels[idx] != 0;
            const int y = static_cast<int>(idx / w);
            const int x = static_cast<int>(idx % w);
            const std::array<std::array<int, 2>, 4> nbrs = {{{y - 1, x}, {y + 1, x}, {y, x - 1}, {y, x + 1}}};
            for (const auto& [ny, nx] : nbrs) {
                if (ny < 0 || ny >= seed.height || nx < 0 || nx >= w) continue;
                const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
                if (!visited[n] && relabeled.labels[n] != 0) {
                    visited[n] = 1;
                    frontier.push(n);
                }
            }
        }
        if (touches_seed) {
            for (std::size_t idx : component) out.labels[idx] = 1;
        }
    }
    return out;
}

LabelMask refine_parts(const LabelMask& parts, const Image& image_rgb) {
    check_image(parts, image_rgb);
    const int max_label = parts.labels.empty() ? 0 : *std::max_element(parts.labels.begin(), parts.labels.end());
    std::vector<std::optional<ColorModel>> models(max_label + 1);
    for (int p = 1; p <= max_label; ++p) {
        models[p] = fit_color_model(image_rgb, [&](int y, int x) { return parts.at(y, x) == p; });
    }
    LabelMask out = parts;
    for (int y = 0; y < parts.height; ++y) {
        for (int x = 0; x < parts.width; ++x) {
            if (parts.at(y, x) == 0) continue;
            const auto* px = image_rgb.at(y, x);
            int best = parts.at(y, x);
            double best_ll = models[best]->log_likelihood(px);
            for (int p = 1; p <= max_label; ++p) {
                if (!models[p]) continue;
                const double ll = models[p]->log_likelihood(px);
                if (ll > best_ll) {
                    best_ll = ll;
                    best = p;
                }
            }
            out.at(y, x) = best;
        }
    }
    return out;
}

CosegResult cosegment(std::span<const DescriptorField> fields, std::span<const SaliencyField> saliencies,
                      const CosegOptions& options) {
    options.voting.validate();
    if (fields.empty()) throw InputError("cosegment: no descriptor fields");

    std::vector<std::size_t> primary;
    std::vector<const SaliencyField*> primary_saliency;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i].meta().augmented) continue;
        const auto& id = fields[i].meta().image_id;
        auto it = std::find_if(saliencies.begin(), saliencies.end(),
                               [&](const SaliencyField& s) { return s.meta().image_id == id; });
        if (it == saliencies.end()) throw InputError("cosegment: missing saliency for image " + id);
        if (it->grid_h() != fields[i].grid_h() || it->grid_w() != fields[i].grid_w()) {
            throw InputError("cosegment: saliency grid does not match descriptors for image " + id);
        }
        primary.push_back(i);
        primary_saliency.push_back(&*it);
    }
    if (primary.empty()) throw InputError("cosegment: every field is augmented");

    DescriptorMatrix matrix = stack_fields(fields);
    if (options.l2_normalize) l2_normalize_rows(matrix);

    CosegResult result;
    const int rows = static_cast<int>(std::min<std::size_t>(matrix.rows, std::numeric_limits<int>::max()));
    if (options.k) {
        result.k = *options.k;
    } else {
        const int k_max = std::min(options.elbow_k_max, rows);
        const int k_min = std::max(1, std::min(options.elbow_k_min, k_max));
        if (k_min >= k_max) {
            result.k = k_max;
        } else {
            ElbowOptions eo{k_min, k_max, options.seed, options.drop_threshold, options.max_iters,
                            options.tol, options.restarts, options.threads};
            auto elbow = elbow_select_k(matrix, eo);
            result.k = elbow.k;
            result.elbow_inertias = std::move(elbow.inertias);
        }
    }
    result.model = kmeans(matrix, {result.k, options.seed, options.max_iters, options.tol, options.restarts,
                                   options.threads});

    std::vector<LabelMask> all_labels;
    all_labels.reserve(fields.size());
    for (const auto& f : fields) all_labels.emplace_back(f.meta().image_id, f.grid_h(), f.grid_w());
    for (std::size_t r = 0; r < matrix.rows; ++r) {
        const auto& p = matrix.provenance[r];
        all_labels[p.image].at(p.row, p.col) = result.model.labels[r];
    }

    for (std::size_t n = 0; n < primary.size(); ++n) {
        result.image_ids.push_back(fields[primary[n]].meta().image_id);
        result.cluster_labels.push_back(std::move(all_labels[primary[n]]));
        for (int c = 0; c < result.k; ++c) {
            if (auto s = segment_saliency(result.cluster_labels.back(), *primary_saliency[n], c)) {
                result.segment_saliencies[c].push_back(*s);
            }
        }
    }
    result.foreground =
        vote_foreground(result.segment_saliencies, options.voting, static_cast<int>(primary.size()));
    result.masks = build_masks(result.cluster_labels, result.foreground);
    return result;
}

}  // namespace vitdesc
