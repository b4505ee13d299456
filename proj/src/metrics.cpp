#include "vitdesc/metrics.hpp"

#include "vitdesc/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>

namespace vitdesc {

namespace {

void check_same_shape(const LabelMask& a, const LabelMask& b, const char* what) {
    if (a.height != b.height || a.width != b.width || a.size() != b.size()) {
        throw InputError(std::string(what) + ": mask shapes differ");
    }
}

double pairs(double n) {
    return n * (n - 1.0) / 2.0;
}

}  // namespace

double jaccard(const LabelMask& pred, const LabelMask& gt) {
    check_same_shape(pred, gt, "jaccard");
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred.labels[i] != 0;
        const bool g = gt.labels[i] != 0;
        inter += (p && g) ? 1 : 0;
        uni += (p || g) ? 1 : 0;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double precision_px(const LabelMask& pred, const LabelMask& gt) {
    check_same_shape(pred, gt, "precision_px");
    if (pred.size() == 0) throw InputError("precision_px: empty masks");
    std::size_t agree = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) agree += ((pred.labels[i] != 0) == (gt.labels[i] != 0)) ? 1 : 0;
    return static_cast<double>(agree) / static_cast<double>(pred.size());
}

NmiAri nmi_ari(std::span<const int> pred, std::span<const int> gt, bool foreground_only, int background_label) {
    if (pred.size() != gt.size()) throw InputError("nmi_ari: label lists differ in length");

    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> pred_count, gt_count;
    double n = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (foreground_only && gt[i] == background_label) continue;
        joint[{pred[i], gt[i]}] += 1.0;
        pred_count[pred[i]] += 1.0;
        gt_count[gt[i]] += 1.0;
        n += 1.0;
    }
    if (n == 0.0) throw InputError("nmi_ari: no samples left after filtering");

    NmiAri out;
    out.samples = static_cast<std::size_t>(n);

    auto entropy = [n](const std::map<int, double>& counts) {
        double h = 0.0;
        for (const auto& [label, c] : counts) h -= (c / n) * std::log(c / n);
        return h;
    };
    const double h_pred = entropy(pred_count);
    const double h_gt = entropy(gt_count);
    double mi = 0.0;
    for (const auto& [key, c] : joint) {
        mi += (c / n) * std::log(n * c / (pred_count[key.first] * gt_count[key.second]));
    }
    if (pred_count.size() == 1 && gt_count.size() == 1) {
        out.nmi = 1.0;
    } else {
        const double denom = 0.5 * (h_pred + h_gt);
        out.nmi = denom > 0.0 ? std::clamp(mi / denom, 0.0, 1.0) : 1.0;
    }

    double sum_joint = 0.0, sum_pred = 0.0, sum_gt = 0.0;
    for (const auto& [key, c] : joint) sum_joint += pairs(c);
    for (const auto& [label, c] : pred_count) sum_pred += pairs(c);
    for (const auto& [label, c] : gt_count) sum_gt += pairs(c);
    const double total = pairs(n);
    if (total == 0.0) {
        out.ari = 1.0;
    } else {
        const double expected = sum_pred * sum_gt / total;
        const double max_index = 0.5 * (sum_pred + sum_gt);
        out.ari = max_index == expected ? 1.0 : (sum_joint - expected) / (max_index - expected);
    }
    return out;
}

double pck(std::span<const PixelCoord> pred, std::span<const PixelCoord> gt, double alpha, int image_h, int image_w) {
    if (pred.size() != gt.size()) throw InputError("pck: keypoint lists differ in length");
    if (!(alpha > 0.0)) throw InputError("pck: alpha must be positive");
    if (pred.empty()) throw InputError("pck: no keypoints");
    const double radius = alpha * std::max(image_h, image_w);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (std::hypot(pred[i].y - gt[i].y, pred[i].x - gt[i].x) <= radius) ++hits;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

std::vector<double> part_centroid_features(const LandmarkSample& sample, int num_parts) {
    const auto& meta = sample.geometry;
    const auto& mask = sample.parts;
    if (mask.height != meta.grid_h() || mask.width != meta.grid_w()) {
        throw InputError("landmark regression: part mask does not match geometry");
    }
    std::vector<double> sum_y(num_parts + 1, 0.0), sum_x(num_parts + 1, 0.0), count(num_parts + 1, 0.0);
    double all_y = 0.0, all_x = 0.0;
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            const auto center = patch_center_px(r, c, meta);
            const double y = center.y / meta.image_height_px;
            const double x = center.x / meta.image_width_px;
            all_y += y;
            all_x += x;
            const int label = mask.at(r, c);
            if (label < 0 || label > num_parts) throw InputError("landmark regression: part label out of range");
            sum_y[label] += y;
            sum_x[label] += x;
            count[label] += 1.0;
        }
    }
    const double cells = static_cast<double>(mask.size());
    std::vector<double> features;
    features.reserve(2 * num_parts);
    for (int p = 1; p <= num_parts; ++p) {
        if (count[p] > 0.0) {
            features.push_back(sum_y[p] / count[p]);
            features.push_back(sum_x[p] / count[p]);
        } else {
            features.push_back(all_y / cells);
            features.push_back(all_x / cells);
        }
    }
    return features;
}

LandmarkRegression landmark_regression_error(std::span<const LandmarkSample> train,
                                             std::span<const LandmarkSample> test, int num_parts) {
    if (num_parts <= 0) throw InputError("landmark regression: num_parts must be positive");
    if (train.empty() || test.empty()) throw InputError("landmark regression: empty split");
    const std::size_t n_landmarks = train.front().landmarks.size();
    if (n_landmarks == 0) throw InputError("landmark regression: no landmarks");
    auto check = [&](const LandmarkSample& s) {
        if (s.landmarks.size() != n_landmarks) throw InputError("landmark regression: landmark count differs");
    };

    const Eigen::Index cols = 2 * num_parts + 1;
    auto design = [&](std::span<const LandmarkSample> samples) {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), cols);
        Eigen::MatrixXd y(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(2 * n_landmarks));
        for (std::size_t i = 0; i < samples.size(); ++i) {
            check(samples[i]);
            const auto f = part_centroid_features(samples[i], num_parts);
            for (std::size_t c = 0; c < f.size(); ++c) x(i, c) = f[c];
            x(i, cols - 1) = 1.0;
            for (std::size_t l = 0; l < n_landmarks; ++l) {
                y(i, 2 * l) = samples[i].landmarks[l].y;
                y(i, 2 * l + 1) = samples[i].landmarks[l].x;
            }
        }
        return std::pair{x, y};
    };

    const auto [x_train, y_train] = design(train);
    LandmarkRegression out;
    Eigen::MatrixXd weights;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x_train);
    if (qr.rank() == cols) {
        weights = qr.solve(y_train);
    } else {
        out.used_ridge = true;
        const Eigen::MatrixXd gram =
            x_train.transpose() * x_train + kLandmarkRidge * Eigen::MatrixXd::Identity(cols, cols);
        weights = gram.ldlt().solve(x_train.transpose() * y_train);
    }
    if (!weights.allFinite()) throw NumericalError("landmark regression: fit produced non-finite weights");

    const auto [x_test, y_test] = design(test);
    const Eigen::MatrixXd predicted = x_test * weights;
    double total = 0.0;
    for (Eigen::Index i = 0; i < predicted.rows(); ++i) {
        for (std::size_t l = 0; l < n_landmarks; ++l) {
            const auto c = static_cast<Eigen::Index>(2 * l);
            total += std::hypot(predicted(i, c) - y_test(i, c), predicted(i, c + 1) - y_test(i, c + 1));
        }
    }
    out.error = 100.0 * total / static_cast<double>(predicted.rows() * static_cast<Eigen::Index>(n_landmarks));
    return out;
}

}  // namespace vitdesc
