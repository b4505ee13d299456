#pragma once

#include "vitdesc/descriptor_store.hpp"
#include "vitdesc/label_mask.hpp"

#include <span>
#include <vector>

namespace vitdesc {

// Binary metrics treat any non-zero label as foreground.

// |pred AND gt| / |pred OR gt|; 1.0 when both masks are empty.
double jaccard(const LabelMask& pred, const LabelMask& gt);

// Fraction of pixels where pred and gt agree (foreground and background).
double precision_px(const LabelMask& pred, const LabelMask& gt);

struct NmiAri {
    double nmi = 0.0;  // arithmetic-mean normalization
    double ari = 0.0;
    std::size_t samples = 0;
};

// Agreement between two labelings of the same samples. With foreground_only,
// samples whose gt label equals background_label are dropped first.
NmiAri nmi_ari(std::span<const int> pred, std::span<const int> gt, bool foreground_only, int background_label = 0);

// Percentage (0..100) of predictions within alpha * max(h, w) of the
// annotation; the radius is inclusive.
double pck(std::span<const PixelCoord> pred, std::span<const PixelCoord> gt, double alpha, int image_h, int image_w);

struct LandmarkSample {
    LabelMask parts;     // grid of part labels, 0 = background
    FieldMeta geometry;  // maps grid cells to pixels
    std::vector<PixelCoord> landmarks;  // normalized to [0, 1] by image size
};

struct LandmarkRegression {
    double error = 0.0;       // mean L2 error on the test split, x100
    bool used_ridge = false;  // design matrix was rank deficient
};

inline constexpr double kLandmarkRidge = 1e-4;

// Part centroids (normalized patch centers; the image-wide mean for a part
// that is absent) are stacked with a bias column, a least-squares linear map
// to all landmarks is fitted on train and scored on test.
LandmarkRegression landmark_regression_error(std::span<const LandmarkSample> train,
                                             std::span<const LandmarkSample> test, int num_parts);

// Feature row used by the regression: [y1, x1, ..., yP, xP].
std::vector<double> part_centroid_features(const LandmarkSample& sample, int num_parts);

}  // namespace vitdesc
