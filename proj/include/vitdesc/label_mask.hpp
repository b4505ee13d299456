#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace vitdesc {

// Integer label per grid cell (or per pixel once upsampled). Label 0 is
// background; foreground segments and parts count up from 1. Cluster-index
// masks produced by assign() reuse the type with labels 0..k-1.
struct LabelMask {
    std::string image_id;
    int height = 0;
    int width = 0;
    std::vector<std::int32_t> labels;

    LabelMask() = default;
    LabelMask(std::string id, int h, int w, std::int32_t fill = 0)
        : image_id(std::move(id)), height(h), width(w), labels(static_cast<std::size_t>(h) * w, fill) {}

    std::size_t size() const { return labels.size(); }
    std::int32_t at(int row, int col) const { return labels[static_cast<std::size_t>(row) * width + col]; }
    std::int32_t& at(int row, int col) { return labels[static_cast<std::size_t>(row) * width + col]; }

    bool operator==(const LabelMask&) const = default;
};

}  // namespace vitdesc
