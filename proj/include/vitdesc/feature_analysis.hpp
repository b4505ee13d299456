#pragma once

#include "vitdesc/descriptor_store.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace vitdesc {

struct PcaResult {
    std::size_t dim = 0;
    int n_components = 0;
    std::vector<double> mean;                // dim
    std::vector<double> components;         // n_components x dim, orthonormal rows
    std::vector<double> projected;          // rows x n_components
    std::vector<double> explained_variance;  // non-increasing
    double total_variance = 0.0;
    // Set when the data has no variance; components are then an arbitrary
    // orthonormal set.
    bool degenerate = false;

    std::span<const double> component(int i) const { return {components.data() + i * dim, dim}; }
};

// Mean-centred PCA via eigendecomposition of the sample covariance (N - 1
// denominator). Each component is signed so its largest-magnitude entry is
// positive (first such entry on ties).
PcaResult pca(const DescriptorMatrix& matrix, int n_components);

// Raw (un-normalized) projections laid out on each field's grid.
struct ComponentMap {
    std::string image_id;
    int height = 0;
    int width = 0;
    std::vector<double> first;  // component 1, one value per cell
    std::vector<double> rgb;    // components 2..4 interleaved; empty when fewer than 4
};

// `pca_result` must come from pca(stack_fields(fields), ...).
std::vector<ComponentMap> component_maps(std::span<const DescriptorField> fields, const PcaResult& pca_result);

// Writes <image_id>_pca1.png (gray) and <image_id>_pca234.png (RGB) per field,
// min-max normalized over the whole set. Returns the written paths.
std::vector<std::filesystem::path> render_component_maps(std::span<const DescriptorField> fields,
                                                         const PcaResult& pca_result,
                                                         const std::filesystem::path& out_dir);

// Components as a VITD descriptor field: n_components x 1 grid of dim-D rows.
DescriptorField components_as_field(const PcaResult& pca_result, const FieldMeta& source_meta);

}  // namespace vitdesc
