#include "vitdesc/feature_analysis.hpp"

#include "vitdesc/errors.hpp"
#include "vitdesc/image_io.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace vitdesc {

PcaResult pca(const DescriptorMatrix& matrix, int n_components) {
    const auto n = static_cast<Eigen::Index>(matrix.rows);
    const auto d = static_cast<Eigen::Index>(matrix.dim);
    if (n < 2) throw InputError("pca: need at least two rows");
    if (n_components < 1 || n_components > std::min(n, d)) {
        throw InputError("pca: n_components must lie in [1, min(rows, dim)]");
    }

    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < d; ++c) x(i, c) = matrix.data[i * d + c];
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw NumericalError("pca: eigendecomposition failed");

    PcaResult out;
    out.dim = matrix.dim;
    out.n_components = n_components;
    out.mean.assign(mean.data(), mean.data() + d);
    out.total_variance = cov.trace();
    out.degenerate = !(out.total_variance > std::numeric_limits<double>::epsilon() * d);

    Eigen::MatrixXd basis(n_components, d);
    for (int k = 0; k < n_components; ++k) {
        // Eigen sorts eigenvalues ascending.
        const Eigen::Index src = d - 1 - k;
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Eigen::Index arg = 0;
        for (Eigen::Index c = 1; c < d; ++c) {
            if (std::abs(v(c)) > std::abs(v(arg))) arg = c;
        }
        if (v(arg) < 0.0) v = -v;
        basis.row(k) = v.transpose();
        out.explained_variance.push_back(out.degenerate ? 0.0 : std::max(0.0, solver.eigenvalues()(src)));
    }
    out.components.resize(static_cast<std::size_t>(n_components * d));
    for (int k = 0; k < n_components; ++k) {
        for (Eigen::Index c = 0; c < d; ++c) out.components[k * d + c] = basis(k, c);
    }
    const Eigen::MatrixXd proj = x * basis.transpose();
    out.projected.resize(static_cast<std::size_t>(n * n_components));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int k = 0; k < n_components; ++k) out.projected[i * n_components + k] = proj(i, k);
    }
    return out;
}

std::vector<ComponentMap> component_maps(std::span<const DescriptorField> fields, const PcaResult& pca_result) {
    std::size_t rows = 0;
    for (const auto& f : fields) rows += f.cells();
    if (rows * pca_result.n_components != pca_result.projected.size()) {
        throw InputError("component_maps: fields do not match the PCA input");
    }
    const int nc = pca_result.n_components;
    std::vector<ComponentMap> maps;
    std::size_t offset = 0;
    for (const auto& f : fields) {
        ComponentMap m{f.meta().image_id, f.grid_h(), f.grid_w(), {}, {}};
        for (std::size_t cell = 0; cell < f.cells(); ++cell) {
            const double* p = pca_result.projected.data() + (offset + cell) * nc;
            m.first.push_back(p[0]);
            if (nc >= 4) m.rgb.insert(m.rgb.end(), p + 1, p + 4);
        }
        offset += f.cells();
        maps.push_back(std::move(m));
    }
    return maps;
}

namespace {

std::uint8_t scale_to_byte(double v, double lo, double hi) {
    if (!(hi > lo)) return 0;
    return static_cast<std::uint8_t>(std::lround(255.0 * (v - lo) / (hi - lo)));
}

}  // namespace

std::vector<std::filesystem::path> render_component_maps(std::span<const DescriptorField> fields,
                                                         const PcaResult& pca_result,
                                                         const std::filesystem::path& out_dir) {
    const auto maps = component_maps(fields, pca_result);
    std::filesystem::create_directories(out_dir);

    double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1;
    std::array<double, 3> lo{lo1, lo1, lo1}, hi{hi1, hi1, hi1};
    for (const auto& m : maps) {
        for (double v : m.first) {
            lo1 = std::min(lo1, v);
            hi1 = std::max(hi1, v);
        }
        for (std::size_t i = 0; i < m.rgb.size(); ++i) {
            lo[i % 3] = std::min(lo[i % 3], m.rgb[i]);
            hi[i % 3] = std::max(hi[i % 3], m.rgb[i]);
        }
    }

    std::vector<std::filesystem::path> written;
    for (const auto& m : maps) {
        Image gray(m.height, m.width, 1);
        for (std::size_t i = 0; i < m.first.size(); ++i) gray.pixels[i] = scale_to_byte(m.first[i], lo1, hi1);
        written.push_back(out_dir / (m.image_id + "_pca1.png"));
        write_png(gray, written.back());
        if (m.rgb.empty()) continue;
        Image rgb(m.height, m.width, 3);
        for (std::size_t i = 0; i < m.rgb.size(); ++i) rgb.pixels[i] = scale_to_byte(m.rgb[i], lo[i % 3], hi[i % 3]);
        written.push_back(out_dir / (m.image_id + "_pca234.png"));
        write_png(rgb, written.back());
    }
    return written;
}

DescriptorField components_as_field(const PcaResult& pca_result, const FieldMeta& source_meta) {
    FieldMeta meta = source_meta;
    meta.image_id = "pca_components";
    meta.image_height_px = pca_result.n_components;
    meta.image_width_px = 1;
    meta.patch_size_px = 1;
    meta.stride_px = 1;
    meta.descriptor_dim = static_cast<int>(pca_result.dim);
    meta.augmented = false;
    std::vector<float> data(pca_result.components.begin(), pca_result.components.end());
    return DescriptorField(std::move(meta), std::move(data));
}

}  // namespace vitdesc
