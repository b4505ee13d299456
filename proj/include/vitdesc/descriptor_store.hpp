#pragma once

// Dense patch descriptors and their on-disk container ("VITD").
//
// Layout of a VITD file:
//   bytes 0..3   magic "VITD"
//   bytes 4..7   format version, u32 little-endian (currently 1)
//   bytes 8..11  header length H, u32 little-endian
//   next H bytes UTF-8 JSON header (FieldMeta + grid_h, grid_w, kind)
//   remainder    grid_h * grid_w * D float32 little-endian, (row, col, channel)

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vitdesc {

inline constexpr std::uint32_t kFormatVersion = 1;

enum class Facet { key, query, value, token };

std::string_view to_string(Facet facet);
Facet parse_facet(std::string_view name);  // throws InputError

struct FieldMeta {
    std::string image_id;
    int image_height_px = 0;
    int image_width_px = 0;
    int patch_size_px = 0;
    int stride_px = 0;
    int layer_index = 0;
    Facet facet = Facet::key;
    std::string model_id;
    int descriptor_dim = 0;
    // Set for descriptors of crop/flip augmentations: they take part in
    // clustering but never get a mask of their own.
    bool augmented = false;

    // floor((H - P) / s) + 1; zero when the image is smaller than a patch.
    int grid_h() const;
    int grid_w() const;

    // Throws InvariantError on non-positive sizes, s > P, or an empty grid.
    void validate() const;

    bool operator==(const FieldMeta&) const = default;
};

struct PixelCoord {
    double y = 0.0;
    double x = 0.0;
    bool operator==(const PixelCoord&) const = default;
};

struct GridCell {
    int row = 0;
    int col = 0;
    bool operator==(const GridCell&) const = default;
};

class DescriptorField {
public:
    // Validates meta, payload length and finiteness; throws InvariantError.
    DescriptorField(FieldMeta meta, std::vector<float> data);

    const FieldMeta& meta() const { return meta_; }
    int grid_h() const { return grid_h_; }
    int grid_w() const { return grid_w_; }
    int dim() const { return meta_.descriptor_dim; }
    std::size_t cells() const { return static_cast<std::size_t>(grid_h_) * grid_w_; }

    std::span<const float> data() const { return data_; }
    std::span<const float> at(int row, int col) const;
    std::span<const float> cell(std::size_t linear) const;

    bool operator==(const DescriptorField&) const = default;

private:
    FieldMeta meta_;
    int grid_h_ = 0;
    int grid_w_ = 0;
    std::vector<float> data_;
};

// Per-patch scalar in [0, 1]; meta.descriptor_dim is always 1.
class SaliencyField {
public:
    SaliencyField(FieldMeta meta, std::vector<float> values);

    const FieldMeta& meta() const { return meta_; }
    int grid_h() const { return grid_h_; }
    int grid_w() const { return grid_w_; }
    std::size_t cells() const { return values_.size(); }
    std::span<const float> values() const { return values_; }
    float at(int row, int col) const { return values_[static_cast<std::size_t>(row) * grid_w_ + col]; }

    bool operator==(const SaliencyField&) const = default;

private:
    FieldMeta meta_;
    int grid_h_ = 0;
    int grid_w_ = 0;
    std::vector<float> values_;
};

using StoredField = std::variant<DescriptorField, SaliencyField>;

// Writes to a sibling temp file first and renames, so readers never observe a
// partially written file.
void write_field(const DescriptorField& field, const std::filesystem::path& path);
void write_field(const SaliencyField& field, const std::filesystem::path& path);

// Serialized bytes, exactly as write_field puts them on disk.
std::vector<std::uint8_t> encode_field(const DescriptorField& field);
std::vector<std::uint8_t> encode_field(const SaliencyField& field);

StoredField read_field(const std::filesystem::path& path);
StoredField decode_field(std::span<const std::uint8_t> bytes);

// Typed convenience readers; a kind mismatch is a HeaderError.
DescriptorField read_descriptor_field(const std::filesystem::path& path);
SaliencyField read_saliency_field(const std::filesystem::path& path);

PixelCoord patch_center_px(int row, int col, const FieldMeta& meta);

// Nearest patch center, clamped to the grid. Exact ties go to the lower index.
GridCell pixel_to_patch(double y, double x, const FieldMeta& meta);

struct PatchRef {
    std::size_t image = 0;  // index into DescriptorMatrix::image_ids
    int row = 0;
    int col = 0;
    bool operator==(const PatchRef&) const = default;
};

// Row-major bag of descriptors with per-row provenance.
struct DescriptorMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<float> data;
    std::vector<PatchRef> provenance;
    std::vector<std::string> image_ids;

    std::span<const float> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
    std::span<float> row(std::size_t i) { return {data.data() + i * dim, dim}; }
};

// Input order, then row-major within each field. Throws InputError on an
// empty list or mismatched descriptor dims.
DescriptorMatrix stack_fields(std::span<const DescriptorField> fields);

// Scales every non-zero row to unit L2 norm in place.
void l2_normalize_rows(DescriptorMatrix& matrix);

}  // namespace vitdesc
