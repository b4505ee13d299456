#include "vitdesc/descriptor_store.hpp"

#include "vitdesc/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

namespace vitdesc {

namespace {

constexpr std::uint8_t kMagic[4] = {'V', 'I', 'T', 'D'};
constexpr std::size_t kPreambleBytes = 12;

void put_u32(std::vector<std::uint8_t>& out, std::size_t offset, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out[offset + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
    return v;
}

std::vector<float> checked_payload(const FieldMeta& meta, std::vector<float> data, const char* what) {
    meta.validate();
    const auto expected = static_cast<std::size_t>(meta.grid_h()) * meta.grid_w() * meta.descriptor_dim;
    if (data.size() != expected) {
        throw InvariantError(std::string(what) + ": payload has " + std::to_string(data.size()) +
                             " floats, grid needs " + std::to_string(expected));
    }
    if (!std::all_of(data.begin(), data.end(), [](float v) { return std::isfinite(v); })) {
        throw InvariantError(std::string(what) + ": non-finite value in payload");
    }
    return data;
}

nlohmann::json meta_to_json(const FieldMeta& m, std::string_view kind) {
    return {
        {"kind", kind},
        {"image_id", m.image_id},
        {"image_height_px", m.image_height_px},
        {"image_width_px", m.image_width_px},
        {"patch_size_px", m.patch_size_px},
        {"stride_px", m.stride_px},
        {"layer_index", m.layer_index},
        {"facet", to_string(m.facet)},
        {"model_id", m.model_id},
        {"descriptor_dim", m.descriptor_dim},
        {"augmented", m.augmented},
        {"grid_h", m.grid_h()},
        {"grid_w", m.grid_w()},
    };
}

std::vector<std::uint8_t> encode(const FieldMeta& meta, std::string_view kind, std::span<const float> payload) {
    const std::string header = meta_to_json(meta, kind).dump();
    std::vector<std::uint8_t> out(kPreambleBytes + header.size() + payload.size() * 4);
    std::copy(std::begin(kMagic), std::end(kMagic), out.begin());
    put_u32(out, 4, kFormatVersion);
    put_u32(out, 8, static_cast<std::uint32_t>(header.size()));
    std::copy(header.begin(), header.end(), out.begin() + kPreambleBytes);
    std::size_t offset = kPreambleBytes + header.size();
    for (float v : payload) {
        put_u32(out, offset, std::bit_cast<std::uint32_t>(v));
        offset += 4;
    }
    return out;
}

void write_bytes(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open for writing: " + tmp.string());
        os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!os) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

template <typename T>
T require(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw HeaderError(std::string("header missing key: ") + key);
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw HeaderError(std::string("header key has wrong type: ") + key);
    }
}

}  // namespace

std::string_view to_string(Facet facet) {
    switch (facet) {
        case Facet::key: return "key";
        case Facet::query: return "query";
        case Facet::value: return "value";
        case Facet::token: return "token";
    }
    return "key";
}

Facet parse_facet(std::string_view name) {
    if (name == "key") return Facet::key;
    if (name == "query") return Facet::query;
    if (name == "value") return Facet::value;
    if (name == "token") return Facet::token;
    throw InputError("unknown facet: " + std::string(name));
}

int FieldMeta::grid_h() const {
    if (stride_px <= 0 || image_height_px < patch_size_px) return 0;
    return (image_height_px - patch_size_px) / stride_px + 1;
}

int FieldMeta::grid_w() const {
    if (stride_px <= 0 || image_width_px < patch_size_px) return 0;
    return (image_width_px - patch_size_px) / stride_px + 1;
}

void FieldMeta::validate() const {
    if (image_height_px <= 0 || image_width_px <= 0) throw InvariantError("image size must be positive");
    if (patch_size_px <= 0 || stride_px <= 0) throw InvariantError("patch size and stride must be positive");
    if (stride_px > patch_size_px) throw InvariantError("stride must not exceed patch size");
    if (descriptor_dim <= 0) throw InvariantError("descriptor_dim must be positive");
    if (layer_index < 0) throw InvariantError("layer_index must be non-negative");
    if (grid_h() < 1 || grid_w() < 1) throw InvariantError("image smaller than one patch");
}

DescriptorField::DescriptorField(FieldMeta meta, std::vector<float> data)
    : meta_(std::move(meta)), data_(checked_payload(meta_, std::move(data), "descriptor field")) {
    grid_h_ = meta_.grid_h();
    grid_w_ = meta_.grid_w();
}

std::span<const float> DescriptorField::at(int row, int col) const {
    if (row < 0 || row >= grid_h_ || col < 0 || col >= grid_w_) throw InputError("grid cell out of range");
    return cell(static_cast<std::size_t>(row) * grid_w_ + col);
}

std::span<const float> DescriptorField::cell(std::size_t linear) const {
    const auto d = static_cast<std::size_t>(meta_.descriptor_dim);
    return {data_.data() + linear * d, d};
}

SaliencyField::SaliencyField(FieldMeta meta, std::vector<float> values) : meta_(std::move(meta)) {
    if (meta_.descriptor_dim != 1) throw InvariantError("saliency field must have descriptor_dim 1");
    values_ = checked_payload(meta_, std::move(values), "saliency field");
    if (!std::all_of(values_.begin(), values_.end(), [](float v) { return v >= 0.0f && v <= 1.0f; })) {
        throw InvariantError("saliency values must lie in [0, 1]");
    }
    grid_h_ = meta_.grid_h();
    grid_w_ = meta_.grid_w();
}

std::vector<std::uint8_t> encode_field(const DescriptorField& field) {
    return encode(field.meta(), "descriptor", field.data());
}

std::vector<std::uint8_t> encode_field(const SaliencyField& field) {
    return encode(field.meta(), "saliency", field.values());
}

void write_field(const DescriptorField& field, const std::filesystem::path& path) {
    write_bytes(encode_field(field), path);
}

void write_field(const SaliencyField& field, const std::filesystem::path& path) {
    write_bytes(encode_field(field), path);
}

StoredField decode_field(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) throw ShapeMismatchError("file truncated before magic");
    if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) throw BadMagicError("bad magic bytes");
    if (bytes.size() < kPreambleBytes) throw ShapeMismatchError("file truncated inside preamble");
    const std::uint32_t version = get_u32(bytes, 4);
    if (version != kFormatVersion) throw UnsupportedVersionError("unsupported format version " + std::to_string(version));
    const std::uint64_t header_len = get_u32(bytes, 8);
    if (kPreambleBytes + header_len > bytes.size()) throw ShapeMismatchError("file truncated inside header");

    const auto* header_begin = reinterpret_cast<const char*>(bytes.data() + kPreambleBytes);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_begin, header_begin + header_len);
    } catch (const nlohmann::json::exception& e) {
        throw HeaderError(std::string("header is not valid JSON: ") + e.what());
    }
    if (!header.is_object()) throw HeaderError("header must be a JSON object");

    FieldMeta meta;
    meta.image_id = require<std::string>(header, "image_id");
    meta.image_height_px = require<int>(header, "image_height_px");
    meta.image_width_px = require<int>(header, "image_width_px");
    meta.patch_size_px = require<int>(header, "patch_size_px");
    meta.stride_px = require<int>(header, "stride_px");
    meta.layer_index = require<int>(header, "layer_index");
    meta.model_id = require<std::string>(header, "model_id");
    meta.descriptor_dim = require<int>(header, "descriptor_dim");
    if (header.contains("augmented")) meta.augmented = require<bool>(header, "augmented");
    try {
        meta.facet = parse_facet(require<std::string>(header, "facet"));
    } catch (const HeaderError&) {
        throw;
    } catch (const InputError& e) {
        throw HeaderError(e.what());
    }
    const auto kind = require<std::string>(header, "kind");
    const int grid_h = require<int>(header, "grid_h");
    const int grid_w = require<int>(header, "grid_w");
    try {
        meta.validate();
    } catch (const InvariantError& e) {
        throw HeaderError(std::string("invalid metadata: ") + e.what());
    }
    if (grid_h != meta.grid_h() || grid_w != meta.grid_w()) {
        throw ShapeMismatchError("header grid disagrees with image geometry");
    }

    const std::uint64_t count = static_cast<std::uint64_t>(grid_h) * grid_w * meta.descriptor_dim;
    const std::uint64_t payload_bytes = bytes.size() - kPreambleBytes - header_len;
    if (payload_bytes != count * 4) {
        throw ShapeMismatchError("payload is " + std::to_string(payload_bytes) + " bytes, header implies " +
                                 std::to_string(count * 4));
    }
    std::vector<float> payload(count);
    const std::size_t base = kPreambleBytes + header_len;
    for (std::size_t i = 0; i < count; ++i) {
        payload[i] = std::bit_cast<float>(get_u32(bytes, base + 4 * i));
        if (!std::isfinite(payload[i])) throw NonFiniteError("non-finite value at payload index " + std::to_string(i));
    }

    if (kind == "descriptor") return DescriptorField(std::move(meta), std::move(payload));
    if (kind == "saliency") {
        if (meta.descriptor_dim != 1) throw HeaderError("saliency field must have descriptor_dim 1");
        for (float v : payload) {
            if (v < 0.0f || v > 1.0f) throw FormatError("saliency value outside [0, 1]");
        }
        return SaliencyField(std::move(meta), std::move(payload));
    }
    throw HeaderError("unknown field kind: " + kind);
}

StoredField read_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (is.bad()) throw IoError("read failed: " + path.string());
    return decode_field(bytes);
}

DescriptorField read_descriptor_field(const std::filesystem::path& path) {
    auto field = read_field(path);
    if (auto* d = std::get_if<DescriptorField>(&field)) return std::move(*d);
    throw HeaderError("expected a descriptor field: " + path.string());
}

SaliencyField read_saliency_field(const std::filesystem::path& path) {
    auto field = read_field(path);
    if (auto* s = std::get_if<SaliencyField>(&field)) return std::move(*s);
    throw HeaderError("expected a saliency field: " + path.string());
}

PixelCoord patch_center_px(int row, int col, const FieldMeta& meta) {
    if (row < 0 || row >= meta.grid_h() || col < 0 || col >= meta.grid_w()) {
        throw InputError("patch index out of range");
    }
    const double half = (meta.patch_size_px - 1) / 2.0;
    return {row * static_cast<double>(meta.stride_px) + half, col * static_cast<double>(meta.stride_px) + half};
}

namespace {

int nearest_index(double coord, const FieldMeta& meta, int count) {
    const double t = (coord - (meta.patch_size_px - 1) / 2.0) / meta.stride_px;
    // ceil(t - 0.5) rounds to nearest with exact halves going down.
    const int idx = static_cast<int>(std::ceil(t - 0.5));
    return std::clamp(idx, 0, count - 1);
}

}  // namespace

GridCell pixel_to_patch(double y, double x, const FieldMeta& meta) {
    if (!(y >= 0.0 && y < meta.image_height_px && x >= 0.0 && x < meta.image_width_px)) {
        throw InputError("pixel outside image bounds");
    }
    // Centers lie on a separable lattice, so the Euclidean nearest center is
    // the per-axis nearest.
    return {nearest_index(y, meta, meta.grid_h()), nearest_index(x, meta, meta.grid_w())};
}

DescriptorMatrix stack_fields(std::span<const DescriptorField> fields) {
    if (fields.empty()) throw InputError("stack_fields: no fields");
    const int dim = fields.front().dim();
    std::size_t total = 0;
    for (const auto& f : fields) {
        if (f.dim() != dim) {
            throw InputError("stack_fields: descriptor dim mismatch (" + std::to_string(dim) + " vs " +
                             std::to_string(f.dim()) + ")");
        }
        total += f.cells();
    }
    DescriptorMatrix m;
    m.rows = total;
    m.dim = static_cast<std::size_t>(dim);
    m.data.reserve(total * m.dim);
    m.provenance.reserve(total);
    for (std::size_t img = 0; img < fields.size(); ++img) {
        const auto& f = fields[img];
        m.image_ids.push_back(f.meta().image_id);
        m.data.insert(m.data.end(), f.data().begin(), f.data().end());
        for (int r = 0; r < f.grid_h(); ++r) {
            for (int c = 0; c < f.grid_w(); ++c) m.provenance.push_back({img, r, c});
        }
    }
    return m;
}

void l2_normalize_rows(DescriptorMatrix& matrix) {
    for (std::size_t i = 0; i < matrix.rows; ++i) {
        auto r = matrix.row(i);
        double sq = 0.0;
        for (float v : r) sq += static_cast<double>(v) * v;
        if (sq <= 0.0) continue;
        const double inv = 1.0 / std::sqrt(sq);
        for (float& v : r) v = static_cast<float>(v * inv);
    }
}

}  // namespace vitdesc
