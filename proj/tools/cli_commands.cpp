#include "cli_commands.hpp"

#include "vitdesc/binning.hpp"
#include "vitdesc/correspondence.hpp"
#include "vitdesc/cosegmentation.hpp"
#include "vitdesc/descriptor_store.hpp"
#include "vitdesc/errors.hpp"
#include "vitdesc/feature_analysis.hpp"
#include "vitdesc/image_io.hpp"
#include "vitdesc/metrics.hpp"
#include "vitdesc/part_cosegmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;

namespace vitdesc::cli {

namespace {

struct InputSet {
    std::vector<DescriptorField> fields;  // sorted by file name
    std::vector<SaliencyField> saliencies;
};

InputSet load_input_dir(const std::string& dir, int layer, const std::string& facet_name) {
    if (dir.empty()) throw InputError("--input-dir is required");
    if (!fs::is_directory(dir)) throw InputError("input directory does not exist: " + dir);
    const Facet facet = parse_facet(facet_name);

    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".vitd") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());

    InputSet set;
    for (const auto& p : paths) {
        auto stored = read_field(p);
        if (auto* s = std::get_if<SaliencyField>(&stored)) {
            set.saliencies.push_back(std::move(*s));
            continue;
        }
        auto& d = std::get<DescriptorField>(stored);
        if (d.meta().layer_index == layer && d.meta().facet == facet) set.fields.push_back(std::move(d));
    }
    if (set.fields.empty()) {
        throw InputError("no descriptor files for layer " + std::to_string(layer) + ", facet " + facet_name +
                         " in " + dir);
    }
    const auto& ref = set.fields.front().meta();
    for (const auto& f : set.fields) {
        const auto& m = f.meta();
        if (m.descriptor_dim != ref.descriptor_dim || m.model_id != ref.model_id ||
            m.patch_size_px != ref.patch_size_px || m.stride_px != ref.stride_px) {
            throw InputError("inconsistent descriptor metadata between " + ref.image_id + " and " + m.image_id);
        }
    }
    return set;
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw InputError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

Image binary_to_image(const LabelMask& mask) {
    Image img(mask.height, mask.width, 1);
    for (std::size_t i = 0; i < mask.size(); ++i) img.pixels[i] = mask.labels[i] != 0 ? 255 : 0;
    return img;
}

Image labels_to_image(const LabelMask& mask) {
    Image img(mask.height, mask.width, 1);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        img.pixels[i] = static_cast<std::uint8_t>(std::clamp(mask.labels[i], 0, 255));
    }
    return img;
}

LabelMask image_to_labels(const Image& img, bool binary) {
    LabelMask mask("", img.height, img.width);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const std::uint8_t v = img.pixels[i * img.channels];
        mask.labels[i] = binary ? (v != 0 ? 1 : 0) : v;
    }
    return mask;
}

std::array<std::uint8_t, 3> part_color(int label) {
    static constexpr std::array<std::array<std::uint8_t, 3>, 10> kPalette = {{
        {31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40}, {148, 103, 189},
        {140, 86, 75}, {227, 119, 194}, {127, 127, 127}, {188, 189, 34}, {23, 190, 207},
    }};
    if (label <= 0) return {0, 0, 0};
    const auto base = kPalette[(label - 1) % kPalette.size()];
    // Cycle brightness once the palette wraps.
    const int cycle = (label - 1) / static_cast<int>(kPalette.size());
    std::array<std::uint8_t, 3> c{};
    for (int i = 0; i < 3; ++i) c[i] = static_cast<std::uint8_t>(base[i] / (1 + cycle));
    return c;
}

Image part_overlay(const LabelMask& parts, const Image* rgb) {
    Image out(parts.height, parts.width, 3);
    for (int y = 0; y < parts.height; ++y) {
        for (int x = 0; x < parts.width; ++x) {
            const auto c = part_color(parts.at(y, x));
            auto* dst = out.at(y, x);
            for (int ch = 0; ch < 3; ++ch) {
                if (!rgb) {
                    dst[ch] = c[ch];
                } else if (parts.at(y, x) == 0) {
                    dst[ch] = static_cast<std::uint8_t>(rgb->at(y, x)[ch] * 3 / 10);
                } else {
                    dst[ch] = static_cast<std::uint8_t>((rgb->at(y, x)[ch] + c[ch]) / 2);
                }
            }
        }
    }
    return out;
}

Image mask_overlay(const LabelMask& mask, const Image& rgb) {
    Image out(mask.height, mask.width, 3);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            for (int ch = 0; ch < 3; ++ch) {
                const int v = rgb.at(y, x)[ch];
                out.at(y, x)[ch] = static_cast<std::uint8_t>(mask.at(y, x) != 0 ? v : v * 3 / 10);
            }
        }
    }
    return out;
}

std::optional<Image> load_image_for(const std::string& image_dir, const FieldMeta& meta) {
    if (image_dir.empty()) return std::nullopt;
    const fs::path p = fs::path(image_dir) / (meta.image_id + ".png");
    if (!fs::exists(p)) return std::nullopt;
    Image img = read_png(p);
    if (img.height != meta.image_height_px || img.width != meta.image_width_px) {
        throw InputError("image size of " + p.string() + " differs from descriptor metadata");
    }
    return img;
}

CosegOptions coseg_options(const CosegConfig& c, unsigned threads) {
    CosegOptions o;
    o.l2_normalize = c.normalize;
    if (c.k > 0) o.k = c.k;
    o.elbow_k_min = c.k_min;
    o.elbow_k_max = c.k_max;
    o.drop_threshold = c.drop_threshold;
    o.seed = c.seed;
    o.max_iters = c.max_iters;
    o.tol = c.tol;
    o.restarts = c.restarts;
    o.threads = threads;
    o.voting.tau = c.tau;
    o.voting.vote_fraction = c.vote_fraction;
    if (c.vote_rule == "per_image") {
        o.voting.rule = VoteRule::per_image;
    } else if (c.vote_rule == "summed") {
        o.voting.rule = VoteRule::summed;
    } else {
        throw InputError("unknown vote rule: " + c.vote_rule);
    }
    return o;
}

struct CosegRun {
    InputSet input;
    CosegResult result;
    std::vector<const DescriptorField*> primary;  // aligned with result.masks
    std::vector<LabelMask> pixel_masks;
    std::vector<std::optional<Image>> images;
    json report;
};

CosegRun coseg_stage(const CosegConfig& config, unsigned threads, const char* command) {
    CosegRun run;
    run.input = load_input_dir(config.input_dir, config.layer, config.facet);
    run.result = cosegment(run.input.fields, run.input.saliencies, coseg_options(config, threads));

    const fs::path out_dir = config.out_dir;
    fs::create_directories(out_dir);

    json images = json::array();
    for (std::size_t i = 0; i < run.result.masks.size(); ++i) {
        const auto& id = run.result.image_ids[i];
        auto it = std::find_if(run.input.fields.begin(), run.input.fields.end(), [&](const DescriptorField& f) {
            return !f.meta().augmented && f.meta().image_id == id;
        });
        const FieldMeta& meta = it->meta();
        run.primary.push_back(&*it);

        const LabelMask& grid = run.result.masks[i];
        LabelMask px = upsample_nearest(grid, meta);
        auto image = config.refine ? load_image_for(config.image_dir, meta) : std::nullopt;
        if (image) px = refine_mask(px, *image);

        write_png(binary_to_image(grid), out_dir / (id + "_mask_grid.png"));
        write_png(binary_to_image(px), out_dir / (id + "_mask.png"));
        if (image) write_png(mask_overlay(px, *image), out_dir / (id + "_overlay.png"));

        const auto fg_patches = std::count(grid.labels.begin(), grid.labels.end(), 1);
        images.push_back({{"image_id", id},
                          {"foreground_patches", fg_patches},
                          {"refined", image.has_value()},
                          {"mask", id + "_mask.png"}});
        run.pixel_masks.push_back(std::move(px));
        run.images.push_back(std::move(image));
    }

    json saliency = json::object();
    for (const auto& [cluster, values] : run.result.segment_saliencies) saliency[std::to_string(cluster)] = values;
    const auto& model = run.result.model;
    run.report = {
        {"command", command},
        {"config", config},
        {"k", run.result.k},
        {"k_selected_by_elbow", config.k <= 0},
        {"elbow_inertias", run.result.elbow_inertias},
        {"foreground_clusters", run.result.foreground},
        {"segment_saliencies", saliency},
        {"kmeans", {{"inertia", model.inertia}, {"iterations", model.iterations}, {"converged", model.converged}}},
        {"augmented_fields", run.input.fields.size() - run.result.masks.size()},
        {"images", images},
    };
    return run;
}

}  // namespace

json run_coseg(const CosegConfig& config, unsigned threads) {
    auto run = coseg_stage(config, threads, "coseg");
    write_json(run.report, fs::path(config.out_dir) / "report.json");
    return run.report;
}

json run_parts(const CosegConfig& config, unsigned threads) {
    if (config.num_parts <= 0) throw InputError("--num-parts is required and must be positive");
    auto run = coseg_stage(config, threads, "parts");

    std::vector<DescriptorField> fields;
    for (const auto* f : run.primary) fields.push_back(*f);
    PartOptions po;
    po.num_parts = config.num_parts;
    po.l2_normalize = config.normalize;
    po.seed = config.seed;
    po.max_iters = config.max_iters;
    po.tol = config.tol;
    po.restarts = config.restarts;
    po.threads = threads;
    const PartResult parts = part_segment(fields, run.result.masks, po);

    const fs::path out_dir = config.out_dir;
    json images = json::array();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& id = fields[i].meta().image_id;
        const LabelMask& grid = parts.part_masks[i];
        LabelMask px = upsample_nearest(grid, fields[i].meta());
        const Image* image = run.images[i] ? &*run.images[i] : nullptr;
        if (image) {
            for (std::size_t p = 0; p < px.size(); ++p) {
                if (run.pixel_masks[i].labels[p] == 0) px.labels[p] = 0;
            }
            px = refine_parts(px, *image);
        }
        write_png(labels_to_image(grid), out_dir / (id + "_parts_grid.png"));
        write_png(labels_to_image(px), out_dir / (id + "_parts.png"));
        write_png(part_overlay(px, image), out_dir / (id + "_parts_overlay.png"));
        images.push_back({{"image_id", id}, {"parts", id + "_parts.png"}, {"refined", image != nullptr}});
    }

    json colors = json::object();
    for (int label = 0; label <= parts.parts_used; ++label) colors[std::to_string(label)] = part_color(label);
    write_json(colors, out_dir / "parts_colors.json");

    run.report["parts"] = {
        {"num_parts", config.num_parts},
        {"parts_used", parts.parts_used},
        {"cluster_to_part", parts.cluster_to_part},
        {"inertia", parts.model.inertia},
        {"images", images},
    };
    write_json(run.report, out_dir / "report.json");
    return run.report;
}

namespace {

std::vector<PixelCoord> parse_points(const json& j) {
    const json& list = j.is_object() ? j.at("keypoints") : j;
    std::vector<PixelCoord> pts;
    for (const auto& p : list) {
        if (!p.is_array() || p.size() < 2) throw InputError("keypoints must be [y, x] pairs");
        pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return pts;
}

DescriptorField resolve_field(const std::string& explicit_path, const MatchConfig& c, const std::string& id,
                              const char* role) {
    if (!explicit_path.empty()) return read_descriptor_field(explicit_path);
    if (c.input_dir.empty() || id.empty()) {
        throw InputError(std::string("--") + role + " or --input-dir with --" + role + "-id is required");
    }
    const fs::path p = fs::path(c.input_dir) / (id + "_" + std::to_string(c.layer) + "_" + c.facet + ".vitd");
    return read_descriptor_field(p);
}

void draw_line(Image& img, int y0, int x0, int y1, int x1, std::array<std::uint8_t, 3> color) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        if (y0 >= 0 && y0 < img.height && x0 >= 0 && x0 < img.width) std::copy(color.begin(), color.end(), img.at(y0, x0));
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void draw_dot(Image& img, int y, int x, std::array<std::uint8_t, 3> color) {
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
            const int yy = y + dy, xx = x + dx;
            if (yy >= 0 && yy < img.height && xx >= 0 && xx < img.width) std::copy(color.begin(), color.end(), img.at(yy, xx));
        }
    }
}

Image match_overlay(const Image& src, const Image& tgt, const std::vector<std::pair<PixelCoord, PixelCoord>>& pairs) {
    Image out(std::max(src.height, tgt.height), src.width + tgt.width, 3);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) std::copy(src.at(y, x), src.at(y, x) + 3, out.at(y, x));
    }
    for (int y = 0; y < tgt.height; ++y) {
        for (int x = 0; x < tgt.width; ++x) std::copy(tgt.at(y, x), tgt.at(y, x) + 3, out.at(y, src.width + x));
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto color = part_color(static_cast<int>(i % 10) + 1);
        const int sy = static_cast<int>(std::lround(pairs[i].first.y));
        const int sx = static_cast<int>(std::lround(pairs[i].first.x));
        const int ty = static_cast<int>(std::lround(pairs[i].second.y));
        const int tx = static_cast<int>(std::lround(pairs[i].second.x)) + src.width;
        draw_line(out, sy, sx, ty, tx, color);
        draw_dot(out, sy, sx, color);
        draw_dot(out, ty, tx, color);
    }
    return out;
}

}  // namespace

json run_match(const MatchConfig& config, unsigned threads) {
    const DescriptorField source = resolve_field(config.source, config, config.source_id, "source");
    const DescriptorField target = resolve_field(config.target, config, config.target_id, "target");
    if (source.dim() != target.dim()) throw InputError("source and target descriptor dims differ");
    if (source.meta().model_id != target.meta().model_id || source.meta().layer_index != target.meta().layer_index ||
        source.meta().facet != target.meta().facet) {
        throw InputError("source and target come from different model/layer/facet");
    }
    const BinningConfig binning{config.bins, config.dilation_base};
    binning.validate();

    const fs::path out_dir = config.out_dir;
    fs::create_directories(out_dir);
    std::ofstream lines(out_dir / "matches.jsonl");
    if (!lines) throw IoError("cannot write matches.jsonl");

    std::vector<std::pair<PixelCoord, PixelCoord>> drawn;
    std::string mode;
    if (config.keypoints.empty()) {
        mode = "best_buddies";
        const auto src_binned = log_bin(source, binning, threads);
        const auto tgt_binned = log_bin(target, binning, threads);
        const MatchSet matches = best_buddies(src_binned, tgt_binned, threads);
        for (const auto& m : matches.pairs) {
            const auto s = patch_center_px(m.src.row, m.src.col, source.meta());
            const auto t = patch_center_px(m.tgt.row, m.tgt.col, target.meta());
            lines << json{{"src", {s.y, s.x}}, {"tgt", {t.y, t.x}}, {"sim", m.similarity}}.dump() << '\n';
            drawn.emplace_back(s, t);
        }
    } else {
        mode = "keypoints";
        const auto keypoints = parse_points(read_json(config.keypoints));
        const auto matches = match_keypoints_scored(keypoints, source, target, binning, threads);
        for (std::size_t i = 0; i < matches.size(); ++i) {
            const auto& t = matches[i].target;
            lines << json{{"src", {keypoints[i].y, keypoints[i].x}}, {"tgt", {t.y, t.x}}, {"sim", matches[i].similarity}}
                         .dump()
                  << '\n';
            drawn.emplace_back(keypoints[i], t);
        }
    }

    bool overlay = false;
    if (!config.source_image.empty() && !config.target_image.empty()) {
        write_png(match_overlay(read_png(config.source_image), read_png(config.target_image), drawn),
                  out_dir / "matches_overlay.png");
        overlay = true;
    }
    json report = {
        {"command", "match"},
        {"config", config},
        {"mode", mode},
        {"matches", drawn.size()},
        {"overlay", overlay},
        {"source_image_id", source.meta().image_id},
        {"target_image_id", target.meta().image_id},
    };
    write_json(report, out_dir / "report.json");
    return report;
}

namespace {

LabelMask load_mask(const fs::path& base, const json& entry, const char* key, bool binary) {
    if (!entry.contains(key)) throw InputError(std::string("manifest entry missing '") + key + "'");
    const fs::path path = base / entry.at(key).get<std::string>();
    return image_to_labels(binary ? read_png(path) : read_png_gray(path), binary);
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

json eval_coseg(const json& entries, const fs::path& pred_dir, const fs::path& gt_dir) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_set;
    for (const auto& e : entries) {
        const LabelMask pred = load_mask(pred_dir, e, "pred", true);
        const LabelMask gt = load_mask(gt_dir, e, "gt", true);
        auto& bucket = per_set[e.value("set", std::string("default"))];
        bucket.first.push_back(jaccard(pred, gt));
        bucket.second.push_back(precision_px(pred, gt));
    }
    json sets = json::object();
    std::vector<double> jm, pm;
    for (const auto& [name, values] : per_set) {
        sets[name] = {{"jaccard", mean_of(values.first)},
                      {"precision", mean_of(values.second)},
                      {"count", values.first.size()}};
        jm.push_back(mean_of(values.first));
        pm.push_back(mean_of(values.second));
    }
    return {{"per_set", sets}, {"mean_jaccard", mean_of(jm)}, {"mean_precision", mean_of(pm)}};
}

json eval_parts(const json& section, const fs::path& pred_dir, const fs::path& gt_dir) {
    const json& samples = section.is_object() ? section.at("samples") : section;
    const int background = section.is_object() ? section.value("background_label", 0) : 0;
    std::vector<int> pred_labels, gt_labels;
    for (const auto& s : samples) {
        const LabelMask pred = load_mask(pred_dir, s, "pred", false);
        if (s.contains("points")) {
            for (const auto& p : s.at("points")) {
                const int y = std::clamp(static_cast<int>(std::lround(p.at(0).get<double>())), 0, pred.height - 1);
                const int x = std::clamp(static_cast<int>(std::lround(p.at(1).get<double>())), 0, pred.width - 1);
                pred_labels.push_back(pred.at(y, x));
                gt_labels.push_back(p.at(2).get<int>());
            }
        } else {
            const LabelMask gt = load_mask(gt_dir, s, "gt", false);
            if (gt.height != pred.height || gt.width != pred.width) throw InputError("part mask sizes differ");
            pred_labels.insert(pred_labels.end(), pred.labels.begin(), pred.labels.end());
            gt_labels.insert(gt_labels.end(), gt.labels.begin(), gt.labels.end());
        }
    }
    const auto all = nmi_ari(pred_labels, gt_labels, false, background);
    const auto fg = nmi_ari(pred_labels, gt_labels, true, background);
    return {{"nmi", all.nmi}, {"ari", all.ari}, {"fg_nmi", fg.nmi}, {"fg_ari", fg.ari}, {"samples", all.samples}};
}

json eval_keypoints(const json& section, double alpha) {
    const json& pairs = section.is_object() ? section.at("pairs") : section;
    std::map<std::string, std::vector<double>> per_category;
    json per_pair = json::array();
    for (const auto& p : pairs) {
        const auto pred = parse_points(p.at("pred"));
        const auto gt = parse_points(p.at("gt"));
        const double score = pck(pred, gt, alpha, p.at("image_h").get<int>(), p.at("image_w").get<int>());
        per_category[p.value("category", std::string("default"))].push_back(score);
        per_pair.push_back(score);
    }
    json categories = json::object();
    std::vector<double> means;
    for (const auto& [name, scores] : per_category) {
        categories[name] = mean_of(scores);
        means.push_back(mean_of(scores));
    }
    return {{"alpha", alpha}, {"per_pair", per_pair}, {"per_category", categories}, {"mean_pck", mean_of(means)}};
}

std::vector<LandmarkSample> landmark_split(const json& entries, const fs::path& pred_dir) {
    std::vector<LandmarkSample> out;
    for (const auto& e : entries) {
        LabelMask parts = load_mask(pred_dir, e, "parts", false);
        // Pixel-resolution masks: every pixel is its own unit patch.
        FieldMeta geometry;
        geometry.image_id = e.at("parts").get<std::string>();
        geometry.image_height_px = parts.height;
        geometry.image_width_px = parts.width;
        geometry.patch_size_px = 1;
        geometry.stride_px = 1;
        geometry.descriptor_dim = 1;
        std::vector<PixelCoord> landmarks;
        for (const auto& p : parse_points(e.at("landmarks"))) {
            landmarks.push_back({p.y / parts.height, p.x / parts.width});
        }
        out.push_back({std::move(parts), geometry, std::move(landmarks)});
    }
    return out;
}

}  // namespace

json run_eval(const EvalConfig& config) {
    if (config.manifest.empty()) throw InputError("--manifest is required");
    const json manifest = read_json(config.manifest);
    const fs::path manifest_dir = fs::path(config.manifest).parent_path();
    const fs::path pred_dir = config.pred_dir.empty() ? manifest_dir : fs::path(config.pred_dir);
    const fs::path gt_dir = config.gt_dir.empty() ? manifest_dir : fs::path(config.gt_dir);

    json report = {{"command", "eval"}, {"config", config}};
    try {
        if (manifest.contains("coseg")) report["coseg"] = eval_coseg(manifest.at("coseg"), pred_dir, gt_dir);
        if (manifest.contains("parts")) report["parts"] = eval_parts(manifest.at("parts"), pred_dir, gt_dir);
        if (manifest.contains("keypoints")) report["keypoints"] = eval_keypoints(manifest.at("keypoints"), config.alpha);
        if (manifest.contains("landmarks")) {
            const json& lm = manifest.at("landmarks");
            const auto train = landmark_split(lm.at("train"), pred_dir);
            const auto test = landmark_split(lm.at("test"), pred_dir);
            const auto result = landmark_regression_error(train, test, lm.at("num_parts").get<int>());
            report["landmarks"] = {{"error", result.error}, {"used_ridge", result.used_ridge}};
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("manifest inconsistency: ") + e.what());
    }
    if (!config.out.empty()) write_json(report, config.out);
    return report;
}

json run_pca(const PcaConfig& config) {
    const InputSet input = load_input_dir(config.input_dir, config.layer, config.facet);
    DescriptorMatrix matrix = stack_fields(input.fields);
    if (config.normalize) l2_normalize_rows(matrix);
    const PcaResult result = pca(matrix, config.components);

    const fs::path out_dir = config.out_dir;
    const auto written = render_component_maps(input.fields, result, out_dir);
    write_field(components_as_field(result, input.fields.front().meta()), out_dir / "pca_components.vitd");

    json files = json::array();
    for (const auto& p : written) files.push_back(p.filename().string());
    json report = {
        {"command", "pca"},
        {"config", config},
        {"explained_variance", result.explained_variance},
        {"total_variance", result.total_variance},
        {"degenerate", result.degenerate},
        {"files", files},
    };
    write_json(report, out_dir / "report.json");
    return report;
}

}  // namespace vitdesc::cli
