// vitdesc: co-segmentation, part co-segmentation, correspondences, PCA maps and
// evaluation over VITD descriptor files.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure, 1 anything else.

#include "cli_commands.hpp"

#include "vitdesc/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

using nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

// Applies values from a JSON config file (a plain object, or a run report's
// "config" object) to every option not given on the command line.
template <typename Config>
void apply_config_file(CLI::App& sub, const std::string& path, Config& config) {
    if (path.empty()) return;
    std::ifstream is(path);
    if (!is) throw vitdesc::IoError("cannot open config file " + path);
    json file;
    try {
        file = json::parse(is);
    } catch (const json::exception& e) {
        throw vitdesc::InputError("config file is not valid JSON: " + std::string(e.what()));
    }
    const json& values = file.contains("config") ? file.at("config") : file;
    if (!values.is_object()) throw vitdesc::InputError("config file must hold a JSON object");

    json resolved = config;
    for (const auto& [key, value] : values.items()) {
        if (!resolved.contains(key)) throw vitdesc::InputError("unknown config key: " + key);
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        const CLI::Option* opt = sub.get_option_no_throw(flag);
        if (opt == nullptr || opt->count() == 0) resolved[key] = value;
    }
    try {
        config = resolved.get<Config>();
    } catch (const json::exception& e) {
        throw vitdesc::InputError("config value has wrong type: " + std::string(e.what()));
    }
}

void add_coseg_options(CLI::App& sub, vitdesc::cli::CosegConfig& c) {
    sub.add_option("--input-dir", c.input_dir, "Directory of VITD descriptor and saliency files");
    sub.add_option("--out-dir", c.out_dir, "Output directory")->capture_default_str();
    sub.add_option("--image-dir", c.image_dir, "Directory of <image_id>.png images used for refinement");
    sub.add_option("--layer", c.layer, "Layer index of the descriptors")->capture_default_str();
    sub.add_option("--facet", c.facet, "key | query | value | token")->capture_default_str();
    sub.add_option("--k", c.k, "Number of clusters; 0 picks k with the elbow rule")->capture_default_str();
    sub.add_option("--k-min", c.k_min, "Elbow search lower bound")->capture_default_str();
    sub.add_option("--k-max", c.k_max, "Elbow search upper bound")->capture_default_str();
    sub.add_option("--drop-threshold", c.drop_threshold, "Elbow relative inertia drop")->capture_default_str();
    sub.add_option("--tau", c.tau, "Segment saliency threshold")->capture_default_str();
    sub.add_option("--vote-fraction", c.vote_fraction, "Fraction of images that must vote")->capture_default_str();
    sub.add_option("--vote-rule", c.vote_rule, "per_image | summed")->capture_default_str();
    sub.add_flag("--refine,!--no-refine", c.refine, "Colour-model mask refinement (needs --image-dir)");
    sub.add_flag("--normalize,!--no-normalize", c.normalize, "L2-normalize descriptors before clustering");
    sub.add_option("--seed", c.seed, "Random seed")->capture_default_str();
    sub.add_option("--max-iters", c.max_iters, "k-means iteration cap")->capture_default_str();
    sub.add_option("--tol", c.tol, "k-means centroid shift tolerance")->capture_default_str();
    sub.add_option("--restarts", c.restarts, "k-means restarts")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-shot co-segmentation, part discovery and correspondences from dense ViT descriptors"};
    app.require_subcommand(1);
    app.fallthrough();

    unsigned threads = 0;
    std::string config_path;
    app.add_option("--threads", threads, "Worker threads (0 = all cores); never changes results");
    app.add_option("--config", config_path, "JSON config file or previous run report");

    vitdesc::cli::CosegConfig coseg_cfg;
    auto* coseg = app.add_subcommand("coseg", "Co-segment a set of images");
    add_coseg_options(*coseg, coseg_cfg);

    vitdesc::cli::CosegConfig parts_cfg;
    auto* parts = app.add_subcommand("parts", "Co-segment common object parts");
    add_coseg_options(*parts, parts_cfg);
    parts->add_option("--num-parts", parts_cfg.num_parts, "Number of parts");

    vitdesc::cli::MatchConfig match_cfg;
    auto* match = app.add_subcommand("match", "Best-buddy or keypoint correspondences between two images");
    match->add_option("--source", match_cfg.source, "Source VITD descriptor file");
    match->add_option("--target", match_cfg.target, "Target VITD descriptor file");
    match->add_option("--input-dir", match_cfg.input_dir, "Directory to resolve --source-id/--target-id in");
    match->add_option("--source-id", match_cfg.source_id, "Source image id");
    match->add_option("--target-id", match_cfg.target_id, "Target image id");
    match->add_option("--layer", match_cfg.layer, "Layer index used with --input-dir")->capture_default_str();
    match->add_option("--facet", match_cfg.facet, "Facet used with --input-dir")->capture_default_str();
    match->add_option("--keypoints", match_cfg.keypoints, "JSON file of source [y, x] keypoints");
    match->add_option("--source-image", match_cfg.source_image, "Source PNG for the overlay");
    match->add_option("--target-image", match_cfg.target_image, "Target PNG for the overlay");
    match->add_option("--out-dir", match_cfg.out_dir, "Output directory")->capture_default_str();
    match->add_option("--bins", match_cfg.bins, "Binning levels; 0 disables binning")->capture_default_str();
    match->add_option("--dilation-base", match_cfg.dilation_base, "Binning dilation base")->capture_default_str();

    vitdesc::cli::EvalConfig eval_cfg;
    auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
    eval->add_option("--manifest", eval_cfg.manifest, "JSON manifest");
    eval->add_option("--pred-dir", eval_cfg.pred_dir, "Prediction directory (default: manifest directory)");
    eval->add_option("--gt-dir", eval_cfg.gt_dir, "Ground-truth directory (default: manifest directory)");
    eval->add_option("--alpha", eval_cfg.alpha, "PCK radius factor")->capture_default_str();
    eval->add_option("--out", eval_cfg.out, "Write the metrics JSON here");

    vitdesc::cli::PcaConfig pca_cfg;
    auto* pca = app.add_subcommand("pca", "PCA component maps of a descriptor set");
    pca->add_option("--input-dir", pca_cfg.input_dir, "Directory of VITD descriptor files");
    pca->add_option("--out-dir", pca_cfg.out_dir, "Output directory")->capture_default_str();
    pca->add_option("--layer", pca_cfg.layer, "Layer index")->capture_default_str();
    pca->add_option("--facet", pca_cfg.facet, "Facet")->capture_default_str();
    pca->add_option("--components", pca_cfg.components, "Number of components")->capture_default_str();
    pca->add_flag("--normalize,!--no-normalize", pca_cfg.normalize, "L2-normalize descriptors first");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        json report;
        if (coseg->parsed()) {
            apply_config_file(*coseg, config_path, coseg_cfg);
            report = vitdesc::cli::run_coseg(coseg_cfg, threads);
        } else if (parts->parsed()) {
            apply_config_file(*parts, config_path, parts_cfg);
            report = vitdesc::cli::run_parts(parts_cfg, threads);
        } else if (match->parsed()) {
            apply_config_file(*match, config_path, match_cfg);
            report = vitdesc::cli::run_match(match_cfg, threads);
        } else if (eval->parsed()) {
            apply_config_file(*eval, config_path, eval_cfg);
            report = vitdesc::cli::run_eval(eval_cfg);
        } else if (pca->parsed()) {
            apply_config_file(*pca, config_path, pca_cfg);
            report = vitdesc::cli::run_pca(pca_cfg);
        }
        std::cout << report.dump(2) << '\n';
    } catch (const vitdesc::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const vitdesc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
