#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>

namespace vitdesc::cli {

// Every field here is part of the resolved configuration written into run
// reports; a report's "config" object can be fed back through --config.

struct CosegConfig {
    std::string input_dir;
    std::string out_dir = "out";
    std::string image_dir;  // <image_id>.png per image; enables refinement
    int layer = 11;
    std::string facet = "key";
    int k = 0;  // 0 selects k with the elbow rule
    int k_min = 2;
    int k_max = 12;
    double drop_threshold = 0.05;
    double tau = 0.2;
    double vote_fraction = 0.75;
    std::string vote_rule = "per_image";  // or "summed"
    bool refine = true;
    bool normalize = true;
    std::uint64_t seed = 0;
    int max_iters = 100;
    double tol = 1e-4;
    int restarts = 1;
    int num_parts = 0;  // parts command only
};

struct MatchConfig {
    std::string source;  // VITD files; or resolved from input_dir + ids
    std::string target;
    std::string input_dir;
    std::string source_id;
    std::string target_id;
    int layer = 9;
    std::string facet = "key";
    std::string keypoints;  // JSON file; BBP mode when empty
    std::string source_image;
    std::string target_image;
    std::string out_dir = "out";
    int bins = 2;
    int dilation_base = 2;
};

struct EvalConfig {
    std::string manifest;
    std::string pred_dir;
    std::string gt_dir;
    double alpha = 0.1;
    std::string out;  // metrics JSON path; stdout only when empty
};

struct PcaConfig {
    std::string input_dir;
    std::string out_dir = "out";
    int layer = 11;
    std::string facet = "key";
    int components = 4;
    bool normalize = false;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CosegConfig, input_dir, out_dir, image_dir, layer, facet, k, k_min,
                                                k_max, drop_threshold, tau, vote_fraction, vote_rule, refine,
                                                normalize, seed, max_iters, tol, restarts, num_parts)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MatchConfig, source, target, input_dir, source_id, target_id, layer,
                                                facet, keypoints, source_image, target_image, out_dir, bins,
                                                dilation_base)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EvalConfig, manifest, pred_dir, gt_dir, alpha, out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PcaConfig, input_dir, out_dir, layer, facet, components, normalize)

// Each command writes its outputs and returns the run report (also written
// to <out_dir>/report.json where the command has an output directory).
nlohmann::json run_coseg(const CosegConfig& config, unsigned threads);
nlohmann::json run_parts(const CosegConfig& config, unsigned threads);
nlohmann::json run_match(const MatchConfig& config, unsigned threads);
nlohmann::json run_eval(const EvalConfig& config);
nlohmann::json run_pca(const PcaConfig& config);

}  // namespace vitdesc::cli
