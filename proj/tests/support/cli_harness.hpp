#pragma once

// Runs the vitdesc executable and lays out synthetic input directories.

#include "synthetic.hpp"

#include "vitdesc/descriptor_store.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace vitdesc::testing {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string shell_quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) {
        if (c == '\'') {
            q += "'\\''";
        } else {
            q += c;
        }
    }
    return q + "'";
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline CliResult run_cli(const std::string& cli, const std::vector<std::string>& args,
                         const std::filesystem::path& scratch) {
    std::filesystem::create_directories(scratch);
    const auto out = scratch / "stdout.txt";
    const auto err = scratch / "stderr.txt";
    std::string cmd = shell_quote(cli);
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " >" + shell_quote(out.string()) + " 2>" + shell_quote(err.string());
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("vitdesc_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Writes {id}_{layer}_{facet}.vitd and {id}_saliency.vitd for every image.
inline void write_input_dir(const std::filesystem::path& dir, const std::vector<DescriptorField>& fields,
                            const std::vector<SaliencyField>& saliencies) {
    std::filesystem::create_directories(dir);
    for (const auto& f : fields) {
        const auto& m = f.meta();
        write_field(f, dir / (m.image_id + "_" + std::to_string(m.layer_index) + "_" + std::string(to_string(m.facet)) + ".vitd"));
    }
    for (const auto& s : saliencies) write_field(s, dir / (s.meta().image_id + "_saliency.vitd"));
}

// Every regular file under dir, keyed by relative path, with its bytes.
inline std::vector<std::pair<std::string, std::string>> snapshot(const std::filesystem::path& dir) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto name = e.path().filename().string();
        if (name == "stdout.txt" || name == "stderr.txt") continue;
        files.emplace_back(std::filesystem::relative(e.path(), dir).string(), slurp(e.path()));
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace vitdesc::testing
