#ifndef MGM_RUN_HPP_
#define MGM_RUN_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mgm/dataset.hpp"
#include "mgm/selection.hpp"
#include "mgm/solver.hpp"

namespace mgm {

inline constexpr const char* kProjectVersion = "mgm 1.0.0";
inline constexpr const char* kConfigEnvVar = "MGM_CONFIG";

// Shared structured configuration for the CLI. A JSON config file seeds the
// values; command-line flags override individual fields.
struct RunConfig {
    std::string data_path;
    std::string schema_path;
    std::string output_dir = ".";
    SolverConfig solver;
    SelectionConfig selection;
    SplitSpec split;
    std::uint64_t seed = 0;
    int threads = 1;

    void apply_json(const nlohmann::json& doc);
    static RunConfig from_file(const std::string& path);
    nlohmann::ordered_json to_json() const;
};

// Machine-readable record of one CLI run: command, config, input content
// hashes, output list. Deliberately timestamp-free so reruns are
// byte-identical.
void write_manifest(const std::string& path, const std::string& command, const RunConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& inputs,
                    const std::vector<std::string>& outputs);

}  // namespace mgm

#endif  // MGM_RUN_HPP_
