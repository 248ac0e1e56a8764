#include "mgm/run.hpp"

#include <cstdio>
#include <fstream>

#include "mgm/util.hpp"

namespace mgm {

namespace {

RestartRule restart_from_string(const std::string& s) {
    if (s == "function") return RestartRule::FunctionValue;
    if (s == "gradient") return RestartRule::Gradient;
    if (s == "none") return RestartRule::None;
    throw UsageError("unknown restart rule: " + s);
}

std::string restart_to_string(RestartRule r) {
    switch (r) {
        case RestartRule::FunctionValue: return "function";
        case RestartRule::Gradient: return "gradient";
        default: return "none";
    }
}

}  // namespace

void RunConfig::apply_json(const nlohmann::json& doc) {
    if (doc.contains("data")) data_path = doc.at("data").get<std::string>();
    if (doc.contains("schema")) schema_path = doc.at("schema").get<std::string>();
    if (doc.contains("output")) output_dir = doc.at("output").get<std::string>();
    if (doc.contains("seed")) seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("threads")) threads = doc.at("threads").get<int>();
    if (doc.contains("solver")) {
        const auto& s = doc.at("solver");
        if (s.contains("max_iterations")) solver.max_iterations = s.at("max_iterations").get<int>();
        if (s.contains("tolerance")) solver.tolerance = s.at("tolerance").get<double>();
        if (s.contains("initial_step")) solver.initial_step = s.at("initial_step").get<double>();
        if (s.contains("backtracking_factor"))
            solver.backtracking_factor = s.at("backtracking_factor").get<double>();
        if (s.contains("restart")) solver.restart = restart_from_string(s.at("restart").get<std::string>());
        if (s.contains("optimize_beta_diag"))
            solver.optimize_beta_diag = s.at("optimize_beta_diag").get<bool>();
        if (s.contains("seed")) solver.seed = s.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("selection")) {
        const auto& s = doc.at("selection");
        if (s.contains("gamma")) selection.gamma = s.at("gamma").get<double>();
        if (s.contains("exponents"))
            selection.exponent_grid = s.at("exponents").get<std::vector<double>>();
        if (s.contains("group_edge_count"))
            selection.group_edge_count = s.at("group_edge_count").get<bool>();
        if (s.contains("warm_start")) selection.warm_start = s.at("warm_start").get<bool>();
    }
    if (doc.contains("split")) {
        const auto& s = doc.at("split");
        if (s.contains("train_fraction")) split.train_fraction = s.at("train_fraction").get<double>();
        if (s.contains("seed")) split.seed = s.at("seed").get<std::uint64_t>();
    }
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("bad config JSON " + path + ": " + e.what());
    }
    RunConfig cfg;
    cfg.apply_json(doc);
    return cfg;
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json doc;
    doc["data"] = data_path;
    doc["schema"] = schema_path;
    doc["output"] = output_dir;
    doc["seed"] = seed;
    doc["threads"] = threads;
    doc["solver"] = {{"max_iterations", solver.max_iterations},
                     {"tolerance", solver.tolerance},
                     {"initial_step", solver.initial_step},
                     {"backtracking_factor", solver.backtracking_factor},
                     {"restart", restart_to_string(solver.restart)},
                     {"optimize_beta_diag", solver.optimize_beta_diag},
                     {"seed", solver.seed}};
    doc["selection"] = {{"gamma", selection.gamma},
                        {"exponents", selection.exponent_grid},
                        {"group_edge_count", selection.group_edge_count},
                        {"warm_start", selection.warm_start}};
    doc["split"] = {{"train_fraction", split.train_fraction}, {"seed", split.seed}};
    return doc;
}

void write_manifest(const std::string& path, const std::string& command, const RunConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& inputs,
                    const std::vector<std::string>& outputs) {
    nlohmann::ordered_json doc;
    doc["command"] = command;
    doc["version"] = {{"project", kProjectVersion},
#if defined(__clang__)
                      {"compiler", "clang " __clang_version__}
#elif defined(__GNUC__)
                      {"compiler", "gcc " __VERSION__}
#else
                      {"compiler", "unknown"}
#endif
    };
    doc["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [name, file] : inputs) {
        char hash[32];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(fnv1a64_file(file)));
        doc["inputs"][name] = {{"path", file}, {"fnv1a64", hash}};
    }
    doc["outputs"] = outputs;
    const nlohmann::ordered_json config = cfg.to_json();
    doc["config"] = config;
    const std::string dumped = config.dump();
    char chash[32];
    std::snprintf(chash, sizeof(chash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(dumped.data(), dumped.size())));
    doc["config_hash"] = chash;
    doc["seeds"] = {{"run", cfg.seed}, {"solver", cfg.solver.seed}, {"split", cfg.split.seed}};

    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest: " + path);
    out << doc.dump(2) << '\n';
}

}  // namespace mgm
