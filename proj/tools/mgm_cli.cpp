// Command-line entry point: every pipeline stage as a subcommand over a
// shared JSON configuration (flags override file values; MGM_CONFIG names a
// default config). Exit codes: 0 success, 1 usage, 2 data, 3 numerical.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include "mgm/graph.hpp"
#include "mgm/objective.hpp"
#include "mgm/predict.hpp"
#include "mgm/run.hpp"
#include "mgm/screening.hpp"
#include "mgm/selection.hpp"
#include "mgm/simulate.hpp"
#include "mgm/spectra.hpp"
#include "mgm/util.hpp"

namespace fs = std::filesystem;
using namespace mgm;

namespace {

struct Common {
    CLI::App* cmd = nullptr;
    std::string config_path;
    std::string data_path;
    std::string schema_path;
    std::string out_dir;
    int threads = 0;
    CLI::Option* data_opt = nullptr;
    CLI::Option* schema_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* threads_opt = nullptr;

    void attach(CLI::App* sub, bool needs_data, bool needs_schema) {
        cmd = sub;
        sub->add_option("--config", config_path, "JSON configuration file");
        data_opt = sub->add_option("--data", data_path, "input data CSV");
        schema_opt = sub->add_option("--schema", schema_path, "variable schema file");
        out_opt = sub->add_option("--out", out_dir, "output directory");
        threads_opt = sub->add_option("--threads", threads, "worker threads (default 1)");
        if (needs_data) data_opt->required();
        if (needs_schema) schema_opt->required();
    }

    RunConfig resolve() const {
        RunConfig cfg;
        std::string file = config_path;
        if (file.empty())
            if (const char* env = std::getenv(kConfigEnvVar)) file = env;
        if (!file.empty()) cfg = RunConfig::from_file(file);
        if (data_opt->count()) cfg.data_path = data_path;
        if (schema_opt->count()) cfg.schema_path = schema_path;
        if (out_opt->count()) cfg.output_dir = out_dir;
        if (threads_opt->count()) cfg.threads = threads;
        if (cfg.threads > 0) set_thread_count(cfg.threads);
        fs::create_directories(cfg.output_dir);
        return cfg;
    }
};

std::string joined(const fs::path& dir, const std::string& name) {
    return (dir / name).string();
}

PpmInterval parse_interval(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw UsageError("interval must be <lo>:<hi>, got " + text);
    PpmInterval iv{std::stod(parts[0]), std::stod(parts[1])};
    if (iv.low > iv.high) std::swap(iv.low, iv.high);
    return iv;
}

GraphFormat parse_format(const std::string& s) {
    if (s == "json") return GraphFormat::Json;
    if (s == "graphml") return GraphFormat::GraphMl;
    if (s == "dot") return GraphFormat::Dot;
    throw UsageError("unknown graph format: " + s);
}

std::string format_extension(GraphFormat f) {
    switch (f) {
        case GraphFormat::Json: return "json";
        case GraphFormat::GraphMl: return "graphml";
        default: return "dot";
    }
}

void save_iteration_log(const FitResult& fr, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write iteration log: " + path);
    out << "iteration,objective,step,restarted\n";
    for (std::size_t k = 0; k < fr.objective_trace.size(); ++k)
        out << k + 1 << ',' << format_double(fr.objective_trace[k]) << ','
            << format_double(fr.step_trace[k]) << ',' << int(fr.restart_flags[k]) << '\n';
}

int run_cli(int argc, char** argv) {
    CLI::App app{"mgm: sparse mixed graphical models over continuous and categorical data"};
    app.require_subcommand(1);
    std::function<int()> action;

    // ---- simulate ----
    auto* c_sim = app.add_subcommand("simulate", "draw a ground-truth model and Gibbs samples");
    auto common_sim = std::make_shared<Common>();
    common_sim->attach(c_sim, false, false);
    auto sim_p = std::make_shared<int>(10);
    auto sim_q = std::make_shared<int>(5);
    auto sim_levels = std::make_shared<std::string>("");
    auto sim_density = std::make_shared<double>(0.1);
    auto sim_scale = std::make_shared<double>(0.5);
    auto sim_n = std::make_shared<int>(2000);
    auto sim_burn = std::make_shared<int>(200);
    auto sim_thin = std::make_shared<int>(1);
    auto sim_seed = std::make_shared<std::uint64_t>(1);
    c_sim->add_option("--p", *sim_p, "continuous variable count");
    c_sim->add_option("--q", *sim_q, "discrete variable count");
    c_sim->add_option("--levels", *sim_levels, "comma list of level counts (default all 2)");
    c_sim->add_option("--density", *sim_density, "edge probability per pair");
    c_sim->add_option("--effect-scale", *sim_scale, "magnitude range of nonzero entries");
    c_sim->add_option("--n", *sim_n, "samples to record");
    c_sim->add_option("--burn-in", *sim_burn, "sweeps discarded before recording");
    c_sim->add_option("--thinning", *sim_thin, "sweeps between recorded samples");
    c_sim->add_option("--seed", *sim_seed, "generation and sampling seed");
    c_sim->callback([&action, common_sim, sim_p, sim_q, sim_levels, sim_density, sim_scale, sim_n,
                     sim_burn, sim_thin, sim_seed] {
        action = [=]() {
            RunConfig cfg = common_sim->resolve();
            cfg.seed = *sim_seed;
            std::vector<int> levels(*sim_q, 2);
            if (!sim_levels->empty()) {
                levels.clear();
                for (const auto& tok : split(*sim_levels, ',')) levels.push_back(std::stoi(tok));
            }
            const GroundTruth gt =
                random_sparse_theta(*sim_p, *sim_q, levels, *sim_density, *sim_scale, *sim_seed);
            const Dataset ds = gibbs_sample(gt, *sim_n, *sim_burn, *sim_thin, *sim_seed + 1);
            const fs::path dir(cfg.output_dir);
            ds.save_csv(joined(dir, "data.csv"));
            gt.schema.save(joined(dir, "schema.txt"));
            gt.save(joined(dir, "truth_theta.txt"), joined(dir, "truth_meta.txt"));
            export_graph(gt.graph, GraphFormat::Json, joined(dir, "truth_graph.json"));
            write_manifest(joined(dir, "simulate.manifest.json"), "simulate", cfg, {},
                           {"data.csv", "schema.txt", "truth_theta.txt", "truth_meta.txt",
                            "truth_graph.json"});
            std::cout << "simulate: " << ds.n() << " samples of " << *sim_p << "+" << *sim_q
                      << " variables, " << gt.graph.edges.size() << " true edges -> "
                      << cfg.output_dir << '\n';
            return 0;
        };
    });

    // ---- ingest ----
    auto* c_ing = app.add_subcommand("ingest", "load, preprocess, and optionally split a dataset");
    auto common_ing = std::make_shared<Common>();
    common_ing->attach(c_ing, true, true);
    auto ing_split = std::make_shared<bool>(false);
    auto ing_fraction = std::make_shared<double>(0.0);
    auto ing_seed = std::make_shared<std::uint64_t>(0);
    auto ing_raw = std::make_shared<bool>(false);
    auto ing_fraction_opt = c_ing->add_option("--train-fraction", *ing_fraction, "split fraction");
    auto ing_seed_opt = c_ing->add_option("--split-seed", *ing_seed, "split shuffle seed");
    c_ing->add_flag("--split", *ing_split, "write train/test split");
    c_ing->add_flag("--raw", *ing_raw, "skip preprocessing");
    c_ing->callback([&action, common_ing, ing_split, ing_fraction, ing_seed, ing_raw,
                     ing_fraction_opt, ing_seed_opt] {
        action = [=]() {
            RunConfig cfg = common_ing->resolve();
            if (ing_fraction_opt->count()) cfg.split.train_fraction = *ing_fraction;
            if (ing_seed_opt->count()) cfg.split.seed = *ing_seed;
            Dataset ds = load_dataset(cfg.data_path, cfg.schema_path);
            int dropped = 0;
            for (const auto& rec : ds.transform_log())
                if (rec.op == "drop_missing") dropped = std::stoi(rec.params.substr(5));
            if (!*ing_raw) ds = preprocess(ds);
            const fs::path dir(cfg.output_dir);
            std::vector<std::string> outputs;
            if (*ing_split) {
                const auto [train, test] = split_train_test(ds, cfg.split);
                train.save_csv(joined(dir, "train.csv"));
                test.save_csv(joined(dir, "test.csv"));
                outputs = {"train.csv", "test.csv"};
                std::cout << "ingest: kept " << ds.n() << " rows (dropped " << dropped
                          << "), split " << train.n() << "/" << test.n() << " -> "
                          << cfg.output_dir << '\n';
            } else {
                ds.save_csv(joined(dir, "dataset.csv"));
                outputs = {"dataset.csv"};
                std::cout << "ingest: kept " << ds.n() << " rows (dropped " << dropped << ") -> "
                          << cfg.output_dir << '\n';
            }
            write_manifest(joined(dir, "ingest.manifest.json"), "ingest", cfg,
                           {{"data", cfg.data_path}, {"schema", cfg.schema_path}}, outputs);
            return 0;
        };
    });

    // ---- bin ----
    auto* c_bin = app.add_subcommand("bin", "bucket raw spectra into fixed-width features");
    auto common_bin = std::make_shared<Common>();
    common_bin->attach(c_bin, false, false);
    auto bin_files = std::make_shared<std::vector<std::string>>();
    auto bin_high = std::make_shared<double>(9.5);
    auto bin_low = std::make_shared<double>(0.5);
    auto bin_width = std::make_shared<double>(0.01);
    auto bin_refs = std::make_shared<std::string>("");
    auto bin_target = std::make_shared<double>(8.463);
    auto bin_ref_interval = std::make_shared<std::string>("8.45:8.5");
    auto bin_excludes = std::make_shared<std::vector<std::string>>();
    auto bin_no_scale = std::make_shared<bool>(false);
    c_bin->add_option("--spectra", *bin_files, "spectrum CSV files (ppm,intensity)")->required();
    c_bin->add_option("--range-high", *bin_high, "upper ppm bound");
    c_bin->add_option("--range-low", *bin_low, "lower ppm bound");
    c_bin->add_option("--width", *bin_width, "bucket width in ppm");
    c_bin->add_option("--refs", *bin_refs, "CSV of id,observed_ref_ppm for referencing");
    c_bin->add_option("--ref-target", *bin_target, "target reference position");
    c_bin->add_option("--ref-interval", *bin_ref_interval, "scaling interval lo:hi");
    c_bin->add_option("--exclude", *bin_excludes, "excluded interval lo:hi (repeatable)");
    c_bin->add_flag("--no-scale", *bin_no_scale, "skip reference scaling and exclusions");
    c_bin->callback([&action, common_bin, bin_files, bin_high, bin_low, bin_width, bin_refs,
                     bin_target, bin_ref_interval, bin_excludes, bin_no_scale] {
        action = [=]() {
            RunConfig cfg = common_bin->resolve();
            std::vector<std::pair<std::string, double>> refs;
            if (!bin_refs->empty()) {
                std::ifstream in(*bin_refs);
                if (!in) throw DataError("cannot open refs file: " + *bin_refs);
                std::string line;
                while (std::getline(in, line)) {
                    line = trim(line);
                    if (line.empty()) continue;
                    const auto cells = split(line, ',');
                    if (cells.size() != 2) throw DataError("refs file needs id,ppm lines");
                    refs.emplace_back(trim(cells[0]), std::stod(cells[1]));
                }
            }
            std::vector<Spectrum> spectra;
            for (const auto& file : *bin_files) {
                Spectrum s = Spectrum::load_csv(file, fs::path(file).stem().string());
                for (const auto& [id, observed] : refs)
                    if (id == s.id) s = reference_shift(s, observed, *bin_target);
                spectra.push_back(std::move(s));
            }
            BucketTable bt = bin_spectra(spectra, *bin_high, *bin_low, *bin_width);
            if (!*bin_no_scale) {
                std::vector<PpmInterval> exclusions;
                for (const auto& e : *bin_excludes) exclusions.push_back(parse_interval(e));
                bt = exclude_and_scale(bt, exclusions, parse_interval(*bin_ref_interval));
            }
            const fs::path dir(cfg.output_dir);
            bt.save_csv(joined(dir, "buckets.csv"));
            std::vector<std::pair<std::string, std::string>> inputs;
            for (const auto& file : *bin_files) inputs.emplace_back(fs::path(file).stem().string(), file);
            write_manifest(joined(dir, "bin.manifest.json"), "bin", cfg, inputs, {"buckets.csv"});
            std::cout << "bin: " << spectra.size() << " spectra x " << bt.centers.size()
                      << " buckets -> " << cfg.output_dir << '\n';
            return 0;
        };
    });

    // ---- fit ----
    auto* c_fit = app.add_subcommand("fit", "estimate the MGM at a fixed penalty");
    auto common_fit = std::make_shared<Common>();
    common_fit->attach(c_fit, true, true);
    auto fit_lambda = std::make_shared<double>(0.1);
    auto fit_log = std::make_shared<bool>(false);
    c_fit->add_option("--lambda", *fit_lambda, "penalty parameter")->required();
    c_fit->add_flag("--iteration-log", *fit_log, "write per-iteration objective CSV");
    c_fit->callback([&action, common_fit, fit_lambda, fit_log] {
        action = [=]() {
            RunConfig cfg = common_fit->resolve();
            const Dataset ds = preprocess(load_dataset(cfg.data_path, cfg.schema_path));
            const PenaltyWeights w = compute_penalty_weights(ds);
            const FitResult fr = fit(ds, *fit_lambda, w, cfg.solver);
            const fs::path dir(cfg.output_dir);
            save_theta(fr.theta, ds.schema(), joined(dir, "theta.txt"));
            std::vector<std::string> outputs{"theta.txt"};
            if (*fit_log) {
                save_iteration_log(fr, joined(dir, "iteration_log.csv"));
                outputs.push_back("iteration_log.csv");
            }
            write_manifest(joined(dir, "fit.manifest.json"), "fit", cfg,
                           {{"data", cfg.data_path}, {"schema", cfg.schema_path}}, outputs);
            std::cout << "fit: lambda=" << format_double(*fit_lambda) << " objective="
                      << format_double(fr.final_objective()) << " edges=" << edge_count(fr.theta)
                      << (fr.converged ? "" : " (not converged)") << " -> " << cfg.output_dir
                      << '\n';
            return 0;
        };
    });

    // ---- select ----
    auto* c_sel = app.add_subcommand("select", "EBIC line search over the lambda grid");
    auto common_sel = std::make_shared<Common>();
    common_sel->attach(c_sel, true, true);
    auto sel_gamma = std::make_shared<double>(1.0);
    auto sel_gamma_opt = c_sel->add_option("--gamma", *sel_gamma, "EBIC gamma in [0,1]");
    c_sel->callback([&action, common_sel, sel_gamma, sel_gamma_opt] {
        action = [=]() {
            RunConfig cfg = common_sel->resolve();
            if (sel_gamma_opt->count()) cfg.selection.gamma = *sel_gamma;
            const Dataset ds = preprocess(load_dataset(cfg.data_path, cfg.schema_path));
            const SelectionResult sel = select_model(ds, cfg.selection, cfg.solver);
            const fs::path dir(cfg.output_dir);
            sel.save_table_csv(joined(dir, "selection.csv"));
            save_theta(sel.theta_star, ds.schema(), joined(dir, "theta_star.txt"));
            write_manifest(joined(dir, "select.manifest.json"), "select", cfg,
                           {{"data", cfg.data_path}, {"schema", cfg.schema_path}},
                           {"selection.csv", "theta_star.txt"});
            std::cout << "select: lambda_star=" << format_double(sel.lambda_star) << " edges="
                      << edge_count(sel.theta_star, cfg.selection.group_edge_count) << " -> "
                      << cfg.output_dir << '\n';
            return 0;
        };
    });

    // ---- neighborhood ----
    auto* c_nei = app.add_subcommand("neighborhood", "extract the first-order neighborhood of a node");
    auto common_nei = std::make_shared<Common>();
    common_nei->attach(c_nei, false, false);
    auto nei_theta = std::make_shared<std::string>();
    auto nei_node = std::make_shared<std::string>();
    auto nei_format = std::make_shared<std::string>("json");
    c_nei->add_option("--theta", *nei_theta, "fitted theta file")->required();
    c_nei->add_option("--node", *nei_node, "node name")->required();
    c_nei->add_option("--format", *nei_format, "json|graphml|dot");
    c_nei->callback([&action, common_nei, nei_theta, nei_node, nei_format] {
        action = [=]() {
            RunConfig cfg = common_nei->resolve();
            const auto [theta, schema] = load_theta(*nei_theta);
            const MixedGraph star = neighborhood(aggregate(theta, schema), *nei_node);
            const GraphFormat format = parse_format(*nei_format);
            const std::string name = "neighborhood_" + *nei_node + "." + format_extension(format);
            export_graph(star, format, joined(fs::path(cfg.output_dir), name));
            write_manifest(joined(fs::path(cfg.output_dir), "neighborhood.manifest.json"),
                           "neighborhood", cfg, {{"theta", *nei_theta}}, {name});
            std::cout << "neighborhood: " << *nei_node << " has " << star.edges.size()
                      << " incident edges -> " << cfg.output_dir << '\n';
            return 0;
        };
    });

    // ---- export ----
    auto* c_exp = app.add_subcommand("export", "export the full fitted graph");
    auto common_exp = std::make_shared<Common>();
    common_exp->attach(c_exp, false, false);
    auto exp_theta = std::make_shared<std::string>();
    auto exp_format = std::make_shared<std::string>("json");
    auto exp_sum = std::make_shared<bool>(false);
    c_exp->add_option("--theta", *exp_theta, "fitted theta file")->required();
    c_exp->add_option("--format", *exp_format, "json|graphml|dot");
    c_exp->add_flag("--sum-abs", *exp_sum, "aggregate grouped edges by absolute sum");
    c_exp->callback([&action, common_exp, exp_theta, exp_format, exp_sum] {
        action = [=]() {
            RunConfig cfg = common_exp->resolve();
            const auto [theta, schema] = load_theta(*exp_theta);
            const MixedGraph g = aggregate(theta, schema,
                                           *exp_sum ? EdgeAggregation::SumAbs : EdgeAggregation::MaxAbs);
            const GraphFormat format = parse_format(*exp_format);
            const std::string name = "graph." + format_extension(format);
            export_graph(g, format, joined(fs::path(cfg.output_dir), name));
            write_manifest(joined(fs::path(cfg.output_dir), "export.manifest.json"), "export", cfg,
                           {{"theta", *exp_theta}}, {name});
            std::cout << "export: " << g.nodes.size() << " nodes, " << g.edges.size()
                      << " edges -> " << cfg.output_dir << '\n';
            return 0;
        };
    });

    // ---- predict ----
    auto* c_pre = app.add_subcommand("predict", "neighborhood prediction of a node on held-out data");
    auto common_pre = std::make_shared<Common>();
    common_pre->attach(c_pre, true, false);
    auto pre_theta = std::make_shared<std::string>();
    auto pre_node = std::make_shared<std::string>();
    c_pre->add_option("--theta", *pre_theta, "fitted theta file")->required();
    c_pre->add_option("--node", *pre_node, "node to predict")->required();
    c_pre->callback([&action, common_pre, pre_theta, pre_node] {
        action = [=]() {
            RunConfig cfg = common_pre->resolve();
            const auto [theta, schema] = load_theta(*pre_theta);
            const Dataset test = load_dataset_csv(cfg.data_path, schema);
            const PredictionReport rep = evaluate_node(theta, test, *pre_node);
            const fs::path dir(cfg.output_dir);

            const int pos = schema.require(*pre_node);
            const int k = schema.kind_index(pos);
            std::ofstream pred(joined(dir, "predictions.csv"));
            pred << "sample";
            if (rep.kind == VarKind::Continuous) {
                pred << ",predicted,observed\n";
            } else {
                for (const auto& lvl : schema.var(pos).levels) pred << ",p_" << lvl;
                pred << ",observed\n";
            }
            for (int i = 0; i < test.n(); ++i) {
                pred << i;
                for (Eigen::Index c = 0; c < rep.predictions.cols(); ++c)
                    pred << ',' << format_double(rep.predictions(i, c));
                if (rep.kind == VarKind::Continuous)
                    pred << ',' << format_double(test.x()(i, k));
                else
                    pred << ',' << schema.var(pos).levels[test.y()(i, k)];
                pred << '\n';
            }
            pred.close();

            nlohmann::ordered_json metrics;
            metrics["node"] = *pre_node;
            metrics["kind"] = rep.kind == VarKind::Continuous ? "continuous" : "discrete";
            metrics["n"] = test.n();
            std::vector<std::string> outputs{"predictions.csv", "metrics.json"};
            if (rep.kind == VarKind::Continuous) {
                metrics["correlation"] = rep.correlation;
            } else {
                metrics["auc"] = rep.auc;
                std::ofstream roc(joined(dir, "roc.csv"));
                roc << "fpr,tpr\n";
                for (const auto& pt : rep.roc)
                    roc << format_double(pt.fpr) << ',' << format_double(pt.tpr) << '\n';
                outputs.push_back("roc.csv");
            }
            std::ofstream mj(joined(dir, "metrics.json"));
            mj << metrics.dump(2) << '\n';
            write_manifest(joined(dir, "predict.manifest.json"), "predict", cfg,
                           {{"data", cfg.data_path}, {"theta", *pre_theta}}, outputs);
            std::cout << "predict: " << *pre_node << ' '
                      << (rep.kind == VarKind::Continuous
                              ? "correlation=" + format_double(rep.correlation)
                              : "auc=" + format_double(rep.auc))
                      << " -> " << cfg.output_dir << '\n';
            return 0;
        };
    });

    // ---- screen ----
    auto* c_scr = app.add_subcommand("screen", "univariate association screening for one response");
    auto common_scr = std::make_shared<Common>();
    common_scr->attach(c_scr, true, true);
    auto scr_response = std::make_shared<std::string>();
    c_scr->add_option("--response", *scr_response, "response variable")->required();
    c_scr->callback([&action, common_scr, scr_response] {
        action = [=]() {
            RunConfig cfg = common_scr->resolve();
            const Dataset ds = preprocess(load_dataset(cfg.data_path, cfg.schema_path));
            const auto records = univariate_screen(ds, *scr_response);
            const fs::path dir(cfg.output_dir);
            std::ofstream out(joined(dir, "associations.csv"));
            out << "response,predictor,neg_log10_p,coefficient,rank,top,collinear,separation,degenerate\n";
            for (const auto& r : records)
                out << r.response << ',' << r.predictor << ',' << format_double(r.neg_log10_p)
                    << ',' << format_double(r.coefficient) << ',' << r.rank << ',' << r.top << ','
                    << r.collinear << ',' << r.separation << ',' << r.degenerate << '\n';
            out.close();
            write_manifest(joined(dir, "screen.manifest.json"), "screen", cfg,
                           {{"data", cfg.data_path}, {"schema", cfg.schema_path}},
                           {"associations.csv"});
            std::cout << "screen: " << *scr_response << " vs " << records.size()
                      << " predictors, top=" << (records.empty() ? "-" : records[0].predictor)
                      << " -> " << cfg.output_dir << '\n';
            return 0;
        };
    });

    // ---- compare ----
    auto* c_cmp = app.add_subcommand("compare", "MGM vs univariate screening after adjustment");
    auto common_cmp = std::make_shared<Common>();
    common_cmp->attach(c_cmp, true, true);
    auto cmp_theta = std::make_shared<std::string>();
    auto cmp_mode = std::make_shared<std::string>("top5");
    auto cmp_seed = std::make_shared<std::uint64_t>(0);
    c_cmp->add_option("--theta", *cmp_theta, "fitted theta file")->required();
    c_cmp->add_option("--mode", *cmp_mode, "top5|random5of10");
    c_cmp->add_option("--seed", *cmp_seed, "seed for the shared random draw");
    c_cmp->callback([&action, common_cmp, cmp_theta, cmp_mode, cmp_seed] {
        action = [=]() {
            RunConfig cfg = common_cmp->resolve();
            cfg.seed = *cmp_seed;
            const Dataset ds = preprocess(load_dataset(cfg.data_path, cfg.schema_path));
            const auto [theta, tschema] = load_theta(*cmp_theta);
            if (!theta.shape().matches(ds.schema()))
                throw DataError("theta file does not match the dataset schema");
            CompareMode mode;
            if (*cmp_mode == "top5")
                mode = CompareMode::Top5;
            else if (*cmp_mode == "random5of10")
                mode = CompareMode::Random5Of10;
            else
                throw UsageError("unknown compare mode: " + *cmp_mode);
            const CompareTable table = compare_top_features(ds, theta, mode, *cmp_seed);
            const fs::path dir(cfg.output_dir);
            table.save_csv(joined(dir, "comparison.csv"));
            write_manifest(joined(dir, "compare.manifest.json"), "compare", cfg,
                           {{"data", cfg.data_path},
                            {"schema", cfg.schema_path},
                            {"theta", *cmp_theta}},
                           {"comparison.csv"});
            int positive = 0, negative = 0;
            for (const auto& r : table.rows) {
                if (r.skipped) continue;
                if (r.difference > 0) ++positive;
                if (r.difference < 0) ++negative;
            }
            std::cout << "compare: " << table.rows.size() - table.skipped << " responses ("
                      << table.skipped << " skipped), differences +" << positive << "/-" << negative
                      << " -> " << cfg.output_dir << '\n';
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1; --help exits 0
    }
    return action ? action() : 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
