// pipeline.hpp - command implementations behind the CLI: gen, train,
// learn-utility, value, drop-eval, oracle, compare.
//
// Conventions shared by every command:
//   - all randomness derives from the config seed through tagged mix_seed
//     calls ("train", "val-perms"/"test-perms" per game, "perm" per draw,
//     "cv" per fitter, "random" per game, "oracle-mc"), so stages rerun
//     independently and reproduce byte-identical CSV/JSON artifacts for any
//     --workers count;
//   - run directories are append-only: a command refuses to overwrite its
//     outputs unless --force is given;
//   - wall-clock times go to .txt files, never into JSON/CSV.
#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>

#include "graphval/config.hpp"
#include "graphval/eval.hpp"

namespace graphval {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Run-directory and data plumbing.
// ---------------------------------------------------------------------------

class RunDir {
public:
    RunDir(const std::string& dir, bool force) : dir_(dir), force_(force) {
        if (dir.empty()) throw ConfigError("out_dir is required");
        fs::create_directories(dir_);
    }

    /// Path for a new artifact; append-only unless --force.
    std::string fresh(const std::string& name) const {
        fs::path p = dir_ / name;
        if (fs::exists(p) && !force_)
            throw DataError("artifact already exists: " + p.string() +
                            " (run directories are append-only; pass --force or use a new directory)");
        return p.string();
    }

    /// Path for a required input artifact.
    std::string existing(const std::string& name) const {
        fs::path p = dir_ / name;
        if (!fs::exists(p)) throw DataError("missing artifact: " + p.string());
        return p.string();
    }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    bool force_;
};

inline Graph load_data(const std::string& data_dir) {
    if (data_dir.empty()) throw ConfigError("data_dir is required");
    fs::path d(data_dir);
    fs::path feats = fs::exists(d / "features.bin") ? d / "features.bin" : d / "features.csv";
    fs::path labels = d / "labels.csv";
    return load_graph((d / "edges.csv").string(), feats.string(),
                      fs::exists(labels) ? labels.string() : std::string(),
                      (d / "splits.json").string());
}

// ---------------------------------------------------------------------------
// Phase setup: universes, train statistics, fixed predicted classes, and the
// feature extractor for one valuation phase (validation or test).
// ---------------------------------------------------------------------------

struct PhaseBundle {
    NodeSet universe;        // where permutations live
    NodeSet train_universe;  // where train statistics are computed
    TrainStats stats;
    FixedLabels fixed;
    FeatureConfig fcfg;
    std::unique_ptr<FeatureExtractor> ex;  // points at members above
};

inline std::unique_ptr<PhaseBundle> make_phase(const Graph& g, const ModelParams& params,
                                               const RunConfig& cfg, bool test_phase) {
    auto b = std::make_unique<PhaseBundle>();
    if (cfg.mode == Mode::Inductive) {
        b->universe = test_phase ? g.splits().test : g.splits().val;
        b->train_universe = g.splits().train;
    } else {
        b->universe = g.all_nodes();
        b->train_universe = g.all_nodes();
    }
    b->stats = compute_train_stats(induced_view(g, b->train_universe), params);
    b->fixed = fix_labels(params, induced_view(g, b->universe));
    b->fcfg = cfg.feature_config();
    b->ex = std::make_unique<FeatureExtractor>(g, params, b->stats, b->fixed, b->fcfg);
    return b;
}

// ---------------------------------------------------------------------------
// Game planning: chunk targets into joint games, sample each game's
// permutations with per-game derived seeds, and drop games whose targets
// have no reachable neighbors (recorded, warned about, never fatal unless
// nothing is left to do at all by the caller's judgment).
// ---------------------------------------------------------------------------

struct GamePlan {
    std::vector<NodeSet> targets;
    std::vector<std::vector<Permutation>> perms;
    std::vector<NodeSet> skipped;  // empty-neighborhood games
};

inline std::vector<NodeSet> make_target_games(const NodeSet& targets, std::size_t batch_size,
                                              bool per_target) {
    if (targets.empty()) throw DataError("no target nodes");
    std::vector<NodeSet> games;
    if (per_target) {
        for (NodeId t : targets) games.push_back(NodeSet::of({t}));
        return games;
    }
    if (batch_size == 0 || batch_size >= targets.size()) {
        games.push_back(targets);
        return games;
    }
    std::vector<NodeId> cur;
    for (NodeId t : targets) {
        cur.push_back(t);
        if (cur.size() == batch_size) {
            games.push_back(NodeSet::of(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) games.push_back(NodeSet::of(cur));
    return games;
}

inline GamePlan plan_games(const Graph& g, const std::vector<NodeSet>& games, std::size_t k,
                           std::size_t M, std::uint64_t seed, const char* tag,
                           const NodeSet* universe) {
    GamePlan plan;
    for (std::size_t gi = 0; gi < games.size(); ++gi) {
        NodeSet players = k_hop_neighborhood(g, games[gi], k, universe);
        if (players.empty()) {
            plan.skipped.push_back(games[gi]);
            continue;
        }
        std::uint64_t game_seed = mix_seed(seed, tag, gi);
        std::vector<Permutation> ps;
        ps.reserve(M);
        for (std::size_t m = 0; m < M; ++m)
            ps.push_back(sample_permutation(g, games[gi], k, mix_seed(game_seed, "perm", m), universe));
        plan.targets.push_back(games[gi]);
        plan.perms.push_back(std::move(ps));
    }
    return plan;
}

inline void write_plan_perms(const std::string& path, const Graph& g, const GamePlan& plan,
                             std::uint64_t seed, std::size_t k) {
    PermFile f;
    f.seed = seed;
    f.k = k;
    for (std::size_t gi = 0; gi < plan.targets.size(); ++gi) {
        PermGameFile game;
        for (NodeId t : plan.targets[gi]) game.targets.push_back(g.external_id(t));
        for (const auto& p : plan.perms[gi]) {
            std::vector<std::int64_t> order;
            for (NodeId v : p.order) order.push_back(g.external_id(v));
            game.perms.push_back(std::move(order));
        }
        f.games.push_back(std::move(game));
    }
    write_permutations(path, f);
}

// ---------------------------------------------------------------------------
// Baseline calibration file.
// ---------------------------------------------------------------------------

inline void save_baselines(const std::string& path,
                           const std::map<std::string, BaselineCalibration>& cals) {
    nlohmann::ordered_json j;
    for (const auto& [name, cal] : cals) {
        nlohmann::ordered_json jc;
        jc["variant"] = name;
        if (cal.variant == BaselineVariant::ATC_MC || cal.variant == BaselineVariant::ATC_NE)
            jc["threshold"] = cal.threshold;
        if (cal.variant == BaselineVariant::DoC) {
            jc["beta"] = cal.beta;
            jc["acc_val"] = cal.acc_val;
            jc["conf_val"] = cal.conf_val;
        }
        j[name] = jc;
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write baselines: " + path);
    out << j.dump(2) << "\n";
}

inline std::map<std::string, BaselineCalibration> load_baselines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read baselines: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("baselines file is not valid JSON: " + std::string(e.what()));
    }
    std::map<std::string, BaselineCalibration> cals;
    for (auto it = j.begin(); it != j.end(); ++it) {
        BaselineCalibration cal;
        cal.variant = baseline_from_name(it.key());
        const auto& jc = it.value();
        if (jc.contains("threshold")) cal.threshold = jc["threshold"].get<double>();
        if (jc.contains("beta")) cal.beta = jc["beta"].get<double>();
        if (jc.contains("acc_val")) cal.acc_val = jc["acc_val"].get<double>();
        if (jc.contains("conf_val")) cal.conf_val = jc["conf_val"].get<double>();
        cals[it.key()] = cal;
    }
    return cals;
}

// ---------------------------------------------------------------------------
// Values CSV reader (writer lives with the valuation engine).
// ---------------------------------------------------------------------------

inline std::vector<std::pair<NodeId, double>> read_values_csv(const std::string& path,
                                                              const Graph& g) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open values file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    std::vector<std::pair<NodeId, double>> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != 2) throw DataError(path + ": expected node_id,value rows");
        NodeId v = g.to_dense(detail::parse_int(cells[0], "node_id"));
        values.emplace_back(v, detail::parse_real(cells[1], "value"));
    }
    std::sort(values.begin(), values.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return values;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

inline void cmd_gen(const RunConfig& cfg, bool force) {
    RunDir out(cfg.out_dir, force);
    SynthResult r = generate(cfg.synth);
    write_edges_csv(out.fresh("edges.csv"), r.graph);
    write_features_bin(out.fresh("features.bin"), r.graph);
    write_labels_csv(out.fresh("labels.csv"), r.graph);
    write_splits_json(out.fresh("splits.json"), r.graph.splits());
    write_noise_nodes(out.fresh("noise_nodes.json"), r.graph, r.noise_nodes);
    std::size_t n_edges = 0;
    for (NodeId v = 0; v < r.graph.n_nodes(); ++v) n_edges += r.graph.degree(v);
    std::cout << "gen: " << r.graph.n_nodes() << " nodes, " << n_edges / 2 << " edges, "
              << r.noise_nodes.size() << " noise neighbors -> " << out.dir().string() << "\n";
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

inline void cmd_train(const RunConfig& cfg, bool force) {
    Graph g = load_data(cfg.data_dir);
    RunDir out(cfg.out_dir, force);
    TrainHyper hp;
    hp.conv = cfg.conv;
    hp.k_hops = cfg.k_hops;
    hp.hidden_dims = cfg.hidden_dims;
    hp.epochs = cfg.epochs;
    hp.learning_rate = cfg.learning_rate;
    hp.batch_size = cfg.batch_size;
    hp.seed = mix_seed(cfg.seed, "train", 0);
    hp.transductive = cfg.mode == Mode::Transductive;

    std::ofstream log(out.fresh("train_log.txt"));
    if (!log) throw DataError("cannot write training log");
    ModelParams params = train_mlp(g, hp, [&](std::size_t e, double loss, double acc) {
        log << "epoch " << e << " loss " << format_double(loss) << " train_acc "
            << format_double(acc) << "\n";
    });
    save_model(out.fresh("model.json"), params);
    std::cout << "train: wrote model.json (" << params.n_layers() << " layers, conv=" << params.conv
              << ")\n";
}

// ---------------------------------------------------------------------------
// learn-utility
// ---------------------------------------------------------------------------

inline void cmd_learn_utility(const RunConfig& cfg, bool force, std::size_t workers) {
    Graph g = load_data(cfg.data_dir);
    RunDir out(cfg.out_dir, force);
    ModelParams params = load_model(out.existing("model.json"));
    auto phase = make_phase(g, params, cfg, /*test_phase=*/false);

    const NodeSet& val_targets = g.splits().val_labeled;
    auto games = make_target_games(val_targets, cfg.val_batch_size, cfg.per_target);
    GamePlan plan = plan_games(g, games, cfg.k_hops, cfg.m_val, cfg.seed, "val-perms",
                               &phase->universe);
    for (const auto& s : plan.skipped)
        std::cerr << "warning: validation game with " << s.size()
                  << " target(s) has no reachable neighbors; skipped\n";
    if (plan.targets.empty()) throw DataError("learn-utility: every validation game is neighborless");
    write_plan_perms(out.fresh("perms_val.json"), g, plan, cfg.seed, cfg.k_hops);

    std::vector<std::pair<NodeSet, std::vector<Permutation>>> game_list;
    for (std::size_t i = 0; i < plan.targets.size(); ++i)
        game_list.emplace_back(plan.targets[i], plan.perms[i]);
    SupervisionSet sup = build_supervision(*phase->ex, game_list, workers);

    auto [psi, phi] = supervision_maps(sup);
    write_psi_csv(out.fresh("psi_val.csv"), g, psi);
    write_phi_csv(out.fresh("phi_val.csv"), g, phi);

    auto fit_one = [&](bool shapley_level, const char* tag, double& seconds, CvReport& cv) {
        FitOptions fo;
        fo.lambda_grid = cfg.lambda_grid;
        fo.folds = cfg.folds;
        fo.seed = mix_seed(cfg.seed, "cv", shapley_level ? 0 : 1);
        fo.active_features = cfg.active_feature_indices();
        auto t0 = std::chrono::steady_clock::now();
        UtilityWeights w = shapley_level ? fit_sgul_shapley(sup, fo, &cv)
                                         : fit_sgul_accuracy(sup, fo, &cv);
        seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (w.zero_design) std::cerr << "warning: " << tag << ": all-zero design, weights forced to 0\n";
        return w;
    };
    double sec_sh = 0.0, sec_acc = 0.0;
    CvReport cv_sh, cv_acc;
    UtilityWeights w_sh = fit_one(true, "sgul-shapley", sec_sh, cv_sh);
    UtilityWeights w_acc = fit_one(false, "sgul-accuracy", sec_acc, cv_acc);
    save_weights(out.fresh("weights_sgul-shapley.json"), w_sh);
    save_weights(out.fresh("weights_sgul-accuracy.json"), w_acc);

    auto save_cv = [&](const std::string& name, const CvReport& cv) {
        nlohmann::ordered_json j;
        j["lambda_grid"] = cv.lambda_grid;
        j["cv_mse"] = cv.cv_mse;
        j["chosen_lambda"] = cv.chosen_lambda;
        j["folds_used"] = cv.folds_used;
        j["rows"] = cv.rows;
        j["cv_ran"] = cv.cv_ran;
        std::ofstream o(out.fresh(name));
        if (!o) throw DataError("cannot write cv report");
        o << j.dump(2) << "\n";
    };
    save_cv("cv_report_sgul-shapley.json", cv_sh);
    save_cv("cv_report_sgul-accuracy.json", cv_acc);

    // label-free baselines calibrated on the full validation view
    SubgraphView full_val = induced_view(g, phase->universe);
    Predictions val_pred = forward(params, full_val);
    std::map<std::string, BaselineCalibration> cals;
    cals["atc-mc"] = calibrate_atc(val_pred, g, g.splits().val_labeled, BaselineVariant::ATC_MC);
    cals["atc-ne"] = calibrate_atc(val_pred, g, g.splits().val_labeled, BaselineVariant::ATC_NE);
    cals["doc"] = calibrate_doc(sup, g, full_val, g.splits().val_labeled, params);
    cals["max-conf"] = BaselineCalibration{BaselineVariant::MAX_CONF, 0.0, 0.0, 0.0, 0.0};
    cals["class-conf"] = BaselineCalibration{BaselineVariant::CLASS_CONF, 0.0, 0.0, 0.0, 0.0};
    save_baselines(out.fresh("baselines.json"), cals);

    // in-sample comparison protocol: 10-permutation batches, as many as M_val
    // affords (capped at ten)
    std::size_t per_batch = std::min<std::size_t>(10, cfg.m_val);
    std::size_t batches = std::min<std::size_t>(10, cfg.m_val / per_batch);
    save_mse_report(out.fresh("mse_report.json"), mse_report(sup, w_sh, w_acc, batches, per_batch));

    save_cost_report(out.fresh("cost_report.json"), out.fresh("cost_times.txt"),
                     cost_report(sup, sec_sh, sec_acc));
    std::cout << "learn-utility: " << sup.n_shapley_rows() << " shapley rows, "
              << sup.n_accuracy_rows() << " accuracy rows; lambda " << format_double(w_sh.lambda)
              << " / " << format_double(w_acc.lambda) << "\n";
}

// ---------------------------------------------------------------------------
// value
// ---------------------------------------------------------------------------

namespace detail {

/// Mean per node across games (nodes can repeat under per-target valuation).
inline std::vector<std::pair<NodeId, double>> merge_game_values(
    const std::vector<std::vector<std::pair<NodeId, double>>>& per_game) {
    std::map<NodeId, std::pair<double, std::size_t>> acc;
    for (const auto& game : per_game)
        for (const auto& [v, x] : game) {
            acc[v].first += x;
            acc[v].second += 1;
        }
    std::vector<std::pair<NodeId, double>> merged;
    for (const auto& [v, sx] : acc)
        merged.emplace_back(v, sx.first / static_cast<double>(sx.second));
    return merged;
}

}  // namespace detail

inline void cmd_value(const RunConfig& cfg, bool force, std::size_t workers) {
    Graph g = load_data(cfg.data_dir);
    RunDir out(cfg.out_dir, force);
    ModelParams params = load_model(out.existing("model.json"));
    auto phase = make_phase(g, params, cfg, /*test_phase=*/true);

    const NodeSet& targets = g.splits().test_targets;
    auto games = make_target_games(targets, cfg.test_batch_size, cfg.per_target);
    GamePlan plan = plan_games(g, games, cfg.k_hops, cfg.m_test, cfg.seed, "test-perms",
                               &phase->universe);
    for (const auto& s : plan.skipped)
        std::cerr << "warning: test game with " << s.size()
                  << " target(s) has no reachable neighbors; skipped\n";
    write_plan_perms(out.fresh("perms_test.json"), g, plan, cfg.seed, cfg.k_hops);

    auto write_meta = [&](const std::string& method, const std::string& utility_desc) {
        nlohmann::ordered_json j;
        j["method"] = method;
        j["utility"] = utility_desc;
        j["m_permutations"] = cfg.m_test;
        j["seed"] = cfg.seed;
        j["k_hops"] = cfg.k_hops;
        j["games"] = plan.targets.size();
        std::vector<std::int64_t> skipped;
        for (const auto& s : plan.skipped)
            for (NodeId t : s) skipped.push_back(g.external_id(t));
        j["skipped_target_nodes"] = skipped;
        std::ofstream o(out.fresh("values_meta_" + method + ".json"));
        if (!o) throw DataError("cannot write values metadata");
        o << j.dump(2) << "\n";
    };

    if (plan.targets.empty()) {
        std::cerr << "warning: no test game has reachable neighbors; writing empty value files\n";
        for (const auto& method : cfg.methods) {
            std::ofstream o(out.fresh("values_" + method + ".csv"));
            o << "node_id,value\n";
            write_meta(method, "none (empty neighborhood)");
        }
        return;
    }

    // feature-level Shapley estimates are utility-independent, compute once
    std::vector<PsiMap> psi_per_game;
    for (std::size_t i = 0; i < plan.targets.size(); ++i)
        psi_per_game.push_back(feature_shapley(*phase->ex, plan.targets[i], plan.perms[i], workers));
    {
        std::map<NodeId, std::pair<std::array<double, FeatureVector::kCount>, std::size_t>> acc;
        for (const auto& psi : psi_per_game)
            for (const auto& [v, row] : psi) {
                auto& slot = acc[v];
                for (std::size_t k = 0; k < row.size(); ++k) slot.first[k] += row[k];
                slot.second += 1;
            }
        PsiMap merged;
        for (const auto& [v, slot] : acc) {
            auto row = slot.first;
            for (auto& x : row) x /= static_cast<double>(slot.second);
            merged[v] = row;
        }
        write_psi_csv(out.fresh("psi_test.csv"), g, merged);
    }

    std::map<std::string, BaselineCalibration> cals;
    bool need_cals = false;
    for (const auto& m : cfg.methods)
        if (m != "sgul-shapley" && m != "sgul-accuracy" && m != "random" && m != "max-conf" &&
            m != "class-conf")
            need_cals = true;
    if (need_cals) cals = load_baselines(out.existing("baselines.json"));

    for (const auto& method : cfg.methods) {
        std::vector<std::vector<std::pair<NodeId, double>>> per_game;
        std::string desc;
        if (method == "sgul-shapley" || method == "sgul-accuracy") {
            UtilityWeights w = load_weights(out.existing("weights_" + method + ".json"));
            LinearUtility u = w.to_linear();
            desc = "learned linear utility (" + method + ")";
            for (const auto& psi : psi_per_game) {
                std::vector<std::pair<NodeId, double>> vals;
                for (const auto& [v, row] : psi) vals.emplace_back(v, u.apply_psi(row));
                per_game.push_back(std::move(vals));
            }
        } else if (method == "random") {
            desc = "seeded uniform values";
            for (std::size_t gi = 0; gi < plan.targets.size(); ++gi) {
                Rng rng(mix_seed(cfg.seed, "random", gi));
                std::vector<std::pair<NodeId, double>> vals;
                NodeSet players = NodeSet::of(plan.perms[gi].front().order);
                for (NodeId v : players) vals.emplace_back(v, rng.uniform());
                per_game.push_back(std::move(vals));
            }
        } else {
            BaselineVariant variant = baseline_from_name(method);
            BaselineCalibration cal;
            if (variant == BaselineVariant::MAX_CONF || variant == BaselineVariant::CLASS_CONF)
                cal.variant = variant;
            else
                cal = cals.at(method);
            desc = "label-free baseline (" + method + ")";
            for (std::size_t gi = 0; gi < plan.targets.size(); ++gi) {
                const NodeSet& game_targets = plan.targets[gi];
                ScalarUtility u = [&](const SubgraphView& view) {
                    return baseline_utility(cal, g, view, game_targets, params, &phase->fixed);
                };
                ValueReport r = scalar_shapley(g, game_targets, plan.perms[gi], u, workers);
                per_game.push_back(std::move(r.values));
            }
        }
        ValueReport report;
        report.method = method;
        report.values = detail::merge_game_values(per_game);
        report.m_permutations = cfg.m_test;
        report.seed = cfg.seed;
        write_values_csv(out.fresh("values_" + method + ".csv"), g, report);
        write_meta(method, desc);
    }
    std::cout << "value: " << cfg.methods.size() << " method(s) over " << plan.targets.size()
              << " game(s)\n";
}

// ---------------------------------------------------------------------------
// drop-eval
// ---------------------------------------------------------------------------

inline void cmd_drop_eval(const RunConfig& cfg, bool force) {
    Graph g = load_data(cfg.data_dir);
    RunDir out(cfg.out_dir, force);
    ModelParams params = load_model(out.existing("model.json"));
    NodeSet universe = cfg.mode == Mode::Inductive ? g.splits().test : g.all_nodes();
    const NodeSet& targets = g.splits().test_targets;

    nlohmann::ordered_json summary;
    std::vector<std::pair<std::string, DropCurve>> curves;
    for (const auto& method : cfg.methods) {
        auto values = read_values_csv(out.existing("values_" + method + ".csv"), g);
        DropCurve c = node_dropping(g, targets, cfg.k_hops, values, params, &universe);
        write_curve_csv(out.fresh("curve_" + method + ".csv"), c);
        summary[method] = c.auc;
        curves.emplace_back(method, std::move(c));
    }
    {
        std::ofstream o(out.fresh("auc_summary.json"));
        if (!o) throw DataError("cannot write auc summary");
        o << summary.dump(2) << "\n";
    }
    {
        // one gnuplot-friendly block: k then one accuracy column per method
        std::ofstream o(out.fresh("curves.dat"));
        if (!o) throw DataError("cannot write curves.dat");
        o << "# k";
        for (const auto& [m, c] : curves) o << " " << m;
        o << "\n";
        std::size_t rows = curves.empty() ? 0 : curves.front().second.acc.size();
        for (std::size_t k = 0; k < rows; ++k) {
            o << k;
            for (const auto& [m, c] : curves) o << " " << format_double(c.acc[k]);
            o << "\n";
        }
    }
    std::cout << "drop-eval: " << curves.size() << " curve(s), K="
              << (curves.empty() ? 0 : curves.front().second.acc.size() - 1) << "\n";
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

inline void cmd_oracle(const RunConfig& cfg, bool force, std::size_t workers) {
    Graph g = load_data(cfg.data_dir);
    RunDir out(cfg.out_dir, force);
    ModelParams params = load_model(out.existing("model.json"));
    auto phase = make_phase(g, params, cfg, /*test_phase=*/true);
    const NodeSet& targets = g.splits().test_targets;

    // learned weights when present, otherwise unit weight on every feature
    LinearUtility lin;
    std::string util_desc;
    fs::path wpath = out.dir() / "weights_sgul-shapley.json";
    if (fs::exists(wpath)) {
        lin = load_weights(wpath.string()).to_linear();
        util_desc = "learned linear utility (sgul-shapley)";
    } else {
        for (std::size_t k = 0; k < FeatureVector::kCount; ++k) lin.terms.emplace_back(k, 1.0);
        util_desc = "unit-weight linear utility over all nine features";
    }
    const FeatureExtractor& ex = *phase->ex;
    ScalarUtility u = [&](const SubgraphView& view) { return lin.apply(ex.extract(view, targets)); };

    ExactValues exact = exact_values(g, targets, cfg.k_hops, u, cfg.oracle_cap, &phase->universe);
    McValues mc = mc_values(g, targets, cfg.k_hops, u, cfg.m_oracle,
                            mix_seed(cfg.seed, "oracle-mc", 0), &phase->universe);

    // dual-path decomposition check on a fresh permutation batch
    std::vector<Permutation> perms;
    std::uint64_t pseed = mix_seed(cfg.seed, "oracle-perms", 0);
    for (std::size_t m = 0; m < cfg.m_test; ++m)
        perms.push_back(sample_permutation(g, targets, cfg.k_hops, mix_seed(pseed, "perm", m),
                                           &phase->universe));
    PsiMap psi = feature_shapley(ex, targets, perms, workers);
    ValueReport phi_report = scalar_shapley(g, targets, perms, u, workers);
    PhiMap phi;
    for (const auto& [v, x] : phi_report.values) phi[v] = x;
    double decompose_err = decompose_check(lin, psi, phi);

    std::size_t within = 0;
    double worst_sigma = 0.0;
    for (const auto& [v, mean] : mc.mean) {
        double gap = std::abs(mean - exact.process.at(v));
        double se = mc.se.at(v);
        if (se == 0.0 ? gap == 0.0 : gap <= 3.0 * se) ++within;
        if (se > 0.0) worst_sigma = std::max(worst_sigma, gap / se);
    }

    nlohmann::ordered_json j;
    j["utility"] = util_desc;
    j["n_players"] = exact.uniform.size();
    j["n_orders"] = exact.n_orders;
    j["m_draws"] = cfg.m_oracle;
    j["decompose_max_err"] = decompose_err;
    j["within_3se"] = within;
    j["worst_gap_sigma"] = worst_sigma;
    j["single_order"] = exact.n_orders == 1;
    nlohmann::ordered_json nodes = nlohmann::json::array();
    for (const auto& [v, uval] : exact.uniform) {
        nlohmann::ordered_json row;
        row["node_id"] = g.external_id(v);
        row["exact_uniform"] = uval;
        row["exact_process"] = exact.process.at(v);
        row["mc_mean"] = mc.mean.at(v);
        row["mc_se"] = mc.se.at(v);
        nodes.push_back(row);
    }
    j["nodes"] = nodes;
    std::ofstream o(out.fresh("oracle_report.json"));
    if (!o) throw DataError("cannot write oracle report");
    o << j.dump(2) << "\n";
    std::cout << "oracle: " << exact.n_orders << " valid orders over " << exact.uniform.size()
              << " players; decompose_max_err " << format_double(decompose_err) << "\n";
}

// ---------------------------------------------------------------------------
// compare: full pipeline over several seeds, aggregated.
// ---------------------------------------------------------------------------

inline void cmd_compare(const RunConfig& cfg, bool force, std::size_t workers) {
    RunDir out(cfg.out_dir, force);
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < cfg.n_seeds; ++i) seeds.push_back(cfg.seed + i);

    struct MethodAgg {
        std::vector<double> aucs;
        std::vector<double> noise_means;
        std::vector<double> clean_means;
        std::vector<std::vector<double>> curves;
    };
    std::map<std::string, MethodAgg> agg;

    for (std::uint64_t s : seeds) {
        fs::path base = out.dir() / ("seed_" + std::to_string(s));
        RunConfig c = cfg;
        c.seed = s;
        c.synth.seed = s;
        c.data_dir = (base / "data").string();

        RunConfig gen_cfg = c;
        gen_cfg.out_dir = c.data_dir;
        cmd_gen(gen_cfg, force);

        c.out_dir = (base / "run").string();
        cmd_train(c, force);
        cmd_learn_utility(c, force, workers);
        cmd_value(c, force, workers);
        cmd_drop_eval(c, force);

        // collect
        nlohmann::json auc_summary;
        {
            std::ifstream in((fs::path(c.out_dir) / "auc_summary.json").string());
            in >> auc_summary;
        }
        nlohmann::json noise_json;
        {
            std::ifstream in((base / "data" / "noise_nodes.json").string());
            in >> noise_json;
        }
        std::set<std::int64_t> noise_ids;
        for (auto id : noise_json.at("noise_nodes").get<std::vector<std::int64_t>>())
            noise_ids.insert(id);

        for (const auto& method : cfg.methods) {
            MethodAgg& ma = agg[method];
            ma.aucs.push_back(auc_summary.at(method).get<double>());
            // value split: planted noise neighbors vs everything else
            std::ifstream vin((fs::path(c.out_dir) / ("values_" + method + ".csv")).string());
            std::string line;
            std::getline(vin, line);  // header
            double noise_sum = 0.0, clean_sum = 0.0;
            std::size_t noise_n = 0, clean_n = 0;
            while (std::getline(vin, line)) {
                if (line.empty()) continue;
                auto cells = detail::split_csv_line(line);
                std::int64_t id = std::stoll(cells.at(0));
                double val = std::stod(cells.at(1));
                if (noise_ids.count(id)) {
                    noise_sum += val;
                    ++noise_n;
                } else {
                    clean_sum += val;
                    ++clean_n;
                }
            }
            ma.noise_means.push_back(noise_n ? noise_sum / static_cast<double>(noise_n)
                                             : std::numeric_limits<double>::quiet_NaN());
            ma.clean_means.push_back(clean_n ? clean_sum / static_cast<double>(clean_n)
                                             : std::numeric_limits<double>::quiet_NaN());
            // curve
            std::ifstream cin((fs::path(c.out_dir) / ("curve_" + method + ".csv")).string());
            std::getline(cin, line);
            std::vector<double> acc;
            while (std::getline(cin, line)) {
                if (line.empty()) continue;
                auto cells = detail::split_csv_line(line);
                acc.push_back(std::stod(cells.at(1)));
            }
            ma.curves.push_back(std::move(acc));
        }
    }

    auto mean_sd = [](const std::vector<double>& xs) {
        double m = 0.0;
        for (double x : xs) m += x;
        m /= static_cast<double>(xs.size());
        double v = 0.0;
        for (double x : xs) v += (x - m) * (x - m);
        double sd = xs.size() > 1 ? std::sqrt(v / static_cast<double>(xs.size() - 1)) : 0.0;
        return std::make_pair(m, sd);
    };

    nlohmann::ordered_json summary;
    summary["seeds"] = seeds;
    nlohmann::ordered_json methods_json;
    for (const auto& method : cfg.methods) {
        const MethodAgg& ma = agg.at(method);
        auto [am, asd] = mean_sd(ma.aucs);
        nlohmann::ordered_json mj;
        mj["aucs"] = ma.aucs;
        mj["auc_mean"] = am;
        mj["auc_sd"] = asd;
        mj["noise_mean_values"] = ma.noise_means;
        mj["clean_mean_values"] = ma.clean_means;
        std::size_t below = 0;
        for (std::size_t i = 0; i < ma.noise_means.size(); ++i)
            if (!std::isnan(ma.noise_means[i]) && !std::isnan(ma.clean_means[i]) &&
                ma.noise_means[i] < ma.clean_means[i])
                ++below;
        mj["noise_below_clean"] = below;
        methods_json[method] = mj;

        // mean +- sd curve up to the shortest seed curve
        std::size_t min_len = std::numeric_limits<std::size_t>::max();
        for (const auto& c : ma.curves) min_len = std::min(min_len, c.size());
        std::ofstream o(out.fresh("curve_mean_" + method + ".csv"));
        if (!o) throw DataError("cannot write mean curve");
        o << "k,acc_mean,acc_sd\n";
        for (std::size_t k = 0; k < min_len; ++k) {
            std::vector<double> col;
            for (const auto& c : ma.curves) col.push_back(c[k]);
            auto [m, sd] = mean_sd(col);
            o << k << "," << format_double(m) << "," << format_double(sd) << "\n";
        }
    }
    summary["methods"] = methods_json;
    std::ofstream o(out.fresh("compare_summary.json"));
    if (!o) throw DataError("cannot write compare summary");
    o << summary.dump(2) << "\n";
    std::cout << "compare: " << seeds.size() << " seed(s), " << cfg.methods.size()
              << " method(s) -> compare_summary.json\n";
}

// ---------------------------------------------------------------------------
// Dispatcher used by the CLI binary.
// ---------------------------------------------------------------------------

inline void run_command(const std::string& cmd, const RunConfig& cfg, bool force,
                        std::size_t workers) {
    if (cmd == "gen")
        cmd_gen(cfg, force);
    else if (cmd == "train")
        cmd_train(cfg, force);
    else if (cmd == "learn-utility")
        cmd_learn_utility(cfg, force, workers);
    else if (cmd == "value")
        cmd_value(cfg, force, workers);
    else if (cmd == "drop-eval")
        cmd_drop_eval(cfg, force);
    else if (cmd == "oracle")
        cmd_oracle(cfg, force, workers);
    else if (cmd == "compare")
        cmd_compare(cfg, force, workers);
    else
        throw ConfigError("unknown command: " + cmd);
}

}  // namespace graphval
