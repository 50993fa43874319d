#include <catch2/catch_amalgamated.hpp>

#include "graphval/pipeline.hpp"
#include "test_helpers.hpp"

using namespace graphval;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* tag) {
    fs::path d = fs::temp_directory_path() / (std::string("graphval_pipe_") + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

/// Nine-node line-of-blocks dataset: train 0-3, val 4-6, test 7-8.
/// Validation game {4,5} has the single neighbor 6; test target 7 has the
/// single neighbor 8, so every stage stays enumerable by hand.
void write_tiny_dataset(const fs::path& dir) {
    std::vector<std::pair<NodeId, NodeId>> edges = {{0, 1}, {1, 2}, {2, 3},
                                                    {4, 5}, {5, 6}, {7, 8}};
    std::vector<float> feats;
    Rng rng(99);
    for (std::size_t v = 0; v < 9; ++v) {
        double mu = v % 2 == 0 ? -1.0 : 1.0;
        feats.push_back(static_cast<float>(mu + 0.2 * rng.normal()));
        feats.push_back(static_cast<float>(-mu + 0.2 * rng.normal()));
    }
    std::vector<std::int32_t> labels = {0, 1, 0, 1, 0, 1, 0, 1, 0};
    SplitMembership sp;
    sp.train = NodeSet::of({0, 1, 2, 3});
    sp.train_labeled = sp.train;
    sp.val = NodeSet::of({4, 5, 6});
    sp.val_labeled = NodeSet::of({4, 5});
    sp.test = NodeSet::of({7, 8});
    sp.test_targets = NodeSet::of({7});
    Graph g(9, edges, std::move(feats), 2, std::move(labels), std::move(sp));
    write_edges_csv((dir / "edges.csv").string(), g);
    write_features_csv((dir / "features.csv").string(), g);
    write_labels_csv((dir / "labels.csv").string(), g);
    write_splits_json((dir / "splits.json").string(), g.splits());
}

RunConfig tiny_config(const fs::path& data, const fs::path& out) {
    RunConfig cfg;
    cfg.data_dir = data.string();
    cfg.out_dir = out.string();
    cfg.mode = Mode::Inductive;
    cfg.k_hops = 2;
    cfg.hidden_dims = {4};
    cfg.epochs = 12;
    cfg.m_val = 4;
    cfg.m_test = 2;
    cfg.folds = 2;
    cfg.lambda_grid = {0.0, 1e-3};
    cfg.seed = 5;
    cfg.m_oracle = 40;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p.string(), std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("config defaults and strict key validation", "[pipeline]") {
    RunConfig cfg = parse_config(nlohmann::json::object());
    REQUIRE(cfg.conv == "sgc");
    REQUIRE(cfg.k_hops == 2);
    REQUIRE(cfg.m_val == 50);
    REQUIRE(cfg.m_test == 5);
    REQUIRE(cfg.methods.size() == 8);
    REQUIRE(cfg.mode == Mode::Inductive);

    REQUIRE_THROWS_AS(parse_config({{"no_such_key", 1}}), ConfigError);
    REQUIRE_THROWS_AS(parse_config({{"synth", {{"bogus", 1}}}}), ConfigError);
    REQUIRE_THROWS_AS(parse_config({{"conv", "gat"}}), ConfigError);
    REQUIRE_THROWS_AS(parse_config({{"mode", "semi"}}), ConfigError);
    // an out-of-order grid is normalized to ascending, which the cv tie rule
    // (prefer the larger lambda on equal error) relies on
    REQUIRE(parse_config({{"lambda_grid", {0.1, 0.01}}}).lambda_grid ==
            std::vector<double>{0.01, 0.1});
    REQUIRE_THROWS_AS(parse_config({{"lambda_grid", nlohmann::json::array()}}), ConfigError);
    REQUIRE_THROWS_AS(parse_config({{"lambda_grid", {-0.5}}}), ConfigError);
    REQUIRE_THROWS_AS(parse_config({{"methods", {"sgul-shapley"}}, {"method", "random"}}),
                      ConfigError);  // mutually exclusive
    REQUIRE_THROWS_AS(parse_config({{"methods", {"who"}}}), ConfigError);
    REQUIRE_THROWS_AS(parse_config({{"features", {"not_a_feature"}}}), ConfigError);
    REQUIRE_THROWS_AS(parse_config({{"folds", 1}}), ConfigError);

    RunConfig one = parse_config({{"method", "doc"}});
    REQUIRE(one.methods == std::vector<std::string>{"doc"});
    RunConfig feat = parse_config({{"features", {"max_conf", "edge_cos"}}});
    REQUIRE(feat.active_feature_indices() == std::vector<std::size_t>{0, 3});
}

TEST_CASE("synth block and seed propagate through the config", "[pipeline]") {
    nlohmann::json j = {{"seed", 42},
                        {"mode", "transductive"},
                        {"synth", {{"n_train", 33}, {"p_in", 0.5}}}};
    RunConfig cfg = parse_config(j);
    REQUIRE(cfg.synth.n_train == 33);
    REQUIRE(cfg.synth.p_in == 0.5);
    REQUIRE(cfg.synth.seed == 42);
    REQUIRE(cfg.synth.transductive);
}

TEST_CASE("overrides use dotted paths and json values", "[pipeline]") {
    fs::path dir = scratch_dir("cfg");
    {
        std::ofstream f((dir / "c.json").string());
        f << R"({"k_hops": 2, "synth": {"p_in": 0.3}})";
    }
    RunConfig cfg = load_config((dir / "c.json").string(),
                                {"k_hops=3", "synth.p_in=0.45", "method=random", "seed=9"});
    REQUIRE(cfg.k_hops == 3);
    REQUIRE(cfg.synth.p_in == 0.45);
    REQUIRE(cfg.methods == std::vector<std::string>{"random"});
    REQUIRE(cfg.seed == 9);
    REQUIRE(cfg.synth.seed == 9);

    REQUIRE_THROWS_AS(load_config("", {"k_hops"}), ConfigError);          // no '='
    REQUIRE_THROWS_AS(load_config("", {"nope.deep=1"}), ConfigError);     // unknown path
    REQUIRE_THROWS_AS(load_config((dir / "missing.json").string(), {}), ConfigError);
}

TEST_CASE("run directories are append-only without --force", "[pipeline]") {
    fs::path dir = scratch_dir("rundir");
    RunDir rd(dir.string(), /*force=*/false);
    std::ofstream(rd.fresh("a.txt")) << "x";
    REQUIRE_THROWS_AS(rd.fresh("a.txt"), DataError);
    REQUIRE(rd.existing("a.txt") == (dir / "a.txt").string());
    REQUIRE_THROWS_AS(rd.existing("b.txt"), DataError);
    RunDir forced(dir.string(), /*force=*/true);
    REQUIRE_NOTHROW(forced.fresh("a.txt"));
}

TEST_CASE("the command pipeline runs end to end on a hand-built dataset", "[pipeline]") {
    fs::path data = scratch_dir("tiny_data");
    fs::path run = scratch_dir("tiny_run");
    write_tiny_dataset(data);
    RunConfig cfg = tiny_config(data, run);

    cmd_train(cfg, false);
    REQUIRE(fs::exists(run / "model.json"));
    REQUIRE(fs::exists(run / "train_log.txt"));

    cmd_learn_utility(cfg, false, 1);
    for (const char* name :
         {"perms_val.json", "psi_val.csv", "phi_val.csv", "weights_sgul-shapley.json",
          "weights_sgul-accuracy.json", "cv_report_sgul-shapley.json",
          "cv_report_sgul-accuracy.json", "baselines.json", "mse_report.json",
          "cost_report.json", "cost_times.txt"})
        REQUIRE(fs::exists(run / name));

    // the validation game has one player (node 6), supervising one row
    auto weights = load_weights((run / "weights_sgul-shapley.json").string());
    for (double x : weights.w) REQUIRE(x >= 0.0);
    auto mse_json = nlohmann::json::parse(slurp(run / "mse_report.json"));
    REQUIRE(mse_json.contains("mse_shapley"));
    REQUIRE(mse_json.contains("p_value"));
    // m_val = 4 affords 1 batch of min(10, 4)
    REQUIRE(mse_json.at("per_batch").get<int>() == 4);
    REQUIRE(mse_json.at("batches").get<int>() == 1);

    cmd_value(cfg, false, 1);
    REQUIRE(fs::exists(run / "perms_test.json"));
    REQUIRE(fs::exists(run / "psi_test.csv"));
    for (const auto& m : cfg.methods) {
        REQUIRE(fs::exists(run / ("values_" + m + ".csv")));
        REQUIRE(fs::exists(run / ("values_meta_" + m + ".json")));
    }
    // test target 7 has the single neighbor 8
    Graph g = load_data(cfg.data_dir);
    auto vals = read_values_csv((run / "values_sgul-shapley.csv").string(), g);
    REQUIRE(vals.size() == 1);
    REQUIRE(vals[0].first == 8);

    cmd_drop_eval(cfg, false);
    REQUIRE(fs::exists(run / "auc_summary.json"));
    REQUIRE(fs::exists(run / "curves.dat"));
    auto aucs = nlohmann::json::parse(slurp(run / "auc_summary.json"));
    for (const auto& m : cfg.methods) REQUIRE(aucs.contains(m));
    // one removable neighbor: curve has Acc_0 and Acc_1
    std::string curve = slurp(run / "curve_random.csv");
    REQUIRE(curve.rfind("k,acc\n", 0) == 0);
    REQUIRE(std::count(curve.begin(), curve.end(), '\n') == 3);

    cmd_oracle(cfg, false, 1);
    auto oracle = nlohmann::json::parse(slurp(run / "oracle_report.json"));
    REQUIRE(oracle.at("n_orders").get<int>() == 1);       // chain game
    REQUIRE(oracle.at("single_order").get<bool>());
    REQUIRE(oracle.at("decompose_max_err").get<double>() <= 1e-9);
    REQUIRE(oracle.at("within_3se").get<int>() == 1);
    REQUIRE(oracle.at("nodes").size() == 1);
    // single valid order: sampling is exact
    auto node = oracle.at("nodes")[0];
    REQUIRE(node.at("mc_mean").get<double>() == node.at("exact_process").get<double>());
    REQUIRE(node.at("mc_se").get<double>() == 0.0);

    // append-only: re-running without --force refuses to overwrite
    REQUIRE_THROWS_AS(cmd_train(cfg, false), DataError);
}

TEST_CASE("artifacts are byte-identical across worker counts and reruns", "[pipeline]") {
    fs::path data = scratch_dir("det_data");
    write_tiny_dataset(data);
    fs::path run1 = scratch_dir("det_run1");
    fs::path run2 = scratch_dir("det_run2");

    auto run_all = [&](const fs::path& out, std::size_t workers) {
        RunConfig cfg = tiny_config(data, out);
        cmd_train(cfg, false);
        cmd_learn_utility(cfg, false, workers);
        cmd_value(cfg, false, workers);
        cmd_drop_eval(cfg, false);
    };
    run_all(run1, 1);
    run_all(run2, 2);

    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(run1)) {
        std::string ext = entry.path().extension().string();
        if (ext != ".csv" && ext != ".json") continue;
        fs::path other = run2 / entry.path().filename();
        REQUIRE(fs::exists(other));
        INFO(entry.path().filename().string());
        REQUIRE(slurp(entry.path()) == slurp(other));
        ++compared;
    }
    REQUIRE(compared >= 15);
}

TEST_CASE("generated data feeds the pipeline and compare aggregates seeds", "[pipeline]") {
    fs::path out = scratch_dir("cmp");
    RunConfig cfg;
    cfg.out_dir = out.string();
    cfg.mode = Mode::Inductive;
    cfg.epochs = 10;
    cfg.m_val = 4;
    cfg.m_test = 2;
    cfg.folds = 2;
    cfg.lambda_grid = {0.0, 1e-3};
    cfg.methods = {"sgul-shapley", "random"};
    cfg.n_seeds = 2;
    cfg.seed = 3;
    cfg.synth.n_train = 36;
    cfg.synth.n_val = 24;
    cfg.synth.n_test = 24;
    cfg.synth.seed = 3;

    cmd_compare(cfg, false, 1);
    REQUIRE(fs::exists(out / "compare_summary.json"));
    auto summary = nlohmann::json::parse(slurp(out / "compare_summary.json"));
    REQUIRE(summary.at("seeds").size() == 2);
    for (const char* m : {"sgul-shapley", "random"}) {
        const auto& mj = summary.at("methods").at(m);
        REQUIRE(mj.at("aucs").size() == 2);
        REQUIRE(std::isfinite(mj.at("auc_mean").get<double>()));
        REQUIRE(mj.at("noise_mean_values").size() == 2);
        REQUIRE(fs::exists(out / (std::string("curve_mean_") + m + ".csv")));
    }
    // per-seed artifacts live under seed directories
    REQUIRE(fs::exists(out / "seed_3" / "data" / "noise_nodes.json"));
    REQUIRE(fs::exists(out / "seed_4" / "run" / "auc_summary.json"));
}

TEST_CASE("unknown commands are configuration errors", "[pipeline]") {
    RunConfig cfg;
    REQUIRE_THROWS_AS(run_command("frobnicate", cfg, false, 1), ConfigError);
}

TEST_CASE("values csv reading validates shape", "[pipeline]") {
    fs::path dir = scratch_dir("vals");
    Graph g = testutil::random_graph(2, 8, 2, 2, 0.3);
    {
        std::ofstream f((dir / "v.csv").string());
        f << "node_id,value\n3,0.5\n1,0.25\n";
    }
    auto vals = read_values_csv((dir / "v.csv").string(), g);
    REQUIRE(vals.size() == 2);
    REQUIRE(vals[0].first == 1);  // sorted by dense id
    REQUIRE(vals[0].second == 0.25);
    {
        std::ofstream f((dir / "bad.csv").string());
        f << "node_id,value\n3\n";
    }
    REQUIRE_THROWS_AS(read_values_csv((dir / "bad.csv").string(), g), DataError);
}
