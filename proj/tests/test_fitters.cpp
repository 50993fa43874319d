#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <optional>

#include "graphval/eval.hpp"
#include "graphval/fitters.hpp"
#include "test_helpers.hpp"

using namespace graphval;

namespace {

/// Supervision with only pooled shapley rows: phi = dot(w_true, psi) + noise.
SupervisionSet planted_shapley(std::uint64_t seed, std::size_t rows,
                               const std::array<double, 9>& w_true, double noise) {
    Rng rng(seed);
    SupervisionSet s;
    for (std::size_t r = 0; r < rows; ++r) {
        ShapleyRow row;
        row.node = static_cast<NodeId>(r);
        row.game = 0;
        double y = 0.0;
        for (std::size_t k = 0; k < 9; ++k) {
            row.psi[k] = rng.uniform() * 2.0 - 0.5;
            y += w_true[k] * row.psi[k];
        }
        row.phi = y + noise * rng.normal();
        s.shapley_rows.push_back(row);
    }
    return s;
}

/// Accuracy-level analog with an intercept.
SupervisionSet planted_accuracy(std::uint64_t seed, std::size_t rows,
                                const std::array<double, 9>& w_true, double b, double noise) {
    Rng rng(seed);
    SupervisionSet s;
    for (std::size_t r = 0; r < rows; ++r) {
        AccuracyRow row;
        double y = b;
        for (std::size_t k = 0; k < 9; ++k) {
            row.x[k] = rng.uniform();
            y += w_true[k] * row.x[k];
        }
        row.y = y + noise * rng.normal();
        s.accuracy_rows.push_back(row);
    }
    return s;
}

struct ValSetup {
    Graph g;
    ModelParams params;
    TrainStats stats;
    FixedLabels fixed;
};

ValSetup trained_setup(std::uint64_t seed) {
    Graph g = testutil::random_graph(seed, 18, 3, 2, 0.3);
    TrainHyper hp;
    hp.epochs = 25;
    hp.seed = seed + 1;
    ModelParams p = train_mlp(g, hp);
    TrainStats st = compute_train_stats(induced_view(g, g.splits().train), p);
    FixedLabels fl = fix_labels(p, full_view(g));
    return ValSetup{std::move(g), std::move(p), std::move(st), std::move(fl)};
}

}  // namespace

TEST_CASE("supervision row counts follow the closed forms", "[fitters]") {
    // star-with-tail: target 0, players {1,2,3}
    Graph g = testutil::tiny_graph(4, {{0, 1}, {0, 2}, {1, 3}},
                                   {1.0f, 0.5f, -1.0f, 2.0f}, 1, {0, 1, 0, 1});
    ModelParams p = testutil::random_model(2, 1, 2);
    TrainStats st = compute_train_stats(full_view(g), p);
    FixedLabels fl = fix_labels(p, full_view(g));
    FeatureExtractor ex(g, p, st, fl);

    NodeSet targets = NodeSet::of({0});
    NodeSet uni = g.all_nodes();
    std::vector<Permutation> perms;
    for (std::size_t m = 0; m < 2; ++m)
        perms.push_back(sample_permutation(g, targets, 2, mix_seed(3, "perm", m), &uni));
    SupervisionSet sup = build_supervision(ex, {{targets, perms}});

    // one pooled row per player; one accuracy row per recorded prefix
    REQUIRE(sup.n_shapley_rows() == 3);
    REQUIRE(sup.n_accuracy_rows() == 2 * (3 + 1));
    REQUIRE(sup.games.size() == 1);

    // independent recomputation of the pooled phi for one player
    ScalarUtility acc_util = [&](const SubgraphView& v) {
        return accuracy(forward(p, v), g, targets);
    };
    for (const auto& row : sup.shapley_rows) {
        double want = 0.0;
        for (const auto& perm : perms) {
            NodeSet act = targets;
            double before = acc_util(induced_view(g, act));
            for (NodeId v : perm.order) {
                act.insert(v);
                double after = acc_util(induced_view(g, act));
                if (v == row.node) want += (after - before) / 2.0;
                before = after;
            }
        }
        REQUIRE(row.phi == Catch::Approx(want).margin(1e-9));
    }

    // an unlabeled target cannot supervise accuracy
    SplitMembership sp2;
    sp2.train = NodeSet::of({0, 1, 2, 3});
    sp2.train_labeled = NodeSet::of({1, 2, 3});  // node 0 carries no label
    Graph unlabeled(4, {{0, 1}, {0, 2}, {1, 3}}, {1.0f, 0.5f, -1.0f, 2.0f}, 1, {-1, 1, 0, 1},
                    std::move(sp2));
    TrainStats st2 = compute_train_stats(full_view(unlabeled), p);
    FixedLabels fl2 = fix_labels(p, full_view(unlabeled));
    FeatureExtractor ex2(unlabeled, p, st2, fl2);
    std::vector<Permutation> perms2;
    perms2.push_back(sample_permutation(unlabeled, targets, 2, 4, &uni));
    REQUIRE_THROWS_AS(build_supervision(ex2, {{targets, perms2}}), DataError);
}

TEST_CASE("larger games produce the documented row budget", "[fitters]") {
    // closed form: a game with P players and M permutations yields P pooled
    // shapley rows and M*(P+1) accuracy rows
    std::size_t P = 10, M = 50;
    SupervisionSet s;
    GameSupervision game;
    game.targets = NodeSet::of({100});
    for (std::size_t m = 0; m < M; ++m) {
        Permutation perm;
        perm.targets = game.targets;
        for (std::size_t j = 0; j < P; ++j) perm.order.push_back(static_cast<NodeId>(j));
        game.perms.push_back(perm);
        game.prefix_features.emplace_back(P + 1);
        game.prefix_acc.emplace_back(P + 1, 0.0);
    }
    s.games.push_back(std::move(game));
    detail::pool_rows(s);
    REQUIRE(s.n_shapley_rows() == P);
    REQUIRE(s.n_accuracy_rows() == M * (P + 1));
    CostReport cr = cost_report(s);
    REQUIRE(cr.rows_shapley == P);
    REQUIRE(cr.rows_accuracy == M * (P + 1));
    REQUIRE(cr.rows_shapley < cr.rows_accuracy);
}

TEST_CASE("planted weights are recovered by the shapley-level fit", "[fitters]") {
    std::array<double, 9> w_true{};
    w_true[1] = 0.3;
    w_true[2] = 0.7;
    SupervisionSet sup = planted_shapley(11, 240, w_true, 0.004);
    FitOptions opt;
    opt.seed = 5;
    UtilityWeights w = fit_sgul_shapley(sup, opt);
    for (std::size_t k = 0; k < 9; ++k) {
        REQUIRE(w.w[k] >= 0.0);
        REQUIRE(std::abs(w.w[k] - w_true[k]) < 0.05);
    }
    REQUIRE_FALSE(w.has_intercept);
    REQUIRE_FALSE(w.zero_design);
}

TEST_CASE("the accuracy-level fit recovers weights plus intercept", "[fitters]") {
    std::array<double, 9> w_true{};
    w_true[0] = 0.4;
    w_true[5] = 0.25;
    SupervisionSet sup = planted_accuracy(13, 300, w_true, 0.2, 0.004);
    FitOptions opt;
    opt.seed = 6;
    UtilityWeights w = fit_sgul_accuracy(sup, opt);
    REQUIRE(w.has_intercept);
    for (std::size_t k = 0; k < 9; ++k) REQUIRE(std::abs(w.w[k] - w_true[k]) < 0.05);
    REQUIRE(std::abs(w.intercept - 0.2) < 0.05);
}

TEST_CASE("huge penalties zero every coefficient", "[fitters]") {
    std::array<double, 9> w_true{};
    w_true[3] = 1.0;
    SupervisionSet sup = planted_shapley(17, 60, w_true, 0.0);
    FitOptions opt;
    opt.lambda_grid = {1e9};
    UtilityWeights w = fit_sgul_shapley(sup, opt);
    for (double x : w.w) REQUIRE(x == 0.0);
    REQUIRE(w.lambda == 1e9);
}

TEST_CASE("the l1 norm of the path is monotone in lambda", "[fitters]") {
    std::array<double, 9> w_true{};
    w_true[0] = 0.5;
    w_true[4] = 0.9;
    w_true[7] = 0.2;
    SupervisionSet sup = planted_shapley(19, 150, w_true, 0.01);
    double last = std::numeric_limits<double>::infinity();
    for (double lam : {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
        FitOptions opt;
        opt.lambda_grid = {lam};
        UtilityWeights w = fit_sgul_shapley(sup, opt);
        double l1 = 0.0;
        for (double x : w.w) l1 += x;
        REQUIRE(l1 <= last + 1e-9);
        last = l1;
    }
}

TEST_CASE("single active feature at zero penalty is ordinary least squares", "[fitters]") {
    SupervisionSet sup;
    for (double x : {1.0, 2.0, 3.0}) {
        ShapleyRow r{};
        r.psi[0] = x;
        r.phi = 0.5 * x;
        sup.shapley_rows.push_back(r);
    }
    FitOptions opt;
    opt.lambda_grid = {0.0};
    opt.active_features = {0};
    UtilityWeights w = fit_sgul_shapley(sup, opt);
    REQUIRE(w.w[0] == Catch::Approx(0.5).margin(1e-8));
    for (std::size_t k = 1; k < 9; ++k) REQUIRE(w.w[k] == 0.0);
}

TEST_CASE("anti-correlated targets clip to zero under non-negativity", "[fitters]") {
    SupervisionSet sup;
    for (double x : {1.0, 2.0, 3.0, 4.0}) {
        ShapleyRow r{};
        r.psi[2] = x;
        r.phi = -x;
        sup.shapley_rows.push_back(r);
    }
    FitOptions opt;
    opt.lambda_grid = {0.0};
    UtilityWeights w = fit_sgul_shapley(sup, opt);
    for (double x : w.w) REQUIRE(x == 0.0);
}

TEST_CASE("cross-validation ties pick the stronger penalty", "[fitters]") {
    // all-zero response: every lambda fits w = 0 with identical cv error
    SupervisionSet sup;
    Rng rng(23);
    for (std::size_t r = 0; r < 40; ++r) {
        ShapleyRow row{};
        for (std::size_t k = 0; k < 9; ++k) row.psi[k] = rng.uniform();
        row.phi = 0.0;
        sup.shapley_rows.push_back(row);
    }
    FitOptions opt;
    opt.lambda_grid = {1e-4, 1e-3, 1e-2};
    CvReport cv;
    UtilityWeights w = fit_sgul_shapley(sup, opt, &cv);
    REQUIRE(cv.cv_ran);
    REQUIRE(w.lambda == 1e-2);
    REQUIRE(cv.chosen_lambda == 1e-2);
    REQUIRE(cv.cv_mse.size() == 3);
}

TEST_CASE("tiny designs skip cross-validation", "[fitters]") {
    SupervisionSet sup;
    ShapleyRow row{};
    row.psi[0] = 1.0;
    row.phi = 1.0;
    sup.shapley_rows.push_back(row);
    FitOptions opt;
    opt.lambda_grid = {1e-5, 1e-1};
    CvReport cv;
    UtilityWeights w = fit_sgul_shapley(sup, opt, &cv);
    REQUIRE_FALSE(cv.cv_ran);
    REQUIRE(w.lambda == 1e-5);
}

TEST_CASE("all-zero designs surface a flag instead of failing", "[fitters]") {
    SupervisionSet sup;
    for (std::size_t r = 0; r < 5; ++r) {
        AccuracyRow row{};
        row.y = 0.6;
        sup.accuracy_rows.push_back(row);
    }
    FitOptions opt;
    UtilityWeights w = fit_sgul_accuracy(sup, opt);
    REQUIRE(w.zero_design);
    for (double x : w.w) REQUIRE(x == 0.0);
    REQUIRE(w.intercept == Catch::Approx(0.6).margin(1e-12));
}

TEST_CASE("weights serialize and validate", "[fitters]") {
    namespace fs = std::filesystem;
    std::array<double, 9> w_true{};
    w_true[6] = 0.45;
    SupervisionSet sup = planted_shapley(29, 80, w_true, 0.002);
    UtilityWeights w = fit_sgul_shapley(sup, FitOptions{});
    fs::path path = fs::temp_directory_path() / "graphval_test_weights.json";
    save_weights(path.string(), w);
    UtilityWeights r = load_weights(path.string());
    for (std::size_t k = 0; k < 9; ++k) {
        REQUIRE(r.w[k] == w.w[k]);
        REQUIRE(r.scaling[k] == w.scaling[k]);
    }
    REQUIRE(r.lambda == w.lambda);
    REQUIRE(r.has_intercept == w.has_intercept);

    // negative weights are rejected on load
    {
        std::ofstream f(path.string());
        f << R"({"feature_names":["edge_cos","rep_dist","classwise_rep_dist","max_conf",)"
          << R"("target_conf","prop_max_conf","prop_target_conf","neg_entropy","conf_gap"],)"
          << R"("w":[-0.1,0,0,0,0,0,0,0,0],"lambda":0.001,)"
          << R"("scaling":[1,1,1,1,1,1,1,1,1]})";
    }
    REQUIRE_THROWS_AS(load_weights(path.string()), DataError);
    fs::remove(path);
}

TEST_CASE("supervision maps expose one row per node", "[fitters]") {
    SupervisionSet sup;
    ShapleyRow a{};
    a.node = 4;
    a.game = 0;
    a.phi = 0.25;
    a.psi[0] = 1.0;
    ShapleyRow b{};
    b.node = 4;
    b.game = 1;
    b.phi = 0.75;
    sup.shapley_rows = {a, b};
    auto [psi, phi] = supervision_maps(sup);
    REQUIRE(psi.size() == 1);
    REQUIRE(phi.at(4) == 0.25);  // first occurrence wins
    REQUIRE(psi.at(4)[0] == 1.0);
}

TEST_CASE("permutation subsets rebuild consistent supervision", "[fitters]") {
    // scan seeds until a labeled validation target has in-split neighbors
    std::optional<ValSetup> s;
    NodeSet targets;
    for (std::uint64_t seed = 31; seed < 60 && !s; ++seed) {
        ValSetup cand = trained_setup(seed);
        for (NodeId t : cand.g.splits().val_labeled) {
            NodeSet tg = NodeSet::of({t});
            if (!k_hop_neighborhood(cand.g, tg, 2, &cand.g.splits().val).empty()) {
                targets = tg;
                s.emplace(std::move(cand));
                break;
            }
        }
    }
    REQUIRE(s.has_value());
    FeatureExtractor ex(s->g, s->params, s->stats, s->fixed);
    NodeSet uni = s->g.splits().val;
    NodeSet players = k_hop_neighborhood(s->g, targets, 2, &uni);
    REQUIRE_FALSE(players.empty());
    std::vector<Permutation> perms;
    for (std::size_t m = 0; m < 5; ++m)
        perms.push_back(sample_permutation(s->g, targets, 2, mix_seed(8, "perm", m), &uni));
    SupervisionSet sup = build_supervision(ex, {{targets, perms}});

    SupervisionSet first2 = subset_perms(sup, 0, 2);
    REQUIRE(first2.games[0].perms.size() == 2);
    REQUIRE(first2.n_accuracy_rows() == 2 * (players.size() + 1));
    SupervisionSet sub = subset_perms(sup, 3, 2);
    REQUIRE(sub.games[0].perms[0].order == perms[3].order);
    REQUIRE_THROWS_AS(subset_perms(sup, 4, 2), DataError);
}

TEST_CASE("atc thresholds sit at the accuracy quantile", "[fitters]") {
    // hand-built predictions over three nodes with max-confidence scores
    // 0.9, 0.6, 0.7 (a two-class max confidence can never fall below 0.5)
    Graph g = testutil::tiny_graph(3, {}, std::vector<float>(3, 0.0f), 1, {0, 0, 0});
    Predictions pred;
    pred.nodes = NodeSet::of({0, 1, 2});
    pred.probs = Mat(3, 2);
    pred.probs(0, 0) = 0.9;
    pred.probs(0, 1) = 0.1;
    pred.probs(1, 0) = 0.6;
    pred.probs(1, 1) = 0.4;
    pred.probs(2, 0) = 0.3;
    pred.probs(2, 1) = 0.7;
    // argmax classes: 0, 0, 1; labels {0,0,0} make exactly nodes 0 and 1
    // correct, so with sorted scores {0.6, 0.7, 0.9} the threshold sits at
    // scores[n - correct - 1] = scores[0] = 0.6
    BaselineCalibration cal = calibrate_atc(pred, g, NodeSet::of({0, 1, 2}), BaselineVariant::ATC_MC);
    REQUIRE(cal.threshold == Catch::Approx(0.6).margin(1e-12));
    // fraction strictly above the threshold then reproduces the accuracy
    std::size_t above = 0;
    for (double sc : {0.9, 0.6, 0.7})
        if (sc > cal.threshold) ++above;
    REQUIRE(above == 2);

    // all correct: threshold slides below every score
    Graph g_all = testutil::tiny_graph(3, {}, std::vector<float>(3, 0.0f), 1, {0, 0, 1});
    BaselineCalibration lo = calibrate_atc(pred, g_all, NodeSet::of({0, 1, 2}), BaselineVariant::ATC_MC);
    REQUIRE(lo.threshold == Catch::Approx(0.6 - 1.0).margin(1e-12));
    // none correct: threshold is the top score, nothing clears it
    Graph g_none = testutil::tiny_graph(3, {}, std::vector<float>(3, 0.0f), 1, {1, 1, 0});
    BaselineCalibration hi = calibrate_atc(pred, g_none, NodeSet::of({0, 1, 2}), BaselineVariant::ATC_MC);
    REQUIRE(hi.threshold == Catch::Approx(0.9).margin(1e-12));
    for (double sc : {0.9, 0.6, 0.7}) REQUIRE_FALSE(sc > hi.threshold);
}

TEST_CASE("entropy-variant atc thresholds the literal entropy score", "[fitters]") {
    Graph g = testutil::tiny_graph(2, {}, std::vector<float>(2, 0.0f), 1, {0, 1});
    Predictions pred;
    pred.nodes = NodeSet::of({0, 1});
    pred.probs = Mat(2, 2);
    pred.probs(0, 0) = 0.99;  // low entropy
    pred.probs(0, 1) = 0.01;
    pred.probs(1, 0) = 0.5;  // max entropy
    pred.probs(1, 1) = 0.5;
    // labels {0,1}: node 0 correct (argmax 0), node 1 wrong (tie resolves to 0)
    BaselineCalibration cal = calibrate_atc(pred, g, NodeSet::of({0, 1}), BaselineVariant::ATC_NE);
    double h0 = -(0.99 * std::log(0.99) + 0.01 * std::log(0.01));
    REQUIRE(cal.threshold == Catch::Approx(h0).margin(1e-12));
}

TEST_CASE("doc regression slope and anchors follow the shift formula", "[fitters]") {
    // bias-only model: confidence 0.75 everywhere; labels give 50% val accuracy
    Graph g = testutil::tiny_graph(4, {}, std::vector<float>(4, 0.0f), 1, {0, 1, 0, 1});
    ModelParams p = testutil::bias_only_model(1, {0.75, 0.25});
    SubgraphView v = full_view(g);
    NodeSet val_eval = NodeSet::of({0, 1, 2, 3});

    // prefix pairs with slope exactly 1 around the anchors
    SupervisionSet sup;
    GameSupervision game;
    game.targets = NodeSet::of({0});
    Permutation perm;
    perm.targets = game.targets;
    perm.order = {1};
    game.perms.push_back(perm);
    FeatureVector lo_f, hi_f;
    lo_f.max_conf = 0.65;   // x = -0.10
    hi_f.max_conf = 0.85;   // x = +0.10
    game.prefix_features.push_back({lo_f, hi_f});
    game.prefix_acc.push_back({0.4, 0.6});  // y = -0.10, +0.10
    sup.games.push_back(std::move(game));

    BaselineCalibration cal = calibrate_doc(sup, g, v, val_eval, p);
    REQUIRE(cal.acc_val == Catch::Approx(0.5).margin(1e-12));
    // f32 bias storage perturbs the softmax output at the 1e-8 level
    REQUIRE(cal.conf_val == Catch::Approx(0.75).margin(1e-6));
    REQUIRE(cal.beta == Catch::Approx(1.0).margin(1e-6));

    // utility formula: acc_val + beta * (view confidence - conf_val); the
    // bias-only model pins view confidence to 0.75, so the shift vanishes
    double u = baseline_utility(cal, g, induced_view(g, NodeSet::of({0, 2})), NodeSet::of({0}), p,
                                nullptr);
    REQUIRE(u == Catch::Approx(0.5).margin(1e-9));

    // degenerate pairs (sxx = 0) fall back to beta = 0
    SupervisionSet flat;
    GameSupervision fg;
    fg.targets = NodeSet::of({0});
    fg.perms.push_back(perm);
    FeatureVector anchor;
    anchor.max_conf = 0.75;
    fg.prefix_features.push_back({anchor, anchor});
    fg.prefix_acc.push_back({0.5, 0.5});
    flat.games.push_back(std::move(fg));
    BaselineCalibration cal0 = calibrate_doc(flat, g, v, val_eval, p);
    REQUIRE(cal0.beta == 0.0);
}

TEST_CASE("remaining baseline utilities match direct forward computations", "[fitters]") {
    ValSetup s = trained_setup(37);
    NodeSet act = NodeSet::of({0, 1, 2, 5, 9});
    NodeSet targets = NodeSet::of({1, 5});
    SubgraphView view = induced_view(s.g, act);
    Predictions pred = forward(s.params, view);

    BaselineCalibration mc;
    mc.variant = BaselineVariant::MAX_CONF;
    double want_max = 0.0;
    for (std::size_t i = 0; i < act.size(); ++i) {
        const double* row = pred.probs.row(i);
        want_max = std::max(want_max, *std::max_element(row, row + pred.n_classes()));
    }
    REQUIRE(baseline_utility(mc, s.g, view, targets, s.params, &s.fixed) ==
            Catch::Approx(want_max).margin(1e-12));

    BaselineCalibration cc;
    cc.variant = BaselineVariant::CLASS_CONF;
    double want_cc = 0.0;
    for (NodeId t : targets)
        want_cc += pred.probs(act.index_of(t), static_cast<std::size_t>(s.fixed.at(t)));
    want_cc /= static_cast<double>(targets.size());
    REQUIRE(baseline_utility(cc, s.g, view, targets, s.params, &s.fixed) ==
            Catch::Approx(want_cc).margin(1e-12));
    REQUIRE_THROWS_AS(baseline_utility(cc, s.g, view, targets, s.params, nullptr), DataError);

    BaselineCalibration rnd;
    rnd.variant = BaselineVariant::RANDOM;
    REQUIRE_THROWS_AS(baseline_utility(rnd, s.g, view, targets, s.params, &s.fixed), ConfigError);
}

TEST_CASE("baseline names round trip", "[fitters]") {
    for (const char* name : {"atc-mc", "atc-ne", "doc", "max-conf", "class-conf", "random"})
        REQUIRE(baseline_name(baseline_from_name(name)) == name);
    REQUIRE_THROWS_AS(baseline_from_name("sgul-shapley"), ConfigError);
}
