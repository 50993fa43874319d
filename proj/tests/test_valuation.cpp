#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "graphval/valuation.hpp"
#include "test_helpers.hpp"

using namespace graphval;

namespace {

struct Setup {
    Graph g;
    ModelParams params;
    TrainStats stats;
    FixedLabels fixed;
};

Setup make_setup(std::uint64_t seed, std::size_t n = 14, double p_edge = 0.3) {
    Graph g = testutil::random_graph(seed, n, 3, 2, p_edge);
    ModelParams p = testutil::random_model(seed + 500, 3, 2);
    TrainStats st = compute_train_stats(induced_view(g, g.splits().train), p);
    FixedLabels fl = fix_labels(p, full_view(g));
    return Setup{std::move(g), std::move(p), std::move(st), std::move(fl)};
}

/// Sample M valid permutations for one target set, all over the same players.
std::vector<Permutation> draws(const Graph& g, const NodeSet& targets, std::size_t k,
                               std::size_t M, std::uint64_t seed, const NodeSet* uni = nullptr) {
    std::vector<Permutation> out;
    for (std::size_t m = 0; m < M; ++m)
        out.push_back(sample_permutation(g, targets, k, mix_seed(seed, "perm", m), uni));
    return out;
}

}  // namespace

TEST_CASE("traces telescope: marginals sum to endpoints", "[valuation]") {
    Setup s = make_setup(1);
    FeatureExtractor ex(s.g, s.params, s.stats, s.fixed);
    NodeSet targets = NodeSet::of({0});
    NodeSet uni = s.g.all_nodes();
    Permutation p = sample_permutation(s.g, targets, 2, 77, &uni);

    ScalarUtility acc_like = [&](const SubgraphView& v) {
        return static_cast<double>(v.count_edges()) + 0.5 * static_cast<double>(v.active().size());
    };
    TraceOptions opt;
    opt.utility = &acc_like;
    MarginalTrace tr = trace_permutation(s.g, &ex, p, opt);
    REQUIRE(tr.prefix_features.size() == p.order.size() + 1);
    REQUIRE(tr.prefix_utils.size() == p.order.size() + 1);

    // empty prefix is the targets-only view
    FeatureVector empty = ex.extract(induced_view(s.g, targets), targets);
    auto e0 = tr.prefix_features.front().as_array();
    auto ew = empty.as_array();
    for (std::size_t k = 0; k < 9; ++k) REQUIRE(e0[k] == Catch::Approx(ew[k]).margin(1e-9));

    double util_gain = 0.0;
    std::array<double, 9> feat_gain{};
    for (std::size_t j = 0; j < tr.n_steps(); ++j) {
        auto st = tr.step(j);
        REQUIRE(st.has_utils);
        util_gain += st.util_after - st.util_before;
        auto b = st.before->as_array();
        auto a = st.after->as_array();
        for (std::size_t k = 0; k < 9; ++k) feat_gain[k] += a[k] - b[k];
    }
    REQUIRE(util_gain ==
            Catch::Approx(tr.prefix_utils.back() - tr.prefix_utils.front()).margin(1e-9));
    auto full = tr.prefix_features.back().as_array();
    for (std::size_t k = 0; k < 9; ++k)
        REQUIRE(feat_gain[k] == Catch::Approx(full[k] - e0[k]).margin(1e-9));
}

TEST_CASE("incremental coalition features match from-scratch extraction", "[valuation]") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Setup s = make_setup(seed + 10);
        FeatureExtractor ex(s.g, s.params, s.stats, s.fixed);
        NodeSet targets = NodeSet::of({0, 2});
        NodeSet uni = s.g.all_nodes();
        NodeSet players = k_hop_neighborhood(s.g, targets, 2, &uni);
        if (players.empty()) continue;
        Permutation p = sample_permutation(s.g, targets, 2, seed, &uni);

        CoalitionTracker tracker(s.g, targets, &ex);
        NodeSet active = targets;
        for (NodeId v : p.order) {
            tracker.add(v);
            active.insert(v);
            FeatureVector inc = tracker.features(targets);
            FeatureVector ref = ex.extract(induced_view(s.g, active), targets);
            auto a = inc.as_array();
            auto b = ref.as_array();
            for (std::size_t k = 0; k < 9; ++k) REQUIRE(a[k] == Catch::Approx(b[k]).margin(1e-6));
        }
    }
}

TEST_CASE("feature shapley satisfies per-feature efficiency", "[valuation]") {
    Setup s = make_setup(3);
    FeatureExtractor ex(s.g, s.params, s.stats, s.fixed);
    NodeSet targets = NodeSet::of({1});
    NodeSet uni = s.g.all_nodes();
    auto perms = draws(s.g, targets, 2, 12, 4242, &uni);
    NodeSet players = NodeSet::of(perms.front().order);

    PsiMap psi = feature_shapley(ex, targets, perms);
    REQUIRE(psi.size() == players.size());

    FeatureVector empty = ex.extract(induced_view(s.g, targets), targets);
    FeatureVector full = ex.extract(induced_view(s.g, targets.set_union(players)), targets);
    auto fe = empty.as_array();
    auto ff = full.as_array();
    for (std::size_t k = 0; k < 9; ++k) {
        double total = 0.0;
        for (const auto& [v, row] : psi) total += row[k];
        REQUIRE(total == Catch::Approx(ff[k] - fe[k]).margin(1e-9));
    }
}

TEST_CASE("scalar shapley efficiency for an arbitrary utility", "[valuation]") {
    Setup s = make_setup(4);
    NodeSet targets = NodeSet::of({0});
    NodeSet uni = s.g.all_nodes();
    auto perms = draws(s.g, targets, 2, 9, 5150, &uni);
    NodeSet players = NodeSet::of(perms.front().order);

    ScalarUtility u = [&](const SubgraphView& v) {
        return std::sin(static_cast<double>(v.count_edges())) +
               static_cast<double>(v.active().size());
    };
    ValueReport r = scalar_shapley(s.g, targets, perms, u);
    REQUIRE(r.values.size() == players.size());
    double total = 0.0;
    for (const auto& [v, x] : r.values) total += x;
    double u_full = u(induced_view(s.g, targets.set_union(players)));
    double u_empty = u(induced_view(s.g, targets));
    REQUIRE(total == Catch::Approx(u_full - u_empty).margin(1e-9));
}

TEST_CASE("linear utilities decompose through feature shapley exactly", "[valuation]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Setup s = make_setup(seed + 40, 12, 0.35);
        FeatureExtractor ex(s.g, s.params, s.stats, s.fixed);
        NodeSet targets = NodeSet::of({0});
        NodeSet uni = s.g.all_nodes();
        auto perms = draws(s.g, targets, 2, 4, seed * 3 + 1, &uni);

        Rng rng(seed + 900);
        LinearUtility lin;
        for (std::size_t k = 0; k < 9; ++k)
            if (rng.uniform() < 0.7) lin.terms.emplace_back(k, rng.uniform() * 2.0);
        lin.intercept = rng.normal();

        PsiMap psi = feature_shapley(ex, targets, perms);
        ScalarUtility u = [&](const SubgraphView& v) { return lin.apply(ex.extract(v, targets)); };
        ValueReport r = scalar_shapley(s.g, targets, perms, u);
        PhiMap phi;
        for (const auto& [v, x] : r.values) phi[v] = x;
        REQUIRE(decompose_check(lin, psi, phi) <= 1e-9);
    }
}

TEST_CASE("workers do not change valuation output", "[valuation]") {
    Setup s = make_setup(8);
    FeatureExtractor ex(s.g, s.params, s.stats, s.fixed);
    NodeSet targets = NodeSet::of({0});
    NodeSet uni = s.g.all_nodes();
    auto perms = draws(s.g, targets, 2, 8, 31337, &uni);
    PsiMap one = feature_shapley(ex, targets, perms, 1);
    PsiMap four = feature_shapley(ex, targets, perms, 4);
    REQUIRE(one.size() == four.size());
    for (const auto& [v, row] : one) {
        const auto& other = four.at(v);
        for (std::size_t k = 0; k < 9; ++k) REQUIRE(row[k] == other[k]);  // bitwise
    }
}

TEST_CASE("monte carlo estimates agree with process-weighted enumeration", "[valuation]") {
    // star-with-tail: orders (1,2,3),(1,3,2),(2,1,3) with probs 1/4,1/4,1/2
    Graph g = testutil::tiny_graph(4, {{0, 1}, {0, 2}, {1, 3}}, std::vector<float>(4, 1.0f), 1,
                                   {0, 0, 0, 0});
    NodeSet targets = NodeSet::of({0});
    ScalarUtility u = [](const SubgraphView& v) {
        double x = static_cast<double>(v.active().size());
        return x * x + static_cast<double>(v.count_edges());
    };
    ExactValues exact = exact_values(g, targets, 2, u);
    REQUIRE(exact.n_orders == 3);

    // process expectation by hand over the three orders
    auto marginal_sum = [&](const std::vector<NodeId>& order, NodeId who) {
        NodeSet act = targets;
        double before = u(induced_view(g, act));
        for (NodeId v : order) {
            act.insert(v);
            double after = u(induced_view(g, act));
            if (v == who) return after - before;
            before = after;
        }
        return 0.0;
    };
    std::vector<std::vector<NodeId>> orders = {{1, 2, 3}, {1, 3, 2}, {2, 1, 3}};
    std::vector<double> probs = {0.25, 0.25, 0.5};
    for (NodeId v : {1u, 2u, 3u}) {
        double want_proc = 0.0, want_unif = 0.0;
        for (std::size_t i = 0; i < orders.size(); ++i) {
            want_proc += probs[i] * marginal_sum(orders[i], v);
            want_unif += marginal_sum(orders[i], v) / 3.0;
        }
        REQUIRE(exact.process.at(v) == Catch::Approx(want_proc).margin(1e-12));
        REQUIRE(exact.uniform.at(v) == Catch::Approx(want_unif).margin(1e-12));
    }

    McValues mc = mc_values(g, targets, 2, u, 3000, 99);
    REQUIRE(mc.m == 3000);
    for (const auto& [v, mean] : mc.mean) {
        double gap = std::abs(mean - exact.process.at(v));
        double se = mc.se.at(v);
        if (se == 0.0)
            REQUIRE(gap == 0.0);
        else
            REQUIRE(gap <= 4.0 * se);
    }
}

TEST_CASE("single-order chains make sampling exact", "[valuation]") {
    // path 0-1-2-3: the only valid order is (1,2,3)
    Graph g = testutil::tiny_graph(4, {{0, 1}, {1, 2}, {2, 3}}, std::vector<float>(4, 1.0f), 1,
                                   {0, 0, 0, 0});
    NodeSet targets = NodeSet::of({0});
    ScalarUtility u = [](const SubgraphView& v) {
        return std::exp(0.1 * static_cast<double>(v.count_edges()));
    };
    ExactValues exact = exact_values(g, targets, 3, u);
    REQUIRE(exact.n_orders == 1);
    McValues mc = mc_values(g, targets, 3, u, 50, 7);
    for (const auto& [v, mean] : mc.mean) {
        REQUIRE(mean == exact.process.at(v));  // bitwise equality
        REQUIRE(mean == exact.uniform.at(v));
        REQUIRE(mc.se.at(v) == 0.0);
    }
}

TEST_CASE("structurally symmetric players get equal exact values", "[valuation]") {
    // target 0 with twin leaves 1 and 2, identical features
    Graph g = testutil::tiny_graph(3, {{0, 1}, {0, 2}}, {1.0f, 1.0f, 1.0f}, 1, {0, 0, 0});
    NodeSet targets = NodeSet::of({0});
    ScalarUtility u = [](const SubgraphView& v) {
        return static_cast<double>(v.count_edges() * v.count_edges()) +
               0.25 * static_cast<double>(v.active().size());
    };
    ExactValues exact = exact_values(g, targets, 1, u);
    REQUIRE(exact.n_orders == 2);
    REQUIRE(exact.uniform.at(1) == Catch::Approx(exact.uniform.at(2)).margin(1e-12));
    REQUIRE(exact.process.at(1) == Catch::Approx(exact.process.at(2)).margin(1e-12));
}

TEST_CASE("estimate_test_values is utility-linear and deterministic", "[valuation]") {
    Setup s = make_setup(6);
    FeatureExtractor ex(s.g, s.params, s.stats, s.fixed);
    NodeSet targets = NodeSet::of({1});
    NodeSet uni = s.g.all_nodes();
    LinearUtility lin;
    lin.terms = {{3, 0.5}, {7, 1.25}};

    TestValuation tv = estimate_test_values(ex, targets, 2, lin, 6, 2024, 1, &uni);
    TestValuation tv2 = estimate_test_values(ex, targets, 2, lin, 6, 2024, 3, &uni);
    REQUIRE(tv.report.values == tv2.report.values);
    REQUIRE(tv.perms.size() == 6);
    REQUIRE(tv.report.m_permutations == 6);
    // the scalar report is exactly w . psi
    for (const auto& [v, x] : tv.report.values) {
        double want = lin.apply_psi(tv.psi.at(v));
        REQUIRE(x == Catch::Approx(want).margin(1e-12));
    }
}

TEST_CASE("valuation rejects malformed permutation batches", "[valuation]") {
    Setup s = make_setup(7);
    FeatureExtractor ex(s.g, s.params, s.stats, s.fixed);
    NodeSet targets = NodeSet::of({0});
    NodeSet uni = s.g.all_nodes();
    auto perms = draws(s.g, targets, 2, 2, 5, &uni);
    REQUIRE(perms.front().order.size() >= 2);

    auto broken = perms;
    broken[1].order.pop_back();
    REQUIRE_THROWS_WITH(feature_shapley(ex, targets, broken),
                        Catch::Matchers::ContainsSubstring("length"));

    auto swapped = perms;
    swapped[1].targets = NodeSet::of({1});
    REQUIRE_THROWS_AS(feature_shapley(ex, targets, swapped), DataError);

    REQUIRE_THROWS_AS(feature_shapley(ex, targets, {}), DataError);
}

TEST_CASE("values csv uses external ids and shortest round-trip formatting", "[valuation]") {
    namespace fs = std::filesystem;
    Graph g = testutil::tiny_graph(3, {{0, 1}}, std::vector<float>(3, 0.0f), 1, {0, 0, 0});
    ValueReport r;
    r.method = "unit";
    r.values = {{0, 0.125}, {2, -1.5}};
    fs::path path = fs::temp_directory_path() / "graphval_test_values.csv";
    write_values_csv(path.string(), g, r);
    std::ifstream in(path.string());
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "node_id,value");
    std::getline(in, line);
    REQUIRE(line == "0,0.125");
    std::getline(in, line);
    REQUIRE(line == "2,-1.5");
    fs::remove(path);
}
