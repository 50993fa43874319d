// eval.hpp - evaluation harness: node-dropping curves with AUC, the batched
// in-sample MSE comparison between the two learned utilities, and the
// fit-cost report (design-matrix row counts as a portable memory proxy).
#pragma once

#include "graphval/fitters.hpp"

namespace graphval {

// ---------------------------------------------------------------------------
// Node dropping. Rank neighbors by value (descending, ties broken by
// ascending node id), remove cumulatively from the phase view, re-evaluate
// target accuracy after each removal. Acc_0 (nothing removed) is recorded but
// the AUC averages Acc_1..Acc_K only. Lower AUC = better ranking. Evaluation
// uses true labels; valuation never does.
// ---------------------------------------------------------------------------

struct DropCurve {
    std::vector<double> acc;  // Acc_0..Acc_K
    double auc = 0.0;
    std::vector<NodeId> removal_order;
};

inline double drop_auc(const std::vector<double>& acc) {
    if (acc.size() < 2) throw DataError("drop curve needs at least one removal");
    double s = 0.0;
    for (std::size_t i = 1; i < acc.size(); ++i) s += acc[i];
    return s / static_cast<double>(acc.size() - 1);
}

inline DropCurve node_dropping(const Graph& g, const NodeSet& targets, std::size_t k,
                               const std::vector<std::pair<NodeId, double>>& values,
                               const ModelParams& params, const NodeSet* universe = nullptr) {
    const NodeSet* uni = universe ? universe : split_universe(g, targets);
    NodeSet players = k_hop_neighborhood(g, targets, k, uni);
    std::vector<NodeId> covered;
    for (const auto& [v, x] : values) covered.push_back(v);
    if (!(NodeSet::of(covered) == players))
        throw DataError("node dropping: values do not cover the target neighborhood");
    if (players.empty()) throw DataError("node dropping: no neighbors to drop");

    std::vector<std::pair<NodeId, double>> ranked = values;
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::vector<std::uint8_t> keep(g.n_nodes(), 0);
    std::vector<NodeId> base = uni ? uni->ids() : g.all_nodes().ids();
    for (NodeId v : base) keep[v] = 1;

    DropCurve curve;
    auto eval = [&]() {
        std::vector<NodeId> act;
        for (NodeId v : base)
            if (keep[v]) act.push_back(v);
        SubgraphView view(g, NodeSet::of(act));
        return accuracy(forward(params, view), g, targets);
    };
    curve.acc.push_back(eval());
    for (const auto& [v, x] : ranked) {
        keep[v] = 0;
        curve.removal_order.push_back(v);
        curve.acc.push_back(eval());
    }
    curve.auc = drop_auc(curve.acc);
    return curve;
}

inline void write_curve_csv(const std::string& path, const DropCurve& c) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write curve: " + path);
    out << "k,acc\n";
    for (std::size_t i = 0; i < c.acc.size(); ++i)
        out << i << "," << format_double(c.acc[i]) << "\n";
}

// ---------------------------------------------------------------------------
// In-sample MSE comparison. Headline numbers: shapley-level MSE of both
// weight vectors on the full supervision. Batched protocol: split each game's
// permutations into `batches` consecutive blocks of `per_batch`, recompute
// psi/phi per block, optionally refit both utilities per block at lambda = 0,
// and run a one-sided paired sign test (ties dropped) on the per-batch MSEs.
// ---------------------------------------------------------------------------

struct MseReport {
    double mse_shapley = 0.0;
    double mse_accuracy = 0.0;
    double p_value = 1.0;
    std::size_t batches = 0;
    std::size_t per_batch = 0;
    std::size_t wins_shapley = 0;  // batches where shapley-level fit has strictly lower MSE
    std::size_t ties = 0;
    bool refit_batches = true;
    std::vector<double> batch_mse_shapley;
    std::vector<double> batch_mse_accuracy;
};

namespace detail {

inline double shapley_level_mse(const SupervisionSet& sup, const UtilityWeights& w) {
    if (sup.shapley_rows.empty()) throw DataError("mse: no shapley rows");
    LinearUtility u = w.to_linear();
    double sse = 0.0;
    for (const auto& r : sup.shapley_rows) {
        double e = r.phi - u.apply_psi(r.psi);  // intercepts drop out of marginals
        sse += e * e;
    }
    return sse / static_cast<double>(sup.shapley_rows.size());
}

/// One-sided sign test: P[Binomial(n, 1/2) >= wins].
inline double sign_test_p(std::size_t wins, std::size_t n) {
    if (n == 0) return 1.0;
    if (n > 62) throw NumericError("sign test: too many batches");
    unsigned long long total = 0;
    for (std::size_t j = wins; j <= n; ++j) {
        unsigned long long c = 1;
        for (std::size_t i = 0; i < j; ++i) c = c * (n - i) / (i + 1);
        total += c;
    }
    return static_cast<double>(total) / std::pow(2.0, static_cast<double>(n));
}

}  // namespace detail

inline MseReport mse_report(const SupervisionSet& sup, const UtilityWeights& w_shapley,
                            const UtilityWeights& w_accuracy, std::size_t batches = 10,
                            std::size_t per_batch = 10, bool refit_batches = true) {
    MseReport rep;
    rep.mse_shapley = detail::shapley_level_mse(sup, w_shapley);
    rep.mse_accuracy = detail::shapley_level_mse(sup, w_accuracy);
    rep.batches = batches;
    rep.per_batch = per_batch;
    rep.refit_batches = refit_batches;

    FitOptions zero;
    zero.lambda_grid = {0.0};

    for (std::size_t b = 0; b < batches; ++b) {
        SupervisionSet sub = subset_perms(sup, b * per_batch, per_batch);
        double ms, ma;
        if (refit_batches) {
            UtilityWeights ws = fit_sgul_shapley(sub, zero);
            UtilityWeights wa = fit_sgul_accuracy(sub, zero);
            ms = detail::shapley_level_mse(sub, ws);
            ma = detail::shapley_level_mse(sub, wa);
        } else {
            ms = detail::shapley_level_mse(sub, w_shapley);
            ma = detail::shapley_level_mse(sub, w_accuracy);
        }
        rep.batch_mse_shapley.push_back(ms);
        rep.batch_mse_accuracy.push_back(ma);
        if (ms == ma)
            ++rep.ties;
        else if (ms < ma)
            ++rep.wins_shapley;
    }
    std::size_t n_eff = batches - rep.ties;
    rep.p_value = detail::sign_test_p(rep.wins_shapley, n_eff);
    return rep;
}

inline void save_mse_report(const std::string& path, const MseReport& r) {
    nlohmann::ordered_json j;
    j["mse_shapley"] = r.mse_shapley;
    j["mse_accuracy"] = r.mse_accuracy;
    j["p_value"] = r.p_value;
    j["batches"] = r.batches;
    j["per_batch"] = r.per_batch;
    j["wins_shapley"] = r.wins_shapley;
    j["ties"] = r.ties;
    j["refit_batches"] = r.refit_batches;
    j["batch_mse_shapley"] = r.batch_mse_shapley;
    j["batch_mse_accuracy"] = r.batch_mse_accuracy;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write mse report: " + path);
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Fit-cost report. Row counts are exact closed forms of the game structure:
// shapley-level has one row per player, accuracy-level one per prefix, i.e.
// sum over permutations of (length + 1). Wall times are measured by the
// caller and land in a separate text file so JSON artifacts stay
// byte-reproducible.
// ---------------------------------------------------------------------------

struct CostReport {
    std::size_t rows_shapley = 0;
    std::size_t rows_accuracy = 0;
    double fit_seconds_shapley = 0.0;
    double fit_seconds_accuracy = 0.0;
};

inline CostReport cost_report(const SupervisionSet& sup, double fit_seconds_shapley = 0.0,
                              double fit_seconds_accuracy = 0.0) {
    CostReport r;
    r.rows_shapley = sup.n_shapley_rows();
    r.rows_accuracy = sup.n_accuracy_rows();
    r.fit_seconds_shapley = fit_seconds_shapley;
    r.fit_seconds_accuracy = fit_seconds_accuracy;
    return r;
}

inline void save_cost_report(const std::string& json_path, const std::string& times_path,
                             const CostReport& r) {
    nlohmann::ordered_json j;
    j["rows_shapley"] = r.rows_shapley;
    j["rows_accuracy"] = r.rows_accuracy;
    std::ofstream out(json_path);
    if (!out) throw DataError("cannot write cost report: " + json_path);
    out << j.dump(2) << "\n";
    std::ofstream times(times_path);
    if (!times) throw DataError("cannot write cost times: " + times_path);
    times << "fit_seconds_shapley " << format_double(r.fit_seconds_shapley) << "\n"
          << "fit_seconds_accuracy " << format_double(r.fit_seconds_accuracy) << "\n";
}

}  // namespace graphval
