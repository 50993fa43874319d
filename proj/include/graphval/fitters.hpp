// fitters.hpp - surrogate-utility fitting on the validation graph.
//
// Two learned utilities share one solver: a non-negative lasso fit by cyclic
// coordinate descent with soft-thresholding clipped at zero.
//   - shapley-level: regress per-node accuracy Shapley values on per-node
//     feature Shapley vectors (no intercept: a constant utility has zero
//     Shapley values, so an intercept is unidentifiable at this level).
//   - accuracy-level: regress prefix accuracy on prefix features directly
//     (free unpenalized intercept, accuracy has a nonzero baseline).
//
// Columns are rescaled to unit max-abs for conditioning. The per-coordinate
// penalty is divided by the same scale factor, so the objective equals
// sum (y - b - Xw)^2 + lambda * ||w||_1 in ORIGINAL coordinates; this keeps
// the L1 path monotone in lambda in the coordinates callers see.
//
// Label-free baselines (confidence thresholding, confidence-shift regression,
// max confidence, fixed-class confidence) are calibrated here as well.
#pragma once

#include <chrono>

#include "graphval/valuation.hpp"

namespace graphval {

// ---------------------------------------------------------------------------
// Supervision built from validation games.
// ---------------------------------------------------------------------------

struct GameSupervision {
    NodeSet targets;
    std::vector<Permutation> perms;
    // prefix_features[m][j], prefix_acc[m][j]: j = 0..len placements of perm m.
    std::vector<std::vector<FeatureVector>> prefix_features;
    std::vector<std::vector<double>> prefix_acc;

    NodeSet players() const {
        return perms.empty() ? NodeSet() : NodeSet::of(perms.front().order);
    }
};

struct ShapleyRow {
    NodeId node;
    std::size_t game;
    std::array<double, FeatureVector::kCount> psi;
    double phi;
};

struct AccuracyRow {
    std::array<double, FeatureVector::kCount> x;
    double y;
};

struct SupervisionSet {
    std::vector<GameSupervision> games;
    std::vector<ShapleyRow> shapley_rows;
    std::vector<AccuracyRow> accuracy_rows;

    /// Closed forms used by the cost report: one shapley row per player, one
    /// accuracy row per recorded prefix (permutation length + 1 each).
    std::size_t n_shapley_rows() const { return shapley_rows.size(); }
    std::size_t n_accuracy_rows() const { return accuracy_rows.size(); }
};

namespace detail {

inline void pool_rows(SupervisionSet& s) {
    s.shapley_rows.clear();
    s.accuracy_rows.clear();
    for (std::size_t gi = 0; gi < s.games.size(); ++gi) {
        const GameSupervision& game = s.games[gi];
        NodeSet players = game.players();
        std::map<NodeId, ShapleyRow> rows;
        for (NodeId v : players) rows[v] = ShapleyRow{v, gi, {}, 0.0};
        double inv_m = 1.0 / static_cast<double>(game.perms.size());
        for (std::size_t m = 0; m < game.perms.size(); ++m) {
            const auto& order = game.perms[m].order;
            for (std::size_t j = 0; j < order.size(); ++j) {
                auto before = game.prefix_features[m][j].as_array();
                auto after = game.prefix_features[m][j + 1].as_array();
                ShapleyRow& r = rows[order[j]];
                for (std::size_t k = 0; k < FeatureVector::kCount; ++k)
                    r.psi[k] += (after[k] - before[k]) * inv_m;
                r.phi += (game.prefix_acc[m][j + 1] - game.prefix_acc[m][j]) * inv_m;
            }
            for (std::size_t j = 0; j < game.prefix_features[m].size(); ++j)
                s.accuracy_rows.push_back(
                    AccuracyRow{game.prefix_features[m][j].as_array(), game.prefix_acc[m][j]});
        }
        for (auto& [v, r] : rows) s.shapley_rows.push_back(r);
    }
}

}  // namespace detail

/// Trace every permutation of every validation game, recording features and
/// true target accuracy at each prefix, then pool shapley-level and
/// accuracy-level rows. Targets must be labeled (accuracy is the supervising
/// utility).
inline SupervisionSet build_supervision(const FeatureExtractor& ex,
                                        const std::vector<std::pair<NodeSet, std::vector<Permutation>>>& games,
                                        std::size_t workers = 1) {
    const Graph& g = ex.graph();
    SupervisionSet sup;
    for (const auto& [targets, perms] : games) {
        if (perms.empty()) throw DataError("supervision: game without permutations");
        for (NodeId t : targets)
            if (!g.has_label(t))
                throw DataError("supervision: unlabeled validation target " +
                                std::to_string(g.external_id(t)));
        GameSupervision game;
        game.targets = targets;
        game.perms = perms;
        ScalarUtility acc_util = [&](const SubgraphView& view) {
            return accuracy(forward(ex.params(), view), g, targets);
        };
        TraceOptions opt;
        opt.with_features = true;
        opt.utility = &acc_util;
        auto traces = run_traces(g, &ex, perms, opt, workers);
        for (auto& tr : traces) {
            game.prefix_features.push_back(std::move(tr.prefix_features));
            game.prefix_acc.push_back(std::move(tr.prefix_utils));
        }
        sup.games.push_back(std::move(game));
    }
    detail::pool_rows(sup);
    return sup;
}

/// Restrict every game to `count` permutations starting at `first` and re-pool.
/// Used by the batched in-sample comparison protocol.
inline SupervisionSet subset_perms(const SupervisionSet& sup, std::size_t first, std::size_t count) {
    SupervisionSet out;
    for (const auto& game : sup.games) {
        if (first + count > game.perms.size())
            throw DataError("supervision subset: not enough permutations (need " +
                            std::to_string(first + count) + ", have " +
                            std::to_string(game.perms.size()) + ")");
        GameSupervision sub;
        sub.targets = game.targets;
        for (std::size_t m = first; m < first + count; ++m) {
            sub.perms.push_back(game.perms[m]);
            sub.prefix_features.push_back(game.prefix_features[m]);
            sub.prefix_acc.push_back(game.prefix_acc[m]);
        }
        out.games.push_back(std::move(sub));
    }
    detail::pool_rows(out);
    return out;
}

// ---------------------------------------------------------------------------
// Non-negative lasso via cyclic coordinate descent.
// ---------------------------------------------------------------------------

struct UtilityWeights {
    std::vector<std::string> feature_names;  // all nine, fixed order
    std::array<double, FeatureVector::kCount> w{};
    double lambda = 0.0;
    std::array<double, FeatureVector::kCount> scaling{};  // positive factors used during fitting
    bool has_intercept = false;
    double intercept = 0.0;
    bool zero_design = false;  // degenerate all-zero design, w forced to 0

    LinearUtility to_linear() const {
        LinearUtility u;
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] != 0.0) u.terms.emplace_back(k, w[k]);
        u.intercept = has_intercept ? intercept : 0.0;
        return u;
    }
};

struct FitOptions {
    std::vector<double> lambda_grid = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    std::vector<std::size_t> active_features;  // empty = all nine
    double tol = 1e-8;
    std::size_t max_sweeps = 10000;
};

namespace detail {

struct DenseDesign {
    std::vector<std::array<double, FeatureVector::kCount>> X;
    std::vector<double> y;
};

/// Coordinate descent for min_{w>=0,b} sum (y - b - Xw)^2 + lambda*||w||_1 in
/// original coordinates. `scale[k]` holds the per-column max-abs factors the
/// caller computed; inactive columns keep w = 0.
inline void nn_lasso(const DenseDesign& d, const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& active,
                     const std::array<double, FeatureVector::kCount>& scale, double lambda,
                     bool with_intercept, double tol, std::size_t max_sweeps,
                     std::array<double, FeatureVector::kCount>& w_out, double& b_out) {
    std::size_t n = rows.size();
    std::size_t p = active.size();
    // scaled columns and their squared norms
    std::vector<double> z(p, 0.0);
    std::vector<std::vector<double>> col(p, std::vector<double>(n));
    for (std::size_t j = 0; j < p; ++j) {
        std::size_t k = active[j];
        for (std::size_t r = 0; r < n; ++r) {
            double v = d.X[rows[r]][k] / scale[k];
            col[j][r] = v;
            z[j] += v * v;
        }
    }
    std::vector<double> wt(p, 0.0);  // scaled-space coefficients
    double b = 0.0;
    std::vector<double> resid(n);
    for (std::size_t r = 0; r < n; ++r) resid[r] = d.y[rows[r]];

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        if (with_intercept) {
            double mean = 0.0;
            for (std::size_t r = 0; r < n; ++r) mean += resid[r] + b;
            mean /= static_cast<double>(n);
            double delta = mean - b;
            if (delta != 0.0) {
                for (std::size_t r = 0; r < n; ++r) resid[r] -= delta;
                b = mean;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        for (std::size_t j = 0; j < p; ++j) {
            if (z[j] == 0.0) continue;
            double rho = 0.0;
            for (std::size_t r = 0; r < n; ++r) rho += col[j][r] * (resid[r] + col[j][r] * wt[j]);
            double next = std::max(0.0, (rho - lambda / (2.0 * scale[active[j]])) / z[j]);
            double delta = next - wt[j];
            if (delta != 0.0) {
                for (std::size_t r = 0; r < n; ++r) resid[r] -= col[j][r] * delta;
                wt[j] = next;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        if (max_change < tol) break;
    }
    w_out.fill(0.0);
    for (std::size_t j = 0; j < p; ++j) w_out[active[j]] = wt[j] / scale[active[j]];
    b_out = b;
}

inline double holdout_sse(const DenseDesign& d, const std::vector<std::size_t>& rows,
                          const std::array<double, FeatureVector::kCount>& w, double b) {
    double sse = 0.0;
    for (std::size_t r : rows) {
        double pred = b;
        for (std::size_t k = 0; k < w.size(); ++k) pred += w[k] * d.X[r][k];
        double e = d.y[r] - pred;
        sse += e * e;
    }
    return sse;
}

}  // namespace detail

struct CvReport {
    std::vector<double> lambda_grid;
    std::vector<double> cv_mse;  // mean held-out squared error per grid point
    double chosen_lambda = 0.0;
    std::size_t folds_used = 0;
    std::size_t rows = 0;
    bool cv_ran = false;  // false: too few rows, fell back to the smallest lambda
};

namespace detail {

/// Shared fit path: column scaling, optional k-fold CV over the lambda grid
/// (ties resolved toward the stronger penalty), final refit on all rows.
inline UtilityWeights fit_nn_lasso(const DenseDesign& d, bool with_intercept, const FitOptions& opt,
                                   CvReport* cv_out) {
    if (d.X.empty()) throw DataError("fit: empty supervision");
    std::vector<std::size_t> active = opt.active_features;
    if (active.empty())
        for (std::size_t k = 0; k < FeatureVector::kCount; ++k) active.push_back(k);
    for (std::size_t k : active)
        if (k >= FeatureVector::kCount) throw ConfigError("fit: feature index out of range");
    if (opt.lambda_grid.empty()) throw ConfigError("fit: empty lambda grid");
    for (double l : opt.lambda_grid)
        if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("fit: lambda must be finite and >= 0");

    UtilityWeights out;
    out.feature_names.assign(FeatureVector::names().begin(), FeatureVector::names().end());
    out.scaling.fill(1.0);
    out.has_intercept = with_intercept;

    bool any_signal = false;
    for (std::size_t k : active) {
        double mx = 0.0;
        for (const auto& row : d.X) mx = std::max(mx, std::abs(row[k]));
        if (mx > 0.0) {
            out.scaling[k] = mx;
            any_signal = true;
        }
    }

    CvReport cv;
    cv.lambda_grid = opt.lambda_grid;
    cv.rows = d.X.size();

    if (!any_signal) {
        out.zero_design = true;
        out.lambda = opt.lambda_grid.front();
        if (with_intercept) {
            double mean = 0.0;
            for (double v : d.y) mean += v;
            out.intercept = mean / static_cast<double>(d.y.size());
        }
        cv.chosen_lambda = out.lambda;
        if (cv_out) *cv_out = cv;
        return out;
    }

    std::vector<std::size_t> all_rows(d.X.size());
    for (std::size_t r = 0; r < all_rows.size(); ++r) all_rows[r] = r;

    double chosen = opt.lambda_grid.front();
    if (d.X.size() >= 2 && opt.lambda_grid.size() > 1) {
        std::size_t folds = std::min<std::size_t>(opt.folds, d.X.size());
        std::vector<std::size_t> shuffled = all_rows;
        Rng rng(mix_seed(opt.seed, "cv", 0));
        rng.shuffle(shuffled);
        std::vector<std::size_t> fold_of(d.X.size());
        for (std::size_t i = 0; i < shuffled.size(); ++i) fold_of[shuffled[i]] = i % folds;

        double best = std::numeric_limits<double>::infinity();
        for (double lambda : opt.lambda_grid) {
            double sse = 0.0;
            for (std::size_t f = 0; f < folds; ++f) {
                std::vector<std::size_t> train, held;
                for (std::size_t r = 0; r < fold_of.size(); ++r)
                    (fold_of[r] == f ? held : train).push_back(r);
                if (train.empty() || held.empty()) continue;
                std::array<double, FeatureVector::kCount> w;
                double b = 0.0;
                detail::nn_lasso(d, train, active, out.scaling, lambda, with_intercept, opt.tol,
                                 opt.max_sweeps, w, b);
                sse += detail::holdout_sse(d, held, w, b);
            }
            double mse = sse / static_cast<double>(d.X.size());
            cv.cv_mse.push_back(mse);
            // >= keeps the larger lambda on ties (grid is ascending)
            if (best >= mse) {
                best = mse;
                chosen = lambda;
            }
        }
        cv.folds_used = folds;
        cv.cv_ran = true;
    } else if (opt.lambda_grid.size() == 1) {
        chosen = opt.lambda_grid.front();
    }

    cv.chosen_lambda = chosen;
    out.lambda = chosen;
    detail::nn_lasso(d, all_rows, active, out.scaling, chosen, with_intercept, opt.tol,
                     opt.max_sweeps, out.w, out.intercept);
    if (!with_intercept) out.intercept = 0.0;
    if (cv_out) *cv_out = cv;
    return out;
}

}  // namespace detail

/// Non-negative lasso on (psi_i, phi_i) rows, no intercept.
inline UtilityWeights fit_sgul_shapley(const SupervisionSet& sup, const FitOptions& opt,
                                       CvReport* cv = nullptr) {
    detail::DenseDesign d;
    for (const auto& r : sup.shapley_rows) {
        d.X.push_back(r.psi);
        d.y.push_back(r.phi);
    }
    return detail::fit_nn_lasso(d, false, opt, cv);
}

/// Non-negative lasso on (x(S), Acc(S)) prefix rows, free intercept.
inline UtilityWeights fit_sgul_accuracy(const SupervisionSet& sup, const FitOptions& opt,
                                        CvReport* cv = nullptr) {
    detail::DenseDesign d;
    for (const auto& r : sup.accuracy_rows) {
        d.X.push_back(r.x);
        d.y.push_back(r.y);
    }
    return detail::fit_nn_lasso(d, true, opt, cv);
}

// ---------------------------------------------------------------------------
// Weights file io.
// ---------------------------------------------------------------------------

inline void save_weights(const std::string& path, const UtilityWeights& w) {
    nlohmann::ordered_json j;
    j["feature_names"] = w.feature_names;
    j["w"] = std::vector<double>(w.w.begin(), w.w.end());
    j["lambda"] = w.lambda;
    j["scaling"] = std::vector<double>(w.scaling.begin(), w.scaling.end());
    if (w.has_intercept) j["intercept"] = w.intercept;
    if (w.zero_design) j["zero_design"] = true;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write weights: " + path);
    out << j.dump(2) << "\n";
}

inline UtilityWeights load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read weights: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("weights file is not valid JSON: " + std::string(e.what()));
    }
    UtilityWeights w;
    try {
        w.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        auto wv = j.at("w").get<std::vector<double>>();
        auto sv = j.at("scaling").get<std::vector<double>>();
        if (wv.size() != FeatureVector::kCount || sv.size() != FeatureVector::kCount ||
            w.feature_names.size() != FeatureVector::kCount)
            throw DataError("weights file: expected nine features");
        std::copy(wv.begin(), wv.end(), w.w.begin());
        std::copy(sv.begin(), sv.end(), w.scaling.begin());
        w.lambda = j.at("lambda").get<double>();
        if (j.contains("intercept")) {
            w.has_intercept = true;
            w.intercept = j["intercept"].get<double>();
        }
        if (j.contains("zero_design")) w.zero_design = j["zero_design"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("weights file malformed: " + std::string(e.what()));
    }
    for (double x : w.w)
        if (!std::isfinite(x) || x < 0.0) throw DataError("weights file: w must be finite and >= 0");
    return w;
}

// ---------------------------------------------------------------------------
// psi / phi CSV writers (feature-name header, external node ids).
// ---------------------------------------------------------------------------

inline void write_psi_csv(const std::string& path, const Graph& g, const PsiMap& psi) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write psi matrix: " + path);
    out << "node_id";
    for (const auto& name : FeatureVector::names()) out << "," << name;
    out << "\n";
    for (const auto& [v, row] : psi) {
        out << g.external_id(v);
        for (double x : row) out << "," << format_double(x);
        out << "\n";
    }
}

inline void write_phi_csv(const std::string& path, const Graph& g, const PhiMap& phi) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write phi values: " + path);
    out << "node_id,phi\n";
    for (const auto& [v, x] : phi) out << g.external_id(v) << "," << format_double(x) << "\n";
}

/// Shapley rows of one supervision set as (psi, phi) maps, e.g. for artifact
/// dumps. Multi-game sets keep the first occurrence of a node.
inline std::pair<PsiMap, PhiMap> supervision_maps(const SupervisionSet& sup) {
    PsiMap psi;
    PhiMap phi;
    for (const auto& r : sup.shapley_rows) {
        if (psi.count(r.node)) continue;
        psi[r.node] = r.psi;
        phi[r.node] = r.phi;
    }
    return {psi, phi};
}

// ---------------------------------------------------------------------------
// Label-free baselines.
// ---------------------------------------------------------------------------

enum class BaselineVariant { ATC_MC, ATC_NE, DoC, MAX_CONF, CLASS_CONF, RANDOM };

inline std::string baseline_name(BaselineVariant v) {
    switch (v) {
        case BaselineVariant::ATC_MC: return "atc-mc";
        case BaselineVariant::ATC_NE: return "atc-ne";
        case BaselineVariant::DoC: return "doc";
        case BaselineVariant::MAX_CONF: return "max-conf";
        case BaselineVariant::CLASS_CONF: return "class-conf";
        case BaselineVariant::RANDOM: return "random";
    }
    throw ConfigError("unknown baseline variant");
}

inline BaselineVariant baseline_from_name(const std::string& s) {
    if (s == "atc-mc") return BaselineVariant::ATC_MC;
    if (s == "atc-ne") return BaselineVariant::ATC_NE;
    if (s == "doc") return BaselineVariant::DoC;
    if (s == "max-conf") return BaselineVariant::MAX_CONF;
    if (s == "class-conf") return BaselineVariant::CLASS_CONF;
    if (s == "random") return BaselineVariant::RANDOM;
    throw ConfigError("unknown baseline: " + s);
}

struct BaselineCalibration {
    BaselineVariant variant = BaselineVariant::MAX_CONF;
    double threshold = 0.0;  // ATC variants
    double beta = 0.0;       // DoC
    double acc_val = 0.0;    // DoC anchor
    double conf_val = 0.0;   // DoC anchor
};

namespace detail {

inline double max_confidence(const Predictions& pred, NodeId v) {
    const double* row = pred.row(v);
    return *std::max_element(row, row + pred.n_classes());
}

/// Positive entropy -sum p ln p: the literal thresholding score of the
/// entropy-based variant. Higher means less certain, so its threshold works
/// in the opposite direction to max confidence; documented, not "fixed".
inline double pos_entropy(const Predictions& pred, NodeId v) {
    const double* row = pred.row(v);
    double h = 0.0;
    for (std::size_t c = 0; c < pred.n_classes(); ++c)
        if (row[c] > 0.0) h -= row[c] * std::log(row[c]);
    return h;
}

inline double atc_score(const Predictions& pred, NodeId v, BaselineVariant variant) {
    return variant == BaselineVariant::ATC_NE ? pos_entropy(pred, v) : max_confidence(pred, v);
}

}  // namespace detail

/// Pick the threshold so the fraction of validation nodes with score > t
/// equals validation accuracy (quantile of the sorted scores).
inline BaselineCalibration calibrate_atc(const Predictions& pred, const Graph& g,
                                         const NodeSet& val_nodes, BaselineVariant variant) {
    if (variant != BaselineVariant::ATC_MC && variant != BaselineVariant::ATC_NE)
        throw ConfigError("calibrate_atc: not an ATC variant");
    if (val_nodes.empty()) throw DataError("calibrate_atc: empty validation set");
    std::vector<double> scores;
    std::size_t correct = 0;
    for (NodeId v : val_nodes) {
        if (!g.has_label(v)) throw DataError("calibrate_atc: unlabeled validation node");
        scores.push_back(detail::atc_score(pred, v, variant));
        if (argmax_class(pred.row(v), pred.n_classes()) == static_cast<std::size_t>(g.label(v)))
            ++correct;
    }
    std::sort(scores.begin(), scores.end());
    std::size_t n = scores.size();
    BaselineCalibration cal;
    cal.variant = variant;
    if (correct == n)
        cal.threshold = scores.front() - 1.0;
    else if (correct == 0)
        cal.threshold = scores.back();
    else
        cal.threshold = scores[n - correct - 1];
    return cal;
}

/// Confidence-shift regression: slope of accuracy shift on mean-max-confidence
/// shift over validation permutation prefixes (least squares through the
/// origin, both variables being shifts), anchored at full-validation-graph
/// accuracy and confidence.
inline BaselineCalibration calibrate_doc(const SupervisionSet& sup, const Graph& g,
                                         const SubgraphView& full_val_view, const NodeSet& val_eval,
                                         const ModelParams& params) {
    if (val_eval.empty()) throw DataError("calibrate_doc: empty validation set");
    BaselineCalibration cal;
    cal.variant = BaselineVariant::DoC;
    Predictions pred = forward(params, full_val_view);
    cal.acc_val = accuracy(pred, g, val_eval);
    double conf = 0.0;
    for (NodeId v : val_eval) conf += detail::max_confidence(pred, v);
    cal.conf_val = conf / static_cast<double>(val_eval.size());

    constexpr std::size_t kMaxConf = 3;  // feature order: max_conf is fourth
    double sxy = 0.0, sxx = 0.0;
    for (const auto& game : sup.games)
        for (std::size_t m = 0; m < game.perms.size(); ++m)
            for (std::size_t j = 0; j < game.prefix_features[m].size(); ++j) {
                double x = game.prefix_features[m][j].as_array()[kMaxConf] - cal.conf_val;
                double y = game.prefix_acc[m][j] - cal.acc_val;
                sxy += x * y;
                sxx += x * x;
            }
    cal.beta = sxx > 0.0 ? sxy / sxx : 0.0;
    return cal;
}

/// Evaluate one label-free baseline utility on a view. Total on any valid
/// view; every branch returns a finite real.
inline double baseline_utility(const BaselineCalibration& cal, const Graph& g,
                               const SubgraphView& view, const NodeSet& targets,
                               const ModelParams& params, const FixedLabels* fixed) {
    Predictions pred = forward(params, view);
    switch (cal.variant) {
        case BaselineVariant::ATC_MC:
        case BaselineVariant::ATC_NE: {
            if (targets.empty()) throw DataError("baseline: empty target set");
            std::size_t above = 0;
            for (NodeId t : targets)
                if (detail::atc_score(pred, t, cal.variant) > cal.threshold) ++above;
            return static_cast<double>(above) / static_cast<double>(targets.size());
        }
        case BaselineVariant::DoC: {
            if (targets.empty()) throw DataError("baseline: empty target set");
            double conf = 0.0;
            for (NodeId t : targets) conf += detail::max_confidence(pred, t);
            conf /= static_cast<double>(targets.size());
            return cal.acc_val + cal.beta * (conf - cal.conf_val);
        }
        case BaselineVariant::MAX_CONF: {
            double best = 0.0;
            for (NodeId v : pred.nodes)
                best = std::max(best, detail::max_confidence(pred, v));
            return best;
        }
        case BaselineVariant::CLASS_CONF: {
            if (targets.empty()) throw DataError("baseline: empty target set");
            if (fixed == nullptr) throw DataError("baseline: fixed-class confidence needs fixed labels");
            double s = 0.0;
            for (NodeId t : targets) s += pred.row(t)[static_cast<std::size_t>(fixed->at(t))];
            return s / static_cast<double>(targets.size());
        }
        case BaselineVariant::RANDOM:
            throw ConfigError("baseline: random assigns values directly, it has no utility");
    }
    throw ConfigError("unknown baseline variant");
}

}  // namespace graphval
