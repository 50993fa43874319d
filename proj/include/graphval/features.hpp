// features.hpp - the nine label-free utility features of a subgraph view.
//
// All features are evaluated for a set of target nodes on the induced view:
//   edge_cos            mean cosine of raw features over induced edges (0 if none)
//   rep_dist            mean_t cos(h_t, mean train representation)
//   classwise_rep_dist  mean_t agg_c cos(h_t, class prototype c), agg = min (or max)
//   max_conf            mean_t max class probability of the classifier on the view
//   target_conf         mean_t probability at the target's fixed class
//   prop_max_conf       like max_conf but from label propagation seeded with the
//                       structure-free (edgeless) predictions
//   prop_target_conf    propagated probability at the fixed class
//   neg_entropy         mean_t sum_c p log p  (<= 0; higher = more certain);
//                       the sign toggle flips to plain entropy
//   conf_gap            mean_t (top probability - second, excluding the argmax class)
// where h = A_hat^k X aggregated on the view and the "fixed class" is the
// class the classifier predicts on the full phase graph, frozen once.
#pragma once

#include <array>

#include "graphval/model.hpp"

namespace graphval {

struct FeatureVector {
    double edge_cos = 0.0;
    double rep_dist = 0.0;
    double classwise_rep_dist = 0.0;
    double max_conf = 0.0;
    double target_conf = 0.0;
    double prop_max_conf = 0.0;
    double prop_target_conf = 0.0;
    double neg_entropy = 0.0;
    double conf_gap = 0.0;

    static constexpr std::size_t kCount = 9;

    static const std::array<std::string, kCount>& names() {
        static const std::array<std::string, kCount> n = {
            "edge_cos",      "rep_dist",         "classwise_rep_dist",
            "max_conf",      "target_conf",      "prop_max_conf",
            "prop_target_conf", "neg_entropy",   "conf_gap"};
        return n;
    }

    std::array<double, kCount> as_array() const {
        return {edge_cos,  rep_dist,        classwise_rep_dist, max_conf, target_conf,
                prop_max_conf, prop_target_conf, neg_entropy,   conf_gap};
    }

    static FeatureVector from_array(const std::array<double, kCount>& a) {
        FeatureVector f;
        f.edge_cos = a[0];
        f.rep_dist = a[1];
        f.classwise_rep_dist = a[2];
        f.max_conf = a[3];
        f.target_conf = a[4];
        f.prop_max_conf = a[5];
        f.prop_target_conf = a[6];
        f.neg_entropy = a[7];
        f.conf_gap = a[8];
        return f;
    }
};

/// Index of a feature name; throws ConfigError for unknown names.
inline std::size_t feature_index(const std::string& name) {
    const auto& n = FeatureVector::names();
    for (std::size_t i = 0; i < n.size(); ++i)
        if (n[i] == name) return i;
    throw ConfigError("unknown feature name: " + name);
}

// ---------------------------------------------------------------------------
// Training-side statistics: the mean aggregated representation over training
// nodes and one aggregated prototype per class over labeled training nodes,
// both computed on the training graph.
// ---------------------------------------------------------------------------

struct TrainStats {
    std::vector<double> mean_repr;  // feature_dim
    Mat class_prototypes;           // n_classes x feature_dim
};

inline TrainStats compute_train_stats(const SubgraphView& train_view, const ModelParams& params) {
    const Graph& g = train_view.base();
    Mat h = aggregate_features(train_view, params.k_hops);

    std::vector<NodeId> train_nodes;
    for (NodeId v : train_view.active())
        if (g.splits().train.contains(v)) train_nodes.push_back(v);
    if (train_nodes.empty()) throw DataError("train stats: view contains no training nodes");

    TrainStats ts;
    ts.mean_repr.assign(g.feature_dim(), 0.0);
    for (NodeId v : train_nodes) {
        const double* row = h.row(train_view.active().index_of(v));
        for (std::size_t c = 0; c < g.feature_dim(); ++c) ts.mean_repr[c] += row[c];
    }
    for (double& x : ts.mean_repr) x /= static_cast<double>(train_nodes.size());

    std::size_t n_classes = params.n_classes();
    ts.class_prototypes = Mat(n_classes, g.feature_dim());
    std::vector<std::size_t> counts(n_classes, 0);
    for (NodeId v : g.splits().train_labeled) {
        if (!train_view.is_active(v)) continue;
        auto y = static_cast<std::size_t>(g.label(v));
        if (y >= n_classes) throw DataError("train stats: label exceeds model class count");
        const double* row = h.row(train_view.active().index_of(v));
        for (std::size_t c = 0; c < g.feature_dim(); ++c) ts.class_prototypes(y, c) += row[c];
        ++counts[y];
    }
    std::string missing;
    for (std::size_t y = 0; y < n_classes; ++y) {
        if (counts[y] == 0) {
            missing += (missing.empty() ? "" : ", ") + std::to_string(y);
            continue;
        }
        for (std::size_t c = 0; c < g.feature_dim(); ++c)
            ts.class_prototypes(y, c) /= static_cast<double>(counts[y]);
    }
    if (!missing.empty())
        throw DataError("train stats: no labeled training nodes for class(es) " + missing);
    return ts;
}

// ---------------------------------------------------------------------------
// Fixed per-node predicted classes, frozen from the full phase graph before
// any subgraph is formed.
// ---------------------------------------------------------------------------

struct FixedLabels {
    std::vector<std::int32_t> cls;  // indexed by node id; -1 = not covered

    std::int32_t at(NodeId v) const {
        if (v >= cls.size() || cls[v] < 0)
            throw DataError("fixed labels: node not covered: " + std::to_string(v));
        return cls[v];
    }
};

inline FixedLabels fix_labels(const ModelParams& params, const SubgraphView& full_phase_view) {
    Predictions pred = forward(params, full_phase_view);
    FixedLabels fl;
    fl.cls.assign(full_phase_view.base().n_nodes(), -1);
    for (std::size_t i = 0; i < pred.nodes.size(); ++i)
        fl.cls[pred.nodes[i]] =
            static_cast<std::int32_t>(argmax_class(pred.probs.row(i), pred.n_classes()));
    return fl;
}

// ---------------------------------------------------------------------------
// Extractor.
// ---------------------------------------------------------------------------

enum class EntropySign { negative, positive };
enum class ClasswiseAgg { min, max };

struct FeatureConfig {
    EntropySign entropy_sign = EntropySign::negative;
    ClasswiseAgg classwise_agg = ClasswiseAgg::min;
    double lp_alpha = 0.9;
    std::size_t lp_iters = 10;
};

class FeatureExtractor {
public:
    FeatureExtractor(const Graph& g, const ModelParams& params, const TrainStats& stats,
                     const FixedLabels& fixed, FeatureConfig cfg = {})
        : g_(&g), params_(&params), stats_(&stats), fixed_(&fixed), cfg_(cfg) {
        params.validate();
    }

    const Graph& graph() const { return *g_; }
    const ModelParams& params() const { return *params_; }
    const TrainStats& stats() const { return *stats_; }
    const FixedLabels& fixed() const { return *fixed_; }
    const FeatureConfig& config() const { return cfg_; }

    /// Structure-free class probabilities (plain MLP rows) for `active`.
    Mat structure_free_probs(const NodeSet& active) const {
        Mat out(active.size(), params_->n_classes());
        std::vector<double> x(g_->feature_dim());
        for (std::size_t i = 0; i < active.size(); ++i) {
            const float* row = g_->features_row(active[i]);
            for (std::size_t c = 0; c < x.size(); ++c) x[c] = static_cast<double>(row[c]);
            auto p = mlp_probabilities(*params_, x.data());
            for (std::size_t c = 0; c < p.size(); ++c) out(i, c) = p[c];
        }
        return out;
    }

    /// Raw-feature cosine of one edge.
    double edge_cosine(NodeId u, NodeId v) const {
        std::size_t d = g_->feature_dim();
        std::vector<double> a(d), b(d);
        const float* ra = g_->features_row(u);
        const float* rb = g_->features_row(v);
        for (std::size_t c = 0; c < d; ++c) {
            a[c] = static_cast<double>(ra[c]);
            b[c] = static_cast<double>(rb[c]);
        }
        return cosine(a.data(), b.data(), d);
    }

    /// Full extraction from scratch on a view.
    FeatureVector extract(const SubgraphView& view, const NodeSet& targets) const {
        for (NodeId t : targets)
            if (!view.is_active(t)) throw DataError("extract: target not in view");
        NormalizedAdjacency na = normalize_adjacency(view);
        double cos_sum = 0.0;
        std::size_t n_edges = 0;
        view.for_each_edge([&](NodeId u, NodeId v) {
            cos_sum += edge_cosine(u, v);
            ++n_edges;
        });
        double mean_cos = n_edges == 0 ? 0.0 : cos_sum / static_cast<double>(n_edges);
        return extract_parts(view.active(), na, mean_cos, structure_free_probs(view.active()), targets);
    }

    /// Core computation from prepared pieces (shared by the scratch path and
    /// the incremental coalition tracker).
    FeatureVector extract_parts(const NodeSet& active, const NormalizedAdjacency& na,
                                double edge_cos_mean, const Mat& structure_free,
                                const NodeSet& targets) const {
        if (targets.empty()) throw DataError("extract: empty target set");
        FeatureVector f;
        f.edge_cos = edge_cos_mean;
        double inv_t = 1.0 / static_cast<double>(targets.size());

        // Aggregated representation distances.
        Mat h = aggregate_given(*g_, active, na, params_->k_hops);
        std::size_t d = g_->feature_dim();
        std::size_t n_classes = params_->n_classes();
        for (NodeId t : targets) {
            const double* ht = h.row(active.index_of(t));
            f.rep_dist += cosine(ht, stats_->mean_repr.data(), d);
            double agg = cfg_.classwise_agg == ClasswiseAgg::min ? 2.0 : -2.0;
            for (std::size_t y = 0; y < n_classes; ++y) {
                double c = cosine(ht, stats_->class_prototypes.row(y), d);
                agg = cfg_.classwise_agg == ClasswiseAgg::min ? std::min(agg, c) : std::max(agg, c);
            }
            f.classwise_rep_dist += agg;
        }
        f.rep_dist *= inv_t;
        f.classwise_rep_dist *= inv_t;

        // Classifier confidences on the view.
        Predictions pred = forward_given(*params_, *g_, active, na);
        for (NodeId t : targets) {
            const double* p = pred.probs.row(active.index_of(t));
            std::size_t top = argmax_class(p, n_classes);
            f.max_conf += p[top];
            f.target_conf += p[static_cast<std::size_t>(fixed_->at(t))];
            double second = 0.0;
            for (std::size_t y = 0; y < n_classes; ++y)
                if (y != top) second = std::max(second, p[y]);
            f.conf_gap += p[top] - second;
            double ent = 0.0;
            for (std::size_t y = 0; y < n_classes; ++y)
                if (p[y] > 0.0) ent += p[y] * std::log(p[y]);
            f.neg_entropy += cfg_.entropy_sign == EntropySign::negative ? ent : -ent;
        }
        f.max_conf *= inv_t;
        f.target_conf *= inv_t;
        f.conf_gap *= inv_t;
        f.neg_entropy *= inv_t;

        // Propagated structure-free confidences.
        Mat lp = label_propagation_given(na, structure_free, cfg_.lp_alpha, cfg_.lp_iters);
        for (NodeId t : targets) {
            const double* p = lp.row(active.index_of(t));
            f.prop_max_conf += p[argmax_class(p, n_classes)];
            f.prop_target_conf += p[static_cast<std::size_t>(fixed_->at(t))];
        }
        f.prop_max_conf *= inv_t;
        f.prop_target_conf *= inv_t;
        return f;
    }

private:
    const Graph* g_;
    const ModelParams* params_;
    const TrainStats* stats_;
    const FixedLabels* fixed_;
    FeatureConfig cfg_;
};

}  // namespace graphval
