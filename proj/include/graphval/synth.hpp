// synth.hpp - synthetic benchmark graphs: class-conditional Gaussian features
// over a stochastic block model, with planted "noise neighbors" whose
// features come from a wrong class and whose edges ignore class structure.
// These are the known low-value nodes used in direction tests. Inductive
// graphs keep each split as its own block model (no cross-split edges);
// transductive graphs wire one model across everything.
#pragma once

#include "graphval/io.hpp"

namespace graphval {

struct SynthConfig {
    std::size_t n_train = 150;
    std::size_t n_val = 120;
    std::size_t n_test = 120;
    std::size_t classes = 3;
    std::size_t dim = 8;
    double p_in = 0.3;
    double p_out = 0.02;
    double sigma = 0.5;
    double noise_frac = 0.1;
    double val_labeled_frac = 0.5;
    double target_frac = 0.2;
    bool transductive = false;
    std::uint64_t seed = 0;

    void validate() const {
        if (classes < 2) throw ConfigError("synth: need at least 2 classes");
        if (dim < classes) throw ConfigError("synth: feature dim must be >= classes");
        if (n_train == 0 || n_val == 0 || n_test == 0)
            throw ConfigError("synth: every split needs nodes");
        if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0))
            throw ConfigError("synth: need 0 <= p_out <= p_in <= 1");
        if (sigma < 0.0) throw ConfigError("synth: sigma must be >= 0");
        for (double f : {noise_frac, val_labeled_frac, target_frac})
            if (!(0.0 <= f && f <= 1.0)) throw ConfigError("synth: fractions must lie in [0,1]");
    }
};

struct SynthResult {
    Graph graph;
    NodeSet noise_nodes;
};

namespace detail {

inline std::size_t rounded_count(double frac, std::size_t n) {
    return static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 0.5));
}

inline NodeSet sample_subset(const std::vector<NodeId>& pool, std::size_t count, Rng& rng) {
    std::vector<NodeId> ids = pool;
    rng.shuffle(ids);
    ids.resize(std::min(count, ids.size()));
    return NodeSet::of(ids);
}

}  // namespace detail

/// Deterministic generator: same config (seed included) -> identical graph.
inline SynthResult generate(const SynthConfig& cfg) {
    cfg.validate();
    std::size_t n = cfg.n_train + cfg.n_val + cfg.n_test;
    std::size_t C = cfg.classes;

    // split layout: train ids first, then val, then test
    std::vector<int> split_of(n);  // 0 train, 1 val, 2 test
    std::vector<NodeId> train_ids, val_ids, test_ids;
    for (NodeId v = 0; v < n; ++v) {
        if (v < cfg.n_train) {
            split_of[v] = 0;
            train_ids.push_back(v);
        } else if (v < cfg.n_train + cfg.n_val) {
            split_of[v] = 1;
            val_ids.push_back(v);
        } else {
            split_of[v] = 2;
            test_ids.push_back(v);
        }
    }

    // balanced classes, round-robin within each split
    std::vector<int> cls(n);
    for (auto* ids : {&train_ids, &val_ids, &test_ids})
        for (std::size_t i = 0; i < ids->size(); ++i)
            cls[(*ids)[i]] = static_cast<int>(i % C);

    Rng split_rng(mix_seed(cfg.seed, "split", 0));
    NodeSet val_labeled =
        detail::sample_subset(val_ids, std::max<std::size_t>(
                                           1, detail::rounded_count(cfg.val_labeled_frac, val_ids.size())),
                              split_rng);
    NodeSet test_targets =
        detail::sample_subset(test_ids, std::max<std::size_t>(
                                            1, detail::rounded_count(cfg.target_frac, test_ids.size())),
                              split_rng);

    // planted noise neighbors: feature mean from the next class over, edges
    // wired at the class-blind average rate; never targets, never labeled val
    std::vector<NodeId> noise_pool;
    for (NodeId v : val_ids)
        if (!val_labeled.contains(v)) noise_pool.push_back(v);
    for (NodeId v : test_ids)
        if (!test_targets.contains(v)) noise_pool.push_back(v);
    Rng noise_rng(mix_seed(cfg.seed, "noise", 0));
    NodeSet noise_nodes = detail::sample_subset(
        noise_pool, detail::rounded_count(cfg.noise_frac, noise_pool.size()), noise_rng);

    // class means e_c / sqrt(2): every pair exactly unit distance apart
    auto mean_of = [&](int c) {
        std::vector<double> mu(cfg.dim, 0.0);
        mu[static_cast<std::size_t>(c)] = 1.0 / std::sqrt(2.0);
        return mu;
    };

    std::vector<float> feats(n * cfg.dim);
    Rng feat_rng(mix_seed(cfg.seed, "feat", 0));
    for (NodeId v = 0; v < n; ++v) {
        int feat_cls = cls[v];
        if (noise_nodes.contains(v)) feat_cls = (feat_cls + 1) % static_cast<int>(C);
        auto mu = mean_of(feat_cls);
        for (std::size_t j = 0; j < cfg.dim; ++j)
            feats[v * cfg.dim + j] = static_cast<float>(mu[j] + cfg.sigma * feat_rng.normal());
    }

    double p_mix = (cfg.p_in + static_cast<double>(C - 1) * cfg.p_out) / static_cast<double>(C);
    std::vector<std::pair<NodeId, NodeId>> edges;
    Rng edge_rng(mix_seed(cfg.seed, "edge", 0));
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) {
            if (!cfg.transductive && split_of[u] != split_of[v]) continue;
            double p;
            if (noise_nodes.contains(u) || noise_nodes.contains(v))
                p = p_mix;
            else
                p = cls[u] == cls[v] ? cfg.p_in : cfg.p_out;
            if (edge_rng.uniform() < p) edges.emplace_back(u, v);
        }

    std::vector<int> labels(cls);
    SplitMembership splits;
    splits.train = NodeSet::of(train_ids);
    splits.train_labeled = splits.train;
    splits.val = NodeSet::of(val_ids);
    splits.val_labeled = val_labeled;
    splits.test = NodeSet::of(test_ids);
    splits.test_targets = test_targets;

    return SynthResult{Graph(n, edges, feats, cfg.dim, labels, splits), noise_nodes};
}

inline void write_noise_nodes(const std::string& path, const Graph& g, const NodeSet& noise) {
    nlohmann::ordered_json j;
    std::vector<std::int64_t> ids;
    for (NodeId v : noise) ids.push_back(g.external_id(v));
    j["noise_nodes"] = ids;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write noise nodes: " + path);
    out << j.dump(2) << "\n";
}

inline NodeSet read_noise_nodes(const std::string& path, const Graph& g) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read noise nodes: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("noise nodes file is not valid JSON: " + std::string(e.what()));
    }
    std::vector<NodeId> ids;
    for (auto ext : j.at("noise_nodes").get<std::vector<std::int64_t>>())
        ids.push_back(g.to_dense(ext));
    return NodeSet::of(ids);
}

}  // namespace graphval
