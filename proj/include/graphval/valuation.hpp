// valuation.hpp - structure-aware Shapley estimation over permutation
// traces.
//
// A trace walks one valid permutation, growing the coalition from the
// targets-only view (which keeps target-target edges) one node at a time and
// recording the feature vector and optional scalar utility at every prefix.
// Per-node Shapley estimates are averages of the recorded marginals across
// permutations. Coalition state is maintained incrementally (active set,
// induced edges, running edge-cosine sums, cached structure-free rows); unit
// tests compare against full scratch rebuilds.
//
// The Monte Carlo estimator averages over draws of the sequential frontier
// process. That process is not uniform over the set of valid orders, so the
// exact oracle reports two references on small instances: the uniform
// average over all valid orders, and the exact expectation under the
// sampling process (which Monte Carlo is an unbiased estimator of). The two
// coincide on chain graphs (a single valid order) and by symmetry on stars.
#pragma once

#include <functional>
#include <map>

#include "graphval/features.hpp"
#include "graphval/permutation.hpp"

namespace graphval {

using ScalarUtility = std::function<double(const SubgraphView&)>;

// ---------------------------------------------------------------------------
// Incremental coalition state along a permutation.
// ---------------------------------------------------------------------------

class CoalitionTracker {
public:
    /// `ex` may be null for scalar-only traces; feature bookkeeping (edge
    /// cosine sums, structure-free probability cache) is skipped then.
    CoalitionTracker(const Graph& g, const NodeSet& targets, const FeatureExtractor* ex)
        : g_(&g), ex_(ex), active_(targets), mask_(g.n_nodes(), 0) {
        for (NodeId t : targets) mask_[t] = 1;
        if (ex_) {
            sf_.assign(g.n_nodes() * ex_->params().n_classes(), 0.0);
            have_sf_.assign(g.n_nodes(), 0);
        }
        for (NodeId t : targets) {
            for (NodeId u : g.neighbors(t))
                if (u > t && mask_[u]) add_edge(t, u);
            if (ex_) cache_structure_free(t);
        }
    }

    void add(NodeId v) {
        if (v >= g_->n_nodes()) throw DataError("tracker: node id out of range");
        if (mask_[v]) throw DataError("tracker: node added twice: " + std::to_string(v));
        mask_[v] = 1;
        active_.insert(v);
        for (NodeId u : g_->neighbors(v))
            if (mask_[u] && u != v) add_edge(std::min(u, v), std::max(u, v));
        if (ex_) cache_structure_free(v);
    }

    const NodeSet& active() const { return active_; }
    SubgraphView view() const { return SubgraphView(*g_, active_); }

    double edge_cos_mean() const {
        return edge_count_ == 0 ? 0.0 : cos_sum_ / static_cast<double>(edge_count_);
    }

    FeatureVector features(const NodeSet& targets) const {
        if (!ex_) throw NumericError("tracker: feature extraction requested without extractor");
        NormalizedAdjacency na = normalized_from(active_, edges_);
        std::size_t n_classes = ex_->params().n_classes();
        Mat sf(active_.size(), n_classes);
        for (std::size_t i = 0; i < active_.size(); ++i) {
            const double* src = sf_.data() + active_[i] * n_classes;
            for (std::size_t c = 0; c < n_classes; ++c) sf(i, c) = src[c];
        }
        return ex_->extract_parts(active_, na, edge_cos_mean(), sf, targets);
    }

private:
    void add_edge(NodeId u, NodeId v) {
        edges_.emplace_back(u, v);
        if (ex_) {
            cos_sum_ += ex_->edge_cosine(u, v);
            ++edge_count_;
        }
    }

    void cache_structure_free(NodeId v) {
        if (have_sf_[v]) return;
        std::size_t d = g_->feature_dim();
        std::vector<double> x(d);
        const float* row = g_->features_row(v);
        for (std::size_t c = 0; c < d; ++c) x[c] = static_cast<double>(row[c]);
        auto p = mlp_probabilities(ex_->params(), x.data());
        std::copy(p.begin(), p.end(), sf_.begin() + v * p.size());
        have_sf_[v] = 1;
    }

    const Graph* g_;
    const FeatureExtractor* ex_;
    NodeSet active_;
    std::vector<std::uint8_t> mask_;
    std::vector<std::pair<NodeId, NodeId>> edges_;
    double cos_sum_ = 0.0;
    std::size_t edge_count_ = 0;
    std::vector<double> sf_;  // structure-free probs, n_nodes x n_classes
    std::vector<std::uint8_t> have_sf_;
};

// ---------------------------------------------------------------------------
// Traces.
// ---------------------------------------------------------------------------

struct MarginalTrace {
    Permutation perm;
    std::vector<FeatureVector> prefix_features;  // len+1 entries when recorded
    std::vector<double> prefix_utils;            // len+1 entries when a utility was given

    struct Step {
        NodeId node;
        const FeatureVector* before = nullptr;
        const FeatureVector* after = nullptr;
        double util_before = 0.0;
        double util_after = 0.0;
        bool has_utils = false;
    };

    std::size_t n_steps() const { return perm.order.size(); }
    Step step(std::size_t j) const {
        Step s;
        s.node = perm.order[j];
        if (!prefix_features.empty()) {
            s.before = &prefix_features[j];
            s.after = &prefix_features[j + 1];
        }
        if (!prefix_utils.empty()) {
            s.util_before = prefix_utils[j];
            s.util_after = prefix_utils[j + 1];
            s.has_utils = true;
        }
        return s;
    }
};

struct TraceOptions {
    bool with_features = true;
    const ScalarUtility* utility = nullptr;
};

/// Walk one permutation, recording features (and utility when given) at every
/// prefix including the empty coalition.
inline MarginalTrace trace_permutation(const Graph& g, const FeatureExtractor* ex,
                                       const Permutation& perm, const TraceOptions& opt) {
    if (opt.with_features && ex == nullptr)
        throw NumericError("trace: feature recording requires an extractor");
    MarginalTrace tr;
    tr.perm = perm;
    CoalitionTracker tracker(g, perm.targets, opt.with_features ? ex : nullptr);
    auto record = [&]() {
        if (opt.with_features) tr.prefix_features.push_back(tracker.features(perm.targets));
        if (opt.utility) tr.prefix_utils.push_back((*opt.utility)(tracker.view()));
    };
    record();
    for (NodeId v : perm.order) {
        tracker.add(v);
        record();
    }
    return tr;
}

namespace detail {

/// All permutations must be full-length orders of one shared player set.
inline NodeSet common_players(const std::vector<Permutation>& perms) {
    if (perms.empty()) throw DataError("valuation: no permutations given");
    NodeSet players = NodeSet::of(perms.front().order);
    if (players.size() != perms.front().order.size())
        throw DataError("valuation: permutation contains duplicate nodes");
    for (const auto& p : perms) {
        if (p.order.size() != players.size())
            throw DataError("valuation: mixed permutation lengths");
        if (!(NodeSet::of(p.order) == players))
            throw DataError("valuation: permutations disagree on the player set");
    }
    return players;
}

}  // namespace detail

/// Run traces for a batch of permutations, parallel over permutations with a
/// deterministic, worker-count-independent result layout.
inline std::vector<MarginalTrace> run_traces(const Graph& g, const FeatureExtractor* ex,
                                             const std::vector<Permutation>& perms,
                                             const TraceOptions& opt, std::size_t workers = 1) {
    std::vector<MarginalTrace> traces(perms.size());
    parallel_for(perms.size(), workers,
                 [&](std::size_t i) { traces[i] = trace_permutation(g, ex, perms[i], opt); });
    return traces;
}

// ---------------------------------------------------------------------------
// Feature-level and scalar Shapley estimates.
// ---------------------------------------------------------------------------

using PsiMap = std::map<NodeId, std::array<double, FeatureVector::kCount>>;
using PhiMap = std::map<NodeId, double>;

/// Per-node, per-feature Shapley estimates: the average feature marginal of
/// each player across the given full-length permutations.
inline PsiMap feature_shapley(const FeatureExtractor& ex, const NodeSet& targets,
                              const std::vector<Permutation>& perms, std::size_t workers = 1) {
    NodeSet players = detail::common_players(perms);
    for (const auto& p : perms)
        if (!(p.targets == targets)) throw DataError("valuation: permutation targets mismatch");
    TraceOptions opt;
    opt.with_features = true;
    auto traces = run_traces(ex.graph(), &ex, perms, opt, workers);

    PsiMap psi;
    for (NodeId v : players) psi[v] = {};
    double inv_m = 1.0 / static_cast<double>(perms.size());
    for (const auto& tr : traces)
        for (std::size_t j = 0; j < tr.n_steps(); ++j) {
            auto before = tr.prefix_features[j].as_array();
            auto after = tr.prefix_features[j + 1].as_array();
            auto& acc = psi[tr.perm.order[j]];
            for (std::size_t k = 0; k < FeatureVector::kCount; ++k)
                acc[k] += (after[k] - before[k]) * inv_m;
        }
    return psi;
}

struct ValueReport {
    std::string method;
    std::vector<std::pair<NodeId, double>> values;  // ascending node id
    std::size_t m_permutations = 0;
    std::uint64_t seed = 0;
};

/// Scalar Shapley estimates for an arbitrary subgraph utility.
inline ValueReport scalar_shapley(const Graph& g, const NodeSet& targets,
                                  const std::vector<Permutation>& perms, const ScalarUtility& utility,
                                  std::size_t workers = 1) {
    NodeSet players = detail::common_players(perms);
    for (const auto& p : perms)
        if (!(p.targets == targets)) throw DataError("valuation: permutation targets mismatch");
    TraceOptions opt;
    opt.with_features = false;
    opt.utility = &utility;
    auto traces = run_traces(g, nullptr, perms, opt, workers);

    PhiMap phi;
    for (NodeId v : players) phi[v] = 0.0;
    double inv_m = 1.0 / static_cast<double>(perms.size());
    for (const auto& tr : traces)
        for (std::size_t j = 0; j < tr.n_steps(); ++j)
            phi[tr.perm.order[j]] += (tr.prefix_utils[j + 1] - tr.prefix_utils[j]) * inv_m;

    ValueReport r;
    r.m_permutations = perms.size();
    for (auto& [v, x] : phi) r.values.emplace_back(v, x);
    return r;
}

// ---------------------------------------------------------------------------
// Linear utilities over the feature vector.
// ---------------------------------------------------------------------------

struct LinearUtility {
    std::vector<std::pair<std::size_t, double>> terms;  // (feature index, weight)
    double intercept = 0.0;

    double apply(const FeatureVector& f) const {
        auto a = f.as_array();
        double s = intercept;
        for (auto [k, w] : terms) s += w * a[k];
        return s;
    }

    /// Marginals of a constant are zero, so the intercept drops out of every
    /// Shapley value: phi_i = w dot psi_i.
    double apply_psi(const std::array<double, FeatureVector::kCount>& psi) const {
        double s = 0.0;
        for (auto [k, w] : terms) s += w * psi[k];
        return s;
    }
};

/// Max absolute gap between the scalar Shapley values of a linear utility and
/// the weighted feature-level Shapley values. Exact linearity puts this at
/// floating-point noise; anything larger is a decomposition bug.
inline double decompose_check(const LinearUtility& u, const PsiMap& psis, const PhiMap& phis) {
    if (psis.size() != phis.size()) throw DataError("decompose_check: node sets differ");
    double worst = 0.0;
    for (const auto& [v, psi] : psis) {
        auto it = phis.find(v);
        if (it == phis.end()) throw DataError("decompose_check: node sets differ");
        worst = std::max(worst, std::abs(it->second - u.apply_psi(psi)));
    }
    return worst;
}

struct TestValuation {
    ValueReport report;
    PsiMap psi;
    std::vector<Permutation> perms;
};

/// Value the players around `targets` with a learned linear utility: sample M
/// frontier permutations, average feature marginals, take w dot psi.
inline TestValuation estimate_test_values(const FeatureExtractor& ex, const NodeSet& targets,
                                          std::size_t k, const LinearUtility& w, std::size_t M,
                                          std::uint64_t seed, std::size_t workers = 1,
                                          const NodeSet* universe = nullptr) {
    if (M == 0) throw ConfigError("estimate_test_values: need at least one permutation");
    TestValuation out;
    out.perms.reserve(M);
    for (std::size_t m = 0; m < M; ++m)
        out.perms.push_back(sample_permutation(ex.graph(), targets, k, mix_seed(seed, "perm", m), universe));
    out.psi = feature_shapley(ex, targets, out.perms, workers);
    out.report.m_permutations = M;
    out.report.seed = seed;
    for (const auto& [v, psi] : out.psi) out.report.values.emplace_back(v, w.apply_psi(psi));
    return out;
}

// ---------------------------------------------------------------------------
// Small-instance oracles. Coalition utilities are cached by player bitmask,
// so repeated prefixes across orders cost one evaluation.
// ---------------------------------------------------------------------------

namespace detail {

class CoalitionCache {
public:
    CoalitionCache(const Graph& g, const NodeSet& targets, const NodeSet& players,
                   const ScalarUtility& u)
        : g_(&g), targets_(targets), players_(players), u_(&u) {
        if (players.size() > 63) throw DataError("coalition cache: more than 63 players");
    }

    double value(std::uint64_t mask) {
        auto it = cache_.find(mask);
        if (it != cache_.end()) return it->second;
        NodeSet coalition = targets_;
        for (std::size_t i = 0; i < players_.size(); ++i)
            if (mask & (1ULL << i)) coalition.insert(players_[i]);
        double v = (*u_)(SubgraphView(*g_, coalition));
        cache_.emplace(mask, v);
        return v;
    }

    std::uint64_t bit(NodeId v) const { return 1ULL << players_.index_of(v); }

private:
    const Graph* g_;
    NodeSet targets_;
    NodeSet players_;
    const ScalarUtility* u_;
    std::map<std::uint64_t, double> cache_;
};

}  // namespace detail

struct ExactValues {
    PhiMap uniform;   // plain average over all valid orders
    PhiMap process;   // expectation under the sequential frontier process
    std::size_t n_orders = 0;
};

/// Exhaustive reference values on a small instance (enumerates every valid
/// order; see the header note on the two weightings).
inline ExactValues exact_values(const Graph& g, const NodeSet& targets, std::size_t k,
                                const ScalarUtility& utility, std::size_t cap = 0,
                                const NodeSet* universe = nullptr) {
    std::vector<double> probs;
    auto orders = enumerate_permutations(g, targets, k, cap, universe, &probs);
    if (orders.empty()) throw DataError("exact_values: no players");
    NodeSet players = NodeSet::of(orders.front().order);
    detail::CoalitionCache cache(g, targets, players, utility);

    ExactValues ev;
    ev.n_orders = orders.size();
    for (NodeId v : players) {
        ev.uniform[v] = 0.0;
        ev.process[v] = 0.0;
    }
    double inv_n = 1.0 / static_cast<double>(orders.size());
    for (std::size_t m = 0; m < orders.size(); ++m) {
        std::uint64_t mask = 0;
        for (NodeId v : orders[m].order) {
            double before = cache.value(mask);
            mask |= cache.bit(v);
            double marginal = cache.value(mask) - before;
            ev.uniform[v] += marginal * inv_n;
            ev.process[v] += marginal * probs[m];
        }
    }
    return ev;
}

struct McValues {
    PhiMap mean;
    PhiMap se;  // sample standard error of the per-node mean
    std::size_t m = 0;
};

/// Monte Carlo values with per-node standard errors, sharing one coalition
/// cache across draws.
inline McValues mc_values(const Graph& g, const NodeSet& targets, std::size_t k,
                          const ScalarUtility& utility, std::size_t M, std::uint64_t seed,
                          const NodeSet* universe = nullptr) {
    if (M == 0) throw ConfigError("mc_values: need at least one draw");
    NodeSet players = k_hop_neighborhood(g, targets, k, universe);
    if (players.empty()) throw DataError("mc_values: no players");
    detail::CoalitionCache cache(g, targets, players, utility);

    std::size_t np = players.size();
    std::vector<double> sum(np, 0.0), sumsq(np, 0.0), first(np, 0.0);
    std::vector<std::uint8_t> seen(np, 0), constant(np, 1);
    for (std::size_t m = 0; m < M; ++m) {
        Permutation p = sample_permutation(g, targets, k, mix_seed(seed, "perm", m), universe);
        std::uint64_t mask = 0;
        for (NodeId v : p.order) {
            double before = cache.value(mask);
            mask |= cache.bit(v);
            double marginal = cache.value(mask) - before;
            std::size_t i = players.index_of(v);
            if (!seen[i]) {
                first[i] = marginal;
                seen[i] = 1;
            } else if (marginal != first[i]) {
                constant[i] = 0;
            }
            sum[i] += marginal;
            sumsq[i] += marginal * marginal;
        }
    }
    McValues mc;
    mc.m = M;
    double inv_m = 1.0 / static_cast<double>(M);
    for (std::size_t i = 0; i < np; ++i) {
        NodeId v = players[i];
        // a node whose marginal never varied gets the exact mean (a single
        // valid order must reproduce enumeration bit for bit)
        if (constant[i]) {
            mc.mean[v] = first[i];
            mc.se[v] = 0.0;
            continue;
        }
        double mean = sum[i] * inv_m;
        mc.mean[v] = mean;
        double var = M > 1 ? std::max(0.0, (sumsq[i] - static_cast<double>(M) * mean * mean) /
                                               static_cast<double>(M - 1))
                           : 0.0;
        mc.se[v] = std::sqrt(var * inv_m);
    }
    return mc;
}

// ---------------------------------------------------------------------------
// Value report CSV: node_id,value with ascending ids (external ids when the
// ingest remapped sparse inputs).
// ---------------------------------------------------------------------------

inline void write_values_csv(const std::string& path, const Graph& g, const ValueReport& r) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write value report: " + path);
    out << "node_id,value\n";
    for (const auto& [v, x] : r.values) out << g.external_id(v) << "," << format_double(x) << "\n";
}

}  // namespace graphval
