// graph.hpp - immutable undirected graph with node features, labels and
// split membership, plus induced subgraph views and k-hop neighborhoods.
#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <utility>

#include "graphval/common.hpp"

namespace graphval {

// ---------------------------------------------------------------------------
// NodeSet: sorted unique node ids with binary-search membership.
// ---------------------------------------------------------------------------

class NodeSet {
public:
    NodeSet() = default;

    /// Build from arbitrary ids: sorts and deduplicates.
    static NodeSet of(std::vector<NodeId> ids) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        NodeSet s;
        s.ids_ = std::move(ids);
        return s;
    }

    bool contains(NodeId v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }
    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    NodeId operator[](std::size_t i) const { return ids_[i]; }
    auto begin() const { return ids_.begin(); }
    auto end() const { return ids_.end(); }
    const std::vector<NodeId>& ids() const { return ids_; }

    /// Insert one id, keeping the list sorted; no-op if already present.
    void insert(NodeId v) {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
        if (it == ids_.end() || *it != v) ids_.insert(it, v);
    }

    /// Position of v in the sorted id list; v must be a member.
    std::size_t index_of(NodeId v) const {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
        return static_cast<std::size_t>(it - ids_.begin());
    }

    NodeSet set_union(const NodeSet& other) const {
        std::vector<NodeId> out;
        out.reserve(ids_.size() + other.ids_.size());
        std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                       std::back_inserter(out));
        NodeSet s;
        s.ids_ = std::move(out);
        return s;
    }

    NodeSet set_difference(const NodeSet& other) const {
        std::vector<NodeId> out;
        std::set_difference(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                            std::back_inserter(out));
        NodeSet s;
        s.ids_ = std::move(out);
        return s;
    }

    bool operator==(const NodeSet& other) const { return ids_ == other.ids_; }

private:
    std::vector<NodeId> ids_;
};

/// Per-split membership. In the inductive setting train/val/test partition the
/// node set and each phase works on its induced subgraph; in transductive mode
/// the same flags mark roles on one shared graph.
struct SplitMembership {
    NodeSet train;
    NodeSet train_labeled;
    NodeSet val;
    NodeSet val_labeled;
    NodeSet test;
    NodeSet test_targets;
};

// ---------------------------------------------------------------------------
// Graph: CSR adjacency (symmetric, deduplicated, no stored self-loops),
// row-major f32 features, optional labels (-1 = unlabeled), split flags.
// Immutable after construction; subgraph logic lives in views.
// ---------------------------------------------------------------------------

class Graph {
public:
    Graph(std::size_t n_nodes, const std::vector<std::pair<NodeId, NodeId>>& edges,
          std::vector<float> features, std::size_t feature_dim,
          std::vector<std::int32_t> labels, SplitMembership splits,
          std::vector<std::int64_t> external_ids = {})
        : n_(n_nodes),
          dim_(feature_dim),
          features_(std::move(features)),
          labels_(std::move(labels)),
          splits_(std::move(splits)),
          external_ids_(std::move(external_ids)) {
        if (features_.size() != n_ * dim_)
            throw DataError("graph: feature matrix size does not match n_nodes * dim");
        if (labels_.empty()) labels_.assign(n_, -1);
        if (labels_.size() != n_) throw DataError("graph: label vector size does not match n_nodes");
        if (!external_ids_.empty() && external_ids_.size() != n_)
            throw DataError("graph: external id table size does not match n_nodes");

        // Symmetrize, drop self-loops, deduplicate.
        std::vector<std::pair<NodeId, NodeId>> sym;
        sym.reserve(edges.size() * 2);
        for (auto [u, v] : edges) {
            if (u >= n_ || v >= n_) throw DataError("graph: edge endpoint out of range");
            if (u == v) continue;
            sym.emplace_back(u, v);
            sym.emplace_back(v, u);
        }
        std::sort(sym.begin(), sym.end());
        sym.erase(std::unique(sym.begin(), sym.end()), sym.end());

        offsets_.assign(n_ + 1, 0);
        for (auto& e : sym) ++offsets_[e.first + 1];
        for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
        adj_.resize(sym.size());
        for (std::size_t i = 0; i < sym.size(); ++i) adj_[i] = sym[i].second;

        validate_splits();
        std::int32_t max_label = -1;
        for (std::size_t v = 0; v < n_; ++v) {
            if (labels_[v] < -1) throw DataError("graph: negative label");
            max_label = std::max(max_label, labels_[v]);
        }
        n_classes_ = static_cast<std::size_t>(max_label + 1);
    }

    std::size_t n_nodes() const { return n_; }
    std::size_t n_edges() const { return adj_.size() / 2; }
    std::size_t feature_dim() const { return dim_; }
    std::size_t n_classes() const { return n_classes_; }

    std::span<const NodeId> neighbors(NodeId v) const {
        return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
    }
    std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
    bool has_edge(NodeId u, NodeId v) const {
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    const float* features_row(NodeId v) const { return features_.data() + v * dim_; }
    std::int32_t label(NodeId v) const { return labels_[v]; }
    bool has_label(NodeId v) const { return labels_[v] >= 0; }

    const SplitMembership& splits() const { return splits_; }

    /// External id for reporting; identity when the input ids were already
    /// dense integers starting at zero.
    std::int64_t external_id(NodeId v) const {
        return external_ids_.empty() ? static_cast<std::int64_t>(v) : external_ids_[v];
    }
    bool has_external_ids() const { return !external_ids_.empty(); }

    /// Inverse of external_id. Rarely used (artifact re-ingest), so a linear
    /// scan is fine on the remapped path.
    NodeId to_dense(std::int64_t ext) const {
        if (external_ids_.empty()) {
            if (ext < 0 || ext >= static_cast<std::int64_t>(n_))
                throw DataError("unknown node id " + std::to_string(ext));
            return static_cast<NodeId>(ext);
        }
        for (std::size_t i = 0; i < external_ids_.size(); ++i)
            if (external_ids_[i] == ext) return static_cast<NodeId>(i);
        throw DataError("unknown node id " + std::to_string(ext));
    }

    NodeSet all_nodes() const {
        std::vector<NodeId> ids(n_);
        for (std::size_t i = 0; i < n_; ++i) ids[i] = static_cast<NodeId>(i);
        return NodeSet::of(std::move(ids));
    }

private:
    void validate_splits() {
        auto check_range = [&](const NodeSet& s, const char* name) {
            for (NodeId v : s)
                if (v >= n_) throw DataError(std::string("splits: node id out of range in ") + name);
        };
        check_range(splits_.train, "train");
        check_range(splits_.train_labeled, "train_labeled");
        check_range(splits_.val, "val");
        check_range(splits_.val_labeled, "val_labeled");
        check_range(splits_.test, "test");
        check_range(splits_.test_targets, "test_targets");

        for (NodeId v : splits_.train_labeled)
            if (!splits_.train.contains(v)) throw DataError("splits: train_labeled not a subset of train");
        for (NodeId v : splits_.val_labeled)
            if (!splits_.val.contains(v)) throw DataError("splits: val_labeled not a subset of val");
        for (NodeId v : splits_.test_targets)
            if (!splits_.test.contains(v)) throw DataError("splits: test_targets not a subset of test");

        // train/val/test must partition the node set.
        std::vector<std::uint8_t> seen(n_, 0);
        auto mark = [&](const NodeSet& s, const char* name) {
            for (NodeId v : s) {
                if (seen[v]) throw DataError(std::string("splits: node in more than one split: ") + name);
                seen[v] = 1;
            }
        };
        mark(splits_.train, "train");
        mark(splits_.val, "val");
        mark(splits_.test, "test");
        for (std::size_t v = 0; v < n_; ++v)
            if (!seen[v]) throw DataError("splits: node " + std::to_string(v) + " not assigned to any split");

        // Labeled flags require labels; so do evaluation targets.
        auto need_label = [&](const NodeSet& s, const char* name) {
            for (NodeId v : s)
                if (labels_[v] < 0)
                    throw DataError(std::string("splits: node flagged ") + name + " has no label");
        };
        need_label(splits_.train_labeled, "train_labeled");
        need_label(splits_.val_labeled, "val_labeled");
    }

    std::size_t n_;
    std::size_t dim_;
    std::size_t n_classes_ = 0;
    std::vector<std::uint32_t> offsets_;
    std::vector<NodeId> adj_;
    std::vector<float> features_;
    std::vector<std::int32_t> labels_;
    SplitMembership splits_;
    std::vector<std::int64_t> external_ids_;
};

// ---------------------------------------------------------------------------
// SubgraphView: the induced subgraph on an active node set. Only edges with
// both endpoints active exist in the view.
// ---------------------------------------------------------------------------

class SubgraphView {
public:
    SubgraphView(const Graph& g, NodeSet active) : g_(&g), active_(std::move(active)), mask_(g.n_nodes(), 0) {
        for (NodeId v : active_) {
            if (v >= g.n_nodes()) throw DataError("view: node id out of range");
            mask_[v] = 1;
        }
    }

    const Graph& base() const { return *g_; }
    const NodeSet& active() const { return active_; }
    std::size_t n_active() const { return active_.size(); }
    bool is_active(NodeId v) const { return mask_[v] != 0; }

    /// Visit each induced undirected edge once, as (u, v) with u < v.
    template <typename Fn>
    void for_each_edge(Fn fn) const {
        for (NodeId u : active_)
            for (NodeId v : g_->neighbors(u))
                if (v > u && mask_[v]) fn(u, v);
    }

    std::size_t count_edges() const {
        std::size_t c = 0;
        for_each_edge([&](NodeId, NodeId) { ++c; });
        return c;
    }

    /// Degree of v inside the view.
    std::size_t view_degree(NodeId v) const {
        std::size_t d = 0;
        for (NodeId u : g_->neighbors(v))
            if (mask_[u]) ++d;
        return d;
    }

private:
    const Graph* g_;
    NodeSet active_;
    std::vector<std::uint8_t> mask_;
};

/// Induced subgraph on `nodes`.
inline SubgraphView induced_view(const Graph& g, NodeSet nodes) { return SubgraphView(g, std::move(nodes)); }

inline SubgraphView full_view(const Graph& g) { return SubgraphView(g, g.all_nodes()); }

/// Universe a phase operates in: the split of the targets. Targets must all
/// carry one split flag among train/val/test; checked in precedence order
/// test, val, train so evaluation phases resolve naturally.
inline const NodeSet* split_universe(const Graph& g, const NodeSet& targets) {
    auto all_in = [&](const NodeSet& s) {
        for (NodeId t : targets)
            if (!s.contains(t)) return false;
        return true;
    };
    if (targets.empty()) return nullptr;
    if (all_in(g.splits().test)) return &g.splits().test;
    if (all_in(g.splits().val)) return &g.splits().val;
    if (all_in(g.splits().train)) return &g.splits().train;
    return nullptr;
}

/// Nodes within <= k hops of any target, excluding the targets themselves.
/// Paths are restricted to `universe` when given, otherwise to the split
/// graph containing the targets (falling back to the whole graph when the
/// targets span splits, as in transductive use).
inline NodeSet k_hop_neighborhood(const Graph& g, const NodeSet& targets, std::size_t k,
                                  const NodeSet* universe = nullptr) {
    for (NodeId t : targets)
        if (t >= g.n_nodes()) throw DataError("k_hop_neighborhood: target id out of range");
    if (universe == nullptr) universe = split_universe(g, targets);

    std::vector<std::uint8_t> allowed;
    if (universe != nullptr) {
        allowed.assign(g.n_nodes(), 0);
        for (NodeId v : *universe) allowed[v] = 1;
        for (NodeId t : targets)
            if (!allowed[t]) throw DataError("k_hop_neighborhood: target outside its universe");
    }
    auto in_universe = [&](NodeId v) { return allowed.empty() || allowed[v] != 0; };

    std::vector<std::int32_t> dist(g.n_nodes(), -1);
    std::queue<NodeId> q;
    for (NodeId t : targets) {
        dist[t] = 0;
        q.push(t);
    }
    std::vector<NodeId> out;
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        if (static_cast<std::size_t>(dist[u]) >= k) continue;
        for (NodeId v : g.neighbors(u)) {
            if (dist[v] >= 0 || !in_universe(v)) continue;
            dist[v] = dist[u] + 1;
            out.push_back(v);
            q.push(v);
        }
    }
    return NodeSet::of(std::move(out));
}

}  // namespace graphval
