// permutation.hpp - structure-aware orderings of a target set's k-hop
// neighborhood. A valid order admits a node only once it has a graph
// neighbor among the targets or previously admitted nodes, so every prefix
// keeps an admitted path back to the targets.
//
// Sampling is the sequential frontier process: start from the targets'
// 1-hop frontier, repeatedly draw uniformly from the active frontier and
// extend it with the drawn node's unvisited neighbors inside the hop bound.
// Orders are always full length over the neighborhood. Note the process is
// not the uniform distribution over all valid orders; exact enumeration
// (optionally with per-order process probabilities) is provided so callers
// can compare both averages on small instances.
#pragma once

#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "graphval/graph.hpp"

namespace graphval {

struct Permutation {
    std::vector<NodeId> order;
    NodeSet targets;
    std::size_t hop_bound = 0;
};

namespace detail {

struct FrontierState {
    const Graph* g;
    const NodeSet* players;
    std::vector<std::uint8_t> visited;  // targets + admitted players
    std::vector<NodeId> active;         // sorted frontier

    FrontierState(const Graph& graph, const NodeSet& targets, const NodeSet& neighborhood)
        : g(&graph), players(&neighborhood), visited(graph.n_nodes(), 0) {
        for (NodeId t : targets) visited[t] = 1;
        std::vector<NodeId> init;
        for (NodeId t : targets)
            for (NodeId u : graph.neighbors(t))
                if (neighborhood.contains(u) && !visited[u]) init.push_back(u);
        NodeSet s = NodeSet::of(std::move(init));
        active.assign(s.begin(), s.end());
    }

    /// Admit active[idx]; returns the node and refreshes the frontier.
    NodeId admit(std::size_t idx) {
        NodeId v = active[idx];
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(idx));
        visited[v] = 1;
        std::vector<NodeId> grown;
        for (NodeId u : g->neighbors(v))
            if (players->contains(u) && !visited[u] &&
                !std::binary_search(active.begin(), active.end(), u))
                grown.push_back(u);
        if (!grown.empty()) {
            active.insert(active.end(), grown.begin(), grown.end());
            std::sort(active.begin(), active.end());
            active.erase(std::unique(active.begin(), active.end()), active.end());
        }
        return v;
    }
};

}  // namespace detail

/// One draw of the sequential frontier process. Deterministic given seed.
inline Permutation sample_permutation(const Graph& g, const NodeSet& targets, std::size_t k,
                                      std::uint64_t seed, const NodeSet* universe = nullptr) {
    if (targets.empty()) throw DataError("sample_permutation: empty target set");
    NodeSet players = k_hop_neighborhood(g, targets, k, universe);
    if (players.empty()) throw DataError("sample_permutation: no players (empty neighborhood)");
    detail::FrontierState st(g, targets, players);
    Rng rng(seed);
    Permutation p;
    p.targets = targets;
    p.hop_bound = k;
    p.order.reserve(players.size());
    while (!st.active.empty()) {
        std::size_t idx = static_cast<std::size_t>(rng.uniform_int(st.active.size()));
        p.order.push_back(st.admit(idx));
    }
    if (p.order.size() != players.size())
        throw NumericError("sample_permutation: frontier process failed to place every player");
    return p;
}

/// Exhaustive enumeration of all valid orders, lexicographically sorted.
/// With prob_out non-null, also records each order's probability under the
/// sequential frontier process (the product of 1/|frontier| along the way).
inline std::vector<Permutation> enumerate_permutations(const Graph& g, const NodeSet& targets,
                                                       std::size_t k, std::size_t cap = 0,
                                                       const NodeSet* universe = nullptr,
                                                       std::vector<double>* prob_out = nullptr) {
    if (targets.empty()) throw DataError("enumerate_permutations: empty target set");
    NodeSet players = k_hop_neighborhood(g, targets, k, universe);
    std::size_t limit = cap;
    if (limit == 0) {
        if (players.size() > 8)
            throw DataError("enumerate_permutations: neighborhood larger than 8; set an explicit cap");
        limit = std::numeric_limits<std::size_t>::max();
    }

    std::vector<Permutation> out;
    if (prob_out) prob_out->clear();
    std::vector<NodeId> order;
    order.reserve(players.size());

    // DFS over frontier choices in ascending id order emits lexicographic
    // order directly.
    auto rec = [&](auto&& self, detail::FrontierState& st, double prob) -> void {
        if (st.active.empty()) {
            if (order.size() != players.size()) return;  // unreachable by construction
            if (out.size() >= limit) throw DataError("enumerate_permutations: cap exceeded");
            Permutation p;
            p.order = order;
            p.targets = targets;
            p.hop_bound = k;
            out.push_back(std::move(p));
            if (prob_out) prob_out->push_back(prob);
            return;
        }
        double step = 1.0 / static_cast<double>(st.active.size());
        for (std::size_t i = 0; i < st.active.size(); ++i) {
            detail::FrontierState next = st;
            order.push_back(next.admit(i));
            self(self, next, prob * step);
            order.pop_back();
        }
    };
    detail::FrontierState st(g, targets, players);
    rec(rec, st, 1.0);
    return out;
}

/// True iff the order is a full permutation of the k-hop neighborhood and
/// every element has, at its insertion point, a graph neighbor among the
/// targets or earlier elements.
inline bool validate(const Graph& g, const Permutation& p, const NodeSet* universe = nullptr) {
    NodeSet players = k_hop_neighborhood(g, p.targets, p.hop_bound, universe);
    if (p.order.size() != players.size()) return false;
    NodeSet as_set = NodeSet::of(p.order);
    if (!(as_set == players)) return false;  // duplicates collapse and fail the size check above

    std::vector<std::uint8_t> visited(g.n_nodes(), 0);
    for (NodeId t : p.targets) visited[t] = 1;
    for (NodeId v : p.order) {
        bool anchored = false;
        for (NodeId u : g.neighbors(v))
            if (visited[u]) {
                anchored = true;
                break;
            }
        if (!anchored) return false;
        visited[v] = 1;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Permutation list file. One game: {"seed","k","targets","perms"}; several
// games (validation batches, per-target mode) nest under "games".
// ---------------------------------------------------------------------------

struct PermGameFile {
    std::vector<std::int64_t> targets;
    std::vector<std::vector<std::int64_t>> perms;
};

struct PermFile {
    std::uint64_t seed = 0;
    std::size_t k = 0;
    std::vector<PermGameFile> games;
};

inline void write_permutations(const std::string& path, const PermFile& f) {
    nlohmann::json j;
    j["seed"] = f.seed;
    j["k"] = f.k;
    auto game_json = [](const PermGameFile& g) {
        nlohmann::json jg;
        jg["targets"] = g.targets;
        jg["perms"] = g.perms;
        return jg;
    };
    if (f.games.size() == 1) {
        j["targets"] = f.games[0].targets;
        j["perms"] = f.games[0].perms;
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& g : f.games) arr.push_back(game_json(g));
        j["games"] = arr;
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write permutation file: " + path);
    out << j.dump(2) << "\n";
}

inline PermFile read_permutations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open permutation file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    PermFile f;
    try {
        f.seed = j.at("seed").get<std::uint64_t>();
        f.k = j.at("k").get<std::size_t>();
        auto parse_game = [](const nlohmann::json& jg) {
            PermGameFile g;
            g.targets = jg.at("targets").get<std::vector<std::int64_t>>();
            g.perms = jg.at("perms").get<std::vector<std::vector<std::int64_t>>>();
            return g;
        };
        if (j.contains("games"))
            for (auto& jg : j["games"]) f.games.push_back(parse_game(jg));
        else
            f.games.push_back(parse_game(j));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": bad permutation file: " + e.what());
    }
    return f;
}

}  // namespace graphval
