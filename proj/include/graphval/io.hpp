// io.hpp - graph ingest and the on-disk dataset formats:
//   edges.csv      src,dst integer pairs, optional header line
//   features.csv   node_id,f0,...,f{d-1}, optional header
//   features.bin   magic "GIDV", u32 n, u32 d (LE), then n*d f32 row-major LE
//   labels.csv     node_id,label, optional header
//   splits.json    {"train":[...],"train_labeled":[...],"val":[...],
//                   "val_labeled":[...],"test":[...],"test_targets":[...]}
// Sparse external node ids are remapped to dense [0, n) in ascending order;
// the mapping is kept on the Graph for reporting.
#pragma once

#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "graphval/graph.hpp"

namespace graphval {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline bool numeric_token(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

inline std::int64_t parse_int(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(std::string("expected integer for ") + what + ", got '" + s + "'");
    }
}

inline double parse_real(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(std::string("expected real for ") + what + ", got '" + s + "'");
    }
}

inline std::ifstream open_input(const std::string& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw DataError("cannot open file: " + path);
    return in;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Readers (external-id space).
// ---------------------------------------------------------------------------

inline std::vector<std::pair<std::int64_t, std::int64_t>> read_edges_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::vector<std::pair<std::int64_t, std::int64_t>> edges;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != 2) throw DataError(path + ": edge rows need exactly two columns");
        if (first && (!detail::numeric_token(cells[0]) || !detail::numeric_token(cells[1]))) {
            first = false;
            continue;  // header
        }
        first = false;
        edges.emplace_back(detail::parse_int(cells[0], "src"), detail::parse_int(cells[1], "dst"));
    }
    return edges;
}

struct FeatureTable {
    std::vector<std::int64_t> ids;   // ascending
    std::vector<float> values;       // row-major, aligned with ids
    std::size_t dim = 0;
};

inline FeatureTable read_features_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::map<std::int64_t, std::vector<float>> rows;
    std::size_t dim = 0;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() < 2) throw DataError(path + ": feature rows need node_id plus at least one value");
        if (first && !detail::numeric_token(cells[0])) {
            first = false;
            continue;
        }
        first = false;
        std::int64_t id = detail::parse_int(cells[0], "node_id");
        std::vector<float> row(cells.size() - 1);
        for (std::size_t i = 1; i < cells.size(); ++i)
            row[i - 1] = static_cast<float>(detail::parse_real(cells[i], "feature value"));
        if (dim == 0)
            dim = row.size();
        else if (row.size() != dim)
            throw DataError(path + ": ragged feature rows");
        if (!rows.emplace(id, std::move(row)).second)
            throw DataError(path + ": duplicate feature row for node " + std::to_string(id));
    }
    FeatureTable t;
    t.dim = dim;
    t.ids.reserve(rows.size());
    t.values.reserve(rows.size() * dim);
    for (auto& [id, row] : rows) {
        t.ids.push_back(id);
        t.values.insert(t.values.end(), row.begin(), row.end());
    }
    return t;
}

inline constexpr char kFeatureMagic[4] = {'G', 'I', 'D', 'V'};

inline FeatureTable read_features_bin(const std::string& path) {
    auto in = detail::open_input(path, true);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kFeatureMagic, 4) != 0)
        throw DataError(path + ": bad magic, not a feature binary");
    auto read_u32 = [&]() {
        std::uint8_t b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        if (!in) throw DataError(path + ": truncated feature binary");
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    };
    std::uint32_t n = read_u32();
    std::uint32_t d = read_u32();
    FeatureTable t;
    t.dim = d;
    t.ids.resize(n);
    t.values.resize(static_cast<std::size_t>(n) * d);
    for (std::uint32_t i = 0; i < n; ++i) t.ids[i] = i;
    for (auto& f : t.values) {
        std::uint32_t u = read_u32();
        std::memcpy(&f, &u, 4);
    }
    return t;
}

/// Dispatch on the magic bytes; falls back to CSV.
inline FeatureTable read_features_auto(const std::string& path) {
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw DataError("cannot open file: " + path);
        char magic[4] = {0, 0, 0, 0};
        probe.read(magic, 4);
        if (probe && std::memcmp(magic, kFeatureMagic, 4) == 0) return read_features_bin(path);
    }
    return read_features_csv(path);
}

inline std::vector<std::pair<std::int64_t, std::int32_t>> read_labels_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::vector<std::pair<std::int64_t, std::int32_t>> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != 2) throw DataError(path + ": label rows need exactly two columns");
        if (first && !detail::numeric_token(cells[0])) {
            first = false;
            continue;
        }
        first = false;
        out.emplace_back(detail::parse_int(cells[0], "node_id"),
                         static_cast<std::int32_t>(detail::parse_int(cells[1], "label")));
    }
    return out;
}

struct RawSplits {
    std::vector<std::int64_t> train, train_labeled, val, val_labeled, test, test_targets;
};

inline RawSplits read_splits_json(const std::string& path) {
    auto in = detail::open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    auto arr = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_array())
            throw DataError(path + std::string(": missing array '") + key + "'");
        std::vector<std::int64_t> v;
        for (auto& x : j[key]) {
            if (!x.is_number_integer()) throw DataError(path + std::string(": non-integer id in ") + key);
            v.push_back(x.get<std::int64_t>());
        }
        return v;
    };
    RawSplits s;
    s.train = arr("train");
    s.train_labeled = arr("train_labeled");
    s.val = arr("val");
    s.val_labeled = arr("val_labeled");
    s.test = arr("test");
    s.test_targets = arr("test_targets");
    return s;
}

// ---------------------------------------------------------------------------
// load_graph: ingest the four files into one immutable Graph. The feature
// table defines the node universe; all other ids must resolve against it.
// ---------------------------------------------------------------------------

inline Graph load_graph(const std::string& edges_path, const std::string& features_path,
                        const std::string& labels_path, const std::string& splits_path) {
    FeatureTable feats = read_features_auto(features_path);
    std::size_t n = feats.ids.size();
    if (n == 0) throw DataError(features_path + ": no feature rows");

    bool dense = true;
    for (std::size_t i = 0; i < n; ++i)
        if (feats.ids[i] != static_cast<std::int64_t>(i)) {
            dense = false;
            break;
        }
    std::map<std::int64_t, NodeId> remap;
    if (!dense)
        for (std::size_t i = 0; i < n; ++i) remap[feats.ids[i]] = static_cast<NodeId>(i);
    auto to_dense = [&](std::int64_t ext, const char* where) -> NodeId {
        if (dense) {
            if (ext < 0 || ext >= static_cast<std::int64_t>(n))
                throw DataError(std::string(where) + ": unknown node id " + std::to_string(ext));
            return static_cast<NodeId>(ext);
        }
        auto it = remap.find(ext);
        if (it == remap.end())
            throw DataError(std::string(where) + ": unknown node id " + std::to_string(ext));
        return it->second;
    };

    std::vector<std::pair<NodeId, NodeId>> edges;
    for (auto [u, v] : read_edges_csv(edges_path))
        edges.emplace_back(to_dense(u, "edges"), to_dense(v, "edges"));

    std::vector<std::int32_t> labels(n, -1);
    if (!labels_path.empty())
        for (auto [id, y] : read_labels_csv(labels_path)) {
            if (y < 0) throw DataError(labels_path + ": negative label for node " + std::to_string(id));
            labels[to_dense(id, "labels")] = y;
        }

    RawSplits raw = read_splits_json(splits_path);
    auto to_set = [&](const std::vector<std::int64_t>& v, const char* where) {
        std::vector<NodeId> ids;
        ids.reserve(v.size());
        for (auto ext : v) ids.push_back(to_dense(ext, where));
        return NodeSet::of(std::move(ids));
    };
    SplitMembership sm;
    sm.train = to_set(raw.train, "splits.train");
    sm.train_labeled = to_set(raw.train_labeled, "splits.train_labeled");
    sm.val = to_set(raw.val, "splits.val");
    sm.val_labeled = to_set(raw.val_labeled, "splits.val_labeled");
    sm.test = to_set(raw.test, "splits.test");
    sm.test_targets = to_set(raw.test_targets, "splits.test_targets");

    std::vector<std::int64_t> ext_ids;
    if (!dense) ext_ids = feats.ids;
    return Graph(n, edges, std::move(feats.values), feats.dim, std::move(labels), std::move(sm),
                 std::move(ext_ids));
}

// ---------------------------------------------------------------------------
// Writers (used by the generator and pipeline; always dense ids).
// ---------------------------------------------------------------------------

namespace detail {
inline std::ofstream open_output(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw DataError("cannot write file: " + path);
    return out;
}
}  // namespace detail

inline void write_edges_csv(const std::string& path, const Graph& g) {
    auto out = detail::open_output(path);
    out << "src,dst\n";
    for (NodeId u = 0; u < g.n_nodes(); ++u)
        for (NodeId v : g.neighbors(u))
            if (v > u) out << u << "," << v << "\n";
}

inline void write_features_csv(const std::string& path, const Graph& g) {
    auto out = detail::open_output(path);
    out << "node_id";
    for (std::size_t j = 0; j < g.feature_dim(); ++j) out << ",f" << j;
    out << "\n";
    for (NodeId v = 0; v < g.n_nodes(); ++v) {
        out << v;
        const float* row = g.features_row(v);
        for (std::size_t j = 0; j < g.feature_dim(); ++j) {
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof(buf), row[j]);
            out << ',' << std::string_view(buf, res.ptr - buf);
        }
        out << "\n";
    }
}

inline void write_features_bin(const std::string& path, const Graph& g) {
    auto out = detail::open_output(path, true);
    out.write(kFeatureMagic, 4);
    auto write_u32 = [&](std::uint32_t u) {
        std::uint8_t b[4] = {static_cast<std::uint8_t>(u & 0xff), static_cast<std::uint8_t>((u >> 8) & 0xff),
                             static_cast<std::uint8_t>((u >> 16) & 0xff),
                             static_cast<std::uint8_t>((u >> 24) & 0xff)};
        out.write(reinterpret_cast<char*>(b), 4);
    };
    write_u32(static_cast<std::uint32_t>(g.n_nodes()));
    write_u32(static_cast<std::uint32_t>(g.feature_dim()));
    for (NodeId v = 0; v < g.n_nodes(); ++v) {
        const float* row = g.features_row(v);
        for (std::size_t j = 0; j < g.feature_dim(); ++j) {
            std::uint32_t u;
            std::memcpy(&u, &row[j], 4);
            write_u32(u);
        }
    }
}

inline void write_labels_csv(const std::string& path, const Graph& g) {
    auto out = detail::open_output(path);
    out << "node_id,label\n";
    for (NodeId v = 0; v < g.n_nodes(); ++v)
        if (g.has_label(v)) out << v << "," << g.label(v) << "\n";
}

inline void write_splits_json(const std::string& path, const SplitMembership& sm) {
    nlohmann::json j;
    auto arr = [](const NodeSet& s) {
        std::vector<std::int64_t> v(s.begin(), s.end());
        return v;
    };
    j["train"] = arr(sm.train);
    j["train_labeled"] = arr(sm.train_labeled);
    j["val"] = arr(sm.val);
    j["val_labeled"] = arr(sm.val_labeled);
    j["test"] = arr(sm.test);
    j["test_targets"] = arr(sm.test_targets);
    auto out = detail::open_output(path);
    out << j.dump(2) << "\n";
}

}  // namespace graphval
