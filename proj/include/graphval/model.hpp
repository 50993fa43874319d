// model.hpp - the fixed node classifier and its supporting operators.
//
// The classifier is an MLP trained on raw node features without any message
// passing; graph structure enters only at inference time, where the forward
// pass propagates with the symmetrically normalized adjacency of whatever
// subgraph view it is given:
//   sgc: softmax(MLP(A_hat^k X))
//   gcn: one A_hat application after each linear layer's pre-activation,
//        in the first min(k_hops, n_layers) layers
// A transductive toggle trains with propagation active instead.
//
// Model file (JSON): conv, k_hops, layer_dims, per-layer weight and bias
// arrays base64-encoded as little-endian f32, so a save/load round-trip is
// bit-exact.
#pragma once

#include <fstream>
#include <functional>

#include <nlohmann/json.hpp>

#include "graphval/graph.hpp"

namespace graphval {

// ---------------------------------------------------------------------------
// Normalized adjacency of a view: A_hat = D~^{-1/2} (A + I) D~^{-1/2} where
// degrees count the added self-loop. Stored over local indices aligned with
// the view's ascending active list.
// ---------------------------------------------------------------------------

struct NormalizedAdjacency {
    std::vector<NodeId> nodes;                                   // ascending global ids
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // local (i, j), i < j
    std::vector<double> inv_sqrt;                                // 1 / sqrt(view_degree + 1)

    std::size_t size() const { return nodes.size(); }

    /// Dense coefficient, for tests and tiny oracles.
    double coefficient(std::uint32_t i, std::uint32_t j) const {
        if (i == j) return inv_sqrt[i] * inv_sqrt[i];
        for (auto [a, b] : edges)
            if ((a == i && b == j) || (a == j && b == i)) return inv_sqrt[i] * inv_sqrt[j];
        return 0.0;
    }

    /// out = A_hat * in, row-major (size() x dim).
    void apply(const Mat& in, Mat& out) const {
        std::size_t dim = in.cols;
        out.rows = in.rows;
        out.cols = dim;
        out.a.assign(in.a.size(), 0.0);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            double w = inv_sqrt[i] * inv_sqrt[i];
            const double* src = in.row(i);
            double* dst = out.row(i);
            for (std::size_t c = 0; c < dim; ++c) dst[c] = w * src[c];
        }
        for (auto [i, j] : edges) {
            double w = inv_sqrt[i] * inv_sqrt[j];
            const double* ri = in.row(i);
            const double* rj = in.row(j);
            double* oi = out.row(i);
            double* oj = out.row(j);
            for (std::size_t c = 0; c < dim; ++c) {
                oi[c] += w * rj[c];
                oj[c] += w * ri[c];
            }
        }
    }

    Mat apply(const Mat& in) const {
        Mat out;
        apply(in, out);
        return out;
    }
};

/// Build the normalized operator from an explicit undirected edge list over
/// `nodes` (each edge once, endpoints in any order).
inline NormalizedAdjacency normalized_from(const NodeSet& nodes,
                                           const std::vector<std::pair<NodeId, NodeId>>& edges) {
    NormalizedAdjacency na;
    na.nodes = nodes.ids();
    na.inv_sqrt.resize(na.nodes.size());
    na.edges.reserve(edges.size());
    std::vector<std::size_t> deg(na.nodes.size(), 0);
    for (auto [u, v] : edges) {
        auto i = static_cast<std::uint32_t>(nodes.index_of(u));
        auto j = static_cast<std::uint32_t>(nodes.index_of(v));
        na.edges.emplace_back(i, j);
        ++deg[i];
        ++deg[j];
    }
    for (std::size_t i = 0; i < na.nodes.size(); ++i)
        na.inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(deg[i]) + 1.0);
    return na;
}

inline NormalizedAdjacency normalize_adjacency(const SubgraphView& view) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    view.for_each_edge([&](NodeId u, NodeId v) { edges.emplace_back(u, v); });
    return normalized_from(view.active(), edges);
}

// ---------------------------------------------------------------------------
// ModelParams and Predictions.
// ---------------------------------------------------------------------------

struct ModelParams {
    std::string conv = "sgc";                 // "sgc" | "gcn"
    std::size_t k_hops = 2;
    std::vector<std::size_t> layer_dims;      // [d_in, hidden..., n_classes]
    std::vector<std::vector<float>> weights;  // layer l: (dims[l+1] x dims[l]) row-major
    std::vector<std::vector<float>> biases;   // layer l: dims[l+1]

    std::size_t n_layers() const { return weights.size(); }
    std::size_t in_dim() const { return layer_dims.front(); }
    std::size_t n_classes() const { return layer_dims.back(); }

    void validate() const {
        if (conv != "sgc" && conv != "gcn") throw DataError("model: conv must be sgc or gcn");
        if (k_hops < 1) throw DataError("model: k_hops must be >= 1");
        if (layer_dims.size() < 2) throw DataError("model: need at least input and output dims");
        if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size())
            throw DataError("model: layer count mismatch");
        for (std::size_t l = 0; l < weights.size(); ++l) {
            if (weights[l].size() != layer_dims[l + 1] * layer_dims[l])
                throw DataError("model: weight shape mismatch at layer " + std::to_string(l));
            if (biases[l].size() != layer_dims[l + 1])
                throw DataError("model: bias shape mismatch at layer " + std::to_string(l));
        }
    }
};

struct Predictions {
    NodeSet nodes;
    Mat probs;  // rows aligned with nodes, cols = n_classes

    std::size_t n_classes() const { return probs.cols; }
    bool has(NodeId v) const { return nodes.contains(v); }
    const double* row(NodeId v) const {
        if (!nodes.contains(v)) throw DataError("predictions: node not covered: " + std::to_string(v));
        return probs.row(nodes.index_of(v));
    }
};

namespace detail {

inline void softmax_row(double* p, std::size_t n) {
    double m = p[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, p[i]);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = std::exp(p[i] - m);
        s += p[i];
    }
    for (std::size_t i = 0; i < n; ++i) p[i] /= s;
}

/// y = W x + b for one layer, double math over f32 parameters.
inline void linear(const std::vector<float>& W, const std::vector<float>& b, std::size_t out_dim,
                   std::size_t in_dim, const double* x, double* y) {
    for (std::size_t o = 0; o < out_dim; ++o) {
        double s = static_cast<double>(b[o]);
        const float* w = W.data() + o * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) s += static_cast<double>(w[i]) * x[i];
        y[o] = s;
    }
}

inline Mat gather_features(const Graph& g, const NodeSet& nodes) {
    Mat x(nodes.size(), g.feature_dim());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const float* row = g.features_row(nodes[i]);
        for (std::size_t c = 0; c < g.feature_dim(); ++c) x(i, c) = static_cast<double>(row[c]);
    }
    return x;
}

}  // namespace detail

/// Class probabilities of the plain MLP on one raw feature vector (the
/// structure-free model: what the classifier outputs on an edgeless view).
inline std::vector<double> mlp_probabilities(const ModelParams& p, const double* x) {
    std::vector<double> cur(x, x + p.in_dim());
    std::vector<double> next;
    for (std::size_t l = 0; l < p.n_layers(); ++l) {
        next.assign(p.layer_dims[l + 1], 0.0);
        detail::linear(p.weights[l], p.biases[l], p.layer_dims[l + 1], p.layer_dims[l], cur.data(),
                       next.data());
        if (l + 1 < p.n_layers())
            for (double& v : next) v = std::max(0.0, v);
        cur = next;
    }
    detail::softmax_row(cur.data(), cur.size());
    return cur;
}

/// Aggregated representations A_hat^k X for `active`, given a prebuilt
/// operator over the same node list; rows aligned with active.
inline Mat aggregate_given(const Graph& g, const NodeSet& active, const NormalizedAdjacency& na,
                           std::size_t k) {
    Mat x = detail::gather_features(g, active);
    Mat tmp;
    for (std::size_t s = 0; s < k; ++s) {
        na.apply(x, tmp);
        std::swap(x, tmp);
    }
    return x;
}

/// Aggregated representations A_hat^k X over a view (used by the distance
/// features); rows aligned with view.active().
inline Mat aggregate_features(const SubgraphView& view, std::size_t k) {
    return aggregate_given(view.base(), view.active(), normalize_adjacency(view), k);
}

/// Forward pass of the fixed classifier given a prebuilt operator.
inline Predictions forward_given(const ModelParams& p, const Graph& g, const NodeSet& active,
                                 const NormalizedAdjacency& na) {
    p.validate();
    if (g.feature_dim() != p.in_dim())
        throw DataError("forward: feature dim does not match model input dim");
    Mat h = detail::gather_features(g, active);
    Mat tmp;
    std::size_t m = h.rows;

    if (p.conv == "sgc") {
        for (std::size_t s = 0; s < p.k_hops; ++s) {
            na.apply(h, tmp);
            std::swap(h, tmp);
        }
        Mat out(m, p.n_classes());
        std::vector<double> buf;
        for (std::size_t r = 0; r < m; ++r) {
            std::vector<double> cur(h.row(r), h.row(r) + h.cols);
            for (std::size_t l = 0; l < p.n_layers(); ++l) {
                buf.assign(p.layer_dims[l + 1], 0.0);
                detail::linear(p.weights[l], p.biases[l], p.layer_dims[l + 1], p.layer_dims[l],
                               cur.data(), buf.data());
                if (l + 1 < p.n_layers())
                    for (double& v : buf) v = std::max(0.0, v);
                cur = buf;
            }
            for (std::size_t c = 0; c < p.n_classes(); ++c) out(r, c) = cur[c];
        }
        h = std::move(out);
    } else {
        std::size_t props = std::min(p.k_hops, p.n_layers());
        for (std::size_t l = 0; l < p.n_layers(); ++l) {
            Mat pre(m, p.layer_dims[l + 1]);
            for (std::size_t r = 0; r < m; ++r)
                detail::linear(p.weights[l], p.biases[l], p.layer_dims[l + 1], p.layer_dims[l],
                               h.row(r), pre.row(r));
            if (l < props) {
                na.apply(pre, tmp);
                std::swap(pre, tmp);
            }
            if (l + 1 < p.n_layers())
                for (double& v : pre.a) v = std::max(0.0, v);
            h = std::move(pre);
        }
    }

    for (std::size_t r = 0; r < m; ++r) detail::softmax_row(h.row(r), h.cols);
    for (double v : h.a)
        if (!std::isfinite(v)) throw NumericError("forward: non-finite prediction");
    Predictions pred;
    pred.nodes = active;
    pred.probs = std::move(h);
    return pred;
}

/// Forward pass of the fixed classifier on a subgraph view.
inline Predictions forward(const ModelParams& p, const SubgraphView& view) {
    return forward_given(p, view.base(), view.active(), normalize_adjacency(view));
}

// ---------------------------------------------------------------------------
// Label propagation: P <- alpha * A_hat * P + (1 - alpha) * P0 for `iters`
// steps, then rows renormalized to sum one. init rows must align with the
// view's active list.
// ---------------------------------------------------------------------------

inline Mat label_propagation_given(const NormalizedAdjacency& na, const Mat& init, double alpha,
                                   std::size_t iters) {
    if (init.rows != na.size()) throw DataError("label_propagation: init row count mismatch");
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("label_propagation: alpha must be in [0, 1]");
    Mat p = init;
    Mat tmp;
    for (std::size_t s = 0; s < iters; ++s) {
        na.apply(p, tmp);
        for (std::size_t i = 0; i < p.a.size(); ++i) p.a[i] = alpha * tmp.a[i] + (1.0 - alpha) * init.a[i];
    }
    for (std::size_t r = 0; r < p.rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < p.cols; ++c) s += p(r, c);
        if (s <= 0.0) throw NumericError("label_propagation: non-positive row sum");
        for (std::size_t c = 0; c < p.cols; ++c) p(r, c) /= s;
    }
    return p;
}

inline Predictions label_propagation(const SubgraphView& view, const Mat& init, double alpha,
                                     std::size_t iters) {
    if (init.rows != view.n_active()) throw DataError("label_propagation: init row count mismatch");
    Predictions out;
    out.nodes = view.active();
    out.probs = label_propagation_given(normalize_adjacency(view), init, alpha, iters);
    return out;
}

/// Argmax class with ties resolved to the lowest class index.
inline std::size_t argmax_class(const double* p, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < n; ++c)
        if (p[c] > p[best]) best = c;
    return best;
}

/// Fraction of `nodes` whose argmax prediction equals their label.
inline double accuracy(const Predictions& pred, const Graph& g, const NodeSet& nodes) {
    if (nodes.empty()) throw DataError("accuracy: empty evaluation set");
    std::size_t correct = 0;
    for (NodeId v : nodes) {
        if (!g.has_label(v)) throw DataError("accuracy: node has no label: " + std::to_string(v));
        const double* row = pred.row(v);
        if (static_cast<std::size_t>(g.label(v)) ==
            argmax_class(row, pred.n_classes()))
            ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

// ---------------------------------------------------------------------------
// Training. The classifier trains as a plain MLP on raw features of labeled
// training nodes (mini-batch gradient descent, cross-entropy, ReLU); the
// transductive toggle instead trains with propagation active on the training
// universe. Deterministic given the seed: fixed init, fixed shuffles, fixed
// update order.
// ---------------------------------------------------------------------------

struct TrainHyper {
    std::string conv = "sgc";
    std::size_t k_hops = 2;
    std::vector<std::size_t> hidden_dims = {16};
    std::size_t epochs = 100;
    double learning_rate = 0.1;
    std::size_t batch_size = 32;  // 0 = full batch
    std::uint64_t seed = 0;
    bool transductive = false;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss, double train_acc)>;

namespace detail {

struct DenseLayers {
    std::vector<Mat> w;  // (out x in)
    std::vector<std::vector<double>> b;
};

inline DenseLayers init_layers(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    Rng rng(mix_seed(seed, "init"));
    DenseLayers L;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        double limit = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
        Mat w(dims[l + 1], dims[l]);
        for (double& x : w.a) x = static_cast<double>(static_cast<float>(limit * (2.0 * rng.uniform() - 1.0)));
        L.w.push_back(std::move(w));
        L.b.emplace_back(dims[l + 1], 0.0);
    }
    return L;
}

inline ModelParams to_params(const DenseLayers& L, const std::vector<std::size_t>& dims,
                             const std::string& conv, std::size_t k_hops) {
    ModelParams p;
    p.conv = conv;
    p.k_hops = k_hops;
    p.layer_dims = dims;
    for (std::size_t l = 0; l < L.w.size(); ++l) {
        std::vector<float> w(L.w[l].a.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<float>(L.w[l].a[i]);
        std::vector<float> b(L.b[l].size());
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<float>(L.b[l][i]);
        p.weights.push_back(std::move(w));
        p.biases.push_back(std::move(b));
    }
    return p;
}

}  // namespace detail

/// Train the classifier. Uses raw features of train_labeled nodes; in
/// transductive mode the forward pass during training propagates over the
/// whole graph (sgc: pre-propagated features; gcn: backprop through A_hat).
inline ModelParams train_mlp(const Graph& g, const TrainHyper& hp, const EpochCallback& on_epoch = {}) {
    const NodeSet& labeled = g.splits().train_labeled;
    if (labeled.empty()) throw DataError("train: no labeled training nodes");
    if (g.n_classes() < 2) throw DataError("train: need at least two classes");
    if (hp.conv != "sgc" && hp.conv != "gcn") throw ConfigError("train: conv must be sgc or gcn");
    if (hp.k_hops < 1) throw ConfigError("train: k_hops must be >= 1");
    if (hp.learning_rate <= 0.0) throw ConfigError("train: learning_rate must be positive");

    std::vector<std::size_t> dims;
    dims.push_back(g.feature_dim());
    for (std::size_t h : hp.hidden_dims) {
        if (h == 0) throw ConfigError("train: hidden dim must be positive");
        dims.push_back(h);
    }
    dims.push_back(g.n_classes());

    detail::DenseLayers L = detail::init_layers(dims, hp.seed);
    std::size_t n_layers = L.w.size();

    // Transductive gcn propagates inside the network; everything else trains
    // on a fixed design matrix (raw rows, or pre-propagated rows for sgc).
    bool graph_in_loop = hp.transductive && hp.conv == "gcn";

    SubgraphView universe = full_view(g);
    NormalizedAdjacency na;
    Mat X;                          // design matrix
    std::vector<std::int32_t> y;    // labels aligned with X rows (-1 = no loss)
    std::vector<std::size_t> loss_rows;

    if (graph_in_loop) {
        na = normalize_adjacency(universe);
        X = detail::gather_features(g, universe.active());
        y.assign(X.rows, -1);
        for (NodeId v : labeled) {
            std::size_t r = universe.active().index_of(v);
            y[r] = g.label(v);
            loss_rows.push_back(r);
        }
    } else if (hp.transductive) {
        Mat Z = aggregate_features(universe, hp.k_hops);
        X = Mat(labeled.size(), g.feature_dim());
        for (std::size_t i = 0; i < labeled.size(); ++i) {
            std::size_t r = universe.active().index_of(labeled[i]);
            for (std::size_t c = 0; c < X.cols; ++c) X(i, c) = Z(r, c);
        }
        for (NodeId v : labeled) y.push_back(g.label(v));
        for (std::size_t i = 0; i < labeled.size(); ++i) loss_rows.push_back(i);
    } else {
        X = detail::gather_features(g, labeled);
        for (NodeId v : labeled) y.push_back(g.label(v));
        for (std::size_t i = 0; i < labeled.size(); ++i) loss_rows.push_back(i);
    }

    std::size_t props = graph_in_loop ? std::min(hp.k_hops, n_layers) : 0;
    std::size_t batch = hp.batch_size == 0 ? loss_rows.size() : hp.batch_size;
    Rng shuffle_rng(mix_seed(hp.seed, "batches"));

    auto forward_dense = [&](std::vector<Mat>& hs, std::vector<Mat>& pres) {
        // hs[l] = input to layer l; pres[l] = pre-activation (post-propagation).
        hs.assign(1, X);
        pres.assign(n_layers, Mat());
        for (std::size_t l = 0; l < n_layers; ++l) {
            const Mat& h = hs[l];
            Mat pre(h.rows, dims[l + 1]);
            for (std::size_t r = 0; r < h.rows; ++r) {
                for (std::size_t o = 0; o < dims[l + 1]; ++o) {
                    double s = L.b[l][o];
                    const double* w = L.w[l].row(o);
                    const double* x = h.row(r);
                    for (std::size_t i = 0; i < dims[l]; ++i) s += w[i] * x[i];
                    pre(r, o) = s;
                }
            }
            if (l < props) pre = na.apply(pre);
            pres[l] = pre;
            if (l + 1 < n_layers) {
                for (double& v : pre.a) v = std::max(0.0, v);
            }
            hs.push_back(std::move(pre));
        }
    };

    std::vector<Mat> hs, pres;
    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        std::vector<std::size_t> order = loss_rows;
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            std::size_t stop = std::min(order.size(), start + batch);
            forward_dense(hs, pres);
            const Mat& logits = hs.back();
            double inv_b = 1.0 / static_cast<double>(stop - start);

            Mat dH(logits.rows, logits.cols);
            for (std::size_t bi = start; bi < stop; ++bi) {
                std::size_t r = order[bi];
                std::vector<double> p(logits.row(r), logits.row(r) + logits.cols);
                detail::softmax_row(p.data(), p.size());
                double py = p[static_cast<std::size_t>(y[r])];
                epoch_loss += -std::log(std::max(py, 1e-300));
                for (std::size_t c = 0; c < p.size(); ++c)
                    dH(r, c) = (p[c] - (c == static_cast<std::size_t>(y[r]) ? 1.0 : 0.0)) * inv_b;
            }

            for (std::size_t l = n_layers; l-- > 0;) {
                Mat dPre = std::move(dH);
                if (l + 1 < n_layers)
                    for (std::size_t i = 0; i < dPre.a.size(); ++i)
                        if (pres[l].a[i] <= 0.0) dPre.a[i] = 0.0;
                if (l < props) dPre = na.apply(dPre);  // A_hat is symmetric
                const Mat& h = hs[l];
                Mat dW(dims[l + 1], dims[l]);
                std::vector<double> db(dims[l + 1], 0.0);
                dH = Mat(h.rows, dims[l]);
                for (std::size_t r = 0; r < h.rows; ++r) {
                    const double* dp = dPre.row(r);
                    for (std::size_t o = 0; o < dims[l + 1]; ++o) {
                        double d = dp[o];
                        if (d == 0.0) continue;
                        db[o] += d;
                        double* dwrow = dW.row(o);
                        const double* hrow = h.row(r);
                        double* dhrow = dH.row(r);
                        const double* wrow = L.w[l].row(o);
                        for (std::size_t i = 0; i < dims[l]; ++i) {
                            dwrow[i] += d * hrow[i];
                            dhrow[i] += d * wrow[i];
                        }
                    }
                }
                for (std::size_t i = 0; i < L.w[l].a.size(); ++i) L.w[l].a[i] -= hp.learning_rate * dW.a[i];
                for (std::size_t o = 0; o < dims[l + 1]; ++o) L.b[l][o] -= hp.learning_rate * db[o];
            }
        }
        if (!std::isfinite(epoch_loss)) throw NumericError("train: loss diverged");
        if (on_epoch) {
            forward_dense(hs, pres);
            const Mat& logits = hs.back();
            std::size_t correct = 0;
            for (std::size_t r : loss_rows)
                if (argmax_class(logits.row(r), logits.cols) == static_cast<std::size_t>(y[r])) ++correct;
            on_epoch(epoch, epoch_loss / static_cast<double>(order.size()),
                     static_cast<double>(correct) / static_cast<double>(loss_rows.size()));
        }
    }
    return detail::to_params(L, dims, hp.conv, hp.k_hops);
}

// ---------------------------------------------------------------------------
// Model file.
// ---------------------------------------------------------------------------

inline void save_model(const std::string& path, const ModelParams& p) {
    p.validate();
    nlohmann::json j;
    j["conv"] = p.conv;
    j["k_hops"] = p.k_hops;
    j["layer_dims"] = p.layer_dims;
    j["encoding"] = "base64-f32-le";
    nlohmann::json w = nlohmann::json::array();
    nlohmann::json b = nlohmann::json::array();
    for (std::size_t l = 0; l < p.n_layers(); ++l) {
        w.push_back(encode_f32_le(p.weights[l]));
        b.push_back(encode_f32_le(p.biases[l]));
    }
    j["weights"] = w;
    j["biases"] = b;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file: " + path);
    out << j.dump(2) << "\n";
}

inline ModelParams load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    ModelParams p;
    try {
        p.conv = j.at("conv").get<std::string>();
        p.k_hops = j.at("k_hops").get<std::size_t>();
        p.layer_dims = j.at("layer_dims").get<std::vector<std::size_t>>();
        if (j.contains("encoding") && j["encoding"] != "base64-f32-le")
            throw DataError(path + ": unsupported weight encoding");
        for (auto& s : j.at("weights")) p.weights.push_back(decode_f32_le(s.get<std::string>()));
        for (auto& s : j.at("biases")) p.biases.push_back(decode_f32_le(s.get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": bad model file: " + e.what());
    }
    p.validate();
    return p;
}

}  // namespace graphval
