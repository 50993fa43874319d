// config.hpp - run configuration: one JSON file, schema-validated up front
// (unknown keys are rejected), plus dotted --set key=value overrides applied
// before validation. Every command reads the same structure and ignores the
// parts it does not need.
#pragma once

#include <set>

#include "graphval/fitters.hpp"
#include "graphval/synth.hpp"

namespace graphval {

enum class Mode { Inductive, Transductive };

struct RunConfig {
    std::string data_dir;
    std::string out_dir;
    Mode mode = Mode::Inductive;
    std::string conv = "sgc";
    std::size_t k_hops = 2;
    std::vector<std::size_t> hidden_dims = {16};
    std::size_t epochs = 100;
    double learning_rate = 0.1;
    std::size_t batch_size = 32;
    std::size_t m_val = 50;
    std::size_t m_test = 5;
    std::vector<double> lambda_grid = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
    std::size_t folds = 5;
    std::vector<std::string> features;  // empty = all nine
    EntropySign entropy_sign = EntropySign::negative;
    ClasswiseAgg classwise_agg = ClasswiseAgg::min;
    std::vector<std::string> methods = {"sgul-shapley", "sgul-accuracy", "atc-mc",   "atc-ne",
                                        "doc",          "max-conf",      "class-conf", "random"};
    std::uint64_t seed = 0;
    std::size_t val_batch_size = 0;   // 0 = one joint validation game
    std::size_t test_batch_size = 0;  // 0 = one joint test game
    bool per_target = false;
    double lp_alpha = 0.9;
    std::size_t lp_iters = 10;
    std::size_t m_oracle = 2000;
    std::size_t oracle_cap = 0;  // 0 = default 8-player limit
    std::size_t n_seeds = 10;    // compare mode: seeds seed..seed+n_seeds-1
    SynthConfig synth;

    std::vector<std::size_t> active_feature_indices() const {
        std::vector<std::size_t> idx;
        for (const auto& name : features) idx.push_back(feature_index(name));
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        return idx;
    }

    FeatureConfig feature_config() const {
        FeatureConfig fc;
        fc.entropy_sign = entropy_sign;
        fc.classwise_agg = classwise_agg;
        fc.lp_alpha = lp_alpha;
        fc.lp_iters = lp_iters;
        return fc;
    }
};

namespace detail {

inline const std::set<std::string>& top_level_keys() {
    static const std::set<std::string> keys = {
        "data_dir",   "out_dir",        "mode",       "conv",         "k_hops",
        "hidden_dims", "epochs",        "learning_rate", "batch_size", "m_val",
        "m_test",     "lambda_grid",    "folds",      "features",     "entropy_sign",
        "classwise_agg", "methods",     "method",     "seed",         "val_batch_size",
        "test_batch_size", "per_target", "lp_alpha",  "lp_iters",     "m_oracle",
        "oracle_cap", "n_seeds",        "synth"};
    return keys;
}

inline const std::set<std::string>& synth_keys() {
    static const std::set<std::string> keys = {
        "n_train", "n_val",      "n_test",           "classes",     "dim",  "p_in",
        "p_out",   "sigma",      "noise_frac",       "val_labeled_frac",
        "target_frac"};
    return keys;
}

template <typename T>
T get_as(const nlohmann::json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: bad value for key '" + key + "'");
    }
}

inline std::size_t get_count(const nlohmann::json& j, const std::string& key) {
    if (!j.at(key).is_number_integer() || j.at(key).get<double>() < 0)
        throw ConfigError("config: '" + key + "' must be a non-negative integer");
    return j.at(key).get<std::size_t>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!detail::top_level_keys().count(it.key()))
            throw ConfigError("config: unknown key '" + it.key() + "'");
    if (j.contains("synth")) {
        if (!j["synth"].is_object()) throw ConfigError("config: 'synth' must be an object");
        for (auto it = j["synth"].begin(); it != j["synth"].end(); ++it)
            if (!detail::synth_keys().count(it.key()))
                throw ConfigError("config: unknown key 'synth." + it.key() + "'");
    }

    RunConfig c;
    if (j.contains("data_dir")) c.data_dir = detail::get_as<std::string>(j, "data_dir");
    if (j.contains("out_dir")) c.out_dir = detail::get_as<std::string>(j, "out_dir");
    if (j.contains("mode")) {
        auto m = detail::get_as<std::string>(j, "mode");
        if (m == "inductive")
            c.mode = Mode::Inductive;
        else if (m == "transductive")
            c.mode = Mode::Transductive;
        else
            throw ConfigError("config: mode must be 'inductive' or 'transductive'");
    }
    if (j.contains("conv")) {
        c.conv = detail::get_as<std::string>(j, "conv");
        if (c.conv != "sgc" && c.conv != "gcn")
            throw ConfigError("config: conv must be 'sgc' or 'gcn'");
    }
    if (j.contains("k_hops")) {
        c.k_hops = detail::get_count(j, "k_hops");
        if (c.k_hops == 0) throw ConfigError("config: k_hops must be >= 1");
    }
    if (j.contains("hidden_dims"))
        c.hidden_dims = detail::get_as<std::vector<std::size_t>>(j, "hidden_dims");
    if (j.contains("epochs")) c.epochs = detail::get_count(j, "epochs");
    if (j.contains("learning_rate")) {
        c.learning_rate = detail::get_as<double>(j, "learning_rate");
        if (!(c.learning_rate > 0.0)) throw ConfigError("config: learning_rate must be > 0");
    }
    if (j.contains("batch_size")) c.batch_size = detail::get_count(j, "batch_size");
    if (j.contains("m_val")) {
        c.m_val = detail::get_count(j, "m_val");
        if (c.m_val == 0) throw ConfigError("config: m_val must be >= 1");
    }
    if (j.contains("m_test")) {
        c.m_test = detail::get_count(j, "m_test");
        if (c.m_test == 0) throw ConfigError("config: m_test must be >= 1");
    }
    if (j.contains("lambda_grid")) {
        c.lambda_grid = detail::get_as<std::vector<double>>(j, "lambda_grid");
        if (c.lambda_grid.empty()) throw ConfigError("config: lambda_grid must be non-empty");
        for (double l : c.lambda_grid)
            if (!(l >= 0.0)) throw ConfigError("config: lambda values must be >= 0");
        std::sort(c.lambda_grid.begin(), c.lambda_grid.end());
    }
    if (j.contains("folds")) {
        c.folds = detail::get_count(j, "folds");
        if (c.folds < 2) throw ConfigError("config: folds must be >= 2");
    }
    if (j.contains("features")) {
        c.features = detail::get_as<std::vector<std::string>>(j, "features");
        for (const auto& f : c.features) feature_index(f);  // throws on unknown
    }
    if (j.contains("entropy_sign")) {
        auto v = detail::get_as<std::string>(j, "entropy_sign");
        if (v == "negative")
            c.entropy_sign = EntropySign::negative;
        else if (v == "positive")
            c.entropy_sign = EntropySign::positive;
        else
            throw ConfigError("config: entropy_sign must be 'negative' or 'positive'");
    }
    if (j.contains("classwise_agg")) {
        auto v = detail::get_as<std::string>(j, "classwise_agg");
        if (v == "min")
            c.classwise_agg = ClasswiseAgg::min;
        else if (v == "max")
            c.classwise_agg = ClasswiseAgg::max;
        else
            throw ConfigError("config: classwise_agg must be 'min' or 'max'");
    }
    if (j.contains("method") && j.contains("methods"))
        throw ConfigError("config: give either 'method' or 'methods', not both");
    if (j.contains("method")) c.methods = {detail::get_as<std::string>(j, "method")};
    if (j.contains("methods")) c.methods = detail::get_as<std::vector<std::string>>(j, "methods");
    for (const auto& m : c.methods)
        if (m != "sgul-shapley" && m != "sgul-accuracy") baseline_from_name(m);  // throws on unknown
    if (j.contains("seed")) c.seed = detail::get_as<std::uint64_t>(j, "seed");
    if (j.contains("val_batch_size")) c.val_batch_size = detail::get_count(j, "val_batch_size");
    if (j.contains("test_batch_size")) c.test_batch_size = detail::get_count(j, "test_batch_size");
    if (j.contains("per_target")) c.per_target = detail::get_as<bool>(j, "per_target");
    if (j.contains("lp_alpha")) {
        c.lp_alpha = detail::get_as<double>(j, "lp_alpha");
        if (!(c.lp_alpha >= 0.0 && c.lp_alpha <= 1.0))
            throw ConfigError("config: lp_alpha must lie in [0,1]");
    }
    if (j.contains("lp_iters")) c.lp_iters = detail::get_count(j, "lp_iters");
    if (j.contains("m_oracle")) {
        c.m_oracle = detail::get_count(j, "m_oracle");
        if (c.m_oracle == 0) throw ConfigError("config: m_oracle must be >= 1");
    }
    if (j.contains("oracle_cap")) c.oracle_cap = detail::get_count(j, "oracle_cap");
    if (j.contains("n_seeds")) {
        c.n_seeds = detail::get_count(j, "n_seeds");
        if (c.n_seeds == 0) throw ConfigError("config: n_seeds must be >= 1");
    }

    if (j.contains("synth")) {
        const auto& s = j["synth"];
        if (s.contains("n_train")) c.synth.n_train = detail::get_count(s, "n_train");
        if (s.contains("n_val")) c.synth.n_val = detail::get_count(s, "n_val");
        if (s.contains("n_test")) c.synth.n_test = detail::get_count(s, "n_test");
        if (s.contains("classes")) c.synth.classes = detail::get_count(s, "classes");
        if (s.contains("dim")) c.synth.dim = detail::get_count(s, "dim");
        if (s.contains("p_in")) c.synth.p_in = detail::get_as<double>(s, "p_in");
        if (s.contains("p_out")) c.synth.p_out = detail::get_as<double>(s, "p_out");
        if (s.contains("sigma")) c.synth.sigma = detail::get_as<double>(s, "sigma");
        if (s.contains("noise_frac")) c.synth.noise_frac = detail::get_as<double>(s, "noise_frac");
        if (s.contains("val_labeled_frac"))
            c.synth.val_labeled_frac = detail::get_as<double>(s, "val_labeled_frac");
        if (s.contains("target_frac")) c.synth.target_frac = detail::get_as<double>(s, "target_frac");
        c.synth.validate();
    }
    c.synth.transductive = c.mode == Mode::Transductive;
    c.synth.seed = c.seed;
    return c;
}

/// Apply one `--set key=value` override onto the raw JSON. Dotted keys walk
/// into nested objects; values are parsed as JSON when possible, otherwise
/// taken as strings.
inline void apply_override(nlohmann::json& j, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    std::string key = assignment.substr(0, eq);
    std::string raw = assignment.substr(eq + 1);

    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;  // plain string

    nlohmann::json* cur = &j;
    std::size_t start = 0;
    while (true) {
        auto dot = key.find('.', start);
        std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("--set: empty key segment in '" + key + "'");
        if (dot == std::string::npos) {
            (*cur)[part] = value;
            break;
        }
        if (!cur->contains(part)) (*cur)[part] = nlohmann::json::object();
        cur = &(*cur)[part];
        if (!cur->is_object()) throw ConfigError("--set: '" + part + "' is not an object");
        start = dot + 1;
    }
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    nlohmann::json j = nlohmann::json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file: " + path);
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
        }
    }
    for (const auto& o : overrides) apply_override(j, o);
    return parse_config(j);
}

}  // namespace graphval
