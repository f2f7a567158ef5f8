#include "pcopt/config.hpp"

#include "pcopt/error.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace pcopt {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw Error(Errc::config_error, where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw Error(Errc::config_error, "unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        const auto& v = obj.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw Error(Errc::config_error, "");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0)) throw Error(Errc::config_error, "");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw Error(Errc::config_error, "");
        } else {
            if (!v.is_string()) throw Error(Errc::config_error, "");
        }
        out = v.get<T>();
    } catch (const std::exception&) {
        throw Error(Errc::config_error, "bad value for '" + std::string(key) + "' in " + where);
    }
}

Eigen::VectorXd read_bound(const json& v, Eigen::Index n, const std::string& what) {
    if (v.is_number()) return Eigen::VectorXd::Constant(n, v.get<double>());
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n) {
        throw Error(Errc::config_error, what + " must be a number or an array of " + std::to_string(n) + " numbers");
    }
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!v[static_cast<std::size_t>(i)].is_number()) throw Error(Errc::config_error, what + " entries must be numbers");
        out[i] = v[static_cast<std::size_t>(i)].get<double>();
    }
    return out;
}

BetaPolicy parse_beta_policy(const std::string& s) {
    if (s == "cross-validate") return BetaPolicy::cross_validate;
    if (s == "geometric") return BetaPolicy::geometric;
    if (s == "fixed") return BetaPolicy::fixed;
    throw Error(Errc::config_error, "unknown beta_policy kind '" + s + "'");
}

ModelPolicy parse_model_policy(const std::string& s) {
    if (s == "single-gaussian") return ModelPolicy::single_gaussian;
    if (s == "fixed-M") return ModelPolicy::fixed_m;
    if (s == "cv-model-select") return ModelPolicy::cv_model_select;
    if (s == "stacking") return ModelPolicy::stacking;
    throw Error(Errc::config_error, "unknown model_policy kind '" + s + "'");
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::config_error, std::string("malformed JSON: ") + e.what());
    }
    reject_unknown(root,
                   {"objective", "search_box", "initial_samples", "samples_per_iteration", "iterations",
                    "max_evaluations", "initial_beta", "beta_policy", "model_policy", "bagging", "fold_count", "em",
                    "diagnostic_sample_count", "fresh_samples_only", "threads", "seed"},
                   "config");
    RunConfig cfg;
    if (root.contains("objective")) {
        const auto& o = root["objective"];
        if (o.is_string()) {
            cfg.objective = o.get<std::string>();
        } else {
            reject_unknown(o, {"name", "noise_stddev", "classical_woods"}, "objective");
            read(o, "name", cfg.objective, "objective");
            if (o.contains("noise_stddev")) {
                double noise = 0.0;
                read(o, "noise_stddev", noise, "objective");
                cfg.noise_stddev = noise;
            }
            read(o, "classical_woods", cfg.classical_woods, "objective");
        }
    }
    read(root, "initial_samples", cfg.initial_samples, "config");
    read(root, "samples_per_iteration", cfg.samples_per_iteration, "config");
    read(root, "iterations", cfg.iterations, "config");
    read(root, "max_evaluations", cfg.max_evaluations, "config");
    read(root, "initial_beta", cfg.initial_beta, "config");
    read(root, "bagging", cfg.bagging, "config");
    read(root, "fold_count", cfg.fold_count, "config");
    read(root, "diagnostic_sample_count", cfg.diagnostic_sample_count, "config");
    read(root, "fresh_samples_only", cfg.fresh_samples_only, "config");
    read(root, "threads", cfg.threads, "config");
    read(root, "seed", cfg.seed, "config");

    if (root.contains("beta_policy")) {
        const auto& b = root["beta_policy"];
        reject_unknown(b, {"kind", "k_beta", "k1", "k2", "grid_count"}, "beta_policy");
        std::string kind = to_string(cfg.beta_policy);
        read(b, "kind", kind, "beta_policy");
        cfg.beta_policy = parse_beta_policy(kind);
        read(b, "k_beta", cfg.k_beta, "beta_policy");
        read(b, "k1", cfg.beta_grid.k1, "beta_policy");
        read(b, "k2", cfg.beta_grid.k2, "beta_policy");
        read(b, "grid_count", cfg.beta_grid.count, "beta_policy");
    }
    if (root.contains("model_policy")) {
        const auto& m = root["model_policy"];
        reject_unknown(m, {"kind", "components", "max_components"}, "model_policy");
        std::string kind = to_string(cfg.model_policy);
        read(m, "kind", kind, "model_policy");
        cfg.model_policy = parse_model_policy(kind);
        read(m, "components", cfg.components, "model_policy");
        read(m, "max_components", cfg.max_components, "model_policy");
    }
    if (root.contains("em")) {
        const auto& e = root["em"];
        reject_unknown(e, {"max_iterations", "nll_tolerance", "restarts", "covariance_floor", "relative_covariance_floor"}, "em");
        read(e, "max_iterations", cfg.em.max_iterations, "em");
        read(e, "nll_tolerance", cfg.em.nll_tolerance, "em");
        read(e, "restarts", cfg.em.restarts, "em");
        read(e, "covariance_floor", cfg.em.covariance_floor, "em");
        read(e, "relative_covariance_floor", cfg.em.relative_covariance_floor, "em");
    }
    if (root.contains("search_box")) {
        const auto& b = root["search_box"];
        reject_unknown(b, {"lower", "upper"}, "search_box");
        if (!b.contains("lower") || !b.contains("upper")) throw Error(Errc::config_error, "search_box needs lower and upper");
        const auto n = static_cast<Eigen::Index>(cfg.objective_spec().dimension);
        cfg.search_box = Box{read_bound(b["lower"], n, "search_box.lower"), read_bound(b["upper"], n, "search_box.upper")};
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const RunConfig& cfg, int indent) {
    json root;
    root["objective"] = {{"name", cfg.objective},
                         {"noise_stddev", cfg.objective_spec().noise_stddev},
                         {"classical_woods", cfg.classical_woods}};
    const auto box = cfg.box();
    root["search_box"] = {{"lower", vector_json(box.lower)}, {"upper", vector_json(box.upper)}};
    root["initial_samples"] = cfg.initial_samples;
    root["samples_per_iteration"] = cfg.samples_per_iteration;
    root["iterations"] = cfg.iterations;
    root["max_evaluations"] = cfg.max_evaluations;
    root["initial_beta"] = cfg.initial_beta;
    root["beta_policy"] = {{"kind", to_string(cfg.beta_policy)},
                           {"k_beta", cfg.k_beta},
                           {"k1", cfg.beta_grid.k1},
                           {"k2", cfg.beta_grid.k2},
                           {"grid_count", cfg.beta_grid.count}};
    root["model_policy"] = {{"kind", to_string(cfg.model_policy)},
                            {"components", cfg.components},
                            {"max_components", cfg.max_components}};
    root["bagging"] = cfg.bagging;
    root["fold_count"] = cfg.fold_count;
    root["em"] = {{"max_iterations", cfg.em.max_iterations},
                  {"nll_tolerance", cfg.em.nll_tolerance},
                  {"restarts", cfg.em.restarts},
                  {"covariance_floor", cfg.em.covariance_floor},
                  {"relative_covariance_floor", cfg.em.relative_covariance_floor}};
    root["diagnostic_sample_count"] = cfg.diagnostic_sample_count;
    root["fresh_samples_only"] = cfg.fresh_samples_only;
    root["threads"] = cfg.threads;
    root["seed"] = cfg.seed;
    return root.dump(indent);
}

}  // namespace pcopt
