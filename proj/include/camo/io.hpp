#pragma once
// Ingestion and persistence. Prediction files are line-delimited JSON (one
// record per line, blank lines ignored); configs, synth specs, reports,
// meta models and manifests are single JSON documents. Config parsing
// rejects unknown keys so a typo in a threshold name fails loudly instead of
// silently running with defaults. Every error carries its location (line,
// key path or instance id). All parsing and serialization is
// locale-independent.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "camo/core.hpp"
#include "camo/engine.hpp"
#include "camo/metrics.hpp"
#include "camo/strategies.hpp"
#include "camo/synth.hpp"
#include "camo/version.hpp"

namespace camo {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// low-level file helpers

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot open " + detail::quoted(path) + " for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorKind::IoError, "read failure on " + detail::quoted(path));
    }
    return std::move(buf).str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::IoError, "cannot open " + detail::quoted(path) + " for writing");
    }
    out << content;
    if (!out) {
        throw Error(ErrorKind::IoError, "write failure on " + detail::quoted(path));
    }
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string digest_of_bytes(std::string_view bytes) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

inline std::string digest_of_file(const std::string& path) { return digest_of_bytes(read_file(path)); }

// ---------------------------------------------------------------------------
// strict-object helpers

namespace detail {

inline void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    if (!obj.is_object()) {
        throw Error(ErrorKind::ParseError, path + " must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw Error(ErrorKind::UnknownKey, "unknown key " + camo::detail::quoted(path + "." + key));
        }
    }
}

inline const json* get_opt(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline const json& get_req(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        throw Error(ErrorKind::ParseError, "missing required key " + camo::detail::quoted(path + "." + key));
    }
    return *it;
}

template <typename T>
T as(const json& value, const std::string& path) {
    try {
        return value.get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, path + ": " + e.what());
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// prediction records

inline json prediction_record_to_json(const PredictionRecord& rec) {
    json preds = json::array();
    for (const auto& p : rec.predictions) {
        json jp{{"model", p.model_id}, {"label", p.label}, {"confidence", p.confidence}};
        if (p.distribution) {
            json dist = json::object();
            for (const auto& [cls, prob] : *p.distribution) dist[cls] = prob;
            jp["distribution"] = std::move(dist);
        }
        preds.push_back(std::move(jp));
    }
    json out{{"instance_id", rec.instance_id}, {"predictions", std::move(preds)}};
    out["gold"] = rec.gold ? json(*rec.gold) : json(nullptr);
    return out;
}

inline PredictionRecord prediction_record_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) {
        throw Error(ErrorKind::ParseError, where + ": record must be a JSON object");
    }
    PredictionRecord rec;
    rec.instance_id = detail::as<std::string>(detail::get_req(j, "instance_id", where), where + ".instance_id");
    if (const json* gold = detail::get_opt(j, "gold")) {
        rec.gold = detail::as<std::string>(*gold, where + ".gold");
    }
    const json& preds = detail::get_req(j, "predictions", where);
    if (!preds.is_array()) {
        throw Error(ErrorKind::ParseError, where + ".predictions must be an array");
    }
    for (const auto& jp : preds) {
        const std::string ppath = where + ".predictions";
        ModelPrediction p;
        p.model_id = detail::as<std::string>(detail::get_req(jp, "model", ppath), ppath + ".model");
        p.label = detail::as<std::string>(detail::get_req(jp, "label", ppath), ppath + ".label");
        p.confidence = detail::as<double>(detail::get_req(jp, "confidence", ppath), ppath + ".confidence");
        if (const json* dist = detail::get_opt(jp, "distribution")) {
            if (!dist->is_object()) {
                throw Error(ErrorKind::ParseError, ppath + ".distribution must be an object");
            }
            Distribution d;
            for (const auto& [cls, prob] : dist->items()) {
                d.emplace(cls, detail::as<double>(prob, ppath + ".distribution." + cls));
            }
            p.distribution = std::move(d);
        }
        rec.predictions.push_back(std::move(p));
    }
    return rec;
}

// Parses, validates and enforces a single ensemble size across the file.
inline std::vector<PredictionRecord> load_predictions(const std::string& path, const ClassRegistry& registry) {
    const std::string content = read_file(path);
    std::vector<PredictionRecord> records;
    std::size_t line_no = 0;
    std::size_t start = 0;
    std::optional<std::size_t> ensemble_size;
    while (start <= content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        ++line_no;
        std::string_view line(content.data() + start, end - start);
        start = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            if (end == content.size()) break;
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
        }
        PredictionRecord rec = prediction_record_from_json(j, "line " + std::to_string(line_no));
        try {
            validate_record(rec, registry);
        } catch (const Error& e) {
            throw Error(ErrorKind::ValidationError, std::string(e.what()) + " (instance " +
                                                        detail::quoted(rec.instance_id) + ", line " +
                                                        std::to_string(line_no) + ")");
        }
        if (ensemble_size && rec.predictions.size() != *ensemble_size) {
            throw Error(ErrorKind::InconsistentEnsembleSize,
                        "instance " + detail::quoted(rec.instance_id) + " (line " + std::to_string(line_no) +
                            ") has " + std::to_string(rec.predictions.size()) + " predictions, previous records have " +
                            std::to_string(*ensemble_size));
        }
        ensemble_size = rec.predictions.size();
        records.push_back(std::move(rec));
        if (end == content.size()) break;
    }
    return records;
}

inline void save_predictions(const std::string& path, const std::vector<PredictionRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        out += prediction_record_to_json(rec).dump();
        out += '\n';
    }
    write_file(path, out);
}

// Convenience CSV import: header `instance_id,gold,<model>.label,<model>.confidence,...`
// (no quoting, no distributions); converts to canonical records on load.
inline std::vector<PredictionRecord> load_predictions_csv(const std::string& path,
                                                          const ClassRegistry& registry) {
    const std::string content = read_file(path);
    std::vector<PredictionRecord> records;
    std::istringstream in(content);
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = s.find(',', start);
            std::string cell = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            cells.push_back(cell);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return cells;
    };
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::ParseError, "CSV file " + detail::quoted(path) + " is empty");
    }
    const std::vector<std::string> header = split(line);
    if (header.size() < 4 || header[0] != "instance_id" || header[1] != "gold" || header.size() % 2 != 0) {
        throw Error(ErrorKind::ParseError,
                    "CSV header must be instance_id,gold,<model>.label,<model>.confidence,...");
    }
    std::vector<std::string> model_ids;
    for (std::size_t col = 2; col < header.size(); col += 2) {
        const std::string& lab = header[col];
        const std::string& conf = header[col + 1];
        if (lab.size() < 7 || lab.substr(lab.size() - 6) != ".label" ||
            conf.size() < 12 || conf.substr(conf.size() - 11) != ".confidence" ||
            lab.substr(0, lab.size() - 6) != conf.substr(0, conf.size() - 11)) {
            throw Error(ErrorKind::ParseError, "CSV column pair " + detail::quoted(lab) + "/" +
                                                   detail::quoted(conf) + " must be <model>.label,<model>.confidence");
        }
        model_ids.push_back(lab.substr(0, lab.size() - 6));
    }
    std::size_t line_no = 1;
    std::optional<std::size_t> ensemble_size;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size()) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(header.size()) + " cells, got " +
                                                   std::to_string(cells.size()));
        }
        PredictionRecord rec;
        rec.instance_id = cells[0];
        if (!cells[1].empty()) rec.gold = cells[1];
        for (std::size_t mi = 0; mi < model_ids.size(); ++mi) {
            ModelPrediction p;
            p.model_id = model_ids[mi];
            p.label = cells[2 + 2 * mi];
            if (!detail::parse_double(cells[3 + 2 * mi], p.confidence)) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": bad confidence " +
                                                       detail::quoted(cells[3 + 2 * mi]));
            }
            rec.predictions.push_back(std::move(p));
        }
        try {
            validate_record(rec, registry);
        } catch (const Error& e) {
            throw Error(ErrorKind::ValidationError, std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
        }
        ensemble_size = rec.predictions.size();
        records.push_back(std::move(rec));
    }
    (void)ensemble_size;
    return records;
}

// ---------------------------------------------------------------------------
// decisions

inline json decision_to_json(const std::string& instance_id, const Decision& d) {
    json out{{"instance_id", instance_id}, {"label", d.label}};
    if (d.stage) out["stage"] = to_string(*d.stage);
    if (d.scores) {
        json scores = json::object();
        for (const auto& [cls, s] : *d.scores) scores[cls] = s;
        out["scores"] = std::move(scores);
    }
    if (!d.trace.empty()) {
        json trace = json::array();
        for (const auto& t : d.trace) {
            trace.push_back(json{{"stage", to_string(t.stage)}, {"fired", t.fired}, {"detail", t.detail}});
        }
        out["trace"] = std::move(trace);
    }
    return out;
}

inline void write_decisions(const std::string& path,
                            const std::vector<std::pair<std::string, Decision>>& decisions) {
    std::string out;
    for (const auto& [id, d] : decisions) {
        out += decision_to_json(id, d).dump();
        out += '\n';
    }
    write_file(path, out);
}

inline std::vector<std::pair<std::string, Decision>> read_decisions(const std::string& path) {
    const std::string content = read_file(path);
    std::vector<std::pair<std::string, Decision>> out;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
        }
        const std::string where = "line " + std::to_string(line_no);
        Decision d;
        std::string instance = detail::as<std::string>(detail::get_req(j, "instance_id", where), where);
        d.label = detail::as<std::string>(detail::get_req(j, "label", where), where);
        if (const json* stage = detail::get_opt(j, "stage")) {
            auto parsed = stage_from_string(detail::as<std::string>(*stage, where + ".stage"));
            if (!parsed) {
                throw Error(ErrorKind::ParseError, where + ": bad stage " + stage->dump());
            }
            d.stage = *parsed;
        }
        if (const json* scores = detail::get_opt(j, "scores")) {
            std::map<ClassLabel, double> s;
            for (const auto& [cls, v] : scores->items()) {
                s.emplace(cls, detail::as<double>(v, where + ".scores." + cls));
            }
            d.scores = std::move(s);
        }
        if (const json* trace = detail::get_opt(j, "trace")) {
            for (const auto& t : *trace) {
                TraceEntry e;
                auto parsed = stage_from_string(detail::as<std::string>(detail::get_req(t, "stage", where), where));
                if (!parsed) {
                    throw Error(ErrorKind::ParseError, where + ": bad trace stage");
                }
                e.stage = *parsed;
                e.fired = detail::as<bool>(detail::get_req(t, "fired", where), where);
                e.detail = detail::as<std::string>(detail::get_req(t, "detail", where), where);
                d.trace.push_back(std::move(e));
            }
        }
        out.emplace_back(std::move(instance), std::move(d));
    }
    return out;
}

// ---------------------------------------------------------------------------
// registry / camo config / run config

inline json registry_to_json(const ClassRegistry& registry) {
    json out{{"classes", registry.classes()}, {"minority", registry.minority_labels()}};
    if (registry.has_priors()) {
        json priors = json::object();
        for (std::size_t i = 0; i < registry.size(); ++i) priors[registry.label(i)] = registry.prior(i);
        out["priors"] = std::move(priors);
    }
    return out;
}

inline ClassRegistry registry_from_json(const json& j, const std::string& path) {
    detail::require_keys(j, {"classes", "minority", "priors"}, path);
    auto classes = detail::as<std::vector<std::string>>(detail::get_req(j, "classes", path), path + ".classes");
    std::vector<std::string> minority;
    if (const json* m = detail::get_opt(j, "minority")) {
        minority = detail::as<std::vector<std::string>>(*m, path + ".minority");
    }
    std::optional<std::map<ClassLabel, double>> priors;
    if (const json* p = detail::get_opt(j, "priors")) {
        priors = detail::as<std::map<std::string, double>>(*p, path + ".priors");
    }
    try {
        return ClassRegistry(std::move(classes), std::move(minority), std::move(priors));
    } catch (const Error& e) {
        throw Error(ErrorKind::InvariantViolation, path + ": " + e.what());
    }
}

namespace detail {

template <typename T>
void parse_per_class(const json& j, PerClassParam<T>& out, const std::string& path) {
    if (j.is_object()) {
        require_keys(j, {"default", "per_class"}, path);
        if (const json* d = get_opt(j, "default")) out.default_value = as<T>(*d, path + ".default");
        if (const json* pc = get_opt(j, "per_class")) {
            for (const auto& [cls, v] : pc->items()) {
                out.per_class[cls] = as<T>(v, path + ".per_class." + cls);
            }
        }
    } else {
        out.default_value = as<T>(j, path);
        out.per_class.clear();
    }
}

}  // namespace detail

// Applies user overrides on top of default_config(registry); validates the
// result. Accepts either a bare number (sets the global default) or
// {"default":d, "per_class":{c:v}} for the per-class thresholds.
inline CamoConfig camo_config_from_json(const json& j, const ClassRegistry& registry,
                                        const std::string& path = "camo") {
    detail::require_keys(j,
                         {"theta1", "theta2", "tau1", "tau2", "tau3", "tau4", "tau5", "tau6", "tau7",
                          "tau8", "tau9", "beta_base", "beta_max", "alpha", "allow_zero_vote_c4"},
                         path);
    CamoConfig cfg = default_config(registry);
    auto per_class_double = [&](const char* key, PerClassParam<double>& field) {
        if (const json* v = detail::get_opt(j, key)) detail::parse_per_class(*v, field, path + "." + key);
    };
    auto per_class_int = [&](const char* key, PerClassParam<int>& field) {
        if (const json* v = detail::get_opt(j, key)) detail::parse_per_class(*v, field, path + "." + key);
    };
    per_class_int("theta1", cfg.theta1);
    per_class_int("theta2", cfg.theta2);
    per_class_double("tau1", cfg.tau1);
    per_class_double("tau2", cfg.tau2);
    per_class_double("tau3", cfg.tau3);
    per_class_double("tau4", cfg.tau4);
    per_class_double("tau5", cfg.tau5);
    per_class_double("tau8", cfg.tau8);
    per_class_double("tau9", cfg.tau9);
    per_class_double("beta_base", cfg.beta_base);
    if (const json* v = detail::get_opt(j, "tau6")) cfg.tau6 = detail::as<double>(*v, path + ".tau6");
    if (const json* v = detail::get_opt(j, "tau7")) cfg.tau7 = detail::as<double>(*v, path + ".tau7");
    if (const json* v = detail::get_opt(j, "beta_max")) cfg.beta_max = detail::as<double>(*v, path + ".beta_max");
    if (const json* v = detail::get_opt(j, "alpha")) {
        auto a = detail::as<std::vector<double>>(*v, path + ".alpha");
        if (a.size() != 4) {
            throw Error(ErrorKind::ParseError, path + ".alpha must have exactly 4 entries");
        }
        std::copy(a.begin(), a.end(), cfg.alpha.begin());
    }
    if (const json* v = detail::get_opt(j, "allow_zero_vote_c4")) {
        cfg.allow_zero_vote_c4 = detail::as<bool>(*v, path + ".allow_zero_vote_c4");
    }
    validate_config(cfg, registry);
    return cfg;
}

template <typename T>
json per_class_to_json(const PerClassParam<T>& p) {
    if (p.per_class.empty()) return json(p.default_value);
    json pc = json::object();
    for (const auto& [cls, v] : p.per_class) pc[cls] = v;
    return json{{"default", p.default_value}, {"per_class", std::move(pc)}};
}

inline json camo_config_to_json(const CamoConfig& cfg) {
    return json{{"theta1", per_class_to_json(cfg.theta1)},
                {"theta2", per_class_to_json(cfg.theta2)},
                {"tau1", per_class_to_json(cfg.tau1)},
                {"tau2", per_class_to_json(cfg.tau2)},
                {"tau3", per_class_to_json(cfg.tau3)},
                {"tau4", per_class_to_json(cfg.tau4)},
                {"tau5", per_class_to_json(cfg.tau5)},
                {"tau6", cfg.tau6},
                {"tau7", cfg.tau7},
                {"tau8", per_class_to_json(cfg.tau8)},
                {"tau9", per_class_to_json(cfg.tau9)},
                {"beta_base", per_class_to_json(cfg.beta_base)},
                {"beta_max", cfg.beta_max},
                {"alpha", cfg.alpha},
                {"allow_zero_vote_c4", cfg.allow_zero_vote_c4}};
}

struct StrategySpec {
    StrategyId id = StrategyId::camo;
    double margin = 0.1;                  // dynamic_threshold
    MetaModel::FitOptions meta;           // meta_ensemble
};

struct RunConfig {
    ClassRegistry registry;
    CamoConfig camo;
    std::vector<StrategySpec> strategies;
    std::optional<LenientMap> lenient_map;
    std::uint64_t seed = 0;

    // single parameter bundle for a StrategyRunner: picks up the margin and
    // meta-training options from their strategy entries when present
    StrategyParams merged_params() const {
        StrategyParams p;
        for (const auto& s : strategies) {
            if (s.id == StrategyId::dynamic_threshold) p.dynamic_margin = s.margin;
            if (s.id == StrategyId::meta_ensemble) p.meta = s.meta;
        }
        p.meta.seed = seed;
        return p;
    }
};

inline StrategySpec strategy_spec_from_json(const json& j, const std::string& path) {
    StrategySpec spec;
    std::string name;
    if (j.is_string()) {
        name = j.get<std::string>();
    } else {
        detail::require_keys(j, {"id", "margin", "learning_rate", "epochs"}, path);
        name = detail::as<std::string>(detail::get_req(j, "id", path), path + ".id");
        if (const json* v = detail::get_opt(j, "margin")) {
            spec.margin = detail::as<double>(*v, path + ".margin");
            if (spec.margin < 0.0) {
                throw Error(ErrorKind::InvariantViolation, path + ".margin must be >= 0");
            }
        }
        if (const json* v = detail::get_opt(j, "learning_rate")) {
            spec.meta.learning_rate = detail::as<double>(*v, path + ".learning_rate");
        }
        if (const json* v = detail::get_opt(j, "epochs")) {
            spec.meta.epochs = detail::as<int>(*v, path + ".epochs");
        }
    }
    auto id = strategy_from_string(name);
    if (!id) {
        throw Error(ErrorKind::ValidationError,
                    path + ": unknown strategy " + detail::quoted(name) + "; valid: " + strategy_names_joined());
    }
    spec.id = *id;
    return spec;
}

inline RunConfig run_config_from_json(const json& j, const std::string& path = "config") {
    detail::require_keys(j, {"registry", "camo", "strategies", "lenient_map", "seed"}, path);
    ClassRegistry registry = registry_from_json(detail::get_req(j, "registry", path), path + ".registry");
    CamoConfig cfg = default_config(registry);
    if (const json* c = detail::get_opt(j, "camo")) {
        cfg = camo_config_from_json(*c, registry, path + ".camo");
    }
    RunConfig run{std::move(registry), std::move(cfg), {}, std::nullopt, 0};
    if (const json* s = detail::get_opt(j, "strategies")) {
        if (!s->is_array()) {
            throw Error(ErrorKind::ParseError, path + ".strategies must be an array");
        }
        for (std::size_t i = 0; i < s->size(); ++i) {
            run.strategies.push_back(strategy_spec_from_json((*s)[i], path + ".strategies[" + std::to_string(i) + "]"));
        }
    }
    if (const json* m = detail::get_opt(j, "lenient_map")) {
        LenientMap map = detail::as<std::map<std::string, std::string>>(*m, path + ".lenient_map");
        for (const auto& [from, to] : map) {
            if (!run.registry.find(from) || !run.registry.find(to)) {
                throw Error(ErrorKind::InvariantViolation,
                            path + ".lenient_map: " + detail::quoted(from) + " -> " + detail::quoted(to) +
                                " must both be registry classes");
            }
        }
        run.lenient_map = std::move(map);
    }
    if (const json* seed = detail::get_opt(j, "seed")) {
        run.seed = detail::as<std::uint64_t>(*seed, path + ".seed");
    }
    return run;
}

inline RunConfig load_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, detail::quoted(path) + ": " + e.what());
    }
    return run_config_from_json(j);
}

// fully-resolved echo for provenance
inline json run_config_to_json(const RunConfig& run) {
    json strategies = json::array();
    for (const auto& s : run.strategies) {
        json js{{"id", to_string(s.id)}};
        if (s.id == StrategyId::dynamic_threshold) js["margin"] = s.margin;
        if (s.id == StrategyId::meta_ensemble) {
            js["learning_rate"] = s.meta.learning_rate;
            js["epochs"] = s.meta.epochs;
        }
        strategies.push_back(std::move(js));
    }
    json out{{"registry", registry_to_json(run.registry)},
             {"camo", camo_config_to_json(run.camo)},
             {"strategies", std::move(strategies)},
             {"seed", run.seed}};
    if (run.lenient_map) {
        json m = json::object();
        for (const auto& [from, to] : *run.lenient_map) m[from] = to;
        out["lenient_map"] = std::move(m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// synth spec

inline SynthSpec synth_spec_from_json(const json& j, const std::string& path = "spec") {
    detail::require_keys(j,
                         {"registry", "models", "instances", "class_distribution", "accuracy",
                          "confidence", "emit_distributions", "seed"},
                         path);
    ClassRegistry registry = registry_from_json(detail::get_req(j, "registry", path), path + ".registry");
    const std::size_t k = registry.size();
    SynthSpec spec{std::move(registry), 5, 0, {}, {}, {}, false, 0};
    spec.models = detail::as<int>(detail::get_req(j, "models", path), path + ".models");
    spec.instances = detail::as<int>(detail::get_req(j, "instances", path), path + ".instances");

    auto class_map_to_vector = [&](const json& obj, const std::string& p) {
        std::vector<double> out(k, 0.0);
        auto map = detail::as<std::map<std::string, double>>(obj, p);
        for (const auto& [cls, v] : map) {
            out[spec.registry.index_of(cls)] = v;
        }
        if (map.size() != k) {
            throw Error(ErrorKind::InvariantViolation, p + " must cover every registry class");
        }
        return out;
    };
    spec.class_distribution =
        class_map_to_vector(detail::get_req(j, "class_distribution", path), path + ".class_distribution");
    const json& acc = detail::get_req(j, "accuracy", path);
    if (acc.is_number()) {
        spec.accuracy.assign(k, acc.get<double>());
    } else {
        spec.accuracy = class_map_to_vector(acc, path + ".accuracy");
    }
    if (const json* conf = detail::get_opt(j, "confidence")) {
        detail::require_keys(*conf, {"correct", "wrong"}, path + ".confidence");
        auto range = [&](const json& v, const std::string& p) {
            auto pair = detail::as<std::vector<double>>(v, p);
            if (pair.size() != 2) {
                throw Error(ErrorKind::ParseError, p + " must be [lo, hi]");
            }
            return pair;
        };
        if (const json* c = detail::get_opt(*conf, "correct")) {
            auto r = range(*c, path + ".confidence.correct");
            spec.confidence.correct_lo = r[0];
            spec.confidence.correct_hi = r[1];
        }
        if (const json* w = detail::get_opt(*conf, "wrong")) {
            auto r = range(*w, path + ".confidence.wrong");
            spec.confidence.wrong_lo = r[0];
            spec.confidence.wrong_hi = r[1];
        }
    }
    if (const json* e = detail::get_opt(j, "emit_distributions")) {
        spec.emit_distributions = detail::as<bool>(*e, path + ".emit_distributions");
    }
    spec.seed = detail::as<std::uint64_t>(detail::get_req(j, "seed", path), path + ".seed");
    spec.validate();
    return spec;
}

inline SynthSpec load_synth_spec(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, detail::quoted(path) + ": " + e.what());
    }
    return synth_spec_from_json(j);
}

// ---------------------------------------------------------------------------
// metric reports / meta model

inline json metric_report_to_json(const MetricReport& rep) {
    json per_class = json::object();
    for (const auto& [cls, m] : rep.per_class) {
        per_class[cls] = json{{"precision", m.precision},
                              {"recall", m.recall},
                              {"f1", m.f1},
                              {"support", m.support}};
    }
    return json{{"variant", to_string(rep.variant)},
                {"accuracy", rep.accuracy},
                {"macro_precision", rep.macro_precision},
                {"macro_recall", rep.macro_recall},
                {"macro_f1", rep.macro_f1},
                {"weighted_f1", rep.weighted_f1},
                {"fairness_gap", rep.fairness_gap},
                {"per_class", std::move(per_class)}};
}

inline MetricReport metric_report_from_json(const json& j) {
    MetricReport rep;
    rep.variant = j.at("variant").get<std::string>() == "lenient" ? MetricVariant::lenient : MetricVariant::strict;
    rep.accuracy = j.at("accuracy").get<double>();
    rep.macro_precision = j.at("macro_precision").get<double>();
    rep.macro_recall = j.at("macro_recall").get<double>();
    rep.macro_f1 = j.at("macro_f1").get<double>();
    rep.weighted_f1 = j.at("weighted_f1").get<double>();
    rep.fairness_gap = j.at("fairness_gap").get<double>();
    for (const auto& [cls, m] : j.at("per_class").items()) {
        rep.per_class.emplace_back(cls, ClassMetrics{m.at("precision").get<double>(), m.at("recall").get<double>(),
                                                     m.at("f1").get<double>(), m.at("support").get<std::int64_t>()});
    }
    return rep;
}

inline json meta_model_to_json(const MetaModel& meta) {
    return json{{"models", meta.model_order()},
                {"classes", meta.class_order()},
                {"weights", meta.weights()},
                {"training",
                 json{{"learning_rate", meta.options().learning_rate},
                      {"epochs", meta.options().epochs},
                      {"seed", meta.options().seed}}}};
}

inline MetaModel meta_model_from_json(const json& j) {
    MetaModel::FitOptions options;
    options.learning_rate = j.at("training").at("learning_rate").get<double>();
    options.epochs = j.at("training").at("epochs").get<int>();
    options.seed = j.at("training").at("seed").get<std::uint64_t>();
    return MetaModel::from_parts(j.at("models").get<std::vector<std::string>>(),
                                 j.at("classes").get<std::vector<std::string>>(),
                                 j.at("weights").get<std::vector<std::vector<double>>>(), options);
}

// ---------------------------------------------------------------------------
// run manifests

// Provenance for one CLI run: resolved config echo, input/output digests and
// the seed. Identical inputs + seed must reproduce identical output digests;
// created_at is informational and excluded from any comparison.
struct RunManifest {
    std::string command;
    json args;
    json config_echo;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;   // path, digest
    std::vector<std::pair<std::string, std::string>> outputs;  // path, digest
    std::string created_at;
};

inline json manifest_to_json(const RunManifest& m) {
    auto files = [](const std::vector<std::pair<std::string, std::string>>& v) {
        json arr = json::array();
        for (const auto& [path, digest] : v) arr.push_back(json{{"path", path}, {"digest", digest}});
        return arr;
    };
    return json{{"tool", kToolName},     {"version", kVersion},
                {"command", m.command},  {"args", m.args},
                {"seed", m.seed},        {"config_echo", m.config_echo},
                {"inputs", files(m.inputs)}, {"outputs", files(m.outputs)},
                {"created_at", m.created_at}};
}

inline std::string manifest_path_for(const std::string& out_path) { return out_path + ".manifest.json"; }

inline std::string now_iso8601() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace camo
