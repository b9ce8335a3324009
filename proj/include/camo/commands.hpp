#pragma once
// Command implementations behind the CLI: aggregate, evaluate, sweep,
// synth. Each writes its primary output plus a run manifest (resolved
// config echo, input/output digests, seed) so a run can be re-executed and
// verified bit-identically. The binary in tools/ is a thin flag parser over
// these functions.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "camo/batch.hpp"
#include "camo/io.hpp"
#include "camo/oracle.hpp"

namespace camo {

namespace detail {

inline unsigned default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : std::min(hw, 8u);
}

inline std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        if (comma == std::string::npos) comma = s.size();
        std::string item = s.substr(start, comma - start);
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        if (!item.empty()) out.push_back(std::move(item));
        start = comma + 1;
    }
    return out;
}

inline void write_manifest_for(const std::string& command, const json& args, const json& config_echo,
                               std::uint64_t seed, const std::vector<std::string>& inputs,
                               const std::vector<std::string>& outputs, const std::string& manifest_path) {
    RunManifest m;
    m.command = command;
    m.args = args;
    m.config_echo = config_echo;
    m.seed = seed;
    for (const auto& p : inputs) m.inputs.emplace_back(p, digest_of_file(p));
    for (const auto& p : outputs) m.outputs.emplace_back(p, digest_of_file(p));
    m.created_at = now_iso8601();
    write_file(manifest_path, manifest_to_json(m).dump(2) + "\n");
}

}  // namespace detail

template <typename Fn>
int run_guarded(std::ostream& err, Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

struct AggregateOptions {
    std::string predictions;
    std::string config;
    std::string strategy;
    std::string out;
};

inline int cmd_aggregate(const AggregateOptions& opt, std::ostream& err = std::cerr) {
    return run_guarded(err, [&] {
        auto id = strategy_from_string(opt.strategy);
        if (!id) {
            throw Error(ErrorKind::ValidationError, "unknown strategy " + detail::quoted(opt.strategy) +
                                                        "; valid: " + strategy_names_joined());
        }
        RunConfig run = load_config(opt.config);
        std::vector<PredictionRecord> records = load_predictions(opt.predictions, run.registry);
        StrategyRunner runner(run.registry, run.camo, run.merged_params());
        if (*id == StrategyId::meta_ensemble) {
            runner.fit_meta(records);
        }
        std::vector<std::pair<std::string, Decision>> decisions;
        decisions.reserve(records.size());
        for (const auto& rec : records) {
            const EnsembleStats stats = compute_stats(rec, run.registry);
            decisions.emplace_back(rec.instance_id, runner.decide(*id, rec, stats, true));
        }
        write_decisions(opt.out, decisions);
        detail::write_manifest_for(
            "aggregate",
            json{{"predictions", opt.predictions}, {"config", opt.config}, {"strategy", opt.strategy}, {"out", opt.out}},
            run_config_to_json(run), run.seed, {opt.predictions, opt.config}, {opt.out},
            manifest_path_for(opt.out));
    });
}

struct EvaluateOptions {
    std::string predictions;
    std::string config;
    std::string strategies;  // comma-separated ids
    std::string out;
    unsigned threads = 0;  // 0 = auto
};

inline int cmd_evaluate(const EvaluateOptions& opt, std::ostream& err = std::cerr,
                        std::ostream& table_out = std::cout) {
    return run_guarded(err, [&] {
        std::vector<StrategyId> ids;
        for (const auto& name : detail::split_csv_list(opt.strategies)) {
            auto id = strategy_from_string(name);
            if (!id) {
                throw Error(ErrorKind::ValidationError,
                            "unknown strategy " + detail::quoted(name) + "; valid: " + strategy_names_joined());
            }
            ids.push_back(*id);
        }
        if (ids.empty()) {
            throw Error(ErrorKind::ValidationError, "no strategies given");
        }
        RunConfig run = load_config(opt.config);
        std::vector<PredictionRecord> records = load_predictions(opt.predictions, run.registry);
        if (records.empty()) {
            throw Error(ErrorKind::ValidationError, "prediction file " + detail::quoted(opt.predictions) + " has no records");
        }
        for (const auto& rec : records) {
            if (!rec.gold) {
                throw Error(ErrorKind::MissingGold,
                            "record " + detail::quoted(rec.instance_id) + " has no gold label; evaluate needs gold");
            }
        }
        StrategyRunner runner(run.registry, run.camo, run.merged_params());
        BatchOptions batch;
        batch.threads = opt.threads == 0 ? detail::default_threads() : opt.threads;
        std::vector<StrategyEvaluation> evals = evaluate_strategies(records, runner, ids, run.lenient_map, batch);

        std::vector<std::string> names;
        std::vector<std::pair<MetricReport, MetricReport>> pairs;
        json strategies = json::array();
        for (const auto& ev : evals) {
            names.emplace_back(to_string(ev.id));
            pairs.emplace_back(ev.strict, ev.lenient);
            strategies.push_back(json{{"id", to_string(ev.id)},
                                      {"strict", metric_report_to_json(ev.strict)},
                                      {"lenient", metric_report_to_json(ev.lenient)}});
        }
        const std::string table = format_comparison_table(names, pairs);
        json doc{{"strategies", std::move(strategies)}, {"table", table}, {"records", records.size()}};
        write_file(opt.out, doc.dump(2) + "\n");
        table_out << table;
        detail::write_manifest_for("evaluate",
                                   json{{"predictions", opt.predictions},
                                        {"config", opt.config},
                                        {"strategies", opt.strategies},
                                        {"out", opt.out}},
                                   run_config_to_json(run), run.seed, {opt.predictions, opt.config}, {opt.out},
                                   manifest_path_for(opt.out));
    });
}

struct SweepOptions {
    std::string predictions;
    std::string config;
    std::string param;
    std::string values;  // comma-separated numbers
    std::string metric;
    std::string out;  // optional; stdout when empty
};

namespace detail {

inline void apply_sweep_param(CamoConfig& cfg, const std::string& name, double value) {
    auto set_int = [&](PerClassParam<int>& p) { p.default_value = static_cast<int>(value); };
    if (name == "theta1") set_int(cfg.theta1);
    else if (name == "theta2") set_int(cfg.theta2);
    else if (name == "tau1") cfg.tau1.default_value = value;
    else if (name == "tau2") cfg.tau2.default_value = value;
    else if (name == "tau3") cfg.tau3.default_value = value;
    else if (name == "tau4") cfg.tau4.default_value = value;
    else if (name == "tau5") cfg.tau5.default_value = value;
    else if (name == "tau6") cfg.tau6 = value;
    else if (name == "tau7") cfg.tau7 = value;
    else if (name == "tau8") cfg.tau8.default_value = value;
    else if (name == "tau9") cfg.tau9.default_value = value;
    else if (name == "beta_base") cfg.beta_base.default_value = value;
    else if (name == "beta_max") cfg.beta_max = value;
    else if (name == "alpha1") cfg.alpha[0] = value;
    else if (name == "alpha2") cfg.alpha[1] = value;
    else if (name == "alpha3") cfg.alpha[2] = value;
    else if (name == "alpha4") cfg.alpha[3] = value;
    else {
        throw Error(ErrorKind::ValidationError,
                    "unknown sweep param " + camo::detail::quoted(name) +
                        "; valid: theta1, theta2, tau1..tau9, beta_base, beta_max, alpha1..alpha4");
    }
}

inline double metric_value(const MetricReport& strict, const MetricReport& lenient, const std::string& name) {
    if (name == "strict_macro_f1") return strict.macro_f1;
    if (name == "strict_accuracy") return strict.accuracy;
    if (name == "lenient_macro_f1") return lenient.macro_f1;
    if (name == "lenient_accuracy") return lenient.accuracy;
    if (name == "weighted_f1") return strict.weighted_f1;
    if (name == "macro_precision") return strict.macro_precision;
    if (name == "macro_recall") return strict.macro_recall;
    if (name == "fairness_gap") return strict.fairness_gap;
    throw Error(ErrorKind::ValidationError,
                "unknown metric " + camo::detail::quoted(name) +
                    "; valid: strict_macro_f1, strict_accuracy, lenient_macro_f1, lenient_accuracy, "
                    "weighted_f1, macro_precision, macro_recall, fairness_gap");
}

}  // namespace detail

inline int cmd_sweep(const SweepOptions& opt, std::ostream& err = std::cerr,
                     std::ostream& stdout_stream = std::cout) {
    return run_guarded(err, [&] {
        RunConfig run = load_config(opt.config);
        std::vector<double> values;
        for (const auto& item : detail::split_csv_list(opt.values)) {
            double v = 0.0;
            if (!detail::parse_double(item, v)) {
                throw Error(ErrorKind::ValidationError, "bad sweep value " + detail::quoted(item));
            }
            values.push_back(v);
        }
        if (values.empty()) {
            throw Error(ErrorKind::ValidationError, "no sweep values given");
        }
        // reject unknown params and out-of-range values before evaluating
        for (double v : values) {
            CamoConfig probe = run.camo;
            detail::apply_sweep_param(probe, opt.param, v);
            validate_config(probe, run.registry);
        }
        detail::metric_value(MetricReport{}, MetricReport{}, opt.metric);

        std::vector<PredictionRecord> records = load_predictions(opt.predictions, run.registry);
        if (records.empty()) {
            throw Error(ErrorKind::ValidationError, "prediction file " + detail::quoted(opt.predictions) + " has no records");
        }
        for (const auto& rec : records) {
            if (!rec.gold) {
                throw Error(ErrorKind::MissingGold,
                            "record " + detail::quoted(rec.instance_id) + " has no gold label; sweep needs gold");
            }
        }
        BatchOptions batch;
        batch.threads = detail::default_threads();
        json points = json::array();
        for (double v : values) {
            CamoConfig cfg = run.camo;
            detail::apply_sweep_param(cfg, opt.param, v);
            StrategyRunner runner(run.registry, cfg, run.merged_params());
            auto evals = evaluate_strategies(records, runner, {StrategyId::camo}, run.lenient_map, batch);
            points.push_back(json{{"value", v},
                                  {"score", detail::metric_value(evals[0].strict, evals[0].lenient, opt.metric)}});
        }
        RunManifest m;
        m.command = "sweep";
        m.args = json{{"predictions", opt.predictions}, {"config", opt.config},     {"param", opt.param},
                      {"values", opt.values},           {"metric", opt.metric},     {"out", opt.out}};
        m.config_echo = run_config_to_json(run);
        m.seed = run.seed;
        m.inputs.emplace_back(opt.predictions, digest_of_file(opt.predictions));
        m.inputs.emplace_back(opt.config, digest_of_file(opt.config));
        m.created_at = now_iso8601();
        json doc{{"param", opt.param}, {"metric", opt.metric}, {"points", std::move(points)},
                 {"manifest", manifest_to_json(m)}};
        if (opt.out.empty()) {
            stdout_stream << doc.dump(2) << "\n";
        } else {
            write_file(opt.out, doc.dump(2) + "\n");
        }
    });
}

struct SynthOptions {
    std::string spec;
    std::string out;
};

inline json synth_spec_to_json(const SynthSpec& spec) {
    json dist = json::object();
    json acc = json::object();
    for (std::size_t i = 0; i < spec.registry.size(); ++i) {
        dist[spec.registry.label(i)] = spec.class_distribution[i];
        acc[spec.registry.label(i)] = spec.accuracy[i];
    }
    return json{{"registry", registry_to_json(spec.registry)},
                {"models", spec.models},
                {"instances", spec.instances},
                {"class_distribution", std::move(dist)},
                {"accuracy", std::move(acc)},
                {"confidence",
                 json{{"correct", {spec.confidence.correct_lo, spec.confidence.correct_hi}},
                      {"wrong", {spec.confidence.wrong_lo, spec.confidence.wrong_hi}}}},
                {"emit_distributions", spec.emit_distributions},
                {"seed", spec.seed}};
}

inline int cmd_synth(const SynthOptions& opt, std::ostream& err = std::cerr) {
    return run_guarded(err, [&] {
        SynthSpec spec = load_synth_spec(opt.spec);
        std::vector<PredictionRecord> records = generate(spec);
        save_predictions(opt.out, records);
        detail::write_manifest_for("synth", json{{"spec", opt.spec}, {"out", opt.out}}, synth_spec_to_json(spec),
                                   spec.seed, {opt.spec}, {opt.out}, manifest_path_for(opt.out));
    });
}

}  // namespace camo
