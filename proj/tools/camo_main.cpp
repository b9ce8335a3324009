// camo CLI: aggregate per-model predictions into final labels, benchmark
// ensemble strategies against each other, sweep thresholds and generate
// seeded synthetic prediction files.

#include <CLI11.hpp>

#include "camo/camo.hpp"
#include "camo/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"class-aware minority-optimized ensemble toolkit"};
    app.set_version_flag("--version", std::string(camo::kVersion));
    app.require_subcommand(1);

    camo::AggregateOptions agg;
    CLI::App* aggregate = app.add_subcommand("aggregate", "aggregate predictions into decisions with one strategy");
    aggregate->add_option("--predictions", agg.predictions, "prediction file (line-delimited JSON)")->required();
    aggregate->add_option("--config", agg.config, "run configuration (JSON)")->required();
    aggregate->add_option("--strategy", agg.strategy, "strategy id (" + camo::strategy_names_joined() + ")")->required();
    aggregate->add_option("--out", agg.out, "decisions output path")->required();

    camo::EvaluateOptions ev;
    CLI::App* evaluate = app.add_subcommand("evaluate", "score strategies against gold labels");
    evaluate->add_option("--predictions", ev.predictions, "prediction file with gold labels")->required();
    evaluate->add_option("--config", ev.config, "run configuration (JSON)")->required();
    evaluate->add_option("--strategies", ev.strategies, "comma-separated strategy ids")->required();
    evaluate->add_option("--out", ev.out, "report output path (JSON)")->required();

    camo::SweepOptions sw;
    CLI::App* sweep = app.add_subcommand("sweep", "evaluate camo across a parameter grid");
    sweep->add_option("--predictions", sw.predictions, "prediction file with gold labels")->required();
    sweep->add_option("--config", sw.config, "run configuration (JSON)")->required();
    sweep->add_option("--param", sw.param, "camo parameter name")->required();
    sweep->add_option("--values", sw.values, "comma-separated values")->required();
    sweep->add_option("--metric", sw.metric, "metric name (e.g. strict_macro_f1)")->required();
    sweep->add_option("--out", sw.out, "series output path (stdout when omitted)");

    camo::SynthOptions sy;
    CLI::App* synth = app.add_subcommand("synth", "generate a seeded synthetic prediction file");
    synth->add_option("--spec", sy.spec, "synthesis spec (JSON)")->required();
    synth->add_option("--out", sy.out, "prediction file output path")->required();

    CLI11_PARSE(app, argc, argv);

    if (aggregate->parsed()) return camo::cmd_aggregate(agg);
    if (evaluate->parsed()) return camo::cmd_evaluate(ev);
    if (sweep->parsed()) return camo::cmd_sweep(sw);
    if (synth->parsed()) return camo::cmd_synth(sy);
    return 1;
}
