#pragma once
// Hierarchical ensemble decision procedure. Seven stages are evaluated in
// strict order and the first satisfied condition determines the label:
//
//   C1 unanimity
//   C2 strong minority consensus (vote floor + confidence gates)
//   C3 isolated high-confidence minority vote under low ensemble confidence
//   C4 uncertainty-triggered minority prioritization
//   C5 confidence-weighted scoring with dynamic minority boost (no trigger;
//      feeds C6/C7)
//   C6 minority vote tied for dominance with a confident voter
//   C7 argmax of the boosted scores (always fires; guaranteed label)
//
// Minority classes are scanned rarest first in C2/C3/C4/C6. Every decision
// carries a trace of exactly the stages evaluated, in order, so downstream
// consumers can explain why a label was chosen.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "camo/core.hpp"
#include "camo/stats.hpp"

namespace camo {

enum class Stage : std::uint8_t { C1 = 1, C2, C3, C4, C5, C6, C7 };

inline std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::C1: return "C1";
        case Stage::C2: return "C2";
        case Stage::C3: return "C3";
        case Stage::C4: return "C4";
        case Stage::C5: return "C5";
        case Stage::C6: return "C6";
        case Stage::C7: return "C7";
    }
    return "?";
}

inline std::optional<Stage> stage_from_string(std::string_view s) {
    if (s.size() == 2 && s[0] == 'C' && s[1] >= '1' && s[1] <= '7') {
        return static_cast<Stage>(s[1] - '0');
    }
    return std::nullopt;
}

struct TraceEntry {
    Stage stage;
    bool fired;
    std::string detail;

    bool operator==(const TraceEntry&) const = default;
};

// Final label plus provenance. stage/scores are set on the hierarchical
// path; baseline strategies fill label and scores only.
struct Decision {
    ClassLabel label;
    std::optional<Stage> stage;
    std::optional<std::map<ClassLabel, double>> scores;
    std::vector<TraceEntry> trace;

    bool operator==(const Decision&) const = default;
};

// Dynamic minority boost: base increment plus one step per fired trigger
// (v>=2, v>=3, mean<0.7, mean<0.6), capped at beta_max. The 0.7/0.6
// constants are fixed decision-rule values, not configuration.
inline double boost_factor(const ClassLabel& c, int votes, double mean_conf,
                           const CamoConfig& config, const ClassRegistry& registry) {
    if (!registry.is_minority(registry.index_of(c))) {
        throw Error(ErrorKind::NotMinorityClass, detail::quoted(c) + " is not a minority class");
    }
    double b = config.beta_base.for_class(c);
    if (votes >= 2) b += config.alpha[0];
    if (votes >= 3) b += config.alpha[1];
    if (mean_conf < kBoostMeanConfLow) b += config.alpha[2];
    if (mean_conf < kBoostMeanConfVeryLow) b += config.alpha[3];
    return std::min(b, config.beta_max);
}

// S(c): per-class sum of voter confidences, multiplied by the boost for
// minority classes. Classes with zero votes score 0; zero-confidence voters
// count toward V(c) but add nothing here.
inline std::vector<double> class_scores(const EnsembleStats& stats, const ClassRegistry& registry,
                                        const CamoConfig& config) {
    std::vector<double> scores(registry.size(), 0.0);
    for (std::size_t idx = 0; idx < registry.size(); ++idx) {
        double s = stats.conf_sum[idx];
        if (s != 0.0 && registry.is_minority(idx)) {
            s *= boost_factor(registry.label(idx), stats.votes[idx], stats.mean_conf, config, registry);
        }
        scores[idx] = s;
    }
    return scores;
}

namespace detail {

inline std::map<ClassLabel, double> scores_as_map(const std::vector<double>& scores,
                                                  const ClassRegistry& registry) {
    std::map<ClassLabel, double> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out.emplace(registry.label(i), scores[i]);
    }
    return out;
}

}  // namespace detail

// First-satisfied-condition evaluation of the seven stages. Pure function;
// with_trace=false skips building the explanation strings (the decision
// itself is unchanged), which matters on multi-million-record batches.
inline Decision decide(const PredictionRecord& record, const EnsembleStats& stats,
                       const ClassRegistry& registry, const CamoConfig& config,
                       bool with_trace = true) {
    (void)record;  // stats carry everything the stages need
    const int m = stats.ensemble_size;
    Decision out;
    auto note = [&](Stage stage, bool fired, auto&&... parts) {
        if (!with_trace) return;
        std::string detail;
        (detail.append(parts), ...);
        out.trace.push_back(TraceEntry{stage, fired, std::move(detail)});
    };
    auto fire = [&](Stage stage, std::size_t idx) {
        out.label = registry.label(idx);
        out.stage = stage;
        return out;
    };

    // C1 unanimity
    for (std::size_t idx = 0; idx < registry.size(); ++idx) {
        if (stats.votes[idx] == m) {
            note(Stage::C1, true, "all ", std::to_string(m), " votes for ", detail::quoted(registry.label(idx)));
            return fire(Stage::C1, idx);
        }
    }
    note(Stage::C1, false, "no unanimous class");

    // C2 strong minority consensus, rarest first
    for (std::size_t idx : registry.minority_scan_order()) {
        const ClassLabel& c = registry.label(idx);
        const int v = stats.votes[idx];
        if (v < config.theta1.for_class(c)) continue;
        const double mean_c = stats.minority_mean_conf[idx];
        const double max_c = stats.minority_max_conf[idx];
        const bool by_mean = mean_c > config.tau1.for_class(c);
        const bool by_depth = v >= config.theta2.for_class(c) && mean_c > config.tau2.for_class(c);
        const bool by_max = max_c > config.tau3.for_class(c);
        if (by_mean || by_depth || by_max) {
            note(Stage::C2, true, detail::quoted(c), ": V=", std::to_string(v),
                 " mean=", detail::fmt_fixed(mean_c, 4), " max=", detail::fmt_fixed(max_c, 4));
            return fire(Stage::C2, idx);
        }
    }
    note(Stage::C2, false, "no minority class passes the consensus gates");

    // C3 isolated high-confidence minority vote
    for (std::size_t idx : registry.minority_scan_order()) {
        const ClassLabel& c = registry.label(idx);
        if (stats.votes[idx] == 1 && stats.minority_max_conf[idx] > config.tau4.for_class(c) &&
            stats.mean_conf < config.tau5.for_class(c)) {
            note(Stage::C3, true, detail::quoted(c), ": single vote at ",
                 detail::fmt_fixed(stats.minority_max_conf[idx], 4), ", ensemble mean ",
                 detail::fmt_fixed(stats.mean_conf, 4));
            return fire(Stage::C3, idx);
        }
    }
    note(Stage::C3, false, "no isolated high-confidence minority vote");

    // C4 uncertainty-triggered minority prioritization: among voted minority
    // classes pick the highest max-confidence (ties rarest first). The
    // zero-vote disjunct only selects when allow_zero_vote_c4 is set.
    const bool uncertain = stats.mean_conf < config.tau6 || stats.conf_std > config.tau7;
    if (uncertain) {
        std::optional<std::size_t> pick;
        for (std::size_t idx : registry.minority_scan_order()) {
            if (stats.votes[idx] >= 1 && (!pick || stats.minority_max_conf[idx] > stats.minority_max_conf[*pick])) {
                pick = idx;
            }
        }
        if (!pick && config.allow_zero_vote_c4) {
            for (std::size_t idx : registry.minority_scan_order()) {
                if (stats.mean_conf < config.tau8.for_class(registry.label(idx))) {
                    pick = idx;
                    break;
                }
            }
        }
        if (pick) {
            note(Stage::C4, true, "uncertain (mean=", detail::fmt_fixed(stats.mean_conf, 4),
                 ", std=", detail::fmt_fixed(stats.conf_std, 4), "); picked ",
                 detail::quoted(registry.label(*pick)));
            return fire(Stage::C4, *pick);
        }
        note(Stage::C4, false, "uncertain but no eligible minority class");
    } else {
        note(Stage::C4, false, "ensemble not uncertain");
    }

    // C5 boosted confidence-weighted scores (no trigger of its own)
    std::vector<double> scores = class_scores(stats, registry, config);
    note(Stage::C5, false, "scores computed");
    out.scores = detail::scores_as_map(scores, registry);

    // C6 minority vote tied for dominance
    int max_votes = 0;
    for (int v : stats.votes) max_votes = std::max(max_votes, v);
    for (std::size_t idx : registry.minority_scan_order()) {
        const ClassLabel& c = registry.label(idx);
        if (stats.votes[idx] == max_votes && stats.minority_max_conf[idx] > config.tau9.for_class(c)) {
            note(Stage::C6, true, detail::quoted(c), ": V=", std::to_string(max_votes),
                 " ties the maximum, max conf ", detail::fmt_fixed(stats.minority_max_conf[idx], 4));
            return fire(Stage::C6, idx);
        }
    }
    note(Stage::C6, false, "no dominant minority vote");

    // C7 argmax of S(c); ties resolved by the registry tie rank (minority
    // first, rarest first, registry order)
    std::size_t best = 0;
    for (std::size_t idx = 1; idx < scores.size(); ++idx) {
        if (scores[idx] > scores[best] ||
            (scores[idx] == scores[best] && registry.tie_rank(idx) < registry.tie_rank(best))) {
            best = idx;
        }
    }
    note(Stage::C7, true, "argmax S = ", detail::quoted(registry.label(best)));
    return fire(Stage::C7, best);
}

}  // namespace camo
