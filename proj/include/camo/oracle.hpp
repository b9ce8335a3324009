#pragma once
// Brute-force re-statement of the hierarchical decision procedure, used
// exclusively to cross-validate the engine. Shares no evaluation code with
// engine.hpp: statistics are recomputed here with naive loops over the raw
// record and every stage predicate is transliterated directly. Slow on
// purpose; do not use outside tests and audits.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "camo/core.hpp"
#include "camo/engine.hpp"  // Decision / Stage types only
#include "camo/stats.hpp"

namespace camo {

// Same signature as decide(); the stats argument is accepted for interface
// parity but everything is recomputed from the record.
inline Decision oracle_decide(const PredictionRecord& record, const EnsembleStats& /*stats*/,
                              const ClassRegistry& registry, const CamoConfig& config) {
    const int m = static_cast<int>(record.predictions.size());

    std::map<ClassLabel, int> votes;
    for (const auto& cls : registry.classes()) votes[cls] = 0;
    for (const auto& p : record.predictions) votes[p.label] += 1;

    double mean = 0.0;
    for (const auto& p : record.predictions) mean += p.confidence;
    mean /= m;

    double var = 0.0;
    for (const auto& p : record.predictions) var += (p.confidence - mean) * (p.confidence - mean);
    const double stddev = std::sqrt(var / m);

    // rarest-first minority order, recomputed from scratch
    std::vector<ClassLabel> minority;
    for (const auto& cls : registry.classes()) {
        if (registry.is_minority(registry.index_of(cls))) minority.push_back(cls);
    }
    std::stable_sort(minority.begin(), minority.end(), [&](const ClassLabel& a, const ClassLabel& b) {
        if (registry.has_priors()) {
            double pa = registry.prior(registry.index_of(a));
            double pb = registry.prior(registry.index_of(b));
            if (pa != pb) return pa < pb;
        }
        return registry.index_of(a) < registry.index_of(b);
    });

    auto mean_conf_of = [&](const ClassLabel& c) {
        double sum = 0.0;
        int n = 0;
        for (const auto& p : record.predictions) {
            if (p.label == c) {
                sum += p.confidence;
                n += 1;
            }
        }
        return n == 0 ? 0.0 : sum / n;
    };
    auto max_conf_of = [&](const ClassLabel& c) {
        double best = 0.0;
        for (const auto& p : record.predictions) {
            if (p.label == c) best = std::max(best, p.confidence);
        }
        return best;
    };

    Decision out;
    auto finish = [&](Stage stage, const ClassLabel& label) {
        out.stage = stage;
        out.label = label;
        return out;
    };

    // C1
    for (const auto& cls : registry.classes()) {
        if (votes[cls] == m) return finish(Stage::C1, cls);
    }

    // C2
    for (const auto& c : minority) {
        if (votes[c] < config.theta1.for_class(c)) continue;
        bool ok = mean_conf_of(c) > config.tau1.for_class(c);
        if (!ok) ok = votes[c] >= config.theta2.for_class(c) && mean_conf_of(c) > config.tau2.for_class(c);
        if (!ok) ok = max_conf_of(c) > config.tau3.for_class(c);
        if (ok) return finish(Stage::C2, c);
    }

    // C3
    for (const auto& c : minority) {
        if (votes[c] == 1 && max_conf_of(c) > config.tau4.for_class(c) && mean < config.tau5.for_class(c)) {
            return finish(Stage::C3, c);
        }
    }

    // C4
    if (mean < config.tau6 || stddev > config.tau7) {
        std::optional<ClassLabel> chosen;
        double chosen_max = -1.0;
        for (const auto& c : minority) {
            if (votes[c] >= 1 && max_conf_of(c) > chosen_max) {
                chosen = c;
                chosen_max = max_conf_of(c);
            }
        }
        if (!chosen && config.allow_zero_vote_c4) {
            for (const auto& c : minority) {
                if (mean < config.tau8.for_class(c)) {
                    chosen = c;
                    break;
                }
            }
        }
        if (chosen) return finish(Stage::C4, *chosen);
    }

    // C5 scoring
    std::map<ClassLabel, double> score;
    for (const auto& cls : registry.classes()) {
        double s = 0.0;
        for (const auto& p : record.predictions) {
            if (p.label == cls) s += p.confidence;
        }
        if (s != 0.0 && registry.is_minority(registry.index_of(cls))) {
            double b = config.beta_base.for_class(cls);
            if (votes[cls] >= 2) b += config.alpha[0];
            if (votes[cls] >= 3) b += config.alpha[1];
            if (mean < 0.7) b += config.alpha[2];
            if (mean < 0.6) b += config.alpha[3];
            s *= std::min(b, config.beta_max);
        }
        score[cls] = s;
    }
    out.scores = score;

    // C6
    int top_votes = 0;
    for (const auto& [cls, v] : votes) top_votes = std::max(top_votes, v);
    for (const auto& c : minority) {
        if (votes[c] == top_votes && max_conf_of(c) > config.tau9.for_class(c)) {
            return finish(Stage::C6, c);
        }
    }

    // C7: argmax score; ties go to minority, then rarest, then registry order
    std::vector<ClassLabel> order = registry.classes();
    std::stable_sort(order.begin(), order.end(), [&](const ClassLabel& a, const ClassLabel& b) {
        const bool min_a = registry.is_minority(registry.index_of(a));
        const bool min_b = registry.is_minority(registry.index_of(b));
        if (min_a != min_b) return min_a;
        if (registry.has_priors()) {
            double pa = registry.prior(registry.index_of(a));
            double pb = registry.prior(registry.index_of(b));
            if (pa != pb) return pa < pb;
        }
        return registry.index_of(a) < registry.index_of(b);
    });
    ClassLabel best = order.front();
    for (const auto& cls : order) {
        if (score[cls] > score[best]) best = cls;
    }
    return finish(Stage::C7, best);
}

}  // namespace camo
