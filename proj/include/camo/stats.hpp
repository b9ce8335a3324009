#pragma once
// Per-instance aggregate statistics consumed by every strategy: vote counts,
// ensemble-wide confidence mean/dispersion, and per-minority-class voter
// confidence summaries. Computed once per record; strategies never recompute.

#include <cmath>
#include <cstddef>
#include <vector>

#include "camo/core.hpp"

namespace camo {

// All vectors are indexed by registry class index. minority_mean_conf and
// minority_max_conf are meaningful for minority classes only (zero when the
// class received no votes); majority entries are left at zero.
struct EnsembleStats {
    std::vector<int> votes;                  // V(c)
    std::vector<double> conf_sum;            // per-class sum of voter confidences (feeds scoring)
    std::vector<double> minority_mean_conf;  // mean voter confidence per minority class
    std::vector<double> minority_max_conf;   // max voter confidence per minority class
    double mean_conf = 0.0;                  // mean of all M confidences
    double conf_std = 0.0;                   // population standard deviation (divide by M)
    int ensemble_size = 0;                   // M

    int votes_for(const ClassRegistry& registry, const ClassLabel& c) const {
        return votes[registry.index_of(c)];
    }
};

inline EnsembleStats compute_stats(const PredictionRecord& record, const ClassRegistry& registry) {
    const std::size_t k = registry.size();
    EnsembleStats s;
    s.votes.assign(k, 0);
    s.conf_sum.assign(k, 0.0);
    s.minority_mean_conf.assign(k, 0.0);
    s.minority_max_conf.assign(k, 0.0);
    s.ensemble_size = static_cast<int>(record.predictions.size());

    double total = 0.0;
    for (const auto& pred : record.predictions) {
        const std::size_t idx = registry.index_of(pred.label);
        s.votes[idx] += 1;
        s.conf_sum[idx] += pred.confidence;
        total += pred.confidence;
        if (registry.is_minority(idx) && pred.confidence > s.minority_max_conf[idx]) {
            s.minority_max_conf[idx] = pred.confidence;
        }
    }
    const double m = static_cast<double>(s.ensemble_size);
    s.mean_conf = total / m;

    double sq = 0.0;
    for (const auto& pred : record.predictions) {
        const double d = pred.confidence - s.mean_conf;
        sq += d * d;
    }
    s.conf_std = std::sqrt(sq / m);

    for (std::size_t idx : registry.minority_scan_order()) {
        if (s.votes[idx] > 0) {
            s.minority_mean_conf[idx] = s.conf_sum[idx] / s.votes[idx];
        }
    }
    return s;
}

}  // namespace camo
