#pragma once
// Comparison ensemble strategies behind one interface: plurality voting,
// confidence-weighted voting, inverse-prior weighting, margin-based boundary
// adaptation, entropy-weighted voting and a linear stacked combiner. Each
// returns a Decision (label + per-class scores); only the hierarchical
// procedure fills stage/trace.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camo/core.hpp"
#include "camo/engine.hpp"
#include "camo/stats.hpp"

namespace camo {

enum class StrategyId : std::uint8_t {
    majority_vote,
    confidence_weighted,
    class_balanced,
    dynamic_threshold,
    uncertainty_aware,
    meta_ensemble,
    camo,
};

inline constexpr std::array<StrategyId, 7> kAllStrategies{
    StrategyId::majority_vote,    StrategyId::confidence_weighted, StrategyId::class_balanced,
    StrategyId::dynamic_threshold, StrategyId::uncertainty_aware,  StrategyId::meta_ensemble,
    StrategyId::camo,
};

inline std::string_view to_string(StrategyId id) {
    switch (id) {
        case StrategyId::majority_vote: return "majority_vote";
        case StrategyId::confidence_weighted: return "confidence_weighted";
        case StrategyId::class_balanced: return "class_balanced";
        case StrategyId::dynamic_threshold: return "dynamic_threshold";
        case StrategyId::uncertainty_aware: return "uncertainty_aware";
        case StrategyId::meta_ensemble: return "meta_ensemble";
        case StrategyId::camo: return "camo";
    }
    return "?";
}

inline std::optional<StrategyId> strategy_from_string(std::string_view name) {
    for (StrategyId id : kAllStrategies) {
        if (to_string(id) == name) return id;
    }
    return std::nullopt;
}

inline std::string strategy_names_joined() {
    std::string out;
    for (StrategyId id : kAllStrategies) {
        if (!out.empty()) out += ", ";
        out += to_string(id);
    }
    return out;
}

namespace detail {

// shared baseline tie-break: highest score, then highest mean voter
// confidence, then registry order
inline std::size_t argmax_with_vote_ties(const std::vector<double>& scores, const EnsembleStats& stats) {
    auto mean_voter_conf = [&](std::size_t idx) {
        return stats.votes[idx] == 0 ? 0.0 : stats.conf_sum[idx] / stats.votes[idx];
    };
    std::size_t best = 0;
    for (std::size_t idx = 1; idx < scores.size(); ++idx) {
        if (scores[idx] > scores[best] ||
            (scores[idx] == scores[best] && mean_voter_conf(idx) > mean_voter_conf(best))) {
            best = idx;
        }
    }
    return best;
}

inline Decision scored_decision(std::vector<double> scores, const EnsembleStats& stats,
                                const ClassRegistry& registry) {
    const std::size_t best = argmax_with_vote_ties(scores, stats);
    Decision d;
    d.label = registry.label(best);
    d.scores = scores_as_map(scores, registry);
    return d;
}

}  // namespace detail

// Simple plurality; ties broken by mean voter confidence, then registry order.
inline Decision majority_vote(const PredictionRecord&, const EnsembleStats& stats,
                              const ClassRegistry& registry) {
    std::vector<double> scores(stats.votes.begin(), stats.votes.end());
    return detail::scored_decision(std::move(scores), stats, registry);
}

// argmax of per-class confidence sums.
inline Decision confidence_weighted(const PredictionRecord&, const EnsembleStats& stats,
                                    const ClassRegistry& registry) {
    return detail::scored_decision(stats.conf_sum, stats, registry);
}

// Confidence sums weighted by inverse class frequency; needs registry priors.
inline Decision class_balanced(const PredictionRecord&, const EnsembleStats& stats,
                               const ClassRegistry& registry) {
    if (!registry.has_priors()) {
        throw Error(ErrorKind::MissingPriors, "class_balanced needs class priors in the registry");
    }
    std::vector<double> scores(registry.size());
    for (std::size_t idx = 0; idx < registry.size(); ++idx) {
        scores[idx] = stats.conf_sum[idx] / registry.prior(idx);
    }
    return detail::scored_decision(std::move(scores), stats, registry);
}

// Confidence-weighted scores with an adaptive boundary: when a majority
// class wins by less than `margin` (per model) over a minority runner-up,
// the runner-up takes the decision. Only flips toward minority classes.
inline Decision dynamic_threshold(const PredictionRecord&, const EnsembleStats& stats,
                                  const ClassRegistry& registry, double margin) {
    Decision d = detail::scored_decision(stats.conf_sum, stats, registry);
    const std::size_t k = registry.size();
    const std::size_t top = registry.index_of(d.label);
    if (registry.is_minority(top)) return d;

    auto mean_voter_conf = [&](std::size_t idx) {
        return stats.votes[idx] == 0 ? 0.0 : stats.conf_sum[idx] / stats.votes[idx];
    };
    std::optional<std::size_t> runner;
    for (std::size_t idx = 0; idx < k; ++idx) {
        if (idx == top) continue;
        if (!runner || stats.conf_sum[idx] > stats.conf_sum[*runner] ||
            (stats.conf_sum[idx] == stats.conf_sum[*runner] &&
             mean_voter_conf(idx) > mean_voter_conf(*runner))) {
            runner = idx;
        }
    }
    if (runner && registry.is_minority(*runner) &&
        (stats.conf_sum[top] - stats.conf_sum[*runner]) / stats.ensemble_size < margin) {
        d.label = registry.label(*runner);
    }
    return d;
}

namespace detail {

// normalized Shannon entropy in [0,1]; natural log, 0*log0 = 0
inline double normalized_entropy(const Distribution& dist, std::size_t k) {
    double h = 0.0;
    for (const auto& [cls, p] : dist) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h / std::log(static_cast<double>(k));
}

}  // namespace detail

// Votes weighted by each model's distribution sharpness: w = 1 - H/log K.
// One-hot voters get full weight, uniform voters none.
inline Decision uncertainty_aware(const PredictionRecord& record, const EnsembleStats& stats,
                                  const ClassRegistry& registry) {
    std::vector<double> scores(registry.size(), 0.0);
    for (const auto& pred : record.predictions) {
        if (!pred.distribution) {
            throw Error(ErrorKind::MissingDistribution,
                        "uncertainty_aware: model " + detail::quoted(pred.model_id) + " in record " +
                            detail::quoted(record.instance_id) + " carries no distribution");
        }
        const double w = 1.0 - detail::normalized_entropy(*pred.distribution, registry.size());
        scores[registry.index_of(pred.label)] += w * pred.confidence;
    }
    return detail::scored_decision(std::move(scores), stats, registry);
}

struct MetaFitOptions {
    double learning_rate = 0.1;
    int epochs = 500;
    std::uint64_t seed = 0;
};

// Linear stacked combiner over per-model one-hot-times-confidence features,
// trained with full-batch gradient descent on softmax cross-entropy.
// Deterministic: zero initialization and no data shuffling, so the recorded
// seed only documents the run.
class MetaModel {
public:
    using FitOptions = MetaFitOptions;

    static MetaModel fit(const std::vector<PredictionRecord>& training, const ClassRegistry& registry,
                         FitOptions options = {}) {
        if (training.empty()) {
            throw Error(ErrorKind::NoGoldLabels, "meta_ensemble: empty training set");
        }
        MetaModel meta;
        meta.options_ = options;
        for (const auto& p : training.front().predictions) meta.model_order_.push_back(p.model_id);
        std::sort(meta.model_order_.begin(), meta.model_order_.end());
        meta.class_order_ = registry.classes();

        const std::size_t k = registry.size();
        const std::size_t dim = meta.model_order_.size() * k + 1;  // +1 bias
        const std::size_t n = training.size();

        std::vector<std::vector<double>> features(n);
        std::vector<std::size_t> targets(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& rec = training[i];
            if (!rec.gold) {
                throw Error(ErrorKind::NoGoldLabels,
                            "meta_ensemble: record " + detail::quoted(rec.instance_id) + " has no gold label");
            }
            targets[i] = registry.index_of(*rec.gold);
            features[i] = meta.featurize(rec, registry);
        }

        meta.weights_.assign(k, std::vector<double>(dim, 0.0));
        std::vector<double> logits(k), probs(k);
        std::vector<std::vector<double>> grad(k, std::vector<double>(dim, 0.0));
        for (int epoch = 0; epoch < options.epochs; ++epoch) {
            for (auto& row : grad) std::fill(row.begin(), row.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                meta.forward(features[i], logits, probs);
                for (std::size_t c = 0; c < k; ++c) {
                    const double delta = probs[c] - (c == targets[i] ? 1.0 : 0.0);
                    if (delta == 0.0) continue;
                    auto& g = grad[c];
                    const auto& x = features[i];
                    for (std::size_t j = 0; j < dim; ++j) g[j] += delta * x[j];
                }
            }
            const double step = options.learning_rate / static_cast<double>(n);
            for (std::size_t c = 0; c < k; ++c) {
                for (std::size_t j = 0; j < dim; ++j) meta.weights_[c][j] -= step * grad[c][j];
            }
        }
        meta.fitted_ = true;
        return meta;
    }

    Decision predict(const PredictionRecord& record, const ClassRegistry& registry) const {
        if (!fitted_) {
            throw Error(ErrorKind::UnfittedMeta, "meta_ensemble used before fit");
        }
        std::vector<double> x = featurize(record, registry);
        std::vector<double> logits(registry.size()), probs(registry.size());
        forward(x, logits, probs);
        std::size_t best = 0;
        for (std::size_t c = 1; c < probs.size(); ++c) {
            if (probs[c] > probs[best]) best = c;
        }
        Decision d;
        d.label = registry.label(best);
        d.scores = detail::scores_as_map(probs, registry);
        return d;
    }

    bool fitted() const noexcept { return fitted_; }
    const std::vector<std::string>& model_order() const noexcept { return model_order_; }
    const std::vector<ClassLabel>& class_order() const noexcept { return class_order_; }
    const std::vector<std::vector<double>>& weights() const noexcept { return weights_; }
    const FitOptions& options() const noexcept { return options_; }

    // used by the io module to rebuild a serialized model
    static MetaModel from_parts(std::vector<std::string> model_order, std::vector<ClassLabel> class_order,
                                std::vector<std::vector<double>> weights, FitOptions options) {
        MetaModel meta;
        meta.model_order_ = std::move(model_order);
        meta.class_order_ = std::move(class_order);
        meta.weights_ = std::move(weights);
        meta.options_ = options;
        meta.fitted_ = true;
        return meta;
    }

private:
    std::vector<double> featurize(const PredictionRecord& record, const ClassRegistry& registry) const {
        const std::size_t k = registry.size();
        std::vector<double> x(model_order_.size() * k + 1, 0.0);
        for (const auto& pred : record.predictions) {
            auto it = std::lower_bound(model_order_.begin(), model_order_.end(), pred.model_id);
            if (it == model_order_.end() || *it != pred.model_id) {
                throw Error(ErrorKind::InconsistentM, "meta_ensemble: model " + detail::quoted(pred.model_id) +
                                                          " was not present at fit time");
            }
            const std::size_t slot = static_cast<std::size_t>(it - model_order_.begin());
            x[slot * k + registry.index_of(pred.label)] = pred.confidence;
        }
        if (record.predictions.size() != model_order_.size()) {
            throw Error(ErrorKind::InconsistentM,
                        "meta_ensemble: record " + detail::quoted(record.instance_id) + " has " +
                            std::to_string(record.predictions.size()) + " models, fitted on " +
                            std::to_string(model_order_.size()));
        }
        x.back() = 1.0;  // bias
        return x;
    }

    void forward(const std::vector<double>& x, std::vector<double>& logits, std::vector<double>& probs) const {
        const std::size_t k = weights_.size();
        double max_logit = -1e300;
        for (std::size_t c = 0; c < k; ++c) {
            double z = 0.0;
            const auto& w = weights_[c];
            for (std::size_t j = 0; j < x.size(); ++j) z += w[j] * x[j];
            logits[c] = z;
            max_logit = std::max(max_logit, z);
        }
        double sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            probs[c] = std::exp(logits[c] - max_logit);
            sum += probs[c];
        }
        for (double& p : probs) p /= sum;
    }

    std::vector<std::string> model_order_;
    std::vector<ClassLabel> class_order_;
    std::vector<std::vector<double>> weights_;  // K x (M*K + 1)
    FitOptions options_;
    bool fitted_ = false;
};

// Per-strategy tunables resolved from the run configuration.
struct StrategyParams {
    double dynamic_margin = 0.1;
    MetaModel::FitOptions meta;
};

// Ties a registry, a camo configuration and per-strategy parameters into a
// single dispatch point. Prediction-time dispatch is pure; the fitted meta
// model is immutable once set.
class StrategyRunner {
public:
    StrategyRunner(const ClassRegistry& registry, CamoConfig config, StrategyParams params = {})
        : registry_(&registry), config_(std::move(config)), params_(params) {}

    const ClassRegistry& registry() const noexcept { return *registry_; }
    const CamoConfig& config() const noexcept { return config_; }
    CamoConfig& config() noexcept { return config_; }
    const StrategyParams& params() const noexcept { return params_; }

    void fit_meta(const std::vector<PredictionRecord>& training) {
        meta_ = MetaModel::fit(training, *registry_, params_.meta);
    }
    void set_meta(MetaModel meta) { meta_ = std::move(meta); }
    const std::optional<MetaModel>& meta() const noexcept { return meta_; }

    Decision decide(StrategyId id, const PredictionRecord& record, const EnsembleStats& stats,
                    bool with_trace = true) const {
        switch (id) {
            case StrategyId::majority_vote: return camo::majority_vote(record, stats, *registry_);
            case StrategyId::confidence_weighted: return camo::confidence_weighted(record, stats, *registry_);
            case StrategyId::class_balanced: return camo::class_balanced(record, stats, *registry_);
            case StrategyId::dynamic_threshold:
                return camo::dynamic_threshold(record, stats, *registry_, params_.dynamic_margin);
            case StrategyId::uncertainty_aware: return camo::uncertainty_aware(record, stats, *registry_);
            case StrategyId::meta_ensemble:
                if (!meta_) {
                    throw Error(ErrorKind::UnfittedMeta, "meta_ensemble used before fit");
                }
                return meta_->predict(record, *registry_);
            case StrategyId::camo: return camo::decide(record, stats, *registry_, config_, with_trace);
        }
        throw Error(ErrorKind::ValidationError, "unknown strategy id");
    }

private:
    const ClassRegistry* registry_;
    CamoConfig config_;
    StrategyParams params_;
    std::optional<MetaModel> meta_;
};

}  // namespace camo
