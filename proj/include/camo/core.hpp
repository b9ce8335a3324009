#pragma once
// Domain vocabulary: classes, per-model predictions, ensemble configuration.
// Everything here is immutable after construction and safe to share across
// threads. Class labels are compared by exact string equality; no
// normalization is ever applied.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "camo/detail/text.hpp"
#include "camo/errors.hpp"

namespace camo {

using ClassLabel = std::string;

// class -> probability; used for optional per-model distributions
using Distribution = std::map<ClassLabel, double>;

inline constexpr double kPriorSumTolerance = 1e-9;
inline constexpr double kDistributionTolerance = 1e-6;

// The ordered class set, the minority subset and optional prior frequencies.
// Also owns the deterministic orderings derived from them: the rarest-first
// minority scan order and the tie-break rank used by score argmax.
class ClassRegistry {
public:
    ClassRegistry(std::vector<ClassLabel> classes,
                  std::vector<ClassLabel> minority,
                  std::optional<std::map<ClassLabel, double>> priors = std::nullopt)
        : classes_(std::move(classes)) {
        if (classes_.size() < 2) {
            throw Error(ErrorKind::InvariantViolation, "registry needs at least 2 classes, got " +
                                                           std::to_string(classes_.size()));
        }
        index_.reserve(classes_.size());
        for (std::size_t i = 0; i < classes_.size(); ++i) {
            if (classes_[i].empty()) {
                throw Error(ErrorKind::InvariantViolation, "empty class label at position " + std::to_string(i));
            }
            if (!index_.emplace(classes_[i], i).second) {
                throw Error(ErrorKind::InvariantViolation, "duplicate class label " + detail::quoted(classes_[i]));
            }
        }
        minority_mask_.assign(classes_.size(), false);
        for (const auto& m : minority) {
            auto it = index_.find(m);
            if (it == index_.end()) {
                throw Error(ErrorKind::InvariantViolation,
                            "minority class " + detail::quoted(m) + " is not in the class set");
            }
            minority_mask_[it->second] = true;
        }
        if (std::all_of(minority_mask_.begin(), minority_mask_.end(), [](bool b) { return b; })) {
            throw Error(ErrorKind::InvariantViolation, "minority set equals the class set; at least one majority class is required");
        }
        if (priors) {
            priors_.emplace(classes_.size(), 0.0);
            double sum = 0.0;
            for (const auto& [label, p] : *priors) {
                auto it = index_.find(label);
                if (it == index_.end()) {
                    throw Error(ErrorKind::InvariantViolation,
                                "prior given for unknown class " + detail::quoted(label));
                }
                if (!(p > 0.0)) {
                    throw Error(ErrorKind::InvariantViolation,
                                "prior for " + detail::quoted(label) + " must be > 0, got " + detail::fmt_shortest(p));
                }
                (*priors_)[it->second] = p;
                sum += p;
            }
            if (priors->size() != classes_.size()) {
                throw Error(ErrorKind::InvariantViolation, "priors must cover every class");
            }
            if (std::abs(sum - 1.0) > kPriorSumTolerance) {
                throw Error(ErrorKind::InvariantViolation,
                            "priors sum to " + detail::fmt_shortest(sum) + ", expected 1");
            }
        }
        build_orders();
    }

    std::size_t size() const noexcept { return classes_.size(); }
    const std::vector<ClassLabel>& classes() const noexcept { return classes_; }
    const ClassLabel& label(std::size_t idx) const { return classes_[idx]; }

    std::optional<std::size_t> find(std::string_view label) const {
        auto it = index_.find(std::string(label));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // index lookup that throws UnknownLabel
    std::size_t index_of(std::string_view label) const {
        auto idx = find(label);
        if (!idx) {
            throw Error(ErrorKind::UnknownLabel, "label " + detail::quoted(label) + " is not in the registry");
        }
        return *idx;
    }

    bool is_minority(std::size_t idx) const { return minority_mask_[idx]; }
    bool is_minority(std::string_view label) const { return minority_mask_[index_of(label)]; }
    bool has_minority() const noexcept { return !minority_scan_.empty(); }

    // minority class indices, rarest first (ascending prior, ties and the
    // no-priors case fall back to registry order)
    const std::vector<std::size_t>& minority_scan_order() const noexcept { return minority_scan_; }

    std::vector<ClassLabel> minority_labels() const {
        std::vector<ClassLabel> out;
        for (std::size_t i = 0; i < classes_.size(); ++i) {
            if (minority_mask_[i]) out.push_back(classes_[i]);
        }
        return out;
    }

    bool has_priors() const noexcept { return priors_.has_value(); }
    double prior(std::size_t idx) const {
        if (!priors_) {
            throw Error(ErrorKind::MissingPriors, "registry has no class priors");
        }
        return (*priors_)[idx];
    }
    const std::optional<std::vector<double>>& priors() const noexcept { return priors_; }

    // total tie-break order over classes: minority before majority, then
    // rarest first, then registry order; lower rank wins a tie
    std::size_t tie_rank(std::size_t idx) const { return tie_rank_[idx]; }

private:
    void build_orders() {
        std::vector<std::size_t> all(classes_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        auto rarity_before = [this](std::size_t a, std::size_t b) {
            if (priors_ && (*priors_)[a] != (*priors_)[b]) return (*priors_)[a] < (*priors_)[b];
            return a < b;
        };
        std::sort(all.begin(), all.end(), [&](std::size_t a, std::size_t b) {
            if (minority_mask_[a] != minority_mask_[b]) return static_cast<bool>(minority_mask_[a]);
            return rarity_before(a, b);
        });
        tie_rank_.assign(classes_.size(), 0);
        for (std::size_t r = 0; r < all.size(); ++r) tie_rank_[all[r]] = r;
        for (std::size_t idx : all) {
            if (minority_mask_[idx]) minority_scan_.push_back(idx);
        }
    }

    std::vector<ClassLabel> classes_;
    std::unordered_map<ClassLabel, std::size_t> index_;
    std::vector<bool> minority_mask_;
    std::optional<std::vector<double>> priors_;
    std::vector<std::size_t> minority_scan_;
    std::vector<std::size_t> tie_rank_;
};

// One model's vote for one instance.
struct ModelPrediction {
    std::string model_id;
    ClassLabel label;
    double confidence = 0.0;
    std::optional<Distribution> distribution;

    bool operator==(const ModelPrediction&) const = default;
};

// All model votes for one instance, optionally with the gold label.
struct PredictionRecord {
    std::string instance_id;
    std::vector<ModelPrediction> predictions;
    std::optional<ClassLabel> gold;

    std::size_t ensemble_size() const noexcept { return predictions.size(); }

    bool operator==(const PredictionRecord&) const = default;
};

// A threshold that resolves per minority class: explicit override first,
// global default otherwise.
template <typename T>
struct PerClassParam {
    T default_value{};
    std::map<ClassLabel, T> per_class;

    T for_class(const ClassLabel& c) const {
        auto it = per_class.find(c);
        return it == per_class.end() ? default_value : it->second;
    }
};

// Boost trigger constants. These are fixed decision-rule constants, not
// configuration: only the increments and caps are tunable.
inline constexpr double kBoostMeanConfLow = 0.7;
inline constexpr double kBoostMeanConfVeryLow = 0.6;

// Every tunable of the hierarchical decision procedure. tau1..tau5, tau8,
// tau9, theta1, theta2 and beta_base resolve per minority class; tau6, tau7,
// beta_max and alpha are global.
struct CamoConfig {
    PerClassParam<int> theta1{2, {}};   // C2 vote floor
    PerClassParam<int> theta2{3, {}};   // C2 second disjunct vote floor
    PerClassParam<double> tau1{0.70, {}};  // C2 mean-confidence gate
    PerClassParam<double> tau2{0.60, {}};  // C2 relaxed mean gate (needs theta2 votes)
    PerClassParam<double> tau3{0.82, {}};  // C2 max-confidence gate
    PerClassParam<double> tau4{0.82, {}};  // C3 isolated-vote confidence gate
    PerClassParam<double> tau5{0.66, {}};  // C3 ensemble-mean ceiling
    double tau6 = 0.66;                    // C4 low mean-confidence trigger
    double tau7 = 0.15;                    // C4 dispersion trigger
    PerClassParam<double> tau8{0.60, {}};  // C4 zero-vote disjunct threshold
    PerClassParam<double> tau9{0.75, {}};  // C6 dominance confidence gate
    PerClassParam<double> beta_base{1.5, {}};
    double beta_max = 2.5;
    std::array<double, 4> alpha{0.25, 0.25, 0.25, 0.25};
    // literal reading of C4's "V(c)>=1 or mean<tau8" disjunction, which can
    // select a class no model voted for; off by default
    bool allow_zero_vote_c4 = false;
};

namespace detail {

inline void check_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::InvariantViolation,
                    std::string(name) + " must lie in [0,1], got " + fmt_shortest(v));
    }
}

template <typename T, typename Fn>
void for_each_effective(const PerClassParam<T>& p, const ClassRegistry& registry, Fn&& fn) {
    fn(std::string("default"), p.default_value);
    for (const auto& [label, v] : p.per_class) {
        registry.index_of(label);  // overrides must name known classes
        fn(label, v);
    }
}

}  // namespace detail

// Enforces the CamoConfig invariants against a registry. Throws
// InvariantViolation naming the offending field.
inline void validate_config(const CamoConfig& cfg, const ClassRegistry& registry) {
    const std::array<std::pair<const char*, const PerClassParam<double>*>, 7> taus{{
        {"tau1", &cfg.tau1}, {"tau2", &cfg.tau2}, {"tau3", &cfg.tau3}, {"tau4", &cfg.tau4},
        {"tau5", &cfg.tau5}, {"tau8", &cfg.tau8}, {"tau9", &cfg.tau9},
    }};
    for (const auto& [name, p] : taus) {
        const char* n = name;
        detail::for_each_effective(*p, registry, [n](const std::string& scope, double v) {
            detail::check_unit_interval(v, (std::string(n) + "[" + scope + "]").c_str());
        });
    }
    detail::check_unit_interval(cfg.tau6, "tau6");
    detail::check_unit_interval(cfg.tau7, "tau7");
    for (std::size_t i = 0; i < cfg.alpha.size(); ++i) {
        if (!(cfg.alpha[i] >= 0.0)) {
            throw Error(ErrorKind::InvariantViolation,
                        "alpha" + std::to_string(i + 1) + " must be >= 0, got " + detail::fmt_shortest(cfg.alpha[i]));
        }
    }
    detail::for_each_effective(cfg.theta1, registry, [](const std::string& scope, int v) {
        if (v < 1) {
            throw Error(ErrorKind::InvariantViolation, "theta1[" + scope + "] must be >= 1, got " + std::to_string(v));
        }
    });
    // theta1 <= theta2 and 1 <= beta_base <= beta_max must hold for the
    // effective value of every minority class
    for (std::size_t idx : registry.minority_scan_order()) {
        const ClassLabel& c = registry.label(idx);
        int t1 = cfg.theta1.for_class(c);
        int t2 = cfg.theta2.for_class(c);
        if (!(1 <= t1 && t1 <= t2)) {
            throw Error(ErrorKind::InvariantViolation,
                        "need 1 <= theta1 <= theta2 for " + detail::quoted(c) + ", got theta1=" +
                            std::to_string(t1) + " theta2=" + std::to_string(t2));
        }
        double bb = cfg.beta_base.for_class(c);
        if (!(1.0 <= bb && bb <= cfg.beta_max)) {
            throw Error(ErrorKind::InvariantViolation,
                        "need 1 <= beta_base <= beta_max for " + detail::quoted(c) + ", got beta_base=" +
                            detail::fmt_shortest(bb) + " beta_max=" + detail::fmt_shortest(cfg.beta_max));
        }
    }
}

// Baseline configuration: the published anchors (theta1=2, tau3=tau4=0.82,
// tau5=tau6=0.66, boost range 1.5..2.5) plus interpolated defaults for the
// thresholds that were named but never quantified. Minority classes named
// "surprise" and "love" receive their published class-specific values.
inline CamoConfig default_config(const ClassRegistry& registry) {
    CamoConfig cfg;
    for (std::size_t idx : registry.minority_scan_order()) {
        const ClassLabel& c = registry.label(idx);
        if (c == "surprise") {
            cfg.beta_base.per_class[c] = 2.5;
            cfg.tau4.per_class[c] = 0.75;
        } else if (c == "love") {
            cfg.beta_base.per_class[c] = 1.8;
        }
    }
    validate_config(cfg, registry);
    return cfg;
}

// Checks every record invariant; returns the record untouched when valid.
// Idempotent by construction.
inline const PredictionRecord& validate_record(const PredictionRecord& record,
                                               const ClassRegistry& registry) {
    if (record.predictions.empty()) {
        throw Error(ErrorKind::EmptyEnsemble, "record " + detail::quoted(record.instance_id) + " has no predictions");
    }
    std::unordered_set<std::string> seen;
    seen.reserve(record.predictions.size());
    for (const auto& pred : record.predictions) {
        if (!seen.insert(pred.model_id).second) {
            throw Error(ErrorKind::DuplicateModel, "record " + detail::quoted(record.instance_id) +
                                                       " repeats model " + detail::quoted(pred.model_id));
        }
        if (!registry.find(pred.label)) {
            throw Error(ErrorKind::UnknownLabel, "record " + detail::quoted(record.instance_id) + ": label " +
                                                     detail::quoted(pred.label) + " is not in the registry");
        }
        if (!(pred.confidence >= 0.0 && pred.confidence <= 1.0)) {
            throw Error(ErrorKind::ValidationError,
                        "record " + detail::quoted(record.instance_id) + ": confidence " +
                            detail::fmt_shortest(pred.confidence) + " outside [0,1] for model " +
                            detail::quoted(pred.model_id));
        }
        if (pred.distribution) {
            const auto& dist = *pred.distribution;
            if (dist.size() != registry.size()) {
                throw Error(ErrorKind::BadDistribution,
                            "record " + detail::quoted(record.instance_id) + ": distribution of model " +
                                detail::quoted(pred.model_id) + " has " + std::to_string(dist.size()) +
                                " entries, registry has " + std::to_string(registry.size()));
            }
            double sum = 0.0;
            std::vector<bool> covered(registry.size(), false);
            double label_mass = -1.0;
            for (const auto& [cls, p] : dist) {
                auto idx = registry.find(cls);
                if (!idx || covered[*idx]) {
                    throw Error(ErrorKind::BadDistribution,
                                "record " + detail::quoted(record.instance_id) + ": distribution keys of model " +
                                    detail::quoted(pred.model_id) + " must be exactly the class set");
                }
                covered[*idx] = true;
                sum += p;
                if (cls == pred.label) label_mass = p;
            }
            if (std::abs(sum - 1.0) > kDistributionTolerance) {
                throw Error(ErrorKind::BadDistribution,
                            "record " + detail::quoted(record.instance_id) + ": distribution of model " +
                                detail::quoted(pred.model_id) + " sums to " + detail::fmt_shortest(sum));
            }
            if (std::abs(label_mass - pred.confidence) > kDistributionTolerance) {
                throw Error(ErrorKind::BadDistribution,
                            "record " + detail::quoted(record.instance_id) + ": model " + detail::quoted(pred.model_id) +
                                " confidence " + detail::fmt_shortest(pred.confidence) +
                                " disagrees with distribution[" + pred.label + "]=" + detail::fmt_shortest(label_mass));
            }
        }
    }
    if (record.gold && !registry.find(*record.gold)) {
        throw Error(ErrorKind::UnknownLabel, "record " + detail::quoted(record.instance_id) + ": gold label " +
                                                 detail::quoted(*record.gold) + " is not in the registry");
    }
    return record;
}

}  // namespace camo
