#pragma once
// Seeded synthetic ensemble generator: gold labels drawn from a configured
// imbalance, per-model votes correct with per-class probability, confidences
// sampled from a two-regime range (correct vs wrong votes). Stands in for
// the non-reproducible LLM runs when benchmarking strategies.
//
// Reproducibility: mt19937_64 (output sequence fixed by the standard) with
// explicit 53-bit uniform and CDF-inversion draws; no std::distribution is
// used, so a (spec, seed) pair yields byte-identical records on every
// platform. Draw order per record: gold, then per model correctness,
// wrong-label pick (only when wrong), confidence.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "camo/core.hpp"

namespace camo {

// Deterministic uniform/categorical sampling on top of mt19937_64.
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0, 1) with 53 bits of precision
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // index with probability weights[i] / sum(weights); CDF inversion in
    // index order
    std::size_t categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform01() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return i;
        }
        return weights.size() - 1;
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

struct ConfidenceModel {
    double correct_lo = 0.6;
    double correct_hi = 0.99;
    double wrong_lo = 0.3;
    double wrong_hi = 0.8;
};

struct SynthSpec {
    ClassRegistry registry;
    int models = 5;
    int instances = 0;
    std::vector<double> class_distribution;  // by registry class index, sums to 1
    std::vector<double> accuracy;            // per class: P(model votes gold | gold)
    ConfidenceModel confidence;
    bool emit_distributions = false;
    std::uint64_t seed = 0;

    void validate() const {
        if (models < 1) {
            throw Error(ErrorKind::InvariantViolation, "synth spec needs at least one model");
        }
        if (instances < 0) {
            throw Error(ErrorKind::InvariantViolation, "synth spec instance count must be >= 0");
        }
        if (class_distribution.size() != registry.size() || accuracy.size() != registry.size()) {
            throw Error(ErrorKind::InvariantViolation,
                        "class_distribution and accuracy must cover every registry class");
        }
        double sum = 0.0;
        for (double p : class_distribution) {
            if (!(p >= 0.0)) {
                throw Error(ErrorKind::InvariantViolation, "class_distribution entries must be >= 0");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw Error(ErrorKind::InvariantViolation,
                        "class_distribution sums to " + detail::fmt_shortest(sum) + ", expected 1");
        }
        for (double a : accuracy) {
            if (!(a >= 0.0 && a <= 1.0)) {
                throw Error(ErrorKind::InvariantViolation, "accuracy entries must lie in [0,1]");
            }
        }
        const auto& c = confidence;
        for (auto [lo, hi] : {std::pair{c.correct_lo, c.correct_hi}, std::pair{c.wrong_lo, c.wrong_hi}}) {
            if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) {
                throw Error(ErrorKind::InvariantViolation, "confidence ranges must satisfy 0 <= lo <= hi <= 1");
            }
        }
    }
};

namespace detail {

inline std::string synth_model_id(int index, int models) {
    std::string suffix = std::to_string(index + 1);
    const std::size_t width = std::to_string(models).size();
    return "m" + std::string(width - suffix.size(), '0') + suffix;
}

// remaining probability mass spread over the non-predicted classes,
// proportional to the class distribution (uniform fallback when the
// remaining mass has no prior support)
inline Distribution synth_distribution(const SynthSpec& spec, std::size_t label_idx, double confidence) {
    const std::size_t k = spec.registry.size();
    Distribution dist;
    double rest_weight = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (i != label_idx) rest_weight += spec.class_distribution[i];
    }
    for (std::size_t i = 0; i < k; ++i) {
        double p;
        if (i == label_idx) {
            p = confidence;
        } else if (rest_weight > 0.0) {
            p = (1.0 - confidence) * spec.class_distribution[i] / rest_weight;
        } else {
            p = (1.0 - confidence) / static_cast<double>(k - 1);
        }
        dist.emplace(spec.registry.label(i), p);
    }
    return dist;
}

}  // namespace detail

// Generates records indexed [first, first+count) of the spec's stream into
// `out`. Each record consumes a fixed number of draws from its own
// record-keyed generator, so any contiguous chunking of [0, n) produces the
// same records as one straight pass.
inline void generate_range(const SynthSpec& spec, int first, int count,
                           std::vector<PredictionRecord>& out) {
    const std::size_t k = spec.registry.size();
    for (int i = first; i < first + count; ++i) {
        // per-record substream: seed mixed with the record index (splitmix64
        // finalizer) keeps chunked and sequential generation identical
        std::uint64_t z = spec.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        PortableRng rng(z ^ (z >> 31));

        PredictionRecord rec;
        rec.instance_id = "synth-" + std::to_string(i);
        const std::size_t gold = rng.categorical(spec.class_distribution);
        rec.gold = spec.registry.label(gold);
        rec.predictions.reserve(spec.models);
        for (int mi = 0; mi < spec.models; ++mi) {
            ModelPrediction pred;
            pred.model_id = detail::synth_model_id(mi, spec.models);
            const bool correct = rng.uniform01() < spec.accuracy[gold];
            std::size_t label_idx;
            if (correct) {
                label_idx = gold;
            } else {
                std::vector<double> weights(k, 0.0);
                double rest = 0.0;
                for (std::size_t c = 0; c < k; ++c) {
                    if (c != gold) {
                        weights[c] = spec.class_distribution[c];
                        rest += weights[c];
                    }
                }
                if (rest <= 0.0) {
                    for (std::size_t c = 0; c < k; ++c) weights[c] = (c == gold) ? 0.0 : 1.0;
                }
                label_idx = rng.categorical(weights);
            }
            pred.label = spec.registry.label(label_idx);
            pred.confidence = correct ? rng.uniform(spec.confidence.correct_lo, spec.confidence.correct_hi)
                                      : rng.uniform(spec.confidence.wrong_lo, spec.confidence.wrong_hi);
            if (spec.emit_distributions) {
                pred.distribution = detail::synth_distribution(spec, label_idx, pred.confidence);
            }
            rec.predictions.push_back(std::move(pred));
        }
        out.push_back(std::move(rec));
    }
}

inline std::vector<PredictionRecord> generate(const SynthSpec& spec) {
    spec.validate();
    std::vector<PredictionRecord> out;
    out.reserve(spec.instances);
    generate_range(spec, 0, spec.instances, out);
    return out;
}

// Streaming form: hands the consumer chunks of at most chunk_size records.
// Identical record stream to generate(); memory stays flat.
inline void generate_chunked(const SynthSpec& spec, int chunk_size,
                             const std::function<void(std::vector<PredictionRecord>&&, int first)>& consume) {
    spec.validate();
    for (int first = 0; first < spec.instances; first += chunk_size) {
        const int count = std::min(chunk_size, spec.instances - first);
        std::vector<PredictionRecord> chunk;
        chunk.reserve(count);
        generate_range(spec, first, count, chunk);
        consume(std::move(chunk), first);
    }
}

}  // namespace camo
