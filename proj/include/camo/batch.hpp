#pragma once
// Stream-batch evaluation over record collections. Parallelism shards the
// input into contiguous ranges; each shard writes into its own slice of the
// preallocated output (decisions) or a local confusion matrix merged in
// shard order (metrics), so the result is identical to sequential
// evaluation by construction.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

#include "camo/core.hpp"
#include "camo/engine.hpp"
#include "camo/metrics.hpp"
#include "camo/stats.hpp"
#include "camo/strategies.hpp"

namespace camo {

struct BatchOptions {
    unsigned threads = 1;     // 1 = sequential
    bool with_trace = false;  // trace strings are costly on large batches
};

namespace detail {

template <typename Fn>
void for_each_shard(std::size_t n, unsigned threads, Fn&& body) {
    if (threads <= 1 || n < 2 * threads) {
        body(std::size_t{0}, n, 0u);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, &errors, begin, end, t] {
            try {
                body(begin, end, t);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

}  // namespace detail

inline std::vector<Decision> batch_decide(const std::vector<PredictionRecord>& records,
                                          const StrategyRunner& runner, StrategyId id,
                                          BatchOptions options = {}) {
    std::vector<Decision> out(records.size());
    detail::for_each_shard(records.size(), options.threads, [&](std::size_t begin, std::size_t end, unsigned) {
        for (std::size_t i = begin; i < end; ++i) {
            const EnsembleStats stats = compute_stats(records[i], runner.registry());
            out[i] = runner.decide(id, records[i], stats, options.with_trace);
        }
    });
    return out;
}

// Confusion matrix of one strategy over gold-labeled records. Shard
// matrices are merged in shard order; matrix addition is commutative so the
// parallel result equals the sequential one.
inline ConfusionMatrix batch_confusion(const std::vector<PredictionRecord>& records,
                                       const StrategyRunner& runner, StrategyId id,
                                       BatchOptions options = {}) {
    const ClassRegistry& registry = runner.registry();
    const unsigned shards = std::max(1u, options.threads);
    std::vector<ConfusionMatrix> partial(shards, ConfusionMatrix(registry.size()));
    detail::for_each_shard(records.size(), options.threads, [&](std::size_t begin, std::size_t end, unsigned t) {
        ConfusionMatrix& local = partial[t];
        for (std::size_t i = begin; i < end; ++i) {
            const PredictionRecord& rec = records[i];
            if (!rec.gold) {
                throw Error(ErrorKind::MissingGold, "record " + detail::quoted(rec.instance_id) + " has no gold label");
            }
            const EnsembleStats stats = compute_stats(rec, registry);
            const Decision d = runner.decide(id, rec, stats, false);
            local.add(registry.index_of(*rec.gold), registry.index_of(d.label));
        }
    });
    ConfusionMatrix total = std::move(partial.front());
    for (std::size_t t = 1; t < partial.size(); ++t) total.merge(partial[t]);
    return total;
}

struct StrategyEvaluation {
    StrategyId id;
    ConfusionMatrix matrix;
    MetricReport strict;
    MetricReport lenient;
};

// Evaluates each strategy over the same records; fits the meta combiner on
// the full gold-labeled set first when requested. The lenient variant uses
// the supplied map, the ternary default, or the identity (== strict) in
// that order.
inline std::vector<StrategyEvaluation> evaluate_strategies(const std::vector<PredictionRecord>& records,
                                                           StrategyRunner& runner,
                                                           const std::vector<StrategyId>& ids,
                                                           const std::optional<LenientMap>& lenient_map,
                                                           BatchOptions options = {}) {
    const ClassRegistry& registry = runner.registry();
    std::optional<LenientMap> merge = lenient_map;
    if (!merge) merge = default_lenient_map(registry);
    if (!merge) merge = LenientMap{};  // identity: lenient == strict

    for (StrategyId id : ids) {
        if (id == StrategyId::meta_ensemble && !runner.meta()) {
            runner.fit_meta(records);
            break;
        }
    }
    std::vector<StrategyEvaluation> out;
    out.reserve(ids.size());
    for (StrategyId id : ids) {
        ConfusionMatrix matrix = batch_confusion(records, runner, id, options);
        MetricReport strict = report(matrix, registry, MetricVariant::strict);
        MetricReport lenient = report(matrix, registry, MetricVariant::lenient, merge);
        out.push_back(StrategyEvaluation{id, std::move(matrix), std::move(strict), std::move(lenient)});
    }
    return out;
}

}  // namespace camo
