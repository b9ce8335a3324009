#pragma once
// Evaluation suite over (gold, predicted) label pairs: confusion matrix,
// accuracy, per-class precision/recall/F1, macro and support-weighted
// averages, and the majority-vs-minority F1 fairness gap. Metrics come in a
// strict variant (raw labels) and a lenient variant (labels merged through a
// configured map before scoring).
//
// Zero-division convention: precision/recall/F1 are 0 whenever their
// denominator is 0. Classes with zero support and zero predictions are
// excluded from macro averages; classes with support but nothing correct
// count as 0.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "camo/core.hpp"
#include "camo/detail/text.hpp"

namespace camo {

class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t k) : k_(k), counts_(k * k, 0) {}

    void add(std::size_t gold, std::size_t predicted, std::int64_t n = 1) {
        counts_[gold * k_ + predicted] += n;
    }

    std::int64_t at(std::size_t gold, std::size_t predicted) const { return counts_[gold * k_ + predicted]; }
    std::size_t classes() const noexcept { return k_; }

    std::int64_t total() const {
        std::int64_t t = 0;
        for (auto c : counts_) t += c;
        return t;
    }
    std::int64_t diagonal() const {
        std::int64_t t = 0;
        for (std::size_t i = 0; i < k_; ++i) t += at(i, i);
        return t;
    }
    std::int64_t gold_total(std::size_t g) const {
        std::int64_t t = 0;
        for (std::size_t p = 0; p < k_; ++p) t += at(g, p);
        return t;
    }
    std::int64_t predicted_total(std::size_t p) const {
        std::int64_t t = 0;
        for (std::size_t g = 0; g < k_; ++g) t += at(g, p);
        return t;
    }

    // shard merge; addition is associative and commutative so parallel
    // construction must equal sequential
    void merge(const ConfusionMatrix& other) {
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    }

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t k_;
    std::vector<std::int64_t> counts_;
};

inline ConfusionMatrix confusion(const std::vector<std::pair<ClassLabel, ClassLabel>>& pairs,
                                 const ClassRegistry& registry) {
    ConfusionMatrix m(registry.size());
    for (const auto& [gold, predicted] : pairs) {
        m.add(registry.index_of(gold), registry.index_of(predicted));
    }
    return m;
}

enum class MetricVariant : std::uint8_t { strict, lenient };

inline std::string_view to_string(MetricVariant v) {
    return v == MetricVariant::strict ? "strict" : "lenient";
}

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;

    bool operator==(const ClassMetrics&) const = default;
};

struct MetricReport {
    MetricVariant variant = MetricVariant::strict;
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    double fairness_gap = 0.0;  // mean majority F1 minus mean minority F1
    std::vector<std::pair<ClassLabel, ClassMetrics>> per_class;  // registry order

    bool operator==(const MetricReport&) const = default;
};

using LenientMap = std::map<ClassLabel, ClassLabel>;

// Ternary convention when no lenient scheme is configured: fold the single
// minority class into the first majority class.
inline std::optional<LenientMap> default_lenient_map(const ClassRegistry& registry) {
    if (registry.size() != 3 || registry.minority_scan_order().size() != 1) return std::nullopt;
    const std::size_t minority = registry.minority_scan_order().front();
    for (std::size_t idx = 0; idx < registry.size(); ++idx) {
        if (!registry.is_minority(idx)) {
            return LenientMap{{registry.label(minority), registry.label(idx)}};
        }
    }
    return std::nullopt;
}

namespace detail {

struct MergedView {
    std::vector<ClassLabel> labels;       // merged classes, original registry order of targets
    std::vector<bool> minority;           // merged class minority iff every source is minority
    std::vector<std::size_t> projection;  // original class index -> merged index
};

inline MergedView merge_classes(const ClassRegistry& registry, const LenientMap& map) {
    for (const auto& [from, to] : map) {
        registry.index_of(from);
        registry.index_of(to);
    }
    MergedView view;
    view.projection.assign(registry.size(), 0);
    std::map<ClassLabel, std::size_t> target_slot;
    std::vector<std::size_t> target_of(registry.size());
    for (std::size_t idx = 0; idx < registry.size(); ++idx) {
        auto it = map.find(registry.label(idx));
        target_of[idx] = it == map.end() ? idx : registry.index_of(it->second);
    }
    for (std::size_t idx = 0; idx < registry.size(); ++idx) {
        const std::size_t target = target_of[idx];
        const ClassLabel& name = registry.label(target);
        auto it = target_slot.find(name);
        if (it == target_slot.end()) {
            it = target_slot.emplace(name, view.labels.size()).first;
            view.labels.push_back(name);
            view.minority.push_back(true);
        }
        view.projection[idx] = it->second;
        if (!registry.is_minority(idx)) view.minority[it->second] = false;
    }
    return view;
}

inline double safe_ratio(std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

inline MetricReport report(const ConfusionMatrix& matrix, const ClassRegistry& registry,
                           MetricVariant variant,
                           const std::optional<LenientMap>& lenient_map = std::nullopt) {
    std::vector<ClassLabel> labels = registry.classes();
    std::vector<bool> minority(registry.size());
    for (std::size_t i = 0; i < registry.size(); ++i) minority[i] = registry.is_minority(i);

    ConfusionMatrix scored = matrix;
    if (variant == MetricVariant::lenient) {
        if (!lenient_map) {
            throw Error(ErrorKind::MissingLenientMap, "lenient metrics need a class merge map");
        }
        auto view = detail::merge_classes(registry, *lenient_map);
        ConfusionMatrix merged(view.labels.size());
        for (std::size_t g = 0; g < registry.size(); ++g) {
            for (std::size_t p = 0; p < registry.size(); ++p) {
                if (matrix.at(g, p) != 0) merged.add(view.projection[g], view.projection[p], matrix.at(g, p));
            }
        }
        scored = std::move(merged);
        labels = std::move(view.labels);
        minority = std::move(view.minority);
    }

    const std::size_t k = scored.classes();
    MetricReport rep;
    rep.variant = variant;
    rep.accuracy = detail::safe_ratio(scored.diagonal(), scored.total());

    double macro_p = 0.0, macro_r = 0.0, macro_f = 0.0;
    double weighted_f = 0.0;
    double minority_f = 0.0, majority_f = 0.0;
    std::int64_t counted = 0, support_total = 0;
    std::int64_t n_minority = 0, n_majority = 0;
    for (std::size_t c = 0; c < k; ++c) {
        ClassMetrics cm;
        const std::int64_t tp = scored.at(c, c);
        cm.support = scored.gold_total(c);
        cm.precision = detail::safe_ratio(tp, scored.predicted_total(c));
        cm.recall = detail::safe_ratio(tp, cm.support);
        cm.f1 = (cm.precision + cm.recall) > 0.0
                    ? 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall)
                    : 0.0;
        rep.per_class.emplace_back(labels[c], cm);

        if (cm.support == 0 && scored.predicted_total(c) == 0) continue;  // never seen: excluded
        counted += 1;
        macro_p += cm.precision;
        macro_r += cm.recall;
        macro_f += cm.f1;
        weighted_f += cm.f1 * static_cast<double>(cm.support);
        support_total += cm.support;
        if (minority[c]) {
            minority_f += cm.f1;
            n_minority += 1;
        } else {
            majority_f += cm.f1;
            n_majority += 1;
        }
    }
    if (counted > 0) {
        rep.macro_precision = macro_p / counted;
        rep.macro_recall = macro_r / counted;
        rep.macro_f1 = macro_f / counted;
    }
    if (support_total > 0) rep.weighted_f1 = weighted_f / static_cast<double>(support_total);
    if (n_minority > 0 && n_majority > 0) {
        rep.fairness_gap = majority_f / n_majority - minority_f / n_minority;
    }
    return rep;
}

// Four-line comparison cells, one column per strategy, percentages to one
// decimal: Strict F1 / Strict Acc / Lenient F1 / Lenient Acc.
inline std::string format_comparison_table(
    const std::vector<std::string>& strategy_names,
    const std::vector<std::pair<MetricReport, MetricReport>>& strict_lenient) {
    const std::array<std::string, 4> row_names{"Strict F1", "Strict Acc", "Lenient F1", "Lenient Acc"};
    std::vector<std::vector<std::string>> cells(4, std::vector<std::string>(strategy_names.size()));
    for (std::size_t s = 0; s < strategy_names.size(); ++s) {
        const auto& [strict, lenient] = strict_lenient[s];
        cells[0][s] = detail::fmt_fixed(100.0 * strict.macro_f1, 1);
        cells[1][s] = detail::fmt_fixed(100.0 * strict.accuracy, 1);
        cells[2][s] = detail::fmt_fixed(100.0 * lenient.macro_f1, 1);
        cells[3][s] = detail::fmt_fixed(100.0 * lenient.accuracy, 1);
    }
    std::size_t name_width = 11;  // longest row label
    std::vector<std::size_t> col_width(strategy_names.size());
    for (std::size_t s = 0; s < strategy_names.size(); ++s) {
        col_width[s] = strategy_names[s].size();
        for (const auto& row : cells) col_width[s] = std::max(col_width[s], row[s].size());
    }
    std::string out;
    auto pad = [&](const std::string& text, std::size_t width) {
        out.append(width > text.size() ? width - text.size() : 0, ' ');
        out += text;
    };
    pad("Strategy", name_width);
    for (std::size_t s = 0; s < strategy_names.size(); ++s) {
        out += "  ";
        pad(strategy_names[s], col_width[s]);
    }
    out += '\n';
    for (std::size_t r = 0; r < row_names.size(); ++r) {
        pad(row_names[r], name_width);
        for (std::size_t s = 0; s < strategy_names.size(); ++s) {
            out += "  ";
            pad(cells[r][s], col_width[s]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace camo
