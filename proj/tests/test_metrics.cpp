#include <catch2/catch_amalgamated.hpp>
#include <map>
#include <random>
#include <set>

#include "camo/metrics.hpp"
#include "support/generators.hpp"

using namespace camo;
using Catch::Approx;

namespace {

using Pairs = std::vector<std::pair<ClassLabel, ClassLabel>>;

// independent recomputation straight from the raw pairs; shares nothing
// with ConfusionMatrix / report()
struct NaiveMetrics {
    std::map<ClassLabel, double> f1;
    double accuracy = 0.0;
    double macro_f1 = 0.0;

    NaiveMetrics(const Pairs& pairs, const std::vector<ClassLabel>& classes) {
        int correct = 0;
        for (const auto& [g, p] : pairs) {
            if (g == p) ++correct;
        }
        accuracy = pairs.empty() ? 0.0 : static_cast<double>(correct) / pairs.size();
        int counted = 0;
        for (const auto& cls : classes) {
            int tp = 0, support = 0, predicted = 0;
            for (const auto& [g, p] : pairs) {
                if (g == cls && p == cls) ++tp;
                if (g == cls) ++support;
                if (p == cls) ++predicted;
            }
            if (support == 0 && predicted == 0) continue;
            const double prec = predicted == 0 ? 0.0 : static_cast<double>(tp) / predicted;
            const double rec = support == 0 ? 0.0 : static_cast<double>(tp) / support;
            const double f = prec + rec == 0.0 ? 0.0 : 2 * prec * rec / (prec + rec);
            f1[cls] = f;
            macro_f1 += f;
            ++counted;
        }
        if (counted > 0) macro_f1 /= counted;
    }
};

ConfusionMatrix matrix_from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    ConfusionMatrix m(rows.size());
    for (std::size_t g = 0; g < rows.size(); ++g) {
        for (std::size_t p = 0; p < rows.size(); ++p) m.add(g, p, rows[g][p]);
    }
    return m;
}

Pairs pairs_from_rows(const ClassRegistry& reg, const std::vector<std::vector<std::int64_t>>& rows) {
    Pairs pairs;
    for (std::size_t g = 0; g < rows.size(); ++g) {
        for (std::size_t p = 0; p < rows.size(); ++p) {
            for (std::int64_t n = 0; n < rows[g][p]; ++n) pairs.emplace_back(reg.label(g), reg.label(p));
        }
    }
    return pairs;
}

}  // namespace

TEST_CASE("confusion tallies pairs") {
    ClassRegistry reg({"A", "B"}, {"B"});
    SECTION("direct tally") {
        ConfusionMatrix m = confusion({{"A", "A"}, {"A", "B"}, {"B", "B"}}, reg);
        CHECK(m.at(0, 0) == 1);
        CHECK(m.at(0, 1) == 1);
        CHECK(m.at(1, 1) == 1);
        CHECK(m.at(1, 0) == 0);
        CHECK(m.total() == 3);
    }
    SECTION("empty input gives a zero matrix") {
        ConfusionMatrix m = confusion({}, reg);
        CHECK(m.total() == 0);
    }
    SECTION("all correct is diagonal") {
        ConfusionMatrix m = confusion({{"A", "A"}, {"B", "B"}, {"B", "B"}}, reg);
        CHECK(m.diagonal() == m.total());
    }
    SECTION("unknown labels are rejected") {
        CHECK_THROWS_AS(confusion({{"A", "Q"}}, reg), Error);
    }
}

TEST_CASE("report on the ternary reference matrix") {
    // 22 records, supports 12/8/2: strict macro F1 0.7474, accuracy 0.8182
    ClassRegistry reg = testing::ternary_registry();
    const std::vector<std::vector<std::int64_t>> rows{{11, 1, 0}, {0, 5, 3}, {0, 0, 2}};
    ConfusionMatrix m = matrix_from_rows(rows);
    MetricReport rep = report(m, reg, MetricVariant::strict);

    CHECK(rep.accuracy == Approx(18.0 / 22.0).margin(1e-12));
    CHECK(rep.accuracy == Approx(0.8182).margin(1e-4));
    CHECK(rep.macro_f1 == Approx(0.7474).margin(1e-4));
    CHECK(rep.per_class[0].second.f1 == Approx(22.0 / 23.0));
    CHECK(rep.per_class[1].second.f1 == Approx(5.0 / 7.0));
    CHECK(rep.per_class[2].second.f1 == Approx(4.0 / 7.0));
    CHECK(rep.weighted_f1 ==
          Approx((12 * 22.0 / 23.0 + 8 * 5.0 / 7.0 + 2 * 4.0 / 7.0) / 22.0).margin(1e-12));
    CHECK(rep.fairness_gap == Approx((22.0 / 23.0 + 5.0 / 7.0) / 2 - 4.0 / 7.0).margin(1e-12));

    // independent recomputation from raw pairs agrees
    NaiveMetrics naive(pairs_from_rows(reg, rows), reg.classes());
    CHECK(rep.macro_f1 == Approx(naive.macro_f1).margin(1e-12));
    CHECK(rep.accuracy == Approx(naive.accuracy).margin(1e-12));
    for (const auto& [cls, cm] : rep.per_class) {
        CHECK(cm.f1 == Approx(naive.f1.at(cls)).margin(1e-12));
    }
}

TEST_CASE("report on a skewed diagonal-heavy matrix cross-checks the oracle") {
    // a matrix whose per-class F1s are (0.8, 0.9, 0.5): macro 0.7333
    ClassRegistry reg = testing::ternary_registry();
    const std::vector<std::vector<std::int64_t>> rows{{8, 1, 1}, {1, 9, 0}, {1, 0, 1}};
    ConfusionMatrix m = matrix_from_rows(rows);
    MetricReport rep = report(m, reg, MetricVariant::strict);
    NaiveMetrics naive(pairs_from_rows(reg, rows), reg.classes());

    CHECK(rep.accuracy == Approx(18.0 / 22.0));
    CHECK(rep.per_class[0].second.f1 == Approx(0.8));
    CHECK(rep.per_class[1].second.f1 == Approx(0.9));
    CHECK(rep.per_class[2].second.f1 == Approx(0.5));
    CHECK(rep.macro_f1 == Approx(naive.macro_f1).margin(1e-12));
    CHECK(rep.macro_f1 == Approx((0.8 + 0.9 + 0.5) / 3).margin(1e-12));
}

TEST_CASE("perfect predictions") {
    ClassRegistry reg = testing::ternary_registry();
    ConfusionMatrix m = matrix_from_rows({{5, 0, 0}, {0, 3, 0}, {0, 0, 2}});
    MetricReport rep = report(m, reg, MetricVariant::strict);
    CHECK(rep.accuracy == 1.0);
    CHECK(rep.macro_f1 == 1.0);
    CHECK(rep.macro_precision == 1.0);
    CHECK(rep.macro_recall == 1.0);
    CHECK(rep.fairness_gap == 0.0);
}

TEST_CASE("lenient metrics") {
    ClassRegistry reg = testing::ternary_registry();
    const std::vector<std::vector<std::int64_t>> rows{{8, 1, 1}, {1, 9, 0}, {1, 0, 1}};
    ConfusionMatrix m = matrix_from_rows(rows);

    SECTION("identity map equals strict exactly") {
        MetricReport strict = report(m, reg, MetricVariant::strict);
        MetricReport lenient = report(m, reg, MetricVariant::lenient, LenientMap{});
        CHECK(lenient.accuracy == strict.accuracy);
        CHECK(lenient.macro_f1 == strict.macro_f1);
        CHECK(lenient.macro_precision == strict.macro_precision);
        CHECK(lenient.weighted_f1 == strict.weighted_f1);
        CHECK(lenient.fairness_gap == strict.fairness_gap);
        REQUIRE(lenient.per_class.size() == strict.per_class.size());
        for (std::size_t i = 0; i < strict.per_class.size(); ++i) {
            CHECK(lenient.per_class[i].second == strict.per_class[i].second);
        }
    }
    SECTION("merging the minority into Yes gives two-class metrics") {
        MetricReport rep = report(m, reg, MetricVariant::lenient, LenientMap{{"To some extent", "Yes"}});
        REQUIRE(rep.per_class.size() == 2);
        CHECK(rep.accuracy == Approx(20.0 / 22.0));
        CHECK(rep.per_class[0].second.f1 == Approx(11.0 / 12.0));  // merged Yes
        CHECK(rep.per_class[1].second.f1 == Approx(0.9));
        CHECK(rep.macro_f1 == Approx((11.0 / 12.0 + 0.9) / 2));
        // merged class carries a majority member, so no minority remains
        CHECK(rep.fairness_gap == 0.0);
    }
    SECTION("missing map is an error") {
        try {
            report(m, reg, MetricVariant::lenient);
            FAIL("expected MissingLenientMap");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MissingLenientMap);
        }
    }
    SECTION("default map folds the ternary minority into the first majority class") {
        auto map = default_lenient_map(reg);
        REQUIRE(map.has_value());
        CHECK(map->at("To some extent") == "Yes");
        CHECK_FALSE(default_lenient_map(testing::emotion_registry()).has_value());
    }
}

TEST_CASE("zero-support conventions") {
    ClassRegistry reg = testing::ternary_registry();
    SECTION("never-seen class is excluded from macro") {
        // only Yes/No appear; To some extent has no support and no predictions
        ConfusionMatrix m = confusion({{"Yes", "Yes"}, {"No", "Yes"}, {"No", "No"}}, reg);
        MetricReport rep = report(m, reg, MetricVariant::strict);
        const double f1_yes = 2.0 * (2.0 / 3.0) * 1.0 / (2.0 / 3.0 + 1.0);
        const double f1_no = 2.0 * 1.0 * 0.5 / 1.5;
        CHECK(rep.macro_f1 == Approx((f1_yes + f1_no) / 2).margin(1e-12));
        CHECK(rep.per_class[2].second.support == 0);
    }
    SECTION("class with support but nothing correct counts as zero") {
        ConfusionMatrix m = confusion({{"Yes", "Yes"}, {"To some extent", "Yes"}}, reg);
        MetricReport rep = report(m, reg, MetricVariant::strict);
        // classes counted: Yes and To some extent
        const double f1_yes = 2.0 * 0.5 * 1.0 / 1.5;
        CHECK(rep.macro_f1 == Approx((f1_yes + 0.0) / 2).margin(1e-12));
    }
    SECTION("empty matrix yields zero metrics") {
        MetricReport rep = report(confusion({}, reg), reg, MetricVariant::strict);
        CHECK(rep.accuracy == 0.0);
        CHECK(rep.macro_f1 == 0.0);
        CHECK(rep.weighted_f1 == 0.0);
    }
}

TEST_CASE("fairness gap goes negative when the minority outperforms") {
    ClassRegistry reg = testing::ternary_registry();
    ConfusionMatrix m = matrix_from_rows({{1, 1, 0}, {1, 1, 0}, {0, 0, 4}});
    MetricReport rep = report(m, reg, MetricVariant::strict);
    CHECK(rep.per_class[2].second.f1 == 1.0);
    CHECK(rep.fairness_gap == Approx(0.5 - 1.0));
}

TEST_CASE("metric identities over random matrices") {
    testing::RecordGen gen(2024);
    ClassRegistry reg = testing::ternary_registry();
    for (int iter = 0; iter < 200; ++iter) {
        Pairs pairs;
        const int n = gen.uniform_int(1, 60);
        for (int i = 0; i < n; ++i) {
            pairs.emplace_back(reg.label(static_cast<std::size_t>(gen.uniform_int(0, 2))),
                               reg.label(static_cast<std::size_t>(gen.uniform_int(0, 2))));
        }
        ConfusionMatrix m = confusion(pairs, reg);
        MetricReport rep = report(m, reg, MetricVariant::strict);

        // accuracy is the diagonal share
        CHECK(rep.accuracy == Approx(static_cast<double>(m.diagonal()) / m.total()).margin(1e-12));

        // naive recomputation agrees everywhere
        NaiveMetrics naive(pairs, reg.classes());
        CHECK(rep.macro_f1 == Approx(naive.macro_f1).margin(1e-12));

        // weighted F1 is bracketed by per-class extremes
        double lo = 1.0, hi = 0.0;
        for (const auto& [cls, cm] : rep.per_class) {
            if (cm.support == 0) continue;
            lo = std::min(lo, cm.f1);
            hi = std::max(hi, cm.f1);
        }
        CHECK(rep.weighted_f1 >= lo - 1e-12);
        CHECK(rep.weighted_f1 <= hi + 1e-12);

        // macro F1 ignores registry order
        ClassRegistry reordered({"No", "To some extent", "Yes"}, {"To some extent"});
        MetricReport rep2 = report(confusion(pairs, reordered), reordered, MetricVariant::strict);
        CHECK(rep2.macro_f1 == Approx(rep.macro_f1).margin(1e-12));

        // sharded confusion sums to the same matrix
        ConfusionMatrix sharded(reg.size());
        const std::size_t shard = 1 + pairs.size() / 4;
        for (std::size_t start = 0; start < pairs.size(); start += shard) {
            Pairs slice(pairs.begin() + start,
                        pairs.begin() + std::min(pairs.size(), start + shard));
            sharded.merge(confusion(slice, reg));
        }
        CHECK(sharded == m);
    }
}

TEST_CASE("comparison table formats four rows of percentages") {
    ClassRegistry reg = testing::ternary_registry();
    ConfusionMatrix m = matrix_from_rows({{11, 1, 0}, {0, 5, 3}, {0, 0, 2}});
    MetricReport strict = report(m, reg, MetricVariant::strict);
    MetricReport lenient = report(m, reg, MetricVariant::lenient, default_lenient_map(reg));
    std::string table = format_comparison_table({"camo", "majority_vote"}, {{strict, lenient}, {strict, lenient}});
    CHECK(table.find("Strict F1") != std::string::npos);
    CHECK(table.find("Lenient Acc") != std::string::npos);
    CHECK(table.find("74.7") != std::string::npos);  // 0.7474 as a one-decimal percent
    CHECK(table.find("81.8") != std::string::npos);
    // four data rows plus header
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);
}
