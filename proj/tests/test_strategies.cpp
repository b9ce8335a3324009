#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "camo/strategies.hpp"
#include "support/generators.hpp"

using namespace camo;
using Catch::Approx;

namespace {

PredictionRecord make_record(const std::vector<std::pair<std::string, double>>& votes) {
    PredictionRecord rec;
    rec.instance_id = "t";
    int i = 0;
    for (const auto& [label, conf] : votes) {
        rec.predictions.push_back(ModelPrediction{"m" + std::to_string(i++), label, conf, std::nullopt});
    }
    return rec;
}

Distribution one_hot(const ClassRegistry& reg, const ClassLabel& label) {
    Distribution d;
    for (const auto& cls : reg.classes()) d.emplace(cls, cls == label ? 1.0 : 0.0);
    return d;
}

}  // namespace

TEST_CASE("strategy ids round-trip through their names") {
    for (StrategyId id : kAllStrategies) {
        auto parsed = strategy_from_string(to_string(id));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == id);
    }
    CHECK_FALSE(strategy_from_string("not_a_strategy").has_value());
}

TEST_CASE("majority vote") {
    ClassRegistry reg({"A", "B"}, {"B"});
    SECTION("plurality") {
        PredictionRecord rec = make_record({{"A", 0.2}, {"A", 0.3}, {"B", 0.99}});
        CHECK(majority_vote(rec, compute_stats(rec, reg), reg).label == "A");
    }
    SECTION("tie broken by mean voter confidence") {
        PredictionRecord rec = make_record({{"A", 0.9}, {"B", 0.6}});
        CHECK(majority_vote(rec, compute_stats(rec, reg), reg).label == "A");
        PredictionRecord rec2 = make_record({{"A", 0.6}, {"B", 0.9}});
        CHECK(majority_vote(rec2, compute_stats(rec2, reg), reg).label == "B");
    }
    SECTION("unanimous") {
        PredictionRecord rec = make_record({{"B", 0.2}, {"B", 0.4}});
        CHECK(majority_vote(rec, compute_stats(rec, reg), reg).label == "B");
    }
}

TEST_CASE("confidence weighted") {
    ClassRegistry reg({"A", "B"}, {"B"});
    SECTION("confidence sums beat vote counts") {
        PredictionRecord rec = make_record({{"A", 0.9}, {"B", 0.5}, {"B", 0.5}});
        Decision d = confidence_weighted(rec, compute_stats(rec, reg), reg);
        CHECK(d.label == "B");
        CHECK(d.scores->at("A") == Approx(0.9));
        CHECK(d.scores->at("B") == Approx(1.0));
    }
    SECTION("equal confidences reduce to majority vote") {
        testing::RecordGen gen(2222);
        for (int i = 0; i < 200; ++i) {
            PredictionRecord rec = gen.record(reg, gen.uniform_int(1, 7));
            for (auto& p : rec.predictions) p.confidence = 0.75;
            EnsembleStats stats = compute_stats(rec, reg);
            CHECK(confidence_weighted(rec, stats, reg).label == majority_vote(rec, stats, reg).label);
        }
    }
    SECTION("single model") {
        PredictionRecord rec = make_record({{"B", 0.1}});
        CHECK(confidence_weighted(rec, compute_stats(rec, reg), reg).label == "B");
    }
}

TEST_CASE("class balanced") {
    SECTION("inverse priors flip the winner") {
        ClassRegistry reg({"A", "B"}, {"B"}, std::map<ClassLabel, double>{{"A", 0.8}, {"B", 0.2}});
        PredictionRecord rec = make_record({{"A", 0.8}, {"B", 0.3}});
        Decision d = class_balanced(rec, compute_stats(rec, reg), reg);
        CHECK(d.label == "B");
        CHECK(d.scores->at("A") == Approx(1.0));
        CHECK(d.scores->at("B") == Approx(1.5));
    }
    SECTION("uniform priors match confidence_weighted decisions") {
        ClassRegistry reg({"A", "B", "C"}, {"C"},
                          std::map<ClassLabel, double>{{"A", 1.0 / 3}, {"B", 1.0 / 3}, {"C", 1.0 / 3}});
        testing::RecordGen gen(3333);
        for (int i = 0; i < 1000; ++i) {
            PredictionRecord rec = gen.record(reg, gen.uniform_int(1, 7));
            EnsembleStats stats = compute_stats(rec, reg);
            CHECK(class_balanced(rec, stats, reg).label == confidence_weighted(rec, stats, reg).label);
        }
    }
    SECTION("missing priors") {
        ClassRegistry reg({"A", "B"}, {"B"});
        PredictionRecord rec = make_record({{"A", 0.8}});
        try {
            class_balanced(rec, compute_stats(rec, reg), reg);
            FAIL("expected MissingPriors");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MissingPriors);
        }
    }
}

TEST_CASE("dynamic threshold") {
    ClassRegistry reg({"A", "B", "C"}, {"C"});
    SECTION("clear winner stands") {
        PredictionRecord rec = make_record({{"A", 0.9}, {"A", 0.9}, {"C", 0.2}});
        CHECK(dynamic_threshold(rec, compute_stats(rec, reg), reg, 0.1).label == "A");
    }
    SECTION("narrow majority margin flips to the minority runner-up") {
        // top A 1.02, runner-up C 0.98, M=5: (1.02-0.98)/5 = 0.008 < 0.1
        PredictionRecord rec =
            make_record({{"A", 0.52}, {"A", 0.50}, {"C", 0.49}, {"C", 0.49}, {"B", 0.10}});
        Decision d = dynamic_threshold(rec, compute_stats(rec, reg), reg, 0.1);
        CHECK(d.label == "C");
    }
    SECTION("minority already on top stays") {
        PredictionRecord rec = make_record({{"C", 0.9}, {"A", 0.85}});
        CHECK(dynamic_threshold(rec, compute_stats(rec, reg), reg, 0.1).label == "C");
    }
    SECTION("majority runner-up never flips") {
        PredictionRecord rec = make_record({{"A", 0.51}, {"B", 0.50}});
        CHECK(dynamic_threshold(rec, compute_stats(rec, reg), reg, 0.1).label == "A");
    }
}

TEST_CASE("uncertainty aware") {
    ClassRegistry reg({"A", "B", "C"}, {"C"});
    SECTION("one-hot distributions match confidence_weighted") {
        testing::RecordGen gen(4444);
        for (int i = 0; i < 500; ++i) {
            PredictionRecord rec = gen.record(reg, gen.uniform_int(1, 6));
            for (auto& p : rec.predictions) {
                p.confidence = 1.0;
                p.distribution = one_hot(reg, p.label);
            }
            EnsembleStats stats = compute_stats(rec, reg);
            CHECK(uncertainty_aware(rec, stats, reg).label == confidence_weighted(rec, stats, reg).label);
        }
    }
    SECTION("uniform-distribution voters contribute nothing") {
        PredictionRecord rec;
        rec.instance_id = "u";
        Distribution uniform{{"A", 1.0 / 3}, {"B", 1.0 / 3}, {"C", 1.0 / 3}};
        rec.predictions.push_back(ModelPrediction{"m0", "A", 1.0 / 3, uniform});
        rec.predictions.push_back(
            ModelPrediction{"m1", "B", 0.6, Distribution{{"A", 0.3}, {"B", 0.6}, {"C", 0.1}}});
        Decision d = uncertainty_aware(rec, compute_stats(rec, reg), reg);
        CHECK(d.scores->at("A") == Approx(0.0).margin(1e-12));
        CHECK(d.label == "B");
    }
    SECTION("entropy weight fixture") {
        // H(0.7,0.2,0.1) ~ 0.8018 nats; w ~ 1 - 0.8018/1.0986 ~ 0.2702
        PredictionRecord rec;
        rec.instance_id = "w";
        rec.predictions.push_back(
            ModelPrediction{"m0", "A", 0.7, Distribution{{"A", 0.7}, {"B", 0.2}, {"C", 0.1}}});
        Decision d = uncertainty_aware(rec, compute_stats(rec, reg), reg);
        CHECK(d.scores->at("A") == Approx(0.2702 * 0.7).margin(1e-4));
    }
    SECTION("missing distribution") {
        PredictionRecord rec = make_record({{"A", 0.5}});
        try {
            uncertainty_aware(rec, compute_stats(rec, reg), reg);
            FAIL("expected MissingDistribution");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MissingDistribution);
        }
    }
}

namespace {

// synthetic meta-training set: model "a" always right, "b"/"c" noise
std::vector<PredictionRecord> meta_training_set(const ClassRegistry& reg, int n, std::uint64_t seed) {
    testing::RecordGen gen(seed);
    std::vector<PredictionRecord> out;
    for (int i = 0; i < n; ++i) {
        PredictionRecord rec;
        rec.instance_id = "i" + std::to_string(i);
        const ClassLabel gold = reg.label(static_cast<std::size_t>(gen.uniform_int(0, static_cast<int>(reg.size()) - 1)));
        rec.gold = gold;
        rec.predictions.push_back(ModelPrediction{"a", gold, gen.uniform(0.7, 0.95), {}});
        for (const char* id : {"b", "c"}) {
            const ClassLabel noise = reg.label(static_cast<std::size_t>(gen.uniform_int(0, static_cast<int>(reg.size()) - 1)));
            rec.predictions.push_back(ModelPrediction{id, noise, gen.uniform(0.3, 0.9), {}});
        }
        out.push_back(std::move(rec));
    }
    return out;
}

double held_in_accuracy(const MetaModel& meta, const std::vector<PredictionRecord>& records,
                        const ClassRegistry& reg) {
    int correct = 0;
    for (const auto& rec : records) {
        if (meta.predict(rec, reg).label == *rec.gold) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(records.size());
}

}  // namespace

TEST_CASE("meta ensemble") {
    ClassRegistry reg({"A", "B", "C"}, {"C"});

    SECTION("an always-correct model dominates the fit") {
        std::vector<PredictionRecord> training = meta_training_set(reg, 400, 555);
        MetaModel meta = MetaModel::fit(training, reg);
        // model "a" alone scores 1.0 on the training set; the stacker must
        // not do worse than the best single model
        CHECK(held_in_accuracy(meta, training, reg) == Approx(1.0));
    }
    SECTION("single-class training data always predicts that class") {
        std::vector<PredictionRecord> training = meta_training_set(reg, 60, 777);
        for (auto& rec : training) rec.gold = "B";
        MetaModel meta = MetaModel::fit(training, reg);
        testing::RecordGen gen(778);
        for (int i = 0; i < 50; ++i) {
            PredictionRecord probe;
            probe.instance_id = "p";
            probe.predictions.push_back(ModelPrediction{"a", reg.label(static_cast<std::size_t>(gen.uniform_int(0, 2))), 0.8, {}});
            probe.predictions.push_back(ModelPrediction{"b", reg.label(static_cast<std::size_t>(gen.uniform_int(0, 2))), 0.5, {}});
            probe.predictions.push_back(ModelPrediction{"c", reg.label(static_cast<std::size_t>(gen.uniform_int(0, 2))), 0.5, {}});
            CHECK(meta.predict(probe, reg).label == "B");
        }
    }
    SECTION("predict before fit") {
        StrategyRunner runner(reg, default_config(reg));
        PredictionRecord rec = make_record({{"A", 0.5}});
        try {
            runner.decide(StrategyId::meta_ensemble, rec, compute_stats(rec, reg));
            FAIL("expected UnfittedMeta");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::UnfittedMeta);
        }
    }
    SECTION("training records need gold labels") {
        std::vector<PredictionRecord> training = meta_training_set(reg, 10, 888);
        training[4].gold.reset();
        try {
            MetaModel::fit(training, reg);
            FAIL("expected NoGoldLabels");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NoGoldLabels);
        }
    }
    SECTION("model-set mismatches are rejected") {
        std::vector<PredictionRecord> training = meta_training_set(reg, 20, 999);
        MetaModel meta = MetaModel::fit(training, reg);
        PredictionRecord rec = make_record({{"A", 0.5}, {"B", 0.4}});  // models m0/m1
        try {
            meta.predict(rec, reg);
            FAIL("expected InconsistentM");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InconsistentM);
        }
    }
}

TEST_CASE("all strategies are permutation invariant over model order") {
    ClassRegistry reg({"A", "B", "C"}, {"C"},
                      std::map<ClassLabel, double>{{"A", 0.5}, {"B", 0.3}, {"C", 0.2}});
    testing::RecordGen gen(121212);
    std::mt19937_64 shuffler(7);

    std::vector<PredictionRecord> training = meta_training_set(reg, 100, 131313);
    StrategyRunner runner(reg, default_config(reg));
    runner.fit_meta(training);

    for (int i = 0; i < 200; ++i) {
        PredictionRecord rec = gen.record(reg, 3, true);
        // rename models to match the fitted meta order
        rec.predictions[0].model_id = "a";
        rec.predictions[1].model_id = "b";
        rec.predictions[2].model_id = "c";
        PredictionRecord shuffled = rec;
        std::shuffle(shuffled.predictions.begin(), shuffled.predictions.end(), shuffler);

        for (StrategyId id : kAllStrategies) {
            Decision d1 = runner.decide(id, rec, compute_stats(rec, reg), false);
            Decision d2 = runner.decide(id, shuffled, compute_stats(shuffled, reg), false);
            INFO("strategy " << to_string(id));
            CHECK(d1.label == d2.label);
        }
    }
}

TEST_CASE("strategies are deterministic") {
    ClassRegistry reg = testing::ternary_registry();
    testing::RecordGen gen(3141);
    StrategyRunner runner(reg, default_config(reg));
    std::vector<PredictionRecord> training = meta_training_set(reg, 50, 3142);
    for (auto& rec : training) {
        rec.predictions[0].model_id = "a";
        rec.predictions[1].model_id = "b";
        rec.predictions[2].model_id = "c";
    }
    runner.fit_meta(training);
    for (int i = 0; i < 100; ++i) {
        PredictionRecord rec = gen.record(reg, 3, true);
        rec.predictions[0].model_id = "a";
        rec.predictions[1].model_id = "b";
        rec.predictions[2].model_id = "c";
        EnsembleStats stats = compute_stats(rec, reg);
        for (StrategyId id : kAllStrategies) {
            CHECK(runner.decide(id, rec, stats) == runner.decide(id, rec, stats));
        }
    }
}
