#include "agrowx/experiments.hpp"
#include "agrowx/training.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace agrowx;

namespace {

nn::Params<double> scalar_params(double w) {
    nn::Topology t;
    t.input_features = 1;
    t.targets = 1;
    t.recurrent_layers = 0;
    t.dense_units = {};
    auto p = nn::init_params<double>(t, 1);
    p.output.weight(0, 0) = w;
    p.output.bias(0) = 0;
    return p;
}

nn::Params<double> scalar_grad(double g) { return scalar_params(g); }

Eigen::MatrixXd sinusoid(Eigen::Index n, Eigen::Index cols) {
    Eigen::MatrixXd m(n, cols);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(i, c) = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 16.0 + 0.7 * static_cast<double>(c));
    return m;
}

nn::Topology tiny(int features) {
    nn::Topology t;
    t.input_features = features;
    t.targets = features;
    t.recurrent_layers = 1;
    t.units = 4;
    t.dense_units = {4};
    return t;
}

std::vector<std::string> names(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("f" + std::to_string(i));
    return out;
}

}  // namespace

TEST(Adam, ZeroGradientLeavesParamsAndDecaysMoments) {
    auto p = scalar_params(0.5);
    AdamState<double> s(p);
    s.m.output.weight(0, 0) = 0.2;
    s.v.output.weight(0, 0) = 0.04;
    s.step = 0;
    adam_step(p, scalar_grad(0.0), s, 1e-3);
    EXPECT_DOUBLE_EQ(s.m.output.weight(0, 0), 0.9 * 0.2);
    EXPECT_DOUBLE_EQ(s.v.output.weight(0, 0), 0.999 * 0.04);
    auto q = scalar_params(0.5);
    AdamState<double> fresh(q);
    adam_step(q, scalar_grad(0.0), fresh, 1e-3);
    EXPECT_EQ(q.output.weight(0, 0), 0.5);
}

TEST(Adam, FirstStepFromZeroState) {
    // m1 = 0.1 g, v1 = 0.001 g^2; bias-corrected m = g, v = g^2
    // update = -lr g / (|g| + eps)
    for (double g : {0.37, -2.5, 1e-6}) {
        auto p = scalar_params(1.0);
        AdamState<double> s(p);
        adam_step(p, scalar_grad(g), s, 1e-3);
        EXPECT_NEAR(p.output.weight(0, 0) - 1.0, -1e-3 * g / (std::abs(g) + 1e-8), 1e-15);
        EXPECT_EQ(s.step, 1);
    }
}

TEST(Adam, ConstantGradientStepTendsToLearningRate) {
    auto p = scalar_params(0.0);
    AdamState<double> s(p);
    double prev = 0, step = 0;
    for (int i = 0; i < 5000; ++i) {
        adam_step(p, scalar_grad(-3.0), s, 1e-3);
        step = p.output.weight(0, 0) - prev;
        prev = p.output.weight(0, 0);
    }
    EXPECT_NEAR(step, 1e-3, 1e-9);
}

TEST(Adam, NonFiniteUpdateIsError) {
    auto p = scalar_params(0.0);
    AdamState<double> s(p);
    try {
        adam_step(p, scalar_grad(std::numeric_limits<double>::infinity()), s, 1e-3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
    }
}

TEST(Metrics, HandComputedFixture) {
    const std::vector<double> y = {1, 2, 3}, yhat = {2, 2, 2};
    const auto r = compute_metrics(y, yhat);
    EXPECT_NEAR(r.mae, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.mse, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.r2, 0.0, 1e-12);
    // 100/3 * (2/3 + 0 + 2/5)
    EXPECT_NEAR(r.smape, 100.0 / 3.0 * (2.0 / 3.0 + 0.4), 1e-10);
    EXPECT_NEAR(r.smape, 35.556, 1e-3);
    // ((ln2 - ln3)^2 + 0 + (ln4 - ln3)^2) / 3
    const double msle = (std::pow(std::log(2.0 / 3.0), 2) + std::pow(std::log(4.0 / 3.0), 2)) / 3.0;
    EXPECT_NEAR(r.msle, msle, 1e-12);
    EXPECT_NEAR(r.msle, 0.08238, 1e-4);
}

TEST(Metrics, PerfectPrediction) {
    const std::vector<double> y = {0.5, 3, 7};
    const auto r = compute_metrics(y, y);
    EXPECT_EQ(r.mae, 0.0);
    EXPECT_EQ(r.mse, 0.0);
    EXPECT_EQ(r.msle, 0.0);
    EXPECT_EQ(r.r2, 1.0);
    EXPECT_EQ(r.smape, 0.0);
}

TEST(Metrics, TrainMeanPredictorHasZeroR2) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(3, 2);
    std::vector<double> y(97);
    for (auto& v : y) v = g(rng);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 97.0;
    EXPECT_NEAR(r_squared(y, std::vector<double>(97, mean)), 0.0, 1e-12);
}

TEST(Metrics, SmapeIsSymmetric) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 10);
    std::vector<double> a(50), b(50);
    for (std::size_t i = 0; i < 50; ++i) {
        a[i] = u(rng);
        b[i] = u(rng);
    }
    EXPECT_NEAR(smape(a, b), smape(b, a), 1e-12);
}

TEST(Metrics, MsleDomain) {
    EXPECT_THROW(mean_squared_log_error(std::vector<double>{-1.0}, std::vector<double>{0.0}), Error);
}

TEST(ScorePredictions, MsleUsesPhysicalNonNegativeTargets) {
    Predictions p;
    p.targets = 2;
    // window-major, step, target: (rainfall, temperature) pairs
    p.labels = {1, 10, 2, 10, 3, 10};
    p.predicted = {2, 50, 2, -7, 2, 10};
    const NormalizationStats st{{"rainfall", "temperature"}, {0, 0}, {1, 1}};
    const auto r = score_predictions(p, st, {"rainfall", "temperature"});
    EXPECT_NEAR(r.msle, 0.08238, 1e-4);
    // negative rainfall predictions are clipped at zero before the log
    Predictions q;
    q.targets = 1;
    q.labels = {0};
    q.predicted = {-0.4};
    EXPECT_EQ(score_predictions(q, NormalizationStats{{"rainfall"}, {0}, {1}}, {"rainfall"}).msle, 0.0);
}

TEST(EarlyStoppingTest, PlateauStopsAtPatiencePlusOne) {
    EarlyStopping s(10, 1e-7);
    int epoch = 0;
    bool stop = false;
    while (!stop) {
        ++epoch;
        stop = s.update(1.0);
    }
    EXPECT_EQ(epoch, 11);
    EXPECT_EQ(s.best_epoch(), 1);
}

TEST(EarlyStoppingTest, TinyImprovementDoesNotCount) {
    EarlyStopping s(2, 1e-7);
    EXPECT_FALSE(s.update(1.0));
    EXPECT_FALSE(s.update(1.0 - 1e-8));
    EXPECT_FALSE(s.improved());
    EXPECT_FALSE(s.update(0.5));
    EXPECT_TRUE(s.improved());
    EXPECT_EQ(s.best_epoch(), 3);
}

TEST(TrainConfigTest, Validation) {
    TrainConfig c;
    EXPECT_NO_THROW(c.validate());
    c.patience = 0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.epochs = 5;
    EXPECT_THROW(c.validate(), Error);  // patience 10 > epochs
    c.patience = 5;
    EXPECT_NO_THROW(c.validate());
}

class TinyTraining : public ::testing::Test {
protected:
    void SetUp() override {
        const Eigen::MatrixXd rows = sinusoid(160, 2);
        const WindowSpec spec{8, 8, 1};
        train_set = WindowSet(rows.topRows(112), leading_columns(2), spec);
        val_set = WindowSet(rows.middleRows(112, 32), leading_columns(2), spec);
        cfg.epochs = 6;
        cfg.patience = 6;
        cfg.batch_size = 16;
        cfg.learning_rate = 0.01;
    }
    WindowSet train_set, val_set;
    TrainConfig cfg;
};

TEST_F(TinyTraining, LossStrictlyDecreasesForThreeEpochs) {
    auto m = nn::make_model<double>(tiny(2), names(2), names(2), 3);
    const auto h = train(m, train_set, val_set, cfg);
    ASSERT_GE(h.train_loss.size(), 4u);
    for (std::size_t e = 1; e < 4; ++e) EXPECT_LT(h.train_loss[e], h.train_loss[e - 1]) << "epoch " << e + 1;
}

TEST_F(TinyTraining, DeterministicGivenSeed) {
    auto a = nn::make_model<double>(tiny(2), names(2), names(2), 9);
    auto b = nn::make_model<double>(tiny(2), names(2), names(2), 9);
    cfg.shuffle = true;
    const auto ha = train(a, train_set, val_set, cfg);
    const auto hb = train(b, train_set, val_set, cfg);
    EXPECT_EQ(ha.train_loss, hb.train_loss);
    EXPECT_EQ(ha.val_loss, hb.val_loss);
    auto ta = a.params.tensors();
    auto tb = b.params.tensors();
    for (std::size_t k = 0; k < ta.size(); ++k)
        EXPECT_TRUE(std::equal(ta[k].values.begin(), ta[k].values.end(), tb[k].values.begin()));
}

TEST_F(TinyTraining, RestoresBestValidationWeights) {
    auto m = nn::make_model<double>(tiny(2), names(2), names(2), 5);
    cfg.learning_rate = 0.2;  // large enough that validation loss bounces
    cfg.epochs = 12;
    cfg.patience = 12;
    const auto h = train(m, train_set, val_set, cfg);
    ASSERT_EQ(h.val_loss.size(), 12u);
    const auto best = std::min_element(h.val_loss.begin(), h.val_loss.end());
    EXPECT_EQ(h.best_epoch, static_cast<int>(best - h.val_loss.begin()) + 1);
    const double reloaded = dataset_loss(m.params, val_set, cfg.batch_size, nn::Regularization{cfg.l1, cfg.l2});
    EXPECT_NEAR(reloaded, *best, 1e-12);
}

TEST_F(TinyTraining, PatienceEqualToEpochsRunsToCap) {
    auto m = nn::make_model<double>(tiny(2), names(2), names(2), 6);
    const auto h = train(m, train_set, val_set, cfg);
    EXPECT_EQ(h.stopped_epoch, cfg.epochs);
    EXPECT_EQ(h.train_loss.size(), static_cast<std::size_t>(cfg.epochs));
}

TEST_F(TinyTraining, ShapeAndEmptyChecks) {
    auto wrong = nn::make_model<double>(tiny(3), names(3), names(3), 1);
    EXPECT_THROW(train(wrong, train_set, val_set, cfg), Error);
    auto m = nn::make_model<double>(tiny(2), names(2), names(2), 1);
    try {
        evaluate(m, WindowSet{}, NormalizationStats{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
    }
}

TEST_F(TinyTraining, EvaluateScoresFlattenedPredictions) {
    auto m = nn::make_model<double>(tiny(2), names(2), names(2), 2);
    train(m, train_set, val_set, cfg);
    const NormalizationStats st{names(2), {0, 0}, {1, 1}};
    const auto p = predict_windows(m.params, val_set);
    EXPECT_EQ(p.labels.size(), val_set.size() * 8 * 2);
    const auto r = evaluate(m, val_set, st);
    EXPECT_EQ(r.r2, r_squared(p.labels, p.predicted));
    EXPECT_EQ(r.mae, mean_absolute_error(p.labels, p.predicted));
    EXPECT_LT(r.r2, 1.0);
}

TEST(CompareArchitectures, SingleVariantGivesOneReport) {
    DailySeries s;
    s.station = "Toy";
    for (int i = 0; i < 200; ++i) {
        DailyRecord r;
        r.date = add_days(make_date(2001, 1, 1), i);
        r[Feature::Rainfall] = 5 + 4 * std::sin(i / 5.0);
        r[Feature::Temperature] = 25 + 3 * std::cos(i / 7.0);
        s.records.push_back(r);
    }
    Variant v;
    v.name = "tiny";
    v.layers = 1;
    v.units = 3;
    v.dense_units = {};
    v.features = {Feature::Rainfall, Feature::Temperature};
    ExperimentOptions opt;
    opt.window = {10, 10, 1};
    opt.train.epochs = 2;
    opt.train.patience = 2;
    const auto r = compare_architectures({s}, {v}, opt);
    ASSERT_EQ(r.size(), 1u);
    ASSERT_EQ(r[0].stations.size(), 1u);
    EXPECT_EQ(r[0].mean_test_r2, r[0].stations[0].test.r2);
    EXPECT_EQ(parse_training_mode("combined"), TrainingMode::Combined);
    EXPECT_THROW(parse_training_mode("pooled"), Error);
}
