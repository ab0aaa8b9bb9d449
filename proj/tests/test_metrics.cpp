#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hybridq/metrics.hpp"
#include "hybridq/rng.hpp"
#include "oracles.hpp"

using namespace hybridq;

namespace {

Tensor random_symmetric(std::size_t d, Rng& rng) {
    Tensor m({d, d});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            const double v = rng.uniform(-2.0, 2.0);
            m.data[i * d + j] = v;
            m.data[j * d + i] = v;
        }
    return m;
}

metrics::FeatureStats make_stats(std::vector<double> mean, Tensor cov) {
    metrics::FeatureStats s;
    s.mean = std::move(mean);
    s.covariance = std::move(cov);
    s.n_samples = 100;
    return s;
}

std::vector<Tensor> noisy_copies(const std::vector<Tensor>& images, double sigma,
                                 std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Tensor> out = images;
    for (Tensor& im : out)
        for (double& v : im.data)
            v = std::clamp(v + sigma * rng.normal(), -1.0, 1.0);
    return out;
}

}  // namespace

TEST_CASE("gaussian_stats") {
    const std::vector<std::vector<double>> two = {{0.0, 0.0}, {2.0, 0.0}};
    const auto stats = metrics::gaussian_stats(two);
    CHECK(stats.mean == std::vector<double>{1.0, 0.0});
    CHECK(stats.covariance.data[0] == doctest::Approx(2.0));
    CHECK(stats.covariance.data[1] == 0.0);
    CHECK(stats.covariance.data[3] == 0.0);

    const std::vector<std::vector<double>> same = {{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}};
    for (double v : metrics::gaussian_stats(same).covariance.data) CHECK(v == 0.0);

    Rng rng(31);
    std::vector<std::vector<double>> cloud(20, std::vector<double>(5));
    for (auto& row : cloud)
        for (double& v : row) v = rng.normal();
    const auto big = metrics::gaussian_stats(cloud);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(big.covariance.data[i * 5 + j] == big.covariance.data[j * 5 + i]);

    CHECK_THROWS_AS(metrics::gaussian_stats({{1.0}}), std::invalid_argument);
}

TEST_CASE("sym_eig") {
    Tensor eye({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    const auto id = metrics::sym_eig(eye);
    for (double v : id.values) CHECK(v == doctest::Approx(1.0));

    Tensor m({2, 2}, {2, 1, 1, 2});
    const auto eig = metrics::sym_eig(m);
    CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-10));

    Rng rng(32);
    const Tensor a = random_symmetric(8, rng);
    const auto r = metrics::sym_eig(a);
    // eigen-equation and reconstruction
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t row = 0; row < 8; ++row) {
            double av = 0.0;
            for (std::size_t k = 0; k < 8; ++k)
                av += a.data[row * 8 + k] * r.vectors.data[k * 8 + i];
            CHECK(std::fabs(av - r.values[i] * r.vectors.data[row * 8 + i]) < 1e-8);
        }
        CHECK(r.values[i] >= r.values[0]);
    }
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            double rebuilt = 0.0;
            for (std::size_t k = 0; k < 8; ++k)
                rebuilt += r.vectors.data[i * 8 + k] * r.values[k] * r.vectors.data[j * 8 + k];
            CHECK(std::fabs(rebuilt - a.data[i * 8 + j]) < 1e-8);
        }

    Tensor asym({2, 2}, {1, 2, 3, 4});
    CHECK_THROWS_AS(metrics::sym_eig(asym), std::invalid_argument);
}

TEST_CASE("matrix square root is correct on random PSD matrices") {
    Rng rng(33);
    const std::size_t d = 6;
    // PSD by construction: B^T B
    Tensor b = random_symmetric(d, rng);
    Tensor psd({d, d});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                acc += b.data[k * d + i] * b.data[k * d + j];
            psd.data[i * d + j] = acc;
        }

    const auto eig = metrics::sym_eig(psd);
    Tensor root({d, d});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                acc += eig.vectors.data[i * d + k] *
                       std::sqrt(std::max(eig.values[k], 0.0)) *
                       eig.vectors.data[j * d + k];
            root.data[i * d + j] = acc;
        }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double sq = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                sq += root.data[i * d + k] * root.data[k * d + j];
            CHECK(std::fabs(sq - psd.data[i * d + j]) < 1e-7);
        }
}

TEST_CASE("frechet_distance closed forms") {
    // identical stats
    Rng rng(34);
    Tensor cov({3, 3}, {1.0, 0.2, 0.0, 0.2, 2.0, 0.1, 0.0, 0.1, 0.5});
    const auto a = make_stats({0.1, -0.3, 0.7}, cov);
    CHECK(metrics::frechet_distance(a, a) < 1e-8);

    // d = 1: N(0,1) vs N(1,1) -> 1
    const auto n01 = make_stats({0.0}, Tensor({1, 1}, {1.0}));
    const auto n11 = make_stats({1.0}, Tensor({1, 1}, {1.0}));
    CHECK(metrics::frechet_distance(n01, n11) == doctest::Approx(1.0).epsilon(1e-10));

    // diagonal covariances decompose per coordinate
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t d = 2 + rng.below(7);
        std::vector<double> mu_a(d), mu_b(d);
        Tensor cov_a({d, d}), cov_b({d, d});
        double expected = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            mu_a[i] = rng.uniform(-1.0, 1.0);
            mu_b[i] = rng.uniform(-1.0, 1.0);
            const double va = rng.uniform(0.1, 2.0);
            const double vb = rng.uniform(0.1, 2.0);
            cov_a.data[i * d + i] = va;
            cov_b.data[i * d + i] = vb;
            const double dm = mu_a[i] - mu_b[i];
            const double ds = std::sqrt(va) - std::sqrt(vb);
            expected += dm * dm + ds * ds;
        }
        const double got = metrics::frechet_distance(make_stats(mu_a, cov_a),
                                                     make_stats(mu_b, cov_b));
        CHECK(std::fabs(got - expected) < 1e-6);
    }

    // symmetry
    const auto s1 = make_stats({0.0, 1.0}, Tensor({2, 2}, {1.0, 0.3, 0.3, 2.0}));
    const auto s2 = make_stats({0.5, -0.5}, Tensor({2, 2}, {0.5, -0.1, -0.1, 1.5}));
    CHECK(std::fabs(metrics::frechet_distance(s1, s2) -
                    metrics::frechet_distance(s2, s1)) < 1e-8);

    CHECK_THROWS_AS(metrics::frechet_distance(n01, s1), std::invalid_argument);
}

TEST_CASE("extract_features is deterministic in the seed") {
    data::DatasetSpec spec;
    spec.counts = {6, 6, 6};
    const auto images = data::synth_lesion_dataset(spec);
    std::vector<Tensor> px;
    for (const auto& im : images) px.push_back(im.pixels);

    const auto f1 = metrics::extract_features(px, 17);
    const auto f2 = metrics::extract_features(px, 17);
    CHECK(f1 == f2);
    CHECK(f1[0].size() == 64);

    const auto f3 = metrics::extract_features(px, 18);
    CHECK(f1 != f3);

    std::vector<Tensor> zeros(3, Tensor({3, 16, 16}));
    const auto fz = metrics::extract_features(zeros, 17);
    CHECK(fz[0] == fz[1]);
    CHECK(fz[1] == fz[2]);
}

TEST_CASE("fid grows with pixel corruption") {
    data::DatasetSpec spec;
    spec.counts = {24, 24, 24};
    const auto images = data::synth_lesion_dataset(spec);
    std::vector<Tensor> clean;
    for (const auto& im : images) clean.push_back(im.pixels);

    const auto clean_stats =
        metrics::gaussian_stats(metrics::extract_features(clean, 17));
    double previous = -1.0;
    for (double sigma : {0.05, 0.2, 0.5}) {
        const auto corrupted = noisy_copies(clean, sigma, 77);
        const auto stats =
            metrics::gaussian_stats(metrics::extract_features(corrupted, 17));
        const double fid = metrics::frechet_distance(clean_stats, stats);
        CHECK(fid >= previous);
        previous = fid;
    }
    CHECK(previous > 0.0);
}

TEST_CASE("classification_report") {
    const std::vector<int> labels = {0, 0, 1, 1, 2, 2};
    const auto perfect = metrics::classification_report(labels, labels, 3);
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.macro_precision == 1.0);
    CHECK(perfect.macro_recall == 1.0);

    // everything predicted as class 0 on balanced 2-class data
    const std::vector<int> all_zero = {0, 0, 0, 0};
    const std::vector<int> two_class = {0, 0, 1, 1};
    const auto degenerate = metrics::classification_report(all_zero, two_class, 2);
    CHECK(degenerate.accuracy == doctest::Approx(0.5));
    CHECK(degenerate.macro_recall == doctest::Approx(0.5));
    CHECK(degenerate.macro_precision == doctest::Approx(0.25));

    // order invariance
    const std::vector<int> preds = {0, 1, 1, 2, 0, 2};
    const auto a = metrics::classification_report(preds, labels, 3);
    std::vector<int> preds_r(preds.rbegin(), preds.rend());
    std::vector<int> labels_r(labels.rbegin(), labels.rend());
    const auto b = metrics::classification_report(preds_r, labels_r, 3);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.confusion == b.confusion);

    // accuracy equals trace over total, exactly
    long trace = 0, total = 0;
    for (int c = 0; c < 3; ++c)
        for (int j = 0; j < 3; ++j) {
            total += a.confusion[c][j];
            if (c == j) trace += a.confusion[c][j];
        }
    CHECK(a.accuracy == static_cast<double>(trace) / static_cast<double>(total));

    CHECK_THROWS_AS(metrics::classification_report({0}, {0, 1}, 2), std::invalid_argument);
    CHECK_THROWS_AS(metrics::classification_report({5}, {0}, 2), std::invalid_argument);
}

TEST_CASE("augmentation harness baseline and sweep accounting") {
    data::DatasetSpec spec;
    spec.counts = {10, 10, 10};
    const auto real = data::synth_lesion_dataset(spec);

    data::DatasetSpec gen_spec = spec;
    gen_spec.seed = 4321;
    gen_spec.counts = {12, 12, 12};
    const auto generated = data::synth_lesion_dataset(gen_spec);

    data::DatasetSpec test_spec = spec;
    test_spec.seed = 8888;
    test_spec.counts = {6, 6, 6};
    const auto test_set = data::synth_lesion_dataset(test_spec);

    metrics::HarnessConfig config;
    config.epochs = 2;
    config.seed = 3;

    const auto baseline = metrics::augmentation_harness(real, generated, 0.0, test_set, config);
    const auto again = metrics::augmentation_harness(real, generated, 0.0, test_set, config);
    CHECK(baseline.accuracy == again.accuracy);
    CHECK(baseline.confusion == again.confusion);

    for (double alpha : {0.0, 0.25, 0.5}) {
        const auto report =
            metrics::augmentation_harness(real, generated, alpha, test_set, config);
        CHECK(report.accuracy >= 0.0);
        CHECK(report.accuracy <= 1.0);
        long total = 0;
        for (const auto& row : report.confusion)
            for (long v : row) total += v;
        CHECK(total == static_cast<long>(test_set.size()));
    }
}
