#pragma once

#include <cstdint>
#include <vector>

#include "hybridq/data.hpp"
#include "hybridq/tensor.hpp"

namespace hybridq::metrics {

// Gaussian fit of a feature cloud: sample mean plus unbiased covariance.
struct FeatureStats {
    std::vector<double> mean;
    Tensor covariance;  // [d,d], symmetric
    std::size_t n_samples = 0;

    std::size_t dim() const { return mean.size(); }
};

struct ClassificationReport {
    double accuracy = 0.0;
    std::vector<double> precision;
    std::vector<double> recall;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    std::vector<std::vector<long>> confusion;  // [true][pred]
};

struct HarnessConfig {
    int epochs = 10;
    int batch = 16;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;
};

// Frozen randomly-initialized convolutional embedding, d = 64. Parameters
// are fully determined by extractor_seed.
std::vector<std::vector<double>> extract_features(
    const std::vector<Tensor>& images, std::uint64_t extractor_seed);

FeatureStats gaussian_stats(const std::vector<std::vector<double>>& features);

// Cyclic Jacobi rotations until every off-diagonal magnitude is below 1e-12
// or 100 sweeps. Eigenvalues ascending, eigenvectors as matrix columns.
struct EigResult {
    std::vector<double> values;
    Tensor vectors;  // [d,d], column i is the eigenvector of values[i]
};
EigResult sym_eig(const Tensor& matrix);

// ||mu_a - mu_b||^2 + Tr(Sa + Sb - 2 (Sa Sb)^{1/2}), via the symmetric
// eigendecomposition route with negative eigenvalues clamped to zero.
double frechet_distance(const FeatureStats& a, const FeatureStats& b);

ClassificationReport classification_report(const std::vector<int>& predictions,
                                           const std::vector<int>& labels,
                                           int n_classes);

// Fine-tunes the small conv classifier on an alpha-mixed training set and
// evaluates on the (real-only) test set.
ClassificationReport augmentation_harness(
    const std::vector<data::LabeledImage>& real_train,
    const std::vector<data::LabeledImage>& generated, double alpha,
    const std::vector<data::LabeledImage>& test_set, const HarnessConfig& config);

}  // namespace hybridq::metrics
