#include "hybridq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hybridq/nn.hpp"
#include "hybridq/rng.hpp"

namespace hybridq::metrics {

namespace {

Tensor avg_pool2(const Tensor& x) {
    const std::size_t c = x.shape[0], h = x.shape[1], w = x.shape[2];
    Tensor out({c, h / 2, w / 2});
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t i = 0; i + 1 < h; i += 2)
            for (std::size_t j = 0; j + 1 < w; j += 2)
                out.at3(ch, i / 2, j / 2) =
                    0.25 * (x.at3(ch, i, j) + x.at3(ch, i, j + 1) +
                            x.at3(ch, i + 1, j) + x.at3(ch, i + 1, j + 1));
    return out;
}

Tensor avg_pool2_backward(const Tensor& input_shape_like, const Tensor& upstream) {
    Tensor g(input_shape_like.shape);
    const std::size_t c = g.shape[0], h = g.shape[1], w = g.shape[2];
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t i = 0; i + 1 < h; i += 2)
            for (std::size_t j = 0; j + 1 < w; j += 2) {
                const double u = 0.25 * upstream.at3(ch, i / 2, j / 2);
                g.at3(ch, i, j) = u;
                g.at3(ch, i, j + 1) = u;
                g.at3(ch, i + 1, j) = u;
                g.at3(ch, i + 1, j + 1) = u;
            }
    return g;
}

Tensor random_tensor(std::vector<std::size_t> shape, double scale, Rng& rng) {
    Tensor t(std::move(shape));
    for (double& v : t.data) v = scale * rng.normal();
    return t;
}

double fan_in_scale(std::size_t fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); }

}  // namespace

std::vector<std::vector<double>> extract_features(
    const std::vector<Tensor>& images, std::uint64_t extractor_seed) {
    if (images.empty())
        throw std::invalid_argument("extract_features: need at least one image");
    const auto& shape = images[0].shape;
    if (shape.size() != 3 || shape[0] != 3)
        throw std::invalid_argument("extract_features: images must be [3,H,W]");
    for (const Tensor& im : images)
        if (im.shape != shape)
            throw std::invalid_argument("extract_features: images must share one shape");

    Rng rng(extractor_seed);
    const Tensor conv1 = random_tensor({8, 3, 3, 3}, fan_in_scale(3 * 9), rng);
    const Tensor conv2 = random_tensor({16, 8, 3, 3}, fan_in_scale(8 * 9), rng);
    const Tensor dw = random_tensor({64, 16}, fan_in_scale(16), rng);
    const Tensor db = random_tensor({64}, 0.1, rng);

    std::vector<std::vector<double>> features;
    features.reserve(images.size());
    for (const Tensor& im : images) {
        Tensor a = nn::leaky_relu(nn::conv2d(im, conv1, 1, 1));
        a = avg_pool2(a);
        a = nn::leaky_relu(nn::conv2d(a, conv2, 1, 1));
        // global average pool to 16 channels
        Tensor pooled({16});
        const std::size_t hw = a.shape[1] * a.shape[2];
        for (std::size_t c = 0; c < 16; ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < hw; ++i) acc += a.data[c * hw + i];
            pooled.data[c] = acc / static_cast<double>(hw);
        }
        Tensor out = nn::dense(pooled, dw, db);
        features.push_back(out.data);
    }
    return features;
}

FeatureStats gaussian_stats(const std::vector<std::vector<double>>& features) {
    const std::size_t n = features.size();
    if (n < 2)
        throw std::invalid_argument("gaussian_stats: need at least 2 samples, got " +
                                    std::to_string(n));
    const std::size_t d = features[0].size();
    for (const auto& row : features)
        if (row.size() != d)
            throw std::invalid_argument("gaussian_stats: ragged feature matrix");

    FeatureStats stats;
    stats.n_samples = n;
    stats.mean.assign(d, 0.0);
    for (const auto& row : features)
        for (std::size_t j = 0; j < d; ++j) stats.mean[j] += row[j];
    for (double& v : stats.mean) v /= static_cast<double>(n);

    stats.covariance = Tensor({d, d});
    for (const auto& row : features) {
        for (std::size_t i = 0; i < d; ++i) {
            const double di = row[i] - stats.mean[i];
            for (std::size_t j = i; j < d; ++j)
                stats.covariance.data[i * d + j] += di * (row[j] - stats.mean[j]);
        }
    }
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            const double v = stats.covariance.data[i * d + j] / denom;
            stats.covariance.data[i * d + j] = v;
            stats.covariance.data[j * d + i] = v;
        }
    return stats;
}

EigResult sym_eig(const Tensor& matrix) {
    if (matrix.shape.size() != 2 || matrix.shape[0] != matrix.shape[1])
        throw std::invalid_argument("sym_eig: matrix must be square");
    const std::size_t d = matrix.shape[0];
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            if (std::fabs(matrix.data[i * d + j] - matrix.data[j * d + i]) > 1e-10)
                throw std::invalid_argument("sym_eig: matrix not symmetric within 1e-10");

    Tensor a = matrix;
    Tensor v({d, d});
    for (std::size_t i = 0; i < d; ++i) v.data[i * d + i] = 1.0;

    auto off_max = [&]() {
        double m = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                m = std::max(m, std::fabs(a.data[i * d + j]));
        return m;
    };

    for (int sweep = 0; sweep < 100 && off_max() >= 1e-12; ++sweep) {
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a.data[p * d + q];
                if (std::fabs(apq) < 1e-300) continue;
                const double app = a.data[p * d + p];
                const double aqq = a.data[q * d + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a.data[p * d + p] = app - t * apq;
                a.data[q * d + q] = aqq + t * apq;
                a.data[p * d + q] = 0.0;
                a.data[q * d + p] = 0.0;
                for (std::size_t r = 0; r < d; ++r) {
                    if (r != p && r != q) {
                        const double arp = a.data[r * d + p];
                        const double arq = a.data[r * d + q];
                        a.data[r * d + p] = a.data[p * d + r] = arp - s * (arq + tau * arp);
                        a.data[r * d + q] = a.data[q * d + r] = arq + s * (arp - tau * arq);
                    }
                    const double vrp = v.data[r * d + p];
                    const double vrq = v.data[r * d + q];
                    v.data[r * d + p] = vrp - s * (vrq + tau * vrp);
                    v.data[r * d + q] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    EigResult result;
    result.values.resize(d);
    for (std::size_t i = 0; i < d; ++i) result.values[i] = a.data[i * d + i];

    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return result.values[x] < result.values[y];
    });

    EigResult sorted;
    sorted.values.resize(d);
    sorted.vectors = Tensor({d, d});
    for (std::size_t i = 0; i < d; ++i) {
        sorted.values[i] = result.values[order[i]];
        for (std::size_t r = 0; r < d; ++r)
            sorted.vectors.data[r * d + i] = v.data[r * d + order[i]];
    }
    return sorted;
}

namespace {

// B = V diag(f(lambda)) V^T for a symmetric input given by its eigensystem.
Tensor rebuild(const EigResult& eig, const std::vector<double>& diag) {
    const std::size_t d = eig.values.size();
    Tensor b({d, d});
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                acc += eig.vectors.data[i * d + k] * diag[k] * eig.vectors.data[j * d + k];
            b.data[i * d + j] = acc;
            b.data[j * d + i] = acc;
        }
    }
    return b;
}

}  // namespace

double frechet_distance(const FeatureStats& a, const FeatureStats& b) {
    const std::size_t d = a.dim();
    if (b.dim() != d)
        throw std::invalid_argument("frechet_distance: dimension mismatch");

    double mean_term = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a.mean[i] - b.mean[i];
        mean_term += diff * diff;
    }

    const EigResult eig_a = sym_eig(a.covariance);
    std::vector<double> sqrt_vals(d);
    for (std::size_t i = 0; i < d; ++i)
        sqrt_vals[i] = std::sqrt(std::max(eig_a.values[i], 0.0));
    const Tensor s = rebuild(eig_a, sqrt_vals);

    // M = S * Sb * S, symmetric PSD up to rounding
    Tensor tmp({d, d});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                acc += s.data[i * d + k] * b.covariance.data[k * d + j];
            tmp.data[i * d + j] = acc;
        }
    Tensor m({d, d});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                acc += tmp.data[i * d + k] * s.data[k * d + j];
            m.data[i * d + j] = acc;
        }
    // symmetrize before the eigensolve; rounding breaks exact symmetry
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            const double v = 0.5 * (m.data[i * d + j] + m.data[j * d + i]);
            m.data[i * d + j] = v;
            m.data[j * d + i] = v;
        }

    const EigResult eig_m = sym_eig(m);
    double sqrt_trace = 0.0;
    for (double lambda : eig_m.values) sqrt_trace += std::sqrt(std::max(lambda, 0.0));

    double trace_a = 0.0, trace_b = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        trace_a += a.covariance.data[i * d + i];
        trace_b += b.covariance.data[i * d + i];
    }
    return std::max(mean_term + trace_a + trace_b - 2.0 * sqrt_trace, 0.0);
}

ClassificationReport classification_report(const std::vector<int>& predictions,
                                           const std::vector<int>& labels,
                                           int n_classes) {
    if (predictions.size() != labels.size())
        throw std::invalid_argument("classification_report: length mismatch");
    if (n_classes < 1)
        throw std::invalid_argument("classification_report: n_classes must be >= 1");

    ClassificationReport report;
    report.confusion.assign(n_classes, std::vector<long>(n_classes, 0));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int truth = labels[i];
        const int pred = predictions[i];
        if (truth < 0 || truth >= n_classes || pred < 0 || pred >= n_classes)
            throw std::invalid_argument("classification_report: label outside [0,n_classes)");
        ++report.confusion[truth][pred];
    }

    long correct = 0;
    report.precision.assign(n_classes, 0.0);
    report.recall.assign(n_classes, 0.0);
    for (int c = 0; c < n_classes; ++c) {
        correct += report.confusion[c][c];
        long row = 0, col = 0;
        for (int j = 0; j < n_classes; ++j) {
            row += report.confusion[c][j];
            col += report.confusion[j][c];
        }
        report.precision[c] = col > 0 ? static_cast<double>(report.confusion[c][c]) / col : 0.0;
        report.recall[c] = row > 0 ? static_cast<double>(report.confusion[c][c]) / row : 0.0;
        report.macro_precision += report.precision[c];
        report.macro_recall += report.recall[c];
    }
    report.macro_precision /= n_classes;
    report.macro_recall /= n_classes;
    report.accuracy = labels.empty()
                          ? 0.0
                          : static_cast<double>(correct) / static_cast<double>(labels.size());
    return report;
}

namespace {

// Small trainable classifier: conv-pool-conv-pool-dense with softmax
// cross-entropy.
struct Classifier {
    Tensor conv1, conv2, dw, db;
    nn::AdamState s_conv1, s_conv2, s_dw, s_db;
    int n_classes;

    Classifier(int classes, int image_size, Rng& rng) : n_classes(classes) {
        conv1 = random_tensor({8, 3, 3, 3}, fan_in_scale(3 * 9), rng);
        conv2 = random_tensor({16, 8, 3, 3}, fan_in_scale(8 * 9), rng);
        const std::size_t flat = 16 * (image_size / 4) * (image_size / 4);
        dw = random_tensor({static_cast<std::size_t>(classes), flat},
                           fan_in_scale(flat), rng);
        db = Tensor({static_cast<std::size_t>(classes)});
    }

    struct Cache {
        Tensor x, c1, a1, p1, c2, a2, p2, flat, logits;
    };

    Tensor forward(const Tensor& image, Cache& cache) const {
        cache.x = image;
        cache.c1 = nn::conv2d(image, conv1, 1, 1);
        cache.a1 = nn::relu(cache.c1);
        cache.p1 = avg_pool2(cache.a1);
        cache.c2 = nn::conv2d(cache.p1, conv2, 1, 1);
        cache.a2 = nn::relu(cache.c2);
        cache.p2 = avg_pool2(cache.a2);
        cache.flat = Tensor({cache.p2.numel()}, cache.p2.data);
        cache.logits = nn::dense(cache.flat, dw, db);
        return cache.logits;
    }

    int predict(const Tensor& image) const {
        Cache cache;
        const Tensor logits = forward(image, cache);
        return static_cast<int>(std::max_element(logits.data.begin(), logits.data.end()) -
                                logits.data.begin());
    }

    struct Grads {
        Tensor conv1, conv2, dw, db;
        Grads(const Classifier& c)
            : conv1(c.conv1.shape), conv2(c.conv2.shape), dw(c.dw.shape), db(c.db.shape) {}
        void add(const Grads& other) {
            for (std::size_t i = 0; i < conv1.numel(); ++i) conv1.data[i] += other.conv1.data[i];
            for (std::size_t i = 0; i < conv2.numel(); ++i) conv2.data[i] += other.conv2.data[i];
            for (std::size_t i = 0; i < dw.numel(); ++i) dw.data[i] += other.dw.data[i];
            for (std::size_t i = 0; i < db.numel(); ++i) db.data[i] += other.db.data[i];
        }
        void scale(double f) {
            for (double& v : conv1.data) v *= f;
            for (double& v : conv2.data) v *= f;
            for (double& v : dw.data) v *= f;
            for (double& v : db.data) v *= f;
        }
    };

    // returns the cross-entropy loss and accumulates parameter grads
    double backward(const Cache& cache, int label, Grads& grads) const {
        // softmax cross-entropy, shifted for stability
        const double peak = *std::max_element(cache.logits.data.begin(),
                                              cache.logits.data.end());
        double z = 0.0;
        for (double l : cache.logits.data) z += std::exp(l - peak);
        const double loss = std::log(z) - (cache.logits.data[label] - peak);

        Tensor dlogits({cache.logits.numel()});
        for (std::size_t i = 0; i < dlogits.numel(); ++i)
            dlogits.data[i] = std::exp(cache.logits.data[i] - peak) / z;
        dlogits.data[label] -= 1.0;

        const nn::DenseGrads dg = nn::dense_backward(cache.flat, dw, dlogits);
        Tensor dp2(cache.p2.shape, dg.input.data);
        Tensor da2 = avg_pool2_backward(cache.a2, dp2);
        Tensor dc2 = nn::relu_backward(cache.c2, da2);
        const nn::Conv2dGrads cg2 = nn::conv2d_backward(cache.p1, conv2, dc2, 1, 1);
        Tensor da1 = avg_pool2_backward(cache.a1, cg2.input);
        Tensor dc1 = nn::relu_backward(cache.c1, da1);
        const nn::Conv2dGrads cg1 = nn::conv2d_backward(cache.x, conv1, dc1, 1, 1);

        for (std::size_t i = 0; i < grads.conv1.numel(); ++i)
            grads.conv1.data[i] += cg1.kernels.data[i];
        for (std::size_t i = 0; i < grads.conv2.numel(); ++i)
            grads.conv2.data[i] += cg2.kernels.data[i];
        for (std::size_t i = 0; i < grads.dw.numel(); ++i)
            grads.dw.data[i] += dg.weights.data[i];
        for (std::size_t i = 0; i < grads.db.numel(); ++i)
            grads.db.data[i] += dg.bias.data[i];
        return loss;
    }

    void apply(const Grads& grads, double lr) {
        nn::adam_update(conv1, grads.conv1, s_conv1, lr);
        nn::adam_update(conv2, grads.conv2, s_conv2, lr);
        nn::adam_update(dw, grads.dw, s_dw, lr);
        nn::adam_update(db, grads.db, s_db, lr);
    }
};

}  // namespace

ClassificationReport augmentation_harness(
    const std::vector<data::LabeledImage>& real_train,
    const std::vector<data::LabeledImage>& generated, double alpha,
    const std::vector<data::LabeledImage>& test_set, const HarnessConfig& config) {
    if (real_train.empty() || test_set.empty())
        throw std::invalid_argument("augmentation_harness: empty train or test set");

    const std::vector<data::LabeledImage> train =
        data::stratified_mix(real_train, generated, alpha, config.seed);

    int n_classes = 0;
    for (const auto& im : train) n_classes = std::max(n_classes, im.label + 1);
    for (const auto& im : test_set) n_classes = std::max(n_classes, im.label + 1);

    const int image_size = static_cast<int>(train[0].pixels.shape[1]);
    Rng rng(config.seed ^ 0x5eedcafeULL);
    Classifier model(n_classes, image_size, rng);

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(order, rng);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch));
            Classifier::Grads grads(model);
            for (std::size_t i = start; i < stop; ++i) {
                const auto& sample = train[order[i]];
                Classifier::Cache cache;
                model.forward(sample.pixels, cache);
                model.backward(cache, sample.label, grads);
            }
            grads.scale(1.0 / static_cast<double>(stop - start));
            model.apply(grads, config.learning_rate);
        }
    }

    std::vector<int> predictions;
    std::vector<int> labels;
    predictions.reserve(test_set.size());
    labels.reserve(test_set.size());
    for (const auto& sample : test_set) {
        predictions.push_back(model.predict(sample.pixels));
        labels.push_back(sample.label);
    }
    return classification_report(predictions, labels, n_classes);
}

}  // namespace hybridq::metrics
