#include "hybridq/gan.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hybridq/metrics.hpp"

namespace hybridq::gan {

namespace {

Tensor uniform_tensor(std::vector<std::size_t> shape, double bound, Rng& rng) {
    Tensor t(std::move(shape));
    for (double& v : t.data) v = rng.uniform(-bound, bound);
    return t;
}

void axpy(Tensor& acc, const Tensor& g) {
    for (std::size_t i = 0; i < acc.numel(); ++i) acc.data[i] += g.data[i];
}

void scale(Tensor& t, double f) {
    for (double& v : t.data) v *= f;
}

std::vector<double> flatten_angles(const vqc::GeneratorParams& params) {
    std::vector<double> flat;
    flat.reserve(params.n_params());
    for (const auto& sg : params.sub_generators)
        flat.insert(flat.end(), sg.angles.begin(), sg.angles.end());
    return flat;
}

void unflatten_angles(const std::vector<double>& flat, vqc::GeneratorParams& params) {
    std::size_t pos = 0;
    for (auto& sg : params.sub_generators) {
        std::copy(flat.begin() + pos, flat.begin() + pos + sg.angles.size(),
                  sg.angles.begin());
        pos += sg.angles.size();
    }
}

}  // namespace

void ModelConfig::validate() const {
    if (latent_dim != sub_generators * qubits)
        throw std::invalid_argument("ModelConfig: latent_dim must equal sub_generators * qubits");
    if (sub_generators < 1) throw std::invalid_argument("ModelConfig: sub_generators must be >= 1");
    if (qubits < 1 || qubits > 16)
        throw std::invalid_argument("ModelConfig: qubits must be in [1,16]");
    if (layers < 0) throw std::invalid_argument("ModelConfig: layers must be >= 0");
    if (image_size != 16 && image_size != 32 && image_size != 64)
        throw std::invalid_argument("ModelConfig: image_size must be 16, 32 or 64");
    if (encoder_channels < 1 || encoder_hidden < 1 || decoder_channels < 1 ||
        disc_channels < 1)
        throw std::invalid_argument("ModelConfig: channel/width fields must be >= 1");
}

LatentGrid latent_grid(int latent_dim) {
    if (latent_dim < 1) throw std::invalid_argument("latent_grid: latent_dim must be >= 1");
    int rows = 1;
    for (int a = 1; a * a <= latent_dim; ++a)
        if (latent_dim % a == 0) rows = a;
    const int cols = latent_dim / rows;
    const int padding = (rows >= 3 && cols >= 3) ? 0 : 1;
    return {rows, cols, padding};
}

GanModel GanModel::init(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    GanModel m;
    m.config = config;

    const std::size_t C = config.encoder_channels;
    const std::size_t S = config.image_size;
    const std::size_t hidden = config.encoder_hidden;
    const std::size_t latent = config.latent_dim;
    const std::size_t enc_flat = C * (S / 2) * (S / 2);
    const std::size_t DC = config.decoder_channels;

    m.enc_conv = uniform_tensor({C, 3, 4, 4}, 1.0 / std::sqrt(3.0 * 16.0), rng);
    m.enc_w1 = uniform_tensor({hidden, enc_flat}, 1.0 / std::sqrt(double(enc_flat)), rng);
    m.enc_b1 = Tensor({hidden});
    m.enc_w2 = uniform_tensor({latent, hidden}, 1.0 / std::sqrt(double(hidden)), rng);
    m.enc_b2 = Tensor({latent});

    m.dec_w = uniform_tensor({DC * S * S, latent}, 1.0 / std::sqrt(double(latent)), rng);
    m.dec_b = Tensor({DC * S * S});
    m.dec_conv = uniform_tensor({3, DC, 3, 3}, 1.0 / std::sqrt(DC * 9.0), rng);

    const LatentGrid grid = latent_grid(config.latent_dim);
    const std::size_t gh = grid.rows + 2 * grid.padding - 2;
    const std::size_t gw = grid.cols + 2 * grid.padding - 2;
    const std::size_t disc_flat = config.disc_channels * gh * gw;
    m.disc_conv = uniform_tensor({static_cast<std::size_t>(config.disc_channels), 1, 3, 3},
                                 1.0 / 3.0, rng);
    m.disc_w = uniform_tensor({1, disc_flat}, 1.0 / std::sqrt(double(disc_flat)), rng);
    m.disc_b = Tensor({1});

    m.generator = vqc::GeneratorParams::make(config.sub_generators, config.layers,
                                             config.qubits);
    for (auto& sg : m.generator.sub_generators)
        for (double& a : sg.angles) a = rng.uniform(0.0, std::numbers::pi);

    return m;
}

// --- encoder -------------------------------------------------------------------

std::vector<double> encoder_forward(const GanModel& model, const Tensor& image,
                                    EncoderCache& cache) {
    const std::size_t S = model.config.image_size;
    image.require_shape({3, S, S}, "encoder_forward");
    cache.image = image;
    cache.conv_out = nn::conv2d(image, model.enc_conv, 2, 1);
    cache.act1 = nn::leaky_relu(cache.conv_out, 0.2);
    cache.flat = Tensor({cache.act1.numel()}, cache.act1.data);
    cache.d1_out = nn::dense(cache.flat, model.enc_w1, model.enc_b1);
    cache.act2 = nn::leaky_relu(cache.d1_out, 0.2);
    cache.d2_out = nn::dense(cache.act2, model.enc_w2, model.enc_b2);
    const Tensor out = nn::tanh_act(cache.d2_out);
    cache.latent = out.data;
    return cache.latent;
}

std::vector<double> encoder_forward(const GanModel& model, const Tensor& image) {
    EncoderCache cache;
    return encoder_forward(model, image, cache);
}

EncoderGrads encoder_backward(const GanModel& model, const EncoderCache& cache,
                              const std::vector<double>& grad_latent) {
    if (grad_latent.size() != cache.latent.size())
        throw std::invalid_argument("encoder_backward: grad length mismatch");
    const Tensor g_latent({grad_latent.size()}, grad_latent);
    const Tensor g_d2 = nn::tanh_backward(cache.d2_out, g_latent);
    const nn::DenseGrads d2 = nn::dense_backward(cache.act2, model.enc_w2, g_d2);
    const Tensor g_d1 = nn::leaky_relu_backward(cache.d1_out, d2.input, 0.2);
    const nn::DenseGrads d1 = nn::dense_backward(cache.flat, model.enc_w1, g_d1);
    Tensor g_act1(cache.act1.shape, d1.input.data);
    const Tensor g_conv = nn::leaky_relu_backward(cache.conv_out, g_act1, 0.2);
    const nn::Conv2dGrads cg =
        nn::conv2d_backward(cache.image, model.enc_conv, g_conv, 2, 1);
    return EncoderGrads{cg.kernels, d1.weights, d1.bias, d2.weights, d2.bias};
}

// --- decoder -------------------------------------------------------------------

Tensor decoder_forward(const GanModel& model, const std::vector<double>& latent,
                       DecoderCache& cache) {
    if (static_cast<int>(latent.size()) != model.config.latent_dim)
        throw std::invalid_argument("decoder_forward: latent length mismatch");
    const std::size_t S = model.config.image_size;
    const std::size_t DC = model.config.decoder_channels;
    cache.latent = latent;
    const Tensor lat({latent.size()}, latent);
    cache.d_out = nn::dense(lat, model.dec_w, model.dec_b);
    Tensor act = nn::relu(cache.d_out);
    cache.act = Tensor({DC, S, S}, act.data);
    cache.conv_out = nn::conv2d(cache.act, model.dec_conv, 1, 1);
    cache.image = nn::tanh_act(cache.conv_out);
    return cache.image;
}

Tensor decoder_forward(const GanModel& model, const std::vector<double>& latent) {
    DecoderCache cache;
    return decoder_forward(model, latent, cache);
}

DecoderGrads decoder_backward(const GanModel& model, const DecoderCache& cache,
                              const Tensor& grad_image) {
    const Tensor g_conv_out = nn::tanh_backward(cache.conv_out, grad_image);
    const nn::Conv2dGrads cg =
        nn::conv2d_backward(cache.act, model.dec_conv, g_conv_out, 1, 1);
    Tensor g_act_flat({cache.d_out.numel()}, cg.input.data);
    const Tensor g_d = nn::relu_backward(cache.d_out, g_act_flat);
    const Tensor lat({cache.latent.size()}, cache.latent);
    const nn::DenseGrads dg = nn::dense_backward(lat, model.dec_w, g_d);
    return DecoderGrads{dg.weights, dg.bias, cg.kernels, dg.input.data};
}

// --- discriminator ----------------------------------------------------------------

double discriminator_forward(const GanModel& model, const std::vector<double>& latent,
                             DiscCache& cache) {
    if (static_cast<int>(latent.size()) != model.config.latent_dim)
        throw std::invalid_argument("discriminator_forward: latent length mismatch");
    const LatentGrid grid = latent_grid(model.config.latent_dim);
    cache.latent = latent;
    cache.fmap = Tensor({1, static_cast<std::size_t>(grid.rows),
                         static_cast<std::size_t>(grid.cols)},
                        latent);
    cache.conv_out = nn::conv2d(cache.fmap, model.disc_conv, 1, grid.padding);
    cache.act = nn::leaky_relu(cache.conv_out, 0.2);
    cache.flat = Tensor({cache.act.numel()}, cache.act.data);
    const Tensor out = nn::dense(cache.flat, model.disc_w, model.disc_b);
    cache.logit = out.data[0];
    return cache.logit;
}

double discriminator_forward(const GanModel& model, const std::vector<double>& latent) {
    DiscCache cache;
    return discriminator_forward(model, latent, cache);
}

DiscGrads discriminator_backward(const GanModel& model, const DiscCache& cache,
                                 double upstream) {
    const LatentGrid grid = latent_grid(model.config.latent_dim);
    const Tensor g_logit({1}, {upstream});
    const nn::DenseGrads dg = nn::dense_backward(cache.flat, model.disc_w, g_logit);
    Tensor g_act(cache.act.shape, dg.input.data);
    const Tensor g_conv = nn::leaky_relu_backward(cache.conv_out, g_act, 0.2);
    const nn::Conv2dGrads cg =
        nn::conv2d_backward(cache.fmap, model.disc_conv, g_conv, 1, grid.padding);
    return DiscGrads{cg.kernels, dg.weights, dg.bias, cg.input.data};
}

// --- adaptive noise -----------------------------------------------------------------

std::vector<double> sample_noise(const AdaptiveNoise& state, int latent_dim, Rng& rng) {
    std::vector<double> z(latent_dim);
    const double hi = state.r * std::numbers::pi / 2.0;
    for (double& v : z) v = rng.uniform(0.0, hi);
    return z;
}

void update_noise(AdaptiveNoise& state, double loss_g, double loss_d) {
    if (!(loss_d > 0.0))
        throw std::invalid_argument("update_noise: loss_d must be positive");
    if (!std::isfinite(loss_g) || !std::isfinite(loss_d))
        throw std::invalid_argument("update_noise: losses must be finite");
    const double ratio = loss_g / loss_d;
    state.r = std::clamp(state.r * (1.0 + state.eta * (ratio - 1.0)), state.r_min,
                         state.r_max);
}

double adversarial_generator_loss(const GanModel& model, const std::vector<double>& z,
                                  vqc::GeneratorParams* grad_out) {
    const std::vector<double> fake = vqc::generator_forward(model.generator, z);
    DiscCache cache;
    const double logit = discriminator_forward(model, fake, cache);
    const double loss = nn::bce_with_logits(logit, 1);
    if (grad_out != nullptr) {
        const DiscGrads dg =
            discriminator_backward(model, cache, nn::bce_with_logits_grad(logit, 1));
        *grad_out = vqc::generator_backward(model.generator, z, dg.latent);
    }
    return loss;
}

// --- training -------------------------------------------------------------------------

void TrainConfig::validate() const {
    if (warmup_epochs < 0 || gan_epochs < 0)
        throw std::invalid_argument("TrainConfig: epoch counts must be >= 0");
    if (batch < 1) throw std::invalid_argument("TrainConfig: batch must be >= 1");
    if (lr_quantum <= 0.0 || lr_pre_post <= 0.0 || lr_discriminator <= 0.0)
        throw std::invalid_argument("TrainConfig: learning rates must be > 0");
    if (fid_every < 0) throw std::invalid_argument("TrainConfig: fid_every must be >= 0");
    if (fid_samples < 2) throw std::invalid_argument("TrainConfig: fid_samples must be >= 2");
}

namespace {

void check_finite(double loss, const char* step, int epoch) {
    if (!std::isfinite(loss))
        throw std::runtime_error(std::string("training diverged: non-finite loss in ") +
                                 step + " at epoch " + std::to_string(epoch));
}

}  // namespace

std::vector<EpochStats> train(GanModel& model,
                              const std::vector<data::LabeledImage>& dataset,
                              const TrainConfig& config, const EpochCallback& on_epoch) {
    config.validate();
    model.config.validate();
    if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");
    const std::size_t S = model.config.image_size;
    for (const auto& im : dataset)
        im.pixels.require_shape({3, S, S}, "train dataset image");

    const int latent = model.config.latent_dim;
    Rng master(config.seed);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    // real-side FID statistics are fixed across epochs
    const bool fid_enabled = config.fid_every > 0 && config.fid_reference.size() >= 2;
    metrics::FeatureStats real_stats;
    if (fid_enabled) {
        std::vector<Tensor> ref = config.fid_reference;
        if (ref.size() > static_cast<std::size_t>(config.fid_samples))
            ref.resize(config.fid_samples);
        real_stats = metrics::gaussian_stats(
            metrics::extract_features(ref, config.extractor_seed));
    }

    // one reconstruction update on a batch; returns the mean loss
    auto recon_batch = [&](std::size_t start, std::size_t stop, int epoch) {
        EncoderGrads enc_sum{Tensor(model.enc_conv.shape), Tensor(model.enc_w1.shape),
                             Tensor(model.enc_b1.shape), Tensor(model.enc_w2.shape),
                             Tensor(model.enc_b2.shape)};
        DecoderGrads dec_sum{Tensor(model.dec_w.shape), Tensor(model.dec_b.shape),
                             Tensor(model.dec_conv.shape), {}};
        double loss = 0.0;
        for (std::size_t i = start; i < stop; ++i) {
            const Tensor& img = dataset[order[i]].pixels;
            EncoderCache ec;
            const std::vector<double> lat = encoder_forward(model, img, ec);
            DecoderCache dc;
            const Tensor recon = decoder_forward(model, lat, dc);
            loss += nn::mse(recon, img);
            const DecoderGrads dg = decoder_backward(model, dc, nn::mse_grad(recon, img));
            const EncoderGrads eg = encoder_backward(model, ec, dg.latent);
            axpy(dec_sum.w, dg.w);
            axpy(dec_sum.b, dg.b);
            axpy(dec_sum.conv, dg.conv);
            axpy(enc_sum.conv, eg.conv);
            axpy(enc_sum.w1, eg.w1);
            axpy(enc_sum.b1, eg.b1);
            axpy(enc_sum.w2, eg.w2);
            axpy(enc_sum.b2, eg.b2);
        }
        const double inv = 1.0 / static_cast<double>(stop - start);
        loss *= inv;
        check_finite(loss, "reconstruction step", epoch);
        scale(enc_sum.conv, inv);
        scale(enc_sum.w1, inv);
        scale(enc_sum.b1, inv);
        scale(enc_sum.w2, inv);
        scale(enc_sum.b2, inv);
        scale(dec_sum.w, inv);
        scale(dec_sum.b, inv);
        scale(dec_sum.conv, inv);
        nn::adam_update(model.enc_conv, enc_sum.conv, model.s_enc_conv, config.lr_pre_post);
        nn::adam_update(model.enc_w1, enc_sum.w1, model.s_enc_w1, config.lr_pre_post);
        nn::adam_update(model.enc_b1, enc_sum.b1, model.s_enc_b1, config.lr_pre_post);
        nn::adam_update(model.enc_w2, enc_sum.w2, model.s_enc_w2, config.lr_pre_post);
        nn::adam_update(model.enc_b2, enc_sum.b2, model.s_enc_b2, config.lr_pre_post);
        nn::adam_update(model.dec_w, dec_sum.w, model.s_dec_w, config.lr_pre_post);
        nn::adam_update(model.dec_b, dec_sum.b, model.s_dec_b, config.lr_pre_post);
        nn::adam_update(model.dec_conv, dec_sum.conv, model.s_dec_conv, config.lr_pre_post);
        return loss;
    };

    std::vector<EpochStats> history;
    history.reserve(config.warmup_epochs + config.gan_epochs);
    int epoch_id = 0;

    for (int we = 0; we < config.warmup_epochs; ++we) {
        const auto t0 = std::chrono::steady_clock::now();
        ++epoch_id;
        shuffle(order, master);
        double recon = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch));
            recon += recon_batch(start, stop, epoch_id);
            ++batches;
        }
        EpochStats stats;
        stats.epoch = epoch_id;
        stats.loss_recon = recon / static_cast<double>(batches);
        stats.r = model.noise_state.r;
        stats.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        history.push_back(stats);
        if (on_epoch) on_epoch(stats, model);
    }

    for (int ge = 0; ge < config.gan_epochs; ++ge) {
        const auto t0 = std::chrono::steady_clock::now();
        ++epoch_id;
        shuffle(order, master);
        double sum_d = 0.0, sum_g = 0.0, sum_recon = 0.0;
        std::size_t batches = 0;

        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch));
            const std::size_t bsz = stop - start;
            const double inv = 1.0 / static_cast<double>(bsz);

            // discriminator step: real latents vs generator outputs
            DiscGrads disc_sum{Tensor(model.disc_conv.shape), Tensor(model.disc_w.shape),
                               Tensor(model.disc_b.shape), {}};
            std::vector<std::vector<double>> zs(bsz);
            double loss_d = 0.0;
            for (std::size_t i = 0; i < bsz; ++i) {
                const Tensor& img = dataset[order[start + i]].pixels;
                const std::vector<double> real_latent = encoder_forward(model, img);
                zs[i] = sample_noise(model.noise_state, latent, master);
                const std::vector<double> fake =
                    vqc::generator_forward(model.generator, zs[i]);

                DiscCache c_real, c_fake;
                const double logit_real = discriminator_forward(model, real_latent, c_real);
                const double logit_fake = discriminator_forward(model, fake, c_fake);
                loss_d += 0.5 * (nn::bce_with_logits(logit_real, 1) +
                                 nn::bce_with_logits(logit_fake, 0));
                const DiscGrads g_real = discriminator_backward(
                    model, c_real, 0.5 * nn::bce_with_logits_grad(logit_real, 1));
                const DiscGrads g_fake = discriminator_backward(
                    model, c_fake, 0.5 * nn::bce_with_logits_grad(logit_fake, 0));
                axpy(disc_sum.conv, g_real.conv);
                axpy(disc_sum.conv, g_fake.conv);
                axpy(disc_sum.w, g_real.w);
                axpy(disc_sum.w, g_fake.w);
                axpy(disc_sum.b, g_real.b);
                axpy(disc_sum.b, g_fake.b);
            }
            loss_d *= inv;
            check_finite(loss_d, "discriminator step", epoch_id);
            scale(disc_sum.conv, inv);
            scale(disc_sum.w, inv);
            scale(disc_sum.b, inv);
            nn::adam_update(model.disc_conv, disc_sum.conv, model.s_disc_conv,
                            config.lr_discriminator);
            nn::adam_update(model.disc_w, disc_sum.w, model.s_disc_w,
                            config.lr_discriminator);
            nn::adam_update(model.disc_b, disc_sum.b, model.s_disc_b,
                            config.lr_discriminator);

            // generator step against the updated discriminator
            std::vector<double> angle_grad(model.generator.n_params(), 0.0);
            double loss_g = 0.0;
            for (std::size_t i = 0; i < bsz; ++i) {
                vqc::GeneratorParams g = model.generator;
                loss_g += adversarial_generator_loss(model, zs[i], &g);
                const std::vector<double> flat = flatten_angles(g);
                for (std::size_t p = 0; p < flat.size(); ++p) angle_grad[p] += flat[p];
            }
            loss_g *= inv;
            check_finite(loss_g, "generator step", epoch_id);
            for (double& v : angle_grad) v *= inv;
            std::vector<double> angles = flatten_angles(model.generator);
            nn::adam_update(angles, angle_grad, model.s_generator, config.lr_quantum);
            unflatten_angles(angles, model.generator);

            // pre/post layers keep learning the reconstruction objective
            sum_recon += recon_batch(start, stop, epoch_id);
            sum_d += loss_d;
            sum_g += loss_g;
            ++batches;
        }

        EpochStats stats;
        stats.epoch = epoch_id;
        stats.loss_d = sum_d / static_cast<double>(batches);
        stats.loss_g = sum_g / static_cast<double>(batches);
        stats.loss_recon = sum_recon / static_cast<double>(batches);
        if (stats.loss_d > 0.0)
            update_noise(model.noise_state, stats.loss_g, stats.loss_d);
        stats.r = model.noise_state.r;

        if (fid_enabled && (ge + 1) % config.fid_every == 0) {
            Rng fid_rng = master.fork();
            qsim::NoiseConfig noiseless;
            const std::vector<Tensor> samples =
                generate(model, config.fid_samples, noiseless, fid_rng);
            const metrics::FeatureStats fake_stats = metrics::gaussian_stats(
                metrics::extract_features(samples, config.extractor_seed));
            stats.fid = metrics::frechet_distance(real_stats, fake_stats);
        }

        stats.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        history.push_back(stats);
        if (on_epoch) on_epoch(stats, model);
    }

    return history;
}

std::vector<Tensor> generate(const GanModel& model, int n,
                             const qsim::NoiseConfig& noise, Rng& rng) {
    if (n < 0) throw std::invalid_argument("generate: n must be >= 0");
    noise.validate();
    std::vector<Tensor> images;
    images.reserve(n);
    for (int i = 0; i < n; ++i) {
        const std::vector<double> z =
            sample_noise(model.noise_state, model.config.latent_dim, rng);
        const std::vector<double> lat =
            vqc::generator_forward(model.generator, z, noise, rng);
        images.push_back(decoder_forward(model, lat));
    }
    return images;
}

// --- checkpoint ------------------------------------------------------------------------

namespace {

constexpr const char* kMagic = "hybridq-checkpoint";

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct NamedParam {
    const char* name;
    Tensor GanModel::* member;
};

// Serialization order is fixed; loads accept only this exact set.
constexpr NamedParam kParamTable[] = {
    {"encoder.conv", &GanModel::enc_conv},
    {"encoder.dense1.weight", &GanModel::enc_w1},
    {"encoder.dense1.bias", &GanModel::enc_b1},
    {"encoder.dense2.weight", &GanModel::enc_w2},
    {"encoder.dense2.bias", &GanModel::enc_b2},
    {"decoder.dense.weight", &GanModel::dec_w},
    {"decoder.dense.bias", &GanModel::dec_b},
    {"decoder.conv", &GanModel::dec_conv},
    {"discriminator.conv", &GanModel::disc_conv},
    {"discriminator.dense.weight", &GanModel::disc_w},
    {"discriminator.dense.bias", &GanModel::disc_b},
};
constexpr std::size_t kParamCount = sizeof(kParamTable) / sizeof(kParamTable[0]);

}  // namespace

void save_checkpoint(const GanModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + path);

    out << kMagic << "\n";
    out << "format_version = 1\n";
    out << "[config]\n";
    const ModelConfig& c = model.config;
    out << "latent_dim = " << c.latent_dim << "\n";
    out << "sub_generators = " << c.sub_generators << "\n";
    out << "qubits = " << c.qubits << "\n";
    out << "layers = " << c.layers << "\n";
    out << "image_size = " << c.image_size << "\n";
    out << "encoder_channels = " << c.encoder_channels << "\n";
    out << "encoder_hidden = " << c.encoder_hidden << "\n";
    out << "decoder_channels = " << c.decoder_channels << "\n";
    out << "disc_channels = " << c.disc_channels << "\n";
    out << "noise_r = " << fmt17(model.noise_state.r) << "\n";
    out << "noise_eta = " << fmt17(model.noise_state.eta) << "\n";
    out << "noise_r_min = " << fmt17(model.noise_state.r_min) << "\n";
    out << "noise_r_max = " << fmt17(model.noise_state.r_max) << "\n";

    auto write_param = [&out](const std::string& name, const std::vector<std::size_t>& shape,
                              const std::vector<double>& values) {
        out << "[param " << name << "]\n";
        out << "shape =";
        for (std::size_t d : shape) out << " " << d;
        out << "\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << fmt17(values[i]);
            out << (((i + 1) % 8 == 0 || i + 1 == values.size()) ? "\n" : " ");
        }
    };

    for (const NamedParam& p : kParamTable) {
        const Tensor& t = model.*(p.member);
        write_param(p.name, t.shape, t.data);
    }
    write_param("generator.angles",
                {static_cast<std::size_t>(c.sub_generators),
                 static_cast<std::size_t>(c.layers), static_cast<std::size_t>(c.qubits)},
                flatten_angles(model.generator));
    out << "[end]\n";
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

namespace {

[[noreturn]] void load_error(const std::string& what) {
    throw std::runtime_error("checkpoint load error: " + what);
}

}  // namespace

GanModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) load_error("cannot open " + path);

    std::string line;
    if (!std::getline(in, line) || line != kMagic) load_error("bad magic line");
    if (!std::getline(in, line)) load_error("missing format_version");
    {
        std::istringstream ss(line);
        std::string key, eq;
        long version = -1;
        ss >> key >> eq >> version;
        if (key != "format_version" || eq != "=") load_error("missing format_version");
        if (version != 1)
            load_error("unsupported format_version " + std::to_string(version));
    }
    if (!std::getline(in, line) || line != "[config]") load_error("missing [config] section");

    ModelConfig config;
    AdaptiveNoise noise;
    while (std::getline(in, line)) {
        if (line.rfind("[param ", 0) == 0 || line == "[end]") break;
        std::istringstream ss(line);
        std::string key, eq, value;
        ss >> key >> eq >> value;
        if (eq != "=") load_error("malformed config line: " + line);
        auto as_int = [&]() { return std::stoi(value); };
        auto as_double = [&]() { return std::stod(value); };
        if (key == "latent_dim") config.latent_dim = as_int();
        else if (key == "sub_generators") config.sub_generators = as_int();
        else if (key == "qubits") config.qubits = as_int();
        else if (key == "layers") config.layers = as_int();
        else if (key == "image_size") config.image_size = as_int();
        else if (key == "encoder_channels") config.encoder_channels = as_int();
        else if (key == "encoder_hidden") config.encoder_hidden = as_int();
        else if (key == "decoder_channels") config.decoder_channels = as_int();
        else if (key == "disc_channels") config.disc_channels = as_int();
        else if (key == "noise_r") noise.r = as_double();
        else if (key == "noise_eta") noise.eta = as_double();
        else if (key == "noise_r_min") noise.r_min = as_double();
        else if (key == "noise_r_max") noise.r_max = as_double();
        else load_error("unknown config key " + key);
    }

    GanModel model = GanModel::init(config, 0);
    model.noise_state = noise;

    std::vector<bool> seen(kParamCount + 1, false);

    auto read_values = [&in](const std::string& name, std::size_t count,
                             std::vector<double>& dst) {
        dst.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            if (!(in >> dst[i]))
                load_error("truncated values for param " + name);
        }
        // consume the trailing newline so getline resumes at the next block
        std::string rest;
        std::getline(in, rest);
        if (!rest.empty()) load_error("trailing characters after param " + name);
    };

    while (true) {
        if (line == "[end]") break;
        if (line.rfind("[param ", 0) != 0 || line.back() != ']')
            load_error("expected [param ...] or [end], got: " + line);
        const std::string name = line.substr(7, line.size() - 8);

        if (!std::getline(in, line)) load_error("missing shape for param " + name);
        std::istringstream ss(line);
        std::string key, eq;
        ss >> key >> eq;
        if (key != "shape" || eq != "=") load_error("missing shape for param " + name);
        std::vector<std::size_t> shape;
        long d;
        while (ss >> d) {
            if (d < 0) load_error("negative dimension for param " + name);
            shape.push_back(static_cast<std::size_t>(d));
        }

        if (name == "generator.angles") {
            const std::vector<std::size_t> expect = {
                static_cast<std::size_t>(config.sub_generators),
                static_cast<std::size_t>(config.layers),
                static_cast<std::size_t>(config.qubits)};
            if (shape != expect) load_error("shape mismatch for param " + name);
            if (seen.back()) load_error("duplicate param " + name);
            seen.back() = true;
            std::vector<double> flat;
            read_values(name, Tensor::count(shape), flat);
            unflatten_angles(flat, model.generator);
        } else {
            bool found = false;
            for (std::size_t t = 0; t < kParamCount; ++t) {
                if (name != kParamTable[t].name) continue;
                found = true;
                if (seen[t]) load_error("duplicate param " + name);
                seen[t] = true;
                Tensor& tensor = model.*(kParamTable[t].member);
                if (shape != tensor.shape)
                    load_error("shape mismatch for param " + name);
                read_values(name, tensor.numel(), tensor.data);
                break;
            }
            if (!found) load_error("unknown param " + name);
        }
        if (!std::getline(in, line)) load_error("missing [end] marker");
    }

    for (std::size_t t = 0; t < kParamCount; ++t)
        if (!seen[t]) load_error(std::string("missing param ") + kParamTable[t].name);
    if (!seen.back()) load_error("missing param generator.angles");

    return model;
}

}  // namespace hybridq::gan
