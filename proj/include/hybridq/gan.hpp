#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hybridq/data.hpp"
#include "hybridq/nn.hpp"
#include "hybridq/qsim.hpp"
#include "hybridq/tensor.hpp"
#include "hybridq/vqc.hpp"

namespace hybridq::gan {

// Input-noise scale that tracks the generator/discriminator loss ratio.
struct AdaptiveNoise {
    double r = 1.0;
    double eta = 0.1;
    double r_min = 0.25;
    double r_max = 2.0;
};

struct EpochStats {
    int epoch = 0;
    double loss_d = 0.0;
    double loss_g = 0.0;
    double loss_recon = 0.0;
    double r = 1.0;
    std::optional<double> fid;
    double wall_time = 0.0;  // seconds
};

struct ModelConfig {
    int latent_dim = 100;
    int sub_generators = 10;
    int qubits = 10;
    int layers = 6;
    int image_size = 16;
    int encoder_channels = 16;
    int encoder_hidden = 256;
    int decoder_channels = 16;
    int disc_channels = 8;

    void validate() const;
};

// The discriminator views the latent vector as a [1,rows,cols] map; 100
// becomes 10x10. Padding drops to 1 when a side is smaller than the kernel.
struct LatentGrid {
    int rows;
    int cols;
    int padding;
};
LatentGrid latent_grid(int latent_dim);

// Encoder, decoder and discriminator parameters plus the quantum generator
// and the adaptive-noise state. Adam moments live next to each group.
struct GanModel {
    ModelConfig config;

    Tensor enc_conv;            // [C,3,4,4], stride 2, pad 1
    Tensor enc_w1, enc_b1;      // dense to encoder_hidden
    Tensor enc_w2, enc_b2;      // dense to latent_dim, tanh

    Tensor dec_w, dec_b;        // dense latent -> C*S*S, relu
    Tensor dec_conv;            // [3,C,3,3], stride 1, pad 1, tanh

    Tensor disc_conv;           // [8,1,3,3] over the latent grid
    Tensor disc_w, disc_b;      // dense to a single logit

    vqc::GeneratorParams generator;
    AdaptiveNoise noise_state;

    nn::AdamState s_enc_conv, s_enc_w1, s_enc_b1, s_enc_w2, s_enc_b2;
    nn::AdamState s_dec_w, s_dec_b, s_dec_conv;
    nn::AdamState s_disc_conv, s_disc_w, s_disc_b;
    nn::AdamState s_generator;

    static GanModel init(const ModelConfig& config, std::uint64_t seed);
};

// --- forward passes ----------------------------------------------------------
std::vector<double> encoder_forward(const GanModel& model, const Tensor& image);
Tensor decoder_forward(const GanModel& model, const std::vector<double>& latent);
double discriminator_forward(const GanModel& model, const std::vector<double>& latent);

// --- backward passes (used by the training loop and by gradient tests) -------
struct EncoderCache {
    Tensor image, conv_out, act1, flat, d1_out, act2, d2_out;
    std::vector<double> latent;
};
std::vector<double> encoder_forward(const GanModel& model, const Tensor& image,
                                    EncoderCache& cache);
struct EncoderGrads {
    Tensor conv, w1, b1, w2, b2;
};
EncoderGrads encoder_backward(const GanModel& model, const EncoderCache& cache,
                              const std::vector<double>& grad_latent);

struct DecoderCache {
    std::vector<double> latent;
    Tensor d_out, act, conv_out, image;
};
Tensor decoder_forward(const GanModel& model, const std::vector<double>& latent,
                       DecoderCache& cache);
struct DecoderGrads {
    Tensor w, b, conv;
    std::vector<double> latent;
};
DecoderGrads decoder_backward(const GanModel& model, const DecoderCache& cache,
                              const Tensor& grad_image);

struct DiscCache {
    std::vector<double> latent;
    Tensor fmap, conv_out, act, flat;
    double logit = 0.0;
};
double discriminator_forward(const GanModel& model, const std::vector<double>& latent,
                             DiscCache& cache);
struct DiscGrads {
    Tensor conv, w, b;
    std::vector<double> latent;
};
DiscGrads discriminator_backward(const GanModel& model, const DiscCache& cache,
                                 double upstream);

// --- adaptive noise -----------------------------------------------------------
// Each component of z is Uniform(0, r*pi/2).
std::vector<double> sample_noise(const AdaptiveNoise& state, int latent_dim, Rng& rng);

// r <- clamp(r * (1 + eta*(loss_g/loss_d - 1)), r_min, r_max).
void update_noise(AdaptiveNoise& state, double loss_g, double loss_d);

// Non-saturating generator loss BCE(D(G(z)), 1) for one noise draw; when
// grad_out is non-null it receives d(loss)/d(angles) via the parameter-shift
// Jacobian chained through the discriminator.
double adversarial_generator_loss(const GanModel& model, const std::vector<double>& z,
                                  vqc::GeneratorParams* grad_out);

// --- training / inference ------------------------------------------------------
struct TrainConfig {
    int warmup_epochs = 20;
    int gan_epochs = 100;
    int batch = 16;
    double lr_quantum = 0.3;
    double lr_pre_post = 2e-4;
    double lr_discriminator = 2e-3;
    std::uint64_t seed = 1;

    // FID evaluation during the adversarial phase; 0 disables it.
    int fid_every = 0;
    int fid_samples = 256;
    std::uint64_t extractor_seed = 17;
    std::vector<Tensor> fid_reference;

    void validate() const;
};

using EpochCallback = std::function<void(const EpochStats&, const GanModel&)>;

// Phase A: encoder+decoder reconstruction warmup. Phase B: adversarial
// training of the discriminator and the quantum generator with continued
// reconstruction updates. Deterministic given (config, seed).
std::vector<EpochStats> train(GanModel& model,
                              const std::vector<data::LabeledImage>& dataset,
                              const TrainConfig& config,
                              const EpochCallback& on_epoch = nullptr);

// z -> quantum generator -> decoder. The noise config emulates NISQ
// execution; pass a default NoiseConfig for noiseless inference.
std::vector<Tensor> generate(const GanModel& model, int n,
                             const qsim::NoiseConfig& noise, Rng& rng);

// Versioned text checkpoint; round trip is bitwise identical.
void save_checkpoint(const GanModel& model, const std::string& path);
GanModel load_checkpoint(const std::string& path);

}  // namespace hybridq::gan
