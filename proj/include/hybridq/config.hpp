#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hybridq/gan.hpp"
#include "hybridq/qsim.hpp"

namespace hybridq::config {

// Full run configuration: "key = value" lines grouped under [section]
// headers. CLI flags override file values.
struct RunConfig {
    // [model]
    int latent_dim = 100;
    int sub_generators = 10;
    int qubits = 10;
    int layers = 6;

    // [training]
    int warmup_epochs = 20;
    int gan_epochs = 100;
    int batch = 16;
    double lr_quantum = 0.3;
    double lr_pre_post = 2e-4;
    double lr_discriminator = 2e-3;
    std::uint64_t seed = 1;
    int sample_every = 10;
    int fid_every = 0;

    // [data]
    std::string data_source = "synth";  // "synth" or "dir"
    int classes = 3;
    std::vector<int> counts = {64, 64, 64};
    int image_size = 16;
    std::uint64_t data_seed = 7;
    std::string data_dir;
    int class_filter = -1;  // train on one class only; -1 keeps all

    // [noise]
    double depolarizing = 0.0;
    double readout = 0.0;
    int trajectories = 1;
    int shots = 0;

    // [eval]
    int fid_samples = 256;
    std::uint64_t extractor_seed = 17;
    std::vector<double> alphas = {0.0, 0.25, 0.5};
    int classifier_epochs = 10;
    int classifier_batch = 16;
    std::vector<int> test_counts = {32, 32, 32};

    void validate() const;  // throws std::invalid_argument naming the field

    gan::ModelConfig model_config() const;
    gan::TrainConfig train_config() const;
    qsim::NoiseConfig noise_config() const;
};

RunConfig parse_config_file(const std::string& path);
void apply_config_line(RunConfig& config, const std::string& section,
                       const std::string& key, const std::string& value);

// Round-trippable echo of every effective value.
std::string config_echo(const RunConfig& config);

// CSV cells: decimal floats with 9 significant digits.
std::string csv_double(double value);

}  // namespace hybridq::config
