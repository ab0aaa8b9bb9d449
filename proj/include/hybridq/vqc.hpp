#pragma once

#include <vector>

#include "hybridq/qsim.hpp"

namespace hybridq::vqc {

// Trainable angles of one variational sub-generator, row-major
// [n_layers x n_qubits].
struct SubGenParams {
    int n_layers = 6;
    int n_qubits = 10;
    std::vector<double> angles;  // size n_layers * n_qubits

    SubGenParams() = default;
    SubGenParams(int layers, int qubits)
        : n_layers(layers), n_qubits(qubits),
          angles(static_cast<std::size_t>(layers) * qubits, 0.0) {}

    double& angle(int layer, int qubit) {
        return angles[static_cast<std::size_t>(layer) * n_qubits + qubit];
    }
    double angle(int layer, int qubit) const {
        return angles[static_cast<std::size_t>(layer) * n_qubits + qubit];
    }
    int n_params() const { return n_layers * n_qubits; }
    void validate() const;
};

// The quantum generator: an ordered group of sub-generators, each producing
// one contiguous slice of the latent vector.
struct GeneratorParams {
    std::vector<SubGenParams> sub_generators;

    int n_qubits() const { return sub_generators.empty() ? 0 : sub_generators[0].n_qubits; }
    int n_layers() const { return sub_generators.empty() ? 0 : sub_generators[0].n_layers; }
    int latent_dim() const { return static_cast<int>(sub_generators.size()) * n_qubits(); }
    int n_params() const { return latent_dim() == 0 ? 0 : latent_dim() * n_layers(); }
    void validate() const;

    static GeneratorParams make(int count, int layers, int qubits);
};

// Circuit: RY(z[i]) on each qubit, then per layer RY(angle) on each qubit
// followed by the CNOT chain i -> i+1; outputs are per-qubit <Z>.
std::vector<double> subgen_forward(const SubGenParams& params,
                                   const std::vector<double>& z_chunk,
                                   const qsim::NoiseConfig& noise, Rng& rng);

// Noiseless convenience overload.
std::vector<double> subgen_forward(const SubGenParams& params,
                                   const std::vector<double>& z_chunk);

// Exact parameter-shift Jacobian, [n_qubits outputs x n_params] row-major.
// Entry (o, p) = (f_o(theta_p + pi/2) - f_o(theta_p - pi/2)) / 2.
std::vector<double> subgen_jacobian(const SubGenParams& params,
                                    const std::vector<double>& z_chunk);

std::vector<double> generator_forward(const GeneratorParams& params,
                                      const std::vector<double>& z,
                                      const qsim::NoiseConfig& noise, Rng& rng);

std::vector<double> generator_forward(const GeneratorParams& params,
                                      const std::vector<double>& z);

// Gradient of <upstream, generator_forward(params, z)> with respect to every
// angle; same shape as params. Noiseless mode only.
GeneratorParams generator_backward(const GeneratorParams& params,
                                   const std::vector<double>& z,
                                   const std::vector<double>& upstream);

}  // namespace hybridq::vqc
