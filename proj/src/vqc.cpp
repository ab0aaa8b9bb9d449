#include "hybridq/vqc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hybridq::vqc {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

std::vector<qsim::GateSpec> build_circuit(const SubGenParams& params,
                                          const std::vector<double>& z_chunk) {
    std::vector<qsim::GateSpec> gates;
    const int n = params.n_qubits;
    gates.reserve(static_cast<std::size_t>(n) +
                  static_cast<std::size_t>(params.n_layers) * (2 * n - 1));
    for (int i = 0; i < n; ++i) gates.push_back(qsim::GateSpec::ry(i, z_chunk[i]));
    for (int layer = 0; layer < params.n_layers; ++layer) {
        for (int i = 0; i < n; ++i)
            gates.push_back(qsim::GateSpec::ry(i, params.angle(layer, i)));
        for (int i = 0; i + 1 < n; ++i)
            gates.push_back(qsim::GateSpec::cnot(i, i + 1));
    }
    return gates;
}

std::vector<double> run_exact(const SubGenParams& params,
                              const std::vector<double>& z_chunk) {
    qsim::StateVector state(params.n_qubits);
    const int n = params.n_qubits;
    for (int i = 0; i < n; ++i) state.apply_ry(i, z_chunk[i]);
    for (int layer = 0; layer < params.n_layers; ++layer) {
        for (int i = 0; i < n; ++i) state.apply_ry(i, params.angle(layer, i));
        for (int i = 0; i + 1 < n; ++i) state.apply_cnot(i, i + 1);
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = state.expectation_z(i);
    return out;
}

void check_chunk(const SubGenParams& params, const std::vector<double>& z_chunk) {
    params.validate();
    if (static_cast<int>(z_chunk.size()) != params.n_qubits)
        throw std::invalid_argument("subgen_forward: z chunk length " +
                                    std::to_string(z_chunk.size()) +
                                    " != n_qubits " + std::to_string(params.n_qubits));
}

}  // namespace

void SubGenParams::validate() const {
    if (n_layers < 0 || n_qubits < 1)
        throw std::invalid_argument("SubGenParams: need n_layers >= 0 and n_qubits >= 1");
    if (angles.size() != static_cast<std::size_t>(n_layers) * n_qubits)
        throw std::invalid_argument("SubGenParams: angle matrix shape mismatch");
    for (double a : angles) {
        if (!std::isfinite(a))
            throw std::invalid_argument("SubGenParams: non-finite angle");
    }
}

void GeneratorParams::validate() const {
    if (sub_generators.empty())
        throw std::invalid_argument("GeneratorParams: no sub-generators");
    for (const SubGenParams& sg : sub_generators) {
        sg.validate();
        if (sg.n_qubits != n_qubits() || sg.n_layers != n_layers())
            throw std::invalid_argument(
                "GeneratorParams: sub-generators must share n_qubits and n_layers");
    }
}

GeneratorParams GeneratorParams::make(int count, int layers, int qubits) {
    if (count < 1)
        throw std::invalid_argument("GeneratorParams: count must be >= 1");
    GeneratorParams g;
    g.sub_generators.assign(count, SubGenParams(layers, qubits));
    return g;
}

std::vector<double> subgen_forward(const SubGenParams& params,
                                   const std::vector<double>& z_chunk,
                                   const qsim::NoiseConfig& noise, Rng& rng) {
    check_chunk(params, z_chunk);
    noise.validate();
    if (noise.is_noiseless()) return run_exact(params, z_chunk);

    const int n = params.n_qubits;
    const auto gates = build_circuit(params, z_chunk);
    std::vector<double> out(n, 0.0);
    for (int t = 0; t < noise.trajectories; ++t) {
        qsim::StateVector state(n);
        for (const auto& g : gates) qsim::apply_noisy_gate(state, g, noise, rng);
        for (int i = 0; i < n; ++i) out[i] += qsim::measure_z(state, i, noise, rng);
    }
    for (double& v : out) v /= noise.trajectories;
    return out;
}

std::vector<double> subgen_forward(const SubGenParams& params,
                                   const std::vector<double>& z_chunk) {
    check_chunk(params, z_chunk);
    return run_exact(params, z_chunk);
}

std::vector<double> subgen_jacobian(const SubGenParams& params,
                                    const std::vector<double>& z_chunk) {
    check_chunk(params, z_chunk);
    const int n_out = params.n_qubits;
    const int n_par = params.n_params();
    std::vector<double> jac(static_cast<std::size_t>(n_out) * n_par, 0.0);
    SubGenParams shifted = params;
    for (int p = 0; p < n_par; ++p) {
        const double original = shifted.angles[p];
        shifted.angles[p] = original + kHalfPi;
        const std::vector<double> plus = run_exact(shifted, z_chunk);
        shifted.angles[p] = original - kHalfPi;
        const std::vector<double> minus = run_exact(shifted, z_chunk);
        shifted.angles[p] = original;
        for (int o = 0; o < n_out; ++o)
            jac[static_cast<std::size_t>(o) * n_par + p] = 0.5 * (plus[o] - minus[o]);
    }
    return jac;
}

std::vector<double> generator_forward(const GeneratorParams& params,
                                      const std::vector<double>& z,
                                      const qsim::NoiseConfig& noise, Rng& rng) {
    params.validate();
    const int n = params.n_qubits();
    if (static_cast<int>(z.size()) != params.latent_dim())
        throw std::invalid_argument("generator_forward: |z| must equal latent_dim");
    std::vector<double> out;
    out.reserve(z.size());
    for (std::size_t k = 0; k < params.sub_generators.size(); ++k) {
        std::vector<double> chunk(z.begin() + k * n, z.begin() + (k + 1) * n);
        std::vector<double> block =
            subgen_forward(params.sub_generators[k], chunk, noise, rng);
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

std::vector<double> generator_forward(const GeneratorParams& params,
                                      const std::vector<double>& z) {
    qsim::NoiseConfig noiseless;
    Rng rng(0);
    return generator_forward(params, z, noiseless, rng);
}

GeneratorParams generator_backward(const GeneratorParams& params,
                                   const std::vector<double>& z,
                                   const std::vector<double>& upstream) {
    params.validate();
    if (z.size() != upstream.size() ||
        static_cast<int>(z.size()) != params.latent_dim())
        throw std::invalid_argument("generator_backward: z/upstream shape mismatch");

    const int n = params.n_qubits();
    GeneratorParams grad = params;
    for (std::size_t k = 0; k < params.sub_generators.size(); ++k) {
        const SubGenParams& sg = params.sub_generators[k];
        std::vector<double> chunk(z.begin() + k * n, z.begin() + (k + 1) * n);
        const std::vector<double> jac = subgen_jacobian(sg, chunk);
        const int n_par = sg.n_params();
        for (int p = 0; p < n_par; ++p) {
            double sum = 0.0;
            for (int o = 0; o < n; ++o)
                sum += upstream[k * n + o] * jac[static_cast<std::size_t>(o) * n_par + p];
            grad.sub_generators[k].angles[p] = sum;
        }
    }
    return grad;
}

}  // namespace hybridq::vqc
