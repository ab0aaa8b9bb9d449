#pragma once

#include <complex>
#include <vector>

#include "hybridq/rng.hpp"

namespace hybridq::qsim {

using cplx = std::complex<double>;

// Emulated NISQ noise channel parameters. depolarizing_prob is applied per
// gate and involved qubit; readout_flip_prob per measured qubit. shots == 0
// means exact expectations (readout error then enters as a deterministic
// (1-2q) scaling instead of per-shot bit flips).
struct NoiseConfig {
    double depolarizing_prob = 0.0;
    double readout_flip_prob = 0.0;
    int trajectories = 1;
    int shots = 0;

    bool is_noiseless() const {
        return depolarizing_prob == 0.0 && readout_flip_prob == 0.0 && shots == 0;
    }
    void validate() const;
};

// Dense statevector of an n-qubit register. Qubit 0 is the most significant
// bit of the basis index.
class StateVector {
public:
    explicit StateVector(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    std::vector<cplx>& amplitudes() { return amps_; }

    void apply_ry(int qubit, double angle);
    void apply_cnot(int control, int target);
    void apply_pauli_x(int qubit);
    void apply_pauli_y(int qubit);
    void apply_pauli_z(int qubit);

    // Sum_b (+1/-1)(bit of qubit) * |amp_b|^2, deterministic, in [-1, 1].
    double expectation_z(int qubit) const;

    // (n_plus - n_minus)/shots from binomial sampling of P(bit = 0).
    double sample_expectation_z(int qubit, int shots, Rng& rng) const;

    double norm_squared() const;

private:
    int bit_shift(int qubit) const { return n_qubits_ - 1 - qubit; }
    void check_qubit(int qubit) const;

    int n_qubits_;
    std::vector<cplx> amps_;
};

StateVector new_zero_state(int n_qubits);

enum class GateKind { RY, CNOT };

struct GateSpec {
    GateKind kind;
    int qubit = 0;        // RY target / CNOT control
    int qubit2 = 0;       // CNOT target
    double angle = 0.0;   // RY only

    static GateSpec ry(int qubit, double angle) { return {GateKind::RY, qubit, 0, angle}; }
    static GateSpec cnot(int control, int target) { return {GateKind::CNOT, control, target, 0.0}; }
};

// Ideal gate followed by a Pauli-trajectory depolarizing kick: with
// probability depolarizing_prob each involved qubit gets a uniformly random
// X, Y or Z injected.
void apply_noisy_gate(StateVector& state, const GateSpec& gate,
                      const NoiseConfig& noise, Rng& rng);

// Readout including the noise model: exact mode scales <Z> by
// (1 - 2*readout_flip_prob); sampling mode flips each shot's bit with that
// probability before tallying.
double measure_z(const StateVector& state, int qubit, const NoiseConfig& noise,
                 Rng& rng);

}  // namespace hybridq::qsim
