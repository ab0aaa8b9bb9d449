#include "hybridq/qsim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hybridq::qsim {

void NoiseConfig::validate() const {
    if (depolarizing_prob < 0.0 || depolarizing_prob > 1.0)
        throw std::invalid_argument("NoiseConfig: depolarizing_prob outside [0,1]");
    if (readout_flip_prob < 0.0 || readout_flip_prob > 1.0)
        throw std::invalid_argument("NoiseConfig: readout_flip_prob outside [0,1]");
    if (trajectories < 1)
        throw std::invalid_argument("NoiseConfig: trajectories must be >= 1");
    if (shots < 0)
        throw std::invalid_argument("NoiseConfig: shots must be >= 0");
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 16)
        throw std::invalid_argument("StateVector: n_qubits must be in [1,16], got " +
                                    std::to_string(n_qubits));
    amps_.assign(std::size_t{1} << n_qubits, cplx(0.0, 0.0));
    amps_[0] = cplx(1.0, 0.0);
}

void StateVector::check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= n_qubits_)
        throw std::out_of_range("qubit index " + std::to_string(qubit) +
                                " out of range for " + std::to_string(n_qubits_) +
                                " qubits");
}

void StateVector::apply_ry(int qubit, double angle) {
    check_qubit(qubit);
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const std::size_t mask = std::size_t{1} << bit_shift(qubit);
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        if (b & mask) continue;
        const cplx a0 = amps_[b];
        const cplx a1 = amps_[b | mask];
        amps_[b] = c * a0 - s * a1;
        amps_[b | mask] = s * a0 + c * a1;
    }
}

void StateVector::apply_cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target)
        throw std::out_of_range("CNOT control and target must differ");
    const std::size_t cmask = std::size_t{1} << bit_shift(control);
    const std::size_t tmask = std::size_t{1} << bit_shift(target);
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        if ((b & cmask) && !(b & tmask)) std::swap(amps_[b], amps_[b | tmask]);
    }
}

void StateVector::apply_pauli_x(int qubit) {
    check_qubit(qubit);
    const std::size_t mask = std::size_t{1} << bit_shift(qubit);
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        if (!(b & mask)) std::swap(amps_[b], amps_[b | mask]);
    }
}

void StateVector::apply_pauli_y(int qubit) {
    check_qubit(qubit);
    const std::size_t mask = std::size_t{1} << bit_shift(qubit);
    const cplx i(0.0, 1.0);
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        if (b & mask) continue;
        const cplx a0 = amps_[b];
        const cplx a1 = amps_[b | mask];
        amps_[b] = -i * a1;
        amps_[b | mask] = i * a0;
    }
}

void StateVector::apply_pauli_z(int qubit) {
    check_qubit(qubit);
    const std::size_t mask = std::size_t{1} << bit_shift(qubit);
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        if (b & mask) amps_[b] = -amps_[b];
    }
}

double StateVector::expectation_z(int qubit) const {
    check_qubit(qubit);
    const std::size_t mask = std::size_t{1} << bit_shift(qubit);
    double value = 0.0;
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        const double p = std::norm(amps_[b]);
        value += (b & mask) ? -p : p;
    }
    return value;
}

double StateVector::sample_expectation_z(int qubit, int shots, Rng& rng) const {
    check_qubit(qubit);
    if (shots < 1)
        throw std::invalid_argument("sample_expectation_z: shots must be >= 1; "
                                    "use expectation_z for the exact value");
    const std::size_t mask = std::size_t{1} << bit_shift(qubit);
    double p_zero = 0.0;
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        if (!(b & mask)) p_zero += std::norm(amps_[b]);
    }
    if (p_zero > 1.0) p_zero = 1.0;
    long plus = 0;
    for (int s = 0; s < shots; ++s) {
        if (rng.uniform() < p_zero) ++plus; else --plus;
    }
    return static_cast<double>(plus) / shots;
}

double StateVector::norm_squared() const {
    double total = 0.0;
    for (const cplx& a : amps_) total += std::norm(a);
    return total;
}

StateVector new_zero_state(int n_qubits) { return StateVector(n_qubits); }

namespace {

void inject_random_pauli(StateVector& state, int qubit, Rng& rng) {
    switch (rng.below(3)) {
        case 0: state.apply_pauli_x(qubit); break;
        case 1: state.apply_pauli_y(qubit); break;
        default: state.apply_pauli_z(qubit); break;
    }
}

}  // namespace

void apply_noisy_gate(StateVector& state, const GateSpec& gate,
                      const NoiseConfig& noise, Rng& rng) {
    switch (gate.kind) {
        case GateKind::RY: state.apply_ry(gate.qubit, gate.angle); break;
        case GateKind::CNOT: state.apply_cnot(gate.qubit, gate.qubit2); break;
    }
    if (noise.depolarizing_prob <= 0.0) return;
    if (rng.uniform() < noise.depolarizing_prob)
        inject_random_pauli(state, gate.qubit, rng);
    if (gate.kind == GateKind::CNOT && rng.uniform() < noise.depolarizing_prob)
        inject_random_pauli(state, gate.qubit2, rng);
}

double measure_z(const StateVector& state, int qubit, const NoiseConfig& noise,
                 Rng& rng) {
    const double q = noise.readout_flip_prob;
    if (noise.shots == 0) return (1.0 - 2.0 * q) * state.expectation_z(qubit);

    const std::size_t mask = std::size_t{1} << (state.n_qubits() - 1 - qubit);
    double p_zero = 0.0;
    const auto& amps = state.amplitudes();
    for (std::size_t b = 0; b < amps.size(); ++b) {
        if (!(b & mask)) p_zero += std::norm(amps[b]);
    }
    if (p_zero > 1.0) p_zero = 1.0;
    long plus = 0;
    for (int s = 0; s < noise.shots; ++s) {
        bool zero = rng.uniform() < p_zero;
        if (q > 0.0 && rng.uniform() < q) zero = !zero;
        if (zero) ++plus; else --plus;
    }
    return static_cast<double>(plus) / noise.shots;
}

}  // namespace hybridq::qsim
