#pragma once

// Random-circuit construction: layered two-qubit Haar circuits on all-to-all
// or 1D brickwork connectivity, plus stochastic Pauli-noise realizations that
// stay unitary (each sampled Pauli is folded into the gate it follows).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "xeb/rng.hpp"
#include "xeb/statevector.hpp"

namespace xeb {

enum class Topology { all_to_all, brickwork_1d };

inline const char* to_string(Topology t) {
    return t == Topology::all_to_all ? "all_to_all" : "brickwork_1d";
}

inline Topology topology_from_string(const std::string& s) {
    if (s == "all_to_all") return Topology::all_to_all;
    if (s == "brickwork_1d") return Topology::brickwork_1d;
    throw std::invalid_argument("unknown topology: " + s);
}

struct Gate {
    int a = 0;  // low local bit of the 4x4 matrix
    int b = 0;  // high local bit
    TwoQubitGate u;
};

struct Layer {
    std::vector<Gate> gates;
};

// Site where a sampled Pauli was folded into a gate (kept for reproducibility).
struct PauliInsertion {
    int layer = 0;
    int gate = 0;
    int qubit = 0;
    int pauli = 0;  // 1=X, 2=Y, 3=Z
};

struct Circuit {
    int n = 0;
    Topology topology = Topology::all_to_all;
    std::uint64_t seed = 0;  // provenance: seed of the Rng that drew the gates
    std::vector<Layer> layers;
    std::vector<PauliInsertion> noise_log;  // nonempty only for noisy instances

    int depth() const { return static_cast<int>(layers.size()); }
    std::size_t gate_count() const {
        std::size_t c = 0;
        for (const Layer& l : layers) c += l.gates.size();
        return c;
    }
};

// Aggregate rate gamma spread over n qubits: per-qubit, per-site probability
// gamma' = gamma/n, split evenly over X, Y, Z. gamma' = 0.75 is the fully
// depolarizing point; beyond it the channel is unphysical and rejected.
struct NoiseModel {
    double gamma = 0.0;
    double gamma_prime = 0.0;

    NoiseModel() = default;
    NoiseModel(double gamma_total, int n) : gamma(gamma_total) {
        if (n < 1) throw std::invalid_argument("NoiseModel: n >= 1 required");
        if (gamma_total < 0.0) throw std::domain_error("NoiseModel: gamma >= 0 required");
        gamma_prime = gamma_total / static_cast<double>(n);
        if (gamma_prime > 0.75)
            throw std::domain_error("NoiseModel: gamma/n > 0.75 is super-depolarizing");
    }
};

namespace detail {

// kron(hi, lo) on the local basis index = bit_lo + 2*bit_hi.
inline TwoQubitGate kron2(const double (&hi_re)[4], const double (&hi_im)[4],
                          const double (&lo_re)[4], const double (&lo_im)[4]) {
    TwoQubitGate g;
    for (int rb = 0; rb < 2; ++rb)
        for (int ra = 0; ra < 2; ++ra)
            for (int cb = 0; cb < 2; ++cb)
                for (int ca = 0; ca < 2; ++ca) {
                    const int r = ra + 2 * rb, c = ca + 2 * cb;
                    const double hr = hi_re[rb * 2 + cb], hi_ = hi_im[rb * 2 + cb];
                    const double lr = lo_re[ra * 2 + ca], li = lo_im[ra * 2 + ca];
                    g.re[r * 4 + c] = hr * lr - hi_ * li;
                    g.im[r * 4 + c] = hr * li + hi_ * lr;
                }
    return g;
}

// Single-qubit Pauli (1=X, 2=Y, 3=Z) lifted to the gate's low or high slot.
inline TwoQubitGate pauli_on_slot(int pauli, bool low_slot) {
    static constexpr double id_re[4] = {1, 0, 0, 1}, zero[4] = {0, 0, 0, 0};
    static constexpr double x_re[4] = {0, 1, 1, 0};
    static constexpr double y_im[4] = {0, -1, 1, 0};
    static constexpr double z_re[4] = {1, 0, 0, -1};
    const double* pr = zero;
    const double* pi = zero;
    switch (pauli) {
        case 1: pr = x_re; break;
        case 2: pi = y_im; pr = zero; break;
        case 3: pr = z_re; break;
        default: throw std::invalid_argument("pauli_on_slot: pauli must be 1..3");
    }
    double p_re[4] = {pr[0], pr[1], pr[2], pr[3]};
    double p_im[4] = {pi[0], pi[1], pi[2], pi[3]};
    double i_re[4] = {id_re[0], id_re[1], id_re[2], id_re[3]};
    double i_im[4] = {0, 0, 0, 0};
    return low_slot ? kron2(i_re, i_im, p_re, p_im) : kron2(p_re, p_im, i_re, i_im);
}

}  // namespace detail

// All-to-all layer: a fresh uniform permutation paired off consecutively, so a
// layer holds exactly n/2 gates; brickwork layer L (1-based) pairs (i, i+1)
// for i even when L is odd and i odd when L is even (0-based, open boundary).
inline Circuit draw_circuit(int n, int depth, Topology topology, Rng& rng) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("draw_circuit: n must be even, >= 2");
    if (depth < 1) throw std::invalid_argument("draw_circuit: depth >= 1 required");
    Circuit c;
    c.n = n;
    c.topology = topology;
    c.seed = rng.seed();
    c.layers.resize(depth);
    std::vector<int> perm(n);
    for (int layer = 0; layer < depth; ++layer) {
        Layer& l = c.layers[layer];
        if (topology == Topology::all_to_all) {
            for (int i = 0; i < n; ++i) perm[i] = i;
            rng.shuffle(perm.data(), perm.size());
            l.gates.reserve(n / 2);
            for (int i = 0; i < n / 2; ++i)
                l.gates.push_back({perm[2 * i], perm[2 * i + 1], haar_two_qubit_gate(rng)});
        } else {
            const int start = layer % 2 == 0 ? 0 : 1;
            for (int i = start; i + 1 < n; i += 2)
                l.gates.push_back({i, i + 1, haar_two_qubit_gate(rng)});
        }
    }
    return c;
}

// Unitary noise realization: after every two-qubit gate, each touched qubit
// independently keeps I with probability 1 - gamma' or gets X/Y/Z with
// probability gamma'/3 each; the sampled Pauli is left-multiplied into that
// gate and logged. One uniform variate per site, in (layer, gate, a-then-b)
// order, so realizations are reproducible from the stream alone.
inline Circuit noisy_instance(const Circuit& circuit, const NoiseModel& noise, Rng& rng) {
    Circuit out = circuit;
    if (noise.gamma_prime <= 0.0) return out;
    const double gp = noise.gamma_prime;
    for (int li = 0; li < out.depth(); ++li) {
        Layer& layer = out.layers[li];
        for (std::size_t gi = 0; gi < layer.gates.size(); ++gi) {
            Gate& gate = layer.gates[gi];
            for (int slot = 0; slot < 2; ++slot) {
                const double u = rng.uniform01();
                if (u >= gp) continue;
                int pauli = 1 + static_cast<int>(u / (gp / 3.0));
                if (pauli > 3) pauli = 3;  // guard u == gp boundary rounding
                gate.u = multiply(detail::pauli_on_slot(pauli, slot == 0), gate.u);
                out.noise_log.push_back(
                    {li, static_cast<int>(gi), slot == 0 ? gate.a : gate.b, pauli});
            }
        }
    }
    return out;
}

inline StateVector evolve(const Circuit& circuit, int max_qubits = 24) {
    StateVector psi(circuit.n, max_qubits);
    for (const Layer& layer : circuit.layers)
        for (const Gate& g : layer.gates) psi.apply_two_qubit(g.u, g.a, g.b);
    return psi;
}

inline double output_probability(const Circuit& circuit, std::uint64_t bitstring) {
    return evolve(circuit).probability(bitstring);
}

inline std::uint64_t sample_bitstring(const StateVector& state, Rng& rng) {
    return state.sample(rng);
}

}  // namespace xeb
