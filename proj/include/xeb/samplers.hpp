#pragma once

// Bitstring sources behind one interface: honest noiseless/noisy circuit
// samplers, the uniform baseline, and the disjoint-block spoofer (simulate
// blocks of ~log n qubits independently, optionally with extra within-block
// depth to restore per-qubit gate counts). Every record carries the ideal
// probability q of the drawn bitstring under the untouched circuit U.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "xeb/circuit.hpp"
#include "xeb/rng.hpp"
#include "xeb/statevector.hpp"

namespace xeb {

enum class SamplerKind { clean, noisy, uniform, spoofer };

inline const char* to_string(SamplerKind k) {
    switch (k) {
        case SamplerKind::clean: return "clean";
        case SamplerKind::noisy: return "noisy";
        case SamplerKind::uniform: return "uniform";
        default: return "spoofer";
    }
}

inline SamplerKind sampler_kind_from_string(const std::string& s) {
    if (s == "clean") return SamplerKind::clean;
    if (s == "noisy") return SamplerKind::noisy;
    if (s == "uniform") return SamplerKind::uniform;
    if (s == "spoofer") return SamplerKind::spoofer;
    throw std::invalid_argument("unknown sampler kind: " + s);
}

struct SamplerSpec {
    SamplerKind kind = SamplerKind::clean;
    int n = 0;
    int depth = 0;
    Topology topology = Topology::all_to_all;
    double gamma = 0.0;   // noisy only
    int block_size = 0;   // spoofer only; 0 = default ceil(log2 n)
    int depth_boost = 0;  // spoofer only; 0 = default; 1 = no extra layers
    std::uint64_t stream_id = 0;
};

struct Partition {
    int n = 0;
    int block_size = 0;
    std::vector<std::vector<int>> blocks;
};

// Smallest M with 2^M >= n (the M ~ log n working point), at least 1.
inline int default_block_size(int n) {
    int m = 0;
    while ((1 << m) < n) ++m;
    return std::max(1, m);
}

// Extra within-block layers restoring roughly the original gates per qubit:
// an all-to-all layer gives a qubit a same-block partner with probability
// (M-1)/(n-1), so depth*(n-M)/(n-1) layer-equivalents are lost to deletion.
inline int default_depth_boost(int n, int block_size, int depth) {
    if (block_size >= n || n < 2) return 1;
    const std::int64_t num = static_cast<std::int64_t>(depth) * (n - block_size);
    const std::int64_t den = n - 1;
    return static_cast<int>(1 + (num + den - 1) / den);
}

// Contiguous blocks {0..M-1}, {M..2M-1}, ...; the last may be smaller.
inline Partition partition_qubits(int n, int block_size) {
    if (n < 1 || block_size < 1 || block_size > n)
        throw std::invalid_argument("partition_qubits: need 1 <= M <= n");
    Partition p;
    p.n = n;
    p.block_size = block_size;
    for (int off = 0; off < n; off += block_size) {
        std::vector<int> block;
        for (int q = off; q < std::min(n, off + block_size); ++q) block.push_back(q);
        p.blocks.push_back(std::move(block));
    }
    return p;
}

namespace detail {
inline std::vector<int> block_index_of(const Partition& p) {
    std::vector<int> owner(p.n, -1);
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
        for (int q : p.blocks[b]) {
            if (q < 0 || q >= p.n || owner[q] != -1)
                throw std::invalid_argument("partition is not disjoint over 0..n-1");
            owner[q] = static_cast<int>(b);
        }
    for (int q = 0; q < p.n; ++q)
        if (owner[q] == -1) throw std::invalid_argument("partition does not cover 0..n-1");
    return owner;
}
}  // namespace detail

// Deletes every gate that spans two blocks; depth_boost - 1 extra layers of
// fresh within-block Haar gates (random matching per block) are appended to
// compensate the lost scrambling. depth_boost = 1 appends nothing.
inline Circuit spoof_circuit(const Circuit& circuit, const Partition& partition,
                             int depth_boost, Rng& rng) {
    if (partition.n != circuit.n)
        throw std::invalid_argument("spoof_circuit: partition and circuit disagree on n");
    if (depth_boost < 1) throw std::invalid_argument("spoof_circuit: depth_boost >= 1");
    const std::vector<int> owner = detail::block_index_of(partition);
    Circuit out;
    out.n = circuit.n;
    out.topology = circuit.topology;
    out.seed = circuit.seed;
    out.layers.reserve(circuit.layers.size() + depth_boost - 1);
    for (const Layer& layer : circuit.layers) {
        Layer kept;
        for (const Gate& g : layer.gates)
            if (owner[g.a] == owner[g.b]) kept.gates.push_back(g);
        out.layers.push_back(std::move(kept));
    }
    std::vector<int> scratch;
    for (int extra = 1; extra < depth_boost; ++extra) {
        Layer l;
        for (const std::vector<int>& block : partition.blocks) {
            if (block.size() < 2) continue;
            scratch = block;
            rng.shuffle(scratch.data(), scratch.size());
            for (std::size_t i = 0; i + 1 < scratch.size(); i += 2)
                l.gates.push_back({scratch[i], scratch[i + 1], haar_two_qubit_gate(rng)});
        }
        out.layers.push_back(std::move(l));
    }
    return out;
}

// Exact sample from a block-local circuit as the product of per-block
// distributions: evolve one 2^{M_b} statevector per block, materialize the
// full product probability vector, and run the same one-uniform cumulative
// pass as StateVector::sample so full-state and block-local sampling follow
// identical decision paths.
inline std::uint64_t sample_block_product(const Circuit& block_circuit,
                                          const Partition& partition, Rng& rng) {
    const std::vector<int> owner = detail::block_index_of(partition);
    std::vector<int> local_index(partition.n, 0);
    std::vector<StateVector> states;
    states.reserve(partition.blocks.size());
    for (const std::vector<int>& block : partition.blocks) {
        for (std::size_t i = 0; i < block.size(); ++i) local_index[block[i]] = static_cast<int>(i);
        states.emplace_back(static_cast<int>(block.size()), 24);
    }
    for (const Layer& layer : block_circuit.layers)
        for (const Gate& g : layer.gates) {
            if (owner[g.a] != owner[g.b])
                throw std::invalid_argument("sample_block_product: circuit crosses blocks");
            states[owner[g.a]].apply_two_qubit(g.u, local_index[g.a], local_index[g.b]);
        }
    std::vector<std::vector<double>> probs;
    probs.reserve(states.size());
    for (const StateVector& s : states) probs.push_back(s.probabilities());
    const std::uint64_t dim = std::uint64_t{1} << partition.n;
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        double p = 1.0;
        for (std::size_t b = 0; b < partition.blocks.size(); ++b) {
            std::uint64_t loc = 0;
            const std::vector<int>& block = partition.blocks[b];
            for (std::size_t i = 0; i < block.size(); ++i)
                loc |= ((idx >> block[i]) & 1) << i;
            p *= probs[b][loc];
        }
        acc += p;
        if (u < acc) return idx;
    }
    return dim - 1;
}

struct SampleRecord {
    std::string sampler;
    int n = 0;
    int depth = 0;
    double gamma = 0.0;
    std::uint64_t seed = 0;          // RNG stream seed used for this draw
    std::uint64_t circuit_seed = 0;  // provenance of the ideal circuit U
    std::uint64_t bitstring = 0;
    double q = 0.0;        // ideal probability under U
    double z = 0.0;        // 2^n q
    double neg_log_q = 0.0;
    bool underflow = false;
};

namespace detail {
inline void fill_score(SampleRecord& rec, const StateVector& ideal, std::uint64_t x) {
    rec.bitstring = x;
    rec.q = ideal.probability(x);
    rec.z = std::ldexp(rec.q, ideal.num_qubits());
    rec.neg_log_q = ideal.neg_log_probability(x);
    rec.underflow = rec.q < 1e-300;
}
}  // namespace detail

// One record from an explicit shared circuit. Stream consumption order is
// fixed per kind: noise realization / boost gates first, then the sampling
// draw — so identical streams give identical records.
inline SampleRecord draw_sample(const SamplerSpec& spec, const Circuit& u, Rng& rng) {
    if (u.n != spec.n) throw std::invalid_argument("draw_sample: spec and circuit disagree on n");
    SampleRecord rec;
    rec.sampler = to_string(spec.kind);
    rec.n = spec.n;
    rec.depth = spec.depth;
    rec.gamma = spec.kind == SamplerKind::noisy ? spec.gamma : 0.0;
    rec.seed = rng.seed();
    rec.circuit_seed = u.seed;
    switch (spec.kind) {
        case SamplerKind::noisy:
            if (spec.gamma > 0.0) {
                const Circuit v = noisy_instance(u, NoiseModel(spec.gamma, spec.n), rng);
                const std::uint64_t x = evolve(v).sample(rng);
                detail::fill_score(rec, evolve(u), x);
                return rec;
            }
            [[fallthrough]];  // gamma = 0: identical to the clean sampler
        case SamplerKind::clean: {
            const StateVector psi = evolve(u);
            detail::fill_score(rec, psi, psi.sample(rng));
            return rec;
        }
        case SamplerKind::uniform: {
            const std::uint64_t x = rng.next_u64() & ((std::uint64_t{1} << spec.n) - 1);
            detail::fill_score(rec, evolve(u), x);
            return rec;
        }
        default: {
            const int m = spec.block_size > 0 ? spec.block_size : default_block_size(spec.n);
            if (m > spec.n) throw std::invalid_argument("draw_sample: block_size > n");
            const int boost = spec.depth_boost > 0
                                  ? spec.depth_boost
                                  : default_depth_boost(spec.n, m, spec.depth);
            const Partition part = partition_qubits(spec.n, m);
            const Circuit spoofed = spoof_circuit(u, part, boost, rng);
            const std::uint64_t x = sample_block_product(spoofed, part, rng);
            detail::fill_score(rec, evolve(u), x);
            return rec;
        }
    }
}

// One record with a fresh circuit drawn from the same stream (the measurement
// procedure used throughout: a fresh U per draw).
inline SampleRecord draw_sample(const SamplerSpec& spec, Rng& rng) {
    const Circuit u = draw_circuit(spec.n, spec.depth, spec.topology, rng);
    return draw_sample(spec, u, rng);
}

// Score draw for the noise-rate study: fresh circuit, noisy sampling at the
// given rate, score against the ideal circuit.
inline SampleRecord draw_xgamma_sample(int n, int depth, const NoiseModel& noise,
                                       Topology topology, Rng& rng) {
    SamplerSpec spec;
    spec.kind = noise.gamma > 0.0 ? SamplerKind::noisy : SamplerKind::clean;
    spec.n = n;
    spec.depth = depth;
    spec.topology = topology;
    spec.gamma = noise.gamma;
    return draw_sample(spec, rng);
}

}  // namespace xeb
