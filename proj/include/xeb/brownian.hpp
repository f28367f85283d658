#pragma once

// Continuous-time all-to-all random evolution, integrated as a first-order
// product of two-qubit Pauli-pair rotations.
//
// Each step of length dt (time in units of 1/J) applies, for every qubit pair
// (j,k) and every axis pair (alpha,beta) in {X,Y,Z}^2, the rotation
// exp(-i theta P) with P = sigma^alpha_j sigma^beta_k and theta drawn
// N(0, dt/n) — the integrated angle of a white-noise coupling of variance
// 1/(n dt). Splitting error is O(dt^2) per step; dt is capped accordingly.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "xeb/rng.hpp"
#include "xeb/statevector.hpp"

namespace xeb {

namespace detail {

// phi factors of a Pauli acting on one bit: P|b> = phi(b) |b ^ flips>.
// axis: 0=X, 1=Y, 2=Z.
inline std::pair<double, double> pauli_phase(int axis, int bit) {
    switch (axis) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, bit ? -1.0 : 1.0};  // i (-1)^b
        default: return {bit ? -1.0 : 1.0, 0.0};
    }
}

}  // namespace detail

// In-place psi' = cos(theta) psi - i sin(theta) (sigma^aj_qj sigma^ak_qk) psi.
inline void apply_pauli_pair_rotation(StateVector& psi, int axis_j, int qj, int axis_k,
                                      int qk, double theta) {
    if (qj == qk) throw std::invalid_argument("apply_pauli_pair_rotation: qubits must differ");
    auto re = psi.real_data();
    auto im = psi.imag_data();
    const std::uint64_t dim = psi.dim();
    const double ct = std::cos(theta), st = std::sin(theta);
    const std::uint64_t fj = axis_j != 2 ? std::uint64_t{1} << qj : 0;
    const std::uint64_t fk = axis_k != 2 ? std::uint64_t{1} << qk : 0;
    const std::uint64_t f = fj | fk;
    if (f == 0) {
        // Z on both qubits: pure phase e^{-i theta (+/-1)} per amplitude.
        for (std::uint64_t idx = 0; idx < dim; ++idx) {
            const double sign = ((idx >> qj) ^ (idx >> qk)) & 1 ? -1.0 : 1.0;
            const double r = re[idx], i = im[idx];
            re[idx] = ct * r + st * sign * i;
            im[idx] = ct * i - st * sign * r;
        }
        return;
    }
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        const std::uint64_t partner = idx ^ f;
        if (partner < idx) continue;
        // Coefficient at each target is the phi product read off the source bits.
        const auto [ar, ai] = detail::pauli_phase(axis_j, (partner >> qj) & 1);
        const auto [br, bi] = detail::pauli_phase(axis_k, (partner >> qk) & 1);
        const double c1r = ar * br - ai * bi, c1i = ar * bi + ai * br;
        const auto [cr, ci] = detail::pauli_phase(axis_j, (idx >> qj) & 1);
        const auto [dr, di] = detail::pauli_phase(axis_k, (idx >> qk) & 1);
        const double c2r = cr * dr - ci * di, c2i = cr * di + ci * dr;
        const double s1r = re[idx], s1i = im[idx];
        const double s2r = re[partner], s2i = im[partner];
        re[idx] = ct * s1r + st * (c1r * s2i + c1i * s2r);
        im[idx] = ct * s1i - st * (c1r * s2r - c1i * s2i);
        re[partner] = ct * s2r + st * (c2r * s1i + c2i * s1r);
        im[partner] = ct * s2i - st * (c2r * s1r - c2i * s1i);
    }
}

// Evolves |0^n> to each target betaJ in turn (targets ascending), snapshotting
// along a single trajectory so successive depths share their randomness.
// Step count per target: ceil(betaJ/dt).
inline std::vector<StateVector> brownian_snapshots(int n, const std::vector<double>& beta_targets,
                                                   double dt, Rng& rng) {
    if (n < 2 || n > 12)
        throw std::invalid_argument("brownian_snapshots: 2 <= n <= 12 (dense pair kernel)");
    if (!(dt > 0.0) || dt > 1e-2)
        throw std::invalid_argument("brownian_snapshots: 0 < dt <= 1e-2 required");
    for (std::size_t i = 0; i < beta_targets.size(); ++i) {
        if (beta_targets[i] < 0.0 || (i > 0 && beta_targets[i] < beta_targets[i - 1]))
            throw std::invalid_argument("brownian_snapshots: targets must ascend from 0");
    }
    StateVector psi(n, 12);
    std::vector<StateVector> out;
    out.reserve(beta_targets.size());
    const double sigma = std::sqrt(dt / static_cast<double>(n));
    std::uint64_t step = 0;
    for (double target : beta_targets) {
        const auto want = static_cast<std::uint64_t>(std::ceil(target / dt - 1e-12));
        for (; step < want; ++step) {
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    for (int aj = 0; aj < 3; ++aj)
                        for (int ak = 0; ak < 3; ++ak)
                            apply_pauli_pair_rotation(psi, aj, j, ak, k, rng.normal() * sigma);
            const double drift = std::abs(psi.norm_sq() - 1.0);
            if (drift > 1e-6) {
                std::ostringstream msg;
                msg << "brownian integration aborted: norm drift " << drift << " after step "
                    << step + 1 << " (dt=" << dt << "); reduce dt";
                throw std::runtime_error(msg.str());
            }
        }
        out.push_back(psi);
    }
    return out;
}

inline StateVector brownian_unitary(int n, double beta_j, double dt, Rng& rng) {
    return std::move(brownian_snapshots(n, {beta_j}, dt, rng).back());
}

}  // namespace xeb
