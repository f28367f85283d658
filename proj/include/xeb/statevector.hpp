#pragma once

// Dense little-endian statevector with an in-place two-qubit gate kernel.
//
// Amplitudes are stored as separate re/im arrays and the kernel does explicit
// real arithmetic: the 4x4 complex multiply stays in registers and vectorizes,
// with no libcall per complex product. Qubit j is bit j of the basis index.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "xeb/rng.hpp"

namespace xeb {

// Row-major 4x4 complex matrix acting on the local basis |b_hi b_lo> with
// local index = bit(lo qubit) + 2*bit(hi qubit).
struct TwoQubitGate {
    std::array<double, 16> re{};
    std::array<double, 16> im{};

    static TwoQubitGate identity() {
        TwoQubitGate g;
        for (int i = 0; i < 4; ++i) g.re[i * 4 + i] = 1.0;
        return g;
    }

    std::complex<double> at(int r, int c) const { return {re[r * 4 + c], im[r * 4 + c]}; }
    void set(int r, int c, std::complex<double> v) {
        re[r * 4 + c] = v.real();
        im[r * 4 + c] = v.imag();
    }
};

inline TwoQubitGate multiply(const TwoQubitGate& a, const TwoQubitGate& b) {
    TwoQubitGate out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            double sr = 0.0, si = 0.0;
            for (int k = 0; k < 4; ++k) {
                sr += a.re[r * 4 + k] * b.re[k * 4 + c] - a.im[r * 4 + k] * b.im[k * 4 + c];
                si += a.re[r * 4 + k] * b.im[k * 4 + c] + a.im[r * 4 + k] * b.re[k * 4 + c];
            }
            out.re[r * 4 + c] = sr;
            out.im[r * 4 + c] = si;
        }
    return out;
}

inline TwoQubitGate adjoint(const TwoQubitGate& a) {
    TwoQubitGate out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            out.re[r * 4 + c] = a.re[c * 4 + r];
            out.im[r * 4 + c] = -a.im[c * 4 + r];
        }
    return out;
}

// max |U^dag U - I|, entrywise.
inline double unitarity_error(const TwoQubitGate& g) {
    const TwoQubitGate p = multiply(adjoint(g), g);
    double worst = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const double tr = p.re[r * 4 + c] - (r == c ? 1.0 : 0.0);
            worst = std::max(worst, std::hypot(tr, p.im[r * 4 + c]));
        }
    return worst;
}

// Haar-distributed 4x4 unitary: complex-Gaussian matrix, modified Gram-Schmidt
// over columns (with one re-orthogonalization pass for numerical orthogonality).
// Column norms are positive reals, so the triangular factor's diagonal is
// already positive and the Q factor is exactly Haar.
inline TwoQubitGate haar_two_qubit_gate(Rng& rng) {
    std::array<double, 16> vr, vi;  // column-major: v[c*4+r]
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const double invsqrt2 = 0.70710678118654752440;
            vr[c * 4 + r] = rng.normal() * invsqrt2;
            vi[c * 4 + r] = rng.normal() * invsqrt2;
        }
    for (int c = 0; c < 4; ++c) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 0; k < c; ++k) {
                double dr = 0.0, di = 0.0;  // <q_k, v_c> = sum conj(q_k) v_c
                for (int r = 0; r < 4; ++r) {
                    dr += vr[k * 4 + r] * vr[c * 4 + r] + vi[k * 4 + r] * vi[c * 4 + r];
                    di += vr[k * 4 + r] * vi[c * 4 + r] - vi[k * 4 + r] * vr[c * 4 + r];
                }
                for (int r = 0; r < 4; ++r) {
                    vr[c * 4 + r] -= dr * vr[k * 4 + r] - di * vi[k * 4 + r];
                    vi[c * 4 + r] -= dr * vi[k * 4 + r] + di * vr[k * 4 + r];
                }
            }
        }
        double norm = 0.0;
        for (int r = 0; r < 4; ++r)
            norm += vr[c * 4 + r] * vr[c * 4 + r] + vi[c * 4 + r] * vi[c * 4 + r];
        const double inv = 1.0 / std::sqrt(norm);
        for (int r = 0; r < 4; ++r) {
            vr[c * 4 + r] *= inv;
            vi[c * 4 + r] *= inv;
        }
    }
    TwoQubitGate g;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            g.re[r * 4 + c] = vr[c * 4 + r];
            g.im[r * 4 + c] = vi[c * 4 + r];
        }
    return g;
}

class StateVector {
  public:
    // Starts in |0...0>. The qubit cap guards the 2^n allocation.
    explicit StateVector(int n, int max_qubits = 24) : n_(n) {
        if (n < 1) throw std::invalid_argument("StateVector: n >= 1 required");
        if (n > max_qubits)
            throw std::length_error("StateVector: n exceeds the qubit cap (default 24)");
        dim_ = std::uint64_t{1} << n;
        re_.assign(dim_, 0.0);
        im_.assign(dim_, 0.0);
        re_[0] = 1.0;
    }

    int num_qubits() const { return n_; }
    std::uint64_t dim() const { return dim_; }

    std::complex<double> amplitude(std::uint64_t idx) const { return {re_[idx], im_[idx]}; }
    void set_amplitude(std::uint64_t idx, std::complex<double> v) {
        re_[idx] = v.real();
        im_[idx] = v.imag();
    }

    double probability(std::uint64_t idx) const {
        return re_[idx] * re_[idx] + im_[idx] * im_[idx];
    }

    // -log q via hypot when q underflows double range (deep noisy draws).
    double neg_log_probability(std::uint64_t idx) const {
        const double q = probability(idx);
        if (q >= 1e-300) return -std::log(q);
        const double h = std::hypot(re_[idx], im_[idx]);
        if (h > 0.0) return -2.0 * std::log(h);
        return std::numeric_limits<double>::infinity();
    }

    double norm_sq() const {
        long double acc = 0.0L;
        for (std::uint64_t i = 0; i < dim_; ++i)
            acc += static_cast<long double>(re_[i]) * re_[i] +
                   static_cast<long double>(im_[i]) * im_[i];
        return static_cast<double>(acc);
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(dim_);
        for (std::uint64_t i = 0; i < dim_; ++i) p[i] = probability(i);
        return p;
    }

    // Exact draw from |amplitude|^2: one uniform variate, one cumulative pass.
    std::uint64_t sample(Rng& rng) const {
        const double u = rng.uniform01();
        double acc = 0.0;
        for (std::uint64_t i = 0; i < dim_; ++i) {
            acc += probability(i);
            if (u < acc) return i;
        }
        return dim_ - 1;  // u beyond accumulated rounding: clamp to last index
    }

    // Applies g to qubits (lo, hi) where lo indexes the gate's low local bit.
    void apply_two_qubit(const TwoQubitGate& g, int lo, int hi) {
        if (lo == hi || lo < 0 || hi < 0 || lo >= n_ || hi >= n_)
            throw std::invalid_argument("apply_two_qubit: bad qubit pair");
        const std::uint64_t ia = std::uint64_t{1} << lo;
        const std::uint64_t ib = std::uint64_t{1} << hi;
        const int qmin = lo < hi ? lo : hi;
        const int qmax = lo < hi ? hi : lo;
        const std::uint64_t mask_low = (std::uint64_t{1} << qmin) - 1;
        const std::uint64_t mask_mid = ((std::uint64_t{1} << (qmax - 1)) - 1) & ~mask_low;
        const std::uint64_t mask_high = ~(mask_low | mask_mid);
        const std::uint64_t groups = dim_ >> 2;
        const std::array<double, 16>& mr = g.re;
        const std::array<double, 16>& mi = g.im;
        double* __restrict re = re_.data();
        double* __restrict im = im_.data();
        for (std::uint64_t grp = 0; grp < groups; ++grp) {
            const std::uint64_t i0 = (grp & mask_low) | ((grp & mask_mid) << 1) |
                                     ((grp & mask_high) << 2);
            const std::uint64_t idx[4] = {i0, i0 | ia, i0 | ib, i0 | ia | ib};
            double ar[4], ai[4];
            for (int k = 0; k < 4; ++k) {
                ar[k] = re[idx[k]];
                ai[k] = im[idx[k]];
            }
            for (int r = 0; r < 4; ++r) {
                double sr = 0.0, si = 0.0;
                for (int c = 0; c < 4; ++c) {
                    sr += mr[r * 4 + c] * ar[c] - mi[r * 4 + c] * ai[c];
                    si += mr[r * 4 + c] * ai[c] + mi[r * 4 + c] * ar[c];
                }
                re[idx[r]] = sr;
                im[idx[r]] = si;
            }
        }
    }

    // Mutable raw access for the continuous-time integrator.
    std::span<double> real_data() { return re_; }
    std::span<double> imag_data() { return im_; }
    std::span<const double> real_data() const { return re_; }
    std::span<const double> imag_data() const { return im_; }

  private:
    int n_;
    std::uint64_t dim_;
    std::vector<double> re_, im_;
};

}  // namespace xeb
