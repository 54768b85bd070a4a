// Shared fixtures and reference calculations for the test binaries.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "rusamp/qcore.hpp"
#include "rusamp/rng.hpp"
#include "rusamp/rus.hpp"

namespace rusamp::testing {

/// Probability vector of length 2^m with entry 0 = p0, rest from exponentials.
inline std::vector<double> random_distribution(int m, double p0, RngStream& rng) {
    const std::size_t n = std::size_t{1} << m;
    std::vector<double> p(n);
    p[0] = p0;
    double tail = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        p[i] = -std::log(rng.uniform_open());
        tail += p[i];
    }
    for (std::size_t i = 1; i < n; ++i) p[i] *= (1.0 - p0) / tail;
    return p;
}

inline RusSpec random_spec(int m, double lambda0, RngStream& rng) {
    std::vector<UnitaryMatrix> recs;
    for (std::size_t i = 1; i < (std::size_t{1} << m); ++i) recs.push_back(gates::random_unitary(2, rng));
    return make_rus_spec(m, random_distribution(m, lambda0, rng), gates::random_unitary(2, rng), rng.next_u64(),
                         std::move(recs));
}

inline RusCircuit random_circuit(int m, double lambda0, RngStream& rng) {
    return build_rus_unitary(random_spec(m, lambda0, rng));
}

/// Squared norm of the |0^m> block of a full-register amplitude vector.
inline double pi_block_norm2(std::span<const Complex> v) { return std::norm(v[0]) + std::norm(v[1]); }

/// |<0^m U psi | v>|^2 for a full-register vector v.
inline double target_overlap2(std::span<const Complex> v, const UnitaryMatrix& u, const StateVector& psi) {
    const StateVector up = apply(u, psi);
    const Complex ov = std::conj(up[0]) * v[0] + std::conj(up[1]) * v[1];
    return std::norm(ov);
}

// ---- reference two-level model of amplitude amplification ---------------------------------
//
// On span{good, bad} the circuit acts as the real rotation [[s, -c], [c, s]]
// with s = sqrt(lambda0) and every reflection is diag(e^{i phi}, 1).

using M2 = std::array<std::array<Complex, 2>, 2>;

inline M2 mul2(const M2& a, const M2& b) {
    M2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return r;
}

inline M2 adj2(const M2& a) {
    return {{{std::conj(a[0][0]), std::conj(a[1][0])}, {std::conj(a[0][1]), std::conj(a[1][1])}}};
}

inline M2 rotation2(double lambda0) {
    const double s = std::sqrt(lambda0), c = std::sqrt(1.0 - lambda0);
    return {{{s, -c}, {c, s}}};
}

inline M2 phase2(double phi) { return {{{std::polar(1.0, phi), 0.0}, {0.0, 1.0}}}; }

/// Good-state amplitude of G(phi_L, varphi_L) ... G(phi_1, varphi_1) A applied to the start state.
inline Complex two_level_amplitude(double lambda0, const std::vector<double>& phis, const std::vector<double>& varphis) {
    const M2 a = rotation2(lambda0), ad = adj2(a);
    M2 total = a;
    for (std::size_t j = 0; j < phis.size(); ++j) {
        M2 g = mul2(a, mul2(phase2(phis[j]), mul2(ad, phase2(varphis[j]))));
        for (auto& row : g)
            for (auto& x : row) x = -x;
        total = mul2(g, total);
    }
    return total[0][0];
}

}  // namespace rusamp::testing
