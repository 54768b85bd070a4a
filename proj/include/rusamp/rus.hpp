// Repeat-until-success circuits.
//
// A circuit is an (m+1)-qubit unitary A with
//
//   A |0^m>|psi> = sum_i sqrt(lambda_i) |i> W_i |psi>,   W_0 = U, W_i = R_i,
//
// i.e. outcome 0 on the ancillas certifies that U was applied to the data
// qubit and any other outcome i leaves R_i|psi>, which is undone before the
// next attempt.
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rusamp/qcore.hpp"
#include "rusamp/rng.hpp"

namespace rusamp {

inline constexpr int kDefaultMaxAttempts = 10000;

struct RusSpec {
    int m = 1;
    std::vector<double> lambdas;            // length 2^m, sums to 1
    UnitaryMatrix target = UnitaryMatrix::identity(2);
    std::vector<UnitaryMatrix> recoveries;  // length 2^m - 1; R_i at index i-1
    std::uint64_t seed = 0;

    std::size_t outcomes() const { return std::size_t{1} << m; }
    /// W_i: U for i == 0, R_i otherwise.
    const UnitaryMatrix& branch_gate(std::size_t i) const { return i == 0 ? target : recoveries[i - 1]; }

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;
};

/// RusSpec with identity recoveries when `recoveries` is empty.
RusSpec make_rus_spec(int m, std::vector<double> lambdas, UnitaryMatrix target, std::uint64_t seed,
                      std::vector<UnitaryMatrix> recoveries = {});

class RusCircuit {
public:
    /// Checks that a_matrix acts on the |0^m> block exactly as the spec says.
    RusCircuit(RusSpec spec, UnitaryMatrix a_matrix);

    /// Reads the block structure off an arbitrary (m+1)-qubit unitary.
    /// Phases of the success and failure branches are folded into the target
    /// and recoveries so that every lambda_i is real and non-negative.
    /// Throws std::invalid_argument if the |0^m> block is not of RUS form.
    static RusCircuit from_matrix(UnitaryMatrix a_matrix, int m, std::uint64_t seed);

    const RusSpec& spec() const { return spec_; }
    const UnitaryMatrix& a_matrix() const { return a_; }
    int m() const { return spec_.m; }
    double lambda0() const { return spec_.lambdas[0]; }
    std::size_t dim() const { return a_.dim(); }

    /// max | A(|0^m>|e_d>) - sum_i sqrt(lambda_i)|i>W_i|e_d> | over d and entries.
    double block_residual() const;

private:
    RusSpec spec_;
    UnitaryMatrix a_;
};

struct RunRecord {
    std::vector<std::size_t> outcomes;  // i_1, ..., i_k, 0
    int attempts = 0;
    StateVector final_state = StateVector::basis(1, 0);
};

class MaxAttemptsExceeded : public std::runtime_error {
public:
    explicit MaxAttemptsExceeded(int attempts);
    int attempts() const { return attempts_; }

private:
    int attempts_;
};

/// Synthesizes A = (sum_i |i><i| (x) W_i) (D (x) I) where D|0^m> = sum_i sqrt(lambda_i)|i>
/// and the rest of D is a seeded isometry completion.
RusCircuit build_rus_unitary(const RusSpec& spec);

/// ||Pi A (|0^m> (x) psi)||^2 with Pi = |0^m><0^m| (x) I.
double success_probability(const RusCircuit& c, const StateVector& psi);

/// |0^m> (x) psi
StateVector with_fresh_ancillas(const StateVector& psi, int m);

/// Repeat until the ancillas read 0, undoing R_i after each failure.
/// Throws MaxAttemptsExceeded if no success within max_attempts.
RunRecord run_rus(const RusCircuit& c, const StateVector& psi, RngStream& rng,
                  int max_attempts = kDefaultMaxAttempts);

/// A^dagger as the RUS construction of U^dagger, with the same success probability.
RusCircuit inverse_rus(const RusCircuit& c);

/// 2x2 unitary closest to m (polar factor). Identity if m is numerically zero.
UnitaryMatrix nearest_unitary_2x2(const Matrix& m);

}  // namespace rusamp
