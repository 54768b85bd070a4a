// Amplitude distortion of RUS circuits run under a control qubit.
//
// The conditional operator is
//
//   B' = X (x) |0><0| + A (x) |1><1|,   X = D (x) I  or  X = I,
//
// acting on (ancillas, data, control). D prepares sum_i sqrt(gamma_i)|i> on
// the ancillas so the control-|0> branch sees failure outcomes with
// probabilities gamma_i instead of always succeeding. After each failure the
// recovery R_i^dagger is applied only on the control-|1> branch.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rusamp/qcore.hpp"
#include "rusamp/rng.hpp"
#include "rusamp/rus.hpp"

namespace rusamp {

/// D with D|0^m> = sum_i sqrt(gamma_i)|i>. For m = 1 this is the y-rotation
/// exp(-i(pi/2 - theta)Y) with sin(theta) = sqrt(gamma_0); otherwise the
/// column is completed with a seeded isometry.
UnitaryMatrix build_distorter(std::span<const double> gammas, std::uint64_t seed);

class ConditionalCircuit {
public:
    ConditionalCircuit(RusCircuit base, std::optional<std::vector<double>> gammas, UnitaryMatrix b_matrix);

    const RusCircuit& base() const { return base_; }
    const std::optional<std::vector<double>>& gammas() const { return gammas_; }
    /// gammas, or (1, 0, ..., 0) for the plain controlled operator B.
    std::vector<double> effective_gammas() const;
    const UnitaryMatrix& b_matrix() const { return b_; }
    int m() const { return base_.m(); }

private:
    RusCircuit base_;
    std::optional<std::vector<double>> gammas_;
    UnitaryMatrix b_;
};

ConditionalCircuit build_conditional(const RusCircuit& base, std::optional<std::vector<double>> gammas,
                                     std::uint64_t seed);

struct DistortionConfig {
    Complex alpha = 1.0;
    Complex beta = 0.0;
    StateVector psi0 = StateVector::basis(1, 0);
    StateVector psi1 = StateVector::basis(1, 0);
    int trials = 1;
    std::uint64_t seed = 0;
    int max_attempts = kDefaultMaxAttempts;

    void validate() const;
};

struct FidelityEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int trials = 0;     // completed trials entering the mean
    int exhausted = 0;  // trials that hit max_attempts, excluded from the mean
};

/// alpha psi0 |0> + beta psi1 |1> on (data, control).
StateVector conditional_input(const DistortionConfig& cfg);

/// alpha psi0 |0> + beta U psi1 |1>.
StateVector ideal_conditional_state(const ConditionalCircuit& cc, const DistortionConfig& cfg);

/// (1 + sqrt(lambda0))^2 / (2 (1 + lambda0)): overlap after B with immediate
/// success at alpha = beta = 1/sqrt(2).
double single_shot_overlap(double lambda0);

/// |alpha|^4 + 2|alpha|^2|beta|^2 sqrt(gamma_0 lambda_0) / Gamma + |beta|^4,
/// Gamma = 1 - sum_{i != 0} sqrt(gamma_i lambda_i).
double average_fidelity_closed(Complex alpha, Complex beta, std::span<const double> gammas,
                               std::span<const double> lambdas);

/// Single-ancilla form of average_fidelity_closed.
double average_fidelity_m1(Complex alpha, Complex beta, double gamma0, double lambda0);

/// One run of the conditional loop. record.final_state is the (data, control) state.
/// Throws MaxAttemptsExceeded.
RunRecord simulate_conditional_rus(const ConditionalCircuit& cc, const DistortionConfig& cfg, RngStream& rng);

/// Mean of |<phi|phi_final>|^2 over cfg.trials runs seeded from cfg.seed.
FidelityEstimate monte_carlo_fidelity(const ConditionalCircuit& cc, const DistortionConfig& cfg);

// ---- figure datasets --------------------------------------------------------------

struct FigureRow {
    double x = 0.0;
    std::string curve;
    double mean = 0.0;
    double std = 0.0;
    int n_samples = 0;
    std::uint64_t seed = 0;
};

enum class Fig1Panel { left, right };

inline constexpr double kRelativeMismatch = 0.3;
inline constexpr int kFigureDraws = 1000;

/// 50 points evenly spaced on [0.02, 0.98].
std::vector<double> lambda_grid();
/// 51 points log-spaced on [1e-6, 1e-1].
std::vector<double> failure_log_grid();

/// Distribution of length 2^m with entry 0 = p0 and the remainder drawn as
/// independent uniforms rescaled to sum to 1 - p0.
std::vector<double> random_tail_distribution(int m, double p0, RngStream& rng);

std::vector<FigureRow> figure1_data(Fig1Panel panel, std::uint64_t seed);
std::vector<FigureRow> figure3_data(std::uint64_t seed);

}  // namespace rusamp
