// Oblivious amplitude amplification for RUS circuits.
//
// All protocols are built from the generalized reflection
//
//   S_phi = (I^m - (1 - e^{i phi}) |0^m><0^m|) (x) I
//
// and the iterate -A S_phi A^dagger S_varphi. Global phases are kept exactly:
// they turn into relative phases once the circuit is run under a control.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rusamp/qcore.hpp"
#include "rusamp/rus.hpp"

namespace rusamp {

UnitaryMatrix reflection(int m, double phi);

/// -A S_phi A^dagger S_varphi
UnitaryMatrix oaa_iterate(const UnitaryMatrix& a, int m, double phi, double varphi);

/// theta with sin(theta) = sqrt(lambda0).
double amplification_angle(double lambda0);

// ---- standard OAA ---------------------------------------------------------------

struct StandardPlan {
    int j = 0;
    double theta = 0.0;
};

/// Throws std::invalid_argument unless 0 < lambda0 <= 1 and j >= 0.
StandardPlan plan_standard(double lambda0, int j);

/// (-A S_pi A^dagger S_pi)^j A (|0^m> (x) psi)
StateVector standard_oaa_state(const RusCircuit& c, int j, const StateVector& psi);

/// Circuit whose matrix is (-A S_pi A^dagger S_pi)^j A.
RusCircuit standard_compose(const RusCircuit& c, int j);

// ---- deterministic OAA ----------------------------------------------------------

enum class PhaseBranch {
    skipped,      // chi == 0: no generalized step needed
    closed_form,  // positive root of cot(phi/2)
    numeric,      // Newton solve on the real and imaginary parts
};

struct DeterministicPlan {
    int j = 0;
    double theta = 0.0;
    double chi = 0.0;
    double phi = 0.0;
    double varphi = 0.0;
    PhaseBranch branch = PhaseBranch::skipped;

    bool skip_generalized() const { return branch == PhaseBranch::skipped; }
};

/// Largest j with (2j+1) theta <= pi/2, then the phases of one generalized
/// iterate that rotates the remaining angle chi onto the target exactly.
/// Throws std::invalid_argument for lambda0 outside (0, 1].
DeterministicPlan plan_deterministic(double lambda0);

/// |tan chi - e^{i varphi} sin 2theta (-cos 2theta + i cot(phi/2))^{-1}|; zero for a skipped step.
double tan_chi_residual(const DeterministicPlan& plan);

/// Newton iteration for (phi, varphi) starting from the given guess.
/// Throws std::runtime_error if it does not converge.
std::pair<double, double> solve_phases_numeric(double theta, double chi, double phi_guess, double varphi_guess);

/// (-A S_phi A^dagger S_varphi)(-A S_pi A^dagger S_pi)^j A (|0^m> (x) psi).
/// Throws std::invalid_argument if the plan was built for a different lambda0.
StateVector apply_deterministic(const RusCircuit& c, const DeterministicPlan& plan, const StateVector& psi);

RusCircuit deterministic_compose(const RusCircuit& c, const DeterministicPlan& plan);

// ---- pi/3 fixed-point OAA -------------------------------------------------------

struct Pi3Plan {
    int k = 0;     // concatenation level
    int sign = 1;  // +1 uses S_{pi/3}, -1 uses S_{-pi/3}
};

/// A_0 = A, A_k = -A_{k-1} S A_{k-1}^dagger S A_{k-1}; failure (1-lambda0)^{3^k}.
RusCircuit pi3_compose(const RusCircuit& c, const Pi3Plan& plan);

/// Smallest k with epsilon^{3^k} <= delta.
/// Throws std::invalid_argument for epsilon >= 1 or delta outside (0, 1).
int pi3_level_for(double epsilon, double delta);

// ---- Chebyshev fixed-point OAA --------------------------------------------------

/// T_order(x) for fractional order: cos(order acos x) on [-1, 1], cosh(order acosh x) above 1.
double chebyshev_first_kind(double order, double x);

/// Threshold w = 1 - gamma^2 with gamma^{-1} = T_{1/(2L+1)}(1/sqrt(delta)).
double fp_threshold(int length, double delta);

/// Smallest L >= 1 with fp_threshold(L, delta) <= w_lower_bound.
int fp_length_for(double w_lower_bound, double delta);

struct FixedPointPlan {
    int length = 1;
    double delta = 0.0;
    double gamma = 0.0;
    double w = 0.0;
    std::vector<double> phis;     // phi_1 .. phi_L
    std::vector<double> varphis;  // varphi_1 .. varphi_L
};

FixedPointPlan fp_plan(int length, double delta);

/// G(phi_L, varphi_L) ... G(phi_1, varphi_1) A with G(phi, varphi) = -A S_phi A^dagger S_varphi.
RusCircuit fp_compose(const RusCircuit& c, const FixedPointPlan& plan);

// ---- inspection -----------------------------------------------------------------

/// Scalar a with Pi A' Pi = a |0^m><0^m| (x) reference, i.e. the success
/// amplitude of a composed circuit relative to the original target gate.
Complex success_amplitude(const RusCircuit& composed, const UnitaryMatrix& reference);

}  // namespace rusamp
