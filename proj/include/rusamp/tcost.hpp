// T-gate cost models for classical repetition and the four OAA protocols.
//
// Costs are counted for m = 1: S_pi is T-free and a generalized reflection
// S_phi costs as much as an eps-accurate z-rotation,
//
//   C_T(S_phi) = max(0, 3.21 log2(1/eps) - 6.93),   eps = delta / n_S,
//
// with n_S the number of generalized reflections in the coherent part.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rusamp {

enum class Strategy { classical, standard_oaa, deterministic_oaa, pi3_oaa, fp_oaa };

std::string_view strategy_name(Strategy s);
const std::vector<Strategy>& all_strategy_ids();

struct ReflectionPolicy {
    enum class Kind { kmm, fixed, zero };
    Kind kind = Kind::kmm;
    double value = 0.0;  // only for Kind::fixed

    static ReflectionPolicy kmm() { return {Kind::kmm, 0.0}; }
    static ReflectionPolicy zero() { return {Kind::zero, 0.0}; }
    static ReflectionPolicy fixed(double v);

    /// "kmm", "zero" or "fixed:V". Throws std::invalid_argument.
    static ReflectionPolicy parse(std::string_view text);
    std::string to_string() const;

    /// T-count of one generalized reflection at precision eps.
    double cost(double eps) const;
};

struct CostQuery {
    double lambda0 = 0.5;
    double delta = 1e-6;
    double ct_a = 1.0;
    ReflectionPolicy policy = ReflectionPolicy::kmm();

    /// Throws std::invalid_argument unless 0 < lambda0 <= 1, 0 < delta < 1, ct_a >= 0.
    void validate() const;
};

struct CostResult {
    Strategy strategy = Strategy::classical;
    double total_t = 0.0;
    std::optional<int> j;
    std::optional<int> k;
    std::optional<int> length;
    std::optional<long long> repetitions;
    std::optional<long long> n_s;
    std::optional<double> epsilon;
    bool boundary = false;  // lambda0 >= 1 - delta handled by a convention, not the formula
};

/// max(0, 3.21 log2(1/eps) - 6.93). Throws std::invalid_argument unless 0 < eps < 1.
double ct_reflection(double eps);

CostResult ct_classical(const CostQuery& q);
CostResult ct_standard_oaa(const CostQuery& q);
CostResult ct_deterministic_oaa(const CostQuery& q);
CostResult ct_pi3(const CostQuery& q);
CostResult ct_fixed_point(const CostQuery& q);

/// All five strategies in enum order.
std::vector<CostResult> all_strategies(const CostQuery& q);

/// pi/3 cost by the level recurrence C(k) = 3 C(k-1) + 2 C_S.
double pi3_cost_recurrence(double ct_a, double ct_s, int k);

// ---- expected costs of a single amplification round --------------------------------

/// C_T(A) / sin^2(theta)
double expected_cost_without_oaa(double lambda0, double ct_a);

/// (C_T(A) + j (2 C_T(A) + 2 C_T(S_pi))) / sin^2((2j+1) theta)
double expected_cost_with_oaa(double lambda0, double ct_a, int j, double ct_s_pi = 0.0);

/// Expected cost with j iterations once amplification is complete:
/// (2j+1) C_T(A) + 2j C_T(S_pi).
double amplified_cost(double ct_a, int j, double ct_s_pi = 0.0);

// ---- figure datasets ---------------------------------------------------------------

struct CostRow {
    double lambda0 = 0.0;
    CostResult result;
};

/// Every strategy over the 50-point lambda0 grid with the KMM reflection policy.
std::vector<CostRow> figure2_data(double ct_a, double delta);

}  // namespace rusamp
