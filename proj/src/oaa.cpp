#include "rusamp/oaa.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rusamp {

namespace {

constexpr double kPi = std::numbers::pi;

// Phase e^{i phi} on the |0^m> block of an (m+1)-qubit vector: indices 0 and 1.
void reflect_in_place(std::vector<Complex>& v, double phi) {
    const Complex p = std::polar(1.0, phi);
    v[0] *= p;
    v[1] *= p;
}

// v <- -A S_phi A^dagger S_varphi v
void iterate_in_place(const Matrix& a, const Matrix& a_dag, std::vector<Complex>& v, double phi, double varphi) {
    reflect_in_place(v, varphi);
    v = multiply(a_dag, v);
    reflect_in_place(v, phi);
    v = multiply(a, v);
    for (Complex& x : v) x = -x;
}

void require_lambda0(double lambda0) {
    if (!(lambda0 > 0.0 && lambda0 <= 1.0))
        throw std::invalid_argument("success probability must lie in (0, 1], got " + std::to_string(lambda0));
}

}  // namespace

UnitaryMatrix reflection(int m, double phi) {
    if (m < 1) throw std::invalid_argument("reflection: m must be >= 1");
    std::vector<double> angles(std::size_t{2} << m, 0.0);
    angles[0] = phi;
    angles[1] = phi;
    return UnitaryMatrix::phases(angles);
}

UnitaryMatrix oaa_iterate(const UnitaryMatrix& a, int m, double phi, double varphi) {
    return -(a * reflection(m, phi) * a.adjoint() * reflection(m, varphi));
}

double amplification_angle(double lambda0) {
    require_lambda0(lambda0);
    return std::asin(std::sqrt(lambda0));
}

// ---- standard ----------------------------------------------------------------------

StandardPlan plan_standard(double lambda0, int j) {
    if (j < 0) throw std::invalid_argument("plan_standard: j must be >= 0");
    return {j, amplification_angle(lambda0)};
}

StateVector standard_oaa_state(const RusCircuit& c, int j, const StateVector& psi) {
    if (j < 0) throw std::invalid_argument("standard_oaa_state: j must be >= 0");
    const Matrix& a = c.a_matrix().matrix();
    const Matrix a_dag = a.adjoint();
    std::vector<Complex> v = multiply(a, with_fresh_ancillas(psi, c.m()).amplitudes());
    for (int step = 0; step < j; ++step) iterate_in_place(a, a_dag, v, kPi, kPi);
    return StateVector::normalize(std::move(v));
}

RusCircuit standard_compose(const RusCircuit& c, int j) {
    if (j < 0) throw std::invalid_argument("standard_compose: j must be >= 0");
    const UnitaryMatrix g = oaa_iterate(c.a_matrix(), c.m(), kPi, kPi);
    UnitaryMatrix out = c.a_matrix();
    for (int step = 0; step < j; ++step) out = g * out;
    return RusCircuit::from_matrix(std::move(out), c.m(), c.spec().seed);
}

// ---- deterministic ------------------------------------------------------------------

std::pair<double, double> solve_phases_numeric(double theta, double chi, double phi_guess, double varphi_guess) {
    const double s2 = std::sin(2 * theta), c2 = std::cos(2 * theta), t = std::tan(chi);
    // tan-chi condition multiplied through by sin(phi/2) so that phi = 0 is not a pole
    auto residual = [&](double phi, double varphi) {
        const double sh = std::sin(phi / 2), ch = std::cos(phi / 2);
        return std::polar(1.0, varphi) * s2 * sh - t * Complex(-c2 * sh, ch);
    };
    double x = phi_guess, y = varphi_guess;
    for (int iter = 0; iter < 100; ++iter) {
        const Complex f = residual(x, y);
        if (std::abs(f) < 1e-15) return {x, y};
        const double h = 1e-7;
        const Complex fx = (residual(x + h, y) - residual(x - h, y)) / (2 * h);
        const Complex fy = (residual(x, y + h) - residual(x, y - h)) / (2 * h);
        const double det = fx.real() * fy.imag() - fy.real() * fx.imag();
        if (std::abs(det) < 1e-300) break;
        const double dx = (f.real() * fy.imag() - fy.real() * f.imag()) / det;
        const double dy = (fx.real() * f.imag() - f.real() * fx.imag()) / det;
        x -= dx;
        y -= dy;
        if (std::abs(dx) + std::abs(dy) < 1e-15) return {x, y};
    }
    if (std::abs(residual(x, y)) < 1e-12) return {x, y};
    throw std::runtime_error("solve_phases_numeric: Newton iteration did not converge");
}

DeterministicPlan plan_deterministic(double lambda0) {
    DeterministicPlan plan;
    plan.theta = amplification_angle(lambda0);
    const double theta = plan.theta;
    int j = static_cast<int>(std::floor((kPi / (2 * theta) - 1) / 2 + 1e-12));
    if (j < 0) j = 0;
    double chi = kPi / 2 - (2 * j + 1) * theta;
    if (chi < -1e-12 && j > 0) {
        --j;
        chi = kPi / 2 - (2 * j + 1) * theta;
    }
    plan.j = j;
    if (std::abs(chi) < 1e-12) {
        plan.chi = 0.0;
        plan.branch = PhaseBranch::skipped;
        return plan;
    }
    plan.chi = chi;

    const double s2 = std::sin(2 * theta), c2 = std::cos(2 * theta);
    const double r = s2 / std::tan(chi);
    const double radicand = r * r - c2 * c2;
    if (radicand >= 0.0) {
        const double cot_half = std::sqrt(radicand);
        plan.phi = 2 * std::atan2(1.0, cot_half);
        plan.varphi = std::atan2(cot_half, -c2);
        plan.branch = PhaseBranch::closed_form;
    } else {
        const auto [phi, varphi] = solve_phases_numeric(theta, chi, kPi, std::arg(Complex(-c2, 0.0)));
        plan.phi = phi;
        plan.varphi = varphi;
        plan.branch = PhaseBranch::numeric;
    }
    return plan;
}

double tan_chi_residual(const DeterministicPlan& plan) {
    if (plan.skip_generalized()) return 0.0;
    const double s2 = std::sin(2 * plan.theta), c2 = std::cos(2 * plan.theta);
    const Complex denom(-c2, 1.0 / std::tan(plan.phi / 2));
    return std::abs(std::tan(plan.chi) - std::polar(1.0, plan.varphi) * s2 / denom);
}

StateVector apply_deterministic(const RusCircuit& c, const DeterministicPlan& plan, const StateVector& psi) {
    const double expected = std::pow(std::sin(plan.theta), 2);
    const double actual = success_probability(c, StateVector::basis(1, 0));
    if (std::abs(expected - actual) > 1e-9)
        throw std::invalid_argument("apply_deterministic: plan built for lambda0 = " + std::to_string(expected) +
                                    " but circuit has " + std::to_string(actual));
    const Matrix& a = c.a_matrix().matrix();
    const Matrix a_dag = a.adjoint();
    std::vector<Complex> v = multiply(a, with_fresh_ancillas(psi, c.m()).amplitudes());
    for (int step = 0; step < plan.j; ++step) iterate_in_place(a, a_dag, v, kPi, kPi);
    if (!plan.skip_generalized()) iterate_in_place(a, a_dag, v, plan.phi, plan.varphi);
    return StateVector::normalize(std::move(v));
}

RusCircuit deterministic_compose(const RusCircuit& c, const DeterministicPlan& plan) {
    UnitaryMatrix out = standard_compose(c, plan.j).a_matrix();
    if (!plan.skip_generalized()) out = oaa_iterate(c.a_matrix(), c.m(), plan.phi, plan.varphi) * out;
    return RusCircuit::from_matrix(std::move(out), c.m(), c.spec().seed);
}

// ---- pi/3 ----------------------------------------------------------------------------

RusCircuit pi3_compose(const RusCircuit& c, const Pi3Plan& plan) {
    if (plan.k < 0) throw std::invalid_argument("pi3_compose: k must be >= 0");
    if (plan.sign != 1 && plan.sign != -1) throw std::invalid_argument("pi3_compose: sign must be +1 or -1");
    if (plan.k == 0) return c;
    const UnitaryMatrix s = reflection(c.m(), plan.sign * kPi / 3);
    UnitaryMatrix a = c.a_matrix();
    for (int level = 0; level < plan.k; ++level) a = -(a * s * a.adjoint() * s * a);
    return RusCircuit::from_matrix(std::move(a), c.m(), c.spec().seed);
}

int pi3_level_for(double epsilon, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("pi3_level_for: delta must lie in (0, 1)");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("pi3_level_for: epsilon must be >= 0");
    if (epsilon >= 1.0) throw std::invalid_argument("pi3_level_for: failure is certain, no level suffices");
    if (epsilon <= delta) return 0;
    const double raw = (std::log(std::log(1 / delta)) - std::log(std::log(1 / epsilon))) / std::log(3.0);
    int k = std::max(0, static_cast<int>(std::ceil(raw)));
    // guard the ceiling against rounding right at an exact power
    auto failure = [&](int level) { return std::pow(epsilon, std::pow(3.0, level)); };
    while (failure(k) > delta) ++k;
    while (k > 0 && failure(k - 1) <= delta) --k;
    return k;
}

// ---- Chebyshev fixed point -------------------------------------------------------------

double chebyshev_first_kind(double order, double x) {
    if (!(order > 0.0)) throw std::invalid_argument("chebyshev_first_kind: order must be positive");
    if (x < -1.0) throw std::invalid_argument("chebyshev_first_kind: x < -1 is outside the supported domain");
    if (x <= 1.0) return std::cos(order * std::acos(x));
    return std::cosh(order * std::acosh(x));
}

double fp_threshold(int length, double delta) {
    if (length < 1) throw std::invalid_argument("fp_threshold: length must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("fp_threshold: delta must lie in (0, 1)");
    const double inv_gamma = chebyshev_first_kind(1.0 / (2 * length + 1), 1.0 / std::sqrt(delta));
    return 1.0 - 1.0 / (inv_gamma * inv_gamma);
}

int fp_length_for(double w_lower_bound, double delta) {
    if (!(w_lower_bound > 0.0 && w_lower_bound <= 1.0))
        throw std::invalid_argument("fp_length_for: lower bound must lie in (0, 1]");
    constexpr int kMaxLength = 1000000;
    for (int length = 1; length <= kMaxLength; ++length)
        if (fp_threshold(length, delta) <= w_lower_bound) return length;
    throw std::invalid_argument("fp_length_for: no length up to 10^6 reaches the requested bound");
}

FixedPointPlan fp_plan(int length, double delta) {
    FixedPointPlan plan;
    plan.length = length;
    plan.delta = delta;
    plan.w = fp_threshold(length, delta);
    plan.gamma = std::sqrt(1.0 - plan.w);
    const double root_w = std::sqrt(plan.w);
    plan.phis.resize(length);
    plan.varphis.resize(length);
    for (int j = 1; j <= length; ++j) {
        const double x = std::tan(2 * kPi * j / (2 * length + 1)) * root_w;
        plan.phis[j - 1] = -2 * std::atan2(1.0, x);  // -2 acot(x); the branch drops out of e^{i phi}
    }
    for (int j = 1; j <= length; ++j) plan.varphis[length - j] = plan.phis[j - 1];
    return plan;
}

RusCircuit fp_compose(const RusCircuit& c, const FixedPointPlan& plan) {
    if (plan.phis.size() != static_cast<std::size_t>(plan.length) || plan.varphis.size() != plan.phis.size())
        throw std::invalid_argument("fp_compose: phase lists do not match the plan length");
    UnitaryMatrix out = c.a_matrix();
    for (int j = 0; j < plan.length; ++j)
        out = oaa_iterate(c.a_matrix(), c.m(), plan.phis[j], plan.varphis[j]) * out;
    return RusCircuit::from_matrix(std::move(out), c.m(), c.spec().seed);
}

Complex success_amplitude(const RusCircuit& composed, const UnitaryMatrix& reference) {
    if (reference.dim() != 2) throw std::invalid_argument("success_amplitude: reference must be single-qubit");
    // tr(reference^dagger K_0) / 2 with K_0 the |0^m> block of A'
    Complex tr = 0.0;
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) tr += std::conj(reference(r, c)) * composed.a_matrix()(r, c);
    return tr / 2.0;
}

}  // namespace rusamp
