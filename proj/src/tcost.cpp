#include "rusamp/tcost.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "rusamp/distortion.hpp"
#include "rusamp/oaa.hpp"

namespace rusamp {

namespace {

constexpr double kPi = std::numbers::pi;

// ceil(x - 1) with a small allowance so exact integer ratios do not round up
// through floating error, floored at one execution.
long long attempts_for(double ratio) {
    if (!std::isfinite(ratio) || ratio <= 0.0) return 1;
    const double v = std::ceil(ratio - 1.0 - 1e-9);
    return v < 1.0 ? 1 : static_cast<long long>(v);
}

bool at_threshold(const CostQuery& q) { return q.lambda0 >= 1.0 - q.delta; }

}  // namespace

std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::classical: return "classical";
        case Strategy::standard_oaa: return "standard_oaa";
        case Strategy::deterministic_oaa: return "deterministic_oaa";
        case Strategy::pi3_oaa: return "pi3_oaa";
        case Strategy::fp_oaa: return "fp_oaa";
    }
    return "unknown";
}

const std::vector<Strategy>& all_strategy_ids() {
    static const std::vector<Strategy> ids = {Strategy::classical, Strategy::standard_oaa,
                                              Strategy::deterministic_oaa, Strategy::pi3_oaa, Strategy::fp_oaa};
    return ids;
}

// ---- reflection policy ---------------------------------------------------------------

ReflectionPolicy ReflectionPolicy::fixed(double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("reflection policy: fixed cost must be >= 0");
    return {Kind::fixed, v};
}

ReflectionPolicy ReflectionPolicy::parse(std::string_view text) {
    if (text == "kmm") return kmm();
    if (text == "zero") return zero();
    constexpr std::string_view prefix = "fixed:";
    if (text.substr(0, prefix.size()) == prefix) {
        const std::string num(text.substr(prefix.size()));
        char* end = nullptr;
        const double v = std::strtod(num.c_str(), &end);
        if (num.empty() || end != num.c_str() + num.size())
            throw std::invalid_argument("reflection policy: bad fixed value '" + num + "'");
        return fixed(v);
    }
    throw std::invalid_argument("reflection policy must be kmm, zero or fixed:V, got '" + std::string(text) + "'");
}

std::string ReflectionPolicy::to_string() const {
    switch (kind) {
        case Kind::kmm: return "kmm";
        case Kind::zero: return "zero";
        case Kind::fixed: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "fixed:%.17g", value);
            return buf;
        }
    }
    return "kmm";
}

double ReflectionPolicy::cost(double eps) const {
    switch (kind) {
        case Kind::kmm: return ct_reflection(eps);
        case Kind::fixed: return value;
        case Kind::zero: return 0.0;
    }
    return 0.0;
}

void CostQuery::validate() const {
    if (!(lambda0 > 0.0 && lambda0 <= 1.0)) throw std::invalid_argument("lambda0 must lie in (0, 1]");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (!(ct_a >= 0.0) || !std::isfinite(ct_a)) throw std::invalid_argument("ct_a must be finite and >= 0");
    if (policy.kind == ReflectionPolicy::Kind::fixed && !(policy.value >= 0.0))
        throw std::invalid_argument("fixed reflection cost must be >= 0");
}

// ---- strategies ------------------------------------------------------------------------

double ct_reflection(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("ct_reflection: eps must lie in (0, 1)");
    return std::max(0.0, 3.21 * std::log2(1.0 / eps) - 6.93);
}

CostResult ct_classical(const CostQuery& q) {
    q.validate();
    CostResult r;
    r.strategy = Strategy::classical;
    if (at_threshold(q)) {
        r.repetitions = 1;
        r.boundary = true;
    } else {
        r.repetitions = attempts_for(std::log(q.delta) / std::log(1.0 - q.lambda0));
    }
    r.total_t = q.ct_a * static_cast<double>(*r.repetitions);
    return r;
}

CostResult ct_standard_oaa(const CostQuery& q) {
    q.validate();
    CostResult r;
    r.strategy = Strategy::standard_oaa;
    const double theta = amplification_angle(q.lambda0);
    int j = static_cast<int>(std::floor((kPi / (2 * theta) - 1) / 2 + 1e-12));
    if (j < 0) j = 0;
    const double chi = kPi / 2 - (2 * j + 1) * theta;
    const double fail = std::abs(chi) < 1e-12 ? 0.0 : std::pow(std::sin(chi), 2);
    r.j = j;
    r.n_s = 0;
    r.repetitions = fail <= q.delta ? 1 : attempts_for(std::log(q.delta) / std::log(fail));
    r.total_t = (2 * j + 1) * q.ct_a * static_cast<double>(*r.repetitions);
    return r;
}

CostResult ct_deterministic_oaa(const CostQuery& q) {
    q.validate();
    CostResult r;
    r.strategy = Strategy::deterministic_oaa;
    const DeterministicPlan plan = plan_deterministic(q.lambda0);
    r.j = plan.j;
    if (plan.skip_generalized()) {
        r.n_s = 0;
        r.total_t = (2 * plan.j + 1) * q.ct_a;
        return r;
    }
    r.n_s = 2;
    r.epsilon = q.delta / 2;
    r.total_t = 2 * (plan.j + 1) * q.ct_a + 2 * q.policy.cost(*r.epsilon);
    return r;
}

double pi3_cost_recurrence(double ct_a, double ct_s, int k) {
    if (k < 0) throw std::invalid_argument("pi3_cost_recurrence: k must be >= 0");
    double c = ct_a;
    for (int level = 0; level < k; ++level) c = 3 * c + 2 * ct_s;
    return c;
}

CostResult ct_pi3(const CostQuery& q) {
    q.validate();
    CostResult r;
    r.strategy = Strategy::pi3_oaa;
    const int k = pi3_level_for(1.0 - q.lambda0, q.delta);
    r.k = k;
    r.boundary = at_threshold(q);
    const long long pow3 = static_cast<long long>(std::llround(std::pow(3.0, k)));
    r.n_s = pow3 - 1;
    double ct_s = 0.0;
    if (k > 0) {
        r.epsilon = q.delta / static_cast<double>(*r.n_s);
        ct_s = q.policy.cost(*r.epsilon);
    }
    r.total_t = (q.ct_a + ct_s) * static_cast<double>(pow3) - ct_s;
    return r;
}

CostResult ct_fixed_point(const CostQuery& q) {
    q.validate();
    CostResult r;
    r.strategy = Strategy::fp_oaa;
    const int length = fp_length_for(q.lambda0, q.delta);
    r.length = length;
    r.boundary = at_threshold(q);
    r.n_s = 2LL * length;
    r.epsilon = q.delta / static_cast<double>(*r.n_s);
    r.total_t = (2 * length + 1) * q.ct_a + 2 * length * q.policy.cost(*r.epsilon);
    return r;
}

std::vector<CostResult> all_strategies(const CostQuery& q) {
    return {ct_classical(q), ct_standard_oaa(q), ct_deterministic_oaa(q), ct_pi3(q), ct_fixed_point(q)};
}

// ---- expected single-round costs ------------------------------------------------------------

double expected_cost_without_oaa(double lambda0, double ct_a) {
    if (!(lambda0 > 0.0 && lambda0 <= 1.0)) throw std::invalid_argument("lambda0 must lie in (0, 1]");
    return ct_a / lambda0;
}

double expected_cost_with_oaa(double lambda0, double ct_a, int j, double ct_s_pi) {
    if (j < 0) throw std::invalid_argument("expected_cost_with_oaa: j must be >= 0");
    const double theta = amplification_angle(lambda0);
    const double s = std::sin((2 * j + 1) * theta);
    if (s * s == 0.0) throw std::domain_error("expected_cost_with_oaa: amplified success vanishes");
    return amplified_cost(ct_a, j, ct_s_pi) / (s * s);
}

double amplified_cost(double ct_a, int j, double ct_s_pi) {
    if (j < 0) throw std::invalid_argument("amplified_cost: j must be >= 0");
    return ct_a + j * (2 * ct_a + 2 * ct_s_pi);
}

std::vector<CostRow> figure2_data(double ct_a, double delta) {
    std::vector<CostRow> rows;
    for (double lambda0 : lambda_grid()) {
        const CostQuery q{lambda0, delta, ct_a, ReflectionPolicy::kmm()};
        for (const CostResult& r : all_strategies(q)) rows.push_back({lambda0, r});
    }
    return rows;
}

}  // namespace rusamp
