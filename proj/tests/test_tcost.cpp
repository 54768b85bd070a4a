#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rusamp/oaa.hpp"
#include "rusamp/tcost.hpp"
#include "support.hpp"

using namespace rusamp;

namespace {

CostQuery query(double lambda0, double delta, double ct_a, ReflectionPolicy policy = ReflectionPolicy::zero()) {
    return {lambda0, delta, ct_a, policy};
}

double kmm(double eps) { return std::max(0.0, 3.21 * std::log2(1 / eps) - 6.93); }

}  // namespace

TEST(Reflection, KmmValues) {
    EXPECT_NEAR(ct_reflection(1e-6), 3.21 * std::log2(1e6) - 6.93, 1e-12);
    EXPECT_NEAR(ct_reflection(1e-6), 57.0, 0.1);
    EXPECT_NEAR(ct_reflection(1e-3), 25.06, 0.02);
    EXPECT_EQ(ct_reflection(0.5), 0.0);
    EXPECT_EQ(ct_reflection(0.9999), 0.0);
    EXPECT_THROW(ct_reflection(0.0), std::invalid_argument);
    EXPECT_THROW(ct_reflection(1.0), std::invalid_argument);
    // once eps = delta / n_S with n_S >= 2, the per-reflection cost lands in the 60-80 band at delta = 1e-6
    for (int ns : {2, 4, 10, 26}) {
        const double c = ct_reflection(1e-6 / ns);
        EXPECT_GE(c, 60.0);
        EXPECT_LE(c, 80.0);
    }
}

TEST(ReflectionPolicy, ParseAndCost) {
    EXPECT_EQ(ReflectionPolicy::parse("kmm").kind, ReflectionPolicy::Kind::kmm);
    EXPECT_EQ(ReflectionPolicy::parse("zero").cost(1e-6), 0.0);
    EXPECT_EQ(ReflectionPolicy::parse("fixed:42.5").cost(1e-6), 42.5);
    EXPECT_EQ(ReflectionPolicy::parse("fixed:7").to_string(), "fixed:7");
    EXPECT_THROW(ReflectionPolicy::parse("fixed:"), std::invalid_argument);
    EXPECT_THROW(ReflectionPolicy::parse("fixed:-1"), std::invalid_argument);
    EXPECT_THROW(ReflectionPolicy::parse("kmn"), std::invalid_argument);
}

TEST(CostQuery, Validation) {
    EXPECT_THROW(ct_classical(query(0.0, 1e-6, 1)), std::invalid_argument);
    EXPECT_THROW(ct_classical(query(1.5, 1e-6, 1)), std::invalid_argument);
    EXPECT_THROW(ct_classical(query(0.5, 1.0, 1)), std::invalid_argument);
    EXPECT_THROW(ct_classical(query(0.5, 1e-6, -1)), std::invalid_argument);
}

TEST(Classical, SpotValues) {
    EXPECT_EQ(ct_classical(query(0.5, 1e-6, 1)).total_t, 19.0);
    EXPECT_EQ(ct_classical(query(1.0, 1e-6, 7)).total_t, 7.0);
    const CostResult edge = ct_classical(query(1 - 1e-7, 1e-6, 3));
    EXPECT_EQ(edge.total_t, 3.0);
    EXPECT_TRUE(edge.boundary);
    // log(1e-6)/log(0.1) = 6 exactly: ceil(6 - 1) = 5
    EXPECT_EQ(ct_classical(query(0.9, 1e-6, 1)).total_t, 5.0);
}

TEST(StandardOaa, SpotValues) {
    const CostResult quarter = ct_standard_oaa(query(0.25, 1e-6, 10));
    EXPECT_EQ(*quarter.j, 1);
    EXPECT_EQ(quarter.total_t, 30.0);
    const CostResult half = ct_standard_oaa(query(0.5, 1e-6, 1));
    EXPECT_EQ(*half.j, 0);
    EXPECT_EQ(half.total_t, 19.0);
}

TEST(StandardOaa, ExactCrossoverAndAsymptoticCrossover) {
    // with one iteration and free reflections: 3 C_T(A) / sin^2(3 theta) < C_T(A) / sin^2(theta)
    // holds for lambda0 < (3 - sqrt 3) / 4
    const double exact = (3 - std::sqrt(3.0)) / 4;
    EXPECT_LT(expected_cost_with_oaa(exact - 1e-6, 1, 1), expected_cost_without_oaa(exact - 1e-6, 1));
    EXPECT_GT(expected_cost_with_oaa(exact + 1e-6, 1, 1), expected_cost_without_oaa(exact + 1e-6, 1));
    // fully amplified: 3 C_T(A) < C_T(A) / lambda0 iff lambda0 < 1/3
    EXPECT_LT(amplified_cost(1, 1), expected_cost_without_oaa(1.0 / 3 - 1e-9, 1));
    EXPECT_GT(amplified_cost(1, 1), expected_cost_without_oaa(1.0 / 3 + 1e-9, 1));
    EXPECT_EQ(amplified_cost(2, 1, 5), 2 + 2 * 2 + 2 * 5);
}

TEST(Deterministic, SpotValues) {
    const CostResult quarter = ct_deterministic_oaa(query(0.25, 1e-6, 1));
    EXPECT_EQ(*quarter.n_s, 0);
    EXPECT_EQ(quarter.total_t, 3.0);
    const CostResult half = ct_deterministic_oaa(query(0.5, 1e-6, 100, ReflectionPolicy::kmm()));
    EXPECT_NEAR(half.total_t, 200 + 2 * kmm(5e-7), 1e-9);
    EXPECT_NEAR(half.total_t, 320.5, 0.1);
    EXPECT_EQ(ct_deterministic_oaa(query(1.0, 1e-6, 9)).total_t, 9.0);
}

TEST(Pi3, SpotValuesAndRecurrence) {
    const CostResult r = ct_pi3(query(0.5, 1e-6, 1));
    EXPECT_EQ(*r.k, 3);
    EXPECT_EQ(r.total_t, 27.0);
    EXPECT_EQ(*r.n_s, 26);
    const CostResult top = ct_pi3(query(1 - 1e-7, 1e-6, 5, ReflectionPolicy::kmm()));
    EXPECT_EQ(*top.k, 0);
    EXPECT_EQ(top.total_t, 5.0);
    for (int k = 0; k <= 5; ++k) {
        const double cs = 61.25;
        EXPECT_EQ((1.5 + cs) * std::pow(3.0, k) - cs, pi3_cost_recurrence(1.5, cs, k));
    }
    const CostResult kmm_r = ct_pi3(query(0.5, 1e-6, 1, ReflectionPolicy::kmm()));
    EXPECT_NEAR(kmm_r.total_t, (1 + kmm(1e-6 / 26)) * 27 - kmm(1e-6 / 26), 1e-9);
}

TEST(FixedPoint, SpotValues) {
    const CostResult r = ct_fixed_point(query(0.4, 1e-6, 1));
    EXPECT_EQ(*r.length, 5);
    EXPECT_EQ(r.total_t, 11.0);
    const CostResult top = ct_fixed_point(query(1 - 1e-7, 1e-6, 1, ReflectionPolicy::fixed(10)));
    EXPECT_EQ(*top.length, 1);
    EXPECT_TRUE(top.boundary);
    EXPECT_EQ(top.total_t, 3 + 2 * 10);
    const CostResult big = ct_fixed_point(query(0.5, 1e-6, 100, ReflectionPolicy::kmm()));
    const int length = fp_length_for(0.5, 1e-6);
    EXPECT_EQ(*big.length, length);
    EXPECT_NEAR(big.total_t, (2 * length + 1) * 100 + 2 * length * kmm(1e-6 / (2 * length)), 1e-9);
}

TEST(Invariants, CostsBoundedBelowAndMonotoneInDelta) {
    for (double ct_a : {1.0, 100.0})
        for (double lambda0 = 0.01; lambda0 <= 1.0; lambda0 += 0.0123) {
            std::vector<double> prev;
            for (double delta : {1e-1, 1e-2, 1e-3, 1e-6, 1e-9}) {
                const auto all = all_strategies(query(lambda0, delta, ct_a, ReflectionPolicy::kmm()));
                ASSERT_EQ(all.size(), 5u);
                for (std::size_t s = 0; s < all.size(); ++s) {
                    EXPECT_GE(all[s].total_t, ct_a - 1e-12);
                    if (all[s].j) EXPECT_GE(*all[s].j, 0);
                    if (all[s].k) EXPECT_GE(*all[s].k, 0);
                    if (all[s].length) EXPECT_GE(*all[s].length, 1);
                    if (!prev.empty()) EXPECT_GE(all[s].total_t, prev[s] - 1e-9) << lambda0 << " " << delta;
                }
                prev.clear();
                for (const auto& r : all) prev.push_back(r.total_t);
            }
        }
}

TEST(Invariants, ParametersDeliverTheTarget) {
    // the (j, k, L) chosen by the cost model reach 1 - delta when executed
    RngStream rng(71);
    const double delta = 1e-6;
    for (double lambda0 = 0.02; lambda0 < 0.99; lambda0 += 0.0784) {
        const RusCircuit c = rusamp::testing::random_circuit(1, lambda0, rng);
        const auto q = query(lambda0, delta, 1);
        const CostResult det = ct_deterministic_oaa(q);
        EXPECT_GE(deterministic_compose(c, plan_deterministic(lambda0)).lambda0(), 1 - delta);
        EXPECT_EQ(*det.j, plan_deterministic(lambda0).j);
        const CostResult pi3 = ct_pi3(q);
        EXPECT_GE(pi3_compose(c, {*pi3.k, 1}).lambda0(), 1 - delta - 1e-12);
        const CostResult fp = ct_fixed_point(q);
        EXPECT_GE(fp_compose(c, fp_plan(*fp.length, delta)).lambda0(), 1 - delta - 1e-12);
    }
}

TEST(Figure2, ShapeAndBehaviour) {
    const auto rows = figure2_data(1.0, 1e-6);
    ASSERT_EQ(rows.size(), 250u);
    for (std::size_t i = 0; i < rows.size(); ++i)
        EXPECT_EQ(rows[i].result.strategy, all_strategy_ids()[i % 5]);
    // classical grows like 1/lambda0 at small lambda0
    const double c0 = rows[0].result.total_t, c1 = rows[5].result.total_t;
    const double l0 = rows[0].lambda0, l1 = rows[5].lambda0;
    EXPECT_NEAR(c0 / c1, (std::log(1 - l1)) / std::log(1 - l0), 0.15);
    // near lambda0 = 1 only O(1) applications of A are needed; reflections dominate the rest
    for (std::size_t i = rows.size() - 5; i < rows.size(); ++i) {
        const CostResult& r = rows[i].result;
        const double reflections = r.n_s ? *r.n_s * ct_reflection(1e-6 / std::max<long long>(1, *r.n_s)) : 0.0;
        EXPECT_LE(r.total_t - reflections, 10.0) << strategy_name(r.strategy);
    }
}

TEST(Figure2, AsymptoticCrossoverOnGrid) {
    for (const auto& row : figure2_data(1.0, 1e-6)) {
        if (row.result.strategy != Strategy::standard_oaa) continue;
        const bool cheaper = amplified_cost(1.0, 1) < expected_cost_without_oaa(row.lambda0, 1.0);
        EXPECT_EQ(cheaper, row.lambda0 < 1.0 / 3) << row.lambda0;
    }
}
