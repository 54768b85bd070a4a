#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rusamp/qcore.hpp"

using namespace rusamp;

TEST(Matrix, IdentityAndAdjoint) {
    const Matrix i4 = Matrix::identity(4);
    EXPECT_EQ(i4.unitarity_residual(), 0.0);
    Matrix m(2, {Complex(1, 2), Complex(3, -1), Complex(0, 1), Complex(2, 0)});
    const Matrix a = m.adjoint();
    EXPECT_EQ(a(0, 1), Complex(0, -1));
    EXPECT_EQ(a(1, 0), Complex(3, 1));
    EXPECT_EQ(m.adjoint().adjoint().max_abs_diff(m), 0.0);
}

TEST(Matrix, ProductMatchesHandComputation) {
    Matrix a(2, {1.0, 2.0, 3.0, 4.0});
    Matrix b(2, {Complex(0, 1), 0.0, 1.0, -1.0});
    const Matrix c = a * b;
    EXPECT_EQ(c(0, 0), Complex(2, 1));
    EXPECT_EQ(c(0, 1), Complex(-2, 0));
    EXPECT_EQ(c(1, 0), Complex(4, 3));
    EXPECT_EQ(c(1, 1), Complex(-4, 0));
}

TEST(Matrix, RejectsWrongEntryCount) { EXPECT_THROW(Matrix(2, {1.0, 2.0, 3.0}), std::invalid_argument); }

TEST(UnitaryMatrix, RejectsNonUnitary) {
    EXPECT_THROW(UnitaryMatrix(Matrix(2, {1.0, 1.0, 0.0, 1.0})), std::invalid_argument);
    EXPECT_NO_THROW(UnitaryMatrix(Matrix(2, {0.0, 1.0, 1.0, 0.0})));
}

TEST(UnitaryMatrix, PauliAlgebra) {
    const auto x = gates::pauli_x(), y = gates::pauli_y(), z = gates::pauli_z();
    // XY = iZ
    const Matrix xy = (x * y).matrix();
    EXPECT_LT(xy.max_abs_diff(Complex(0, 1) * z.matrix()), 1e-15);
    const Matrix hh = (gates::hadamard() * gates::hadamard()).matrix();
    EXPECT_LT(hh.max_abs_diff(Matrix::identity(2)), 1e-15);
}

TEST(UnitaryMatrix, YRotationIsExpOfY) {
    const double a = 0.37;
    const auto r = gates::y_rotation(a);
    // exp(-i a Y) = cos a I - i sin a Y
    const Matrix expect = Complex(std::cos(a)) * Matrix::identity(2) +
                          Complex(0, -std::sin(a)) * gates::pauli_y().matrix();
    EXPECT_LT(r.matrix().max_abs_diff(expect), 1e-15);
}

TEST(Tensor, KroneckerLayout) {
    const auto x = gates::pauli_x();
    const auto i2 = UnitaryMatrix::identity(2);
    // X on the leading qubit flips the most significant bit
    const UnitaryMatrix xi = tensor(x, i2);
    EXPECT_EQ(xi(2, 0), Complex(1.0));
    EXPECT_EQ(xi(0, 2), Complex(1.0));
    const UnitaryMatrix ix = tensor(i2, x);
    EXPECT_EQ(ix(1, 0), Complex(1.0));
    const StateVector s = tensor(StateVector::basis(1, 1), StateVector::basis(1, 0));
    EXPECT_EQ(s[2], Complex(1.0));
}

TEST(StateVector, Validation) {
    EXPECT_THROW(StateVector::from_amplitudes({1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(StateVector::from_amplitudes({1.0, 0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(StateVector::normalize({0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(StateVector::basis(2, 4), std::invalid_argument);
    const auto s = StateVector::normalize({3.0, Complex(0, 4)});
    EXPECT_NEAR(std::abs(s[0]), 0.6, 1e-15);
}

TEST(StateVector, RandomIsNormalized) {
    RngStream rng(3);
    for (int n = 1; n <= 5; ++n) {
        const auto s = StateVector::random(n, rng);
        double norm = 0.0;
        for (const Complex& a : s.amplitudes()) norm += std::norm(a);
        EXPECT_NEAR(norm, 1.0, kNormTolerance);
    }
}

TEST(Apply, DimensionMismatchThrows) {
    EXPECT_THROW(apply(UnitaryMatrix::identity(4), StateVector::basis(1, 0)), std::invalid_argument);
}

TEST(CompleteIsometry, KeepsLeadingColumnsAndIsUnitary) {
    RngStream rng(17);
    for (std::size_t dim : {2u, 4u, 8u, 16u, 32u}) {
        const auto psi = StateVector::random(static_cast<int>(std::countr_zero(dim)), rng);
        const std::vector<std::vector<Complex>> cols = {{psi.amplitudes().begin(), psi.amplitudes().end()}};
        const UnitaryMatrix u = complete_isometry(cols, dim, rng);
        EXPECT_LE(u.matrix().unitarity_residual(), kUnitaryTolerance);
        for (std::size_t r = 0; r < dim; ++r) EXPECT_EQ(u(r, 0), psi[r]);
    }
}

TEST(CompleteIsometry, RejectsNonOrthonormalInput) {
    RngStream rng(1);
    const std::vector<std::vector<Complex>> cols = {{1.0, 0.0}, {1.0, 0.0}};
    EXPECT_THROW(complete_isometry(cols, 2, rng), std::invalid_argument);
    const std::vector<std::vector<Complex>> scaled = {{2.0, 0.0}};
    EXPECT_THROW(complete_isometry(scaled, 2, rng), std::invalid_argument);
}

TEST(CompleteIsometry, SeedDeterminesCompletion) {
    RngStream a(5), b(5);
    EXPECT_EQ(gates::random_unitary(8, a).matrix().max_abs_diff(gates::random_unitary(8, b).matrix()), 0.0);
}

TEST(Measurement, BlockProbabilitiesAndCollapse) {
    // (|00> + |01> + sqrt(2)|10>) / 2 measured on the leading qubit
    const auto s = StateVector::from_amplitudes({0.5, 0.5, std::sqrt(0.5), 0.0});
    const auto p = ancilla_block_probabilities(s, 1);
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[1], 0.5, 1e-15);

    RngStream rng(8);
    int zeros = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto m = measure_ancillas(s, 1, rng);
        if (m.outcome == 0) {
            ++zeros;
            const auto rest = remaining_register(m.collapsed, 1, 0);
            EXPECT_NEAR(std::abs(rest[0]), std::sqrt(0.5), 1e-12);
        } else {
            EXPECT_NEAR(std::abs(m.collapsed[2]), 1.0, 1e-12);
        }
    }
    EXPECT_NEAR(static_cast<double>(zeros) / n, 0.5, 5 * std::sqrt(0.25 / n));
}

TEST(Measurement, RequiresDataQubit) {
    RngStream rng(1);
    EXPECT_THROW(measure_ancillas(StateVector::basis(1, 0), 1, rng), std::invalid_argument);
}

TEST(Fidelity, IgnoresGlobalPhase) {
    const auto a = StateVector::normalize({1.0, Complex(0, 1)});
    const auto b = StateVector::normalize({Complex(0, 1), -1.0});
    EXPECT_NEAR(fidelity(a, b), 1.0, 1e-15);
    EXPECT_NEAR(fidelity(StateVector::basis(1, 0), StateVector::basis(1, 1)), 0.0, 1e-15);
}
