// Dense complex linear algebra for small registers.
//
// Register order is big-endian and shared by every module: ancillas first
// (m qubits), then the data qubit, then the optional control qubit. Qubit 0
// is the most significant bit of a basis index, so the |0^m> ancilla block of
// an (m+1)-qubit state occupies indices [0, 2).
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "rusamp/rng.hpp"

namespace rusamp {

using Complex = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;

/// Square complex matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t dim);
    Matrix(std::size_t dim, std::vector<Complex> entries);

    static Matrix identity(std::size_t dim);
    static Matrix diagonal(std::span<const Complex> diag);

    std::size_t dim() const { return dim_; }
    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
    std::span<const Complex> entries() const { return data_; }

    Matrix adjoint() const;
    /// max |(M^dagger M - I)_{rc}|
    double unitarity_residual() const;
    double max_abs_diff(const Matrix& other) const;

    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator*(Complex s, const Matrix& a);
    friend Matrix operator+(const Matrix& a, const Matrix& b);
    friend Matrix operator-(const Matrix& a, const Matrix& b);

private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

/// A Matrix verified unitary on construction. Products, adjoints and tensor
/// products of unitaries are unitary by construction and skip the check.
class UnitaryMatrix {
public:
    /// Throws std::invalid_argument if the unitarity residual exceeds tol.
    explicit UnitaryMatrix(Matrix m, double tol = kUnitaryTolerance);

    static UnitaryMatrix identity(std::size_t dim);
    /// Diagonal matrix of unit-modulus entries.
    static UnitaryMatrix phases(std::span<const double> angles);

    const Matrix& matrix() const { return m_; }
    std::size_t dim() const { return m_.dim(); }
    const Complex& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

    UnitaryMatrix adjoint() const;
    /// Multiply by a global phase e^{i angle}.
    UnitaryMatrix with_phase(double angle) const;

    friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b);
    friend UnitaryMatrix operator-(const UnitaryMatrix& a);

private:
    struct Trusted {};
    UnitaryMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
    friend UnitaryMatrix tensor(const UnitaryMatrix&, const UnitaryMatrix&);

    Matrix m_;
};

/// Normalized state of num_qubits qubits.
class StateVector {
public:
    static StateVector basis(int num_qubits, std::size_t index);
    /// Amplitudes must already be normalized within kNormTolerance.
    static StateVector from_amplitudes(std::vector<Complex> amps);
    /// Rescales to unit norm; throws on a (numerically) zero vector.
    static StateVector normalize(std::vector<Complex> amps);
    /// Haar-random pure state.
    static StateVector random(int num_qubits, RngStream& rng);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const Complex> amplitudes() const { return amps_; }
    Complex operator[](std::size_t i) const { return amps_[i]; }

private:
    StateVector(int n, std::vector<Complex> amps) : num_qubits_(n), amps_(std::move(amps)) {}
    int num_qubits_ = 0;
    std::vector<Complex> amps_;
};

Matrix tensor(const Matrix& a, const Matrix& b);
UnitaryMatrix tensor(const UnitaryMatrix& a, const UnitaryMatrix& b);
StateVector tensor(const StateVector& a, const StateVector& b);

/// u * s. Throws std::invalid_argument on dimension mismatch.
StateVector apply(const UnitaryMatrix& u, const StateVector& s);

/// Raw matrix-vector product, skipping zero input amplitudes.
std::vector<Complex> multiply(const Matrix& m, std::span<const Complex> v);

struct AncillaMeasurement {
    std::size_t outcome;
    StateVector collapsed;  // full register, ancillas in |outcome>
    double probability;
};

/// Projective measurement of the leading m qubits in the computational basis.
AncillaMeasurement measure_ancillas(const StateVector& s, int m, RngStream& rng);

/// Squared norm of each ancilla block; entry i is the probability of outcome i.
std::vector<double> ancilla_block_probabilities(const StateVector& s, int m);

/// State of the non-ancilla qubits once the ancillas are known to be in |outcome>.
StateVector remaining_register(const StateVector& collapsed, int m, std::size_t outcome);

/// Unitary whose leading columns are `cols` verbatim; the rest are seeded
/// random vectors orthonormalized against everything before them.
/// Throws std::invalid_argument if cols are not orthonormal within 1e-10.
UnitaryMatrix complete_isometry(std::span<const std::vector<Complex>> cols, std::size_t dim,
                                RngStream& rng);

/// |<a|b>|^2
double fidelity(const StateVector& a, const StateVector& b);

/// <a|b>
Complex inner(std::span<const Complex> a, std::span<const Complex> b);

namespace gates {
UnitaryMatrix pauli_x();
UnitaryMatrix pauli_y();
UnitaryMatrix pauli_z();
UnitaryMatrix hadamard();
/// exp(-i angle Y)
UnitaryMatrix y_rotation(double angle);
/// Haar-random unitary of the given dimension.
UnitaryMatrix random_unitary(std::size_t dim, RngStream& rng);
}  // namespace gates

}  // namespace rusamp
