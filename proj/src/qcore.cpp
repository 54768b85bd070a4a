#include "rusamp/qcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rusamp {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

int log2_exact(std::size_t n) { return std::countr_zero(n); }

double norm_squared(std::span<const Complex> v) {
    double s = 0.0;
    for (const Complex& a : v) s += std::norm(a);
    return s;
}

}  // namespace

// ---- Matrix ----------------------------------------------------------------

Matrix::Matrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

Matrix::Matrix(std::size_t dim, std::vector<Complex> entries) : dim_(dim), data_(std::move(entries)) {
    if (data_.size() != dim * dim) {
        throw std::invalid_argument("Matrix: expected " + std::to_string(dim * dim) + " entries, got " +
                                    std::to_string(data_.size()));
    }
}

Matrix Matrix::identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const Complex> diag) {
    Matrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

double Matrix::unitarity_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) s += std::conj((*this)(k, i)) * (*this)(k, j);
            if (i == j) s -= 1.0;
            worst = std::max(worst, std::abs(s));
        }
    }
    return worst;
}

double Matrix::max_abs_diff(const Matrix& other) const {
    if (other.dim_ != dim_) throw std::invalid_argument("max_abs_diff: dimension mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) worst = std::max(worst, std::abs(data_[i] - other.data_[i]));
    return worst;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("matrix product: dimension mismatch");
    const std::size_t n = a.dim_;
    Matrix out(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex x = a(r, k);
            if (x == Complex{}) continue;
            for (std::size_t c = 0; c < n; ++c) out(r, c) += x * b(k, c);
        }
    }
    return out;
}

Matrix operator*(Complex s, const Matrix& a) {
    Matrix out = a;
    for (Complex& x : out.data_) x *= s;
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("matrix sum: dimension mismatch");
    Matrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("matrix difference: dimension mismatch");
    Matrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
    return out;
}

// ---- UnitaryMatrix -----------------------------------------------------------

UnitaryMatrix::UnitaryMatrix(Matrix m, double tol) : m_(std::move(m)) {
    const double r = m_.unitarity_residual();
    if (!(r <= tol)) {
        throw std::invalid_argument("matrix is not unitary (residual " + std::to_string(r) + ")");
    }
}

UnitaryMatrix UnitaryMatrix::identity(std::size_t dim) { return {Matrix::identity(dim), Trusted{}}; }

UnitaryMatrix UnitaryMatrix::phases(std::span<const double> angles) {
    std::vector<Complex> diag;
    diag.reserve(angles.size());
    for (double a : angles) diag.push_back(std::polar(1.0, a));
    return {Matrix::diagonal(diag), Trusted{}};
}

UnitaryMatrix UnitaryMatrix::adjoint() const { return {m_.adjoint(), Trusted{}}; }

UnitaryMatrix UnitaryMatrix::with_phase(double angle) const { return {std::polar(1.0, angle) * m_, Trusted{}}; }

UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    return {a.m_ * b.m_, UnitaryMatrix::Trusted{}};
}

UnitaryMatrix operator-(const UnitaryMatrix& a) { return {Complex(-1.0) * a.m_, UnitaryMatrix::Trusted{}}; }

// ---- StateVector ---------------------------------------------------------------

StateVector StateVector::basis(int num_qubits, std::size_t index) {
    if (num_qubits < 1 || num_qubits > 20) throw std::invalid_argument("basis: unsupported qubit count");
    const std::size_t dim = std::size_t{1} << num_qubits;
    if (index >= dim) throw std::invalid_argument("basis: index out of range");
    std::vector<Complex> amps(dim);
    amps[index] = 1.0;
    return {num_qubits, std::move(amps)};
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amps) {
    if (!is_power_of_two(amps.size()) || amps.size() < 2)
        throw std::invalid_argument("state length must be a power of two >= 2");
    for (const Complex& a : amps)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw std::invalid_argument("state has non-finite amplitude");
    const double n2 = norm_squared(amps);
    if (std::abs(n2 - 1.0) > kNormTolerance)
        throw std::invalid_argument("state is not normalized (norm^2 = " + std::to_string(n2) + ")");
    const int n = log2_exact(amps.size());
    return {n, std::move(amps)};
}

StateVector StateVector::normalize(std::vector<Complex> amps) {
    const double n2 = norm_squared(amps);
    if (!(n2 > 1e-300) || !std::isfinite(n2)) throw std::invalid_argument("cannot normalize a zero vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (Complex& a : amps) a *= inv;
    return from_amplitudes(std::move(amps));
}

StateVector StateVector::random(int num_qubits, RngStream& rng) {
    const std::size_t dim = std::size_t{1} << num_qubits;
    std::vector<Complex> amps(dim);
    for (Complex& a : amps) {
        const double re = rng.normal();
        a = Complex(re, rng.normal());
    }
    return normalize(std::move(amps));
}

// ---- products -------------------------------------------------------------------

Matrix tensor(const Matrix& a, const Matrix& b) {
    const std::size_t na = a.dim(), nb = b.dim(), n = na * nb;
    Matrix out(n);
    for (std::size_t ra = 0; ra < na; ++ra)
        for (std::size_t ca = 0; ca < na; ++ca) {
            const Complex x = a(ra, ca);
            if (x == Complex{}) continue;
            for (std::size_t rb = 0; rb < nb; ++rb)
                for (std::size_t cb = 0; cb < nb; ++cb) out(ra * nb + rb, ca * nb + cb) = x * b(rb, cb);
        }
    return out;
}

UnitaryMatrix tensor(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    return {tensor(a.m_, b.m_), UnitaryMatrix::Trusted{}};
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    std::vector<Complex> amps(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) amps[i * b.dim() + j] = a[i] * b[j];
    return StateVector::normalize(std::move(amps));
}

std::vector<Complex> multiply(const Matrix& m, std::span<const Complex> v) {
    const std::size_t n = m.dim();
    if (v.size() != n) throw std::invalid_argument("matrix-vector product: dimension mismatch");
    std::vector<Complex> out(n);
    for (std::size_t c = 0; c < n; ++c) {
        const Complex x = v[c];
        if (x == Complex{}) continue;
        for (std::size_t r = 0; r < n; ++r) out[r] += m(r, c) * x;
    }
    return out;
}

StateVector apply(const UnitaryMatrix& u, const StateVector& s) {
    if (u.dim() != s.dim()) {
        throw std::invalid_argument("apply: operator dimension " + std::to_string(u.dim()) +
                                    " does not match state dimension " + std::to_string(s.dim()));
    }
    // Unitarity keeps the norm; renormalizing only removes rounding drift.
    return StateVector::normalize(multiply(u.matrix(), s.amplitudes()));
}

// ---- measurement ----------------------------------------------------------------

std::vector<double> ancilla_block_probabilities(const StateVector& s, int m) {
    if (m < 1 || m >= s.num_qubits())
        throw std::invalid_argument("measure_ancillas: need at least one non-ancilla qubit");
    const std::size_t blocks = std::size_t{1} << m;
    const std::size_t block = s.dim() / blocks;
    std::vector<double> probs(blocks, 0.0);
    for (std::size_t i = 0; i < blocks; ++i)
        probs[i] = norm_squared(s.amplitudes().subspan(i * block, block));
    return probs;
}

AncillaMeasurement measure_ancillas(const StateVector& s, int m, RngStream& rng) {
    const std::vector<double> probs = ancilla_block_probabilities(s, m);
    double total = 0.0;
    for (double p : probs) total += p;
    const double u = rng.uniform() * total;
    std::size_t outcome = probs.size();
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) {
            outcome = i;
            break;
        }
    }
    if (outcome == probs.size()) {
        // rounding at the top of the cumulative sum: take the last populated block
        for (std::size_t i = probs.size(); i-- > 0;)
            if (probs[i] > 0.0) {
                outcome = i;
                break;
            }
    }
    const std::size_t block = s.dim() >> m;
    std::vector<Complex> amps(s.dim());
    std::copy_n(s.amplitudes().begin() + outcome * block, block, amps.begin() + outcome * block);
    const double p = probs[outcome] / total;
    return {outcome, StateVector::normalize(std::move(amps)), p};
}

StateVector remaining_register(const StateVector& collapsed, int m, std::size_t outcome) {
    const std::size_t block = collapsed.dim() >> m;
    std::vector<Complex> amps(collapsed.amplitudes().begin() + outcome * block,
                              collapsed.amplitudes().begin() + (outcome + 1) * block);
    return StateVector::normalize(std::move(amps));
}

// ---- isometry completion --------------------------------------------------------

UnitaryMatrix complete_isometry(std::span<const std::vector<Complex>> cols, std::size_t dim, RngStream& rng) {
    if (cols.size() > dim) throw std::invalid_argument("complete_isometry: more columns than dimension");
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i].size() != dim) throw std::invalid_argument("complete_isometry: column length mismatch");
        for (std::size_t j = 0; j <= i; ++j) {
            const Complex g = inner(cols[j], cols[i]);
            const double expect = (i == j) ? 1.0 : 0.0;
            if (std::abs(g - expect) > kUnitaryTolerance)
                throw std::invalid_argument("complete_isometry: input columns are not orthonormal");
        }
    }

    std::vector<std::vector<Complex>> basis(cols.begin(), cols.end());
    while (basis.size() < dim) {
        std::vector<Complex> v(dim);
        for (Complex& x : v) {
            const double re = rng.normal();
            x = Complex(re, rng.normal());
        }
        // two passes of modified Gram-Schmidt
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                const Complex proj = inner(b, v);
                for (std::size_t k = 0; k < dim; ++k) v[k] -= proj * b[k];
            }
        const double n = std::sqrt(norm_squared(v));
        if (n < 1e-6) continue;  // draw landed in the span; redraw
        for (Complex& x : v) x /= n;
        basis.push_back(std::move(v));
    }

    Matrix m(dim);
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < dim; ++r) m(r, c) = basis[c][r];
    return UnitaryMatrix(std::move(m));
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner product: dimension mismatch");
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    return std::min(1.0, std::norm(inner(a.amplitudes(), b.amplitudes())));
}

// ---- gates ----------------------------------------------------------------------

namespace gates {

UnitaryMatrix pauli_x() { return UnitaryMatrix(Matrix(2, {0.0, 1.0, 1.0, 0.0})); }

UnitaryMatrix pauli_y() {
    return UnitaryMatrix(Matrix(2, {0.0, Complex(0, -1), Complex(0, 1), 0.0}));
}

UnitaryMatrix pauli_z() { return UnitaryMatrix(Matrix(2, {1.0, 0.0, 0.0, -1.0})); }

UnitaryMatrix hadamard() {
    const double h = 1.0 / std::sqrt(2.0);
    return UnitaryMatrix(Matrix(2, {h, h, h, -h}));
}

UnitaryMatrix y_rotation(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return UnitaryMatrix(Matrix(2, {c, -s, s, c}));
}

UnitaryMatrix random_unitary(std::size_t dim, RngStream& rng) { return complete_isometry({}, dim, rng); }

}  // namespace gates

}  // namespace rusamp
