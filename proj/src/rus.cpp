#include "rusamp/rus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rusamp {

void RusSpec::validate() const {
    if (m < 1 || m > 10) throw std::invalid_argument("RusSpec: m must be in [1, 10]");
    if (lambdas.size() != outcomes())
        throw std::invalid_argument("RusSpec: expected " + std::to_string(outcomes()) + " lambdas, got " +
                                    std::to_string(lambdas.size()));
    double sum = 0.0;
    for (double l : lambdas) {
        if (!std::isfinite(l) || l < 0.0) throw std::invalid_argument("RusSpec: lambdas must be non-negative");
        sum += l;
    }
    if (std::abs(sum - 1.0) > kNormTolerance)
        throw std::invalid_argument("RusSpec: lambdas sum to " + std::to_string(sum) + ", expected 1");
    if (target.dim() != 2) throw std::invalid_argument("RusSpec: target must be a single-qubit gate");
    if (recoveries.size() != outcomes() - 1)
        throw std::invalid_argument("RusSpec: expected " + std::to_string(outcomes() - 1) + " recovery gates");
    for (const auto& r : recoveries)
        if (r.dim() != 2) throw std::invalid_argument("RusSpec: recovery gates must be single-qubit");
}

RusSpec make_rus_spec(int m, std::vector<double> lambdas, UnitaryMatrix target, std::uint64_t seed,
                      std::vector<UnitaryMatrix> recoveries) {
    RusSpec spec;
    spec.m = m;
    spec.lambdas = std::move(lambdas);
    spec.target = std::move(target);
    spec.seed = seed;
    if (recoveries.empty() && m >= 1 && m <= 10)
        recoveries.assign((std::size_t{1} << m) - 1, UnitaryMatrix::identity(2));
    spec.recoveries = std::move(recoveries);
    spec.validate();
    return spec;
}

// ---- RusCircuit ----------------------------------------------------------------

RusCircuit::RusCircuit(RusSpec spec, UnitaryMatrix a_matrix) : spec_(std::move(spec)), a_(std::move(a_matrix)) {
    spec_.validate();
    if (a_.dim() != (std::size_t{2} << spec_.m))
        throw std::invalid_argument("RusCircuit: A must act on m+1 qubits");
    const double r = block_residual();
    if (!(r <= kUnitaryTolerance))
        throw std::invalid_argument("RusCircuit: A does not match the spec on the |0^m> block (residual " +
                                    std::to_string(r) + ")");
}

double RusCircuit::block_residual() const {
    double worst = 0.0;
    for (std::size_t d = 0; d < 2; ++d)
        for (std::size_t i = 0; i < spec_.outcomes(); ++i) {
            const double amp = std::sqrt(spec_.lambdas[i]);
            const UnitaryMatrix& w = spec_.branch_gate(i);
            for (std::size_t dr = 0; dr < 2; ++dr) {
                const Complex expect = amp * w(dr, d);
                worst = std::max(worst, std::abs(a_(2 * i + dr, d) - expect));
            }
        }
    return worst;
}

UnitaryMatrix nearest_unitary_2x2(const Matrix& m) {
    if (m.dim() != 2) throw std::invalid_argument("nearest_unitary_2x2: expected a 2x2 matrix");
    // For M = U P, M + e^{i arg det M} adj(M)^dagger = tr(P) U.
    const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const Complex ph = std::abs(det) > 0.0 ? det / std::abs(det) : Complex(1.0);
    Matrix adj_dag(2);
    adj_dag(0, 0) = std::conj(m(1, 1));
    adj_dag(0, 1) = -std::conj(m(1, 0));
    adj_dag(1, 0) = -std::conj(m(0, 1));
    adj_dag(1, 1) = std::conj(m(0, 0));
    Matrix sum = m + ph * adj_dag;
    double fro = 0.0;
    for (const Complex& x : sum.entries()) fro += std::norm(x);
    const double tr = std::sqrt(fro / 2.0);
    if (!(tr > 1e-300)) return UnitaryMatrix::identity(2);
    return UnitaryMatrix(Complex(1.0 / tr) * sum, 1e-8);
}

RusCircuit RusCircuit::from_matrix(UnitaryMatrix a_matrix, int m, std::uint64_t seed) {
    if (m < 1 || a_matrix.dim() != (std::size_t{2} << m))
        throw std::invalid_argument("from_matrix: A must act on m+1 qubits");
    const std::size_t outcomes = std::size_t{1} << m;
    std::vector<double> lambdas(outcomes);
    std::vector<Matrix> blocks;
    blocks.reserve(outcomes);
    for (std::size_t i = 0; i < outcomes; ++i) {
        Matrix k(2);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c) k(r, c) = a_matrix(2 * i + r, c);
        // K_i^dagger K_i must be proportional to the identity for the
        // outcome probabilities to be independent of the data state.
        const Matrix g = k.adjoint() * k;
        const double l = 0.5 * (g(0, 0).real() + g(1, 1).real());
        if (std::abs(g(0, 0).real() - g(1, 1).real()) > kUnitaryTolerance || std::abs(g(0, 1)) > kUnitaryTolerance)
            throw std::invalid_argument("from_matrix: outcome " + std::to_string(i) +
                                        " has a data-dependent probability; not an RUS circuit");
        lambdas[i] = std::max(0.0, l);
        blocks.push_back(std::move(k));
    }
    double sum = 0.0;
    for (double l : lambdas) sum += l;
    for (double& l : lambdas) l /= sum;
    if (!(lambdas[0] > 0.0)) throw std::invalid_argument("from_matrix: success probability is zero");

    RusSpec spec;
    spec.m = m;
    spec.seed = seed;
    spec.lambdas = std::move(lambdas);
    spec.target = nearest_unitary_2x2(blocks[0]);
    spec.recoveries.clear();
    for (std::size_t i = 1; i < outcomes; ++i) spec.recoveries.push_back(nearest_unitary_2x2(blocks[i]));
    return RusCircuit(std::move(spec), std::move(a_matrix));
}

MaxAttemptsExceeded::MaxAttemptsExceeded(int attempts)
    : std::runtime_error("repeat-until-success did not succeed within " + std::to_string(attempts) + " attempts"),
      attempts_(attempts) {}

// ---- operations ----------------------------------------------------------------

RusCircuit build_rus_unitary(const RusSpec& spec) {
    spec.validate();
    const std::size_t outcomes = spec.outcomes();
    std::vector<Complex> first(outcomes);
    for (std::size_t i = 0; i < outcomes; ++i) first[i] = std::sqrt(spec.lambdas[i]);
    // sqrt(lambda) is unit-norm only to rounding; renormalize before completion
    const StateVector col = StateVector::normalize(first);
    const std::vector<std::vector<Complex>> cols = {std::vector<Complex>(col.amplitudes().begin(), col.amplitudes().end())};
    RngStream rng(spec.seed);
    const UnitaryMatrix d = complete_isometry(cols, outcomes, rng);

    const std::size_t dim = 2 * outcomes;
    Matrix a(dim);
    for (std::size_t i = 0; i < outcomes; ++i) {
        const UnitaryMatrix& w = spec.branch_gate(i);
        for (std::size_t k = 0; k < outcomes; ++k) {
            const Complex dik = d(i, k);
            for (std::size_t dr = 0; dr < 2; ++dr)
                for (std::size_t dc = 0; dc < 2; ++dc) a(2 * i + dr, 2 * k + dc) = w(dr, dc) * dik;
        }
    }
    return RusCircuit(spec, UnitaryMatrix(std::move(a)));
}

StateVector with_fresh_ancillas(const StateVector& psi, int m) {
    std::vector<Complex> amps(psi.dim() << m);
    std::copy(psi.amplitudes().begin(), psi.amplitudes().end(), amps.begin());
    return StateVector::from_amplitudes(std::move(amps));
}

double success_probability(const RusCircuit& c, const StateVector& psi) {
    if (psi.num_qubits() != 1) throw std::invalid_argument("success_probability: psi must be single-qubit");
    const std::vector<Complex> out = multiply(c.a_matrix().matrix(), with_fresh_ancillas(psi, c.m()).amplitudes());
    return std::norm(out[0]) + std::norm(out[1]);
}

RunRecord run_rus(const RusCircuit& c, const StateVector& psi, RngStream& rng, int max_attempts) {
    if (max_attempts < 1) throw std::invalid_argument("run_rus: max_attempts must be >= 1");
    if (psi.num_qubits() != 1) throw std::invalid_argument("run_rus: psi must be single-qubit");
    RunRecord rec;
    StateVector current = psi;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        const StateVector out = apply(c.a_matrix(), with_fresh_ancillas(current, c.m()));
        const AncillaMeasurement meas = measure_ancillas(out, c.m(), rng);
        rec.outcomes.push_back(meas.outcome);
        const StateVector data = remaining_register(meas.collapsed, c.m(), meas.outcome);
        if (meas.outcome == 0) {
            rec.attempts = attempt;
            rec.final_state = data;
            return rec;
        }
        current = apply(c.spec().branch_gate(meas.outcome).adjoint(), data);
    }
    throw MaxAttemptsExceeded(max_attempts);
}

RusCircuit inverse_rus(const RusCircuit& c) {
    const RusCircuit derived = RusCircuit::from_matrix(c.a_matrix().adjoint(), c.m(), c.spec().seed);
    RusSpec spec = derived.spec();
    spec.target = c.spec().target.adjoint();
    return RusCircuit(std::move(spec), derived.a_matrix());
}

}  // namespace rusamp
