#include "rusamp/distortion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rusamp/parallel.hpp"

namespace rusamp {

namespace {

void require_distribution(std::span<const double> p, const char* what) {
    if (p.size() < 2 || !std::has_single_bit(p.size()))
        throw std::invalid_argument(std::string(what) + ": length must be a power of two >= 2");
    double sum = 0.0;
    for (double x : p) {
        if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument(std::string(what) + ": negative entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kNormTolerance)
        throw std::invalid_argument(std::string(what) + ": entries must sum to 1");
}

// Welford accumulator with Chan's merge, so chunk results combine exactly in order.
struct RunningStats {
    double n = 0.0, mean = 0.0, m2 = 0.0;

    void push(double x) {
        n += 1.0;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const RunningStats& o) {
        if (o.n == 0.0) return;
        const double total = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * n * o.n / total;
        n = total;
    }
};

constexpr int kChunkTrials = 1000;

}  // namespace

// ---- operators ---------------------------------------------------------------------

UnitaryMatrix build_distorter(std::span<const double> gammas, std::uint64_t seed) {
    require_distribution(gammas, "build_distorter");
    if (gammas.size() == 2) {
        const double theta = std::asin(std::sqrt(gammas[0]));
        return gates::y_rotation(std::numbers::pi / 2 - theta);
    }
    std::vector<Complex> col(gammas.size());
    for (std::size_t i = 0; i < gammas.size(); ++i) col[i] = std::sqrt(gammas[i]);
    const StateVector v = StateVector::normalize(col);
    const std::vector<std::vector<Complex>> cols = {{v.amplitudes().begin(), v.amplitudes().end()}};
    RngStream rng(seed);
    return complete_isometry(cols, gammas.size(), rng);
}

ConditionalCircuit::ConditionalCircuit(RusCircuit base, std::optional<std::vector<double>> gammas,
                                       UnitaryMatrix b_matrix)
    : base_(std::move(base)), gammas_(std::move(gammas)), b_(std::move(b_matrix)) {
    if (gammas_) {
        require_distribution(*gammas_, "ConditionalCircuit");
        if (gammas_->size() != base_.spec().outcomes())
            throw std::invalid_argument("ConditionalCircuit: need one gamma per ancilla outcome");
    }
    if (b_.dim() != 2 * base_.dim()) throw std::invalid_argument("ConditionalCircuit: B must add one control qubit");
}

std::vector<double> ConditionalCircuit::effective_gammas() const {
    if (gammas_) return *gammas_;
    std::vector<double> g(base_.spec().outcomes(), 0.0);
    g[0] = 1.0;
    return g;
}

ConditionalCircuit build_conditional(const RusCircuit& base, std::optional<std::vector<double>> gammas,
                                     std::uint64_t seed) {
    const std::size_t n = base.dim();
    Matrix idle = Matrix::identity(n);
    if (gammas) {
        if (gammas->size() != base.spec().outcomes())
            throw std::invalid_argument("build_conditional: need one gamma per ancilla outcome");
        idle = tensor(build_distorter(*gammas, seed), UnitaryMatrix::identity(2)).matrix();
    }
    const Matrix& a = base.a_matrix().matrix();
    Matrix b(2 * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            b(2 * r, 2 * c) = idle(r, c);
            b(2 * r + 1, 2 * c + 1) = a(r, c);
        }
    return ConditionalCircuit(base, std::move(gammas), UnitaryMatrix(std::move(b)));
}

// ---- closed forms ---------------------------------------------------------------------

void DistortionConfig::validate() const {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kNormTolerance)
        throw std::invalid_argument("DistortionConfig: |alpha|^2 + |beta|^2 must be 1");
    if (psi0.num_qubits() != 1 || psi1.num_qubits() != 1)
        throw std::invalid_argument("DistortionConfig: data states must be single-qubit");
    if (trials < 1) throw std::invalid_argument("DistortionConfig: trials must be >= 1");
    if (max_attempts < 1) throw std::invalid_argument("DistortionConfig: max_attempts must be >= 1");
}

StateVector conditional_input(const DistortionConfig& cfg) {
    std::vector<Complex> amps(4);
    for (std::size_t d = 0; d < 2; ++d) {
        amps[2 * d] = cfg.alpha * cfg.psi0[d];
        amps[2 * d + 1] = cfg.beta * cfg.psi1[d];
    }
    return StateVector::normalize(std::move(amps));
}

StateVector ideal_conditional_state(const ConditionalCircuit& cc, const DistortionConfig& cfg) {
    const StateVector u_psi1 = apply(cc.base().spec().target, cfg.psi1);
    std::vector<Complex> amps(4);
    for (std::size_t d = 0; d < 2; ++d) {
        amps[2 * d] = cfg.alpha * cfg.psi0[d];
        amps[2 * d + 1] = cfg.beta * u_psi1[d];
    }
    return StateVector::normalize(std::move(amps));
}

double single_shot_overlap(double lambda0) {
    if (!(lambda0 >= 0.0 && lambda0 <= 1.0)) throw std::invalid_argument("single_shot_overlap: lambda0 in [0, 1]");
    const double s = 1.0 + std::sqrt(lambda0);
    return s * s / (2.0 * (1.0 + lambda0));
}

namespace {

// 2 |alpha|^2 |beta|^2 for the normalized pair
double cross_weight(Complex alpha, Complex beta) {
    const double a2 = std::norm(alpha), b2 = std::norm(beta);
    const double total = a2 + b2;
    if (!(total > 0.0)) throw std::invalid_argument("average fidelity: alpha and beta both vanish");
    return 2.0 * (a2 / total) * (b2 / total);
}

}  // namespace

double average_fidelity_closed(Complex alpha, Complex beta, std::span<const double> gammas,
                               std::span<const double> lambdas) {
    require_distribution(gammas, "average_fidelity_closed (gammas)");
    require_distribution(lambdas, "average_fidelity_closed (lambdas)");
    if (gammas.size() != lambdas.size())
        throw std::invalid_argument("average_fidelity_closed: distributions differ in length");
    const double cross = cross_weight(alpha, beta);
    const double overlap0 = std::sqrt(gammas[0] * lambdas[0]);
    if (overlap0 == 0.0) return 1.0 - cross;
    double tail = 0.0;
    for (std::size_t i = 1; i < gammas.size(); ++i) tail += std::sqrt(gammas[i] * lambdas[i]);
    const double gamma = 1.0 - tail;
    if (!(gamma > 0.0)) throw std::domain_error("average_fidelity_closed: Gamma vanished with gamma0*lambda0 > 0");
    return 1.0 - cross * ((1.0 - overlap0) - tail) / gamma;
}

double average_fidelity_m1(Complex alpha, Complex beta, double gamma0, double lambda0) {
    if (!(gamma0 >= 0.0 && gamma0 <= 1.0 && lambda0 >= 0.0 && lambda0 <= 1.0))
        throw std::invalid_argument("average_fidelity_m1: probabilities must lie in [0, 1]");
    const double cross = cross_weight(alpha, beta);
    const double overlap0 = std::sqrt(gamma0 * lambda0);
    if (overlap0 == 0.0) return 1.0 - cross;
    const double tail = std::sqrt((1.0 - gamma0) * (1.0 - lambda0));
    return 1.0 - cross * ((1.0 - overlap0) - tail) / (1.0 - tail);
}

// ---- simulation --------------------------------------------------------------------------

RunRecord simulate_conditional_rus(const ConditionalCircuit& cc, const DistortionConfig& cfg, RngStream& rng) {
    const int m = cc.m();
    const std::size_t outcomes = std::size_t{1} << m;
    const Matrix& b = cc.b_matrix().matrix();
    const RusSpec& spec = cc.base().spec();

    const StateVector input = conditional_input(cfg);
    std::vector<Complex> current(input.amplitudes().begin(), input.amplitudes().end());
    std::vector<Complex> full(b.dim());
    std::vector<double> probs(outcomes);
    RunRecord rec;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        std::fill(full.begin(), full.end(), Complex{});
        std::copy(current.begin(), current.end(), full.begin());
        const std::vector<Complex> out = multiply(b, full);

        double total = 0.0;
        for (std::size_t i = 0; i < outcomes; ++i) {
            probs[i] = std::norm(out[4 * i]) + std::norm(out[4 * i + 1]) + std::norm(out[4 * i + 2]) +
                       std::norm(out[4 * i + 3]);
            total += probs[i];
        }
        const double u = rng.uniform() * total;
        std::size_t outcome = outcomes - 1;
        double cum = 0.0;
        for (std::size_t i = 0; i < outcomes; ++i) {
            cum += probs[i];
            if (u < cum) {
                outcome = i;
                break;
            }
        }
        while (probs[outcome] == 0.0 && outcome > 0) --outcome;
        rec.outcomes.push_back(outcome);

        const double inv = 1.0 / std::sqrt(probs[outcome]);
        for (std::size_t k = 0; k < 4; ++k) current[k] = out[4 * outcome + k] * inv;
        if (outcome == 0) {
            rec.attempts = attempt;
            rec.final_state = StateVector::normalize(current);
            return rec;
        }
        // controlled R_i^dagger: data amplitudes sit at indices 1 and 3 when control = 1
        const UnitaryMatrix& r = spec.branch_gate(outcome);
        const Complex d0 = current[1], d1 = current[3];
        current[1] = std::conj(r(0, 0)) * d0 + std::conj(r(1, 0)) * d1;
        current[3] = std::conj(r(0, 1)) * d0 + std::conj(r(1, 1)) * d1;
    }
    throw MaxAttemptsExceeded(cfg.max_attempts);
}

FidelityEstimate monte_carlo_fidelity(const ConditionalCircuit& cc, const DistortionConfig& cfg) {
    cfg.validate();
    const StateVector ideal = ideal_conditional_state(cc, cfg);
    const std::size_t chunks = (static_cast<std::size_t>(cfg.trials) + kChunkTrials - 1) / kChunkTrials;
    std::vector<RunningStats> stats(chunks);
    std::vector<int> exhausted(chunks, 0);
    const RngStream root(cfg.seed);

    parallel_for(chunks, [&](std::size_t chunk) {
        RngStream rng = root.substream(chunk);
        const int begin = static_cast<int>(chunk) * kChunkTrials;
        const int end = std::min(cfg.trials, begin + kChunkTrials);
        for (int t = begin; t < end; ++t) {
            try {
                const RunRecord rec = simulate_conditional_rus(cc, cfg, rng);
                stats[chunk].push(fidelity(ideal, rec.final_state));
            } catch (const MaxAttemptsExceeded&) {
                ++exhausted[chunk];
            }
        }
    });

    RunningStats total;
    FidelityEstimate est;
    for (std::size_t c = 0; c < chunks; ++c) {
        total.merge(stats[c]);
        est.exhausted += exhausted[c];
    }
    est.trials = static_cast<int>(total.n);
    est.mean = std::clamp(total.mean, 0.0, 1.0);
    if (total.n > 1.0) est.std_error = std::sqrt(std::max(0.0, total.m2 / (total.n - 1.0)) / total.n);
    return est;
}

// ---- figures -----------------------------------------------------------------------------

std::vector<double> lambda_grid() {
    constexpr int kPoints = 50;
    std::vector<double> g(kPoints);
    for (int i = 0; i < kPoints; ++i) g[i] = 0.02 + (0.98 - 0.02) * i / (kPoints - 1);
    return g;
}

std::vector<double> failure_log_grid() {
    constexpr int kPoints = 51;
    std::vector<double> g(kPoints);
    for (int i = 0; i < kPoints; ++i) g[i] = std::pow(10.0, -6.0 + 5.0 * i / (kPoints - 1));
    return g;
}

std::vector<double> random_tail_distribution(int m, double p0, RngStream& rng) {
    if (m < 1) throw std::invalid_argument("random_tail_distribution: m must be >= 1");
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("random_tail_distribution: p0 in [0, 1]");
    const std::size_t n = std::size_t{1} << m;
    std::vector<double> p(n, 0.0);
    p[0] = p0;
    double sum = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        p[i] = rng.uniform_open();
        sum += p[i];
    }
    const double scale = (1.0 - p0) / sum;
    for (std::size_t i = 1; i < n; ++i) p[i] *= scale;
    return p;
}

namespace {

struct CurveSpec {
    const char* id;
    double (*gamma0)(double lambda0);
};

double gamma0_one(double) { return 1.0; }
double gamma0_higher(double l) { return std::min(1.0, l * (1.0 + kRelativeMismatch)); }
double gamma0_lower(double l) { return l * (1.0 - kRelativeMismatch); }
double gamma0_matched(double l) { return l; }

// Mean and population standard deviation of the closed-form fidelity over
// random failure tails at fixed (gamma0, lambda0).
FigureRow sampled_point(double x, const char* curve, double gamma0, double lambda0, int m, RngStream rng,
                        std::uint64_t seed) {
    const Complex amp(1.0 / std::sqrt(2.0), 0.0);
    RunningStats s;
    for (int d = 0; d < kFigureDraws; ++d) {
        const std::vector<double> gammas = random_tail_distribution(m, gamma0, rng);
        const std::vector<double> lambdas = random_tail_distribution(m, lambda0, rng);
        s.push(average_fidelity_closed(amp, amp, gammas, lambdas));
    }
    return {x, curve, s.mean, std::sqrt(s.m2 / s.n), kFigureDraws, seed};
}

}  // namespace

std::vector<FigureRow> figure1_data(Fig1Panel panel, std::uint64_t seed) {
    static constexpr CurveSpec curves[] = {{"gamma0_one", gamma0_one},
                                           {"gamma0_higher", gamma0_higher},
                                           {"gamma0_lower", gamma0_lower},
                                           {"gamma0_matched", gamma0_matched}};
    const std::vector<double> grid = lambda_grid();
    const Complex amp(1.0 / std::sqrt(2.0), 0.0);
    std::vector<FigureRow> rows(grid.size() * std::size(curves));
    const RngStream root(seed);
    parallel_for(rows.size(), [&](std::size_t idx) {
        const std::size_t g = idx / std::size(curves), c = idx % std::size(curves);
        const double lambda0 = grid[g];
        const double gamma0 = curves[c].gamma0(lambda0);
        if (panel == Fig1Panel::left) {
            rows[idx] = {lambda0, curves[c].id, average_fidelity_m1(amp, amp, gamma0, lambda0), 0.0, 1, seed};
        } else {
            rows[idx] = sampled_point(lambda0, curves[c].id, gamma0, lambda0, 4, root.substream(idx), seed);
        }
    });
    return rows;
}

std::vector<FigureRow> figure3_data(std::uint64_t seed) {
    static constexpr CurveSpec curves[] = {
        {"gamma0_one", gamma0_one}, {"gamma0_lower", gamma0_lower}, {"gamma0_matched", gamma0_matched}};
    const std::vector<double> grid = failure_log_grid();
    std::vector<FigureRow> rows(grid.size() * std::size(curves));
    const RngStream root(seed);
    parallel_for(rows.size(), [&](std::size_t idx) {
        const std::size_t g = idx / std::size(curves), c = idx % std::size(curves);
        const double eps = grid[g];
        const double lambda0 = 1.0 - eps;
        rows[idx] = sampled_point(eps, curves[c].id, curves[c].gamma0(lambda0), lambda0, 4, root.substream(idx), seed);
    });
    return rows;
}

}  // namespace rusamp
