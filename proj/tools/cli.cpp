#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "rusamp/distortion.hpp"
#include "rusamp/oaa.hpp"
#include "rusamp/parallel.hpp"
#include "rusamp/rus.hpp"
#include "rusamp/serialize.hpp"
#include "rusamp/tcost.hpp"

namespace rusamp::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kMaxExhaustionRate = 1e-3;
constexpr std::uint64_t kDefaultFigureSeed = 20190601;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double parse_real(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (s.empty() || pos != s.size() || !std::isfinite(v))
        throw std::invalid_argument(std::string(what) + ": '" + s + "' is not a number");
    return v;
}

int parse_int(const std::string& s, const char* what) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (s.empty() || pos != s.size()) throw std::invalid_argument(std::string(what) + ": '" + s + "' is not an integer");
    return v;
}

struct Protocol {
    enum class Kind { none, standard, deterministic, pi3, fp };
    Kind kind = Kind::none;
    int j = 0;
    int k = 0;
    int sign = 1;
    double delta = 0.0;
    std::optional<double> w_bound;
};

Protocol parse_protocol(const std::string& text) {
    const std::vector<std::string> p = split(text, ':');
    Protocol out;
    if (p.empty()) throw std::invalid_argument("protocol: empty");
    const std::string& head = p[0];
    if (head == "none" && p.size() == 1) return out;
    if (head == "deterministic" && p.size() == 1) {
        out.kind = Protocol::Kind::deterministic;
        return out;
    }
    if (head == "standard" && p.size() == 2) {
        out.kind = Protocol::Kind::standard;
        out.j = parse_int(p[1], "protocol standard:J");
        if (out.j < 0) throw std::invalid_argument("protocol standard:J needs J >= 0");
        return out;
    }
    if (head == "pi3" && (p.size() == 2 || p.size() == 3)) {
        out.kind = Protocol::Kind::pi3;
        out.k = parse_int(p[1], "protocol pi3:K");
        if (out.k < 0) throw std::invalid_argument("protocol pi3:K needs K >= 0");
        if (p.size() == 3) {
            if (p[2] != "neg") throw std::invalid_argument("protocol pi3:K[:neg]: unknown suffix '" + p[2] + "'");
            out.sign = -1;
        }
        return out;
    }
    if (head == "fp" && (p.size() == 2 || p.size() == 3)) {
        out.kind = Protocol::Kind::fp;
        out.delta = parse_real(p[1], "protocol fp:DELTA");
        if (!(out.delta > 0.0 && out.delta < 1.0)) throw std::invalid_argument("protocol fp:DELTA needs 0 < DELTA < 1");
        if (p.size() == 3) {
            out.w_bound = parse_real(p[2], "protocol fp:DELTA:WBOUND");
            if (!(*out.w_bound > 0.0 && *out.w_bound <= 1.0))
                throw std::invalid_argument("protocol fp:DELTA:WBOUND needs 0 < WBOUND <= 1");
        }
        return out;
    }
    throw std::invalid_argument("protocol must be none, standard:J, deterministic, pi3:K[:neg] or fp:DELTA[:WBOUND]; got '" +
                                text + "'");
}

StateVector parse_psi(const std::string& text) {
    const double h = 1.0 / std::sqrt(2.0);
    if (text == "0") return StateVector::basis(1, 0);
    if (text == "1") return StateVector::basis(1, 1);
    if (text == "+") return StateVector::from_amplitudes({h, h});
    if (text == "-") return StateVector::from_amplitudes({h, -h});
    if (text == "+i") return StateVector::from_amplitudes({h, Complex(0, h)});
    if (text == "-i") return StateVector::from_amplitudes({h, Complex(0, -h)});
    const std::vector<std::string> p = split(text, ',');
    if (p.size() != 4)
        throw std::invalid_argument("psi must be 0, 1, +, -, +i, -i or re0,im0,re1,im1; got '" + text + "'");
    std::vector<Complex> amps = {{parse_real(p[0], "psi"), parse_real(p[1], "psi")},
                                 {parse_real(p[2], "psi"), parse_real(p[3], "psi")}};
    if (std::norm(amps[0]) + std::norm(amps[1]) == 0.0) throw std::invalid_argument("psi: zero vector");
    return StateVector::normalize(std::move(amps));
}

Json psi_to_json(const StateVector& psi) {
    return Json::array({Json::array({psi[0].real(), psi[0].imag()}), Json::array({psi[1].real(), psi[1].imag()})});
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::invalid_argument("cannot create output directory '" + dir.string() + "'");
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::invalid_argument("cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw std::invalid_argument("failed writing '" + path.string() + "'");
}

void write_with_manifest(const fs::path& dir, const std::string& stem, const std::string& csv,
                         const RunManifest& manifest) {
    write_file(dir / (stem + ".csv"), csv);
    write_file(dir / (stem + ".manifest.json"), manifest.to_json().dump(2) + "\n");
}

// ---- simulate ------------------------------------------------------------------------------

struct SimulateOptions {
    std::string spec_file;
    std::string protocol = "none";
    std::string psi = "0";
    int trials = 1000;
    std::uint64_t seed = 0;
    std::string out = ".";
    int max_attempts = kDefaultMaxAttempts;
};

struct TrialRow {
    int attempts = 0;
    std::vector<std::size_t> outcomes;
    double fidelity = 0.0;
    bool exhausted = false;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    if (o.trials < 1) throw std::invalid_argument("--trials must be >= 1");
    if (o.max_attempts < 1) throw std::invalid_argument("--max-attempts must be >= 1");
    std::ifstream f(o.spec_file);
    if (!f) throw std::invalid_argument("cannot read spec file '" + o.spec_file + "'");
    Json spec_json;
    try {
        spec_json = Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("spec file is not valid JSON: ") + e.what());
    }
    const RusSpec spec = rus_spec_from_json(spec_json);
    const Protocol proto = parse_protocol(o.protocol);
    const StateVector psi = parse_psi(o.psi);

    const RusCircuit base = build_rus_unitary(spec);
    Json plan_json = nullptr;
    RusCircuit circuit = base;
    switch (proto.kind) {
        case Protocol::Kind::none: break;
        case Protocol::Kind::standard:
            plan_json = to_json(plan_standard(base.lambda0(), proto.j));
            circuit = standard_compose(base, proto.j);
            break;
        case Protocol::Kind::deterministic: {
            const DeterministicPlan plan = plan_deterministic(base.lambda0());
            plan_json = to_json(plan);
            circuit = deterministic_compose(base, plan);
            break;
        }
        case Protocol::Kind::pi3: {
            const Pi3Plan plan{proto.k, proto.sign};
            plan_json = to_json(plan);
            circuit = pi3_compose(base, plan);
            break;
        }
        case Protocol::Kind::fp: {
            const int length = fp_length_for(proto.w_bound.value_or(base.lambda0()), proto.delta);
            const FixedPointPlan plan = fp_plan(length, proto.delta);
            plan_json = to_json(plan);
            circuit = fp_compose(base, plan);
            break;
        }
    }

    const StateVector ideal = apply(spec.target, psi);
    std::vector<TrialRow> rows(static_cast<std::size_t>(o.trials));
    const RngStream root(o.seed);
    parallel_for(rows.size(), [&](std::size_t t) {
        RngStream rng = root.substream(t);
        try {
            RunRecord rec = run_rus(circuit, psi, rng, o.max_attempts);
            rows[t] = {rec.attempts, std::move(rec.outcomes), fidelity(ideal, rec.final_state), false};
        } catch (const MaxAttemptsExceeded& e) {
            rows[t] = {e.attempts(), {}, 0.0, true};
        }
    });

    std::ostringstream trials_csv;
    trials_csv << "trial,attempts,outcomes,fidelity,exhausted\n";
    long long completed = 0, exhausted = 0, attempt_sum = 0;
    double fidelity_sum = 0.0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const TrialRow& r = rows[t];
        trials_csv << t << ',' << r.attempts << ',';
        for (std::size_t i = 0; i < r.outcomes.size(); ++i) trials_csv << (i ? ";" : "") << r.outcomes[i];
        trials_csv << ',' << (r.exhausted ? std::string() : format_real(r.fidelity)) << ',' << (r.exhausted ? 1 : 0)
                   << '\n';
        if (r.exhausted) {
            ++exhausted;
        } else {
            ++completed;
            attempt_sum += r.attempts;
            fidelity_sum += r.fidelity;
        }
    }

    const double before = success_probability(base, psi);
    const double after = success_probability(circuit, psi);
    const double phase = std::arg(success_amplitude(circuit, spec.target));
    const double mean_attempts = completed ? static_cast<double>(attempt_sum) / completed : 0.0;
    const double mean_fidelity = completed ? fidelity_sum / completed : 0.0;
    const double exhaustion_rate = static_cast<double>(exhausted) / o.trials;

    std::ostringstream summary_csv;
    summary_csv << "protocol,trials,completed,exhausted,mean_attempts,success_before,success_after,success_phase,"
                   "mean_fidelity\n";
    summary_csv << o.protocol << ',' << o.trials << ',' << completed << ',' << exhausted << ','
                << format_real(mean_attempts) << ',' << format_real(before) << ',' << format_real(after) << ','
                << format_real(phase) << ',' << format_real(mean_fidelity) << '\n';

    const Json config = {{"spec", to_json(spec)},       {"protocol", o.protocol},
                         {"plan", plan_json},           {"psi", psi_to_json(psi)},
                         {"trials", o.trials},          {"max_attempts", o.max_attempts}};
    const fs::path dir(o.out);
    ensure_dir(dir);
    const RunManifest manifest = make_manifest("simulate", config, o.seed);
    write_file(dir / "simulate_trials.csv", trials_csv.str());
    write_with_manifest(dir, "simulate_summary", summary_csv.str(), manifest);

    out << "mean_attempts " << format_real(mean_attempts) << "\nsuccess_before " << format_real(before)
        << "\nsuccess_after " << format_real(after) << "\nexhausted " << exhausted << "/" << o.trials << "\n";
    if (exhaustion_rate > kMaxExhaustionRate) return quality_failure;
    return ok;
}

// ---- figure ---------------------------------------------------------------------------------

int cmd_figure(const std::string& name, std::uint64_t seed, const std::string& out_dir, std::ostream& out) {
    const fs::path dir(out_dir);
    auto emit_fig = [&](const std::string& stem, const std::vector<FigureRow>& rows, Json config) {
        std::ostringstream csv;
        write_figure_csv(csv, rows);
        write_with_manifest(dir, stem, csv.str(), make_manifest("figure " + name, std::move(config), seed));
        out << "wrote " << (dir / (stem + ".csv")).string() << "\n";
    };
    auto emit_cost = [&](const std::string& stem, double ct_a, double delta) {
        std::ostringstream csv;
        write_cost_csv(csv, figure2_data(ct_a, delta));
        const Json config = {{"figure", name},     {"ct_a", ct_a},      {"delta", delta},
                             {"grid", "linspace(0.02, 0.98, 50)"}, {"reflection_policy", "kmm"}};
        write_with_manifest(dir, stem, csv.str(), make_manifest("figure " + name, config, seed));
        out << "wrote " << (dir / (stem + ".csv")).string() << "\n";
    };
    const Json common = {{"figure", name},
                         {"alpha", 1.0 / std::sqrt(2.0)},
                         {"beta", 1.0 / std::sqrt(2.0)},
                         {"relative_mismatch", kRelativeMismatch},
                         {"tail_distribution", "independent uniforms on (0,1) rescaled to the remaining mass"}};

    if (name == "fig1-left") {
        ensure_dir(dir);
        Json config = common;
        config["m"] = 1;
        config["grid"] = "linspace(0.02, 0.98, 50)";
        emit_fig("fig1-left", figure1_data(Fig1Panel::left, seed), config);
    } else if (name == "fig1-right") {
        ensure_dir(dir);
        Json config = common;
        config["m"] = 4;
        config["draws"] = kFigureDraws;
        config["grid"] = "linspace(0.02, 0.98, 50)";
        emit_fig("fig1-right", figure1_data(Fig1Panel::right, seed), config);
    } else if (name == "fig3") {
        ensure_dir(dir);
        Json config = common;
        config["m"] = 4;
        config["draws"] = kFigureDraws;
        config["grid"] = "logspace(1e-6, 1e-1, 51) over 1 - lambda0";
        emit_fig("fig3", figure3_data(seed), config);
    } else if (name == "fig2") {
        ensure_dir(dir);
        emit_cost("fig2-left", 1.0, 1e-6);
        emit_cost("fig2-right", 100.0, 1e-6);
    } else if (name == "figd1") {
        ensure_dir(dir);
        emit_cost("figd1-left", 1.0, 1e-3);
        emit_cost("figd1-right", 100.0, 1e-3);
    } else {
        throw std::invalid_argument("unknown figure '" + name + "' (expected fig1-left, fig1-right, fig2, fig3, figd1)");
    }
    return ok;
}

// ---- tcost ----------------------------------------------------------------------------------

struct TcostOptions {
    double lambda0 = 0.5;
    double delta = 1e-6;
    double ct_a = 1.0;
    std::string policy = "kmm";
    std::string out;
};

int cmd_tcost(const TcostOptions& o, std::ostream& out) {
    const CostQuery q{o.lambda0, o.delta, o.ct_a, ReflectionPolicy::parse(o.policy)};
    q.validate();
    const std::vector<CostResult> results = all_strategies(q);

    out << std::left << std::setw(20) << "strategy" << std::setw(14) << "total_t" << std::setw(5) << "j"
        << std::setw(5) << "k" << std::setw(5) << "L" << std::setw(8) << "n_S" << "epsilon\n";
    auto opt = [](const auto& v) {
        std::ostringstream s;
        if (v) s << *v;
        else s << '-';
        return s.str();
    };
    for (const CostResult& r : results) {
        char total[32];
        std::snprintf(total, sizeof total, "%.6g", r.total_t);
        out << std::setw(20) << strategy_name(r.strategy) << std::setw(14) << total << std::setw(5) << opt(r.j)
            << std::setw(5) << opt(r.k) << std::setw(5) << opt(r.length) << std::setw(8) << opt(r.n_s)
            << (r.epsilon ? format_real(*r.epsilon) : "-") << (r.boundary ? "  (boundary convention)" : "") << "\n";
    }
    Json all = Json::array();
    for (const CostResult& r : results) all.push_back(to_json(r));
    const Json config = {{"lambda0", q.lambda0}, {"delta", q.delta}, {"ct_a", q.ct_a},
                         {"reflection_policy", q.policy.to_string()}};
    out << Json{{"query", config}, {"results", all}}.dump(2) << "\n";

    if (!o.out.empty()) {
        const fs::path dir(o.out);
        ensure_dir(dir);
        std::vector<CostRow> rows;
        for (const CostResult& r : results) rows.push_back({q.lambda0, r});
        std::ostringstream csv;
        write_cost_csv(csv, rows);
        write_with_manifest(dir, "tcost", csv.str(), make_manifest("tcost", config, 0));
    }
    return ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Repeat-until-success circuits: simulation, amplitude amplification and T-cost models", "rusamp"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Run a RUS circuit, optionally amplified, over many trials");
    simulate->add_option("--spec", sim.spec_file, "RUS spec JSON file")->required();
    simulate->add_option("--protocol", sim.protocol, "none | standard:J | deterministic | pi3:K[:neg] | fp:DELTA[:WBOUND]");
    simulate->add_option("--psi", sim.psi, "Data state: 0, 1, +, -, +i, -i or re0,im0,re1,im1");
    simulate->add_option("--trials", sim.trials, "Number of trials");
    simulate->add_option("--seed", sim.seed, "Root seed");
    simulate->add_option("--out", sim.out, "Output directory");
    simulate->add_option("--max-attempts", sim.max_attempts, "Attempts before a trial counts as exhausted");

    std::string fig_name;
    std::uint64_t fig_seed = kDefaultFigureSeed;
    std::string fig_out = ".";
    auto* figure = app.add_subcommand("figure", "Write a figure dataset as CSV");
    figure->add_option("name", fig_name, "fig1-left | fig1-right | fig2 | fig3 | figd1")->required();
    figure->add_option("--seed", fig_seed, "Root seed");
    figure->add_option("--out", fig_out, "Output directory");

    TcostOptions tc;
    auto* tcost = app.add_subcommand("tcost", "T-gate cost of every strategy for one success probability");
    tcost->add_option("--lambda0", tc.lambda0, "Initial success probability in (0, 1]")->required();
    tcost->add_option("--delta", tc.delta, "Target failure probability");
    tcost->add_option("--ct-a", tc.ct_a, "T-count of one application of A");
    tcost->add_option("--reflection-policy", tc.policy, "kmm | zero | fixed:V");
    tcost->add_option("--out", tc.out, "Optional output directory for CSV and manifest");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return ok;
        }
        err << "error: " << e.what() << "\n";
        return config_error;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim, out);
        if (figure->parsed()) return cmd_figure(fig_name, fig_seed, fig_out, out);
        if (tcost->parsed()) return cmd_tcost(tc, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    }
    return config_error;
}

}  // namespace rusamp::cli
