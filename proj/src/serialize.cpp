#include "rusamp/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <stdexcept>

namespace rusamp {

namespace {

template <class T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("field '") + key + "': " + e.what());
    }
}

std::string optional_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---- matrices and specs --------------------------------------------------------------------

Json matrix_to_json(const Matrix& m) {
    Json out = Json::array();
    for (const Complex& z : m.entries()) out.push_back({z.real(), z.imag()});
    return out;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array()) throw std::invalid_argument("matrix must be an array of [re, im] pairs");
    const std::size_t n = j.size();
    const auto dim = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (dim == 0 || dim * dim != n) throw std::invalid_argument("matrix entry count is not a perfect square");
    Matrix m(dim);
    for (std::size_t i = 0; i < n; ++i) {
        const Json& e = j[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw std::invalid_argument("matrix entries must be [re, im] number pairs");
        m(i / dim, i % dim) = Complex(e[0].get<double>(), e[1].get<double>());
    }
    return m;
}

Json to_json(const RusSpec& spec) {
    Json recs = Json::array();
    for (const UnitaryMatrix& r : spec.recoveries) recs.push_back(matrix_to_json(r.matrix()));
    return {{"m", spec.m},
            {"lambdas", spec.lambdas},
            {"target", matrix_to_json(spec.target.matrix())},
            {"recoveries", recs},
            {"seed", spec.seed}};
}

RusSpec rus_spec_from_json(const Json& j) {
    const int m = field<int>(j, "m");
    auto lambdas = field<std::vector<double>>(j, "lambdas");
    UnitaryMatrix target(matrix_from_json(j.at("target")));
    const auto seed = j.contains("seed") ? field<std::uint64_t>(j, "seed") : std::uint64_t{0};
    std::vector<UnitaryMatrix> recoveries;
    if (j.contains("recoveries")) {
        if (!j["recoveries"].is_array()) throw std::invalid_argument("recoveries must be an array");
        for (const Json& r : j["recoveries"]) recoveries.emplace_back(matrix_from_json(r));
    }
    RusSpec spec = make_rus_spec(m, std::move(lambdas), std::move(target), seed, std::move(recoveries));
    spec.validate();
    return spec;
}

Json to_json(const StandardPlan& p) { return {{"j", p.j}, {"theta", p.theta}}; }

Json to_json(const DeterministicPlan& p) {
    const char* branch = p.branch == PhaseBranch::skipped       ? "skipped"
                         : p.branch == PhaseBranch::closed_form ? "closed_form"
                                                                : "numeric";
    return {{"j", p.j},     {"theta", p.theta},   {"chi", p.chi},
            {"phi", p.phi}, {"varphi", p.varphi}, {"branch", branch}};
}

Json to_json(const Pi3Plan& p) { return {{"k", p.k}, {"sign", p.sign}}; }

Json to_json(const FixedPointPlan& p) {
    return {{"L", p.length}, {"delta", p.delta}, {"gamma", p.gamma},
            {"w", p.w},      {"phis", p.phis},   {"varphis", p.varphis}};
}

StandardPlan standard_plan_from_json(const Json& j) { return {field<int>(j, "j"), field<double>(j, "theta")}; }

DeterministicPlan deterministic_plan_from_json(const Json& j) {
    DeterministicPlan p;
    p.j = field<int>(j, "j");
    p.theta = field<double>(j, "theta");
    p.chi = field<double>(j, "chi");
    p.phi = field<double>(j, "phi");
    p.varphi = field<double>(j, "varphi");
    const auto branch = field<std::string>(j, "branch");
    if (branch == "skipped") p.branch = PhaseBranch::skipped;
    else if (branch == "closed_form") p.branch = PhaseBranch::closed_form;
    else if (branch == "numeric") p.branch = PhaseBranch::numeric;
    else throw std::invalid_argument("unknown phase branch '" + branch + "'");
    return p;
}

Pi3Plan pi3_plan_from_json(const Json& j) {
    Pi3Plan p{field<int>(j, "k"), field<int>(j, "sign")};
    if (p.k < 0 || (p.sign != 1 && p.sign != -1)) throw std::invalid_argument("pi3 plan out of range");
    return p;
}

FixedPointPlan fp_plan_from_json(const Json& j) {
    FixedPointPlan p;
    p.length = field<int>(j, "L");
    p.delta = field<double>(j, "delta");
    p.gamma = field<double>(j, "gamma");
    p.w = field<double>(j, "w");
    p.phis = field<std::vector<double>>(j, "phis");
    p.varphis = field<std::vector<double>>(j, "varphis");
    if (p.length < 1 || p.phis.size() != static_cast<std::size_t>(p.length) || p.varphis.size() != p.phis.size())
        throw std::invalid_argument("fixed-point plan: phase lists must have length L");
    return p;
}

Json to_json(const CostResult& r) {
    Json out = {{"strategy", std::string(strategy_name(r.strategy))}, {"total_t", r.total_t}};
    if (r.j) out["j"] = *r.j;
    if (r.k) out["k"] = *r.k;
    if (r.length) out["L"] = *r.length;
    if (r.repetitions) out["repetitions"] = *r.repetitions;
    if (r.n_s) out["n_S"] = *r.n_s;
    if (r.epsilon) out["epsilon_reflection"] = *r.epsilon;
    if (r.boundary) out["boundary_convention"] = true;
    return out;
}

// ---- CSV ------------------------------------------------------------------------------------

void write_figure_csv(std::ostream& os, const std::vector<FigureRow>& rows) {
    os << "x,curve_id,mean,std,n_samples,seed\n";
    for (const FigureRow& r : rows)
        os << format_real(r.x) << ',' << r.curve << ',' << format_real(r.mean) << ',' << format_real(r.std) << ','
           << r.n_samples << ',' << r.seed << '\n';
}

void write_cost_csv(std::ostream& os, const std::vector<CostRow>& rows) {
    os << "lambda0,strategy,total_t,j,k,L,n_S,epsilon_reflection\n";
    for (const CostRow& row : rows) {
        const CostResult& r = row.result;
        os << format_real(row.lambda0) << ',' << strategy_name(r.strategy) << ',' << format_real(r.total_t) << ','
           << optional_int(r.j) << ',' << optional_int(r.k) << ',' << optional_int(r.length) << ','
           << (r.n_s ? std::to_string(*r.n_s) : std::string()) << ','
           << (r.epsilon ? format_real(*r.epsilon) : std::string()) << '\n';
    }
}

// ---- manifests ------------------------------------------------------------------------------

Json RunManifest::to_json() const {
    return {{"command", command},           {"config", config},     {"config_hash", config_hash},
            {"seed", seed},                 {"tool_version", tool_version}, {"timestamp", timestamp}};
}

std::string config_hash(const Json& config) {
    const std::string text = config.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string current_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0') t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest make_manifest(std::string command, Json config, std::uint64_t seed) {
    RunManifest m;
    m.command = std::move(command);
    m.config_hash = config_hash(config);
    m.config = std::move(config);
    m.seed = seed;
    m.timestamp = current_timestamp();
    return m;
}

}  // namespace rusamp
