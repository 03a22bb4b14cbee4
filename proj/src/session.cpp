#include "quantact/session.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace quantact {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, sep)) {
        part = trim(part);
        if (!part.empty()) {
            out.push_back(part);
        }
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(3) << std::scientific << v;
    return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

Config Config::parse(const std::string& text, const std::string& base_dir) {
    Config c;
    c.base_dir_ = base_dir;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::string section = "session";
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        }
        auto& entries = c.sections_[section];
        for (const auto& [k, v] : entries) {
            if (k == key) {
                throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                                  "' (first set on line " + std::to_string(v.line) + ")");
            }
        }
        entries.emplace_back(key, ConfigValue{trim(line.substr(eq + 1)), lineno});
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path().string();
    return parse(ss.str(), dir.empty() ? "." : dir);
}

const ConfigValue* Config::find(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) {
        return nullptr;
    }
    for (const auto& [k, v] : it->second) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

void Config::fail(const ConfigValue& v, const std::string& msg) const {
    if (v.line == 0) {
        throw ConfigError("option: " + msg);
    }
    throw ConfigError("config line " + std::to_string(v.line) + ": " + msg);
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

std::string Config::get(const std::string& section, const std::string& key, const std::string& fallback) const {
    const auto* v = find(section, key);
    return v ? v->value : fallback;
}

std::string Config::require(const std::string& section, const std::string& key) const {
    const auto* v = find(section, key);
    if (!v) {
        throw ConfigError("config: missing key '" + key + "' in [" + section + "]");
    }
    return v->value;
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
    const auto* v = find(section, key);
    if (!v) {
        return fallback;
    }
    try {
        std::size_t used = 0;
        const long r = std::stol(v->value, &used, 0);
        if (used != v->value.size()) {
            throw std::invalid_argument("trailing text");
        }
        return r;
    } catch (const std::exception&) {
        fail(*v, "'" + key + "' must be an integer, got '" + v->value + "'");
    }
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
    const auto* v = find(section, key);
    if (!v) {
        return fallback;
    }
    try {
        std::size_t used = 0;
        const double r = std::stod(v->value, &used);
        if (used != v->value.size()) {
            throw std::invalid_argument("trailing text");
        }
        return r;
    } catch (const std::exception&) {
        fail(*v, "'" + key + "' must be a number, got '" + v->value + "'");
    }
}

std::vector<std::pair<std::string, ConfigValue>> Config::with_prefix(const std::string& section,
                                                                     const std::string& prefix) const {
    std::vector<std::pair<std::string, ConfigValue>> out;
    auto it = sections_.find(section);
    if (it == sections_.end()) {
        return out;
    }
    for (const auto& [k, v] : it->second) {
        if (k.rfind(prefix, 0) == 0) {
            out.emplace_back(k.substr(prefix.size()), v);
        }
    }
    return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    auto& entries = sections_[section];
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = ConfigValue{value, 0};
            return;
        }
    }
    entries.emplace_back(key, ConfigValue{value, 0});
}

std::string Config::resolve(const std::string& path) const {
    const std::filesystem::path p(path);
    return p.is_absolute() ? path : (std::filesystem::path(base_dir_) / p).string();
}

void Config::check_keys(const std::map<std::string, std::vector<std::string>>& allowed) const {
    for (const auto& [section, entries] : sections_) {
        auto it = allowed.find(section);
        if (it == allowed.end()) {
            const std::size_t line = entries.empty() ? 0 : entries.front().second.line;
            throw ConfigError("config line " + std::to_string(line) + ": unknown section [" + section + "]");
        }
        for (const auto& [k, v] : entries) {
            const bool ok = std::any_of(it->second.begin(), it->second.end(), [&](const std::string& a) {
                return a == k || (!a.empty() && a.back() == '.' && k.rfind(a, 0) == 0);
            });
            if (!ok) {
                fail(v, "unknown key '" + k + "' in [" + section + "]");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Session

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{"check-action", "check-cocycle", "mc-check", "mc-solve",
                                                "cohomology",   "verify-numeric", "expand"};
    return names;
}

SessionConfig SessionConfig::from(const Config& c) {
    c.check_keys({
        {"session", {"action", "task", "order", "seed", "out"}},
        {"basis", {"kind", "degree", "functions"}},
        {"system", {"phase", "phase.", "symbol.", "constants"}},
        {"solve", {"start"}},
        {"numeric", {"points", "half_width", "hbar", "amplitude", "tests", "samples", "pairs", "unitarity_tol",
                     "representation_tol", "width"}},
        {"expand", {"amplitude", "amplitude.", "convention", "dimension"}},
    });
    SessionConfig s;
    s.raw = c;
    s.action = c.get("session", "action");
    s.task = c.get("session", "task");
    const long order = c.get_int("session", "order", 2);
    if (order < 0) {
        throw ConfigError("config: order must be non-negative");
    }
    s.order = static_cast<int>(order);
    const std::string seed = c.get("session", "seed");
    if (!seed.empty()) {
        try {
            s.seed = std::stoull(seed, nullptr, 0);
        } catch (const std::exception&) {
            throw ConfigError("config: seed must be an unsigned integer, got '" + seed + "'");
        }
    }
    s.out = c.get("session", "out");
    return s;
}

Action load_session_action(const SessionConfig& cfg) {
    if (cfg.action.empty()) {
        throw ConfigError("config: missing key 'action' in [session]");
    }
    if (cfg.action.rfind("builtin:", 0) == 0) {
        return builtin_action(cfg.action.substr(8));
    }
    const std::string path = cfg.raw.resolve(cfg.action);
    if (!std::filesystem::exists(path)) {
        throw ConfigError("config: action file '" + path + "' does not exist");
    }
    return load_action(path);
}

namespace {

NumericPoint parse_constants(const std::string& text) {
    NumericPoint out;
    for (const auto& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: constants must read 'name=value, ...', got '" + item + "'");
        }
        const std::string name = trim(item.substr(0, eq));
        const Expr v = parse(trim(item.substr(eq + 1)));
        out[name] = eval(v, {{"pi", std::numbers::pi}});
    }
    return out;
}

/// Exact substitution of rational constant values so symbolic checks stay exact.
std::map<std::string, Expr> exact_constants(const std::string& text) {
    std::map<std::string, Expr> out;
    for (const auto& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq != std::string::npos) {
            out[trim(item.substr(0, eq))] = parse(trim(item.substr(eq + 1)));
        }
    }
    return out;
}

CoefficientBasis session_basis(const SessionConfig& cfg, const Action& action) {
    const Config& c = cfg.raw;
    const std::string kind = c.get("basis", "kind", "monomials");
    if (kind == "monomials") {
        return CoefficientBasis::monomials(action.coordinates(), static_cast<int>(c.get_int("basis", "degree", 2)));
    }
    if (kind == "functions") {
        std::vector<Expr> fs;
        for (const auto& f : split(c.require("basis", "functions"), ';')) {
            fs.push_back(parse(f, action.binding()));
        }
        return CoefficientBasis(std::move(fs));
    }
    throw ConfigError("config: basis kind must be 'monomials' or 'functions', got '" + kind + "'");
}

std::optional<PhaseCochain> session_phase(const SessionConfig& cfg, const std::shared_ptr<const Action>& action) {
    const Config& c = cfg.raw;
    const auto consts = exact_constants(c.get("system", "constants"));
    VarBinding binding = action->binding();
    if (!action->is_finite()) {
        if (!c.has("system", "phase")) {
            return std::nullopt;
        }
        const Expr s = substitute(parse(c.require("system", "phase"), binding), consts);
        return PhaseCochain::from_template(action, s);
    }
    const auto entries = c.with_prefix("system", "phase.");
    if (entries.empty()) {
        return std::nullopt;
    }
    std::map<int, Expr> per;
    for (const auto& [name, v] : entries) {
        const int idx = action->finite_group().index_of(name);
        per[idx] = substitute(parse(v.value, binding), consts);
    }
    return PhaseCochain::from_function(action, 1, [&](const std::vector<Element>& g) {
        auto it = per.find(g[0].index);
        return it == per.end() ? Expr() : it->second;
    });
}

/// Degree-1 system from the [system] section: phases, per-element symbol files, or the unit system.
Cochain session_system(const SessionConfig& cfg, const std::shared_ptr<const Action>& action, int order) {
    if (auto s = session_phase(cfg, action)) {
        return exp_system(*s, order);
    }
    const auto files = cfg.raw.with_prefix("system", "symbol.");
    const std::size_t d = action->dimension();
    if (files.empty()) {
        return Cochain::constant(action, 1, FormalSymbol::constant(d, order, Expr(1)));
    }
    if (!action->is_finite()) {
        throw ConfigError("config: symbol files are per element and need a finite group");
    }
    std::map<int, FormalSymbol> per;
    for (const auto& [name, v] : files) {
        std::ifstream in(cfg.raw.resolve(v.value));
        if (!in) {
            throw ConfigError("config line " + std::to_string(v.line) + ": cannot open symbol file '" + v.value + "'");
        }
        std::stringstream ss;
        ss << in.rdbuf();
        per.emplace(action->finite_group().index_of(name), FormalSymbol::deserialize(ss.str()).truncated(order));
    }
    return Cochain::from_function(action, 1, order, [&](const std::vector<Element>& g) {
        auto it = per.find(g[0].index);
        return it == per.end() ? FormalSymbol(d, order) : it->second;
    });
}

std::string cochain_summary(const Cochain& c, std::size_t max_lines = 12) {
    std::istringstream in(c.serialize());
    std::string line;
    std::string out;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (n++ == max_lines) {
            out += "\n    ...";
            break;
        }
        out += (out.empty() ? "" : "\n    ") + line;
    }
    return out;
}

void task_check_action(const SessionConfig& cfg, TaskResult& r) {
    const Action action = load_session_action(cfg);
    ZeroTestOptions opts;
    opts.seed = cfg.seed;
    r.report.merge(check_action(action, opts));
}

void task_check_cocycle(const SessionConfig& cfg, TaskResult& r) {
    auto action = std::make_shared<const Action>(load_session_action(cfg));
    const auto s = session_phase(cfg, action);
    if (!s) {
        throw ConfigError("config: check-cocycle needs [system] phase");
    }
    ZeroTestOptions opts;
    opts.seed = cfg.seed;
    const PhaseCochain ds = delta_phase(*s);
    const auto closed = ds.zero_verdict(opts);
    std::string detail;
    if (!closed.zero) {
        for (std::size_t k = 0; k < ds.stored_count(); ++k) {
            if (!ds.stored(k).is_zero()) {
                detail = "delta S = " + ds.stored(k).str();
                break;
            }
        }
    }
    r.report.check("delta_phase(S) = 0", closed.zero, closed.certificate, detail);
    const auto mc = is_maurer_cartan(exp_system(*s, cfg.order), opts);
    r.report.info("exp_system Maurer-Cartan", mc.zero ? "yes" : "no");
    r.report.check("exp_system(S) is Maurer-Cartan iff delta S = 0", mc.zero == closed.zero,
                   mc.certificate == Certificate::Exact && closed.certificate == Certificate::Exact
                       ? Certificate::Exact
                       : Certificate::Probabilistic);
}

void task_mc_check(const SessionConfig& cfg, TaskResult& r) {
    auto action = std::make_shared<const Action>(load_session_action(cfg));
    const Cochain a = session_system(cfg, action, cfg.order);
    ZeroTestOptions opts;
    opts.seed = cfg.seed;
    const Cochain res = mc_residual(a);
    const auto v = res.zero_verdict(opts);
    r.report.check("mc_residual = 0 through order " + std::to_string(cfg.order), v.zero, v.certificate,
                   v.zero ? std::string() : cochain_summary(res));
}

void task_mc_solve(const SessionConfig& cfg, TaskResult& r) {
    auto action = std::make_shared<const Action>(load_session_action(cfg));
    if (!action->is_finite()) {
        throw ConfigError("config: mc-solve needs a finite group");
    }
    const CoefficientBasis basis = session_basis(cfg, *action);
    const Cochain p0 = session_system(cfg, action, cfg.order).order_part(0);
    const auto mc0 = is_maurer_cartan(p0.truncated(0));
    r.report.check("P^0 is Maurer-Cartan", mc0.zero, mc0.certificate);
    if (!mc0.zero) {
        return;
    }
    const std::string start = cfg.raw.get("solve", "start", "zero");
    if (start != "zero" && start != "random-cocycle") {
        throw ConfigError("config: solve start must be 'zero' or 'random-cocycle'");
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> coef(-3, 3);

    std::vector<Cochain> found;
    int reached = 0;
    for (int n = 1; n <= cfg.order; ++n) {
        OrderSolution sol = solve_order(p0, found, n, basis);
        const std::string tag = "order " + std::to_string(n);
        const char* state = sol.solved ? " solvable" : (sol.rhs_in_span ? " obstructed" : " rhs outside basis span");
        r.report.info(tag, "unknowns=" + std::to_string(sol.unknowns) +
                               " cocycles=" + std::to_string(sol.cocycle_basis.size()) + state);
        r.report.check(tag + ": right-hand side is d_P0-closed", sol.rhs_closed);
        if (!sol.rhs_in_span) {
            r.report.info(tag + " note", "the recursion leaves the truncated basis; enlarge [basis] to continue");
            break;
        }
        if (!sol.solved) {
            r.report.info(tag + " obstruction", "\n    " + cochain_summary(*sol.obstruction, 40));
            r.artifacts["obstruction.txt"] = sol.obstruction->serialize();
            break;
        }
        Cochain pn = *sol.solution;
        if (n == 1 && start == "random-cocycle") {
            for (const auto& z : sol.cocycle_basis) {
                pn = pn + z.scaled(Expr(coef(rng)));
            }
        }
        found.push_back(pn);
        reached = n;
    }
    r.report.info("solved through order", std::to_string(reached));
    Cochain total = p0.truncated(reached);
    for (const auto& p : found) {
        total = total + p.truncated(reached);
    }
    const auto v = mc_residual(total).zero_verdict();
    r.report.check("mc_residual of the assembled solution = 0 through order " + std::to_string(reached), v.zero,
                   v.certificate);
    r.artifacts["solution.txt"] = total.serialize();
}

void task_cohomology(const SessionConfig& cfg, TaskResult& r) {
    auto action = std::make_shared<const Action>(load_session_action(cfg));
    const CoefficientBasis basis = session_basis(cfg, *action);
    const auto failures = basis.closure_failures(*action);
    r.report.check("basis closed under the action", failures.empty(), Certificate::Exact,
                   failures.empty() ? std::string() : failures.front());
    if (!failures.empty()) {
        return;
    }
    const Cochain p0 = session_system(cfg, action, cfg.order).order_part(0).truncated(cfg.order);
    const auto rows = cohomology_dims(action, basis, p0, cfg.order);
    std::ostringstream table;
    table << "\n    n  dim(Pol^0,1,2)     rank(d^0,1,2)      H^0 H^1 H^2";
    for (const auto& row : rows) {
        table << "\n    " << std::setw(2) << row.n << "  " << std::setw(5) << row.cochain_dims[0] << std::setw(5)
              << row.cochain_dims[1] << std::setw(6) << row.cochain_dims[2] << "   " << std::setw(5) << row.ranks[0]
              << std::setw(5) << row.ranks[1] << std::setw(6) << row.ranks[2] << "   " << std::setw(4) << row.h[0]
              << std::setw(4) << row.h[1] << std::setw(4) << row.h[2];
    }
    r.report.info("table", table.str());
}

std::vector<WaveGrid> test_functions(const GridSpec& spec, std::size_t count, double width, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> off(-width, width);
    std::uniform_real_distribution<double> wave(-2.0, 2.0);
    std::vector<WaveGrid> out;
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> c(spec.dimension);
        std::vector<double> w(spec.dimension);
        for (std::size_t a = 0; a < spec.dimension; ++a) {
            c[a] = off(rng);
            w[a] = wave(rng);
        }
        out.push_back(gaussian(spec, c, width, w));
    }
    return out;
}

void task_verify_numeric(const SessionConfig& cfg, TaskResult& r) {
    Action action = load_session_action(cfg);
    const Config& c = cfg.raw;
    if (!action.is_finite() && c.has("numeric", "samples")) {
        action.random_samples(static_cast<std::size_t>(c.get_int("numeric", "samples", 8)), cfg.seed);
    }
    GridSpec spec;
    spec.dimension = action.dimension();
    spec.points = static_cast<std::size_t>(c.get_int("numeric", "points", 128));
    spec.half_width = c.get_double("numeric", "half_width", 8.0);
    spec.hbar = c.get_double("numeric", "hbar", 0.1);
    spec.validate();
    const double width = c.get_double("numeric", "width", spec.half_width / 32.0);
    const auto tests = test_functions(spec, static_cast<std::size_t>(c.get_int("numeric", "tests", 3)), width, cfg.seed);
    const NumericPoint consts = parse_constants(c.get("system", "constants"));

    Expr amplitude(1);
    if (c.has("numeric", "amplitude")) {
        VarBinding b = action.binding();
        b.with_momenta();
        amplitude = parse(c.require("numeric", "amplitude"), b);
    } else if (c.has("system", "phase")) {
        amplitude = exp(Expr::imag_unit() * parse(c.require("system", "phase"), action.binding()));
    } else if (!c.with_prefix("system", "phase.").empty()) {
        throw ConfigError("config: verify-numeric takes a single amplitude template; set [numeric] amplitude");
    }
    const NumericSystem sys = system_from_template(action, amplitude, consts);

    std::ostringstream grid;
    grid << spec.dimension << "d, M=" << spec.points << ", L=" << spec.half_width << ", hbar=" << spec.hbar
         << ", xi window " << spec.xi_window();
    r.report.info("grid", grid.str());
    r.report.info("amplitude", amplitude.str());
    double boundary = 0.0;
    for (const auto& t : tests) {
        boundary = std::max(boundary, t.boundary_max());
    }
    r.report.info("test functions", std::to_string(tests.size()) + ", boundary max " + fmt(boundary));

    const double utol = c.get_double("numeric", "unitarity_tol", 1e-8);
    const double rtol = c.get_double("numeric", "representation_tol", 1e-7);
    const auto elements = action.elements();
    double worst_u = 0.0;
    bool out_of_box = false;
    for (const auto& g : elements) {
        FioDiagnostics dg;
        fio_apply(sys.amplitude(g), sys.map(g), tests.front(), &dg);
        out_of_box = out_of_box || dg.out_of_box;
        worst_u = std::max(worst_u, unitarity_residual(sys.amplitude(g), sys.map(g), tests));
    }
    if (out_of_box) {
        r.report.info("warning", "some maps leave the box; interpolation wraps periodically");
    }
    r.report.check("unitarity residual <= " + fmt(utol), worst_u <= utol, Certificate::Probabilistic, fmt(worst_u));

    std::vector<std::pair<Element, Element>> pairs;
    if (action.is_finite()) {
        for (const auto& a : elements) {
            for (const auto& b : elements) {
                pairs.emplace_back(a, b);
            }
        }
    } else {
        const auto n = static_cast<std::size_t>(c.get_int("numeric", "pairs", 5));
        for (std::size_t k = 0; k < n && elements.size() > 1; ++k) {
            pairs.emplace_back(elements[k % elements.size()], elements[(k + 1) % elements.size()]);
        }
    }
    const double rep = representation_residual(action, sys, pairs, tests);
    r.report.check("representation residual <= " + fmt(rtol) + " over " + std::to_string(pairs.size()) + " pairs",
                   rep <= rtol, Certificate::Probabilistic, fmt(rep));
}

void task_expand(const SessionConfig& cfg, TaskResult& r) {
    const Config& c = cfg.raw;
    std::vector<std::string> coords;
    VarBinding b;
    if (!cfg.action.empty()) {
        b = load_session_action(cfg).binding();
    } else {
        const long d = c.get_int("expand", "dimension", 1);
        for (long k = 0; k < d; ++k) {
            b.add(d == 1 ? "x" : "x" + std::to_string(k + 1), VarRole::Coordinate);
        }
    }
    b.with_momenta();
    std::vector<Expr> series;
    if (c.has("expand", "amplitude")) {
        series.push_back(parse(c.require("expand", "amplitude"), b));
    }
    for (const auto& [k, v] : c.with_prefix("expand", "amplitude.")) {
        const int idx = std::stoi(k);
        if (idx < 0 || idx > 64) {
            throw ConfigError("config line " + std::to_string(v.line) + ": amplitude index out of range");
        }
        if (static_cast<std::size_t>(idx) >= series.size()) {
            series.resize(static_cast<std::size_t>(idx) + 1);
        }
        series[static_cast<std::size_t>(idx)] = parse(v.value, b);
    }
    if (series.empty()) {
        throw ConfigError("config: expand needs [expand] amplitude");
    }
    const std::string conv = c.get("expand", "convention", "multi");
    if (conv != "multi" && conv != "total") {
        throw ConfigError("config: expand convention must be 'multi' or 'total'");
    }
    const FormalSymbol p = taylor_from_amplitude(
        series, b.dimension(), cfg.order, conv == "multi" ? TaylorConvention::MultiFactorial : TaylorConvention::TotalFactorial);
    r.report.info("symbol", "\n    " + [&] {
        std::string s = p.serialize();
        std::string out;
        for (char ch : s) {
            out += ch;
            if (ch == '\n') {
                out += "    ";
            }
        }
        return trim(out);
    }());
    r.artifacts["symbol.txt"] = p.serialize();
}

}  // namespace

TaskResult run_task(const SessionConfig& cfg) {
    TaskResult r{Report(cfg.task), {}};
    r.report.info("action", cfg.action.empty() ? "-" : cfg.action);
    r.report.info("order", std::to_string(cfg.order));
    r.report.info("seed", std::to_string(cfg.seed));
    if (cfg.task == "check-action") {
        task_check_action(cfg, r);
    } else if (cfg.task == "check-cocycle") {
        task_check_cocycle(cfg, r);
    } else if (cfg.task == "mc-check") {
        task_mc_check(cfg, r);
    } else if (cfg.task == "mc-solve") {
        task_mc_solve(cfg, r);
    } else if (cfg.task == "cohomology") {
        task_cohomology(cfg, r);
    } else if (cfg.task == "verify-numeric") {
        task_verify_numeric(cfg, r);
    } else if (cfg.task == "expand") {
        task_expand(cfg, r);
    } else {
        throw ConfigError("unknown task '" + cfg.task + "'");
    }
    return r;
}

int run_session(const SessionConfig& cfg, std::ostream& log) {
    const TaskResult r = run_task(cfg);
    const std::string text = r.report.str();
    log << text;
    if (!cfg.out.empty()) {
        std::filesystem::create_directories(cfg.out);
        std::ofstream(std::filesystem::path(cfg.out) / (cfg.task + ".txt")) << text;
        for (const auto& [name, body] : r.artifacts) {
            std::ofstream(std::filesystem::path(cfg.out) / name) << body;
        }
    }
    return r.report.passed() ? 0 : 1;
}

}  // namespace quantact
