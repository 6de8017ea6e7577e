// whittaker_lab: eval | simulate | verify | table
//
// Flags may also come from a JSON object given by --config (keys are the flag names without dashes,
// plus "command"); flags on the command line win. Exit status: 0 pass, 1 check failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "whittaker/suites.hpp"

using json = nlohmann::json;
using namespace wlab;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flag values after merging the config file with the command line.
class RunConfig {
public:
    std::string command;

    void set(const std::string& key, std::string value) { params_[key] = std::move(value); }
    bool has(const std::string& key) const { return params_.count(key) > 0; }

    std::string str(const std::string& key) const
    {
        const auto it = params_.find(key);
        if (it == params_.end()) throw UsageError("missing required option --" + key + " for '" + command + "'");
        return it->second;
    }
    std::string str(const std::string& key, const std::string& fallback) const { return has(key) ? str(key) : fallback; }

    double number(const std::string& key) const { return parse_double(key, str(key)); }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::size_t count(const std::string& key, std::size_t fallback) const
    {
        if (!has(key)) return fallback;
        const double v = number(key);
        if (v < 0 || v != std::floor(v)) throw UsageError("--" + key + " must be a non-negative integer");
        return static_cast<std::size_t>(v);
    }

    Vec vec(const std::string& key) const
    {
        Vec out;
        std::stringstream ss(str(key));
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(parse_double(key, tok));
        if (out.empty()) throw UsageError("--" + key + " is empty");
        return out;
    }

    Vec vec(const std::string& key, const Vec& fallback) const { return has(key) ? vec(key) : fallback; }

    // n from --n, or from the length of the first vector present
    std::size_t dimension(std::initializer_list<const char*> keys) const
    {
        if (has("n")) return count("n", 0);
        for (const char* k : keys)
            if (has(k)) return vec(k).size();
        throw UsageError("missing --n");
    }

private:
    static double parse_double(const std::string& key, const std::string& s)
    {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw UsageError("--" + key + ": cannot parse '" + s + "' as a number");
        }
    }

    std::map<std::string, std::string> params_;
};

Rational parse_rational(const std::string& key, const std::string& s)
{
    try {
        if (s.find('.') != std::string::npos || s.find('e') != std::string::npos) {
            // decimal → exact rational via its digits
            const std::size_t dot = s.find('.');
            if (s.find('e') != std::string::npos) throw std::invalid_argument(s);
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            Rational den(1);
            for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
            return Rational(boost::multiprecision::cpp_int(digits)) / den;
        }
        return Rational(s);
    } catch (const std::exception&) {
        throw UsageError("--" + key + ": cannot parse '" + s + "' as an exact rational (use p/q)");
    }
}

void check_size(const Vec& v, std::size_t n, const char* key)
{
    if (v.size() != n) throw UsageError(std::string("--") + key + " must have " + std::to_string(n) + " entries");
}

std::string csv_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ostream& output(const RunConfig& cfg, std::ofstream& file)
{
    if (!cfg.has("out")) return std::cout;
    file.open(cfg.str("out"), std::ios::binary);
    if (!file) throw UsageError("cannot open --out " + cfg.str("out"));
    return file;
}

json report_json(const suites::Report& r)
{
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"criterion", c.criterion},
                          {"name", c.name},
                          {"status", c.pass ? "pass" : "fail"},
                          {"metric", c.metric},
                          {"tolerance", c.tolerance},
                          {"detail", c.detail}});
    return {{"schema", 1},
            {"suite", r.suite},
            {"status", r.passed() ? "pass" : "fail"},
            {"checks", checks},
            {"conventions", r.conventions}};
}

// ---------------------------------------------------------------------------

int run_eval(const RunConfig& cfg)
{
    const std::string fn = cfg.str("fn");
    json out{{"schema", 1}, {"fn", fn}};
    if (fn == "psi") {
        const std::size_t n = cfg.dimension({"lambda", "x"});
        const Vec l = cfg.vec("lambda"), x = cfg.vec("x");
        check_size(l, n, "lambda");
        check_size(x, n, "x");
        const Route route = parse_route(cfg.str("route", "quadrature"));
        WhittakerEval e;
        const std::uint64_t seed = cfg.count("seed", 1);
        if (route == Route::givental_mc) e = whittaker_givental_mc(l, x, cfg.count("samples", 100000), seed);
        else if (route == Route::feynman_kac)
            e = feynman_kac_psi(l, x, cfg.number("horizon", 50.0), cfg.count("samples", 100000), cfg.number("dt", 0.05), seed);
        else e = whittaker_eval(l, x, route);
        out["value"] = e.value;
        out["error"] = e.est_error;
        out["route"] = route_name(e.route);
    } else if (fn == "J") {
        const std::size_t n = cfg.dimension({"lambda", "x"});
        const Vec l = cfg.vec("lambda"), x = cfg.vec("x");
        check_size(l, n, "lambda");
        check_size(x, n, "x");
        out["value"] = specfun::hciz_J(l, x);
        out["error"] = 0.0;
        out["route"] = "determinant";
    } else if (fn == "K") {
        const specfun::KValue k = specfun::macdonald_K_ex(cfg.number("nu"), cfg.number("z"));
        out["value"] = k.value;
        out["error"] = 0.0;
        out["route"] = "integral";
        out["in_window"] = k.in_window;
    } else if (fn == "theta") {
        const Vec x = cfg.vec("x");
        const specfun::ThetaValue th = specfun::theta_density(cfg.number("t"), x);
        out["value"] = th.value;
        out["error"] = th.est_error;
        out["route"] = "contour";
    } else if (fn == "m") {
        const Vec nu = cfg.vec("lambda"), x = cfg.vec("x");
        check_size(x, nu.size(), "x");
        const specfun::SeriesValue s = specfun::fundamental_whittaker(to_complex(nu), x);
        out["value"] = s.value.real();
        out["value_imag"] = s.value.imag();
        out["error"] = s.est_error;
        out["route"] = "series";
        out["degree"] = s.degree;
    } else {
        throw UsageError("--fn must be one of psi, J, K, theta, m");
    }
    std::ofstream file;
    output(cfg, file) << out.dump(2) << "\n";
    return 0;
}

int run_simulate(const RunConfig& cfg)
{
    const std::string process = cfg.str("process");
    const std::size_t n = cfg.dimension({"mu"});
    if (n < 1) throw UsageError("--n must be at least 1");
    const Vec mu = cfg.vec("mu", Vec(n, 0.0));
    check_size(mu, n, "mu");
    const double t = cfg.number("t"), dt = cfg.number("dt", 1e-3);
    const std::uint64_t seed = cfg.count("seed", 1);
    if (!(t > 0.0) || !(dt > 0.0) || dt > t) throw UsageError("need 0 < dt <= t");

    std::ostringstream csv;
    csv << "t";
    if (process == "array") {
        const ArrayTrajectory tr = simulate_array(mu, t, dt, seed);
        for (std::size_t k = 1; k <= n; ++k)
            for (std::size_t i = 1; i <= k; ++i) csv << ",T_" << k << "_" << i;
        csv << "\n";
        for (std::size_t j = 0; j < tr.states.size(); ++j) {
            csv << csv_number(tr.times[j]);
            for (double v : tr.states[j].flat()) csv << "," << csv_number(v);
            csv << "\n";
        }
    } else {
        Trajectory tr;
        std::string prefix;
        if (process == "particles") {
            tr = particle_system_xi(mu, t, dt, seed);
            prefix = "xi_";
        } else if (process == "lusztig") {
            const ReducedWord w = cfg.has("word") ? ReducedWord::parse(n, cfg.str("word")) : ReducedWord::canonical_longest(n);
            if (!w.is_longest()) throw UsageError("--word must be a reduced word for the longest element");
            tr = lusztig_dynamics(mu, w, t, dt, seed);
            prefix = "y_";
        } else if (process == "brownian") {
            const SampledPath b = brownian_sample(n, mu, t, dt, seed);
            tr.times = b.times();
            tr.dim = n;
            for (std::size_t j = 0; j < b.size(); ++j)
                for (double v : b.value(j)) tr.data.push_back(v);
            prefix = "B_";
        } else {
            throw UsageError("--process must be one of array, particles, lusztig, brownian");
        }
        for (std::size_t i = 1; i <= tr.dim; ++i) csv << "," << prefix << i;
        csv << "\n";
        for (std::size_t j = 0; j < tr.times.size(); ++j) {
            csv << csv_number(tr.times[j]);
            for (std::size_t i = 0; i < tr.dim; ++i) csv << "," << csv_number(tr(j, i));
            csv << "\n";
        }
    }
    std::ofstream file;
    output(cfg, file) << csv.str();
    return 0;
}

suites::Effort effort(const RunConfig& cfg)
{
    suites::Effort e;
    e.scale = cfg.number("scale", 1.0);
    if (!(e.scale > 0.0)) throw UsageError("--scale must be positive");
    if (cfg.has("seed")) e.seed = cfg.count("seed", e.seed);
    return e;
}

int run_verify(const RunConfig& cfg)
{
    const std::string suite = cfg.str("suite");
    try {
        suites::suite_members(suite);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    suites::QExactOptions q;
    if (cfg.has("q")) q.q = parse_rational("q", cfg.str("q"));
    if (cfg.has("t")) q.t = parse_rational("t", cfg.str("t"));
    q.z_max = static_cast<int>(cfg.count("zmax", 20));
    q.steps = static_cast<int>(cfg.count("steps", 10));
    const suites::Report r = suites::run_suite(suite, effort(cfg), q);
    std::ofstream file;
    output(cfg, file) << report_json(r).dump(2) << "\n";
    return r.passed() ? 0 : 1;
}

int run_table(const RunConfig& cfg)
{
    const std::string format = cfg.str("format", "text");
    if (format != "text" && format != "json") throw UsageError("--format must be text or json");
    const suites::Report r = suites::run_suite("table", effort(cfg));
    std::ofstream file;
    std::ostream& os = output(cfg, file);
    if (format == "json") {
        os << report_json(r).dump(2) << "\n";
    } else {
        for (const auto& c : r.checks)
            os << (c.criterion < 10 ? " " : "") << c.criterion << " " << (c.pass ? "PASS" : "FAIL") << " " << c.name
               << ": " << c.detail << "\n";
    }
    return r.passed() ? 0 : 1;
}

void emit_error(const std::string& kind, const std::string& message)
{
    std::cerr << json{{"schema", 1}, {"error", kind}, {"message", message}}.dump() << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Whittaker functions, path transforms and q-deformed chains"};
    app.set_help_all_flag("--help-all");
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; command-line flags override it");
    app.require_subcommand(0, 1);

    // option name → storage; membership per subcommand
    std::map<std::string, std::string> storage;
    std::map<std::string, std::vector<CLI::Option*>> options;
    auto add = [&](CLI::App* sub, const std::string& key, const std::string& help) {
        options[key].push_back(sub->add_option("--" + key, storage[key], help));
    };
    auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config_path, "JSON config file"); };

    CLI::App* eval = app.add_subcommand("eval", "evaluate ψ, J, K_ν, θ_t or m_ν");
    add_config(eval);
    for (auto [k, h] : std::vector<std::pair<std::string, std::string>>{
             {"fn", "psi | J | K | theta | m"}, {"n", "dimension"}, {"lambda", "comma-separated spectral parameter"},
             {"x", "comma-separated point"}, {"t", "time (theta)"}, {"nu", "order (K)"}, {"z", "argument (K)"},
             {"route", "quadrature | lusztig | tarray | series | closed_form | givental_mc | feynman_kac"},
             {"samples", "Monte Carlo samples"}, {"seed", "random seed"}, {"dt", "time step (feynman_kac)"},
             {"horizon", "time horizon (feynman_kac)"}, {"out", "output path"}})
        add(eval, k, h);

    CLI::App* sim = app.add_subcommand("simulate", "write a trajectory CSV");
    add_config(sim);
    for (auto [k, h] : std::vector<std::pair<std::string, std::string>>{
             {"process", "array | particles | lusztig | brownian"}, {"n", "dimension"}, {"mu", "comma-separated drift"},
             {"t", "final time"}, {"dt", "grid step"}, {"seed", "random seed"}, {"word", "reduced word (lusztig)"},
             {"out", "output path"}})
        add(sim, k, h);

    CLI::App* ver = app.add_subcommand("verify", "run a verification suite and write a JSON report");
    add_config(ver);
    for (auto [k, h] : std::vector<std::pair<std::string, std::string>>{
             {"suite", "givental-cross | cells | q-exact | laws"}, {"q", "exact q (q-exact)"}, {"t", "exact t = q^ν (q-exact)"},
             {"zmax", "largest z (q-exact)"}, {"steps", "brute-force steps (q-exact)"}, {"scale", "sample-count multiplier"},
             {"seed", "random seed"}, {"out", "output path"}})
        add(ver, k, h);

    CLI::App* tab = app.add_subcommand("table", "run the full acceptance battery");
    add_config(tab);
    for (auto [k, h] : std::vector<std::pair<std::string, std::string>>{
             {"scale", "sample-count multiplier"}, {"seed", "random seed"}, {"format", "text | json"}, {"out", "output path"}})
        add(tab, k, h);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("usage", e.what());
        return 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw UsageError("cannot open config " + config_path);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw UsageError(std::string("config is not valid JSON: ") + e.what());
            }
            if (!j.is_object()) throw UsageError("config must be a JSON object");
            for (const auto& [k, v] : j.items()) {
                if (k == "command") {
                    cfg.command = v.get<std::string>();
                    continue;
                }
                if (v.is_string()) cfg.set(k, v.get<std::string>());
                else if (v.is_array()) {
                    std::string s;
                    for (const auto& e : v) s += (s.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
                    cfg.set(k, s);
                } else cfg.set(k, v.dump());
            }
        }
        for (CLI::App* sub : {eval, sim, ver, tab})
            if (sub->parsed()) cfg.command = sub->get_name();
        if (cfg.command.empty()) throw UsageError("no command given (eval, simulate, verify, table)");
        CLI::App* active = app.get_subcommand(cfg.command);
        for (const auto& [key, opts] : options)
            for (CLI::Option* o : opts)
                if (o->count() > 0 && active->get_option_no_throw("--" + key) == o) cfg.set(key, storage[key]);

        if (cfg.command == "eval") return run_eval(cfg);
        if (cfg.command == "simulate") return run_simulate(cfg);
        if (cfg.command == "verify") return run_verify(cfg);
        if (cfg.command == "table") return run_table(cfg);
        throw UsageError("unknown command '" + cfg.command + "'");
    } catch (const UsageError& e) {
        emit_error("usage", e.what());
        return 2;
    } catch (const CLI::OptionNotFound& e) {
        emit_error("usage", e.what());
        return 2;
    } catch (const DomainError& e) {
        emit_error("domain", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("runtime", e.what());
        return 1;
    }
}
