// Batch experiment runner: every subsystem behind one deterministic CLI.
// Outputs are plain CSV/JSON with LF endings and 17-significant-digit floats,
// so identical configs give byte-identical files.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "ultralab/derivative.hpp"
#include "ultralab/evolution.hpp"
#include "ultralab/io.hpp"
#include "ultralab/levels.hpp"
#include "ultralab/observable.hpp"

namespace ul = ultralab;

namespace {

struct ExperimentConfig {
    int level = 6;
    std::string levels = "4..9";
    double domain_lo = 0.0;
    double domain_hi = 1.0;
    double pad = 0.5;
    int p = 2;
    int w = 1;
    double h0 = 1.0;
    std::string op = "hamiltonian";
    std::string potential = "zero";
    double bump_strength = 1.0;
    double bump_node = 0.5;
    double box_lo = 0.0;
    double box_hi = 1.0;
    std::string state = "gaussian";
    double sigma = 0.2;
    double center = 0.5;
    int mode_n = 1;
    std::string mode = "heat";
    std::string times = "0,0.05,0.1,0.2";
    double st_tol = 1e-6;
    double st_tol_abs = 0.0;
    std::string quantity = "poincare";
    double tol = 1e-4;
    std::string out;
    std::string eigenvectors;
};

// One row per key: parsing, canonical dump and flag registration stay in sync.
struct KeyEntry {
    std::string name;
    std::function<std::string(const ExperimentConfig&)> dump;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
    std::istringstream is(text);
    T v;
    is >> v;
    if (is.fail()) throw std::invalid_argument("config key '" + key + "': bad value '" + text + "'");
    return v;
}

std::vector<KeyEntry> key_registry() {
    auto num = [](double v) { return ul::fmt_g17(v); };
    std::vector<KeyEntry> keys;
    auto add_int = [&](const std::string& n, int ExperimentConfig::* f) {
        keys.push_back({n, [f](const ExperimentConfig& c) { return std::to_string(c.*f); },
                        [f, n](ExperimentConfig& c, const std::string& s) { c.*f = parse_value<int>(n, s); }});
    };
    auto add_double = [&](const std::string& n, double ExperimentConfig::* f) {
        keys.push_back({n, [f, num](const ExperimentConfig& c) { return num(c.*f); },
                        [f, n](ExperimentConfig& c, const std::string& s) { c.*f = parse_value<double>(n, s); }});
    };
    auto add_string = [&](const std::string& n, std::string ExperimentConfig::* f) {
        keys.push_back({n, [f](const ExperimentConfig& c) { return c.*f; },
                        [f](ExperimentConfig& c, const std::string& s) { c.*f = s; }});
    };
    add_int("level", &ExperimentConfig::level);
    add_string("levels", &ExperimentConfig::levels);
    add_double("domain_lo", &ExperimentConfig::domain_lo);
    add_double("domain_hi", &ExperimentConfig::domain_hi);
    add_double("pad", &ExperimentConfig::pad);
    add_int("p", &ExperimentConfig::p);
    add_int("w", &ExperimentConfig::w);
    add_double("h0", &ExperimentConfig::h0);
    add_string("operator", &ExperimentConfig::op);
    add_string("potential", &ExperimentConfig::potential);
    add_double("bump_strength", &ExperimentConfig::bump_strength);
    add_double("bump_node", &ExperimentConfig::bump_node);
    add_double("box_lo", &ExperimentConfig::box_lo);
    add_double("box_hi", &ExperimentConfig::box_hi);
    add_string("state", &ExperimentConfig::state);
    add_double("sigma", &ExperimentConfig::sigma);
    add_double("center", &ExperimentConfig::center);
    add_int("mode_n", &ExperimentConfig::mode_n);
    add_string("mode", &ExperimentConfig::mode);
    add_string("times", &ExperimentConfig::times);
    add_double("st_tol", &ExperimentConfig::st_tol);
    add_double("st_tol_abs", &ExperimentConfig::st_tol_abs);
    add_string("quantity", &ExperimentConfig::quantity);
    add_double("tol", &ExperimentConfig::tol);
    add_string("out", &ExperimentConfig::out);
    add_string("eigenvectors", &ExperimentConfig::eigenvectors);
    return keys;
}

std::string dump_config(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& k : key_registry()) out += k.name + " = " + k.dump(cfg) + "\n";
    return out;
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not readable: " + path);
    const auto keys = key_registry();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool found = false;
        for (const auto& k : keys) {
            if (k.name == key) { k.set(cfg, value); found = true; break; }
        }
        if (!found) throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

std::vector<double> parse_times(const std::string& text) {
    std::vector<double> ts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) ts.push_back(parse_value<double>("times", item));
    }
    if (ts.empty()) throw std::invalid_argument("times: empty list");
    return ts;
}

std::pair<int, int> parse_level_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw std::invalid_argument("levels: expected form lo..hi");
    return {parse_value<int>("levels", text.substr(0, dots)),
            parse_value<int>("levels", text.substr(dots + 2))};
}

struct Workbench {
    ul::LevelChain chain;
    ul::GridPtr grid;
    ul::DerivativeOperator D;

    Workbench(const ExperimentConfig& cfg, int m)
        : chain(0, 16, cfg.h0),
          grid(ul::build_grid(chain, m, {cfg.domain_lo, cfg.domain_hi}, cfg.pad)),
          D(ul::build_derivative(grid, cfg.p, cfg.w)) {}
};

ul::Observable make_operator(const ExperimentConfig& cfg, const Workbench& wb) {
    if (cfg.op == "position") return ul::position_operator(wb.grid);
    if (cfg.op == "momentum") return ul::momentum_operator(wb.D);
    if (cfg.op == "neumann")
        return ul::neumann_hamiltonian(wb.D, wb.grid, {cfg.box_lo, cfg.box_hi});
    if (cfg.op != "hamiltonian") throw std::invalid_argument("operator: unknown kind " + cfg.op);

    ul::PotentialSpec pot = ul::ZeroPotential{};
    if (cfg.potential == "zero") {
    } else if (cfg.potential == "harmonic") {
        pot = ul::SampledPotential{[](double x) { return 0.5 * x * x; }};
    } else if (cfg.potential == "delta_bump") {
        pot = ul::DeltaBump{cfg.bump_strength, cfg.bump_node};
    } else if (cfg.potential == "indicator_penalty") {
        pot = ul::IndicatorPenalty{{cfg.box_lo, cfg.box_hi}};
    } else if (cfg.potential == "dirichlet_box") {
        pot = ul::DirichletBox{{cfg.box_lo, cfg.box_hi}};
    } else {
        throw std::invalid_argument("potential: unknown kind " + cfg.potential);
    }
    return ul::hamiltonian(wb.D, pot);
}

ul::Ultrafunction make_state(const ExperimentConfig& cfg, const ul::GridPtr& grid) {
    if (cfg.state == "gaussian") {
        const double c = cfg.center, s = cfg.sigma;
        return ul::normalized(ul::embed_continuous_real(
            grid, [c, s](double x) { return std::exp(-(x - c) * (x - c) / (4.0 * s * s)); }));
    }
    if (cfg.state == "sin_mode") {
        const double lo = cfg.box_lo, hi = cfg.box_hi;
        const int n = cfg.mode_n;
        return ul::embed_continuous_real(grid, [lo, hi, n](double x) {
            if (x < lo || x > hi) return 0.0;
            return std::sin(n * M_PI * (x - lo) / (hi - lo));
        });
    }
    if (cfg.state == "normalized_delta") return ul::normalized_delta(grid, cfg.center);
    if (cfg.state == "constant") {
        return ul::normalized(ul::embed_continuous_real(grid, [](double) { return 1.0; }));
    }
    throw std::invalid_argument("state: unknown kind " + cfg.state);
}

ul::SpectrumOptions spectrum_options(const ExperimentConfig& cfg) {
    ul::SpectrumOptions o;
    o.st_tol_rel = cfg.st_tol;
    if (cfg.st_tol_abs > 0.0) o.st_tol_abs = cfg.st_tol_abs;
    return o;
}

void emit(const ExperimentConfig& cfg, const std::string& filename, const std::string& content,
          bool also_stdout = true) {
    if (also_stdout) std::cout << content;
    if (!cfg.out.empty()) {
        std::filesystem::create_directories(cfg.out);
        std::ofstream f(std::filesystem::path(cfg.out) / filename, std::ios::binary);
        f << content;
    }
}

int cmd_axioms(const ExperimentConfig& cfg) {
    Workbench wb(cfg, cfg.level);
    const ul::AxiomReport rep = ul::check_axioms(wb.grid, wb.D);
    std::ostringstream os;
    ul::write_json(os, rep);
    emit(cfg, "axioms.json", os.str());
    return 0;
}

int cmd_spectrum(const ExperimentConfig& cfg) {
    Workbench wb(cfg, cfg.level);
    const ul::SpectrumResult spec = ul::spectrum(make_operator(cfg, wb), spectrum_options(cfg));
    std::ostringstream os;
    ul::write_csv(os, spec);
    emit(cfg, "spectrum.csv", os.str());
    if (!cfg.eigenvectors.empty()) {
        if (cfg.out.empty())
            throw std::invalid_argument("eigenvectors: requires out directory");
        std::stringstream ss(cfg.eigenvectors);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto j = static_cast<std::size_t>(parse_value<int>("eigenvectors", item));
            if (j >= static_cast<std::size_t>(spec.eigenvalues.size()))
                throw std::invalid_argument("eigenvectors: index out of range");
            std::ostringstream vs;
            ul::write_csv(vs, spec.eigenvector(j));
            emit(cfg, "eigvec_" + std::to_string(j) + ".csv", vs.str(), false);
        }
    }
    return 0;
}

int cmd_evolve(const ExperimentConfig& cfg) {
    Workbench wb(cfg, cfg.level);
    const ul::Observable H = make_operator(cfg, wb);
    const ul::Ultrafunction psi0 = make_state(cfg, wb.grid);
    const ul::EvolutionMode mode =
        cfg.mode == "heat" ? ul::EvolutionMode::heat
        : cfg.mode == "schrodinger"
            ? ul::EvolutionMode::schrodinger
            : throw std::invalid_argument("mode: unknown kind " + cfg.mode);
    const ul::EvolutionResult res =
        ul::evolve(H, mode, psi0, parse_times(cfg.times), spectrum_options(cfg));

    std::ostringstream traces;
    ul::write_traces_csv(traces, res.traces);
    emit(cfg, "traces.csv", traces.str());
    if (!cfg.out.empty()) {
        std::ostringstream states;
        ul::write_states_csv(states, res);
        emit(cfg, "states.csv", states.str(), false);
    }
    return 0;
}

int cmd_measure(const ExperimentConfig& cfg) {
    Workbench wb(cfg, cfg.level);
    const ul::MeasurementDistribution dist =
        ul::measure(make_state(cfg, wb.grid), make_operator(cfg, wb), spectrum_options(cfg));
    std::ostringstream os;
    ul::write_json(os, dist);
    emit(cfg, "measure.json", os.str());
    return 0;
}

int cmd_commutator(const ExperimentConfig& cfg) {
    Workbench wb(cfg, cfg.level);
    const ul::Observable Q = ul::position_operator(wb.grid);
    const ul::Observable P = ul::momentum_operator(wb.D);
    const ul::Observable QP = ul::commutator(Q, P);
    const ul::Observable PQ = ul::commutator(P, Q);

    const ul::Ultrafunction da = ul::delta(wb.grid, cfg.bump_node);
    const ul::Ultrafunction psi = make_state(cfg, wb.grid);
    const ul::Complex delta_val = ul::inner_product(PQ.apply(da), da);
    const ul::Complex gauss_val = ul::inner_product(QP.apply(psi), psi);
    const double dev =
        std::abs(gauss_val - ul::Complex(0.0, 1.0));

    std::ostringstream os;
    os << "{\n  \"delta_pq_expectation_abs\": " << ul::fmt_g17(std::abs(delta_val))
       << ",\n  \"gaussian_qp_expectation_re\": " << ul::fmt_g17(gauss_val.real())
       << ",\n  \"gaussian_qp_expectation_im\": " << ul::fmt_g17(gauss_val.imag())
       << ",\n  \"deviation_from_i\": " << ul::fmt_g17(dev) << "\n}\n";
    emit(cfg, "commutator.json", os.str());
    return 0;
}

int cmd_refine(const ExperimentConfig& cfg) {
    const auto [lo, hi] = parse_level_range(cfg.levels);
    const ul::LevelChain chain(lo, hi, cfg.h0);

    std::function<double(int)> net;
    const std::string q = cfg.quantity;
    if (q == "poincare" || q == "delta_energy" || q == "gaussian_energy" || q == "consistency") {
        net = [&cfg, q](int m) {
            Workbench wb(cfg, m);
            if (q == "consistency") return wb.D.consistency_error();
            if (q == "poincare") {
                const ul::Ultrafunction da = ul::delta(wb.grid, cfg.center);
                return ul::norm(wb.D.apply(da)) / ul::norm(da);
            }
            const ul::Ultrafunction psi = q == "delta_energy"
                                              ? ul::normalized_delta(wb.grid, cfg.center)
                                              : make_state(cfg, wb.grid);
            const ul::Observable H = ul::hamiltonian(wb.D, ul::ZeroPotential{});
            return ul::expectation(H, psi).real();
        };
    } else if (q == "bump_energy") {
        net = [&cfg](int m) {
            ExperimentConfig c = cfg;
            c.domain_lo = -1.0;
            c.domain_hi = 1.0;
            Workbench wb(c, m);
            const ul::Ultrafunction psi = ul::normalized(ul::embed_continuous_real(
                wb.grid, [](double x) {
                    return std::pow(std::abs(x), -0.25) * std::exp(-x * x / 0.125);
                }));
            return ul::expectation(ul::hamiltonian(wb.D, ul::ZeroPotential{}), psi).real();
        };
    } else if (q == "trapezoid_gauss") {
        net = [&cfg](int m) {
            ExperimentConfig c = cfg;
            c.domain_lo = -4.0;
            c.domain_hi = 4.0;
            c.pad = 0.0;
            const ul::LevelChain ch(0, 16, c.h0);
            const ul::GridPtr g = ul::build_grid(ch, m, {c.domain_lo, c.domain_hi}, c.pad);
            return ul::pointwise_integral(
                       ul::embed_continuous_real(g, [](double x) { return std::exp(-x * x); }))
                .real();
        };
    } else {
        throw std::invalid_argument("quantity: unknown kind " + q);
    }

    std::ostringstream os;
    os << "m,h,alpha,value\n";
    for (int m = lo; m <= hi; ++m)
        os << m << ',' << ul::fmt_g17(chain.h(m)) << ',' << ul::fmt_g17(chain.alpha(m)) << ','
           << ul::fmt_g17(net(m)) << '\n';
    const ul::AsymptoticProfile fit = ul::asymptotic_profile(net, chain);
    os << "# fit exponent=" << ul::fmt_g17(fit.exponent)
       << " coefficient=" << ul::fmt_g17(fit.coefficient)
       << " r_squared=" << ul::fmt_g17(fit.r_squared)
       << " rendered=" << fit.rendered.render() << "\n";
    const auto limit = ul::standard_limit_check(net, chain, cfg.tol);
    os << "# limit " << (limit ? ul::fmt_g17(*limit) : std::string("absent")) << "\n";
    emit(cfg, "refine.csv", os.str());
    return 0;
}

int cmd_numerosity(const ExperimentConfig& cfg, const std::string& set_text, bool naturals) {
    const ul::LevelChain chain(0, 16, cfg.h0);
    if (naturals) {
        std::cout << ul::numerosity_naturals(cfg.level, chain) << "\n";
        return 0;
    }
    std::vector<double> xs;
    std::stringstream ss(set_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) xs.push_back(parse_value<double>("set", item));
    }
    std::cout << ul::numerosity(xs, cfg.level, chain) << "\n";
    return 0;
}

int cmd_scalar_eval(const std::string& expr) {
    std::cout << ul::eval_scalar_expression(expr).render() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ultralab: finite-level non-Archimedean grid laboratory"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string config_path;
    bool dump = false;
    std::string set_text;
    bool naturals = false;
    std::string expr;

    const auto keys = key_registry();
    std::map<std::string, std::string> flag_values;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_flag("--dump-config", dump, "print the canonical config and exit");
        for (const auto& k : keys) {
            std::string flag = "--" + k.name;
            for (auto& c : flag) if (c == '_') c = '-';
            sub->add_option_function<std::string>(
                flag, [&flag_values, name = k.name](const std::string& v) { flag_values[name] = v; });
        }
    };

    CLI::App* axioms = app.add_subcommand("axioms", "axiom certification report (JSON)");
    CLI::App* spectrumc = app.add_subcommand("spectrum", "full eigendecomposition (CSV)");
    CLI::App* evolvec = app.add_subcommand("evolve", "heat/Schroedinger evolution (CSV)");
    CLI::App* measurec = app.add_subcommand("measure", "measurement distribution (JSON)");
    CLI::App* commutatorc = app.add_subcommand("commutator", "position/momentum commutator report (JSON)");
    CLI::App* refinec = app.add_subcommand("refine", "level scan with power-law fit (CSV)");
    CLI::App* numerosityc = app.add_subcommand("numerosity", "counting measure of a finite set");
    CLI::App* scalarc = app.add_subcommand("scalar-eval", "evaluate a scalar expression");

    for (CLI::App* sub : {axioms, spectrumc, evolvec, measurec, commutatorc, refinec, numerosityc})
        add_common(sub);
    numerosityc->add_option("--set", set_text, "comma-separated reals");
    numerosityc->add_flag("--naturals", naturals, "numerosity of the naturals section");
    scalarc->add_option("expr", expr, "expression, e.g. \"st(3 + 5*a^-1)\"")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        for (const auto& [name, value] : flag_values) {
            for (const auto& k : keys)
                if (k.name == name) { k.set(cfg, value); break; }
        }
        if (dump) {
            std::cout << dump_config(cfg);
            return 0;
        }
        if (axioms->parsed()) return cmd_axioms(cfg);
        if (spectrumc->parsed()) return cmd_spectrum(cfg);
        if (evolvec->parsed()) return cmd_evolve(cfg);
        if (measurec->parsed()) return cmd_measure(cfg);
        if (commutatorc->parsed()) return cmd_commutator(cfg);
        if (refinec->parsed()) return cmd_refine(cfg);
        if (numerosityc->parsed()) return cmd_numerosity(cfg, set_text, naturals);
        if (scalarc->parsed()) return cmd_scalar_eval(expr);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
