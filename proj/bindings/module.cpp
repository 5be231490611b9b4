#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ultralab/derivative.hpp"
#include "ultralab/evolution.hpp"
#include "ultralab/levels.hpp"
#include "ultralab/observable.hpp"

namespace py = pybind11;
using namespace ultralab;

namespace {

std::string order_tag_name(OrderTag t) {
    switch (t) {
        case OrderTag::infinitesimal: return "infinitesimal";
        case OrderTag::finite_nonzero_st: return "finite_nonzero_st";
        case OrderTag::infinite: return "infinite";
    }
    return "?";
}

std::string relation_name(Relation r) {
    switch (r) {
        case Relation::infinitely_close: return "infinitely_close";
        case Relation::finitely_separated: return "finitely_separated";
        case Relation::infinitely_separated: return "infinitely_separated";
    }
    return "?";
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite-level laboratory for grid functions over a non-Archimedean scalar model";

    py::class_<EuclideanScalar>(m, "EuclideanScalar")
        .def(py::init<double, int>(), py::arg("value"), py::arg("trunc") = EuclideanScalar::kDefaultTruncation)
        .def_static("parse", &EuclideanScalar::parse, py::arg("text"),
                    py::arg("trunc") = EuclideanScalar::kDefaultTruncation)
        .def_static("alpha", &EuclideanScalar::alpha, py::arg("trunc") = EuclideanScalar::kDefaultTruncation)
        .def_static(
            "monomial",
            [](double c, std::int64_t p, std::int64_t q, int trunc) {
                return EuclideanScalar::monomial(c, Rational(p, q), trunc);
            },
            py::arg("coeff"), py::arg("exp_num"), py::arg("exp_den") = 1,
            py::arg("trunc") = EuclideanScalar::kDefaultTruncation)
        .def("render", &EuclideanScalar::render)
        .def("standard_part", &EuclideanScalar::standard_part)
        .def("is_zero", &EuclideanScalar::is_zero)
        .def("classify",
             [](const EuclideanScalar& s) {
                 const OrderClass c = s.classify();
                 py::object exp = c.leading_exponent
                                      ? py::cast(c.leading_exponent->to_double())
                                      : py::none();
                 return py::make_tuple(order_tag_name(c.tag), exp);
             })
        .def("terms",
             [](const EuclideanScalar& s) {
                 std::vector<std::tuple<std::int64_t, std::int64_t, double>> out;
                 for (const Term& t : s.terms())
                     out.emplace_back(t.exponent.num(), t.exponent.den(), t.coeff);
                 return out;
             })
        .def("invert", [](const EuclideanScalar& s) { return invert(s); })
        .def("__add__", [](const EuclideanScalar& a, const EuclideanScalar& b) { return add(a, b); })
        .def("__sub__", [](const EuclideanScalar& a, const EuclideanScalar& b) { return sub(a, b); })
        .def("__mul__", [](const EuclideanScalar& a, const EuclideanScalar& b) { return mul(a, b); })
        .def("__neg__", [](const EuclideanScalar& a) { return -a; })
        .def("__lt__", [](const EuclideanScalar& a, const EuclideanScalar& b) { return a < b; })
        .def("__gt__", [](const EuclideanScalar& a, const EuclideanScalar& b) { return a > b; })
        .def("__eq__", [](const EuclideanScalar& a, const EuclideanScalar& b) { return a == b; })
        .def("__repr__", [](const EuclideanScalar& s) { return "EuclideanScalar(" + s.render() + ")"; });

    m.def("eval_scalar_expression", &eval_scalar_expression, py::arg("text"),
          py::arg("trunc") = EuclideanScalar::kDefaultTruncation);
    m.def("relate", [](const EuclideanScalar& a, const EuclideanScalar& b) {
        return relation_name(relate(a, b));
    });

    py::class_<LevelChain>(m, "LevelChain")
        .def(py::init<int, int, double>(), py::arg("m_min"), py::arg("m_max"), py::arg("h0") = 1.0)
        .def_readonly("m_min", &LevelChain::m_min)
        .def_readonly("m_max", &LevelChain::m_max)
        .def_readonly("h0", &LevelChain::h0)
        .def("h", &LevelChain::h)
        .def("alpha", &LevelChain::alpha)
        .def("naturals_section", &LevelChain::naturals_section);

    py::class_<AsymptoticProfile>(m, "AsymptoticProfile")
        .def_readonly("exponent", &AsymptoticProfile::exponent)
        .def_readonly("coefficient", &AsymptoticProfile::coefficient)
        .def_readonly("r_squared", &AsymptoticProfile::r_squared)
        .def_readonly("used_absolute_values", &AsymptoticProfile::used_absolute_values)
        .def("rendered", [](const AsymptoticProfile& p) { return p.rendered.render(); });

    m.def("asymptotic_profile", &asymptotic_profile, py::arg("net"), py::arg("chain"));
    m.def("numerosity", &numerosity, py::arg("finite_set"), py::arg("m"), py::arg("chain"));
    m.def("numerosity_naturals", &numerosity_naturals, py::arg("m"), py::arg("chain"));
    m.def("standard_limit_check", &standard_limit_check, py::arg("net"), py::arg("chain"), py::arg("tol"));

    py::class_<Grid, GridPtr>(m, "Grid")
        .def_property_readonly("level", &Grid::level)
        .def_property_readonly("spacing", &Grid::spacing)
        .def_property_readonly("dim", &Grid::dim)
        .def("nodes", [](const Grid& g) { return std::vector<double>(g.nodes().begin(), g.nodes().end()); })
        .def("weights",
             [](const Grid& g) { return std::vector<double>(g.weights().begin(), g.weights().end()); })
        .def("find_node", &Grid::find_node);

    m.def(
        "build_grid",
        [](const LevelChain& chain, int mlev, double lo, double hi, double pad,
           const std::vector<double>& required) {
            return build_grid(chain, mlev, {lo, hi}, pad, required);
        },
        py::arg("chain"), py::arg("m"), py::arg("lo"), py::arg("hi"), py::arg("pad") = 0.5,
        py::arg("required") = std::vector<double>{});

    py::class_<Ultrafunction>(m, "Ultrafunction")
        .def(py::init<GridPtr, Eigen::VectorXcd>(), py::arg("grid"), py::arg("values"))
        .def_property_readonly("grid", &Ultrafunction::grid)
        .def("values", [](const Ultrafunction& u) { return u.values(); })
        .def("at_node", &Ultrafunction::at_node)
        .def("__add__", [](const Ultrafunction& a, const Ultrafunction& b) { return a + b; })
        .def("__sub__", [](const Ultrafunction& a, const Ultrafunction& b) { return a - b; })
        .def("__mul__", [](const Ultrafunction& a, Complex c) { return a * c; });

    m.def("pointwise_integral", &pointwise_integral);
    m.def("inner_product", &inner_product);
    m.def("norm", [](const Ultrafunction& u) { return norm(u); });
    m.def("normalized", [](const Ultrafunction& u) { return normalized(u); });
    m.def("delta", &delta, py::arg("grid"), py::arg("a"));
    m.def("normalized_delta", &normalized_delta, py::arg("grid"), py::arg("a"));
    m.def("embed_continuous", &embed_continuous_real, py::arg("grid"), py::arg("f"));
    m.def("embed_weak", &embed_weak, py::arg("grid"), py::arg("f"));

    py::class_<DerivativeOperator>(m, "DerivativeOperator")
        .def_property_readonly("sigma_min", &DerivativeOperator::sigma_min)
        .def_property_readonly("bandwidth", &DerivativeOperator::bandwidth)
        .def_property_readonly("antisymmetry_defect", &DerivativeOperator::antisymmetry_defect)
        .def_property_readonly("consistency_error", &DerivativeOperator::consistency_error)
        .def("matrix", [](const DerivativeOperator& d) { return d.matrix(); })
        .def("apply", [](const DerivativeOperator& d, const Ultrafunction& u) { return d.apply(u); });

    m.def("build_derivative", &build_derivative, py::arg("grid"), py::arg("p") = 2, py::arg("w") = 1);

    m.def("check_axioms", [](const GridPtr& g, const DerivativeOperator& D) {
        const AxiomReport rep = check_axioms(g, D);
        py::list out;
        for (const auto& e : rep.entries) {
            py::dict d;
            d["name"] = e.name;
            d["value"] = e.value;
            d["threshold"] = e.threshold;
            d["pass"] = e.pass;
            out.append(d);
        }
        return out;
    });

    py::class_<Observable>(m, "Observable")
        .def_property_readonly("hermitian_defect", &Observable::hermitian_defect)
        .def("matrix", [](const Observable& a) { return a.matrix(); })
        .def("apply", &Observable::apply);

    m.def("position_operator", &position_operator);
    m.def("momentum_operator", &momentum_operator);
    m.def("hamiltonian_zero",
          [](const DerivativeOperator& D) { return hamiltonian(D, ZeroPotential{}); });
    m.def("hamiltonian_sampled", [](const DerivativeOperator& D, std::function<double(double)> f) {
        return hamiltonian(D, SampledPotential{std::move(f)});
    });
    m.def("hamiltonian_delta_bump", [](const DerivativeOperator& D, double k, double a) {
        return hamiltonian(D, DeltaBump{k, a});
    });
    m.def("hamiltonian_indicator_penalty", [](const DerivativeOperator& D, double lo, double hi) {
        return hamiltonian(D, IndicatorPenalty{{lo, hi}});
    });
    m.def("hamiltonian_dirichlet_box", [](const DerivativeOperator& D, double lo, double hi) {
        return hamiltonian(D, DirichletBox{{lo, hi}});
    });
    m.def("neumann_hamiltonian", [](const DerivativeOperator& D, const GridPtr& g, double lo, double hi) {
        return neumann_hamiltonian(D, g, {lo, hi});
    });
    m.def("commutator", &commutator);
    m.def("expectation", &expectation);

    py::class_<SpectrumResult>(m, "SpectrumResult")
        .def_readonly("eigenvalues", &SpectrumResult::eigenvalues)
        .def_readonly("st_groups", &SpectrumResult::st_groups)
        .def_readonly("residuals", &SpectrumResult::residuals)
        .def_readonly("st_tol", &SpectrumResult::st_tol)
        .def("eigenvector", &SpectrumResult::eigenvector)
        .def("group_value", &SpectrumResult::group_value);

    m.def(
        "spectrum",
        [](const Observable& A, double st_tol_rel, std::optional<double> st_tol_abs) {
            SpectrumOptions o;
            o.st_tol_rel = st_tol_rel;
            o.st_tol_abs = st_tol_abs;
            return spectrum(A, o);
        },
        py::arg("A"), py::arg("st_tol_rel") = 1e-6, py::arg("st_tol_abs") = std::nullopt);

    m.def("measure", [](const Ultrafunction& psi, const Observable& A) {
        const MeasurementDistribution dist = measure(psi, A);
        py::list out;
        for (const auto& o : dist.outcomes) {
            py::dict d;
            d["outcome"] = o.value;
            d["probability"] = o.probability;
            d["post_state"] = o.post_state;
            d["group_size"] = o.group_size;
            out.append(d);
        }
        return out;
    });

    py::class_<EvolutionResult>(m, "EvolutionResult")
        .def_readonly("times", &EvolutionResult::times)
        .def("state", [](const EvolutionResult& r, std::size_t k) { return r.states.at(k); })
        .def("traces", [](const EvolutionResult& r) {
            py::list out;
            for (const auto& tr : r.traces) {
                py::dict d;
                d["t"] = tr.t;
                d["norm"] = tr.norm;
                d["energy"] = tr.energy;
                d["integral"] = tr.integral;
                out.append(d);
            }
            return out;
        });

    m.def(
        "evolve",
        [](const Observable& H, const std::string& mode, const Ultrafunction& psi0,
           const std::vector<double>& times) {
            const EvolutionMode em = mode == "heat" ? EvolutionMode::heat : EvolutionMode::schrodinger;
            return evolve(H, em, psi0, times);
        },
        py::arg("H"), py::arg("mode"), py::arg("psi0"), py::arg("times"));

    m.def("classify_state",
          [](const LevelChain& chain, const std::function<std::pair<Observable, Ultrafunction>(int)>& b) {
              const StateClassification c = classify_state(chain, [&b](int mlev) {
                  auto [H, psi] = b(mlev);
                  return LevelSample{std::move(H), std::move(psi)};
              });
              return py::make_tuple(c.kind == StateKind::physical ? "physical" : "ideal",
                                    c.exponent, c.fit_quality);
          });
}
