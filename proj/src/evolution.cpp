#include "ultralab/evolution.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ultralab/io.hpp"

namespace ultralab {

EvolutionResult evolve(const Observable& H, EvolutionMode mode, const Ultrafunction& psi0,
                       const std::vector<double>& times, const SpectrumOptions& opts) {
    if (psi0.grid().get() != H.grid().get()) throw std::invalid_argument("evolve: grid mismatch");
    if (times.empty() || times.front() != 0.0)
        throw std::invalid_argument("evolve: times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("evolve: times must be ascending");

    const SpectrumResult spec = spectrum(H, opts);
    const auto n = static_cast<Eigen::Index>(psi0.dim());
    const auto d = H.grid()->weights();

    Eigen::VectorXcd coeff(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Complex c = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            c += psi0[static_cast<std::size_t>(i)] * std::conj(spec.eigenvectors(i, j)) *
                 d[static_cast<std::size_t>(i)];
        coeff[j] = c;
    }

    EvolutionResult out;
    out.mode = mode;
    out.times = times;
    out.states.reserve(times.size());
    for (double t : times) {
        if (t == 0.0) {
            out.states.push_back(psi0);
            continue;
        }
        Eigen::VectorXcd amp(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double mu = spec.eigenvalues[j];
            amp[j] = mode == EvolutionMode::heat
                         ? coeff[j] * std::exp(-t * mu)
                         : coeff[j] * std::exp(Complex(0.0, -t * mu));
        }
        out.states.emplace_back(psi0.grid(), spec.eigenvectors * amp);
    }
    out.traces = conservation_traces(out, H);
    return out;
}

std::vector<EvolutionResult::Trace> conservation_traces(const EvolutionResult& result,
                                                        const Observable& H) {
    std::vector<EvolutionResult::Trace> traces;
    traces.reserve(result.states.size());
    for (std::size_t k = 0; k < result.states.size(); ++k) {
        const Ultrafunction& u = result.states[k];
        EvolutionResult::Trace tr;
        tr.t = result.times[k];
        tr.norm = norm(u);
        tr.energy = expectation(H, u).real();
        tr.integral = pointwise_integral(u);
        traces.push_back(tr);
    }
    return traces;
}

void write_states_csv(std::ostream& os, const EvolutionResult& result) {
    os << "t,node,re,im\n";
    for (std::size_t k = 0; k < result.states.size(); ++k) {
        const Ultrafunction& u = result.states[k];
        const auto x = u.grid()->nodes();
        for (std::size_t i = 0; i < x.size(); ++i)
            os << fmt_g17(result.times[k]) << ',' << fmt_g17(x[i]) << ',' << fmt_g17(u[i].real())
               << ',' << fmt_g17(u[i].imag()) << '\n';
    }
}

void write_traces_csv(std::ostream& os, const std::vector<EvolutionResult::Trace>& traces) {
    os << "t,norm,energy,integral_re,integral_im\n";
    for (const auto& tr : traces)
        os << fmt_g17(tr.t) << ',' << fmt_g17(tr.norm) << ',' << fmt_g17(tr.energy) << ','
           << fmt_g17(tr.integral.real()) << ',' << fmt_g17(tr.integral.imag()) << '\n';
}

} // namespace ultralab
