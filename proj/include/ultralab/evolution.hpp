#pragma once

#include <iosfwd>

#include "ultralab/observable.hpp"

namespace ultralab {

enum class EvolutionMode { heat, schrodinger };

/// States and conserved-quantity traces along a time sequence. The t = 0
/// state is the initial state exactly.
struct EvolutionResult {
    EvolutionMode mode = EvolutionMode::heat;
    std::vector<double> times;
    std::vector<Ultrafunction> states;

    struct Trace {
        double t = 0.0;
        double norm = 0.0;
        double energy = 0.0;
        Complex integral;
    };
    std::vector<Trace> traces;
};

/// Spectral propagation: state(t) = sum_j g(mu_j, t) <psi0, psi_j> psi_j with
/// g = exp(-t mu) for heat and exp(-i t mu) for the Schroedinger flow.
/// Times must be ascending with times[0] == 0.
EvolutionResult evolve(const Observable& H, EvolutionMode mode, const Ultrafunction& psi0,
                       const std::vector<double>& times, const SpectrumOptions& opts = {});

/// Per-time norm / energy / total integral, recomputed from the states.
std::vector<EvolutionResult::Trace> conservation_traces(const EvolutionResult& result,
                                                        const Observable& H);

/// One row per (t, node): t,node,re,im.
void write_states_csv(std::ostream& os, const EvolutionResult& result);
/// One row per time: t,norm,energy,integral_re,integral_im.
void write_traces_csv(std::ostream& os, const std::vector<EvolutionResult::Trace>& traces);

} // namespace ultralab
