#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qjump/commands.hpp"
#include "qjump/config.hpp"
#include "qjump/ensemble.hpp"
#include "qjump/errors.hpp"
#include "qjump/generator.hpp"
#include "qjump/linalg.hpp"
#include "qjump/oscillator.hpp"
#include "qjump/trajectory.hpp"
#include "qjump/unraveling.hpp"

namespace py = pybind11;
using namespace qjump;

namespace {

StateVector to_state(const ComplexVector& v) { return StateVector(v); }

py::list channels_to_list(const RateReport& report) {
    py::list out;
    for (const auto& ch : report.channels) out.append(py::make_tuple(ch.rate, ch.target.amplitudes()));
    return out;
}

std::vector<NamedObservable> to_observables(const std::map<std::string, ComplexMatrix>& obs) {
    std::vector<NamedObservable> out;
    for (const auto& [name, op] : obs) out.push_back({name, op});
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantum jump unraveling of Markovian master equations";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<InvalidGenerator>(m, "InvalidGenerator", base.ptr());
    py::register_exception<InvalidState>(m, "InvalidState", base.ptr());
    py::register_exception<InvalidConfig>(m, "InvalidConfig", base.ptr());
    py::register_exception<StepTooLarge>(m, "StepTooLarge", base.ptr());
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());

    m.def(
        "eigh",
        [](const ComplexMatrix& a) {
            const auto pairs = hermitian_eigendecomposition(a);
            Eigen::VectorXd values(static_cast<Eigen::Index>(pairs.size()));
            ComplexMatrix vectors(a.rows(), a.rows());
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                values[static_cast<Eigen::Index>(k)] = pairs[k].value;
                vectors.col(static_cast<Eigen::Index>(k)) = pairs[k].vector;
            }
            return py::make_tuple(values, vectors);
        },
        py::arg("matrix"), "Ascending eigenvalues and phase-fixed eigenvectors (columns).");
    m.def("trace_distance", &trace_distance, py::arg("a"), py::arg("b"));

    py::class_<GeneratorSpec>(m, "Generator")
        .def(py::init<double, ComplexMatrix, std::vector<ComplexMatrix>, ComplexMatrix>(), py::arg("hbar"),
             py::arg("hamiltonian"), py::arg("couplings"), py::arg("coeff"))
        .def_readonly("dim", &GeneratorSpec::dim)
        .def_readonly("hbar", &GeneratorSpec::hbar)
        .def_readonly("hamiltonian", &GeneratorSpec::hamiltonian)
        .def_readonly("couplings", &GeneratorSpec::couplings)
        .def_readonly("coeff", &GeneratorSpec::coeff)
        .def_property_readonly("friction_constant", &GeneratorSpec::friction_constant)
        .def("__call__", &apply_generator, py::arg("rho"));

    m.def("apply_generator", &apply_generator, py::arg("generator"), py::arg("rho"));
    m.def(
        "validate_generator",
        [](const GeneratorSpec& g) {
            py::dict out;
            for (const auto& c : validate_generator(g).checks) out[py::str(c.name)] = py::make_tuple(c.passed, c.value);
            return out;
        },
        py::arg("generator"));

    m.def(
        "total_decay_rate", [](const GeneratorSpec& g, const ComplexVector& psi) { return total_decay_rate(g, to_state(psi)); },
        py::arg("generator"), py::arg("psi"));
    m.def(
        "transition_rate_operator",
        [](const GeneratorSpec& g, const ComplexVector& psi) { return transition_rate_operator(g, to_state(psi)); },
        py::arg("generator"), py::arg("psi"));
    m.def(
        "modified_rate_operator",
        [](const GeneratorSpec& g, const ComplexVector& psi) { return modified_rate_operator(g, to_state(psi)); },
        py::arg("generator"), py::arg("psi"));
    m.def(
        "jump_channels",
        [](const GeneratorSpec& g, const ComplexVector& psi) { return channels_to_list(jump_channels(g, to_state(psi))); },
        py::arg("generator"), py::arg("psi"), "List of (rate, target) pairs.");
    m.def(
        "frictional_rhs", [](const GeneratorSpec& g, const ComplexVector& psi) { return frictional_rhs(g, to_state(psi)); },
        py::arg("generator"), py::arg("psi"));
    m.def(
        "single_step_residual",
        [](const GeneratorSpec& g, const ComplexVector& psi, double eps) {
            return single_step_equivalence_test(g, to_state(psi), eps);
        },
        py::arg("generator"), py::arg("psi"), py::arg("eps"));

    m.def(
        "run_trajectory",
        [](const GeneratorSpec& g, const ComplexVector& psi, double dt, double t_final, std::uint64_t seed,
           std::uint64_t index, const std::map<std::string, ComplexMatrix>& observables) {
            TrajectoryConfig cfg{dt, t_final, seed, index, to_observables(observables)};
            const auto rec = run_trajectory(g, to_state(psi), cfg);
            py::dict out;
            out["times"] = rec.times;
            out["observables"] = rec.observables;
            py::list jumps;
            for (const auto& j : rec.jumps) jumps.append(py::make_tuple(j.time, j.channel_rate, j.target_index));
            out["jumps"] = jumps;
            out["final_state"] = rec.final_state->amplitudes();
            return out;
        },
        py::arg("generator"), py::arg("psi"), py::arg("dt"), py::arg("t_final"), py::arg("seed") = 0,
        py::arg("index") = 0, py::arg("observables") = std::map<std::string, ComplexMatrix>{});

    m.def(
        "run_ensemble",
        [](const GeneratorSpec& g, const ComplexVector& psi, std::size_t n, double dt, double t_final,
           std::vector<double> snapshots, std::uint64_t seed, unsigned threads) {
            EnsembleConfig cfg;
            cfg.n_trajectories = n;
            cfg.base.dt = dt;
            cfg.base.t_final = t_final;
            cfg.base.seed = seed;
            cfg.snapshot_times = snapshots.empty() ? std::vector<double>{t_final} : std::move(snapshots);
            ConvergenceReport report;
            {
                py::gil_scoped_release release;
                report = run_ensemble(g, to_state(psi), cfg, threads);
            }
            py::list snaps;
            for (const auto& s : report.snapshots) {
                py::dict d;
                d["time"] = s.time;
                d["trace_distance"] = s.trace_distance;
                d["stat_error"] = s.stat_error;
                d["rho_mc"] = s.rho_mc;
                d["rho_oracle"] = s.rho_oracle;
                snaps.append(d);
            }
            return snaps;
        },
        py::arg("generator"), py::arg("psi"), py::arg("n_trajectories"), py::arg("dt"), py::arg("t_final"),
        py::arg("snapshot_times") = std::vector<double>{}, py::arg("seed") = 0, py::arg("threads") = 1);

    m.def(
        "integrate_master",
        [](const GeneratorSpec& g, const ComplexMatrix& rho0, double dt, std::int64_t steps) {
            ComplexMatrix last;
            integrate_master(g, DensityOperator(rho0), dt, steps,
                             [&](std::int64_t k, const ComplexMatrix& rho) {
                                 if (k == steps) last = rho;
                             });
            return last;
        },
        py::arg("generator"), py::arg("rho0"), py::arg("dt"), py::arg("steps"));

    auto osc = m.def_submodule("oscillator", "Damped harmonic oscillator in a Fock truncation");
    py::class_<oscillator::OscillatorParams>(osc, "Params")
        .def(py::init([](Eigen::Index levels, double mass, double omega, double hbar, double d11, double d22,
                         double re_d12, double im_d12) {
                 oscillator::OscillatorParams p;
                 p.levels = levels;
                 p.mass = mass;
                 p.omega = omega;
                 p.hbar = hbar;
                 p.diffusion = oscillator::OscillatorParams::make_diffusion(d11, d22, re_d12, im_d12);
                 return p;
             }),
             py::arg("levels") = 20, py::arg("mass") = 1.0, py::arg("omega") = 1.0, py::arg("hbar") = 1.0,
             py::arg("D11") = 0.0, py::arg("D22") = 0.0, py::arg("ReD12") = 0.0, py::arg("ImD12") = 0.0)
        .def_readonly("levels", &oscillator::OscillatorParams::levels)
        .def_readonly("hbar", &oscillator::OscillatorParams::hbar)
        .def_property_readonly("diffusion",
                               [](const oscillator::OscillatorParams& p) { return ComplexMatrix(p.diffusion); })
        .def_property_readonly("friction", &oscillator::OscillatorParams::friction);

    osc.def("generator", &oscillator::oscillator_generator, py::arg("params"));
    osc.def(
        "operators",
        [](const oscillator::OscillatorParams& p) {
            const auto ops = oscillator::build_operators(p);
            py::dict d;
            d["H0"] = ops.hamiltonian;
            d["x"] = ops.position;
            d["p"] = ops.momentum;
            d["number"] = ops.number;
            d["a"] = ops.annihilation;
            return d;
        },
        py::arg("params"));
    osc.def(
        "fock_state", [](Eigen::Index n, Eigen::Index k) { return oscillator::fock_state(n, k).amplitudes(); },
        py::arg("levels"), py::arg("n"));
    osc.def(
        "coherent_state",
        [](Eigen::Index n, std::complex<double> alpha) { return oscillator::coherent_state(n, alpha).amplitudes(); },
        py::arg("levels"), py::arg("alpha"));
    osc.def(
        "hasse_defect",
        [](const ComplexVector& psi, const oscillator::OscillatorParams& p) {
            return oscillator::hasse_defect(to_state(psi), p);
        },
        py::arg("psi"), py::arg("params"));
    osc.def(
        "closed_form_channels",
        [](const ComplexVector& psi, const oscillator::OscillatorParams& p) {
            return channels_to_list(oscillator::closed_form_channels(to_state(psi), p));
        },
        py::arg("psi"), py::arg("params"));
    osc.def(
        "sigma",
        [](const ComplexVector& psi, const oscillator::OscillatorParams& p) {
            const auto ops = oscillator::build_operators(p);
            return ComplexMatrix(oscillator::sigma(to_state(psi), ops.position, ops.momentum));
        },
        py::arg("psi"), py::arg("params"));

    m.def(
        "verify",
        [](const std::filesystem::path& path) {
            const auto cfg = load_config(path, {.validate_generator = false});
            py::list out;
            for (const auto& c : run_verification(cfg)) out.append(py::make_tuple(c.name, c.passed, c.value));
            return out;
        },
        py::arg("config"), "Runs the invariant checks on a config file; list of (name, passed, value).");
}
