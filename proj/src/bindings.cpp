// Python module eqkd._core. Reports cross the boundary as their JSON text so
// the Python side sees exactly what the CLI writes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eqkd/adversary.hpp"
#include "eqkd/analysis.hpp"
#include "eqkd/error.hpp"
#include "eqkd/protocols.hpp"
#include "eqkd/states.hpp"

namespace py = pybind11;
using namespace eqkd;

namespace {

Accounting parse_accounting(const std::string& s) {
    if (s == "as-run") return Accounting::AsRun;
    if (s == "asymptotic") return Accounting::Asymptotic;
    throw Error(Errc::InvalidConfig, "accounting must be as-run or asymptotic");
}

py::dict oracle_dict(const OracleResult& r) {
    py::dict d;
    d["overall"] = r.overall;
    d["cells"] = r.cells;
    d["cell_weight"] = r.cell_weight;
    d["by_alice_basis"] = r.by_alice_basis;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Entanglement-based QKD simulator core";
    py::register_exception<Error>(m, "EqkdError", PyExc_ValueError);

    py::enum_<Protocol>(m, "Protocol")
        .value("P1", Protocol::P1)
        .value("P2", Protocol::P2)
        .value("P3Controlled", Protocol::P3Controlled)
        .value("P3ThreeParty", Protocol::P3ThreeParty);
    py::enum_<Basis>(m, "Basis").value("Z", Basis::Z).value("X", Basis::X);
    py::enum_<BasisPolicy>(m, "BasisPolicy")
        .value("RandomZX", BasisPolicy::RandomZX)
        .value("AlwaysZ", BasisPolicy::AlwaysZ)
        .value("AlwaysX", BasisPolicy::AlwaysX);
    py::enum_<ResendPolicy>(m, "ResendPolicy")
        .value("AsMeasuredEigenstate", ResendPolicy::AsMeasuredEigenstate)
        .value("XRemap", ResendPolicy::PaperXRemap);
    py::enum_<EveKind>(m, "EveKind")
        .value("None_", EveKind::None)
        .value("InterceptResend", EveKind::InterceptResend)
        .value("CollectiveCnot", EveKind::CollectiveCnot)
        .value("BellIntercept", EveKind::BellIntercept);

    py::class_<EveStrategy>(m, "EveStrategy")
        .def(py::init<>())
        .def_readonly("kind", &EveStrategy::kind)
        .def_static("none", &EveStrategy::none)
        .def_static("intercept_resend", &EveStrategy::intercept_resend, py::arg("basis") = BasisPolicy::RandomZX,
                    py::arg("resend") = ResendPolicy::PaperXRemap)
        .def_static("collective_cnot", &EveStrategy::collective_cnot, py::arg("control") = Basis::X)
        .def_static("bell_intercept", &EveStrategy::bell_intercept);

    py::class_<SessionConfig>(m, "SessionConfig")
        .def(py::init<>())
        .def(py::init<const SessionConfig&>(), py::arg("other"))
        .def_readwrite("protocol", &SessionConfig::protocol)
        .def_readwrite("rounds", &SessionConfig::rounds)
        .def_readwrite("check_fraction", &SessionConfig::check_fraction)
        .def_readwrite("abort_threshold", &SessionConfig::abort_threshold)
        .def_readwrite("attack", &SessionConfig::attack)
        .def_readwrite("epsilon", &SessionConfig::epsilon)
        .def_property(
            "noise_p", [](const SessionConfig& c) { return c.noise.p; },
            [](SessionConfig& c, double p) { c.noise.p = p; })
        .def_readwrite("seed", &SessionConfig::seed)
        .def_readwrite("session_batches", &SessionConfig::session_batches)
        .def_readwrite("hadamard_fraction", &SessionConfig::hadamard_fraction)
        .def_readwrite("p1_basis", &SessionConfig::p1_basis)
        .def_readwrite("security_param", &SessionConfig::security_param)
        .def("validate", &SessionConfig::validate);

    m.def(
        "run_report_json",
        [](const SessionConfig& cfg, const std::string& accounting) {
            cfg.validate();
            RunResult res;
            {
                py::gil_scoped_release release;
                res = run_protocol(cfg);
            }
            return report_to_json(make_report(cfg, res, parse_accounting(accounting)));
        },
        py::arg("config"), py::arg("accounting") = "as-run",
        "Run one session and return its report as JSON text.");

    m.def(
        "verify_identities",
        [](bool flip_han_vvh_sign) {
            IdentityOptions opt;
            opt.flip_han_vvh_sign = flip_han_vvh_sign;
            py::list out;
            for (const auto& e : verify_identities(opt).entries) {
                py::dict d;
                d["name"] = e.name;
                d["lhs"] = e.lhs;
                d["rhs"] = e.rhs;
                d["overlap_deficit"] = e.overlap_deficit;
                d["pass"] = e.pass;
                out.append(d);
            }
            return out;
        },
        py::arg("flip_han_vvh_sign") = false);

    m.def(
        "exact_qber_oracle",
        [](Protocol p, const EveStrategy& attack, double epsilon, double noise_p, double hadamard_fraction,
           Basis p1_basis) {
            return oracle_dict(exact_qber_oracle(p, attack, {epsilon, noise_p, hadamard_fraction, p1_basis}));
        },
        py::arg("protocol"), py::arg("attack"), py::arg("epsilon") = 0.5, py::arg("noise_p") = 0.0,
        py::arg("hadamard_fraction") = 0.5, py::arg("p1_basis") = Basis::Z);

    m.def(
        "efficiency_total",
        [](std::uint64_t q_t, std::uint64_t b_t, std::uint64_t b_s, std::uint64_t q_u) {
            return efficiency_total({q_t, b_t, b_s, q_u});
        },
        py::arg("q_t"), py::arg("b_t"), py::arg("b_s"), py::arg("q_u"));
    m.def(
        "efficiency_qubits",
        [](std::uint64_t q_t, std::uint64_t q_u) { return efficiency_qubits({q_t, 0, 0, q_u}); }, py::arg("q_t"),
        py::arg("q_u"));

    m.def(
        "han_attack_demo",
        [](std::size_t rounds, std::uint64_t seed) {
            Prng rng(seed);
            const HanDemoReport r = han_attack_demo(rounds, rng);
            py::dict d;
            d["rounds"] = r.rounds;
            d["bell_counts"] = py::dict(py::arg("phi+") = r.bell_counts[0], py::arg("phi-") = r.bell_counts[1],
                                        py::arg("psi+") = r.bell_counts[2], py::arg("psi-") = r.bell_counts[3]);
            d["guess_accuracy"] = r.guess_accuracy;
            d["detection_events"] = r.detection_events;
            return d;
        },
        py::arg("rounds") = 10000, py::arg("seed") = 1);
}
