// eqkd: run, sweep and verify the entanglement QKD simulator from the shell.
//
// Exit codes: 0 completed, 1 usage error, 2 run aborted, 3 identity failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "eqkd/adversary.hpp"
#include "eqkd/analysis.hpp"
#include "eqkd/error.hpp"
#include "eqkd/protocols.hpp"
#include "eqkd/states.hpp"

namespace {

using namespace eqkd;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAborted = 2;
constexpr int kExitIdentity = 3;

struct AttackFlags {
    std::string name = "none";
    std::string eve_basis = "random";
    std::string resend = "x-remap";
    std::string cnot_control = "x";
};

EveStrategy make_attack(const std::string& name, const AttackFlags& f) {
    if (name == "none") return EveStrategy::none();
    if (name == "intercept-resend") {
        static const std::map<std::string, BasisPolicy> bases{
            {"random", BasisPolicy::RandomZX}, {"z", BasisPolicy::AlwaysZ}, {"x", BasisPolicy::AlwaysX}};
        return EveStrategy::intercept_resend(
            bases.at(f.eve_basis),
            f.resend == "eigenstate" ? ResendPolicy::AsMeasuredEigenstate : ResendPolicy::PaperXRemap);
    }
    if (name == "cnot") return EveStrategy::collective_cnot(f.cnot_control == "z" ? Basis::Z : Basis::X);
    return EveStrategy::bell_intercept();
}

const std::vector<std::string> kAttackNames{"none", "intercept-resend", "cnot", "bell"};

struct SessionFlags {
    std::string protocol = "p2";
    std::string mode = "controlled";
    AttackFlags attack;
    std::size_t rounds = 1000;
    double check_fraction = 0.25;
    double abort_threshold = 0.11;
    double epsilon = 0.5;
    double noise = 0.0;
    std::uint64_t seed = 1;
    std::size_t batches = 2;
    double hadamard_fraction = 0.5;
    std::string p1_basis = "z";
    std::size_t security_param = 64;

    void attach(CLI::App& app) {
        app.add_option("--protocol", protocol, "p1, p2, p3, p3-controlled or p3-three-party")
            ->check(CLI::IsMember({"p1", "p2", "p3", "p3-controlled", "p3-three-party"}))
            ->capture_default_str();
        app.add_option("--mode", mode, "Key mode when --protocol p3")
            ->check(CLI::IsMember({"controlled", "three-party"}))
            ->capture_default_str();
        app.add_option("--attack", attack.name, "none, intercept-resend, cnot or bell")
            ->check(CLI::IsMember(kAttackNames))
            ->capture_default_str();
        app.add_option("--eve-basis", attack.eve_basis, "Intercept-resend basis choice")
            ->check(CLI::IsMember({"random", "z", "x"}))
            ->capture_default_str();
        app.add_option("--resend", attack.resend, "Intercept-resend forwarding rule")
            ->check(CLI::IsMember({"x-remap", "eigenstate"}))
            ->capture_default_str();
        app.add_option("--cnot-control", attack.cnot_control, "Basis of the CNOT control")
            ->check(CLI::IsMember({"x", "z"}))
            ->capture_default_str();
        app.add_option("--rounds", rounds, "Rounds per batch")->capture_default_str();
        app.add_option("--check-fraction", check_fraction, "Fraction of rounds sacrificed for checking")
            ->capture_default_str();
        app.add_option("--abort-threshold", abort_threshold, "Abort when the check QBER exceeds this")
            ->capture_default_str();
        app.add_option("--epsilon", epsilon, "Probability that Alice measures in Z (p3)")->capture_default_str();
        app.add_option("--noise", noise, "Depolarizing probability per transmitted qubit")->capture_default_str();
        app.add_option("--seed", seed, "Root seed; QKD_SEED overrides it")->capture_default_str();
        app.add_option("--batches", batches, "Batches per session (p3)")->capture_default_str();
        app.add_option("--hadamard-fraction", hadamard_fraction, "Fraction of pairs rotated (p1)")
            ->capture_default_str();
        app.add_option("--p1-basis", p1_basis, "Measurement basis for p1")
            ->check(CLI::IsMember({"z", "x"}))
            ->capture_default_str();
        app.add_option("--security-param", security_param, "Bits subtracted in privacy amplification")
            ->capture_default_str();
    }

    SessionConfig config() const {
        SessionConfig cfg;
        if (protocol == "p3") {
            cfg.protocol = mode == "three-party" ? Protocol::P3ThreeParty : Protocol::P3Controlled;
        } else {
            cfg.protocol = *parse_protocol(protocol);
        }
        cfg.rounds = rounds;
        cfg.check_fraction = check_fraction;
        cfg.abort_threshold = abort_threshold;
        cfg.attack = make_attack(attack.name, attack);
        cfg.epsilon = epsilon;
        cfg.noise.p = noise;
        cfg.seed = seed;
        if (const char* env = std::getenv("QKD_SEED")) {
            try {
                std::size_t used = 0;
                cfg.seed = std::stoull(env, &used);
                if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw Error(Errc::InvalidConfig, std::string("QKD_SEED is not an unsigned integer: ") + env);
            }
        }
        cfg.session_batches = batches;
        cfg.hadamard_fraction = hadamard_fraction;
        cfg.p1_basis = p1_basis == "x" ? Basis::X : Basis::Z;
        cfg.security_param = security_param;
        cfg.validate();
        return cfg;
    }
};

void write_to(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::InvalidConfig, "cannot open " + path + " for writing");
    out << text;
}

int cmd_run(const SessionFlags& flags, const std::string& out, const std::string& trace_out,
            const std::string& messages_out, const std::string& format, const std::string& accounting) {
    const SessionConfig cfg = flags.config();
    const RunResult res = run_protocol(cfg);
    const RunReport rep =
        make_report(cfg, res, accounting == "asymptotic" ? Accounting::Asymptotic : Accounting::AsRun);
    if (format == "json" || format == "both") write_to(out, report_to_json(rep));
    if (format == "csv-trace" || format == "both") write_to(trace_out, traces_to_csv(res.traces));
    if (!messages_out.empty()) write_to(messages_out, messages_to_csv(res.messages));
    for (const auto& [basis, q] : res.subset_qber) {
        std::cerr << "check qber (Alice " << basis << "): " << q << "\n";
    }
    return res.status == RunStatus::Completed ? kExitOk : kExitAborted;
}

int cmd_verify(const std::string& perturb, const std::string& out) {
    IdentityOptions opt;
    opt.flip_han_vvh_sign = perturb == "han-vvh-sign";
    const IdentityReport rep = verify_identities(opt);
    nlohmann::ordered_json j;
    j["all_pass"] = rep.all_pass();
    j["identities"] = nlohmann::ordered_json::array();
    for (const auto& e : rep.entries) {
        j["identities"].push_back(
            {{"name", e.name}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"overlap_deficit", e.overlap_deficit}, {"pass", e.pass}});
        if (!e.pass) std::cerr << "identity failed: " << e.name << " (deficit " << e.overlap_deficit << ")\n";
    }
    write_to(out, j.dump(2) + "\n");
    return rep.all_pass() ? kExitOk : kExitIdentity;
}

int cmd_sweep(const SessionFlags& flags, const std::vector<double>& eps, const std::vector<double>& noise,
              const std::vector<double>& checks, const std::vector<std::string>& attacks, std::size_t runs,
              unsigned threads, const std::string& out) {
    const SessionConfig base = flags.config();
    SweepGrid grid;
    grid.epsilon = eps;
    grid.noise_p = noise;
    grid.check_fraction = checks;
    for (const auto& a : attacks) grid.attack.push_back(make_attack(a, flags.attack));
    write_to(out, sweep_to_csv(run_sweep(base, grid, runs, threads)));
    return kExitOk;
}

int cmd_demo_han(std::size_t rounds, std::uint64_t seed, const std::string& out) {
    if (rounds < 1) throw Error(Errc::InvalidConfig, "rounds must be at least 1");
    if (const char* env = std::getenv("QKD_SEED")) seed = std::stoull(env);
    Prng rng(seed);
    const HanDemoReport han = han_attack_demo(rounds, rng);

    // The same attack against the three-particle protocol, one batch.
    SessionConfig cfg;
    cfg.protocol = Protocol::P3Controlled;
    cfg.attack = EveStrategy::bell_intercept();
    cfg.rounds = std::max<std::size_t>(rounds, 40);
    cfg.session_batches = 1;
    cfg.seed = seed;
    const RunResult res = run_protocol3(cfg);
    std::size_t x_rounds = 0, correct = 0;
    for (std::size_t i = 0; i < res.traces.size(); ++i) {
        const auto& t = res.traces[i];
        if (t.alice_basis != Basis::X) continue;
        ++x_rounds;
        correct += res.eve.rounds[i].guess == t.a_bit;
    }

    nlohmann::ordered_json j;
    j["rounds"] = rounds;
    j["seed"] = seed;
    nlohmann::ordered_json h;
    h["bell_counts"] = {{"phi+", han.bell_counts[0]},
                        {"phi-", han.bell_counts[1]},
                        {"psi+", han.bell_counts[2]},
                        {"psi-", han.bell_counts[3]}};
    h["guess_accuracy"] = han.guess_accuracy;
    h["detection_events"] = han.detection_events;
    j["han_scheme"] = h;
    nlohmann::ordered_json p;
    p["n_rounds"] = cfg.rounds;
    p["alice_x_rounds"] = x_rounds;
    p["guess_accuracy"] = x_rounds ? nlohmann::ordered_json(static_cast<double>(correct) / static_cast<double>(x_rounds))
                                   : nlohmann::ordered_json(nullptr);
    p["detection_rate"] = res.qber_estimate;
    p["aborted"] = res.status == RunStatus::Aborted;
    p["report"] = nlohmann::ordered_json::parse(report_to_json(make_report(cfg, res)));
    j["protocol3_bell_intercept"] = p;
    write_to(out, j.dump(2) + "\n");

    std::cerr << "scheme            guess accuracy  detection\n"
              << "han               " << han.guess_accuracy << "               " << han.detection_events << " events\n"
              << "p3-controlled     " << p["guess_accuracy"].dump() << "  qber " << res.qber_estimate
              << (res.status == RunStatus::Aborted ? " (aborted)" : "") << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement-based QKD simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Execute one protocol session and write its report");
    SessionFlags run_flags;
    run_flags.attach(*run);
    std::string run_out = "-", trace_out = "-", messages_out, format = "json", accounting = "as-run";
    run->add_option("--out", run_out, "JSON report path ('-' for stdout)")->capture_default_str();
    run->add_option("--trace-out", trace_out, "Round-trace CSV path ('-' for stdout)")->capture_default_str();
    run->add_option("--messages-out", messages_out, "Classical message log CSV path");
    run->add_option("--format", format, "json, csv-trace or both")
        ->check(CLI::IsMember({"json", "csv-trace", "both"}))
        ->capture_default_str();
    run->add_option("--accounting", accounting, "Counters in the report: as-run or asymptotic")
        ->check(CLI::IsMember({"as-run", "asymptotic"}))
        ->capture_default_str();

    auto* verify = app.add_subcommand("verify-identities", "Check the catalogued state identities");
    std::string perturb = "none", verify_out = "-";
    verify->add_option("--perturb", perturb, "Deliberately corrupt one identity: none or han-vvh-sign")
        ->check(CLI::IsMember({"none", "han-vvh-sign"}))
        ->capture_default_str();
    verify->add_option("--out", verify_out, "JSON path ('-' for stdout)")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Run a parameter grid and write one summary row per cell");
    SessionFlags sweep_flags;
    sweep_flags.attach(*sweep);
    std::vector<double> g_eps, g_noise, g_check;
    std::vector<std::string> g_attack;
    std::size_t runs_per_cell = 1;
    unsigned threads = 0;
    std::string sweep_out = "-";
    sweep->add_option("--grid-epsilon", g_eps, "Epsilon values")->delimiter(',');
    sweep->add_option("--grid-noise", g_noise, "Noise values")->delimiter(',');
    sweep->add_option("--grid-check-fraction", g_check, "Check-fraction values")->delimiter(',');
    sweep->add_option("--grid-attack", g_attack, "Attack names")->delimiter(',')->check(CLI::IsMember(kAttackNames));
    sweep->add_option("--runs-per-cell", runs_per_cell, "Runs per grid cell")->capture_default_str();
    sweep->add_option("--threads", threads, "Worker threads (0: hardware concurrency)")->capture_default_str();
    sweep->add_option("--out", sweep_out, "CSV path ('-' for stdout)")->capture_default_str();

    auto* demo = app.add_subcommand("demo-han", "Bell-measurement attack: three-photon scheme vs protocol 3");
    std::size_t demo_rounds = 10000;
    std::uint64_t demo_seed = 1;
    std::string demo_out = "-";
    demo->add_option("--rounds", demo_rounds, "Rounds")->capture_default_str();
    demo->add_option("--seed", demo_seed, "Seed; QKD_SEED overrides it")->capture_default_str();
    demo->add_option("--out", demo_out, "JSON path ('-' for stdout)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) return cmd_run(run_flags, run_out, trace_out, messages_out, format, accounting);
        if (*verify) return cmd_verify(perturb, verify_out);
        if (*sweep) return cmd_sweep(sweep_flags, g_eps, g_noise, g_check, g_attack, runs_per_cell, threads, sweep_out);
        if (*demo) return cmd_demo_han(demo_rounds, demo_seed, demo_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
