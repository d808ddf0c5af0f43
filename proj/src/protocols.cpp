#include "eqkd/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqkd/error.hpp"
#include "eqkd/states.hpp"

namespace eqkd {

std::string_view protocol_name(Protocol p) {
    switch (p) {
        case Protocol::P1: return "p1";
        case Protocol::P2: return "p2";
        case Protocol::P3Controlled: return "p3-controlled";
        case Protocol::P3ThreeParty: return "p3-three-party";
    }
    return "?";
}

std::optional<Protocol> parse_protocol(std::string_view s) {
    for (Protocol p : {Protocol::P1, Protocol::P2, Protocol::P3Controlled, Protocol::P3ThreeParty}) {
        if (protocol_name(p) == s) return p;
    }
    return std::nullopt;
}

std::size_t SessionConfig::check_count() const {
    return static_cast<std::size_t>(std::floor(check_fraction * static_cast<double>(rounds) + 1e-9));
}

void SessionConfig::validate() const {
    auto bad = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
    if (rounds < 20) bad("rounds must be at least 20");
    if (!(check_fraction > 0.0 && check_fraction < 1.0)) bad("check_fraction must lie in (0, 1)");
    if (check_count() < 10) bad("check_fraction * rounds must be at least 10");
    if (!(abort_threshold > 0.0 && abort_threshold < 1.0)) bad("abort_threshold must lie in (0, 1)");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) bad("epsilon must lie in (0, 1]");
    if (!(noise.p >= 0.0 && noise.p <= 1.0)) bad("noise p must lie in [0, 1]");
    if (session_batches < 1) bad("session_batches must be at least 1");
    if (!(hadamard_fraction >= 0.0 && hadamard_fraction <= 1.0)) bad("hadamard_fraction must lie in [0, 1]");
    if (attack.kind == EveKind::BellIntercept && !is_p3(protocol)) {
        throw Error(Errc::ConfigMismatch, "Bell interception needs two transmitted qubits per round");
    }
}

CheckDecision check_eavesdropping(std::size_t sample_size, std::size_t disagreements, double threshold) {
    if (sample_size == 0) throw Error(Errc::EmptySample, "no check samples");
    CheckDecision d;
    d.sample_size = sample_size;
    d.disagreements = disagreements;
    d.qber = static_cast<double>(disagreements) / static_cast<double>(sample_size);
    d.proceed = d.qber <= threshold;
    return d;
}

CheckDecision check_eavesdropping(std::span<const std::pair<int, int>> sample, double threshold) {
    std::size_t dis = 0;
    for (const auto& [a, b] : sample) dis += a != b;
    return check_eavesdropping(sample.size(), dis, threshold);
}

std::vector<std::size_t> sample_positions(std::size_t n, std::size_t count, Prng& rng) {
    if (count > n) throw Error(Errc::OutOfRange, "cannot sample more positions than exist");
    std::vector<std::size_t> out;
    out.reserve(count);
    std::size_t needed = count;
    for (std::size_t i = 0; i < n && needed > 0; ++i) {
        if (rng.uniform_int(n - i) < needed) {
            out.push_back(i);
            --needed;
        }
    }
    return out;
}

std::size_t RunResult::rounds_with_error() const {
    return static_cast<std::size_t>(std::count_if(traces.begin(), traces.end(), [](const RoundTrace& t) { return t.error; }));
}

double RunResult::observed_error_rate() const {
    return traces.empty() ? 0.0 : static_cast<double>(rounds_with_error()) / static_cast<double>(traces.size());
}

std::string traces_to_csv(const std::vector<RoundTrace>& traces) {
    std::ostringstream os;
    os << "round,state_tag,alice_basis,bob_basis,charlie_basis,a_bit,b_bit,c_bit,hadamard_flags,check,error\n";
    auto basis = [&](const std::optional<Basis>& b) {
        if (b) os << basis_char(*b);
        os << ',';
    };
    auto bit = [&](const std::optional<int>& v) {
        if (v) os << *v;
        os << ',';
    };
    for (const auto& t : traces) {
        os << t.round << ',' << t.state_tag << ',';
        basis(t.alice_basis);
        basis(t.bob_basis);
        basis(t.charlie_basis);
        bit(t.a_bit);
        bit(t.b_bit);
        bit(t.c_bit);
        os << t.hadamard_flags << ',' << (t.check ? 1 : 0) << ',' << (t.error ? 1 : 0) << '\n';
    }
    return os.str();
}

namespace {

struct Streams {
    Prng party;
    Prng eve;
    Prng noise;
    Prng post;

    explicit Streams(std::uint64_t seed) : party(0), eve(0), noise(0), post(0) {
        Prng root(seed);
        party = root.split();
        eve = root.split();
        noise = root.split();
        post = root.split();
    }
};

Bits position_bitmap(std::size_t n, const std::vector<std::size_t>& positions) {
    Bits b(n, 0);
    for (auto p : positions) b[p] = 1;
    return b;
}

/// Error correction against the reference party, then one shared Toeplitz
/// hash for everyone.
void distill(const SessionConfig& cfg, RunResult& res, Prng& post) {
    const Party ref = res.parties.front();
    const Bits& ref_key = res.sifted_keys.at(ref);
    const std::size_t n = ref_key.size();
    std::map<Party, Bits> corrected;
    corrected[ref] = ref_key;
    res.post.block = n == 0 ? 0 : std::min(default_block_size(res.qber_estimate), n);
    for (std::size_t k = 1; k < res.parties.size() && n > 0; ++k) {
        const Party p = res.parties[k];
        auto cr = error_correct(ref_key, res.sifted_keys.at(p), res.post.block, post.next_u64(), kDistillPasses);
        corrected[p] = std::move(cr.key_b);
        res.post.leaked += cr.leaked;
        res.post.residual += cr.residual;
        res.post.converged = res.post.converged && cr.converged;
    }
    const std::size_t m = n == 0 ? 0 : pa_output_length(n, res.post.leaked, res.qber_estimate, cfg.security_param);
    res.post.toeplitz = ToeplitzSeed::draw(n, m, post);
    for (Party p : res.parties) {
        res.final_keys[p] =
            n == 0 ? Bits{} : privacy_amplify(corrected.at(p), res.post.leaked, res.qber_estimate, cfg.security_param,
                                              res.post.toeplitz);
    }
    res.counters.b_s = m;
}

void apply_decision(RunResult& res, const CheckDecision& d) {
    res.qber_estimate = d.qber;
    res.check_sample = d.sample_size;
    res.check_disagreements = d.disagreements;
    res.status = d.proceed ? RunStatus::Completed : RunStatus::Aborted;
}

/// Shared tail of the two-party protocols: check sampling, decision, sifting
/// and distillation.
void finish_two_party(const SessionConfig& cfg, RunResult& res, Streams& s, Party sampler) {
    const std::size_t n = res.traces.size();
    const auto check = sample_positions(n, cfg.check_count(), s.party);
    for (auto i : check) res.traces[i].check = true;
    broadcast_classical({sampler, PayloadKind::PositionList, position_bitmap(n, check), std::nullopt}, res.counters,
                        res.messages);
    Bits revealed;
    std::size_t dis = 0;
    for (auto i : check) {
        revealed.push_back(static_cast<std::uint8_t>(*res.traces[i].b_bit));
        dis += res.traces[i].error;
    }
    broadcast_classical({Party::Bob, PayloadKind::CheckResults, std::move(revealed), std::nullopt}, res.counters,
                        res.messages);
    apply_decision(res, check_eavesdropping(check.size(), dis, cfg.abort_threshold));

    Bits& ka = res.sifted_keys[Party::Alice];
    Bits& kb = res.sifted_keys[Party::Bob];
    for (auto& t : res.traces) {
        if (t.check) continue;
        t.sifted = true;
        ka.push_back(static_cast<std::uint8_t>(*t.a_bit));
        kb.push_back(static_cast<std::uint8_t>(*t.b_bit));
    }
    if (res.status == RunStatus::Aborted) {
        for (Party p : res.parties) res.final_keys[p] = {};
        return;
    }
    res.counters.q_u = n - check.size();
    distill(cfg, res, s.post);
}

void require(const SessionConfig& cfg, bool ok, const char* what) {
    if (!ok) throw Error(Errc::ConfigMismatch, what);
    cfg.validate();
}

}  // namespace

RunResult run_protocol1(const SessionConfig& cfg) {
    require(cfg, cfg.protocol == Protocol::P1, "run_protocol1 needs protocol p1");
    const std::size_t n = cfg.rounds;
    Streams s(cfg.seed);
    Eavesdropper eve(cfg.attack, s.eve);
    const auto hook = eve.hook();
    RunResult res;
    res.parties = {Party::Alice, Party::Bob};

    // Block transmission: every pair is held until the Hadamard positions are
    // public.
    std::vector<Register> pairs;
    pairs.reserve(n);
    const std::string b_label = "B";
    for (std::size_t i = 0; i < n; ++i) {
        pairs.push_back(named_state(NamedState::PhiPlusAB));
        eve.begin_round(i);
        transmit_qubit(pairs.back(), b_label, hook, cfg.noise, res.counters, s.noise);
    }

    const auto rotated = sample_positions(
        n, static_cast<std::size_t>(std::floor(cfg.hadamard_fraction * static_cast<double>(n) + 1e-9)), s.party);
    const Bits rotated_map = position_bitmap(n, rotated);
    broadcast_classical({Party::Bob, PayloadKind::PositionList, rotated_map, std::nullopt}, res.counters,
                        res.messages);

    res.traces.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Register& reg = pairs[i];
        const bool h = rotated_map[i] != 0;
        if (h) {
            reg.apply_hadamard("B");
            reg.apply_hadamard("A");
        }
        eve.after_announcement(reg, h, i);
        auto& t = res.traces[i];
        t.round = i;
        t.state_tag = "phi+";
        t.hadamard_flags = h ? "11" : "00";
        t.alice_basis = t.bob_basis = cfg.p1_basis;
        t.a_bit = reg.measure("A", cfg.p1_basis, s.party);
        t.b_bit = reg.measure("B", cfg.p1_basis, s.party);
        t.error = *t.a_bit != *t.b_bit;
        t.eve_choice = eve.record().rounds[i].choice();
    }
    finish_two_party(cfg, res, s, Party::Bob);
    res.asymptotic = {n, 0, n, n};
    res.eve = eve.take_record();
    return res;
}

RunResult run_protocol2(const SessionConfig& cfg) {
    require(cfg, cfg.protocol == Protocol::P2, "run_protocol2 needs protocol p2");
    const std::size_t n = cfg.rounds;
    Streams s(cfg.seed);
    Eavesdropper eve(cfg.attack, s.eve);
    const auto hook = eve.hook();
    RunResult res;
    res.parties = {Party::Alice, Party::Bob};
    res.traces.resize(n);
    const std::string b_label = "B";

    for (std::size_t i = 0; i < n; ++i) {
        const bool minus = s.party.bit() != 0;
        Register reg = named_state(minus ? NamedState::PhiMinusAB : NamedState::PhiPlusAB);
        const std::size_t slot = eve.begin_round(i);
        transmit_qubit(reg, b_label, hook, cfg.noise, res.counters, s.noise);
        // Bob's receipt acknowledgement carries no information and is not logged.
        broadcast_classical({Party::Alice, PayloadKind::InitialStateInfo, {static_cast<std::uint8_t>(minus)}, i},
                            res.counters, res.messages);
        eve.after_announcement(reg, minus, slot);
        if (minus) {
            reg.apply_hadamard("A");
            reg.apply_hadamard("B");
        }
        auto& t = res.traces[i];
        t.round = i;
        t.state_tag = minus ? "phi-" : "phi+";
        t.hadamard_flags = minus ? "11" : "00";
        t.alice_basis = t.bob_basis = Basis::X;
        t.a_bit = reg.measure("A", Basis::X, s.party);
        t.b_bit = reg.measure("B", Basis::X, s.party);
        t.error = *t.a_bit != *t.b_bit;
        t.eve_choice = eve.record().rounds[slot].choice();
    }
    finish_two_party(cfg, res, s, Party::Alice);
    res.asymptotic = {n, n, n, n};
    res.eve = eve.take_record();
    return res;
}

bool p3_round_consistent(std::string_view state_tag, Basis alice_basis, int a, int b, int c) {
    const int psi2 = state_tag == "psi2" ? 1 : 0;
    if (alice_basis == Basis::Z) return c == a && b == (a ^ psi2);
    return c == (b ^ a);
}

std::map<Party, Bits> p3_extract_keys(const std::vector<RoundTrace>& traces, const MessageLog& announcements,
                                      P3Mode mode) {
    const PayloadKind kind =
        mode == P3Mode::Controlled ? PayloadKind::XResultPublication : PayloadKind::InitialStateInfo;
    const Basis key_basis = mode == P3Mode::Controlled ? Basis::X : Basis::Z;
    std::map<std::size_t, std::uint8_t> published;
    for (const auto& m : announcements) {
        if (m.kind == kind && m.round && !m.payload.empty()) published[*m.round] = m.payload.front();
    }
    std::map<Party, Bits> keys;
    if (mode == P3Mode::ThreeParty) keys[Party::Alice];
    keys[Party::Bob];
    keys[Party::Charlie];
    for (const auto& t : traces) {
        if (t.check || t.alice_basis != key_basis) continue;
        auto it = published.find(t.round);
        if (it == published.end()) {
            throw Error(Errc::MissingAnnouncement, "no announcement for key round " + std::to_string(t.round));
        }
        const auto a = static_cast<std::uint8_t>(*t.a_bit);
        const auto b = static_cast<std::uint8_t>(*t.b_bit);
        const auto c = static_cast<std::uint8_t>(*t.c_bit);
        if (mode == P3Mode::Controlled) {
            keys[Party::Bob].push_back(b);
            keys[Party::Charlie].push_back(c ^ it->second);
        } else {
            keys[Party::Alice].push_back(a);
            keys[Party::Bob].push_back(b ^ it->second);
            keys[Party::Charlie].push_back(c);
        }
    }
    return keys;
}

RunResult run_protocol3(const SessionConfig& cfg) {
    require(cfg, is_p3(cfg.protocol), "run_protocol3 needs protocol p3-controlled or p3-three-party");
    const P3Mode mode = cfg.protocol == Protocol::P3Controlled ? P3Mode::Controlled : P3Mode::ThreeParty;
    const Basis key_basis = mode == P3Mode::Controlled ? Basis::X : Basis::Z;
    const std::size_t n = cfg.rounds;
    Streams s(cfg.seed);
    Eavesdropper eve(cfg.attack, s.eve);
    const auto hook = eve.hook();
    RunResult res;
    res.parties = mode == P3Mode::Controlled ? std::vector<Party>{Party::Bob, Party::Charlie}
                                             : std::vector<Party>{Party::Alice, Party::Bob, Party::Charlie};
    const std::vector<std::string> in_flight{"B", "C"};
    std::map<std::string, std::pair<std::size_t, std::size_t>> subset;  // basis -> (checked, errors)
    std::size_t total_checked = 0, total_errors = 0;
    CheckDecision decision;

    for (std::size_t batch = 0; batch < cfg.session_batches; ++batch) {
        const std::size_t base = batch * n;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = base + i;
            const bool psi2 = s.party.bit() != 0;
            Register reg = named_state(psi2 ? NamedState::Psi2 : NamedState::Psi1);
            const std::size_t slot = eve.begin_round(r);
            transmit_qubits(reg, in_flight, hook, cfg.noise, res.counters, s.noise);

            RoundTrace t;
            t.round = r;
            t.state_tag = psi2 ? "psi2" : "psi1";
            t.hadamard_flags = "000";
            const Basis ab = s.party.bernoulli(cfg.epsilon) ? Basis::Z : Basis::X;
            t.alice_basis = ab;
            t.a_bit = reg.measure("A", ab, s.party);
            broadcast_classical({Party::Alice, PayloadKind::BasisAnnouncement,
                                 {static_cast<std::uint8_t>(ab == Basis::X)}, r},
                                res.counters, res.messages);
            t.bob_basis = ab == Basis::Z ? Basis::X : Basis::Z;
            t.charlie_basis = ab == Basis::Z ? Basis::Z : Basis::X;
            t.b_bit = reg.measure("B", *t.bob_basis, s.party);
            t.c_bit = reg.measure("C", *t.charlie_basis, s.party);
            eve.after_announcement(reg, false, slot);
            t.error = !p3_round_consistent(t.state_tag, ab, *t.a_bit, *t.b_bit, *t.c_bit);
            t.eve_choice = eve.record().rounds[slot].choice();
            ++res.subset_rounds[std::string(1, basis_char(ab))];
            res.traces.push_back(std::move(t));
        }

        const auto picks = sample_positions(n, cfg.check_count(), s.party);
        std::vector<std::size_t> check(picks.size());
        std::transform(picks.begin(), picks.end(), check.begin(), [&](std::size_t p) { return base + p; });
        broadcast_classical({Party::Alice, PayloadKind::PositionList, position_bitmap(n, picks), std::nullopt},
                            res.counters, res.messages);
        Bits ra, rb, rc;
        std::size_t dis = 0;
        for (auto r : check) {
            auto& t = res.traces[r];
            t.check = true;
            ra.push_back(static_cast<std::uint8_t>(*t.a_bit));
            rb.push_back(static_cast<std::uint8_t>(*t.b_bit));
            rc.push_back(static_cast<std::uint8_t>(*t.c_bit));
            dis += t.error;
            auto& cell = subset[std::string(1, basis_char(*t.alice_basis))];
            ++cell.first;
            cell.second += t.error;
        }
        broadcast_classical({Party::Alice, PayloadKind::CheckResults, std::move(ra), std::nullopt}, res.counters,
                            res.messages);
        broadcast_classical({Party::Bob, PayloadKind::CheckResults, std::move(rb), std::nullopt}, res.counters,
                            res.messages);
        broadcast_classical({Party::Charlie, PayloadKind::CheckResults, std::move(rc), std::nullopt}, res.counters,
                            res.messages);
        total_checked += check.size();
        total_errors += dis;
        decision = check_eavesdropping(check.size(), dis, cfg.abort_threshold);
        if (!decision.proceed) break;
    }
    for (const auto& [basis, cell] : subset) {
        res.subset_qber[basis] = cell.first == 0 ? 0.0 : static_cast<double>(cell.second) / static_cast<double>(cell.first);
    }

    std::size_t eligible = 0;
    for (const auto& t : res.traces) eligible += t.alice_basis == key_basis;
    const std::uint64_t simulated = res.traces.size();
    res.asymptotic = {2 * simulated, simulated + eligible, eligible, 2 * eligible};
    res.eve = eve.take_record();

    if (!decision.proceed) {
        apply_decision(res, decision);
        for (Party p : res.parties) {
            res.sifted_keys[p] = {};
            res.final_keys[p] = {};
        }
        return res;
    }
    apply_decision(res, check_eavesdropping(total_checked, total_errors, cfg.abort_threshold));

    std::size_t key_rounds = 0;
    for (auto& t : res.traces) {
        if (t.check || t.alice_basis != key_basis) continue;
        t.sifted = true;
        ++key_rounds;
        const std::uint8_t payload =
            mode == P3Mode::Controlled ? static_cast<std::uint8_t>(*t.a_bit) : static_cast<std::uint8_t>(t.state_tag == "psi2");
        broadcast_classical({Party::Alice,
                             mode == P3Mode::Controlled ? PayloadKind::XResultPublication : PayloadKind::InitialStateInfo,
                             {payload},
                             t.round},
                            res.counters, res.messages);
    }
    res.sifted_keys = p3_extract_keys(res.traces, res.messages, mode);
    res.counters.q_u = 2 * key_rounds;
    distill(cfg, res, s.post);
    return res;
}

RunResult run_protocol(const SessionConfig& cfg) {
    switch (cfg.protocol) {
        case Protocol::P1: return run_protocol1(cfg);
        case Protocol::P2: return run_protocol2(cfg);
        case Protocol::P3Controlled:
        case Protocol::P3ThreeParty: return run_protocol3(cfg);
    }
    throw Error(Errc::ConfigMismatch, "unknown protocol");
}

std::string trace_cell(Protocol protocol, const RoundTrace& t) {
    std::string key = t.state_tag;
    if (!t.eve_choice.empty()) key += "|" + t.eve_choice;
    if (protocol == Protocol::P1) key += t.hadamard_flags == "11" ? "|H" : "|I";
    if (is_p3(protocol) && t.alice_basis) key += std::string("|a") + basis_char(*t.alice_basis);
    return key;
}

// ---------------------------------------------------------------------------
// Exact oracle

namespace {

struct Branch {
    double weight;
    Register reg;
    std::string eve_choice;
};

constexpr double kBranchFloor = 1e-15;

std::vector<Branch> eve_branches(const Branch& in, const std::vector<std::string>& labels, const EveStrategy& eve) {
    std::vector<Branch> cur{in};
    switch (eve.kind) {
        case EveKind::None: return cur;
        case EveKind::InterceptResend:
            for (const auto& l : labels) {
                std::vector<std::pair<Basis, double>> bases;
                switch (eve.basis_policy) {
                    case BasisPolicy::RandomZX: bases = {{Basis::Z, 0.5}, {Basis::X, 0.5}}; break;
                    case BasisPolicy::AlwaysZ: bases = {{Basis::Z, 1.0}}; break;
                    case BasisPolicy::AlwaysX: bases = {{Basis::X, 1.0}}; break;
                }
                std::vector<Branch> next;
                for (const auto& br : cur) {
                    for (const auto& [basis, pb] : bases) {
                        for (int bit : {0, 1}) {
                            const double p = br.reg.probability(l, basis, bit);
                            if (p <= kBranchFloor) continue;
                            Branch nb{br.weight * pb * p, br.reg, br.eve_choice + basis_char(basis)};
                            nb.reg.project(l, basis, bit);
                            if (eve.resend_policy == ResendPolicy::PaperXRemap && basis == Basis::Z) {
                                nb.reg.apply_hadamard(l);
                            }
                            next.push_back(std::move(nb));
                        }
                    }
                }
                cur = std::move(next);
            }
            return cur;
        case EveKind::CollectiveCnot:
            for (auto& br : cur) {
                for (std::size_t k = 0; k < labels.size(); ++k) {
                    const std::string anc = "anc" + std::to_string(k);
                    br.reg.adjoin(anc);
                    br.reg.apply_cnot(labels[k], anc, eve.control_basis);
                }
            }
            return cur;
        case EveKind::BellIntercept: {
            std::vector<Branch> next;
            for (const auto& br : cur) {
                const auto probs = br.reg.bell_probabilities(labels.at(0), labels.at(1));
                for (std::size_t k = 0; k < 4; ++k) {
                    if (probs[k] <= kBranchFloor) continue;
                    Branch nb{br.weight * probs[k], br.reg, br.eve_choice};
                    nb.reg.project_bell(labels[0], labels[1], kBellOutcomes[k]);
                    next.push_back(std::move(nb));
                }
            }
            return next;
        }
    }
    return cur;
}

std::vector<Branch> noise_branches(std::vector<Branch> cur, const std::vector<std::string>& labels, double p) {
    if (p <= 0.0) return cur;
    for (const auto& l : labels) {
        std::vector<Branch> next;
        for (const auto& br : cur) {
            if (p < 1.0) next.push_back({br.weight * (1.0 - p), br.reg, br.eve_choice});
            for (Pauli q : {Pauli::X, Pauli::Y, Pauli::Z}) {
                Branch nb{br.weight * p / 3.0, br.reg, br.eve_choice};
                nb.reg.apply_pauli(l, q);
                next.push_back(std::move(nb));
            }
        }
        cur = std::move(next);
    }
    return cur;
}

struct Tally {
    std::map<std::string, double> err;
    std::map<std::string, double> weight;
    double overall = 0.0;

    void add(const std::string& cell, double w, double error_prob) {
        err[cell] += w * error_prob;
        weight[cell] += w;
        overall += w * error_prob;
    }
};

double two_party_error(const Register& reg, Basis basis) {
    double e = 0.0;
    for (const auto& [bits, p] : distribution(reg, {{"A", basis}, {"B", basis}})) {
        if (bits[0] != bits[1]) e += p;
    }
    return e;
}

}  // namespace

OracleResult exact_qber_oracle(Protocol protocol, const EveStrategy& attack, const OracleOptions& options) {
    if (attack.kind == EveKind::BellIntercept && !is_p3(protocol)) {
        throw Error(Errc::UnsupportedCombination, "Bell interception is defined for the three-particle protocol only");
    }
    Tally tally;
    std::map<std::string, std::pair<double, double>> by_basis;

    struct Prep {
        double weight;
        NamedState state;
        std::string tag;
    };
    std::vector<Prep> preps;
    switch (protocol) {
        case Protocol::P1: preps = {{1.0, NamedState::PhiPlusAB, "phi+"}}; break;
        case Protocol::P2:
            preps = {{0.5, NamedState::PhiPlusAB, "phi+"}, {0.5, NamedState::PhiMinusAB, "phi-"}};
            break;
        case Protocol::P3Controlled:
        case Protocol::P3ThreeParty:
            preps = {{0.5, NamedState::Psi1, "psi1"}, {0.5, NamedState::Psi2, "psi2"}};
            break;
    }
    const std::vector<std::string> sent = is_p3(protocol) ? std::vector<std::string>{"B", "C"}
                                                          : std::vector<std::string>{"B"};

    for (const auto& prep : preps) {
        const Branch root{prep.weight, named_state(prep.state), ""};
        const auto branches = noise_branches(eve_branches(root, sent, attack), sent, options.noise_p);
        for (const auto& br : branches) {
            const std::string cell = br.eve_choice.empty() ? prep.tag : prep.tag + "|" + br.eve_choice;
            switch (protocol) {
                case Protocol::P1: {
                    const double hf = options.hadamard_fraction;
                    if (1.0 - hf > 0.0) tally.add(cell + "|I", br.weight * (1.0 - hf), two_party_error(br.reg, options.p1_basis));
                    if (hf > 0.0) {
                        Register rotated = br.reg;
                        rotated.apply_hadamard("A");
                        rotated.apply_hadamard("B");
                        tally.add(cell + "|H", br.weight * hf, two_party_error(rotated, options.p1_basis));
                    }
                    break;
                }
                case Protocol::P2: {
                    Register r = br.reg;
                    if (prep.tag == "phi-") {
                        r.apply_hadamard("A");
                        r.apply_hadamard("B");
                    }
                    tally.add(cell, br.weight, two_party_error(r, Basis::X));
                    break;
                }
                case Protocol::P3Controlled:
                case Protocol::P3ThreeParty:
                    for (const auto& [ab, pw] : {std::pair{Basis::Z, options.epsilon}, std::pair{Basis::X, 1.0 - options.epsilon}}) {
                        if (pw <= 0.0) continue;
                        const Basis bb = ab == Basis::Z ? Basis::X : Basis::Z;
                        const Basis cb = ab == Basis::Z ? Basis::Z : Basis::X;
                        double e = 0.0;
                        for (const auto& [bits, p] : distribution(br.reg, {{"A", ab}, {"B", bb}, {"C", cb}})) {
                            if (!p3_round_consistent(prep.tag, ab, bits[0] - '0', bits[1] - '0', bits[2] - '0')) e += p;
                        }
                        const std::string bkey(1, basis_char(ab));
                        tally.add(cell + "|a" + bkey, br.weight * pw, e);
                        by_basis[bkey].first += br.weight * pw * e;
                        by_basis[bkey].second += br.weight * pw;
                    }
                    break;
            }
        }
    }

    OracleResult out;
    out.overall = tally.overall;
    for (const auto& [cell, w] : tally.weight) {
        out.cell_weight[cell] = w;
        out.cells[cell] = w > 0.0 ? tally.err[cell] / w : 0.0;
    }
    for (const auto& [b, ew] : by_basis) out.by_alice_basis[b] = ew.second > 0.0 ? ew.first / ew.second : 0.0;
    return out;
}

}  // namespace eqkd
