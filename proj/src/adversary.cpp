#include "eqkd/adversary.hpp"

#include "eqkd/error.hpp"
#include "eqkd/states.hpp"

namespace eqkd {

std::string EveStrategy::name() const {
    switch (kind) {
        case EveKind::None: return "none";
        case EveKind::InterceptResend: {
            std::string s = "intercept-resend(";
            s += basis_policy == BasisPolicy::RandomZX ? "random" : basis_policy == BasisPolicy::AlwaysZ ? "z" : "x";
            s += resend_policy == ResendPolicy::PaperXRemap ? ",x-remap)" : ",eigenstate)";
            return s;
        }
        case EveKind::CollectiveCnot: return control_basis == Basis::X ? "cnot(x)" : "cnot(z)";
        case EveKind::BellIntercept: return "bell";
    }
    return "?";
}

std::string EveRoundRecord::choice() const {
    std::string s;
    for (Basis b : bases) s += basis_char(b);
    return s;
}

int eve_intercept_resend(Register& reg, const std::string& q, BasisPolicy basis_policy, ResendPolicy resend_policy,
                         Prng& rng, EveRoundRecord& rec) {
    if (!reg.has(q)) throw Error(Errc::UnknownLabel, "cannot intercept '" + q + "'");
    Basis basis = Basis::Z;
    switch (basis_policy) {
        case BasisPolicy::RandomZX: basis = rng.bit() ? Basis::X : Basis::Z; break;
        case BasisPolicy::AlwaysZ: basis = Basis::Z; break;
        case BasisPolicy::AlwaysX: basis = Basis::X; break;
    }
    const int outcome = reg.measure(q, basis, rng);
    // q is now |outcome>; H maps it to |+> or |->.
    if (resend_policy == ResendPolicy::PaperXRemap && basis == Basis::Z) reg.apply_hadamard(q);
    rec.bases.push_back(basis);
    rec.outcomes.push_back(outcome);
    return outcome;
}

std::string eve_collective_cnot(Register& reg, const std::string& q, Basis control_basis, EveRoundRecord& rec) {
    if (!reg.has(q)) throw Error(Errc::UnknownLabel, "cannot intercept '" + q + "'");
    std::string ancilla = "E";
    for (int k = 2; reg.has(ancilla); ++k) ancilla = "E" + std::to_string(k);
    reg.adjoin(ancilla);
    reg.apply_cnot(q, ancilla, control_basis);
    rec.ancillas.push_back(ancilla);
    return ancilla;
}

BellOutcome eve_bell_intercept(Register& reg, const std::string& qB, const std::string& qC, Prng& rng,
                               EveRoundRecord& rec) {
    const BellOutcome b = reg.measure_bell(qB, qC, rng);
    rec.bell = b;
    return b;
}

int bell_guess_for_alice_x(BellOutcome b) {
    // |Psi1> = [|+>(phi- + psi+) + |->(phi+ - psi-)]/2
    return (b == BellOutcome::PhiMinus || b == BellOutcome::PsiPlus) ? 0 : 1;
}

Eavesdropper::Eavesdropper(EveStrategy strategy, Prng rng) : rng_(rng) { record_.strategy = strategy; }

std::size_t Eavesdropper::begin_round(std::size_t round) {
    record_.rounds.emplace_back();
    record_.rounds.back().round = round;
    return record_.rounds.size() - 1;
}

InterceptHook Eavesdropper::hook() {
    if (!active()) return {};
    return [this](Register& reg, std::span<const std::string> labels) { intercept(reg, labels); };
}

void Eavesdropper::intercept(Register& reg, std::span<const std::string> labels) {
    auto& rec = current();
    const auto& s = record_.strategy;
    switch (s.kind) {
        case EveKind::None: return;
        case EveKind::InterceptResend:
            for (const auto& l : labels) {
                const int out = eve_intercept_resend(reg, l, s.basis_policy, s.resend_policy, rng_, rec);
                if (!rec.guess) rec.guess = out;
            }
            return;
        case EveKind::CollectiveCnot:
            for (const auto& l : labels) eve_collective_cnot(reg, l, s.control_basis, rec);
            return;
        case EveKind::BellIntercept:
            if (labels.size() != 2) {
                throw Error(Errc::UnsupportedCombination, "Bell interception needs two qubits in flight");
            }
            rec.guess = bell_guess_for_alice_x(eve_bell_intercept(reg, labels[0], labels[1], rng_, rec));
            return;
    }
}

void Eavesdropper::after_announcement(Register& reg, bool hadamard_round, std::size_t slot) {
    if (slot >= record_.rounds.size()) return;
    auto& rec = record_.rounds[slot];
    for (const auto& a : rec.ancillas) {
        const int out = reg.measure(a, hadamard_round ? Basis::X : Basis::Z, rng_);
        rec.outcomes.push_back(out);
        if (!rec.guess) rec.guess = out;
    }
}

HanDemoReport han_attack_demo(std::size_t rounds, Prng& rng) {
    if (rounds == 0) throw Error(Errc::InvalidConfig, "rounds must be at least 1");
    HanDemoReport rep;
    rep.rounds = rounds;
    for (std::size_t r = 0; r < rounds; ++r) {
        Register reg = named_state(NamedState::HanABC);
        const BellOutcome b = reg.measure_bell("2", "3", rng);
        ++rep.bell_counts[static_cast<std::size_t>(b)];
        std::optional<int> guess;
        if (b == BellOutcome::PhiPlus) guess = 0;
        if (b == BellOutcome::PsiMinus) guess = 1;

        // Particle 3 goes on to Carol unchanged; the attacker keeps 2.
        const int a = reg.measure("1", Basis::Z, rng);
        const int b2 = reg.measure("2", Basis::Z, rng);
        const int c3 = reg.measure("3", Basis::Z, rng);
        if (guess && *guess == a) ++rep.correct_guesses;
        if (a != (b2 ^ c3)) ++rep.detection_events;
    }
    rep.guess_accuracy = static_cast<double>(rep.correct_guesses) / static_cast<double>(rounds);
    return rep;
}

}  // namespace eqkd
