#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "eqkd/channels.hpp"
#include "eqkd/quantum.hpp"

namespace eqkd {

enum class EveKind : std::uint8_t { None, InterceptResend, CollectiveCnot, BellIntercept };
enum class BasisPolicy : std::uint8_t { RandomZX, AlwaysZ, AlwaysX };
/// PaperXRemap: after a Z measurement Eve forwards |+> for 0 and |-> for 1.
/// X measurements always forward the measured eigenstate.
enum class ResendPolicy : std::uint8_t { AsMeasuredEigenstate, PaperXRemap };

struct EveStrategy {
    EveKind kind = EveKind::None;
    BasisPolicy basis_policy = BasisPolicy::RandomZX;
    ResendPolicy resend_policy = ResendPolicy::PaperXRemap;
    Basis control_basis = Basis::X;

    static EveStrategy none() { return {}; }
    static EveStrategy intercept_resend(BasisPolicy b = BasisPolicy::RandomZX,
                                        ResendPolicy r = ResendPolicy::PaperXRemap) {
        return {EveKind::InterceptResend, b, r, Basis::X};
    }
    static EveStrategy collective_cnot(Basis control = Basis::X) {
        return {EveKind::CollectiveCnot, BasisPolicy::RandomZX, ResendPolicy::PaperXRemap, control};
    }
    static EveStrategy bell_intercept() {
        return {EveKind::BellIntercept, BasisPolicy::RandomZX, ResendPolicy::PaperXRemap, Basis::X};
    }

    /// Canonical text form, e.g. "none", "intercept-resend(random,x-remap)",
    /// "cnot(x)", "bell".
    std::string name() const;
    bool operator==(const EveStrategy&) const = default;
};

struct EveRoundRecord {
    std::size_t round = 0;
    std::vector<Basis> bases;
    std::vector<int> outcomes;
    std::vector<std::string> ancillas;
    std::optional<BellOutcome> bell;
    std::optional<int> guess;

    /// Eve's own random choices in this round (intercept-resend bases, e.g.
    /// "Z" or "ZX"); empty for deterministic strategies.
    std::string choice() const;
};

struct EveRecord {
    EveStrategy strategy;
    std::vector<EveRoundRecord> rounds;
};

int eve_intercept_resend(Register& reg, const std::string& q, BasisPolicy basis_policy, ResendPolicy resend_policy,
                         Prng& rng, EveRoundRecord& rec);

/// Adjoins a fresh |0> ancilla and entangles it with q. Returns the ancilla
/// label ("E", then "E2", "E3", ...).
std::string eve_collective_cnot(Register& reg, const std::string& q, Basis control_basis, EveRoundRecord& rec);

BellOutcome eve_bell_intercept(Register& reg, const std::string& qB, const std::string& qC, Prng& rng,
                               EveRoundRecord& rec);

/// Eve's guess of Alice's X outcome in the three-particle protocol, read off
/// the Bell outcome as if |Psi1> had been prepared.
int bell_guess_for_alice_x(BellOutcome b);

/// Runs one strategy across a session and keeps its record. Owns its own
/// random stream; the None strategy never draws from it.
class Eavesdropper {
public:
    Eavesdropper(EveStrategy strategy, Prng rng);

    const EveStrategy& strategy() const { return record_.strategy; }
    bool active() const { return record_.strategy.kind != EveKind::None; }

    /// Opens a record for `round` and returns its slot index.
    std::size_t begin_round(std::size_t round);
    /// Hook for transmit_qubits; empty when the strategy is None.
    InterceptHook hook();

    /// Measures any ancillas once the round's announcement is public: Z when
    /// the round was not Hadamard-rotated, X otherwise. The first ancilla's
    /// outcome becomes the guess.
    void after_announcement(Register& reg, bool hadamard_round, std::size_t slot);

    EveRoundRecord& current() { return record_.rounds.back(); }
    const EveRecord& record() const { return record_; }
    EveRecord take_record() { return std::move(record_); }

private:
    void intercept(Register& reg, std::span<const std::string> labels);

    EveRecord record_;
    Prng rng_;
};

struct HanDemoReport {
    std::size_t rounds = 0;
    std::array<std::size_t, 4> bell_counts{};
    std::size_t correct_guesses = 0;
    double guess_accuracy = 0.0;
    std::size_t detection_events = 0;
};

/// Bell-measurement attack on the three-photon controlled scheme
/// (|HHH> + |HVV> + |VHV> - |VVH>)/2: per round the attacker measures particles 2 and 3 in the Bell basis,
/// guesses Alice's Z result (PhiPlus -> 0, PsiMinus -> 1), forwards particle
/// 3, and the parties run their Z-basis parity check a = b XOR c.
HanDemoReport han_attack_demo(std::size_t rounds, Prng& rng);

}  // namespace eqkd
