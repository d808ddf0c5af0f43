#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqkd/adversary.hpp"
#include "eqkd/channels.hpp"
#include "eqkd/postprocess.hpp"
#include "eqkd/quantum.hpp"

namespace eqkd {

enum class Protocol : std::uint8_t { P1, P2, P3Controlled, P3ThreeParty };

std::string_view protocol_name(Protocol p);  // p1, p2, p3-controlled, p3-three-party
std::optional<Protocol> parse_protocol(std::string_view s);
constexpr bool is_p3(Protocol p) { return p == Protocol::P3Controlled || p == Protocol::P3ThreeParty; }

struct SessionConfig {
    Protocol protocol = Protocol::P2;
    /// Rounds per batch; Protocol 3 runs session_batches batches of this size.
    std::size_t rounds = 1000;
    double check_fraction = 0.25;
    double abort_threshold = 0.11;
    EveStrategy attack{};
    /// Probability that Alice measures in Z (Protocol 3).
    double epsilon = 0.5;
    NoiseSpec noise{};
    std::uint64_t seed = 1;
    std::size_t session_batches = 2;
    /// Protocol 1: fraction of pairs Bob rotates, and the session-wide basis.
    double hadamard_fraction = 0.5;
    Basis p1_basis = Basis::Z;
    std::size_t security_param = 64;

    /// Throws InvalidConfig on out-of-range values (rounds >= 20, at least 10
    /// check samples, fractions in range) and ConfigMismatch on attacks the
    /// protocol cannot host.
    void validate() const;
    std::size_t check_count() const;
};

struct RoundTrace {
    std::size_t round = 0;
    std::string state_tag;       // phi+, phi-, psi1, psi2
    std::string hadamard_flags;  // one 0/1 per party
    std::optional<Basis> alice_basis, bob_basis, charlie_basis;
    std::optional<int> a_bit, b_bit, c_bit;
    std::string eve_choice;
    bool sifted = false;
    bool check = false;
    bool error = false;
};

/// Round-trace CSV: round,state_tag,alice_basis,bob_basis,charlie_basis,
/// a_bit,b_bit,c_bit,hadamard_flags,check,error
std::string traces_to_csv(const std::vector<RoundTrace>& traces);

struct CheckDecision {
    std::size_t sample_size = 0;
    std::size_t disagreements = 0;
    double qber = 0.0;
    bool proceed = false;
};

/// qber = disagreement fraction; proceed iff qber <= threshold.
CheckDecision check_eavesdropping(std::span<const std::pair<int, int>> sample, double threshold);
CheckDecision check_eavesdropping(std::size_t sample_size, std::size_t disagreements, double threshold);

/// `count` distinct positions of [0, n), drawn without replacement by
/// selection sampling in ascending index order.
std::vector<std::size_t> sample_positions(std::size_t n, std::size_t count, Prng& rng);

enum class RunStatus : std::uint8_t { Completed, Aborted };

struct PostprocessSummary {
    std::size_t block = 0;
    std::size_t leaked = 0;
    std::size_t residual = 0;
    bool converged = true;
    ToeplitzSeed toeplitz;
};

struct RunResult {
    RunStatus status = RunStatus::Completed;
    double qber_estimate = 0.0;
    std::size_t check_sample = 0;
    std::size_t check_disagreements = 0;
    /// Parties holding key material, reference party first.
    std::vector<Party> parties;
    std::map<Party, Bits> sifted_keys;
    std::map<Party, Bits> final_keys;
    TrafficCounters counters;
    /// Counters with every key-eligible round used for key and no check or
    /// distillation loss: the check_fraction -> 0 limit.
    TrafficCounters asymptotic;
    std::vector<RoundTrace> traces;
    MessageLog messages;
    EveRecord eve;
    /// Protocol 3: check-round QBER per Alice basis ("Z", "X").
    std::map<std::string, double> subset_qber;
    std::map<std::string, std::size_t> subset_rounds;
    PostprocessSummary post;

    /// Ground-truth disagreement over every simulated round.
    std::size_t rounds_with_error() const;
    double observed_error_rate() const;
};

RunResult run_protocol1(const SessionConfig& cfg);
RunResult run_protocol2(const SessionConfig& cfg);
RunResult run_protocol3(const SessionConfig& cfg);
RunResult run_protocol(const SessionConfig& cfg);

enum class P3Mode : std::uint8_t { Controlled, ThreeParty };

/// Key bits per party from Protocol 3 traces. Controlled mode keys Bob and
/// Charlie from Alice-X rounds, Charlie inverting when Alice published |->.
/// Three-party mode keys all three from Alice-Z rounds, Bob inverting when
/// Alice published |Psi2>. Check rounds never contribute.
std::map<Party, Bits> p3_extract_keys(const std::vector<RoundTrace>& traces, const MessageLog& announcements,
                                      P3Mode mode);

/// Protocol 3 correlation rule for one round. Alice-Z rounds: c = a and
/// b = a XOR [psi2]. Alice-X rounds: c = b XOR a.
bool p3_round_consistent(std::string_view state_tag, Basis alice_basis, int a, int b, int c);

struct OracleOptions {
    double epsilon = 0.5;
    double noise_p = 0.0;
    double hadamard_fraction = 0.5;
    Basis p1_basis = Basis::Z;
};

struct OracleResult {
    double overall = 0.0;
    /// Conditional QBER per cell and the cell's probability. Cell keys join the
    /// preparation, Eve's choice and the parties' choice with '|', e.g.
    /// "phi+|Z", "phi+|H|X", "psi1|aZ".
    std::map<std::string, double> cells;
    std::map<std::string, double> cell_weight;
    /// Protocol 3: QBER per Alice basis.
    std::map<std::string, double> by_alice_basis;
};

/// Exact per-round QBER by enumerating every discrete branch with projector
/// arithmetic; no sampling. Throws UnsupportedCombination for Bell
/// interception on the single-qubit protocols.
OracleResult exact_qber_oracle(Protocol protocol, const EveStrategy& attack, const OracleOptions& options = {});

/// Cell key for a sampled round, matching exact_qber_oracle's keys.
std::string trace_cell(Protocol protocol, const RoundTrace& t);

}  // namespace eqkd
