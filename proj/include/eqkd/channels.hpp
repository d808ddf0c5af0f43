#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqkd/prng.hpp"
#include "eqkd/quantum.hpp"

namespace eqkd {

using Bits = std::vector<std::uint8_t>;

/// Tallies for the efficiency formulas. q_t qubits sent, b_t key-generation
/// classical bits, b_s final secret bits, q_u qubits whose outcomes reach the
/// sifted key.
struct TrafficCounters {
    std::uint64_t q_t = 0;
    std::uint64_t b_t = 0;
    std::uint64_t b_s = 0;
    std::uint64_t q_u = 0;

    bool operator==(const TrafficCounters&) const = default;
};

enum class Party : std::uint8_t { Alice, Bob, Charlie };
std::string_view party_name(Party p);

enum class PayloadKind : std::uint8_t {
    PositionList,
    BasisAnnouncement,
    InitialStateInfo,
    CheckResults,
    XResultPublication,
};
std::string_view payload_name(PayloadKind k);

/// Check traffic (positions and revealed outcomes) never counts toward b_t.
constexpr bool counts_toward_b_t(PayloadKind k) {
    return k != PayloadKind::PositionList && k != PayloadKind::CheckResults;
}

struct ClassicalMessage {
    Party sender = Party::Alice;
    PayloadKind kind = PayloadKind::InitialStateInfo;
    Bits payload;
    /// Round the message refers to, for per-round announcements.
    std::optional<std::size_t> round;

    bool counts() const { return counts_toward_b_t(kind); }
};

using MessageLog = std::vector<ClassicalMessage>;

/// Authenticated public channel: everything appended is readable by all,
/// including the eavesdropper, and nothing can be altered.
void broadcast_classical(ClassicalMessage msg, TrafficCounters& counters, MessageLog& log);

/// Depolarizing channel: with probability p one of X, Y, Z (p/3 each).
struct NoiseSpec {
    double p = 0.0;
};

/// Invoked once per transmission with every qubit in flight, before noise.
using InterceptHook = std::function<void(Register&, std::span<const std::string>)>;

/// Sends the listed qubits: q_t += labels.size(), then the hook (if any),
/// then independent depolarizing noise per qubit. With p = 0 the noise stream
/// is not touched.
void transmit_qubits(Register& reg, std::span<const std::string> labels, const InterceptHook& eve,
                     NoiseSpec noise, TrafficCounters& counters, Prng& noise_rng);

void transmit_qubit(Register& reg, const std::string& label, const InterceptHook& eve, NoiseSpec noise,
                    TrafficCounters& counters, Prng& noise_rng);

/// Message log as CSV: sender,kind,round,bits,payload,counted.
std::string messages_to_csv(const MessageLog& log);

}  // namespace eqkd
