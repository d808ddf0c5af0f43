#include "eqkd/channels.hpp"

#include <sstream>

#include "eqkd/error.hpp"

namespace eqkd {

std::string_view party_name(Party p) {
    switch (p) {
        case Party::Alice: return "alice";
        case Party::Bob: return "bob";
        case Party::Charlie: return "charlie";
    }
    return "?";
}

std::string_view payload_name(PayloadKind k) {
    switch (k) {
        case PayloadKind::PositionList: return "PositionList";
        case PayloadKind::BasisAnnouncement: return "BasisAnnouncement";
        case PayloadKind::InitialStateInfo: return "InitialStateInfo";
        case PayloadKind::CheckResults: return "CheckResults";
        case PayloadKind::XResultPublication: return "XResultPublication";
    }
    return "?";
}

void broadcast_classical(ClassicalMessage msg, TrafficCounters& counters, MessageLog& log) {
    if (msg.counts()) counters.b_t += msg.payload.size();
    log.push_back(std::move(msg));
}

void transmit_qubits(Register& reg, std::span<const std::string> labels, const InterceptHook& eve,
                     NoiseSpec noise, TrafficCounters& counters, Prng& noise_rng) {
    for (const auto& l : labels) {
        if (!reg.has(l)) throw Error(Errc::UnknownLabel, "cannot transmit '" + l + "'");
    }
    counters.q_t += labels.size();
    if (eve) eve(reg, labels);
    if (noise.p <= 0.0) return;
    for (const auto& l : labels) {
        if (!noise_rng.bernoulli(noise.p)) continue;
        constexpr Pauli kPaulis[] = {Pauli::X, Pauli::Y, Pauli::Z};
        reg.apply_pauli(l, kPaulis[noise_rng.uniform_int(3)]);
    }
}

void transmit_qubit(Register& reg, const std::string& label, const InterceptHook& eve, NoiseSpec noise,
                    TrafficCounters& counters, Prng& noise_rng) {
    transmit_qubits(reg, std::span<const std::string>(&label, 1), eve, noise, counters, noise_rng);
}

std::string messages_to_csv(const MessageLog& log) {
    std::ostringstream os;
    os << "sender,kind,round,bits,payload,counted\n";
    for (const auto& m : log) {
        os << party_name(m.sender) << ',' << payload_name(m.kind) << ',';
        if (m.round) os << *m.round;
        os << ',' << m.payload.size() << ',';
        for (auto b : m.payload) os << static_cast<int>(b);
        os << ',' << (m.counts() ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace eqkd
