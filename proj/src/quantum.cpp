#include "eqkd/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "eqkd/error.hpp"

namespace eqkd {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kDropProbability = 1e-14;
constexpr double kZeroProbability = 1e-15;

void check_shape(const std::vector<std::string>& labels, std::size_t amp_count) {
    if (labels.size() >= 8 * sizeof(std::size_t) || amp_count != (std::size_t{1} << labels.size())) {
        throw Error(Errc::DimensionMismatch, "expected 2^" + std::to_string(labels.size()) +
                                                 " amplitudes, got " + std::to_string(amp_count));
    }
    std::set<std::string_view> seen;
    for (const auto& l : labels) {
        if (!seen.insert(l).second) throw Error(Errc::DuplicateLabel, "label '" + l + "' repeated");
    }
}

double sum_norm(std::span<const Amplitude> amps) {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return s;
}

void check_finite(std::span<const Amplitude> amps) {
    for (const auto& a : amps) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw Error(Errc::NotNormalizable, "amplitude is not finite");
        }
    }
}

}  // namespace

char basis_char(Basis b) { return b == Basis::Z ? 'Z' : 'X'; }

std::string_view bell_name(BellOutcome b) {
    switch (b) {
        case BellOutcome::PhiPlus: return "PhiPlus";
        case BellOutcome::PhiMinus: return "PhiMinus";
        case BellOutcome::PsiPlus: return "PsiPlus";
        case BellOutcome::PsiMinus: return "PsiMinus";
    }
    return "?";
}

Register Register::make(std::vector<std::string> labels, std::vector<Amplitude> amps) {
    check_shape(labels, amps.size());
    check_finite(amps);
    const double n = sum_norm(amps);
    if (n == 0.0 || std::abs(n - 1.0) > kRenormTol) {
        throw Error(Errc::NotNormalizable, "squared norm " + std::to_string(n) + " is not 1");
    }
    Register r(std::move(labels), std::move(amps));
    r.renormalize();
    return r;
}

Register Register::normalized(std::vector<std::string> labels, std::vector<Amplitude> amps) {
    check_shape(labels, amps.size());
    check_finite(amps);
    if (sum_norm(amps) == 0.0) throw Error(Errc::NotNormalizable, "zero vector");
    Register r(std::move(labels), std::move(amps));
    r.renormalize();
    return r;
}

Register Register::basis_state(std::vector<std::string> labels, std::string_view bits) {
    if (bits.size() != labels.size()) {
        throw Error(Errc::DimensionMismatch, "bit string length differs from label count");
    }
    std::size_t idx = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw Error(Errc::DimensionMismatch, "bit strings use 0/1 only");
        idx = (idx << 1) | static_cast<std::size_t>(c == '1');
    }
    std::vector<Amplitude> amps(std::size_t{1} << labels.size());
    amps[idx] = 1.0;
    return make(std::move(labels), std::move(amps));
}

bool Register::has(std::string_view label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t Register::index_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw Error(Errc::UnknownLabel, "no qubit labelled '" + std::string(label) + "'");
    return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t Register::bit_of(std::string_view label) const {
    return labels_.size() - 1 - index_of(label);
}

std::pair<std::size_t, std::size_t> Register::distinct_pair(std::string_view a, std::string_view b) const {
    const std::size_t ba = bit_of(a);
    const std::size_t bb = bit_of(b);
    if (ba == bb) throw Error(Errc::SameQubit, "'" + std::string(a) + "' used twice");
    return {ba, bb};
}

Amplitude Register::amplitude(std::string_view bits) const {
    if (bits.size() != labels_.size()) throw Error(Errc::DimensionMismatch, "bit string length");
    std::size_t idx = 0;
    for (char c : bits) idx = (idx << 1) | static_cast<std::size_t>(c == '1');
    return amps_[idx];
}

double Register::norm_squared() const { return sum_norm(amps_); }

void Register::renormalize() {
    const double s = std::sqrt(sum_norm(amps_));
    for (auto& a : amps_) a /= s;
}

void Register::apply_hadamard(std::string_view q) {
    const std::size_t mask = std::size_t{1} << bit_of(q);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & mask) continue;
        const Amplitude a0 = amps_[i];
        const Amplitude a1 = amps_[i | mask];
        amps_[i] = (a0 + a1) * kInvSqrt2;
        amps_[i | mask] = (a0 - a1) * kInvSqrt2;
    }
}

void Register::apply_pauli(std::string_view q, Pauli p) {
    const std::size_t mask = std::size_t{1} << bit_of(q);
    const Amplitude i_unit{0.0, 1.0};
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & mask) continue;
        Amplitude& a0 = amps_[i];
        Amplitude& a1 = amps_[i | mask];
        switch (p) {
            case Pauli::X: std::swap(a0, a1); break;
            case Pauli::Y: {
                const Amplitude t0 = a0;
                a0 = -i_unit * a1;
                a1 = i_unit * t0;
                break;
            }
            case Pauli::Z: a1 = -a1; break;
        }
    }
}

void Register::apply_cnot(std::string_view control, std::string_view target, Basis control_basis) {
    const auto [cb, tb] = distinct_pair(control, target);
    if (control_basis == Basis::X) apply_hadamard(control);
    const std::size_t cmask = std::size_t{1} << cb;
    const std::size_t tmask = std::size_t{1} << tb;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cmask) && !(i & tmask)) std::swap(amps_[i], amps_[i | tmask]);
    }
    if (control_basis == Basis::X) apply_hadamard(control);
}

void Register::adjoin(std::string label, int bit) {
    if (has(label)) throw Error(Errc::DuplicateLabel, "label '" + label + "' already present");
    std::vector<Amplitude> next(amps_.size() * 2);
    for (std::size_t i = 0; i < amps_.size(); ++i) next[(i << 1) | static_cast<std::size_t>(bit != 0)] = amps_[i];
    amps_ = std::move(next);
    labels_.push_back(std::move(label));
}

double Register::probability(std::string_view q, Basis basis, int bit) const {
    if (basis == Basis::X) {
        Register rotated = *this;
        rotated.apply_hadamard(q);
        return rotated.probability(q, Basis::Z, bit);
    }
    const std::size_t mask = std::size_t{1} << bit_of(q);
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (((i & mask) != 0) == (bit != 0)) p += std::norm(amps_[i]);
    }
    return p;
}

double Register::project(std::string_view q, Basis basis, int bit) {
    if (basis == Basis::X) apply_hadamard(q);
    const std::size_t mask = std::size_t{1} << bit_of(q);
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (((i & mask) != 0) == (bit != 0)) {
            p += std::norm(amps_[i]);
        }
    }
    if (p <= kZeroProbability) {
        if (basis == Basis::X) apply_hadamard(q);
        throw Error(Errc::NotNormalizable, "projection onto a zero-probability outcome");
    }
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (((i & mask) != 0) != (bit != 0)) amps_[i] = 0.0;
    }
    renormalize();
    if (basis == Basis::X) apply_hadamard(q);
    return p;
}

int Register::measure(std::string_view q, Basis basis, Prng& rng) {
    const double p0 = probability(q, basis, 0);
    int bit = rng.uniform() < p0 ? 0 : 1;
    // Rounding can leave ~1e-16 on an impossible outcome.
    if (bit == 0 && p0 <= kZeroProbability) bit = 1;
    if (bit == 1 && 1.0 - p0 <= kZeroProbability) bit = 0;
    project(q, basis, bit);
    return bit;
}

namespace {

// Bell coefficient for a (q1 q2) sub-block a00 a01 a10 a11, q1 written first.
Amplitude bell_coefficient(BellOutcome b, Amplitude a00, Amplitude a01, Amplitude a10, Amplitude a11) {
    switch (b) {
        case BellOutcome::PhiPlus: return (a00 + a11) * kInvSqrt2;
        case BellOutcome::PhiMinus: return (a00 - a11) * kInvSqrt2;
        case BellOutcome::PsiPlus: return (a01 + a10) * kInvSqrt2;
        case BellOutcome::PsiMinus: return (a01 - a10) * kInvSqrt2;
    }
    return 0.0;
}

}  // namespace

std::array<double, 4> Register::bell_probabilities(std::string_view q1, std::string_view q2) const {
    const auto [b1, b2] = distinct_pair(q1, q2);
    const std::size_t m1 = std::size_t{1} << b1;
    const std::size_t m2 = std::size_t{1} << b2;
    std::array<double, 4> probs{};
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & (m1 | m2)) continue;
        const Amplitude a00 = amps_[i], a01 = amps_[i | m2], a10 = amps_[i | m1], a11 = amps_[i | m1 | m2];
        for (std::size_t k = 0; k < 4; ++k) probs[k] += std::norm(bell_coefficient(kBellOutcomes[k], a00, a01, a10, a11));
    }
    return probs;
}

double Register::project_bell(std::string_view q1, std::string_view q2, BellOutcome outcome) {
    const auto [b1, b2] = distinct_pair(q1, q2);
    const std::size_t m1 = std::size_t{1} << b1;
    const std::size_t m2 = std::size_t{1} << b2;
    double p = 0.0;
    std::vector<Amplitude> next(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & (m1 | m2)) continue;
        const Amplitude c = bell_coefficient(outcome, amps_[i], amps_[i | m2], amps_[i | m1], amps_[i | m1 | m2]);
        p += std::norm(c);
        const Amplitude h = c * kInvSqrt2;
        switch (outcome) {
            case BellOutcome::PhiPlus: next[i] = h; next[i | m1 | m2] = h; break;
            case BellOutcome::PhiMinus: next[i] = h; next[i | m1 | m2] = -h; break;
            case BellOutcome::PsiPlus: next[i | m2] = h; next[i | m1] = h; break;
            case BellOutcome::PsiMinus: next[i | m2] = h; next[i | m1] = -h; break;
        }
    }
    if (p <= kZeroProbability) throw Error(Errc::NotNormalizable, "projection onto a zero-probability Bell outcome");
    amps_ = std::move(next);
    renormalize();
    return p;
}

BellOutcome Register::measure_bell(std::string_view q1, std::string_view q2, Prng& rng) {
    const auto probs = bell_probabilities(q1, q2);
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = 3;
    for (std::size_t k = 0; k < 4; ++k) {
        acc += probs[k];
        if (u < acc) {
            pick = k;
            break;
        }
    }
    while (probs[pick] <= kZeroProbability && pick > 0) --pick;
    project_bell(q1, q2, kBellOutcomes[pick]);
    return kBellOutcomes[pick];
}

OutcomeDistribution distribution(const Register& reg, std::span<const MeasurementSpec> schedule) {
    std::vector<std::size_t> positions;
    positions.reserve(schedule.size());
    std::set<std::string_view> seen;
    for (const auto& m : schedule) {
        if (!seen.insert(m.label).second) throw Error(Errc::DuplicateLabel, "'" + m.label + "' scheduled twice");
        positions.push_back(reg.index_of(m.label));
    }

    // Rotate X-measured qubits in label order so the floating-point result does
    // not depend on how the schedule is permuted.
    std::vector<std::size_t> x_rotations;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        if (schedule[k].basis == Basis::X) x_rotations.push_back(positions[k]);
    }
    std::sort(x_rotations.begin(), x_rotations.end());
    Register rotated = reg;
    for (std::size_t pos : x_rotations) rotated.apply_hadamard(reg.labels()[pos]);

    const std::size_t n = reg.num_qubits();
    std::map<std::string, double> out;
    auto amps = rotated.amplitudes();
    std::string key(schedule.size(), '0');
    for (std::size_t i = 0; i < amps.size(); ++i) {
        for (std::size_t k = 0; k < positions.size(); ++k) {
            key[k] = ((i >> (n - 1 - positions[k])) & 1U) ? '1' : '0';
        }
        out[key] += std::norm(amps[i]);
    }
    std::erase_if(out, [](const auto& kv) { return kv.second < kDropProbability; });
    return out;
}

OutcomeDistribution distribution(const Register& reg, std::initializer_list<MeasurementSpec> schedule) {
    return distribution(reg, std::span<const MeasurementSpec>(schedule.begin(), schedule.size()));
}

double overlap(const Register& a, const Register& b) {
    if (a.num_qubits() != b.num_qubits()) throw Error(Errc::LabelMismatch, "registers have different sizes");
    const std::size_t n = a.num_qubits();
    // perm[k]: position in b of a's k-th label.
    std::vector<std::size_t> perm(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!b.has(a.labels()[k])) throw Error(Errc::LabelMismatch, "label '" + a.labels()[k] + "' missing");
        perm[k] = b.index_of(a.labels()[k]);
    }
    auto aa = a.amplitudes();
    auto ba = b.amplitudes();
    Amplitude inner = 0.0;
    for (std::size_t i = 0; i < aa.size(); ++i) {
        std::size_t j = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if ((i >> (n - 1 - k)) & 1U) j |= std::size_t{1} << (n - 1 - perm[k]);
        }
        inner += std::conj(aa[i]) * ba[j];
    }
    return std::abs(inner);
}

bool states_equal_up_to_phase(const Register& a, const Register& b, double tol) {
    return overlap(a, b) >= 1.0 - tol;
}

}  // namespace eqkd
