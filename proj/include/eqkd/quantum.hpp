#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqkd/prng.hpp"

namespace eqkd {

using Amplitude = std::complex<double>;

/// Z eigenstates map |0>->0, |1>->1; X eigenstates map |+>->0, |->->1.
enum class Basis : std::uint8_t { Z, X };

enum class BellOutcome : std::uint8_t { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

enum class Pauli : std::uint8_t { X, Y, Z };

inline constexpr double kExactTol = 1e-12;
inline constexpr double kRenormTol = 1e-9;

char basis_char(Basis b);
std::string_view bell_name(BellOutcome b);
inline constexpr std::array<BellOutcome, 4> kBellOutcomes{
    BellOutcome::PhiPlus, BellOutcome::PhiMinus, BellOutcome::PsiPlus, BellOutcome::PsiMinus};

/// Exact joint outcome probabilities keyed by bit string (one character per
/// measured qubit, in schedule order). Outcomes with probability below 1e-14
/// are omitted.
using OutcomeDistribution = std::map<std::string, double>;

struct MeasurementSpec {
    std::string label;
    Basis basis = Basis::Z;
};

/// Pure state over an ordered list of labelled qubits. Label 0 is the leftmost
/// ket position and the most significant bit of the amplitude index, so
/// |ABC> transcribes directly.
///
/// Measured qubits stay in the register, collapsed onto the observed
/// eigenstate.
class Register {
public:
    /// Validates dimensions and label uniqueness. A norm within 1e-9 of one is
    /// renormalized; anything else is NotNormalizable.
    static Register make(std::vector<std::string> labels, std::vector<Amplitude> amps);

    /// Same checks, but any non-zero norm is accepted and scaled to one.
    static Register normalized(std::vector<std::string> labels, std::vector<Amplitude> amps);

    /// Computational-basis product state, e.g. basis_state({"A","B"}, "01").
    static Register basis_state(std::vector<std::string> labels, std::string_view bits);

    const std::vector<std::string>& labels() const { return labels_; }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    std::size_t num_qubits() const { return labels_.size(); }
    bool has(std::string_view label) const;
    std::size_t index_of(std::string_view label) const;

    /// Amplitude of a computational-basis ket written as a 0/1 string.
    Amplitude amplitude(std::string_view bits) const;
    double norm_squared() const;

    void apply_hadamard(std::string_view q);
    void apply_pauli(std::string_view q, Pauli p);
    /// control_basis Z is the textbook CNOT. With X the target flips when the
    /// control is |->, i.e. H(control) CNOT H(control).
    void apply_cnot(std::string_view control, std::string_view target, Basis control_basis = Basis::Z);

    /// Appends a fresh qubit in |bit> as the new rightmost (least significant)
    /// ket position.
    void adjoin(std::string label, int bit = 0);

    /// Probability of `bit` when measuring q in `basis`.
    double probability(std::string_view q, Basis basis, int bit) const;
    std::array<double, 4> bell_probabilities(std::string_view q1, std::string_view q2) const;

    /// Samples from the exact marginal and collapses.
    int measure(std::string_view q, Basis basis, Prng& rng);
    BellOutcome measure_bell(std::string_view q1, std::string_view q2, Prng& rng);

    /// Deterministic projection onto one outcome. Returns its prior
    /// probability; throws NotNormalizable when that probability is zero.
    double project(std::string_view q, Basis basis, int bit);
    double project_bell(std::string_view q1, std::string_view q2, BellOutcome outcome);

private:
    Register(std::vector<std::string> labels, std::vector<Amplitude> amps)
        : labels_(std::move(labels)), amps_(std::move(amps)) {}

    std::size_t bit_of(std::string_view label) const;
    std::pair<std::size_t, std::size_t> distinct_pair(std::string_view a, std::string_view b) const;
    void renormalize();

    std::vector<std::string> labels_;
    std::vector<Amplitude> amps_;
};

OutcomeDistribution distribution(const Register& reg, std::span<const MeasurementSpec> schedule);
OutcomeDistribution distribution(const Register& reg, std::initializer_list<MeasurementSpec> schedule);

/// |<a|b>| with b's qubits matched to a's by label.
double overlap(const Register& a, const Register& b);

/// True iff |<a|b>| >= 1 - tol. Label sets must coincide (LabelMismatch).
bool states_equal_up_to_phase(const Register& a, const Register& b, double tol = kExactTol);

}  // namespace eqkd
