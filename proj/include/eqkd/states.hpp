#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqkd/quantum.hpp"

namespace eqkd {

enum class NamedState {
    PhiPlusAB,         // (|00> + |11>)/sqrt2
    PhiMinusAB,        // (|00> - |11>)/sqrt2
    PhiMinusHadamard,  // (|++> - |-->)/sqrt2
    PhiMinusXForm,     // (|+-> + |-+>)/sqrt2
    Omega1,            // (|+-1> + |-+0>)/sqrt2 over A,B,E
    Omega2,            // (|011> + |100>)/sqrt2 over A,B,E
    HanABC,            // (|000> + |011> + |101> - |110>)/2 over 1,2,3 (H->0, V->1)
    Psi1,              // (|0+0> + |1-1>)/sqrt2 over A,B,C
    Psi2,              // (|0-0> + |1+1>)/sqrt2 over A,B,C
    GhzPlus,           // (|000> + |111>)/sqrt2 over A,B,C
};

std::string_view named_state_name(NamedState s);

/// One term of a ket expansion: coefficient times a product ket written over
/// {0,1,+,-}, one character per label.
struct KetTerm {
    Amplitude coefficient;
    std::string ket;
};

/// Sums the product kets. The result goes through Register::make, so the
/// written coefficients must already be normalized to within 1e-9.
Register from_kets(std::vector<std::string> labels, const std::vector<KetTerm>& terms);

/// As from_kets, but rescales to unit norm whatever the written prefactor.
Register from_kets_normalized(std::vector<std::string> labels, const std::vector<KetTerm>& terms);

Register named_state(NamedState which);

struct IdentityEntry {
    std::string name;
    std::string lhs;
    std::string rhs;
    double overlap_deficit = 0.0;
    bool pass = false;
};

struct IdentityReport {
    std::vector<IdentityEntry> entries;
    bool all_pass() const;
};

struct IdentityOptions {
    /// Mutation hook: flips the sign of the |VVH> (= |110>) term of the Han
    /// state on the left-hand side of its factored-form identity.
    bool flip_han_vvh_sign = false;
};

/// Re-derives every catalogued state identity with the engine and compares
/// the two sides up to global phase at 1e-12.
IdentityReport verify_identities(const IdentityOptions& options = {});

}  // namespace eqkd
