#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "eqkd/channels.hpp"
#include "eqkd/prng.hpp"

namespace eqkd {

/// h(q) = -q log2 q - (1-q) log2(1-q), with h(0) = h(1) = 0.
double binary_entropy(double q);

struct CorrectionResult {
    Bits key_a;
    Bits key_b;
    std::size_t block = 0;
    /// Every parity bit Alice revealed, in order; leaked == transcript.size().
    Bits transcript;
    std::size_t leaked = 0;
    /// Positions where the corrected keys still differ.
    std::size_t residual = 0;
    bool converged = false;
};

/// Two-pass block-parity reconciliation. Pass one uses blocks of `block`
/// positions in order, pass two a seeded shuffle with blocks of block/2. A
/// mismatched block is bisected down to one position, which Bob flips; any
/// flip made in pass two re-opens the pass-one block holding that position.
/// Only Bob's key changes.
///
/// passes > 2 appends further shuffled passes with blocks of 2*block,
/// 4*block, ...; a flip in any pass re-opens the matching block of every
/// other pass.
CorrectionResult error_correct(const Bits& key_a, const Bits& key_b, std::size_t block,
                               std::uint64_t shuffle_seed = 0, std::size_t passes = 2);

/// Passes used when distilling session keys.
inline constexpr std::size_t kDistillPasses = 4;

/// Block size of pass `pass` (0-based) in the schedule above.
std::size_t pass_block(std::size_t block, std::size_t pass);

/// First-pass block size for an estimated error rate: 16 when no error was
/// seen, otherwise the largest power of two not above 0.4/qber, kept in
/// [8, 16]. Meant for the kDistillPasses schedule.
std::size_t default_block_size(double qber);

/// max(0, floor(n (1 - h(qber))) - leaked - security_param)
std::size_t pa_output_length(std::size_t n, std::size_t leaked, double qber, std::size_t security_param);

/// Public randomness for a Toeplitz hash from n input bits to m output bits.
struct ToeplitzSeed {
    Bits bits;  // n + m - 1 bits, or empty when m == 0
    std::size_t input_len = 0;
    std::size_t output_len = 0;

    static ToeplitzSeed draw(std::size_t input_len, std::size_t output_len, Prng& rng);
};

/// out_i = XOR_j T[i][j] key_j with T[i][j] = seed[i - j + n - 1].
Bits toeplitz_hash(const Bits& key, const ToeplitzSeed& seed);

/// Compresses `key` to pa_output_length(...) bits with the given seed, which
/// must have been drawn for exactly those dimensions.
Bits privacy_amplify(const Bits& key, std::size_t leaked, double qber, std::size_t security_param,
                     const ToeplitzSeed& seed);

/// Bits packed MSB-first into bytes, zero-padded, as lowercase hex.
std::string bits_to_hex(const Bits& bits);

}  // namespace eqkd
