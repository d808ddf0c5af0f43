#include "eqkd/postprocess.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>
#include <vector>

#include "eqkd/error.hpp"

namespace eqkd {

double binary_entropy(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw Error(Errc::OutOfRange, "binary entropy needs q in [0, 1]");
    if (q == 0.0 || q == 1.0) return 0.0;
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

namespace {

struct ParityPass {
    std::vector<std::size_t> order;
    std::size_t block = 1;
    std::vector<std::size_t> block_of;  // indexed by key position
    std::vector<std::uint8_t> alice_parity;

    std::size_t num_blocks() const { return (order.size() + block - 1) / block; }
    std::span<const std::size_t> members(std::size_t b) const {
        const std::size_t lo = b * block;
        const std::size_t hi = std::min(order.size(), lo + block);
        return std::span<const std::size_t>(order).subspan(lo, hi - lo);
    }
};

std::uint8_t parity_of(const Bits& key, std::span<const std::size_t> positions) {
    std::uint8_t p = 0;
    for (std::size_t i : positions) p ^= key[i];
    return p;
}

class Reconciler {
public:
    Reconciler(const Bits& a, Bits b) : a_(a), b_(std::move(b)) {}

    ParityPass make_pass(std::vector<std::size_t> order, std::size_t block) {
        ParityPass pass;
        pass.order = std::move(order);
        pass.block = block;
        pass.block_of.resize(pass.order.size());
        for (std::size_t k = 0; k < pass.order.size(); ++k) pass.block_of[pass.order[k]] = k / block;
        for (std::size_t blk = 0; blk < pass.num_blocks(); ++blk) pass.alice_parity.push_back(reveal(pass.members(blk)));
        return pass;
    }

    bool mismatched(const ParityPass& pass, std::size_t blk) const {
        return pass.alice_parity[blk] != parity_of(b_, pass.members(blk));
    }

    /// Binary search for a discrepancy inside an odd-parity block; flips it.
    std::size_t bisect_and_flip(const ParityPass& pass, std::size_t blk) {
        auto span = pass.members(blk);
        while (span.size() > 1) {
            const auto half = span.first((span.size() + 1) / 2);
            if (reveal(half) != parity_of(b_, half)) {
                span = half;
            } else {
                span = span.subspan(half.size());
            }
        }
        b_[span[0]] ^= 1;
        return span[0];
    }

    const Bits& bob() const { return b_; }
    Bits take_transcript() { return std::move(transcript_); }

private:
    std::uint8_t reveal(std::span<const std::size_t> positions) {
        const std::uint8_t p = parity_of(a_, positions);
        transcript_.push_back(p);
        return p;
    }

    const Bits& a_;
    Bits b_;
    Bits transcript_;
};

}  // namespace

std::size_t pass_block(std::size_t block, std::size_t pass) {
    if (pass == 0) return block;
    if (pass == 1) return std::max<std::size_t>(1, block / 2);
    return block << (pass - 1);
}

CorrectionResult error_correct(const Bits& key_a, const Bits& key_b, std::size_t block, std::uint64_t shuffle_seed,
                               std::size_t passes) {
    if (key_a.size() != key_b.size()) throw Error(Errc::LengthMismatch, "keys differ in length");
    if (block == 0 || key_a.size() < block) {
        throw Error(Errc::LengthMismatch, "key length " + std::to_string(key_a.size()) + " is below block " +
                                              std::to_string(block));
    }
    if (passes < 2) throw Error(Errc::OutOfRange, "at least two passes are required");
    const std::size_t n = key_a.size();
    Reconciler rec(key_a, key_b);

    std::vector<std::size_t> identity(n);
    std::iota(identity.begin(), identity.end(), 0);
    std::vector<ParityPass> passes_done;
    Prng rng(shuffle_seed);
    std::deque<std::pair<std::size_t, std::size_t>> pending;
    for (std::size_t p = 0; p < passes; ++p) {
        std::vector<std::size_t> order = identity;
        if (p > 0) {
            for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(i)]);
        }
        passes_done.push_back(rec.make_pass(std::move(order), pass_block(block, p)));
        for (std::size_t blk = 0; blk < passes_done[p].num_blocks(); ++blk) pending.emplace_back(p, blk);
        // A flip re-opens the block holding that position in every other pass.
        while (!pending.empty()) {
            const auto [q, blk] = pending.front();
            pending.pop_front();
            if (!rec.mismatched(passes_done[q], blk)) continue;
            const std::size_t pos = rec.bisect_and_flip(passes_done[q], blk);
            for (std::size_t r = 0; r < passes_done.size(); ++r) {
                if (r != q) pending.emplace_back(r, passes_done[r].block_of[pos]);
            }
        }
    }

    CorrectionResult out;
    out.key_a = key_a;
    out.key_b = rec.bob();
    out.block = block;
    out.transcript = rec.take_transcript();
    out.leaked = out.transcript.size();
    for (std::size_t i = 0; i < n; ++i) out.residual += out.key_a[i] != out.key_b[i];
    out.converged = out.residual == 0;
    return out;
}

std::size_t default_block_size(double qber) {
    if (qber <= 0.0) return 16;
    const double target = 0.4 / qber;
    std::size_t b = 8;
    while (b < 16 && static_cast<double>(b * 2) <= target) b *= 2;
    return b;
}

std::size_t pa_output_length(std::size_t n, std::size_t leaked, double qber, std::size_t security_param) {
    const double raw = std::floor(static_cast<double>(n) * (1.0 - binary_entropy(qber)));
    const double m = raw - static_cast<double>(leaked) - static_cast<double>(security_param);
    return m > 0.0 ? static_cast<std::size_t>(m) : 0;
}

ToeplitzSeed ToeplitzSeed::draw(std::size_t input_len, std::size_t output_len, Prng& rng) {
    ToeplitzSeed s;
    s.input_len = input_len;
    s.output_len = output_len;
    if (output_len == 0 || input_len == 0) return s;
    s.bits.resize(input_len + output_len - 1);
    for (auto& b : s.bits) b = static_cast<std::uint8_t>(rng.bit());
    return s;
}

namespace {

std::vector<std::uint64_t> pack(const Bits& bits, std::size_t extra_words) {
    std::vector<std::uint64_t> w(bits.size() / 64 + 1 + extra_words, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) w[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return w;
}

std::uint64_t window64(const std::vector<std::uint64_t>& words, std::size_t offset) {
    const std::size_t w = offset / 64;
    const std::size_t s = offset % 64;
    if (s == 0) return words[w];
    return (words[w] >> s) | (words[w + 1] << (64 - s));
}

}  // namespace

Bits toeplitz_hash(const Bits& key, const ToeplitzSeed& seed) {
    const std::size_t n = key.size();
    const std::size_t m = seed.output_len;
    if (seed.input_len != n) throw Error(Errc::LengthMismatch, "Toeplitz seed drawn for a different input length");
    if (m == 0) return {};
    if (seed.bits.size() != n + m - 1) throw Error(Errc::LengthMismatch, "Toeplitz seed has the wrong length");

    // Row i of T read left to right is the reversed seed from m-1-i onward.
    Bits reversed(seed.bits.rbegin(), seed.bits.rend());
    const auto r = pack(reversed, 1);
    const auto k = pack(key, 0);
    const std::size_t key_words = (n + 63) / 64;

    Bits out(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t start = m - 1 - i;
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < key_words; ++w) acc ^= window64(r, start + 64 * w) & k[w];
        out[i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
    }
    return out;
}

Bits privacy_amplify(const Bits& key, std::size_t leaked, double qber, std::size_t security_param,
                     const ToeplitzSeed& seed) {
    const std::size_t m = pa_output_length(key.size(), leaked, qber, security_param);
    if (seed.output_len != m) {
        throw Error(Errc::LengthMismatch, "Toeplitz seed drawn for " + std::to_string(seed.output_len) +
                                              " output bits, length rule gives " + std::to_string(m));
    }
    return toeplitz_hash(key, seed);
}

std::string bits_to_hex(const Bits& bits) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (std::size_t i = 0; i < bits.size(); i += 8) {
        unsigned byte = 0;
        for (std::size_t j = 0; j < 8; ++j) {
            byte <<= 1;
            if (i + j < bits.size()) byte |= bits[i + j] & 1U;
        }
        out += kHex[byte >> 4];
        out += kHex[byte & 0xF];
    }
    return out;
}

}  // namespace eqkd
