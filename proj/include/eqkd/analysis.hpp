#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eqkd/channels.hpp"
#include "eqkd/protocols.hpp"

namespace eqkd {

/// b_s / (q_t + b_t). Throws DivisionByZero when q_t + b_t == 0.
double efficiency_total(const TrafficCounters& c);
/// q_u / q_t. Throws DivisionByZero when q_t == 0.
double efficiency_qubits(const TrafficCounters& c);

/// Which counters a report carries: the ones metered during the run, or the
/// check_fraction -> 0 limit.
enum class Accounting : std::uint8_t { AsRun, Asymptotic };

struct RunReport {
    std::string protocol;
    std::string attack;
    std::uint64_t seed = 0;
    std::size_t n_rounds = 0;
    double check_fraction = 0.0;
    double abort_threshold = 0.0;
    double epsilon = 0.0;
    double noise_p = 0.0;
    double qber = 0.0;
    std::optional<double> qber_oracle;
    bool aborted = false;
    std::size_t key_len_sifted = 0;
    std::size_t key_len_final = 0;
    TrafficCounters counters;
    double efficiency_total = 0.0;
    double efficiency_qubits = 0.0;
    std::string final_key_hex;
    std::string toeplitz_seed_hex;

    // Not serialized.
    std::size_t key_len_raw = 0;
    std::size_t check_sample = 0;
    std::size_t check_disagreements = 0;
    std::map<std::string, double> subset_qber;
    std::map<std::string, std::size_t> subset_rounds;
};

RunReport make_report(const SessionConfig& cfg, const RunResult& res, Accounting accounting = Accounting::AsRun,
                      bool with_oracle = true);

/// Flat JSON object with the fixed key order; pretty-printed with 2-space
/// indent and a trailing newline.
std::string report_to_json(const RunReport& r);
/// Throws ParseError on malformed input or missing keys. Efficiencies are
/// taken from the file, not recomputed.
RunReport report_from_json(const std::string& text);

struct Summary {
    std::string protocol;
    std::string attack;
    std::size_t runs = 0;
    /// Pooled disagreements over pooled check samples when every report
    /// carries its sample counts, otherwise the mean of per-run estimates.
    double mean_qber = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double abort_rate = 0.0;
    double mean_efficiency_total = 0.0;
    double mean_efficiency_qubits = 0.0;
    std::optional<double> qber_oracle;
    /// Mean rounds per Alice basis (three-particle protocol only).
    std::map<std::string, double> mean_subset_rounds;
};

/// Throws EmptyInput on an empty list, HeterogeneousCell when protocol or
/// attack differ. The 99% interval uses the normal approximation with a
/// 1/(2S) continuity correction, clamped to [0, 1].
Summary summarize(const std::vector<RunReport>& reports);

struct SweepGrid {
    std::vector<double> epsilon;
    std::vector<double> noise_p;
    std::vector<double> check_fraction;
    std::vector<EveStrategy> attack;
};

struct SweepCell {
    std::size_t index = 0;
    SessionConfig config;
    Summary summary;
};

inline constexpr std::size_t kMaxSweepCells = 10000;

/// Cartesian product of the grid axes (an empty axis keeps the base value),
/// ordered attack, check_fraction, noise_p, epsilon with epsilon varying
/// fastest. Cell i runs with seed base.seed + i; further runs in the same
/// cell add multiples of the cell count. Throws GridTooLarge beyond
/// kMaxSweepCells cells.
std::vector<SweepCell> run_sweep(const SessionConfig& base, const SweepGrid& grid, std::size_t runs_per_cell,
                                 unsigned threads = 0);

std::string sweep_to_csv(const std::vector<SweepCell>& cells);

}  // namespace eqkd
