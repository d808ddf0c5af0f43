#include "eqkd/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "eqkd/error.hpp"

namespace eqkd {

double efficiency_total(const TrafficCounters& c) {
    const std::uint64_t den = c.q_t + c.b_t;
    if (den == 0) throw Error(Errc::DivisionByZero, "q_t + b_t is zero");
    return static_cast<double>(c.b_s) / static_cast<double>(den);
}

double efficiency_qubits(const TrafficCounters& c) {
    if (c.q_t == 0) throw Error(Errc::DivisionByZero, "q_t is zero");
    return static_cast<double>(c.q_u) / static_cast<double>(c.q_t);
}

RunReport make_report(const SessionConfig& cfg, const RunResult& res, Accounting accounting, bool with_oracle) {
    RunReport r;
    r.protocol = protocol_name(cfg.protocol);
    r.attack = cfg.attack.name();
    r.seed = cfg.seed;
    r.n_rounds = cfg.rounds;
    r.check_fraction = cfg.check_fraction;
    r.abort_threshold = cfg.abort_threshold;
    r.epsilon = cfg.epsilon;
    r.noise_p = cfg.noise.p;
    r.qber = res.qber_estimate;
    if (with_oracle) {
        r.qber_oracle = exact_qber_oracle(cfg.protocol, cfg.attack,
                                          {cfg.epsilon, cfg.noise.p, cfg.hadamard_fraction, cfg.p1_basis})
                            .overall;
    }
    r.aborted = res.status == RunStatus::Aborted;
    const Party ref = res.parties.front();
    if (auto it = res.sifted_keys.find(ref); it != res.sifted_keys.end()) r.key_len_sifted = it->second.size();
    if (auto it = res.final_keys.find(ref); it != res.final_keys.end()) {
        r.key_len_final = it->second.size();
        r.final_key_hex = bits_to_hex(it->second);
    }
    r.counters = accounting == Accounting::AsRun ? res.counters : res.asymptotic;
    r.efficiency_total = efficiency_total(r.counters);
    r.efficiency_qubits = efficiency_qubits(r.counters);
    r.toeplitz_seed_hex = bits_to_hex(res.post.toeplitz.bits);
    r.key_len_raw = res.traces.size();
    r.check_sample = res.check_sample;
    r.check_disagreements = res.check_disagreements;
    r.subset_qber = res.subset_qber;
    r.subset_rounds = res.subset_rounds;
    return r;
}

using ordered_json = nlohmann::ordered_json;

std::string report_to_json(const RunReport& r) {
    ordered_json j;
    j["protocol"] = r.protocol;
    j["attack"] = r.attack;
    j["seed"] = r.seed;
    j["n_rounds"] = r.n_rounds;
    j["check_fraction"] = r.check_fraction;
    j["abort_threshold"] = r.abort_threshold;
    j["epsilon"] = r.epsilon;
    j["noise_p"] = r.noise_p;
    j["qber"] = r.qber;
    j["qber_oracle"] = r.qber_oracle ? ordered_json(*r.qber_oracle) : ordered_json(nullptr);
    j["aborted"] = r.aborted;
    j["key_len_sifted"] = r.key_len_sifted;
    j["key_len_final"] = r.key_len_final;
    j["counters"] = {{"q_t", r.counters.q_t}, {"b_t", r.counters.b_t}, {"b_s", r.counters.b_s}, {"q_u", r.counters.q_u}};
    j["efficiency_total"] = r.efficiency_total;
    j["efficiency_qubits"] = r.efficiency_qubits;
    j["final_key_hex"] = r.final_key_hex;
    j["toeplitz_seed_hex"] = r.toeplitz_seed_hex;
    return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        RunReport r;
        r.protocol = j.at("protocol").get<std::string>();
        r.attack = j.at("attack").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.n_rounds = j.at("n_rounds").get<std::size_t>();
        r.check_fraction = j.at("check_fraction").get<double>();
        r.abort_threshold = j.at("abort_threshold").get<double>();
        r.epsilon = j.at("epsilon").get<double>();
        r.noise_p = j.at("noise_p").get<double>();
        r.qber = j.at("qber").get<double>();
        if (!j.at("qber_oracle").is_null()) r.qber_oracle = j.at("qber_oracle").get<double>();
        r.aborted = j.at("aborted").get<bool>();
        r.key_len_sifted = j.at("key_len_sifted").get<std::size_t>();
        r.key_len_final = j.at("key_len_final").get<std::size_t>();
        const auto& c = j.at("counters");
        r.counters = {c.at("q_t").get<std::uint64_t>(), c.at("b_t").get<std::uint64_t>(),
                      c.at("b_s").get<std::uint64_t>(), c.at("q_u").get<std::uint64_t>()};
        r.efficiency_total = j.at("efficiency_total").get<double>();
        r.efficiency_qubits = j.at("efficiency_qubits").get<double>();
        r.final_key_hex = j.at("final_key_hex").get<std::string>();
        r.toeplitz_seed_hex = j.at("toeplitz_seed_hex").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
}

Summary summarize(const std::vector<RunReport>& reports) {
    if (reports.empty()) throw Error(Errc::EmptyInput, "no reports to summarize");
    Summary s;
    s.protocol = reports.front().protocol;
    s.attack = reports.front().attack;
    s.runs = reports.size();
    s.qber_oracle = reports.front().qber_oracle;

    std::uint64_t sample = 0, dis = 0, aborted = 0;
    bool counts_known = true;
    double qber_sum = 0.0, et = 0.0, eq = 0.0;
    for (const auto& r : reports) {
        if (r.protocol != s.protocol || r.attack != s.attack) {
            throw Error(Errc::HeterogeneousCell, "cell mixes " + s.protocol + "/" + s.attack + " with " + r.protocol +
                                                     "/" + r.attack);
        }
        counts_known = counts_known && r.check_sample > 0;
        sample += r.check_sample;
        dis += r.check_disagreements;
        aborted += r.aborted;
        qber_sum += r.qber;
        et += r.efficiency_total;
        eq += r.efficiency_qubits;
        for (const auto& [b, n] : r.subset_rounds) s.mean_subset_rounds[b] += static_cast<double>(n);
    }
    const double runs = static_cast<double>(reports.size());
    for (auto& [b, n] : s.mean_subset_rounds) n /= runs;
    s.abort_rate = static_cast<double>(aborted) / runs;
    s.mean_efficiency_total = et / runs;
    s.mean_efficiency_qubits = eq / runs;

    constexpr double z99 = 2.5758293035489004;
    double width = 0.0;
    if (counts_known) {
        const double S = static_cast<double>(sample);
        s.mean_qber = static_cast<double>(dis) / S;
        width = z99 * std::sqrt(s.mean_qber * (1.0 - s.mean_qber) / S) + 1.0 / (2.0 * S);
    } else {
        s.mean_qber = qber_sum / runs;
        if (reports.size() > 1) {
            double ss = 0.0;
            for (const auto& r : reports) ss += (r.qber - s.mean_qber) * (r.qber - s.mean_qber);
            width = z99 * std::sqrt(ss / (runs - 1.0) / runs);
        }
    }
    s.ci_low = std::max(0.0, s.mean_qber - width);
    s.ci_high = std::min(1.0, s.mean_qber + width);
    return s;
}

namespace {

template <class T>
std::vector<T> axis_or(const std::vector<T>& axis, T fallback) {
    return axis.empty() ? std::vector<T>{fallback} : axis;
}

}  // namespace

std::vector<SweepCell> run_sweep(const SessionConfig& base, const SweepGrid& grid, std::size_t runs_per_cell,
                                 unsigned threads) {
    const auto attacks = axis_or(grid.attack, base.attack);
    const auto checks = axis_or(grid.check_fraction, base.check_fraction);
    const auto noises = axis_or(grid.noise_p, base.noise.p);
    const auto epsilons = axis_or(grid.epsilon, base.epsilon);
    const std::size_t total = attacks.size() * checks.size() * noises.size() * epsilons.size();
    if (total > kMaxSweepCells) {
        throw Error(Errc::GridTooLarge, std::to_string(total) + " cells exceed the limit of " +
                                            std::to_string(kMaxSweepCells));
    }
    if (runs_per_cell == 0) throw Error(Errc::InvalidConfig, "runs per cell must be at least 1");

    std::vector<SweepCell> cells;
    cells.reserve(total);
    for (const auto& a : attacks)
        for (double c : checks)
            for (double p : noises)
                for (double e : epsilons) {
                    SweepCell cell;
                    cell.index = cells.size();
                    cell.config = base;
                    cell.config.attack = a;
                    cell.config.check_fraction = c;
                    cell.config.noise.p = p;
                    cell.config.epsilon = e;
                    cell.config.seed = base.seed + cell.index;
                    cell.config.validate();
                    cells.push_back(std::move(cell));
                }

    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                auto& cell = cells[i];
                std::vector<RunReport> reports;
                for (std::size_t r = 0; r < runs_per_cell; ++r) {
                    SessionConfig cfg = cell.config;
                    cfg.seed = cell.config.seed + r * total;
                    reports.push_back(make_report(cfg, run_protocol(cfg), Accounting::AsRun, r == 0));
                }
                cell.summary = summarize(reports);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return cells;
}

std::string sweep_to_csv(const std::vector<SweepCell>& cells) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "cell,protocol,attack,epsilon,noise_p,check_fraction,seed,runs,mean_qber,ci_low,ci_high,qber_oracle,"
          "abort_rate,mean_efficiency_total,mean_efficiency_qubits,mean_rounds_alice_z,mean_rounds_alice_x\n";
    auto opt = [&](const std::map<std::string, double>& m, const char* k) {
        if (auto it = m.find(k); it != m.end()) os << it->second;
    };
    for (const auto& c : cells) {
        const auto& s = c.summary;
        os << c.index << ',' << s.protocol << ",\"" << s.attack << "\"," << c.config.epsilon << ',' << c.config.noise.p
           << ',' << c.config.check_fraction << ',' << c.config.seed << ',' << s.runs << ',' << s.mean_qber << ','
           << s.ci_low << ',' << s.ci_high << ',';
        if (s.qber_oracle) os << *s.qber_oracle;
        os << ',' << s.abort_rate << ',' << s.mean_efficiency_total << ',' << s.mean_efficiency_qubits << ',';
        opt(s.mean_subset_rounds, "Z");
        os << ',';
        opt(s.mean_subset_rounds, "X");
        os << '\n';
    }
    return os.str();
}

}  // namespace eqkd
