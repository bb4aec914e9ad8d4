// Experiment orchestration: parameter sweeps over deterministic,
// independently-seeded Monte Carlo trials, optional thread-parallel trial
// execution with order-independent aggregation, and CSV/metadata output.
#pragma once

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "risidd/channel.hpp"
#include "risidd/common.hpp"
#include "risidd/config.hpp"
#include "risidd/idd.hpp"
#include "risidd/ldpc.hpp"
#include "risidd/ris_design.hpp"
#include "risidd/rng.hpp"

namespace risidd {

enum class Variable { ris_distance, power_per_user, users, antennas, elements };
enum class Scheme { linear_passive, linear_active, idd_passive, idd_active };

inline const char* to_string(Variable v) {
    switch (v) {
        case Variable::ris_distance: return "ris_distance";
        case Variable::power_per_user: return "power_per_user";
        case Variable::users: return "users";
        case Variable::antennas: return "antennas";
        default: return "elements";
    }
}

inline Variable variable_from_string(const std::string& s) {
    if (s == "ris_distance") return Variable::ris_distance;
    if (s == "power_per_user") return Variable::power_per_user;
    if (s == "users") return Variable::users;
    if (s == "antennas") return Variable::antennas;
    if (s == "elements") return Variable::elements;
    throw std::invalid_argument("unknown sweep variable: " + s);
}

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::linear_passive: return "linear_passive";
        case Scheme::linear_active: return "linear_active";
        case Scheme::idd_passive: return "idd_passive";
        default: return "idd_active";
    }
}

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "linear_passive") return Scheme::linear_passive;
    if (s == "linear_active") return Scheme::linear_active;
    if (s == "idd_passive") return Scheme::idd_passive;
    if (s == "idd_active") return Scheme::idd_active;
    throw std::invalid_argument("unknown scheme: " + s);
}

inline RisMode scheme_mode(Scheme s) {
    return (s == Scheme::linear_passive || s == Scheme::idd_passive) ? RisMode::passive
                                                                     : RisMode::active;
}

inline bool scheme_iterates(Scheme s) {
    return s == Scheme::idd_passive || s == Scheme::idd_active;
}

struct SweepSpec {
    Variable variable = Variable::ris_distance;
    std::vector<double> values;
    SystemConfig base;
    Scheme scheme = Scheme::idd_passive;
    std::vector<int> tau_list{1};
    int threads = 1;

    void validate() const {
        if (values.empty()) throw std::invalid_argument("SweepSpec: empty value list");
        for (std::size_t i = 1; i < values.size(); ++i)
            if (!(values[i] > values[i - 1]))
                throw std::invalid_argument("SweepSpec: values must be strictly increasing");
        if (scheme_iterates(scheme)) {
            if (tau_list.empty()) throw std::invalid_argument("SweepSpec: empty tau list");
            for (int t : tau_list)
                if (t < 1) throw std::invalid_argument("SweepSpec: IDD schemes need tau >= 1");
        }
        if (threads < 1) throw std::invalid_argument("SweepSpec: threads must be >= 1");
    }
};

struct TrialRecord {
    std::uint64_t seed = 0;
    std::string config_hash;
    bool ok = false;
    long long bit_errors = 0;
    long long bits_total = 0;
    double sum_rate = 0.0;
    RVec sinr;
    std::string message;  // failure reason when !ok
};

struct ResultRow {
    std::string scheme;
    int tau = 0;
    std::string variable;
    double value = 0.0;
    int frames = 0;  // successful trials only
    double ber = 0.0;
    double sum_rate_mean = 0.0;
    double sum_rate_stderr = 0.0;
    std::uint64_t seed = 0;  // cell seed; trial t uses trial_seed(seed, t, 0)
    std::string config_hash;

    bool operator==(const ResultRow&) const = default;
};

struct CellResult {
    std::vector<TrialRecord> trials;
    int frames_ok = 0;
    int frames_failed = 0;
    double ber = 0.0;
    double sum_rate_mean = 0.0;
    double sum_rate_stderr = 0.0;
};

// Apply one sweep-variable setting to a config.
inline SystemConfig apply_variable(SystemConfig cfg, Variable var, double value) {
    const auto as_count = [&](const char* what) {
        const double r = std::round(value);
        if (std::abs(value - r) > 1e-9 || r < 1.0)
            throw std::invalid_argument(std::string("sweep value for ") + what +
                                        " must be a positive integer");
        return static_cast<int>(r);
    };
    switch (var) {
        case Variable::ris_distance: cfg.ris_distance = value; break;
        case Variable::power_per_user: cfg.pt_per_user_dbm = value; break;
        case Variable::users: cfg.K = as_count("users"); break;
        case Variable::antennas: cfg.M = as_count("antennas"); break;
        case Variable::elements: cfg.N = as_count("elements"); break;
    }
    return cfg;
}

// Config for one sweep cell: variable value applied, mode and IDD depth
// taken from the scheme.
inline SystemConfig cell_config(const SystemConfig& base, Scheme scheme, int tau, Variable var,
                                double value) {
    SystemConfig cfg = apply_variable(base, var, value);
    cfg.ris_mode = scheme_mode(scheme);
    cfg.tau = scheme_iterates(scheme) ? tau : 0;
    cfg.validate();
    return cfg;
}

// One independent trial: fresh geometry and fading, reflection design,
// then a full detect/decode frame.
inline TrialRecord run_trial(const SystemConfig& cfg, const PowerBudget& budget,
                             const ParityCheck& pc, std::uint64_t seed) {
    TrialRecord rec;
    rec.seed = seed;
    try {
        Rng rng(seed);
        const Geometry geo = make_geometry(cfg, rng);
        const ChannelSet ch = draw_channels(cfg, geo, rng);
        const DesignResult design = alternating_design(ch, cfg, budget);
        const FrameResult fr = run_frame(cfg, budget, pc, ch, design.state, rng);
        for (int e : fr.bit_errors) rec.bit_errors += e;
        for (int b : fr.bits_total) rec.bits_total += b;
        rec.sum_rate = fr.sum_rate;
        rec.sinr = fr.sinr;
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.message = e.what();
    }
    return rec;
}

// Run all trials of one cell.  Trials are indexed deterministically and
// may execute on any thread; the aggregation below walks records in index
// order, so the result is independent of scheduling.
inline CellResult run_cell(const SystemConfig& cfg, std::uint64_t cell_seed, int threads) {
    cfg.validate();
    const PowerBudget budget = split_power(cfg);
    const ParityCheck pc = construct_code(cfg.ldpc_n, cfg.ldpc_rate, cfg.seed);
    const std::string hash = config_hash(cfg);

    CellResult cell;
    cell.trials.resize(static_cast<std::size_t>(cfg.frames));
    std::atomic<int> next{0};
    const auto worker = [&]() {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= cfg.frames) return;
            auto& rec = cell.trials[static_cast<std::size_t>(t)];
            rec = run_trial(cfg, budget, pc, trial_seed(cell_seed, static_cast<std::uint64_t>(t), 0));
            rec.config_hash = hash;
        }
    };
    const int nthreads = std::min(threads, cfg.frames > 0 ? cfg.frames : 1);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    long long errors = 0, bits = 0;
    double sr_sum = 0.0;
    for (const auto& rec : cell.trials) {
        if (!rec.ok) {
            ++cell.frames_failed;
            continue;
        }
        ++cell.frames_ok;
        errors += rec.bit_errors;
        bits += rec.bits_total;
        sr_sum += rec.sum_rate;
    }
    if (cell.frames_ok > 0) {
        cell.ber = static_cast<double>(errors) / static_cast<double>(bits);
        cell.sum_rate_mean = sr_sum / cell.frames_ok;
        if (cell.frames_ok > 1) {
            double ss = 0.0;
            for (const auto& rec : cell.trials) {
                if (!rec.ok) continue;
                const double dlt = rec.sum_rate - cell.sum_rate_mean;
                ss += dlt * dlt;
            }
            cell.sum_rate_stderr =
                std::sqrt(ss / (static_cast<double>(cell.frames_ok - 1) * cell.frames_ok));
        }
    }
    return cell;
}

struct SweepResult {
    std::vector<ResultRow> rows;
    int trials_attempted = 0;
    int trials_failed = 0;
    std::vector<std::string> failures;  // "seed=...: message", capped
};

inline ResultRow make_row(const SystemConfig& cfg, Scheme scheme, Variable var, double value,
                          std::uint64_t cell_seed, const CellResult& cell) {
    ResultRow row;
    row.scheme = to_string(scheme);
    row.tau = cfg.tau;
    row.variable = to_string(var);
    row.value = value;
    row.frames = cell.frames_ok;
    row.ber = cell.ber;
    row.sum_rate_mean = cell.sum_rate_mean;
    row.sum_rate_stderr = cell.sum_rate_stderr;
    row.seed = cell_seed;
    row.config_hash = config_hash(cfg);
    return row;
}

// Sweep one variable across its values (and, for IDD schemes, across IDD
// depths).  Cell seeds are derived positionally from the base seed, so a
// row can later be regenerated in isolation.  Aborts when more than 1% of
// all attempted trials fail.
inline SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<int> taus = scheme_iterates(spec.scheme) ? spec.tau_list : std::vector<int>{0};
    SweepResult out;
    for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
        for (std::size_t ti = 0; ti < taus.size(); ++ti) {
            const SystemConfig cfg =
                cell_config(spec.base, spec.scheme, taus[ti], spec.variable, spec.values[vi]);
            const std::uint64_t cell_seed =
                trial_seed(spec.base.seed, static_cast<std::uint64_t>(ti), static_cast<std::uint64_t>(vi));
            const CellResult cell = run_cell(cfg, cell_seed, spec.threads);
            out.trials_attempted += cfg.frames;
            out.trials_failed += cell.frames_failed;
            for (const auto& rec : cell.trials)
                if (!rec.ok && out.failures.size() < 32)
                    out.failures.push_back("seed=" + std::to_string(rec.seed) + ": " + rec.message);
            out.rows.push_back(make_row(cfg, spec.scheme, spec.variable, spec.values[vi], cell_seed, cell));
        }
    }
    if (out.trials_failed * 100 > out.trials_attempted) {
        std::string msg = "sweep aborted: " + std::to_string(out.trials_failed) + "/" +
                          std::to_string(out.trials_attempted) + " trials failed";
        for (const auto& f : out.failures) msg += "\n  " + f;
        throw std::runtime_error(msg);
    }
    return out;
}

// Recompute a sweep row from its stored cell seed.  The caller supplies the
// sweep context (base config, scheme, variable); the row's config hash is
// cross-checked before running so a mismatched base fails loudly rather
// than silently producing different numbers.
inline ResultRow regenerate_row(const SystemConfig& base, const ResultRow& row, int threads) {
    const Scheme scheme = scheme_from_string(row.scheme);
    const Variable var = variable_from_string(row.variable);
    const SystemConfig cfg = cell_config(base, scheme, row.tau, var, row.value);
    if (config_hash(cfg) != row.config_hash)
        throw std::invalid_argument("regenerate_row: config hash mismatch (wrong base config)");
    const CellResult cell = run_cell(cfg, row.seed, threads);
    return make_row(cfg, scheme, var, row.value, row.seed, cell);
}

namespace detail {
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

inline constexpr const char* kCsvHeader =
    "scheme,tau,variable,value,frames,ber,sum_rate_mean,sum_rate_stderr,seed,config_hash";

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.scheme << ',' << r.tau << ',' << r.variable << ',' << detail::format_double(r.value)
            << ',' << r.frames << ',' << detail::format_double(r.ber) << ','
            << detail::format_double(r.sum_rate_mean) << ','
            << detail::format_double(r.sum_rate_stderr) << ',' << r.seed << ',' << r.config_hash
            << '\n';
    }
    if (!out.flush()) throw std::runtime_error("emit_csv: write failed for " + path);
}

inline std::vector<ResultRow> load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::runtime_error("load_csv: bad header in " + path);
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 10) throw std::runtime_error("load_csv: malformed row in " + path);
        ResultRow r;
        r.scheme = f[0];
        r.tau = std::stoi(f[1]);
        r.variable = f[2];
        r.value = std::strtod(f[3].c_str(), nullptr);
        r.frames = std::stoi(f[4]);
        r.ber = std::strtod(f[5].c_str(), nullptr);
        r.sum_rate_mean = std::strtod(f[6].c_str(), nullptr);
        r.sum_rate_stderr = std::strtod(f[7].c_str(), nullptr);
        r.seed = std::strtoull(f[8].c_str(), nullptr, 10);
        r.config_hash = f[9];
        rows.push_back(std::move(r));
    }
    return rows;
}

// Sidecar capturing the full run configuration next to a result file.
inline void write_metadata(const SweepSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_metadata: cannot open " + path);
    const SystemConfig& c = spec.base;
    out << "scheme=" << to_string(spec.scheme) << '\n';
    out << "variable=" << to_string(spec.variable) << '\n';
    out << "values=";
    for (std::size_t i = 0; i < spec.values.size(); ++i)
        out << (i ? " " : "") << detail::format_double(spec.values[i]);
    out << '\n' << "tau_list=";
    for (std::size_t i = 0; i < spec.tau_list.size(); ++i) out << (i ? " " : "") << spec.tau_list[i];
    out << '\n';
    out << "threads=" << spec.threads << '\n';
    out << "K=" << c.K << '\n' << "M=" << c.M << '\n' << "N=" << c.N << '\n';
    out << "ris_mode=" << to_string(c.ris_mode) << '\n';
    out << "sigma_s2_dbm=" << detail::format_double(c.sigma_s2_dbm) << '\n';
    out << "sigma_v2_dbm=" << detail::format_double(c.sigma_v2_dbm) << '\n';
    out << "pt_per_user_dbm=" << detail::format_double(c.pt_per_user_dbm) << '\n';
    out << "tau=" << c.tau << '\n';
    out << "ldpc_n=" << c.ldpc_n << '\n';
    out << "ldpc_rate=" << detail::format_double(c.ldpc_rate) << '\n';
    out << "ldpc_max_inner=" << c.ldpc_max_inner << '\n';
    out << "frames=" << c.frames << '\n';
    out << "seed=" << c.seed << '\n';
    out << "n_alt=" << c.n_alt << '\n';
    out << "span_L=" << detail::format_double(c.span_L) << '\n';
    out << "ris_distance=" << detail::format_double(c.ris_distance) << '\n';
    out << "ris_height=" << detail::format_double(c.ris_height) << '\n';
    out << "user_radius=" << detail::format_double(c.user_radius) << '\n';
    out << "base_config_hash=" << config_hash(c) << '\n';
    if (!out.flush()) throw std::runtime_error("write_metadata: write failed for " + path);
}

}  // namespace risidd
