// Regular LDPC code: progressive-edge-growth construction, systematic
// encoding through GF(2) elimination, and flooding sum-product decoding.
//
// The code is (3, 3/(1-R))-regular.  Girth >= 6 (no 4-cycles) is
// enforced whenever it is combinatorially possible: a column-weight-3
// code needs 3n distinct check pairs, so m(m-1)/2 >= 3n is necessary.
// Below that bound (tiny toy codes) the constructor keeps the PEG
// best-effort graph and marks girth6 = false.
#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "risidd/common.hpp"
#include "risidd/rng.hpp"

namespace risidd {

struct ParityCheck {
    int n = 0;        // block length
    int m = 0;        // parity rows
    int k_info = 0;   // information length
    int col_weight = 3;
    int row_weight = 0;
    std::uint64_t seed = 0;
    bool girth6 = false;

    std::vector<std::vector<int>> rows;  // column indices per row, sorted
    std::vector<std::vector<int>> cols;  // row indices per column, sorted

    // Encoder tables from the reduced row echelon form of H.
    std::vector<int> info_positions;    // k_info non-pivot columns
    std::vector<int> parity_positions;  // m pivot columns
    std::vector<std::vector<std::uint64_t>> enc_cols;  // per info bit, m-bit parity mask

    // Row-major edge layout shared by all decode calls.
    std::vector<int> edge_col;          // column of each edge
    std::vector<int> col_edge_ptr;      // per-column slice into col_edge
    std::vector<int> col_edge;          // edge ids attached to each column
};

struct DecodeResult {
    RVec posterior;
    RVec extrinsic;
    std::vector<std::uint8_t> hard;
    bool converged = false;
    int iterations = 0;
};

namespace detail {

inline bool has_four_cycle(const std::vector<std::vector<int>>& rows, int n) {
    std::unordered_set<std::uint64_t> pairs;
    pairs.reserve(rows.size() * 16);
    for (const auto& r : rows) {
        for (std::size_t a = 0; a + 1 < r.size(); ++a)
            for (std::size_t b = a + 1; b < r.size(); ++b) {
                const std::uint64_t key =
                    static_cast<std::uint64_t>(r[a]) * static_cast<std::uint64_t>(n) + r[b];
                if (!pairs.insert(key).second) return true;
            }
    }
    return false;
}

// Grow an exactly regular bipartite graph edge by edge, preferring checks
// whose connection creates no short cycle, then repair whatever defects
// the strict degree caps forced (parallel edges always, 4-cycles when
// girth is being enforced) with degree-preserving edge swaps.  Returns
// per-check symbol lists; empty on failure.
inline std::vector<std::vector<int>> regular_graph(int n, int m, int col_weight, int row_weight,
                                                   bool enforce_girth, std::uint64_t seed) {
    std::vector<std::vector<int>> check_syms(static_cast<std::size_t>(m));
    std::vector<std::vector<int>> sym_checks(static_cast<std::size_t>(n));
    std::vector<int> deg(static_cast<std::size_t>(m), 0);

    // deterministic per-decision tie-break ranks
    const auto rank_of = [&](std::uint64_t salt, int c) {
        return splitmix64(seed ^ splitmix64(salt) ^
                          (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(c) + 1)));
    };

    std::vector<int> depth(static_cast<std::size_t>(m));
    std::vector<char> sym_seen(static_cast<std::size_t>(n));

    // --- growth: plain greedy tree expansion from each symbol
    for (int sym = 0; sym < n; ++sym) {
        for (int t = 0; t < col_weight; ++t) {
            // distances from sym to every check (odd: 1, 3, 5, ...)
            std::fill(depth.begin(), depth.end(), -1);
            std::fill(sym_seen.begin(), sym_seen.end(), 0);
            sym_seen[static_cast<std::size_t>(sym)] = 1;
            std::vector<int> frontier{sym};
            int level = 1;
            while (!frontier.empty()) {
                std::vector<int> new_checks;
                for (int v : frontier)
                    for (int c : sym_checks[static_cast<std::size_t>(v)])
                        if (depth[static_cast<std::size_t>(c)] < 0) {
                            depth[static_cast<std::size_t>(c)] = level;
                            new_checks.push_back(c);
                        }
                if (new_checks.empty()) break;
                std::vector<int> next_syms;
                for (int c : new_checks)
                    for (int v : check_syms[static_cast<std::size_t>(c)])
                        if (!sym_seen[static_cast<std::size_t>(v)]) {
                            sym_seen[static_cast<std::size_t>(v)] = 1;
                            next_syms.push_back(v);
                        }
                frontier = std::move(next_syms);
                level += 2;
            }

            const std::uint64_t salt = static_cast<std::uint64_t>(sym) * 64u +
                                       static_cast<std::uint64_t>(t);
            const auto pick_where = [&](auto&& accept) {
                int best = -1;
                std::uint64_t best_rank = 0;
                for (int c = 0; c < m; ++c) {
                    if (deg[static_cast<std::size_t>(c)] >= row_weight || !accept(c)) continue;
                    const std::uint64_t r = rank_of(salt, c);
                    if (best < 0 || deg[static_cast<std::size_t>(c)] < deg[static_cast<std::size_t>(best)] ||
                        (deg[static_cast<std::size_t>(c)] == deg[static_cast<std::size_t>(best)] && r < best_rank)) {
                        best = c;
                        best_rank = r;
                    }
                }
                return best;
            };

            // unreached checks close no cycle; otherwise take the most
            // distant reachable one (the longer the path, the longer the
            // cycle), even if that forces a defect for the repair pass.
            int chosen = pick_where([&](int c) { return depth[static_cast<std::size_t>(c)] < 0; });
            if (chosen < 0) {
                int dmax = -1;
                for (int c = 0; c < m; ++c)
                    if (deg[static_cast<std::size_t>(c)] < row_weight)
                        dmax = std::max(dmax, depth[static_cast<std::size_t>(c)]);
                if (dmax >= 0)
                    chosen = pick_where([&](int c) { return depth[static_cast<std::size_t>(c)] == dmax; });
            }
            if (chosen < 0) return {};  // no capacity anywhere: cannot happen for exact budgets
            sym_checks[static_cast<std::size_t>(sym)].push_back(chosen);
            check_syms[static_cast<std::size_t>(chosen)].push_back(sym);
            ++deg[static_cast<std::size_t>(chosen)];
        }
    }

    // --- repair: swap edge endpoints until the graph is simple and, when
    // requested, 4-cycle free.  A swap keeps every degree intact, and a
    // swap is only accepted when both replacement edges are clean, so no
    // new defect can appear and the defect count strictly decreases.
    std::vector<int> es, ec;
    es.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(col_weight));
    ec.reserve(es.capacity());
    for (int c = 0; c < m; ++c)
        for (int s : check_syms[static_cast<std::size_t>(c)]) {
            es.push_back(s);
            ec.push_back(c);
        }
    const int E = static_cast<int>(es.size());

    const auto shared_checks = [&](int a, int b) {
        int cnt = 0;
        for (int ca : sym_checks[static_cast<std::size_t>(a)])
            for (int cb : sym_checks[static_cast<std::size_t>(b)])
                if (ca == cb) ++cnt;
        return cnt;
    };
    const auto edge_bad = [&](int s, int c) {
        int par = 0;
        for (int cc : sym_checks[static_cast<std::size_t>(s)])
            if (cc == c) ++par;
        if (par >= 2) return true;  // parallel edge
        if (!enforce_girth) return false;
        for (int s2 : check_syms[static_cast<std::size_t>(c)])
            if (s2 != s && shared_checks(s, s2) >= 2) return true;  // 4-cycle
        return false;
    };
    const auto drop_one = [](std::vector<int>& v, int x) {
        for (auto it = v.begin(); it != v.end(); ++it)
            if (*it == x) {
                v.erase(it);
                return;
            }
    };
    const auto apply_swap = [&](int s1, int c1, int s2, int c2) {
        drop_one(sym_checks[static_cast<std::size_t>(s1)], c1);
        drop_one(check_syms[static_cast<std::size_t>(c1)], s1);
        drop_one(sym_checks[static_cast<std::size_t>(s2)], c2);
        drop_one(check_syms[static_cast<std::size_t>(c2)], s2);
        sym_checks[static_cast<std::size_t>(s1)].push_back(c2);
        check_syms[static_cast<std::size_t>(c2)].push_back(s1);
        sym_checks[static_cast<std::size_t>(s2)].push_back(c1);
        check_syms[static_cast<std::size_t>(c1)].push_back(s2);
    };

    std::uint64_t rstate = splitmix64(seed ^ 0x5ca1ab1e5eed5ULL);
    const auto next_rand = [&]() { return rstate = splitmix64(rstate); };

    const int max_fixes = 16 * E + 64;
    int fixes = 0;
    for (;;) {
        int bad = -1;
        for (int e = 0; e < E; ++e)
            if (edge_bad(es[static_cast<std::size_t>(e)], ec[static_cast<std::size_t>(e)])) {
                bad = e;
                break;
            }
        if (bad < 0) break;
        if (++fixes > max_fixes) return {};
        bool swapped = false;
        for (int attempt = 0; attempt < 800 && !swapped; ++attempt) {
            const int e2 = static_cast<int>(next_rand() % static_cast<std::uint64_t>(E));
            const int s1 = es[static_cast<std::size_t>(bad)], c1 = ec[static_cast<std::size_t>(bad)];
            const int s2 = es[static_cast<std::size_t>(e2)], c2 = ec[static_cast<std::size_t>(e2)];
            if (s1 == s2 || c1 == c2) continue;
            apply_swap(s1, c1, s2, c2);
            if (!edge_bad(s1, c2) && !edge_bad(s2, c1)) {
                es[static_cast<std::size_t>(bad)] = s1;
                ec[static_cast<std::size_t>(bad)] = c2;
                es[static_cast<std::size_t>(e2)] = s2;
                ec[static_cast<std::size_t>(e2)] = c1;
                swapped = true;
            } else {
                apply_swap(s1, c2, s2, c1);  // revert
            }
        }
        if (!swapped) return {};
    }
    return check_syms;
}

inline void build_edges(ParityCheck& pc) {
    pc.edge_col.clear();
    pc.col_edge_ptr.assign(static_cast<std::size_t>(pc.n) + 1, 0);
    int e = 0;
    for (const auto& row : pc.rows)
        for (int c : row) {
            pc.edge_col.push_back(c);
            ++pc.col_edge_ptr[static_cast<std::size_t>(c) + 1];
            ++e;
        }
    for (int c = 0; c < pc.n; ++c) pc.col_edge_ptr[c + 1] += pc.col_edge_ptr[c];
    pc.col_edge.resize(static_cast<std::size_t>(e));
    std::vector<int> fill(pc.col_edge_ptr.begin(), pc.col_edge_ptr.end() - 1);
    for (int id = 0; id < e; ++id) pc.col_edge[fill[pc.edge_col[id]]++] = id;
}

inline int bit_words(int bits) { return (bits + 63) / 64; }

inline bool get_bit(const std::vector<std::uint64_t>& w, int i) {
    return (w[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1ULL;
}

inline void set_bit(std::vector<std::uint64_t>& w, int i) {
    w[static_cast<std::size_t>(i) >> 6] |= 1ULL << (i & 63);
}

// RREF over GF(2); fills the encoder tables.  Returns false when H is
// row-rank deficient.
inline bool build_encoder(ParityCheck& pc) {
    const int words = bit_words(pc.n);
    std::vector<std::vector<std::uint64_t>> r(static_cast<std::size_t>(pc.m),
                                              std::vector<std::uint64_t>(words, 0));
    for (int i = 0; i < pc.m; ++i)
        for (int c : pc.rows[i]) set_bit(r[i], c);

    std::vector<int> pivot_col;
    pivot_col.reserve(pc.m);
    int rank = 0;
    for (int col = 0; col < pc.n && rank < pc.m; ++col) {
        int p = -1;
        for (int i = rank; i < pc.m; ++i)
            if (get_bit(r[i], col)) { p = i; break; }
        if (p < 0) continue;
        std::swap(r[rank], r[p]);
        for (int i = 0; i < pc.m; ++i) {
            if (i != rank && get_bit(r[i], col))
                for (int w = 0; w < words; ++w) r[i][w] ^= r[rank][w];
        }
        pivot_col.push_back(col);
        ++rank;
    }
    if (rank < pc.m) return false;

    std::vector<char> is_pivot(pc.n, 0);
    for (int c : pivot_col) is_pivot[c] = 1;
    pc.parity_positions = pivot_col;
    pc.info_positions.clear();
    for (int c = 0; c < pc.n; ++c)
        if (!is_pivot[c]) pc.info_positions.push_back(c);
    pc.k_info = static_cast<int>(pc.info_positions.size());

    const int mwords = bit_words(pc.m);
    pc.enc_cols.assign(pc.info_positions.size(), std::vector<std::uint64_t>(mwords, 0));
    for (std::size_t j = 0; j < pc.info_positions.size(); ++j) {
        const int col = pc.info_positions[j];
        for (int row = 0; row < pc.m; ++row)
            if (get_bit(r[row], col)) set_bit(pc.enc_cols[j], row);
    }
    return true;
}

}  // namespace detail

// Deterministic for a fixed seed; retries internally with derived seeds
// until regularity, rank, and (when feasible) girth requirements hold.
inline ParityCheck construct_code(int n, double rate, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("construct_code: n must be positive");
    const double m_real = n * (1.0 - rate);
    const int m = static_cast<int>(std::lround(m_real));
    if (std::abs(m_real - m) > 1e-9) throw std::invalid_argument("construct_code: n*(1-rate) not integral");
    const int col_weight = 3;
    if (m < col_weight) throw std::invalid_argument("construct_code: too few parity rows");
    if ((static_cast<long long>(col_weight) * n) % m != 0)
        throw std::invalid_argument("construct_code: col_weight*n/m not integral, no regular code");
    const int row_weight = col_weight * n / m;
    const bool girth6_feasible =
        static_cast<long long>(col_weight) * n <= static_cast<long long>(m) * (m - 1) / 2;

    const int max_attempts = 64;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const std::uint64_t attempt_seed = splitmix64(seed + static_cast<std::uint64_t>(attempt));
        auto check_syms =
            detail::regular_graph(n, m, col_weight, row_weight, girth6_feasible, attempt_seed);
        if (check_syms.empty()) continue;

        ParityCheck pc;
        pc.n = n;
        pc.m = m;
        pc.col_weight = col_weight;
        pc.row_weight = row_weight;
        pc.seed = seed;
        pc.rows.resize(static_cast<std::size_t>(m));
        pc.cols.assign(static_cast<std::size_t>(n), {});
        for (int i = 0; i < m; ++i) {
            pc.rows[i] = check_syms[i];
            std::sort(pc.rows[i].begin(), pc.rows[i].end());
            for (int c : pc.rows[i]) pc.cols[c].push_back(i);
        }
        pc.girth6 = !detail::has_four_cycle(pc.rows, n);
        if (girth6_feasible && !pc.girth6) continue;
        if (!detail::build_encoder(pc)) continue;
        detail::build_edges(pc);
        return pc;
    }
    throw std::runtime_error("construct_code: no valid code after " + std::to_string(max_attempts) +
                             " attempts (n=" + std::to_string(n) + ", seed=" + std::to_string(seed) + ")");
}

inline std::vector<std::uint8_t> encode(const ParityCheck& pc, const std::vector<std::uint8_t>& info) {
    if (static_cast<int>(info.size()) != pc.k_info)
        throw std::invalid_argument("encode: wrong information length");
    std::vector<std::uint8_t> c(static_cast<std::size_t>(pc.n), 0);
    std::vector<std::uint64_t> parity(detail::bit_words(pc.m), 0);
    for (std::size_t j = 0; j < info.size(); ++j) {
        if (!info[j]) continue;
        c[static_cast<std::size_t>(pc.info_positions[j])] = 1;
        const auto& col = pc.enc_cols[j];
        for (std::size_t w = 0; w < parity.size(); ++w) parity[w] ^= col[w];
    }
    for (int r = 0; r < pc.m; ++r)
        c[static_cast<std::size_t>(pc.parity_positions[r])] =
            static_cast<std::uint8_t>(detail::get_bit(parity, r));
    return c;
}

inline std::vector<std::uint8_t> extract_info(const ParityCheck& pc, const std::vector<std::uint8_t>& codeword) {
    std::vector<std::uint8_t> u(static_cast<std::size_t>(pc.k_info));
    for (int j = 0; j < pc.k_info; ++j) u[j] = codeword[static_cast<std::size_t>(pc.info_positions[j])];
    return u;
}

inline bool syndrome_zero(const ParityCheck& pc, const std::vector<std::uint8_t>& bits) {
    for (const auto& row : pc.rows) {
        int acc = 0;
        for (int c : row) acc ^= bits[static_cast<std::size_t>(c)];
        if (acc) return false;
    }
    return true;
}

// Flooding sum-product.  Messages live in the tanh domain and every LLR
// is clipped to +-kLlrClip.  The extrinsic output is the sum of incoming
// check messages, so posterior == channel + extrinsic holds exactly.
inline DecodeResult decode(const ParityCheck& pc, const RVec& channel_llr, int max_inner) {
    if (channel_llr.size() != pc.n) throw std::invalid_argument("decode: LLR length mismatch");
    if (!channel_llr.allFinite()) throw std::invalid_argument("decode: LLRs must be finite");

    const int n_edges = static_cast<int>(pc.edge_col.size());
    std::vector<double> v2c(static_cast<std::size_t>(n_edges));
    std::vector<double> c2v(static_cast<std::size_t>(n_edges), 0.0);
    for (int e = 0; e < n_edges; ++e) v2c[e] = clip_llr(channel_llr[pc.edge_col[e]]);

    DecodeResult out;
    out.posterior.resize(pc.n);
    out.extrinsic.resize(pc.n);
    out.hard.assign(static_cast<std::size_t>(pc.n), 0);

    std::size_t max_w = 0;
    for (const auto& row : pc.rows) max_w = std::max(max_w, row.size());
    std::vector<double> t(max_w);
    std::vector<double> fwd(max_w);

    for (int iter = 1; iter <= max_inner; ++iter) {
        out.iterations = iter;
        // Check pass: forward/backward partial tanh products, no division.
        int base = 0;
        for (int r = 0; r < pc.m; ++r) {
            const int w = static_cast<int>(pc.rows[r].size());
            for (int i = 0; i < w; ++i) t[i] = std::tanh(0.5 * v2c[base + i]);
            double acc = 1.0;
            for (int i = 0; i < w; ++i) { fwd[i] = acc; acc *= t[i]; }
            double bwd = 1.0;
            for (int i = w - 1; i >= 0; --i) {
                const double rest = fwd[i] * bwd;
                bwd *= t[i];
                const double bounded = std::clamp(rest, -1.0 + 1e-15, 1.0 - 1e-15);
                c2v[base + i] = clip_llr(2.0 * std::atanh(bounded));
            }
            base += w;
        }
        // Variable pass.
        for (int c = 0; c < pc.n; ++c) {
            double sum = 0.0;
            for (int i = pc.col_edge_ptr[c]; i < pc.col_edge_ptr[c + 1]; ++i) sum += c2v[pc.col_edge[i]];
            out.extrinsic[c] = clip_llr(sum);
            out.posterior[c] = channel_llr[c] + out.extrinsic[c];
            out.hard[c] = out.posterior[c] >= 0.0 ? 0 : 1;  // tie -> bit 0
            for (int i = pc.col_edge_ptr[c]; i < pc.col_edge_ptr[c + 1]; ++i) {
                const int e = pc.col_edge[i];
                v2c[e] = clip_llr(out.posterior[c] - c2v[e]);
            }
        }
        if (syndrome_zero(pc, out.hard)) {
            out.converged = true;
            break;
        }
    }
    if (max_inner <= 0) {
        // Degenerate schedule: report the channel decision unchanged.
        for (int c = 0; c < pc.n; ++c) {
            out.extrinsic[c] = 0.0;
            out.posterior[c] = channel_llr[c];
            out.hard[c] = out.posterior[c] >= 0.0 ? 0 : 1;
        }
        out.converged = syndrome_zero(pc, out.hard);
    }
    return out;
}

// Sparse text format: "n m" on the first line, then one line per row
// holding its column indices (0-based, ascending).
inline void save_parity_check(const ParityCheck& pc, std::ostream& os) {
    os << pc.n << ' ' << pc.m << '\n';
    for (const auto& row : pc.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << row[i] << (i + 1 < row.size() ? ' ' : '\n');
    }
}

inline ParityCheck load_parity_check(std::istream& is) {
    ParityCheck pc;
    if (!(is >> pc.n >> pc.m)) throw std::runtime_error("load_parity_check: bad header");
    is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    pc.rows.resize(static_cast<std::size_t>(pc.m));
    pc.cols.assign(static_cast<std::size_t>(pc.n), {});
    std::string line;
    for (int r = 0; r < pc.m; ++r) {
        if (!std::getline(is, line)) throw std::runtime_error("load_parity_check: truncated file");
        std::istringstream ls(line);
        int c;
        while (ls >> c) {
            if (c < 0 || c >= pc.n) throw std::runtime_error("load_parity_check: column index out of range");
            pc.rows[r].push_back(c);
            pc.cols[c].push_back(r);
        }
        std::sort(pc.rows[r].begin(), pc.rows[r].end());
    }
    pc.row_weight = pc.rows.empty() ? 0 : static_cast<int>(pc.rows[0].size());
    pc.col_weight = pc.cols.empty() ? 0 : static_cast<int>(pc.cols[0].size());
    pc.girth6 = !detail::has_four_cycle(pc.rows, pc.n);
    if (!detail::build_encoder(pc))
        throw std::runtime_error("load_parity_check: matrix is row-rank deficient");
    detail::build_edges(pc);
    return pc;
}

}  // namespace risidd
