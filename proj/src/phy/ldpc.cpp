// SPDX-License-Identifier: Apache-2.0
#include "hrx/phy/ldpc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "hrx/errors.hpp"
#include "hrx/mathdsp/rng.hpp"

namespace hrx::phy {

namespace {

constexpr int kColumnWeight = 3;
constexpr int kMaxAttempts = 64;
constexpr double kLlrClip = 30.0;

using BitRow = std::vector<std::uint64_t>;

void set_bit(BitRow& r, int i) { r[static_cast<std::size_t>(i) >> 6] |= 1ull << (i & 63); }
bool get_bit(const BitRow& r, int i) { return (r[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1ull; }

// Socket-permutation construction: every column gets kColumnWeight edges and
// row degrees differ by at most one. Duplicate (row, col) pairs are repaired
// by swapping sockets.
std::vector<std::vector<int>> random_regular(int n, int m, RngStream& rng) {
    const int edges = n * kColumnWeight;
    std::vector<int> sockets(static_cast<std::size_t>(edges));
    for (int e = 0; e < edges; ++e) sockets[static_cast<std::size_t>(e)] = e / kColumnWeight;
    for (int i = edges - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(sockets[static_cast<std::size_t>(i)], sockets[static_cast<std::size_t>(j)]);
    }
    std::vector<int> row_of(static_cast<std::size_t>(edges));
    {
        int e = 0;
        for (int r = 0; r < m; ++r) {
            const int deg = edges / m + (r < edges % m ? 1 : 0);
            for (int d = 0; d < deg; ++d) row_of[static_cast<std::size_t>(e++)] = r;
        }
    }
    // rows are contiguous in socket order
    std::vector<int> row_begin(static_cast<std::size_t>(m) + 1, 0);
    for (int e = 0; e < edges; ++e) row_begin[static_cast<std::size_t>(row_of[static_cast<std::size_t>(e)]) + 1]++;
    std::partial_sum(row_begin.begin(), row_begin.end(), row_begin.begin());
    auto duplicate_in_row = [&](int e) {
        const int r = row_of[static_cast<std::size_t>(e)];
        for (int f = row_begin[static_cast<std::size_t>(r)]; f < row_begin[static_cast<std::size_t>(r) + 1]; ++f) {
            if (f != e && sockets[static_cast<std::size_t>(f)] == sockets[static_cast<std::size_t>(e)]) return true;
        }
        return false;
    };
    for (int pass = 0; pass < 1000; ++pass) {
        bool clean = true;
        for (int e = 0; e < edges; ++e) {
            if (!duplicate_in_row(e)) continue;
            clean = false;
            const auto f = static_cast<int>(rng.below(static_cast<std::uint64_t>(edges)));
            std::swap(sockets[static_cast<std::size_t>(e)], sockets[static_cast<std::size_t>(f)]);
        }
        if (clean) break;
    }
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(m));
    for (int e = 0; e < edges; ++e) rows[static_cast<std::size_t>(row_of[static_cast<std::size_t>(e)])].push_back(sockets[static_cast<std::size_t>(e)]);
    for (auto& r : rows) {
        std::sort(r.begin(), r.end());
        if (std::adjacent_find(r.begin(), r.end()) != r.end()) return {};
    }
    return rows;
}

struct Elimination {
    std::vector<BitRow> reduced;  // row i has its pivot at pivots[i]
    std::vector<int> pivots;
};

Elimination eliminate(const std::vector<std::vector<int>>& rows, int n) {
    const int words = (n + 63) / 64;
    Elimination el;
    el.reduced.reserve(rows.size());
    for (const auto& r : rows) {
        BitRow b(static_cast<std::size_t>(words), 0);
        for (int c : r) set_bit(b, c);
        el.reduced.push_back(std::move(b));
    }
    std::size_t rank = 0;
    for (int col = 0; col < n && rank < el.reduced.size(); ++col) {
        std::size_t sel = rank;
        while (sel < el.reduced.size() && !get_bit(el.reduced[sel], col)) ++sel;
        if (sel == el.reduced.size()) continue;
        std::swap(el.reduced[rank], el.reduced[sel]);
        for (std::size_t r = 0; r < el.reduced.size(); ++r) {
            if (r != rank && get_bit(el.reduced[r], col)) {
                for (int w = 0; w < words; ++w) el.reduced[r][static_cast<std::size_t>(w)] ^= el.reduced[rank][static_cast<std::size_t>(w)];
            }
        }
        el.pivots.push_back(col);
        ++rank;
    }
    el.reduced.resize(rank);
    return el;
}

}  // namespace

LdpcCode::LdpcCode(Params params) : params_(params) {
    const int n = params_.n, k = params_.k;
    if (n <= 0 || k <= 0 || k >= n) throw ConfigError("ldpc: need 0 < k < n");
    const int m = n - k;
    if (n * kColumnWeight < 2 * m || m < kColumnWeight) throw ConfigError("ldpc: code too short for column weight 3");
    if (params_.max_bp_iters <= 0) throw ConfigError("ldpc: max_bp_iters must be positive");

    RngStream root(params_.seed, 0x4C445043);  // "LDPC"
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        RngStream rng = split_stream(root, static_cast<std::uint64_t>(attempt));
        auto rows = random_regular(n, m, rng);
        if (rows.empty()) continue;
        Elimination el = eliminate(rows, n);
        if (static_cast<int>(el.pivots.size()) != m) continue;

        // Columns: non-pivots become info positions [0, k), pivots parity [k, n).
        std::vector<int> new_pos(static_cast<std::size_t>(n), -1);
        std::vector<char> is_pivot(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < m; ++i) {
            is_pivot[static_cast<std::size_t>(el.pivots[static_cast<std::size_t>(i)])] = 1;
            new_pos[static_cast<std::size_t>(el.pivots[static_cast<std::size_t>(i)])] = k + i;
        }
        std::vector<int> info_cols;
        for (int c = 0; c < n; ++c) {
            if (!is_pivot[static_cast<std::size_t>(c)]) {
                new_pos[static_cast<std::size_t>(c)] = static_cast<int>(info_cols.size());
                info_cols.push_back(c);
            }
        }

        rows_.assign(static_cast<std::size_t>(m), {});
        for (int r = 0; r < m; ++r) {
            for (int c : rows[static_cast<std::size_t>(r)]) rows_[static_cast<std::size_t>(r)].push_back(new_pos[static_cast<std::size_t>(c)]);
            std::sort(rows_[static_cast<std::size_t>(r)].begin(), rows_[static_cast<std::size_t>(r)].end());
        }

        // Reduced row i reads p_i + sum_j R[i][info_j] u_j = 0.
        words_ = (k + 63) / 64;
        generator_.assign(static_cast<std::size_t>(m), BitRow(static_cast<std::size_t>(words_), 0));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < k; ++j) {
                if (get_bit(el.reduced[static_cast<std::size_t>(i)], info_cols[static_cast<std::size_t>(j)])) {
                    set_bit(generator_[static_cast<std::size_t>(i)], j);
                }
            }
        }

        row_start_.assign(1, 0);
        edge_var_.clear();
        var_edges_.assign(static_cast<std::size_t>(n), {});
        for (const auto& r : rows_) {
            for (int c : r) {
                var_edges_[static_cast<std::size_t>(c)].push_back(static_cast<int>(edge_var_.size()));
                edge_var_.push_back(c);
            }
            row_start_.push_back(static_cast<int>(edge_var_.size()));
        }
        return;
    }
    throw ConfigError("ldpc: no full-rank parity-check matrix found for n=" + std::to_string(n) +
                      " k=" + std::to_string(k));
}

int LdpcCode::rank() const { return static_cast<int>(eliminate(rows_, n()).pivots.size()); }

std::vector<std::uint8_t> LdpcCode::encode(std::span<const std::uint8_t> info) const {
    if (static_cast<int>(info.size()) != k()) {
        throw ValidationError("ldpc_encode: expected " + std::to_string(k()) + " info bits, got " +
                              std::to_string(info.size()));
    }
    BitRow packed(static_cast<std::size_t>(words_), 0);
    for (int j = 0; j < k(); ++j) {
        if (info[static_cast<std::size_t>(j)] > 1) throw ValidationError("ldpc_encode: bits must be 0 or 1");
        if (info[static_cast<std::size_t>(j)]) set_bit(packed, j);
    }
    std::vector<std::uint8_t> cw(info.begin(), info.end());
    cw.resize(static_cast<std::size_t>(n()));
    for (int i = 0; i < m(); ++i) {
        int parity = 0;
        for (int w = 0; w < words_; ++w) parity ^= std::popcount(generator_[static_cast<std::size_t>(i)][static_cast<std::size_t>(w)] & packed[static_cast<std::size_t>(w)]) & 1;
        cw[static_cast<std::size_t>(k() + i)] = static_cast<std::uint8_t>(parity);
    }
    return cw;
}

std::vector<std::uint8_t> LdpcCode::syndrome(std::span<const std::uint8_t> codeword) const {
    if (static_cast<int>(codeword.size()) != n()) throw ValidationError("ldpc: syndrome needs n bits");
    std::vector<std::uint8_t> s(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        int acc = 0;
        for (int c : rows_[r]) acc ^= codeword[static_cast<std::size_t>(c)] & 1;
        s[r] = static_cast<std::uint8_t>(acc);
    }
    return s;
}

bool LdpcCode::is_codeword(std::span<const std::uint8_t> codeword) const {
    const auto s = syndrome(codeword);
    return std::all_of(s.begin(), s.end(), [](std::uint8_t v) { return v == 0; });
}

LdpcCode::DecodeResult LdpcCode::decode(std::span<const double> llr) const {
    if (static_cast<int>(llr.size()) != n()) {
        throw ValidationError("ldpc_decode: expected " + std::to_string(n()) + " LLRs, got " + std::to_string(llr.size()));
    }
    const std::size_t edges = edge_var_.size();
    std::vector<double> channel(llr.size());
    for (std::size_t v = 0; v < llr.size(); ++v) {
        const double x = std::isfinite(llr[v]) ? llr[v] : (llr[v] > 0 ? kLlrClip : -kLlrClip);
        channel[v] = std::clamp(x, -kLlrClip, kLlrClip);
    }
    std::vector<double> v2c(edges), c2v(edges, 0.0), total(channel);
    for (std::size_t e = 0; e < edges; ++e) v2c[e] = channel[static_cast<std::size_t>(edge_var_[e])];

    DecodeResult res;
    res.codeword.resize(static_cast<std::size_t>(n()));
    auto decide = [&] {
        for (std::size_t v = 0; v < total.size(); ++v) res.codeword[v] = total[v] < 0 ? 1 : 0;
        return is_codeword(res.codeword);
    };
    if (decide()) {
        res.converged = true;
    } else {
        std::vector<double> t;
        for (int it = 1; it <= max_bp_iters(); ++it) {
            res.iterations = it;
            for (std::size_t r = 0; r + 1 < row_start_.size(); ++r) {
                const auto b = static_cast<std::size_t>(row_start_[r]);
                const auto e_end = static_cast<std::size_t>(row_start_[r + 1]);
                // leave-one-out products of tanh(x/2), zero-safe
                t.resize(e_end - b);
                int zeros = 0;
                double prod_nz = 1.0;
                for (std::size_t e = b; e < e_end; ++e) {
                    t[e - b] = std::tanh(0.5 * v2c[e]);
                    if (t[e - b] == 0.0) ++zeros;
                    else prod_nz *= t[e - b];
                }
                for (std::size_t e = b; e < e_end; ++e) {
                    double p;
                    if (t[e - b] == 0.0) p = zeros > 1 ? 0.0 : prod_nz;
                    else p = zeros > 0 ? 0.0 : prod_nz / t[e - b];
                    p = std::clamp(p, -0.999999999999, 0.999999999999);
                    c2v[e] = std::clamp(2.0 * std::atanh(p), -kLlrClip, kLlrClip);
                }
            }
            for (std::size_t v = 0; v < total.size(); ++v) {
                double s = channel[v];
                for (int e : var_edges_[v]) s += c2v[static_cast<std::size_t>(e)];
                total[v] = s;
                for (int e : var_edges_[v]) v2c[static_cast<std::size_t>(e)] = std::clamp(s - c2v[static_cast<std::size_t>(e)], -kLlrClip, kLlrClip);
            }
            if (decide()) {
                res.converged = true;
                break;
            }
        }
    }
    res.info.assign(res.codeword.begin(), res.codeword.begin() + k());
    return res;
}

}  // namespace hrx::phy
