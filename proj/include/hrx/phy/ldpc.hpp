// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hrx::phy {

/// Binary LDPC code with column weight 3, generated deterministically from a
/// seed, plus the systematic encoder derived from it by GF(2) elimination.
///
/// Code bit positions are arranged so that a codeword is [info bits | parity].
class LdpcCode {
public:
    struct Params {
        int n = 648;
        int k = 324;
        std::uint64_t seed = 0x1D9C;
        int max_bp_iters = 25;
    };

    /// Throws ConfigError if the sizes are invalid or no full-rank matrix is
    /// found within the attempt budget.
    explicit LdpcCode(Params params);

    int n() const { return params_.n; }
    int k() const { return params_.k; }
    int m() const { return params_.n - params_.k; }
    int max_bp_iters() const { return params_.max_bp_iters; }
    const Params& params() const { return params_; }

    /// Column indices of each parity check.
    const std::vector<std::vector<int>>& check_rows() const { return rows_; }
    /// GF(2) rank of the parity-check matrix.
    int rank() const;

    std::vector<std::uint8_t> encode(std::span<const std::uint8_t> info) const;
    std::vector<std::uint8_t> syndrome(std::span<const std::uint8_t> codeword) const;
    bool is_codeword(std::span<const std::uint8_t> codeword) const;

    struct DecodeResult {
        std::vector<std::uint8_t> info;
        std::vector<std::uint8_t> codeword;
        bool converged = false;
        int iterations = 0;
    };
    /// Sum-product belief propagation with early exit on a zero syndrome.
    /// LLR convention: positive favours bit 0.
    DecodeResult decode(std::span<const double> llr) const;

private:
    Params params_;
    std::vector<std::vector<int>> rows_;
    // parity bit i = popcount(generator_[i] & info) mod 2
    std::vector<std::vector<std::uint64_t>> generator_;
    int words_ = 0;
    // edge layout for BP
    std::vector<int> edge_var_;
    std::vector<int> row_start_;
    std::vector<std::vector<int>> var_edges_;
};

}  // namespace hrx::phy
