#pragma once

// Needleman-Wunsch global alignment score.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "talagen/error.hpp"

namespace talagen {

struct NwParams {
    int match_score = 1;
    int mismatch_score = -1;
    int gap_penalty = -2;

    /// gap < mismatch < match
    bool valid() const noexcept { return gap_penalty < mismatch_score && mismatch_score < match_score; }
};

/// Full (|x|+1) x (|y|+1) score matrix, row-major.
struct ScoreMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<int> cells;

    int at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
};

namespace detail {

inline void require_valid(const NwParams& p) {
    if (!p.valid()) {
        throw Error("NW parameters must satisfy gap < mismatch < match");
    }
}

}  // namespace detail

template <class T>
ScoreMatrix nw_matrix(std::span<const T> x, std::span<const T> y, const NwParams& p = {}) {
    detail::require_valid(p);
    ScoreMatrix s{x.size() + 1, y.size() + 1, std::vector<int>((x.size() + 1) * (y.size() + 1), 0)};
    auto cell = [&](std::size_t i, std::size_t j) -> int& { return s.cells[i * s.cols + j]; };
    for (std::size_t i = 1; i < s.rows; ++i) {
        cell(i, 0) = cell(i - 1, 0) + p.gap_penalty;
    }
    for (std::size_t j = 1; j < s.cols; ++j) {
        cell(0, j) = cell(0, j - 1) + p.gap_penalty;
    }
    for (std::size_t i = 1; i < s.rows; ++i) {
        for (std::size_t j = 1; j < s.cols; ++j) {
            const int diag = cell(i - 1, j - 1) + (x[i - 1] == y[j - 1] ? p.match_score : p.mismatch_score);
            cell(i, j) = std::max({diag, cell(i - 1, j) + p.gap_penalty, cell(i, j - 1) + p.gap_penalty});
        }
    }
    return s;
}

/// Optimal global alignment score S[|x|][|y|]. Both sequences must be non-empty.
template <class T>
int nw_score(std::span<const T> x, std::span<const T> y, const NwParams& p = {}) {
    detail::require_valid(p);
    if (x.empty() || y.empty()) {
        throw Error("nw_score: empty sequence");
    }
    // Two rolling rows over y.
    thread_local std::vector<int> prev, cur;
    prev.resize(y.size() + 1);
    cur.resize(y.size() + 1);
    for (std::size_t j = 0; j <= y.size(); ++j) {
        prev[j] = static_cast<int>(j) * p.gap_penalty;
    }
    for (std::size_t i = 1; i <= x.size(); ++i) {
        cur[0] = static_cast<int>(i) * p.gap_penalty;
        for (std::size_t j = 1; j <= y.size(); ++j) {
            const int diag = prev[j - 1] + (x[i - 1] == y[j - 1] ? p.match_score : p.mismatch_score);
            cur[j] = std::max({diag, prev[j] + p.gap_penalty, cur[j - 1] + p.gap_penalty});
        }
        std::swap(prev, cur);
    }
    return prev[y.size()];
}

template <class T>
int nw_score(const std::vector<T>& x, const std::vector<T>& y, const NwParams& p = {}) {
    return nw_score(std::span<const T>(x), std::span<const T>(y), p);
}

}  // namespace talagen
