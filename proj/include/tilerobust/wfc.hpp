#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"
#include "patterns.hpp"

namespace tilerobust {

/// Domain/support bookkeeping for filling a grid so that every padded k x k
/// window is one of a fixed set of patterns.
///
/// Each window origin keeps the bitset of patterns still consistent with the
/// cell domains it covers; each cell keeps a symbol mask. Propagation keeps
/// the two mutually supported (generalized arc consistency per window).
class WindowPropagator {
public:
    struct State {
        std::vector<std::uint32_t> domain;  // per cell, bit i = symbols()[i]
        std::vector<std::uint64_t> live;    // per window, pattern bitset
    };

    WindowPropagator(const PatternSet& ps, std::vector<char> symbols, int rows, int cols)
        : symbols_(std::move(symbols)), rows_(rows), cols_(cols), k_(ps.k) {
        if (symbols_.size() > 31) throw Error("too many terrain symbols for the propagator");
        border_index_ = static_cast<int>(symbols_.size());
        for (const auto& w : ps.windows) {
            std::vector<std::uint8_t> p(w.size());
            bool known = true;
            for (std::size_t i = 0; i < w.size() && known; ++i) {
                if (w[i] == ps.border) {
                    p[i] = static_cast<std::uint8_t>(border_index_);
                } else {
                    const int s = symbol_index(w[i]);
                    if (s < 0) known = false;
                    p[i] = static_cast<std::uint8_t>(s);
                }
            }
            if (known) patterns_.push_back(std::move(p));
        }
        words_ = (patterns_.size() + 63) / 64;
        const int offsets = k_ * k_;
        has_.assign(static_cast<std::size_t>(offsets) * (border_index_ + 1) * words_, 0);
        for (std::size_t p = 0; p < patterns_.size(); ++p)
            for (int o = 0; o < offsets; ++o) has_word(o, patterns_[p][o], p / 64) |= 1ULL << (p % 64);
        win_rows_ = rows_ + k_ - 1;
        win_cols_ = cols_ + k_ - 1;
    }

    [[nodiscard]] const std::vector<char>& symbols() const { return symbols_; }
    [[nodiscard]] int symbol_index(char c) const {
        for (std::size_t i = 0; i < symbols_.size(); ++i)
            if (symbols_[i] == c) return static_cast<int>(i);
        return -1;
    }
    [[nodiscard]] std::size_t pattern_count() const { return patterns_.size(); }
    [[nodiscard]] int cells() const { return rows_ * cols_; }

    /// Fully propagated starting state; false when no tiling can exist.
    bool initial(State& st) const {
        const std::uint32_t all = border_index_ >= 32 ? ~0u : ((1u << border_index_) - 1);
        st.domain.assign(cells(), all);
        st.live.assign(static_cast<std::size_t>(win_rows_) * win_cols_ * words_, 0);
        std::vector<std::uint64_t> acc(words_);
        for (int wr = 0; wr < win_rows_; ++wr) {
            for (int wc = 0; wc < win_cols_; ++wc) {
                std::fill(acc.begin(), acc.end(), ~0ULL);
                const int r0 = wr - (k_ - 1);
                const int c0 = wc - (k_ - 1);
                for (int i = 0; i < k_; ++i) {
                    for (int j = 0; j < k_; ++j) {
                        const int o = i * k_ + j;
                        const bool outside = r0 + i < 0 || r0 + i >= rows_ || c0 + j < 0 || c0 + j >= cols_;
                        for (std::size_t w = 0; w < words_; ++w) {
                            std::uint64_t m = 0;
                            if (outside) {
                                m = has_word(o, border_index_, w);
                            } else {
                                for (int s = 0; s < border_index_; ++s) m |= has_word(o, s, w);
                            }
                            acc[w] &= m;
                        }
                    }
                }
                std::copy(acc.begin(), acc.end(), live_ptr(st, wr * win_cols_ + wc));
            }
        }
        queue_.clear();
        for (int wi = 0; wi < win_rows_ * win_cols_; ++wi)
            if (!refresh_window_cells(st, wi)) return false;
        return drain(st);
    }

    /// Intersects a cell's domain with `mask` and propagates.
    bool restrict(State& st, int cell, std::uint32_t mask) const {
        const std::uint32_t next = st.domain[cell] & mask;
        if (next == st.domain[cell]) return true;
        if (!next) return false;
        st.domain[cell] = next;
        queue_.clear();
        queue_.push_back(cell);
        return drain(st);
    }

    bool assign(State& st, int cell, int symbol) const { return restrict(st, cell, 1u << symbol); }

private:
    std::uint64_t& has_word(int offset, int symbol, std::size_t word) {
        return has_[(static_cast<std::size_t>(offset) * (border_index_ + 1) + symbol) * words_ + word];
    }
    [[nodiscard]] std::uint64_t has_word(int offset, int symbol, std::size_t word) const {
        return has_[(static_cast<std::size_t>(offset) * (border_index_ + 1) + symbol) * words_ + word];
    }
    std::uint64_t* live_ptr(State& st, int window) const { return st.live.data() + static_cast<std::size_t>(window) * words_; }

    /// Narrows every cell of window `wi` to symbols some live pattern supports.
    bool refresh_window_cells(State& st, int wi) const {
        const int r0 = wi / win_cols_ - (k_ - 1);
        const int c0 = wi % win_cols_ - (k_ - 1);
        const std::uint64_t* live = live_ptr(st, wi);
        bool any = false;
        for (std::size_t w = 0; w < words_; ++w) any |= live[w] != 0;
        if (!any) return false;
        for (int i = 0; i < k_; ++i) {
            const int r = r0 + i;
            if (r < 0 || r >= rows_) continue;
            for (int j = 0; j < k_; ++j) {
                const int c = c0 + j;
                if (c < 0 || c >= cols_) continue;
                const int o = i * k_ + j;
                const int cell = r * cols_ + c;
                std::uint32_t supported = 0;
                for (std::uint32_t dom = st.domain[cell]; dom; dom &= dom - 1) {
                    const int s = std::countr_zero(dom);
                    for (std::size_t w = 0; w < words_; ++w) {
                        if (live[w] & has_word(o, s, w)) {
                            supported |= 1u << s;
                            break;
                        }
                    }
                }
                if (supported != st.domain[cell]) {
                    if (!supported) return false;
                    st.domain[cell] = supported;
                    queue_.push_back(cell);
                }
            }
        }
        return true;
    }

    bool drain(State& st) const {
        std::vector<std::uint64_t> allowed(words_);
        while (!queue_.empty()) {
            const int cell = queue_.back();
            queue_.pop_back();
            const int r = cell / cols_;
            const int c = cell % cols_;
            for (int i = 0; i < k_; ++i) {
                for (int j = 0; j < k_; ++j) {
                    // window with origin (r - i, c - j) sees this cell at offset (i, j)
                    const int wi = (r - i + k_ - 1) * win_cols_ + (c - j + k_ - 1);
                    const int o = i * k_ + j;
                    std::fill(allowed.begin(), allowed.end(), 0);
                    for (std::uint32_t dom = st.domain[cell]; dom; dom &= dom - 1) {
                        const int s = std::countr_zero(dom);
                        for (std::size_t w = 0; w < words_; ++w) allowed[w] |= has_word(o, s, w);
                    }
                    std::uint64_t* live = live_ptr(st, wi);
                    bool changed = false;
                    for (std::size_t w = 0; w < words_; ++w) {
                        const std::uint64_t next = live[w] & allowed[w];
                        changed |= next != live[w];
                        live[w] = next;
                    }
                    if (changed && !refresh_window_cells(st, wi)) return false;
                }
            }
        }
        return true;
    }

    std::vector<char> symbols_;
    int rows_;
    int cols_;
    int k_;
    int border_index_ = 0;
    int win_rows_ = 0;
    int win_cols_ = 0;
    std::vector<std::vector<std::uint8_t>> patterns_;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> has_;
    mutable std::vector<int> queue_;
};

}  // namespace tilerobust
