#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "whittaker/core.hpp"

namespace wlab {

// Permutation of {0, …, n−1} in one-line notation: w maps i to w[i].
class Permutation {
public:
    explicit Permutation(std::size_t n) : w_(n) { std::iota(w_.begin(), w_.end(), std::size_t{0}); }
    explicit Permutation(std::vector<std::size_t> w) : w_(std::move(w))
    {
        std::vector<std::size_t> s = w_;
        std::sort(s.begin(), s.end());
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] != i) throw DomainError("Permutation: not a permutation");
    }

    static Permutation longest(std::size_t n)
    {
        std::vector<std::size_t> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = n - 1 - i;
        return Permutation(std::move(w));
    }

    std::size_t n() const { return w_.size(); }
    std::size_t operator()(std::size_t i) const { return w_[i]; }
    const std::vector<std::size_t>& one_line() const { return w_; }

    // this ∘ s_i, with s_i swapping positions i−1, i (1-based generator index).
    Permutation times_s(std::size_t i) const
    {
        Permutation p = *this;
        std::swap(p.w_[i - 1], p.w_[i]);
        return p;
    }

    std::size_t inversions() const
    {
        std::size_t c = 0;
        for (std::size_t i = 0; i < w_.size(); ++i)
            for (std::size_t j = i + 1; j < w_.size(); ++j)
                if (w_[i] > w_[j]) ++c;
        return c;
    }

    // (wv)_{w(i)} = v_i
    template <class T>
    std::vector<T> act(const std::vector<T>& v) const
    {
        require_same_size(v.size(), w_.size(), "Permutation::act");
        std::vector<T> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) r[w_[i]] = v[i];
        return r;
    }

    bool operator==(const Permutation&) const = default;

private:
    std::vector<std::size_t> w_;
};

// Word i_1 … i_r in the generators s_1, …, s_{n−1}; always reduced.
class ReducedWord {
public:
    ReducedWord(std::size_t n, std::vector<int> letters) : n_(n), letters_(std::move(letters))
    {
        if (n < 1) throw DomainError("ReducedWord: n >= 1");
        Permutation w(n);
        for (int i : letters_) {
            if (i < 1 || static_cast<std::size_t>(i) >= n) throw DomainError("ReducedWord: letter out of range");
            w = w.times_s(static_cast<std::size_t>(i));
        }
        if (w.inversions() != letters_.size()) throw DomainError("ReducedWord: word is not reduced");
        perm_ = w;
    }

    // "121" or "1,2,1"
    static ReducedWord parse(std::size_t n, const std::string& text)
    {
        std::vector<int> l;
        for (char c : text) {
            if (c == ',' || c == ' ') continue;
            if (c < '1' || c > '9') throw DomainError("ReducedWord: bad letter '" + std::string(1, c) + "'");
            l.push_back(c - '0');
        }
        return ReducedWord(n, std::move(l));
    }

    // (1)(21)(321)…: the reduced word of w_0 used as the default.
    static ReducedWord canonical_longest(std::size_t n)
    {
        std::vector<int> l;
        for (int m = 1; m < static_cast<int>(n); ++m)
            for (int i = m; i >= 1; --i) l.push_back(i);
        return ReducedWord(n, std::move(l));
    }

    std::size_t n() const { return n_; }
    std::size_t size() const { return letters_.size(); }
    int operator[](std::size_t k) const { return letters_[k]; }
    const std::vector<int>& letters() const { return letters_; }
    const Permutation& permutation() const { return perm_; }
    bool is_longest() const { return perm_ == Permutation::longest(n_); }

    std::string str() const
    {
        std::ostringstream o;
        for (int i : letters_) o << i;
        return o.str();
    }

private:
    std::size_t n_;
    std::vector<int> letters_;
    Permutation perm_{1};
};

// All reduced words of w (by descent recursion).
inline std::vector<ReducedWord> reduced_words(const Permutation& w)
{
    std::vector<std::vector<int>> out;
    std::vector<int> suffix;
    auto rec = [&](auto&& self, const Permutation& p) -> void {
        if (p.inversions() == 0) {
            out.emplace_back(suffix.rbegin(), suffix.rend());
            return;
        }
        for (std::size_t i = 1; i < p.n(); ++i)
            if (p(i - 1) > p(i)) {
                suffix.push_back(static_cast<int>(i));
                self(self, p.times_s(i));
                suffix.pop_back();
            }
    };
    rec(rec, w);
    std::vector<ReducedWord> words;
    for (auto& l : out) words.emplace_back(w.n(), std::move(l));
    std::sort(words.begin(), words.end(), [](const ReducedWord& a, const ReducedWord& b) { return a.letters() < b.letters(); });
    return words;
}

// Closure of one reduced word under commutation (ij ↔ ji, |i−j| ≥ 2) and braid (i,i+1,i ↔ i+1,i,i+1) moves.
inline std::vector<ReducedWord> reduced_words_by_moves(const ReducedWord& start)
{
    std::vector<std::vector<int>> seen{start.letters()};
    std::vector<std::vector<int>> queue{start.letters()};
    auto visit = [&](std::vector<int> w) {
        if (std::find(seen.begin(), seen.end(), w) != seen.end()) return;
        seen.push_back(w);
        queue.push_back(std::move(w));
    };
    while (!queue.empty()) {
        const std::vector<int> w = queue.back();
        queue.pop_back();
        for (std::size_t k = 0; k + 1 < w.size(); ++k)
            if (std::abs(w[k] - w[k + 1]) >= 2) {
                auto m = w;
                std::swap(m[k], m[k + 1]);
                visit(std::move(m));
            }
        for (std::size_t k = 0; k + 2 < w.size(); ++k)
            if (w[k] == w[k + 2] && std::abs(w[k] - w[k + 1]) == 1) {
                auto m = w;
                m[k] = m[k + 2] = w[k + 1];
                m[k + 1] = w[k];
                visit(std::move(m));
            }
    }
    std::sort(seen.begin(), seen.end());
    std::vector<ReducedWord> words;
    for (auto& l : seen) words.emplace_back(start.n(), std::move(l));
    return words;
}

// β_k = s_{i_1} ⋯ s_{i_{k−1}} α_{i_k}, as coefficient vectors in the basis e_1, …, e_n.
inline std::vector<Vec> word_roots(const ReducedWord& word)
{
    std::vector<Vec> roots;
    Permutation prefix(word.n());
    for (std::size_t k = 0; k < word.size(); ++k) {
        const std::size_t i = static_cast<std::size_t>(word[k]);
        Vec alpha(word.n(), 0.0);
        alpha[i - 1] = 1.0;
        alpha[i] = -1.0;
        roots.push_back(prefix.act(alpha));
        prefix = prefix.times_s(i);
    }
    return roots;
}

// θ_k = β_k(λ); these are the λ_i − λ_j, i < j, each once when the word is reduced for w_0.
inline Vec word_thetas(const ReducedWord& word, std::span<const double> lambda)
{
    require_same_size(word.n(), lambda.size(), "word_thetas");
    Vec th;
    for (const Vec& b : word_roots(word)) th.push_back(dot(b, lambda));
    return th;
}

} // namespace wlab
