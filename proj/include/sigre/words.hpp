#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigre {

// Words over the alphabet {1..d}.  Within a level the index of (i1..ik) reads the
// word as a base-d number, first letter most significant; across levels the layout
// is length-major (level 0 first).
using Word = std::vector<int>;

inline std::int64_t level_size(int dim, int level) {
    std::int64_t n = 1;
    for (int k = 0; k < level; ++k) n *= dim;
    return n;
}

// Number of coordinates of degree < level, i.e. the flat offset of `level`.
inline std::int64_t level_offset(int dim, int level) {
    std::int64_t off = 0, sz = 1;
    for (int k = 0; k < level; ++k) { off += sz; sz *= dim; }
    return off;
}

inline std::int64_t word_index(int dim, const Word& w) {
    std::int64_t idx = 0;
    for (int letter : w) {
        if (letter < 1 || letter > dim) throw std::invalid_argument("word letter out of range");
        idx = idx * dim + (letter - 1);
    }
    return idx;
}

inline Word word_at(int dim, int level, std::int64_t idx) {
    Word w(level);
    for (int j = level - 1; j >= 0; --j) {
        w[j] = static_cast<int>(idx % dim) + 1;
        idx /= dim;
    }
    return w;
}

inline std::string word_str(const Word& w) {
    std::string s;
    for (int letter : w) s += std::to_string(letter);
    return s.empty() ? "e" : s;
}

// Flat coordinate index of a word in the length-major layout of all words of
// degree <= N (index 0 is the empty word).
inline std::int64_t flat_word_index(int dim, const Word& w) {
    return level_offset(dim, static_cast<int>(w.size())) + word_index(dim, w);
}

inline std::int64_t flat_word_count(int dim, int degree) {
    return level_offset(dim, degree + 1);
}

inline Word flat_word_at(int dim, std::int64_t flat) {
    int level = 0;
    while (flat >= level_size(dim, level)) {
        flat -= level_size(dim, level);
        ++level;
    }
    return word_at(dim, level, flat);
}

}  // namespace sigre
