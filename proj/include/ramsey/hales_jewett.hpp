#pragma once

#include <ramsey/budget.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ramsey
{
    // Words of length N over the alphabet {0..t-1} are coded in base t with
    // coordinate 0 most significant.
    using Word = std::vector<int>;

    inline auto word_count(int dimension, int letters) -> std::uint64_t
    {
        std::uint64_t c = 1;
        for (int i = 0; i < dimension; ++i) {
            c *= std::uint64_t(letters);
            if (c > (std::uint64_t(1) << 40))
                throw BudgetExceeded("word space too large");
        }
        return c;
    }

    inline auto word_code(const Word & w, int letters) -> std::uint64_t
    {
        std::uint64_t c = 0;
        for (auto x : w)
            c = c * std::uint64_t(letters) + std::uint64_t(x);
        return c;
    }

    inline auto word_from_code(std::uint64_t code, int dimension, int letters) -> Word
    {
        Word w(dimension);
        for (int i = dimension - 1; i >= 0; --i) {
            w[i] = int(code % std::uint64_t(letters));
            code /= std::uint64_t(letters);
        }
        return w;
    }

    // A combinatorial line: coordinates with pattern[i] == moving take a
    // common letter, the others are fixed to pattern[i].
    struct CombinatorialLine
    {
        static constexpr int moving = -1;

        std::vector<int> pattern;

        auto dimension() const -> int { return int(pattern.size()); }

        auto moving_set() const -> std::vector<int>
        {
            std::vector<int> out;
            for (int i = 0; i < dimension(); ++i)
                if (pattern[i] == moving)
                    out.push_back(i);
            return out;
        }

        auto word(int letter) const -> Word
        {
            Word w = pattern;
            for (auto & x : w)
                if (x == moving)
                    x = letter;
            return w;
        }

        auto valid(int letters) const -> bool
        {
            bool any = false;
            for (auto x : pattern) {
                if (x == moving)
                    any = true;
                else if (x < 0 || x >= letters)
                    return false;
            }
            return any;
        }

        auto operator==(const CombinatorialLine &) const -> bool = default;

        // 1-based text form, e.g. "* 2 *" for moving set {1,3} and h(2) = 2.
        auto to_string() const -> std::string
        {
            std::string out;
            for (auto x : pattern)
                out += (x == moving ? std::string("*") : std::to_string(x + 1)) + (pattern.size() > 1 ? " " : "");
            if (! out.empty() && out.back() == ' ')
                out.pop_back();
            return out;
        }
    };

    inline auto line_count(int dimension, int letters) -> std::uint64_t
    {
        return word_count(dimension, letters + 1) - word_count(dimension, letters);
    }

    // Calls visit(line) for every line in canonical order: patterns read as
    // base-(t+1) numbers with the moving symbol as the largest digit.
    inline auto for_each_line(int dimension, int letters, const std::function<bool(const CombinatorialLine &)> & visit,
        BudgetMeter * meter = nullptr) -> void
    {
        if (dimension < 1 || letters < 1)
            throw std::invalid_argument("lines need dimension and alphabet >= 1");
        auto total = word_count(dimension, letters + 1);
        CombinatorialLine line;
        for (std::uint64_t code = 0; code < total; ++code) {
            if (meter)
                meter->tick("line search");
            auto digits = word_from_code(code, dimension, letters + 1);
            bool has_moving = false;
            for (auto & d : digits)
                if (d == letters) {
                    d = CombinatorialLine::moving;
                    has_moving = true;
                }
            if (! has_moving)
                continue;
            line.pattern = digits;
            if (! visit(line))
                return;
        }
    }

    inline auto all_lines(int dimension, int letters) -> std::vector<CombinatorialLine>
    {
        std::vector<CombinatorialLine> out;
        for_each_line(dimension, letters, [&](const CombinatorialLine & l) {
            out.push_back(l);
            return true;
        });
        return out;
    }

    // First line (in canonical order) whose words all have the same colour;
    // coloring[word_code(w)] is the colour of w.
    inline auto find_monochromatic_line(int dimension, int letters, const std::vector<int> & coloring,
        BudgetMeter * meter = nullptr) -> std::optional<CombinatorialLine>
    {
        if (coloring.size() != word_count(dimension, letters))
            throw std::invalid_argument("coloring must cover every word");
        std::optional<CombinatorialLine> found;
        for_each_line(
            dimension, letters,
            [&](const CombinatorialLine & l) {
                int c = coloring[word_code(l.word(0), letters)];
                for (int a = 1; a < letters; ++a)
                    if (coloring[word_code(l.word(a), letters)] != c)
                        return true;
                found = l;
                return false;
            },
            meter);
        return found;
    }
}
