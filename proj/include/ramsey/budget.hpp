#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ramsey
{
    // Thrown whenever a search would exceed its configured limits. Callers treat
    // it as "no answer", never as a negative answer.
    class BudgetExceeded : public std::runtime_error
    {
    public:
        explicit BudgetExceeded(const std::string & what) :
            std::runtime_error("budget exceeded: " + what)
        {
        }
    };

    struct Budget
    {
        std::uint64_t max_vertices = 200000;
        std::uint64_t max_colorings = 50'000'000;
        std::uint64_t max_subsets = 1ULL << 26;
        std::chrono::milliseconds wall_clock{std::chrono::minutes(10)};

        auto valid() const -> bool
        {
            return max_vertices > 0 && max_colorings > 0 && max_subsets > 0 && wall_clock.count() > 0;
        }

        static auto unlimited() -> Budget
        {
            Budget b;
            b.max_vertices = std::numeric_limits<std::uint64_t>::max();
            b.max_colorings = std::numeric_limits<std::uint64_t>::max();
            b.max_subsets = std::numeric_limits<std::uint64_t>::max();
            b.wall_clock = std::chrono::hours(24 * 365);
            return b;
        }
    };

    // Tracks elapsed time and work counters against a Budget. Counters are
    // atomic so parallel sweeps can share one meter.
    class BudgetMeter
    {
    public:
        explicit BudgetMeter(const Budget & budget = Budget{}) :
            _budget(budget),
            _start(std::chrono::steady_clock::now())
        {
        }

        auto budget() const -> const Budget & { return _budget; }

        auto check_vertices(std::uint64_t n, const char * where) const -> void
        {
            if (n > _budget.max_vertices)
                throw BudgetExceeded(std::string(where) + ": " + std::to_string(n) + " vertices > " +
                    std::to_string(_budget.max_vertices));
        }

        auto count_coloring(const char * where) -> void
        {
            if (_colorings.fetch_add(1) + 1 > _budget.max_colorings)
                throw BudgetExceeded(std::string(where) + ": coloring nodes > " + std::to_string(_budget.max_colorings));
            tick(where);
        }

        auto count_subsets(std::uint64_t n, const char * where) -> void
        {
            if (_subsets.fetch_add(n) + n > _budget.max_subsets)
                throw BudgetExceeded(std::string(where) + ": subsets > " + std::to_string(_budget.max_subsets));
            tick(where);
        }

        auto tick(const char * where) -> void
        {
            if (((_ticks.fetch_add(1) + 1) & 0x3ff) == 0 && std::chrono::steady_clock::now() - _start > _budget.wall_clock)
                throw BudgetExceeded(std::string(where) + ": wall clock");
        }

    private:
        Budget _budget;
        std::chrono::steady_clock::time_point _start;
        std::atomic<std::uint64_t> _colorings{0};
        std::atomic<std::uint64_t> _subsets{0};
        std::atomic<std::uint64_t> _ticks{0};
    };
}
