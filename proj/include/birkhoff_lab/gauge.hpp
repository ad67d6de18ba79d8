#pragma once

// Growth gauges psi(n) = o(n) used to normalise Birkhoff sums.

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "birkhoff_lab/error.hpp"

namespace birkhoff_lab {

class GrowthGauge {
public:
    /// psi(n) = n^nu
    static GrowthGauge power_law(double nu) {
        require(nu > 0.0 && nu < 1.0, "power-law gauge needs nu in (0, 1)");
        GrowthGauge g;
        g.nu_ = nu;
        return g;
    }

    /// psi(n) = table[n - 1] for n = 1..table.size(); must be non-decreasing,
    /// positive, and sublinear at the tabulated end.
    static GrowthGauge from_table(std::vector<double> table) {
        require(table.size() >= 2, "gauge table needs at least two entries");
        for (std::size_t i = 0; i < table.size(); ++i) {
            require(table[i] > 0.0, "gauge values must be positive");
            if (i > 0) require(table[i] >= table[i - 1], "gauge table must be non-decreasing");
        }
        double first = table.front() / 1.0;
        double last = table.back() / static_cast<double>(table.size());
        require(last < first, "gauge table is not sublinear over its range");
        GrowthGauge g;
        g.table_ = std::move(table);
        return g;
    }

    bool is_power_law() const { return table_.empty(); }
    double nu() const { return nu_; }
    std::size_t table_size() const { return table_.size(); }

    double operator()(std::uint64_t n) const {
        require(n >= 1, "gauge is defined for n >= 1");
        if (table_.empty()) return std::pow(static_cast<double>(n), nu_);
        if (n > table_.size())
            fail(ErrorKind::BudgetExceeded, "gauge table exhausted at n = " + std::to_string(n));
        return table_[n - 1];
    }

    std::string describe() const {
        if (table_.empty()) return "nu=" + std::to_string(nu_);
        return "table[" + std::to_string(table_.size()) + "]";
    }

private:
    double nu_ = 0.5;
    std::vector<double> table_;
};

} // namespace birkhoff_lab
