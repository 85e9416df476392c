#pragma once

// Finite-statistics layer: multinomial coincidence-count sampling from a
// 2-2-2 behavior and the count-based correlator/CHSH estimators. Sampling is
// bit-reproducible across platforms: each input pair gets a SplitMix64 stream
// derived from the user seed, and every shot is placed by one uniform draw
// walked through the outcome CDF (no std:: distributions, whose output is
// implementation-defined).

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "nsbox/behavior.hpp"
#include "nsbox/errors.hpp"
#include "nsbox/rng.hpp"

namespace nsbox {

// Coincidence counts C(a_deg, b_deg | x, y); outcome index 0 <-> analyzer
// setting 0 degrees, index 1 <-> 45 degrees.
class CountsTable {
  public:
    CountsTable() { counts_.fill(0); }

    std::uint64_t& at(int x, int y, int a, int b) { return counts_[index(x, y, a, b)]; }
    std::uint64_t at(int x, int y, int a, int b) const { return counts_[index(x, y, a, b)]; }

    std::uint64_t total(int x, int y) const {
        std::uint64_t t = 0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) t += at(x, y, a, b);
        return t;
    }

    static int outcome_to_degrees(int idx) { return idx == 0 ? 0 : 45; }

    static int degrees_to_outcome(int deg) {
        if (deg == 0) return 0;
        if (deg == 45) return 1;
        throw ArgumentError("CountsTable: analyzer angle must be 0 or 45");
    }

    // CSV interchange: header x,y,a_deg,b_deg,count; rows in (x,y,a,b) order.
    void write_csv(std::ostream& os) const {
        os << "x,y,a_deg,b_deg,count\n";
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        os << x << ',' << y << ',' << outcome_to_degrees(a) << ','
                           << outcome_to_degrees(b) << ',' << at(x, y, a, b) << '\n';
                    }
    }

    static CountsTable read_csv(std::istream& is) {
        CountsTable table;
        std::string line;
        if (!std::getline(is, line) || line != "x,y,a_deg,b_deg,count") {
            throw ArgumentError("CountsTable: bad CSV header");
        }
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            int x, y, adeg, bdeg;
            std::uint64_t c;
            char comma;
            if (!(row >> x >> comma >> y >> comma >> adeg >> comma >> bdeg >> comma >> c)) {
                throw ArgumentError("CountsTable: bad CSV row: " + line);
            }
            if (x < 0 || x > 1 || y < 0 || y > 1) throw ArgumentError("CountsTable: bad input bit");
            table.at(x, y, degrees_to_outcome(adeg), degrees_to_outcome(bdeg)) = c;
        }
        return table;
    }

  private:
    static std::size_t index(int x, int y, int a, int b) {
        if (x < 0 || x > 1 || y < 0 || y > 1 || a < 0 || a > 1 || b < 0 || b > 1) {
            throw ArgumentError("CountsTable: index out of range");
        }
        return static_cast<std::size_t>(((x * 2 + y) * 2 + a) * 2 + b);
    }

    std::array<std::uint64_t, 16> counts_;
};

// Multinomial draws per input pair; deterministic for a given seed. The
// stream for input (x,y) has seed derive_seed(seed, 2x + y).
inline CountsTable sample_counts(const Behavior& b, std::uint64_t shots_per_input,
                                 std::uint64_t seed) {
    if (!b.is_222()) throw ArgumentError("sample_counts: 2-2-2 behavior required");
    if (shots_per_input < 1) throw ArgumentError("sample_counts: need at least one shot");

    CountsTable table;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            double cdf[4];
            double acc = 0.0;
            for (int o = 0; o < 4; ++o) {
                acc += b.prob_flat(static_cast<std::size_t>(x * 2 + y), static_cast<std::size_t>(o));
                cdf[o] = acc;
            }
            cdf[3] = 1.0;  // guard against roundoff in the last bin

            SplitMix64 rng(SplitMix64::derive_seed(seed, static_cast<std::uint64_t>(x * 2 + y)));
            for (std::uint64_t s = 0; s < shots_per_input; ++s) {
                const double u = rng.next_double();
                int o = 0;
                while (u >= cdf[o]) ++o;
                ++table.at(x, y, o >> 1, o & 1);
            }
        }
    }
    return table;
}

// E = sum (-1)^(1 + delta_ab) C(a,b|x,y) / sum C(a,b|x,y): same-analyzer
// cells count +, crossed cells count -.
inline double correlator_from_counts(const CountsTable& c, int x, int y) {
    const std::uint64_t total = c.total(x, y);
    if (total == 0) {
        throw InsufficientDataError("correlator_from_counts: no counts for this input pair");
    }
    const double plus = static_cast<double>(c.at(x, y, 0, 0) + c.at(x, y, 1, 1));
    const double minus = static_cast<double>(c.at(x, y, 0, 1) + c.at(x, y, 1, 0));
    return (plus - minus) / static_cast<double>(total);
}

struct ChshEstimate {
    double score;
    double stderr_;
};

// S = |sum_xy (-1)^(xy) E(x,y)| with the uncertainty from independent
// Poisson fluctuations per count cell, propagated through the correlator
// ratio and combined in quadrature. Equivalent to Var(E) = (1 - E^2)/N.
inline ChshEstimate chsh_from_counts(const CountsTable& c) {
    double s = 0.0;
    double var = 0.0;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const double e = correlator_from_counts(c, x, y);
            const double n = static_cast<double>(c.total(x, y));
            s += ((x & y) ? -1.0 : 1.0) * e;
            const double dplus = (1.0 - e) / n;   // d e / d C for + cells
            const double dminus = (1.0 + e) / n;  // magnitude for - cells
            var += static_cast<double>(c.at(x, y, 0, 0) + c.at(x, y, 1, 1)) * dplus * dplus +
                   static_cast<double>(c.at(x, y, 0, 1) + c.at(x, y, 1, 0)) * dminus * dminus;
        }
    }
    return {std::abs(s), std::sqrt(var)};
}

}  // namespace nsbox
