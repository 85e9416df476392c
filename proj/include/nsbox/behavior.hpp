#pragma once

// Behaviors: conditional probability tables p(outputs|inputs) for n parties,
// plus the analyses run on them (no-signaling verification, CHSH scoring,
// locality classification, box identification). Outputs are stored as
// indices {0,1}; the +/-1 algebra maps index 0 -> +1 and index 1 -> -1 at
// scoring time.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nsbox/circuits.hpp"
#include "nsbox/errors.hpp"
#include "nsbox/measurement.hpp"

namespace nsbox {

class Behavior {
  public:
    Behavior(std::vector<int> inputs_per_party, std::vector<int> outputs_per_party,
             std::vector<double> table)
        : inputs_(std::move(inputs_per_party)),
          outputs_(std::move(outputs_per_party)),
          table_(std::move(table)) {
        if (inputs_.size() < 2 || inputs_.size() != outputs_.size()) {
            throw ArgumentError("Behavior: need >= 2 parties with matching input/output arrays");
        }
        for (const int c : inputs_) {
            if (c < 1) throw ArgumentError("Behavior: input cardinality must be >= 1");
        }
        for (const int c : outputs_) {
            if (c < 2) throw ArgumentError("Behavior: output cardinality must be >= 2");
        }
        if (table_.size() != num_input_tuples() * num_output_tuples()) {
            throw ArgumentError("Behavior: table size does not match scenario shape");
        }
        for (double& p : table_) {
            if (!std::isfinite(p) || p < -kAlgebraTol) {
                throw ArgumentError("Behavior: invalid probability entry");
            }
            p = std::max(p, 0.0);
        }
        for (std::size_t i = 0; i < num_input_tuples(); ++i) {
            double sum = 0.0;
            for (std::size_t o = 0; o < num_output_tuples(); ++o) {
                sum += table_[i * num_output_tuples() + o];
            }
            if (std::abs(sum - 1.0) > kPhysicsTol) {
                throw ArgumentError("Behavior: outputs do not sum to 1 for some input tuple");
            }
        }
    }

    std::size_t parties() const { return inputs_.size(); }
    const std::vector<int>& inputs_per_party() const { return inputs_; }
    const std::vector<int>& outputs_per_party() const { return outputs_; }
    const std::vector<double>& table() const { return table_; }

    std::size_t num_input_tuples() const {
        return std::accumulate(inputs_.begin(), inputs_.end(), std::size_t{1},
                               [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
    }

    std::size_t num_output_tuples() const {
        return std::accumulate(outputs_.begin(), outputs_.end(), std::size_t{1},
                               [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
    }

    // Mixed-radix flattening, party 0 most significant.
    std::size_t input_index(std::span<const int> in) const {
        return flatten(in, inputs_, "input");
    }

    std::size_t output_index(std::span<const int> out) const {
        return flatten(out, outputs_, "output");
    }

    double prob(std::span<const int> in, std::span<const int> out) const {
        return table_[input_index(in) * num_output_tuples() + output_index(out)];
    }

    double prob_flat(std::size_t input_idx, std::size_t output_idx) const {
        return table_[input_idx * num_output_tuples() + output_idx];
    }

    bool is_222() const {
        if (parties() != 2) return false;
        return inputs_[0] == 2 && inputs_[1] == 2 && outputs_[0] == 2 && outputs_[1] == 2;
    }

    bool all_binary() const {
        for (const int c : inputs_)
            if (c != 2) return false;
        for (const int c : outputs_)
            if (c != 2) return false;
        return true;
    }

  private:
    static std::size_t flatten(std::span<const int> digits, const std::vector<int>& radix,
                               const char* what) {
        if (digits.size() != radix.size()) {
            throw ArgumentError(std::string("Behavior: ") + what + " arity mismatch");
        }
        std::size_t idx = 0;
        for (std::size_t k = 0; k < digits.size(); ++k) {
            if (digits[k] < 0 || digits[k] >= radix[k]) {
                throw ArgumentError(std::string("Behavior: ") + what + " value out of range");
            }
            idx = idx * static_cast<std::size_t>(radix[k]) + static_cast<std::size_t>(digits[k]);
        }
        return idx;
    }

    std::vector<int> inputs_;
    std::vector<int> outputs_;
    std::vector<double> table_;
};

// ---------------------------------------------------------------------------
// Construction

// Measures each input tuple's oracle output with that tuple's settings.
inline Behavior behavior_from_oracle(const OracleSpec& spec,
                                     std::span<const PartySettings> settings) {
    spec.validate();
    const std::size_t n = spec.parties();
    if (settings.size() != n) {
        throw ArgumentError("behavior_from_oracle: one PartySettings per party required");
    }
    for (const auto& s : settings) {
        if (s.num_inputs() != 2) {
            throw ArgumentError("behavior_from_oracle: oracles take binary inputs");
        }
    }

    const std::size_t num_in = std::size_t{1} << n;
    const std::size_t num_out = std::size_t{1} << n;
    std::vector<double> table(num_in * num_out);
    std::vector<int> in_bits(n);
    for (std::size_t i = 0; i < num_in; ++i) {
        for (std::size_t k = 0; k < n; ++k) in_bits[k] = static_cast<int>((i >> (n - 1 - k)) & 1);
        const OracleOutput out = run_oracle(spec, in_bits);
        const std::vector<double> dist =
            std::holds_alternative<StateVector>(out)
                ? outcome_distribution(std::get<StateVector>(out), settings, in_bits)
                : outcome_distribution(std::get<ClassicalState>(out), settings, in_bits);
        for (std::size_t o = 0; o < num_out; ++o) table[i * num_out + o] = dist[o];
    }
    return Behavior(std::vector<int>(n, 2), std::vector<int>(n, 2), std::move(table));
}

// Measures one fixed shared state for every input tuple (no input-dependent
// preparation; this is the ordinary static Bell setup).
template <typename StateT>
inline Behavior behavior_from_state(const StateT& state, std::span<const PartySettings> settings) {
    const std::size_t n = settings.size();
    if (n < 2) throw ArgumentError("behavior_from_state: need >= 2 parties");
    for (const auto& s : settings) {
        if (s.num_inputs() != 2) {
            throw ArgumentError("behavior_from_state: two inputs per party required");
        }
    }
    const std::size_t num_in = std::size_t{1} << n;
    const std::size_t num_out = std::size_t{1} << n;
    std::vector<double> table(num_in * num_out);
    std::vector<int> in_bits(n);
    for (std::size_t i = 0; i < num_in; ++i) {
        for (std::size_t k = 0; k < n; ++k) in_bits[k] = static_cast<int>((i >> (n - 1 - k)) & 1);
        const std::vector<double> dist = outcome_distribution(state, settings, in_bits);
        for (std::size_t o = 0; o < num_out; ++o) table[i * num_out + o] = dist[o];
    }
    return Behavior(std::vector<int>(n, 2), std::vector<int>(n, 2), std::move(table));
}

// The ideal PR table: p(a,b|x,y) = 1/2 when a+b = xy (mod 2), else 0.
inline Behavior pr_box_behavior() {
    std::vector<double> table(16, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if (((a ^ b) & 1) == (x & y)) {
                        table[static_cast<std::size_t>((x * 2 + y) * 4 + a * 2 + b)] = 0.5;
                    }
    return Behavior({2, 2}, {2, 2}, std::move(table));
}

// Behavior realized by the free-input CNOT: Alice's input selects |c>, the
// gate copies it onto Bob's wire, both read out in the computational basis.
// Bob's marginal equals Alice's input, the textbook signaling table.
inline Behavior signaling_cnot_demo_behavior() {
    std::vector<double> table(16, 0.0);
    for (int x = 0; x < 2; ++x) {
        const StateVector psi = run_with_free_inputs(x);
        for (int y = 0; y < 2; ++y) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const double p = std::norm(psi[static_cast<std::size_t>(a * 2 + b)]);
                    table[static_cast<std::size_t>((x * 2 + y) * 4 + a * 2 + b)] = p;
                }
            }
        }
    }
    return Behavior({2, 2}, {2, 2}, std::move(table));
}

// ---------------------------------------------------------------------------
// No-signaling check

struct NSReport {
    bool passed = true;
    double max_violation = 0.0;
    // Largest marginal discrepancy found: the party subset, its own inputs
    // and marginal outcomes, and the two complementary input tuples whose
    // marginals disagree the most.
    struct WorstCase {
        std::vector<int> subset;
        std::vector<int> subset_inputs;
        std::vector<int> subset_outcomes;
        std::vector<int> other_inputs_low;
        std::vector<int> other_inputs_high;
    } worst;
};

// Verifies that every proper nonempty subset's outcome marginal is
// independent of the complementary parties' inputs.
inline NSReport no_signaling_check(const Behavior& b, double tol = kPhysicsTol) {
    const std::size_t n = b.parties();
    const auto& in_card = b.inputs_per_party();
    const auto& out_card = b.outputs_per_party();

    NSReport report;
    std::vector<int> in(n), out(n);

    auto enumerate = [](std::span<const int> card, std::span<const std::size_t> which,
                        std::size_t flat, std::span<int> digits) {
        // unpack flat index into the `which` positions (most significant first)
        for (std::size_t j = which.size(); j-- > 0;) {
            digits[which[j]] = static_cast<int>(flat % static_cast<std::size_t>(card[which[j]]));
            flat /= static_cast<std::size_t>(card[which[j]]);
        }
    };

    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
        std::vector<std::size_t> sub, comp;
        for (std::size_t k = 0; k < n; ++k) {
            if (mask & (std::size_t{1} << k)) sub.push_back(k);
            else comp.push_back(k);
        }
        std::size_t sub_in = 1, sub_out = 1, comp_in = 1, comp_out = 1;
        for (const std::size_t k : sub) {
            sub_in *= static_cast<std::size_t>(in_card[k]);
            sub_out *= static_cast<std::size_t>(out_card[k]);
        }
        for (const std::size_t k : comp) {
            comp_in *= static_cast<std::size_t>(in_card[k]);
            comp_out *= static_cast<std::size_t>(out_card[k]);
        }

        for (std::size_t si = 0; si < sub_in; ++si) {
            for (std::size_t so = 0; so < sub_out; ++so) {
                double lo = 2.0, hi = -1.0;
                std::vector<int> lo_inputs, hi_inputs;
                for (std::size_t ci = 0; ci < comp_in; ++ci) {
                    enumerate(in_card, sub, si, in);
                    enumerate(in_card, comp, ci, in);
                    enumerate(out_card, sub, so, out);
                    double marginal = 0.0;
                    for (std::size_t co = 0; co < comp_out; ++co) {
                        enumerate(out_card, comp, co, out);
                        marginal += b.prob(in, out);
                    }
                    std::vector<int> comp_inputs;
                    for (const std::size_t k : comp) comp_inputs.push_back(in[k]);
                    if (marginal < lo) {
                        lo = marginal;
                        lo_inputs = comp_inputs;
                    }
                    if (marginal > hi) {
                        hi = marginal;
                        hi_inputs = comp_inputs;
                    }
                }
                const double spread = hi - lo;
                if (spread > report.max_violation) {
                    report.max_violation = spread;
                    report.worst.subset.assign(sub.begin(), sub.end());
                    enumerate(in_card, sub, si, in);
                    report.worst.subset_inputs.clear();
                    for (const std::size_t k : sub) report.worst.subset_inputs.push_back(in[k]);
                    enumerate(out_card, sub, so, out);
                    report.worst.subset_outcomes.clear();
                    for (const std::size_t k : sub) report.worst.subset_outcomes.push_back(out[k]);
                    report.worst.other_inputs_low = lo_inputs;
                    report.worst.other_inputs_high = hi_inputs;
                }
            }
        }
    }
    report.passed = report.max_violation <= tol;
    return report;
}

// ---------------------------------------------------------------------------
// CHSH scoring and locality

// <a_x b_y> with outputs mapped 0 -> +1, 1 -> -1.
inline double correlator(const Behavior& b, int x, int y) {
    if (!b.is_222()) throw ArgumentError("correlator: 2-2-2 behavior required");
    double e = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int bb = 0; bb < 2; ++bb) {
            const double sign = ((a ^ bb) & 1) ? -1.0 : 1.0;
            const int in[] = {x, y};
            const int out[] = {a, bb};
            e += sign * b.prob(in, out);
        }
    }
    return e;
}

// |E00 + E01 + E10 - E11|.
inline double chsh_score(const Behavior& b) {
    if (!b.is_222()) throw ArgumentError("chsh_score: 2-2-2 behavior required");
    return std::abs(correlator(b, 0, 0) + correlator(b, 0, 1) + correlator(b, 1, 0) -
                    correlator(b, 1, 1));
}

// Maximum over the eight local relabelings of the CHSH expression (the four
// placements of the minus sign, each with both overall signs).
inline double chsh_max_relabelings(const Behavior& b) {
    if (!b.is_222()) throw ArgumentError("chsh_max_relabelings: 2-2-2 behavior required");
    const double e[4] = {correlator(b, 0, 0), correlator(b, 0, 1), correlator(b, 1, 0),
                         correlator(b, 1, 1)};
    double best = 0.0;
    for (int minus_at = 0; minus_at < 4; ++minus_at) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += (k == minus_at) ? -e[k] : e[k];
        best = std::max(best, std::abs(s));
    }
    return best;
}

enum class Classification { Local, QuantumCompatible, BeyondQuantum };

struct LocalityClass {
    Classification classification;
    double chsh_max;
};

inline const char* to_string(Classification c) {
    switch (c) {
        case Classification::Local: return "Local";
        case Classification::QuantumCompatible: return "QuantumCompatible";
        case Classification::BeyondQuantum: return "BeyondQuantum";
    }
    return "?";
}

// In the 2-2-2 scenario the eight CHSH inequalities are necessary and
// sufficient for locality, so the relabeling maximum decides the class.
// Values within `tol` of a threshold resolve to the lower class.
inline LocalityClass locality_classify(const Behavior& b, double tol = 1e-6) {
    if (!b.is_222()) throw ArgumentError("locality_classify: 2-2-2 behavior required");
    const NSReport ns = no_signaling_check(b);
    if (!ns.passed) {
        throw PreconditionError("locality_classify: behavior is signaling");
    }
    const double m = chsh_max_relabelings(b);
    const double tsirelson = 2.0 * std::sqrt(2.0);
    Classification c = Classification::BeyondQuantum;
    if (m <= 2.0 + tol) c = Classification::Local;
    else if (m <= tsirelson + tol) c = Classification::QuantumCompatible;
    return {c, m};
}

// Entrywise match against the PR table: 1/2 when a+b = xy (mod 2), else 0.
inline bool is_pr_box(const Behavior& b, double tol = kPhysicsTol) {
    if (!b.is_222()) throw ArgumentError("is_pr_box: 2-2-2 behavior required");
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb) {
                    const double expected = (((a ^ bb) & 1) == (x & y)) ? 0.5 : 0.0;
                    const int in[] = {x, y};
                    const int out[] = {a, bb};
                    if (std::abs(b.prob(in, out) - expected) > tol) return false;
                }
    return true;
}

// ---------------------------------------------------------------------------
// Multipartite full-correlation boxes

struct BoxCheckReport {
    bool passed;
    double max_deviation;
};

// Verifies the full-correlation box for parity target f: probability
// 2^(1-n) on outcome strings whose parity equals f(inputs), 0 elsewhere,
// plus uniform marginals for every proper nonempty party subset. XYZ
// generalizes to any n as the product of all inputs; the other two targets
// are tripartite.
inline BoxCheckReport multiparty_box_check(const Behavior& b, TargetFunction f,
                                           double tol = kPhysicsTol) {
    if (!b.all_binary()) {
        throw ArgumentError("multiparty_box_check: 2-input 2-output behavior required");
    }
    const std::size_t n = b.parties();
    if (f != TargetFunction::XYZ && n != 3) {
        throw ArgumentError("multiparty_box_check: this target function is tripartite");
    }

    const double weight = std::ldexp(1.0, 1 - static_cast<int>(n));  // 2^(1-n)
    double dev = 0.0;
    std::vector<int> in(n), out(n);
    for (std::size_t i = 0; i < b.num_input_tuples(); ++i) {
        for (std::size_t k = 0; k < n; ++k) in[k] = static_cast<int>((i >> (n - 1 - k)) & 1);
        int target;
        if (f == TargetFunction::XYZ) {
            target = 1;
            for (const int v : in) target &= v;
        } else {
            target = eval_target_function(f, in[0], in[1], in[2]);
        }
        for (std::size_t o = 0; o < b.num_output_tuples(); ++o) {
            int parity = 0;
            for (std::size_t k = 0; k < n; ++k) {
                out[k] = static_cast<int>((o >> (n - 1 - k)) & 1);
                parity ^= out[k];
            }
            const double expected = (parity == target) ? weight : 0.0;
            dev = std::max(dev, std::abs(b.prob(in, out) - expected));
        }
    }

    // Strict-subset marginals must be uniform.
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
        std::vector<std::size_t> sub;
        for (std::size_t k = 0; k < n; ++k)
            if (mask & (std::size_t{1} << k)) sub.push_back(k);
        const double uniform = std::ldexp(1.0, -static_cast<int>(sub.size()));
        for (std::size_t i = 0; i < b.num_input_tuples(); ++i) {
            for (std::size_t k = 0; k < n; ++k) in[k] = static_cast<int>((i >> (n - 1 - k)) & 1);
            const std::size_t sub_out = std::size_t{1} << sub.size();
            for (std::size_t so = 0; so < sub_out; ++so) {
                double marginal = 0.0;
                for (std::size_t o = 0; o < b.num_output_tuples(); ++o) {
                    bool match = true;
                    for (std::size_t j = 0; j < sub.size(); ++j) {
                        const int bit = static_cast<int>((o >> (n - 1 - sub[j])) & 1);
                        if (bit != static_cast<int>((so >> (sub.size() - 1 - j)) & 1)) {
                            match = false;
                            break;
                        }
                    }
                    if (match) marginal += b.prob_flat(i, o);
                }
                dev = std::max(dev, std::abs(marginal - uniform));
            }
        }
    }

    return {dev <= tol, dev};
}

}  // namespace nsbox
