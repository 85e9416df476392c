#pragma once

// The input-correlated oracles. Each oracle is a fixed circuit over unprimed
// registers (the parties' classical inputs, computational-basis only) and
// primed registers (initialized to |0>/0) whose post-circuit primed state is
// returned. Quantum oracles run on state vectors; their classical analogues
// run the same layout as a stochastic circuit over bit-string distributions,
// with the Hadamard replaced by the randomizing gate R (output bit uniform
// regardless of input).

#include <cstdlib>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "nsbox/errors.hpp"
#include "nsbox/linalg.hpp"

namespace nsbox {

inline constexpr std::size_t kDefaultMaxParties = 10;

enum class OracleFamily {
    BipartiteQuantum,
    BipartiteClassical,
    TripartiteQuantum,
    TripartiteClassical,
    NPartyXYZQuantum,
    NPartyXYZClassical,
};

enum class TargetFunction { XYZ, XYplusXZ, Svetlichny };

// Tripartite parity targets: xyz, xy + xz, and xy + yz + zx (mod 2).
inline int eval_target_function(TargetFunction f, int x, int y, int z) {
    switch (f) {
        case TargetFunction::XYZ: return x & y & z;
        case TargetFunction::XYplusXZ: return (x & y) ^ (x & z);
        case TargetFunction::Svetlichny: return (x & y) ^ (y & z) ^ (z & x);
    }
    throw ArgumentError("eval_target_function: unknown target function");
}

struct OracleSpec {
    OracleFamily family = OracleFamily::BipartiteQuantum;
    std::optional<TargetFunction> target_function;  // tripartite families only
    std::size_t n = 2;                              // n-party families only

    static OracleSpec bipartite(bool quantum) {
        OracleSpec s;
        s.family = quantum ? OracleFamily::BipartiteQuantum : OracleFamily::BipartiteClassical;
        s.n = 2;
        return s;
    }

    static OracleSpec tripartite(TargetFunction f, bool quantum) {
        OracleSpec s;
        s.family = quantum ? OracleFamily::TripartiteQuantum : OracleFamily::TripartiteClassical;
        s.target_function = f;
        s.n = 3;
        return s;
    }

    static OracleSpec nparty_xyz(std::size_t n, bool quantum) {
        OracleSpec s;
        s.family = quantum ? OracleFamily::NPartyXYZQuantum : OracleFamily::NPartyXYZClassical;
        s.n = n;
        return s;
    }

    bool is_quantum() const {
        return family == OracleFamily::BipartiteQuantum ||
               family == OracleFamily::TripartiteQuantum ||
               family == OracleFamily::NPartyXYZQuantum;
    }

    bool is_tripartite() const {
        return family == OracleFamily::TripartiteQuantum ||
               family == OracleFamily::TripartiteClassical;
    }

    std::size_t parties() const {
        switch (family) {
            case OracleFamily::BipartiteQuantum:
            case OracleFamily::BipartiteClassical: return 2;
            case OracleFamily::TripartiteQuantum:
            case OracleFamily::TripartiteClassical: return 3;
            case OracleFamily::NPartyXYZQuantum:
            case OracleFamily::NPartyXYZClassical: return n;
        }
        throw ArgumentError("OracleSpec: unknown family");
    }

    void validate() const {
        if (parties() < 2) throw ArgumentError("OracleSpec: need at least two parties");
        if (is_tripartite() != target_function.has_value()) {
            throw ArgumentError("OracleSpec: target_function is for tripartite families only");
        }
    }
};

// Parties cap for oracle construction; NSBOX_MAX_QUBITS (total register
// qubits, i.e. twice the party count) overrides it when set.
inline std::size_t max_parties_cap() {
    if (const char* env = std::getenv("NSBOX_MAX_QUBITS")) {
        const long v = std::atol(env);
        if (v >= 4) return static_cast<std::size_t>(v) / 2;
    }
    return kDefaultMaxParties;
}

// ---------------------------------------------------------------------------
// Classical stochastic circuit engine

class ClassicalState {
  public:
    ClassicalState(std::size_t num_bits, std::vector<double> distribution)
        : num_bits_(num_bits), dist_(std::move(distribution)) {
        if (num_bits_ < 1) throw ArgumentError("ClassicalState: need at least one bit");
        if (dist_.size() != (std::size_t{1} << num_bits_)) {
            throw ArgumentError("ClassicalState: distribution length must be 2^num_bits");
        }
        double sum = 0.0;
        for (const double p : dist_) {
            if (!std::isfinite(p) || p < -kAlgebraTol) {
                throw ArgumentError("ClassicalState: invalid probability");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kAlgebraTol) {
            throw ArgumentError("ClassicalState: probabilities must sum to 1");
        }
        for (double& p : dist_) p = std::max(p, 0.0);
    }

    static ClassicalState deterministic(std::size_t num_bits, std::size_t index) {
        std::vector<double> d(std::size_t{1} << num_bits, 0.0);
        if (index >= d.size()) throw ArgumentError("ClassicalState: index out of range");
        d[index] = 1.0;
        return ClassicalState(num_bits, std::move(d));
    }

    std::size_t num_bits() const { return num_bits_; }
    std::size_t dim() const { return dist_.size(); }
    double operator[](std::size_t i) const { return dist_[i]; }
    const std::vector<double>& distribution() const { return dist_; }

  private:
    std::size_t num_bits_;
    std::vector<double> dist_;

    friend ClassicalState apply_stochastic(const ClassicalState&, const std::vector<double>&,
                                           std::size_t, std::span<const std::size_t>);
    friend ClassicalState apply_classical_mcx(const ClassicalState&, std::span<const std::size_t>,
                                              std::size_t);
};

// Applies a column-stochastic matrix S (S[out*dim+in] = P(out|in), dim = 2^k)
// to the listed bits. Same big-endian block convention as apply_unitary.
inline ClassicalState apply_stochastic(const ClassicalState& state, const std::vector<double>& s,
                                       std::size_t k, std::span<const std::size_t> targets) {
    const std::size_t n = state.num_bits();
    if (targets.size() != k) throw ArgumentError("apply_stochastic: target count mismatch");
    detail::check_targets(n, targets);
    const std::size_t gdim = std::size_t{1} << k;
    if (s.size() != gdim * gdim) throw ArgumentError("apply_stochastic: bad matrix size");

    std::vector<std::size_t> shift(k);
    std::size_t target_mask = 0;
    for (std::size_t j = 0; j < k; ++j) {
        shift[j] = n - 1 - targets[j];
        target_mask |= std::size_t{1} << shift[j];
    }

    ClassicalState out = state;
    std::vector<double> in_block(gdim), out_block(gdim);
    std::vector<std::size_t> idx(gdim);
    for (std::size_t base = 0; base < state.dim(); ++base) {
        if (base & target_mask) continue;
        for (std::size_t g = 0; g < gdim; ++g) {
            std::size_t address = base;
            for (std::size_t j = 0; j < k; ++j) {
                if ((g >> (k - 1 - j)) & 1) address |= std::size_t{1} << shift[j];
            }
            idx[g] = address;
            in_block[g] = state.dist_[address];
        }
        for (std::size_t r = 0; r < gdim; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < gdim; ++c) acc += s[r * gdim + c] * in_block[c];
            out_block[r] = acc;
        }
        for (std::size_t g = 0; g < gdim; ++g) out.dist_[idx[g]] = out_block[g];
    }
    return out;
}

inline ClassicalState apply_classical_mcx(const ClassicalState& state,
                                          std::span<const std::size_t> controls,
                                          std::size_t target) {
    const std::size_t n = state.num_bits();
    std::vector<std::size_t> all(controls.begin(), controls.end());
    all.push_back(target);
    detail::check_targets(n, all);

    std::size_t control_mask = 0;
    for (const std::size_t c : controls) control_mask |= std::size_t{1} << (n - 1 - c);
    const std::size_t target_bit = std::size_t{1} << (n - 1 - target);

    ClassicalState out = state;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if ((i & control_mask) == control_mask && !(i & target_bit)) {
            std::swap(out.dist_[i], out.dist_[i | target_bit]);
        }
    }
    return out;
}

namespace stoch {

// R: output bit uniform whatever the input bit; the classical stand-in for
// Hadamard-then-measure.
inline std::vector<double> randomizing() { return {0.5, 0.5, 0.5, 0.5}; }

inline std::vector<double> cnot() {
    std::vector<double> s(16, 0.0);
    auto set = [&](std::size_t out, std::size_t in) { s[out * 4 + in] = 1.0; };
    set(0b00, 0b00);
    set(0b01, 0b01);
    set(0b11, 0b10);
    set(0b10, 0b11);
    return s;
}

inline std::vector<double> toffoli() {
    std::vector<double> s(64, 0.0);
    for (std::size_t in = 0; in < 8; ++in) {
        const std::size_t out = (in >> 1) == 0b11 ? (in ^ 1) : in;
        s[out * 8 + in] = 1.0;
    }
    return s;
}

}  // namespace stoch

// ---------------------------------------------------------------------------
// Oracles

namespace detail {

inline void require_bit(int b, const char* what) {
    if (b != 0 && b != 1) throw ArgumentError(std::string(what) + ": inputs must be bits");
}

}  // namespace detail

// Four-qubit oracle, wire order (A, B, B', A'): Hadamard on B', CNOT B'->A',
// Toffoli with controls A,B and target B'. Unprimed registers are prepared in
// |x>,|y> and must come back unchanged; the primed pair is returned A'-first,
// i.e. (|0>|xy> + |1>|xy+1>)/sqrt(2).
inline StateVector run_bipartite_quantum_oracle(int x, int y) {
    detail::require_bit(x, "run_bipartite_quantum_oracle");
    detail::require_bit(y, "run_bipartite_quantum_oracle");

    const std::size_t start = (static_cast<std::size_t>(x) << 3) | (static_cast<std::size_t>(y) << 2);
    StateVector psi = StateVector::basis_state(4, start);
    psi = apply_unitary(psi, gates::hadamard(), {2});
    psi = apply_unitary(psi, gates::cnot(), {2, 3});
    psi = apply_unitary(psi, gates::toffoli(), {0, 1, 2});

    // The oracle must not disturb the parties' inputs.
    double support = 0.0;
    for (std::size_t ap = 0; ap < 2; ++ap)
        for (std::size_t bp = 0; bp < 2; ++bp) support += std::norm(psi[start | (bp << 1) | ap]);
    if (std::abs(support - 1.0) > kAlgebraTol) {
        throw InternalError("bipartite oracle leaked amplitude off the input registers");
    }

    std::vector<Cplx> primed(4);
    for (std::size_t ap = 0; ap < 2; ++ap)
        for (std::size_t bp = 0; bp < 2; ++bp) primed[(ap << 1) | bp] = psi[start | (bp << 1) | ap];
    return StateVector(2, std::move(primed));
}

// Classical analogue on the same wire layout; returns the primed-pair
// distribution A'-first: 1/2 on (0, xy) and 1/2 on (1, xy+1).
inline ClassicalState run_bipartite_classical_oracle(int x, int y) {
    detail::require_bit(x, "run_bipartite_classical_oracle");
    detail::require_bit(y, "run_bipartite_classical_oracle");

    const std::size_t start = (static_cast<std::size_t>(x) << 3) | (static_cast<std::size_t>(y) << 2);
    ClassicalState state = ClassicalState::deterministic(4, start);
    {
        const std::size_t t[] = {2};
        state = apply_stochastic(state, stoch::randomizing(), 1, t);
    }
    {
        const std::size_t t[] = {2, 3};
        state = apply_stochastic(state, stoch::cnot(), 2, t);
    }
    {
        const std::size_t t[] = {0, 1, 2};
        state = apply_stochastic(state, stoch::toffoli(), 3, t);
    }

    std::vector<double> primed(4, 0.0);
    double support = 0.0;
    for (std::size_t ap = 0; ap < 2; ++ap) {
        for (std::size_t bp = 0; bp < 2; ++bp) {
            const double p = state[start | (bp << 1) | ap];
            primed[(ap << 1) | bp] = p;
            support += p;
        }
    }
    if (std::abs(support - 1.0) > kAlgebraTol) {
        throw InternalError("bipartite classical oracle leaked probability off the input registers");
    }
    return ClassicalState(2, std::move(primed));
}

// Six-qubit oracle, wires (A, B, C, A', B', C'): Hadamards on A',B', CNOTs
// A'->C' and B'->C', then one multi-controlled X per monomial of the target
// function writing f(x,y,z) into C'. Output is
// (1/2) sum_{a,b} |a>|b>|f+a+b> on (A', B', C').
inline StateVector run_tripartite_quantum_oracle(TargetFunction f, int x, int y, int z) {
    detail::require_bit(x, "run_tripartite_quantum_oracle");
    detail::require_bit(y, "run_tripartite_quantum_oracle");
    detail::require_bit(z, "run_tripartite_quantum_oracle");

    const std::size_t start = (static_cast<std::size_t>(x) << 5) |
                              (static_cast<std::size_t>(y) << 4) |
                              (static_cast<std::size_t>(z) << 3);
    StateVector psi = StateVector::basis_state(6, start);
    psi = apply_unitary(psi, gates::hadamard(), {3});
    psi = apply_unitary(psi, gates::hadamard(), {4});
    psi = apply_unitary(psi, gates::cnot(), {3, 5});
    psi = apply_unitary(psi, gates::cnot(), {4, 5});
    switch (f) {
        case TargetFunction::XYZ: {
            const std::size_t c[] = {0, 1, 2};
            psi = apply_mcx(psi, c, 5);
            break;
        }
        case TargetFunction::XYplusXZ: {
            psi = apply_unitary(psi, gates::toffoli(), {0, 1, 5});
            psi = apply_unitary(psi, gates::toffoli(), {0, 2, 5});
            break;
        }
        case TargetFunction::Svetlichny: {
            psi = apply_unitary(psi, gates::toffoli(), {0, 1, 5});
            psi = apply_unitary(psi, gates::toffoli(), {1, 2, 5});
            psi = apply_unitary(psi, gates::toffoli(), {0, 2, 5});
            break;
        }
    }

    double support = 0.0;
    std::vector<Cplx> primed(8);
    for (std::size_t sub = 0; sub < 8; ++sub) {
        primed[sub] = psi[start | sub];
        support += std::norm(primed[sub]);
    }
    if (std::abs(support - 1.0) > kAlgebraTol) {
        throw InternalError("tripartite oracle leaked amplitude off the input registers");
    }
    return StateVector(3, std::move(primed));
}

inline ClassicalState run_tripartite_classical_oracle(TargetFunction f, int x, int y, int z) {
    detail::require_bit(x, "run_tripartite_classical_oracle");
    detail::require_bit(y, "run_tripartite_classical_oracle");
    detail::require_bit(z, "run_tripartite_classical_oracle");

    const std::size_t start = (static_cast<std::size_t>(x) << 5) |
                              (static_cast<std::size_t>(y) << 4) |
                              (static_cast<std::size_t>(z) << 3);
    ClassicalState state = ClassicalState::deterministic(6, start);
    for (const std::size_t bit : {std::size_t{3}, std::size_t{4}}) {
        const std::size_t t[] = {bit};
        state = apply_stochastic(state, stoch::randomizing(), 1, t);
    }
    for (const std::size_t src : {std::size_t{3}, std::size_t{4}}) {
        const std::size_t t[] = {src, 5};
        state = apply_stochastic(state, stoch::cnot(), 2, t);
    }
    auto ccx = [&](std::size_t c1, std::size_t c2) {
        const std::size_t t[] = {c1, c2, 5};
        state = apply_stochastic(state, stoch::toffoli(), 3, t);
    };
    switch (f) {
        case TargetFunction::XYZ: {
            const std::size_t c[] = {0, 1, 2};
            state = apply_classical_mcx(state, c, 5);
            break;
        }
        case TargetFunction::XYplusXZ:
            ccx(0, 1);
            ccx(0, 2);
            break;
        case TargetFunction::Svetlichny:
            ccx(0, 1);
            ccx(1, 2);
            ccx(0, 2);
            break;
    }

    std::vector<double> primed(8, 0.0);
    double support = 0.0;
    for (std::size_t sub = 0; sub < 8; ++sub) {
        primed[sub] = state[start | sub];
        support += primed[sub];
    }
    if (std::abs(support - 1.0) > kAlgebraTol) {
        throw InternalError("tripartite classical oracle leaked probability off the input registers");
    }
    return ClassicalState(3, std::move(primed));
}

// n-party generalization: uniform superposition over the first n-1 primed
// qubits, last primed qubit = (product of all inputs) xor their parity.
// Weight 2^(1-n) on each of the 2^(n-1) strings with parity x1*x2*...*xn.
inline StateVector run_nparty_xyz_quantum_oracle(std::span<const int> inputs,
                                                 std::size_t max_parties = 0) {
    const std::size_t n = inputs.size();
    if (n < 2) throw ArgumentError("run_nparty_xyz_quantum_oracle: need n >= 2");
    if (max_parties == 0) max_parties = max_parties_cap();
    if (n > max_parties) throw CapacityError("run_nparty_xyz_quantum_oracle: party count over cap");
    for (const int b : inputs) detail::require_bit(b, "run_nparty_xyz_quantum_oracle");

    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (inputs[i]) start |= std::size_t{1} << (2 * n - 1 - i);
    }
    StateVector psi = StateVector::basis_state(2 * n, start);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        psi = apply_unitary(psi, gates::hadamard(), {n + j});
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        psi = apply_unitary(psi, gates::cnot(), {n + j, 2 * n - 1});
    }
    std::vector<std::size_t> controls(n);
    for (std::size_t i = 0; i < n; ++i) controls[i] = i;
    psi = apply_mcx(psi, controls, 2 * n - 1);

    const std::size_t sub_dim = std::size_t{1} << n;
    std::vector<Cplx> primed(sub_dim);
    double support = 0.0;
    for (std::size_t sub = 0; sub < sub_dim; ++sub) {
        primed[sub] = psi[start | sub];
        support += std::norm(primed[sub]);
    }
    if (std::abs(support - 1.0) > kAlgebraTol) {
        throw InternalError("n-party oracle leaked amplitude off the input registers");
    }
    return StateVector(n, std::move(primed));
}

inline ClassicalState run_nparty_xyz_classical_oracle(std::span<const int> inputs,
                                                      std::size_t max_parties = 0) {
    const std::size_t n = inputs.size();
    if (n < 2) throw ArgumentError("run_nparty_xyz_classical_oracle: need n >= 2");
    if (max_parties == 0) max_parties = max_parties_cap();
    if (n > max_parties) throw CapacityError("run_nparty_xyz_classical_oracle: party count over cap");
    for (const int b : inputs) detail::require_bit(b, "run_nparty_xyz_classical_oracle");

    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (inputs[i]) start |= std::size_t{1} << (2 * n - 1 - i);
    }
    ClassicalState state = ClassicalState::deterministic(2 * n, start);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const std::size_t t[] = {n + j};
        state = apply_stochastic(state, stoch::randomizing(), 1, t);
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const std::size_t t[] = {n + j, 2 * n - 1};
        state = apply_stochastic(state, stoch::cnot(), 2, t);
    }
    std::vector<std::size_t> controls(n);
    for (std::size_t i = 0; i < n; ++i) controls[i] = i;
    state = apply_classical_mcx(state, controls, 2 * n - 1);

    const std::size_t sub_dim = std::size_t{1} << n;
    std::vector<double> primed(sub_dim, 0.0);
    double support = 0.0;
    for (std::size_t sub = 0; sub < sub_dim; ++sub) {
        primed[sub] = state[start | sub];
        support += primed[sub];
    }
    if (std::abs(support - 1.0) > kAlgebraTol) {
        throw InternalError("n-party classical oracle leaked probability off the input registers");
    }
    return ClassicalState(n, std::move(primed));
}

using OracleOutput = std::variant<StateVector, ClassicalState>;

// Runs the oracle selected by `spec` on one input tuple and returns the
// primed-register state (parties in A'-first order throughout).
inline OracleOutput run_oracle(const OracleSpec& spec, std::span<const int> inputs) {
    spec.validate();
    if (inputs.size() != spec.parties()) {
        throw ArgumentError("run_oracle: input arity does not match party count");
    }
    const std::vector<int> in(inputs.begin(), inputs.end());
    switch (spec.family) {
        case OracleFamily::BipartiteQuantum: return run_bipartite_quantum_oracle(in[0], in[1]);
        case OracleFamily::BipartiteClassical:
            return run_bipartite_classical_oracle(in[0], in[1]);
        case OracleFamily::TripartiteQuantum:
            return run_tripartite_quantum_oracle(*spec.target_function, in[0], in[1], in[2]);
        case OracleFamily::TripartiteClassical:
            return run_tripartite_classical_oracle(*spec.target_function, in[0], in[1], in[2]);
        case OracleFamily::NPartyXYZQuantum: return run_nparty_xyz_quantum_oracle(in);
        case OracleFamily::NPartyXYZClassical: return run_nparty_xyz_classical_oracle(in);
    }
    throw ArgumentError("run_oracle: unknown family");
}

// Unsafe by design: the two-qubit CNOT with a freely chosen control
// preparation |c>. With the target prepared in |0> the output is |c>|c>,
// which hands Bob a copy of Alice's bit. Exists to demonstrate what the
// restricted-access rule of the oracles above prevents.
inline StateVector run_with_free_inputs(int control_bit) {
    detail::require_bit(control_bit, "run_with_free_inputs");
    StateVector psi = StateVector::basis_state(2, static_cast<std::size_t>(control_bit) << 1);
    return apply_unitary(psi, gates::cnot(), {0, 1});
}

}  // namespace nsbox
