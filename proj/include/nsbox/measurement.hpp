#pragma once

// Projective measurements on the oracle outputs. Outcomes are labeled +1/-1;
// the projector for reported outcome a along direction n with sign s is
// (I + s*a n.sigma)/2, so a sign of -1 swaps the labels a party attaches to
// the two projectors without touching the reported direction.

#include <cmath>
#include <span>
#include <vector>

#include "nsbox/bloch.hpp"
#include "nsbox/circuits.hpp"
#include "nsbox/errors.hpp"
#include "nsbox/linalg.hpp"

namespace nsbox {

// Per-party measurement choice: one Bloch direction and one outcome sign for
// each input value the party can receive.
struct PartySettings {
    std::vector<BlochDirection> directions;
    std::vector<int> outcome_signs;

    PartySettings() = default;

    PartySettings(std::vector<BlochDirection> dirs, std::vector<int> signs)
        : directions(std::move(dirs)), outcome_signs(std::move(signs)) {
        validate();
    }

    explicit PartySettings(std::vector<BlochDirection> dirs)
        : directions(std::move(dirs)), outcome_signs(directions.size(), 1) {
        validate();
    }

    static PartySettings from_angles(double theta0, double phi0, double theta1, double phi1) {
        return PartySettings({BlochDirection(theta0, phi0), BlochDirection(theta1, phi1)});
    }

    // Same direction for both input values.
    static PartySettings shared(const BlochDirection& d) { return PartySettings({d, d}); }

    std::size_t num_inputs() const { return directions.size(); }

    const BlochDirection& direction(int input) const {
        if (input < 0 || static_cast<std::size_t>(input) >= directions.size()) {
            throw ArgumentError("PartySettings: input value out of range");
        }
        return directions[static_cast<std::size_t>(input)];
    }

    int sign(int input) const {
        if (input < 0 || static_cast<std::size_t>(input) >= outcome_signs.size()) {
            throw ArgumentError("PartySettings: input value out of range");
        }
        return outcome_signs[static_cast<std::size_t>(input)];
    }

    void validate() const {
        if (directions.empty()) throw ArgumentError("PartySettings: no directions");
        if (outcome_signs.size() != directions.size()) {
            throw ArgumentError("PartySettings: one outcome sign per direction required");
        }
        for (const int s : outcome_signs) {
            if (s != 1 && s != -1) throw ArgumentError("PartySettings: signs must be +1 or -1");
        }
    }
};

namespace detail {

// Trace results may stray past [0,1] by roundoff; anything beyond the
// tolerance window is a bug, not noise.
inline double clamp_probability(double p) {
    if (p < 0.0) {
        if (p < -kAlgebraTol) throw InternalError("probability below -1e-12");
        return 0.0;
    }
    if (p > 1.0) {
        if (p > 1.0 + kAlgebraTol) throw InternalError("probability above 1+1e-12");
        return 1.0;
    }
    return p;
}

inline void require_outcome(int a) {
    if (a != 1 && a != -1) throw ArgumentError("outcomes must be +1 or -1");
}

}  // namespace detail

// Basis-change matrix whose rows are <n| and <n_perp|: applying it to a qubit
// turns a measurement along n into a computational-basis readout.
inline Matrix measurement_basis_matrix(const BlochDirection& dir) {
    const double c = std::cos(dir.theta() / 2.0);
    const double s = std::sin(dir.theta() / 2.0);
    const Cplx emph = std::polar(1.0, -dir.phi());
    Matrix u(2, 2);
    u(0, 0) = Cplx(c, 0.0);
    u(0, 1) = s * emph;
    u(1, 0) = Cplx(s, 0.0);
    u(1, 1) = -c * emph;
    return u;
}

// Tensor product of the per-party outcome projectors.
inline Matrix joint_projector(std::span<const PartySettings> settings, std::span<const int> inputs,
                              std::span<const int> outcomes) {
    if (settings.size() != inputs.size() || settings.size() != outcomes.size()) {
        throw ArgumentError("joint_projector: settings/inputs/outcomes arity mismatch");
    }
    Matrix op;
    for (std::size_t k = 0; k < settings.size(); ++k) {
        detail::require_outcome(outcomes[k]);
        const Matrix pk = projector_from_bloch(settings[k].direction(inputs[k]),
                                               settings[k].sign(inputs[k]) * outcomes[k]);
        op = (k == 0) ? pk : tensor_product(op, pk);
    }
    return op;
}

// p = <psi| (x)_k Pi_k |psi>, the trace rule for a pure state.
inline double joint_probability(const StateVector& state, std::span<const PartySettings> settings,
                                std::span<const int> inputs, std::span<const int> outcomes) {
    if (settings.size() != state.num_qubits()) {
        throw ArgumentError("joint_probability: one setting per subsystem qubit required");
    }
    const Matrix op = joint_projector(settings, inputs, outcomes);
    Cplx acc(0.0, 0.0);
    for (std::size_t r = 0; r < state.dim(); ++r) {
        Cplx row(0.0, 0.0);
        for (std::size_t c = 0; c < state.dim(); ++c) row += op(r, c) * state[c];
        acc += std::conj(state[r]) * row;
    }
    return detail::clamp_probability(acc.real());
}

// p = Tr[rho (x)_k Pi_k].
inline double joint_probability(const DensityMatrix& rho, std::span<const PartySettings> settings,
                                std::span<const int> inputs, std::span<const int> outcomes) {
    if (settings.size() != rho.num_qubits()) {
        throw ArgumentError("joint_probability: one setting per subsystem qubit required");
    }
    const Matrix op = joint_projector(settings, inputs, outcomes);
    Cplx acc(0.0, 0.0);
    for (std::size_t r = 0; r < rho.dim(); ++r)
        for (std::size_t c = 0; c < rho.dim(); ++c) acc += rho.matrix()(r, c) * op(c, r);
    return detail::clamp_probability(acc.real());
}

// For a distribution over bit strings each bit beta behaves as |beta><beta|,
// so the per-party factor is (1 + s*a*(-1)^beta cos theta)/2.
inline double joint_probability(const ClassicalState& state,
                                std::span<const PartySettings> settings,
                                std::span<const int> inputs, std::span<const int> outcomes) {
    if (settings.size() != state.num_bits()) {
        throw ArgumentError("joint_probability: one setting per subsystem bit required");
    }
    const std::size_t n = state.num_bits();
    double total = 0.0;
    for (std::size_t bits = 0; bits < state.dim(); ++bits) {
        const double w = state[bits];
        if (w == 0.0) continue;
        double term = w;
        for (std::size_t k = 0; k < n; ++k) {
            detail::require_outcome(outcomes[k]);
            const int beta = static_cast<int>((bits >> (n - 1 - k)) & 1);
            const double cz = std::cos(settings[k].direction(inputs[k]).theta());
            const double sa = static_cast<double>(settings[k].sign(inputs[k]) * outcomes[k]);
            term *= 0.5 * (1.0 + sa * (beta ? -cz : cz));
        }
        total += term;
    }
    return detail::clamp_probability(total);
}

// Full outcome distribution for one input tuple, indexed big-endian over
// outcome indices with index bit 0 <-> outcome +1. Rotates each qubit into
// its measurement basis and reads computational probabilities, which is
// far cheaper than one trace per outcome tuple and agrees with it to
// roundoff (covered by tests).
inline std::vector<double> outcome_distribution(const StateVector& state,
                                                std::span<const PartySettings> settings,
                                                std::span<const int> inputs) {
    const std::size_t n = state.num_qubits();
    if (settings.size() != n || inputs.size() != n) {
        throw ArgumentError("outcome_distribution: arity mismatch");
    }
    StateVector rotated = state;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t t[] = {k};
        rotated = apply_unitary(rotated, measurement_basis_matrix(settings[k].direction(inputs[k])), t);
    }
    std::size_t flip_mask = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (settings[k].sign(inputs[k]) < 0) flip_mask |= std::size_t{1} << (n - 1 - k);
    }
    std::vector<double> dist(state.dim(), 0.0);
    for (std::size_t j = 0; j < state.dim(); ++j) {
        dist[j ^ flip_mask] = detail::clamp_probability(std::norm(rotated[j]));
    }
    return dist;
}

inline std::vector<double> outcome_distribution(const ClassicalState& state,
                                                std::span<const PartySettings> settings,
                                                std::span<const int> inputs) {
    const std::size_t n = state.num_bits();
    if (settings.size() != n || inputs.size() != n) {
        throw ArgumentError("outcome_distribution: arity mismatch");
    }
    std::vector<double> dist(state.dim(), 0.0);
    for (std::size_t bits = 0; bits < state.dim(); ++bits) {
        const double w = state[bits];
        if (w == 0.0) continue;
        for (std::size_t o = 0; o < state.dim(); ++o) {
            double term = w;
            for (std::size_t k = 0; k < n; ++k) {
                const int beta = static_cast<int>((bits >> (n - 1 - k)) & 1);
                const int a = ((o >> (n - 1 - k)) & 1) ? -1 : 1;
                const double cz = std::cos(settings[k].direction(inputs[k]).theta());
                const double sa = static_cast<double>(settings[k].sign(inputs[k]) * a);
                term *= 0.5 * (1.0 + sa * (beta ? -cz : cz));
            }
            dist[o] += term;
        }
    }
    for (double& p : dist) p = detail::clamp_probability(p);
    return dist;
}

inline std::vector<double> outcome_distribution(const DensityMatrix& rho,
                                                std::span<const PartySettings> settings,
                                                std::span<const int> inputs) {
    const std::size_t n = rho.num_qubits();
    if (settings.size() != n || inputs.size() != n) {
        throw ArgumentError("outcome_distribution: arity mismatch");
    }
    std::vector<double> dist(rho.dim());
    std::vector<int> outcomes(n);
    for (std::size_t o = 0; o < rho.dim(); ++o) {
        for (std::size_t k = 0; k < n; ++k) outcomes[k] = ((o >> (n - 1 - k)) & 1) ? -1 : 1;
        dist[o] = joint_probability(rho, settings, inputs, outcomes);
    }
    return dist;
}

// ---------------------------------------------------------------------------
// Closed forms for the bipartite oracles

// p(a,b|x,y) = (1/4){1 + ab[a1 b1 - (-1)^xy a2 b2 + (-1)^xy a3 b3]} for the
// entangled oracle state.
inline double closed_form_prob_quantum(int x, int y, int a, int b, const BlochDirection& dir_a,
                                       const BlochDirection& dir_b) {
    detail::require_bit(x, "closed_form_prob_quantum");
    detail::require_bit(y, "closed_form_prob_quantum");
    detail::require_outcome(a);
    detail::require_outcome(b);
    const auto av = dir_a.unit_vector();
    const auto bv = dir_b.unit_vector();
    const double sign_xy = (x & y) ? -1.0 : 1.0;
    const double corr = av[0] * bv[0] - sign_xy * av[1] * bv[1] + sign_xy * av[2] * bv[2];
    return detail::clamp_probability(0.25 * (1.0 + a * b * corr));
}

// p(a,b|x,y) = (1/4)[1 + (-1)^xy ab a3 b3] for the classically correlated
// oracle state; only the z components survive.
inline double closed_form_prob_classical(int x, int y, int a, int b, const BlochDirection& dir_a,
                                         const BlochDirection& dir_b) {
    detail::require_bit(x, "closed_form_prob_classical");
    detail::require_bit(y, "closed_form_prob_classical");
    detail::require_outcome(a);
    detail::require_outcome(b);
    const double sign_xy = (x & y) ? -1.0 : 1.0;
    const double corr = sign_xy * std::cos(dir_a.theta()) * std::cos(dir_b.theta());
    return detail::clamp_probability(0.25 * (1.0 + a * b * corr));
}

// Signed CHSH combination E00 + E01 + E10 - E11 for the quantum oracle with
// E(x,y) = s^a_x s^b_y [a1 b1 - (-1)^xy a2 b2 + (-1)^xy a3 b3].
inline double chsh_closed_form_quantum(const PartySettings& alice, const PartySettings& bob) {
    if (alice.num_inputs() != 2 || bob.num_inputs() != 2) {
        throw ArgumentError("chsh_closed_form_quantum: two inputs per party required");
    }
    auto corr = [&](int x, int y) {
        const auto av = alice.direction(x).unit_vector();
        const auto bv = bob.direction(y).unit_vector();
        const double sign_xy = (x & y) ? -1.0 : 1.0;
        const double e = av[0] * bv[0] - sign_xy * av[1] * bv[1] + sign_xy * av[2] * bv[2];
        return static_cast<double>(alice.sign(x) * bob.sign(y)) * e;
    };
    return corr(0, 0) + corr(0, 1) + corr(1, 0) - corr(1, 1);
}

// Shared polar angle sweep in the X-Z plane: S(lambda) = 2 + 2 cos^2 lambda.
inline double chsh_lambda_curve(double lambda) {
    if (!(lambda >= 0.0 && lambda <= kPi)) {
        throw ArgumentError("chsh_lambda_curve: lambda must lie in [0, pi]");
    }
    const double c = std::cos(lambda);
    return 2.0 + 2.0 * c * c;
}

// Classical oracle: S = (cos t0a + cos t1a)(cos t0b + cos t1b); no phi enters.
inline double chsh_closed_form_classical(double theta0_a, double theta1_a, double theta0_b,
                                         double theta1_b) {
    for (const double t : {theta0_a, theta1_a, theta0_b, theta1_b}) {
        if (!(t >= 0.0 && t <= kPi)) {
            throw ArgumentError("chsh_closed_form_classical: angles must lie in [0, pi]");
        }
    }
    return (std::cos(theta0_a) + std::cos(theta1_a)) * (std::cos(theta0_b) + std::cos(theta1_b));
}

}  // namespace nsbox
