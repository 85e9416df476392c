#pragma once

// Isotropic (Werner-type) visibility noise. Mixing with the maximally mixed
// state rescales every correlator by v, so CHSH scores obey S(v) = v * S(1);
// fitting a visibility to a measured score is a ratio.

#include "nsbox/behavior.hpp"
#include "nsbox/errors.hpp"
#include "nsbox/linalg.hpp"
#include "nsbox/measurement.hpp"

namespace nsbox {

struct VisibilityModel {
    double v = 1.0;

    explicit VisibilityModel(double visibility) : v(visibility) {
        if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("VisibilityModel: v must lie in [0,1]");
    }
};

// v*rho + (1-v)*I/4 on a two-qubit state.
inline DensityMatrix apply_visibility(const DensityMatrix& rho, double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("apply_visibility: v must lie in [0,1]");
    if (rho.num_qubits() != 2) throw ArgumentError("apply_visibility: two-qubit state required");
    Matrix m = Cplx(v, 0.0) * rho.matrix() + Cplx((1.0 - v) / 4.0, 0.0) * Matrix::identity(4);
    return DensityMatrix(2, std::move(m));
}

inline DensityMatrix apply_visibility(const DensityMatrix& rho, const VisibilityModel& model) {
    return apply_visibility(rho, model.v);
}

// Visibility reproducing target_S given the ideal score, exact because the
// noise law is linear in v.
inline double fit_visibility(double target_s, double ideal_s) {
    if (!(target_s > 0.0) || !(ideal_s > 0.0) || target_s > ideal_s) {
        throw ArgumentError("fit_visibility: need 0 < target_S <= ideal_S");
    }
    return target_s / ideal_s;
}

// Bipartite oracle behavior with visibility noise applied to each
// input-conditioned state before measurement.
inline Behavior noisy_oracle_behavior(const OracleSpec& spec,
                                      std::span<const PartySettings> settings, double v) {
    if (spec.parties() != 2) throw ArgumentError("noisy_oracle_behavior: bipartite oracle required");
    if (settings.size() != 2) throw ArgumentError("noisy_oracle_behavior: two settings required");

    std::vector<double> table(16);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const int in_bits[] = {x, y};
            const OracleOutput out = run_oracle(spec, in_bits);
            DensityMatrix rho =
                std::holds_alternative<StateVector>(out)
                    ? DensityMatrix::from_pure(std::get<StateVector>(out))
                    : DensityMatrix(2, [&] {
                          const auto& cs = std::get<ClassicalState>(out);
                          Matrix m(4, 4);
                          for (std::size_t i = 0; i < 4; ++i) m(i, i) = Cplx(cs[i], 0.0);
                          return m;
                      }());
            rho = apply_visibility(rho, v);
            const std::vector<double> dist = outcome_distribution(rho, settings, in_bits);
            for (std::size_t o = 0; o < 4; ++o) {
                table[static_cast<std::size_t>((x * 2 + y) * 4) + o] = dist[o];
            }
        }
    }
    return Behavior({2, 2}, {2, 2}, std::move(table));
}

// Same, for a fixed shared two-qubit state.
inline Behavior noisy_state_behavior(const DensityMatrix& rho,
                                     std::span<const PartySettings> settings, double v) {
    const DensityMatrix noisy = apply_visibility(rho, v);
    return behavior_from_state(noisy, settings);
}

}  // namespace nsbox
