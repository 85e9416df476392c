#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "nsbox/prbases.hpp"
#include "test_support.hpp"

using namespace nsbox;

namespace {
const OracleSpec kQuantum = OracleSpec::bipartite(true);
const OracleSpec kClassical = OracleSpec::bipartite(false);
const PartySettings kZ = PartySettings::shared(BlochDirection::z_axis());
const PartySettings kX = PartySettings::shared(BlochDirection::x_axis());
}  // namespace

TEST_CASE("pr_basis_check reference cases") {
    SECTION("computational settings give PR on both oracles") {
        CHECK(pr_basis_check(kQuantum, kZ, kZ));
        CHECK(pr_basis_check(kClassical, kZ, kZ));
    }

    SECTION("circular settings give PR on the quantum oracle only") {
        const PartySettings alice = PartySettings::shared(BlochDirection(kPi / 2, kPi / 2));
        const PartySettings bob = PartySettings::shared(BlochDirection(kPi / 2, 3 * kPi / 2));
        CHECK(pr_basis_check(kQuantum, alice, bob));
        CHECK(!pr_basis_check(kClassical, alice, bob));
    }

    SECTION("diagonal settings are not a PR basis") {
        CHECK(!pr_basis_check(kQuantum, kX, kX));
    }
}

TEST_CASE("residuals") {
    SECTION("computational settings satisfy both conditions") {
        const PRResiduals r = residuals(kZ, kZ);
        CHECK(std::abs(r.r1) < 1e-15);
        CHECK(std::abs(r.r2) < 1e-15);
    }

    SECTION("novel member at k = pi/2 satisfies both conditions") {
        const auto [alice, bob] = PRBasisFamily::novel_member(kPi / 2);
        const PRResiduals r = residuals(alice, bob);
        CHECK(std::abs(r.r1) < 1e-15);
        CHECK(std::abs(r.r2) < 1e-15);
    }

    SECTION("diagonal settings violate the second condition by 2") {
        const PRResiduals r = residuals(kX, kX);
        CHECK(std::abs(r.r1) < 1e-15);
        CHECK(r.r2 == Catch::Approx(2.0));
    }
}

TEST_CASE("enumerate_pr_families") {
    SECTION("quantum oracle admits both families") {
        const auto families = enumerate_pr_families(kQuantum);
        REQUIRE(families.size() == 2);
        CHECK(families[0].kind == PRBasisFamily::Kind::Computational);
        CHECK(families[1].kind == PRBasisFamily::Kind::NovelQuantum);
    }

    SECTION("classical oracle admits the computational family only") {
        const auto families = enumerate_pr_families(kClassical);
        REQUIRE(families.size() == 1);
        CHECK(families[0].kind == PRBasisFamily::Kind::Computational);
    }

    SECTION("novel member at k = pi/4 passes the behavior check") {
        const auto [alice, bob] = PRBasisFamily::novel_member(kPi / 4);
        CHECK(pr_basis_check(kQuantum, alice, bob));
        const PRResiduals r = residuals(alice, bob);
        CHECK(std::abs(r.r1) < 1e-12);
        CHECK(std::abs(r.r2) < 1e-12);
    }

    SECTION("every sampled member scores the algebraic maximum") {
        SplitMix64 rng(0xfeedULL);
        for (const OracleSpec& spec : {kQuantum, kClassical}) {
            for (const auto& family : enumerate_pr_families(spec)) {
                for (int i = 0; i < 20; ++i) {
                    const auto [alice, bob] = family.sample_member(rng);
                    const PartySettings settings[] = {alice, bob};
                    const double s = chsh_score(behavior_from_oracle(spec, settings));
                    CHECK(std::abs(s - 4.0) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("analytic residuals agree with the behavior check on a shared-angle grid") {
    // theta in [0, pi] x phi_a, phi_b in [0, 2pi): 25 x 20 x 20 = 10^4 points
    const std::size_t nt = 25, np = 20;
    std::size_t pr_points_quantum = 0;
    std::size_t pr_points_classical = 0;
    for (std::size_t ti = 0; ti < nt; ++ti) {
        const double theta = kPi * static_cast<double>(ti) / static_cast<double>(nt - 1);
        for (std::size_t pa = 0; pa < np; ++pa) {
            const double phi_a = 2 * kPi * static_cast<double>(pa) / static_cast<double>(np);
            for (std::size_t pb = 0; pb < np; ++pb) {
                const double phi_b = 2 * kPi * static_cast<double>(pb) / static_cast<double>(np);
                const PartySettings alice = PartySettings::shared(BlochDirection(theta, phi_a));
                const PartySettings bob = PartySettings::shared(BlochDirection(theta, phi_b));
                const PRResiduals r = residuals(alice, bob);
                const bool analytic = std::abs(r.r1) < 1e-9 && std::abs(r.r2) < 1e-9;
                const bool behavioral = pr_basis_check(kQuantum, alice, bob);
                INFO("theta=" << theta << " phi_a=" << phi_a << " phi_b=" << phi_b);
                CHECK(analytic == behavioral);
                if (behavioral) ++pr_points_quantum;
                if (pr_basis_check(kClassical, alice, bob)) {
                    ++pr_points_classical;
                    // classical PR demands both directions on the same pole
                    CHECK(std::min(theta, kPi - theta) < 1e-12);
                }
            }
        }
    }
    // poles on both ends for every azimuth pair, plus both azimuth branches
    // of the novel line at every interior theta
    CHECK(pr_points_quantum == 2 * np * np + 2 * (nt - 2));
    CHECK(pr_points_classical == 2 * np * np);
}

TEST_CASE("grid-search kernel agrees with the behavior-level check") {
    SplitMix64 rng(424242);
    for (const OracleSpec& spec : {kQuantum, kClassical}) {
        const auto blocks = detail::cache_oracle_blocks(spec);
        for (int trial = 0; trial < 200; ++trial) {
            const double theta = kPi * rng.next_double();
            const double phi_a = 2 * kPi * rng.next_double();
            const double phi_b = 2 * kPi * rng.next_double();
            const PartySettings alice = PartySettings::shared(BlochDirection(theta, phi_a));
            const PartySettings bob = PartySettings::shared(BlochDirection(theta, phi_b));
            CHECK(detail::pr_point_check(blocks, theta, phi_a, phi_b, 1e-9) ==
                  pr_basis_check(spec, alice, bob, 1e-9));
        }
        // and on points where they must agree positively
        const auto [na, nb] = PRBasisFamily::novel_member(1.1);
        CHECK(detail::pr_point_check(blocks, 1.1, na.direction(0).phi(), nb.direction(0).phi(),
                                     1e-9) == spec.is_quantum());
    }
}

TEST_CASE("grid search rediscovers exactly the known families") {
    SECTION("quantum oracle") {
        const auto hits = pr_grid_search(kQuantum, 21, 20);
        CHECK(!hits.empty());
        std::size_t novel_hits = 0;
        for (const auto& h : hits) {
            CHECK(hit_on_known_family(h, true));
            CHECK(std::abs(h.r1) < 1e-9);
            CHECK(std::abs(h.r2) < 1e-9);
            if (std::min(h.theta, kPi - h.theta) > 1e-9) ++novel_hits;
        }
        // phi grid contains pi/2 and 3pi/2 at 20 points, so both azimuth
        // branches of the novel line show up at every interior theta
        CHECK(novel_hits == 2 * 19);
    }

    SECTION("classical oracle hits only the poles") {
        const auto hits = pr_grid_search(kClassical, 21, 20);
        CHECK(hits.size() == 2 * 20 * 20);
        for (const auto& h : hits) {
            CHECK(std::min(h.theta, kPi - h.theta) < 1e-12);
        }
    }

    SECTION("empty grid rejected") {
        CHECK_THROWS_AS(pr_grid_search(kQuantum, 1, 10), ArgumentError);
    }
}
