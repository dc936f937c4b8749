#include <doctest.h>

#include "topk/errors.hpp"
#include "topk/potential.hpp"
#include "topk/testkit.hpp"

#include <cmath>

using namespace topk;

namespace {

PotentialSpec hinge(double gamma, int n, std::size_t m) { return {LossKind::Hinge, gamma, n, m}; }

// Phi^n(s) from the pair sum of lambda_exact.
double phi_reference(double gamma, int n, std::span<const double> s, const RelevanceSet& r) {
    double total = 0.0;
    for (Label a : r.members()) {
        for (Label b : r.complement()) total += lambda_exact(hinge(gamma, n, s.size()), s[a], s[b]);
    }
    return total;
}

}  // namespace

TEST_CASE("BiasedUniform") {
    RelevanceSet fav(5);
    fav.insert(1);
    fav.insert(4);
    const BiasedUniform u(5, 0.2, fav);
    CHECK(u.prob(1) == doctest::Approx(0.6 / 5 + 0.2));
    CHECK(u.prob(0) == doctest::Approx(0.6 / 5));
    double total = 0.0;
    for (double p : u.probs()) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    RelevanceSet many(5);
    for (Label l = 0; l < 5; ++l) many.insert(l);
    CHECK_THROWS_AS(BiasedUniform(5, 0.3, many), ContractViolation);
}

TEST_CASE("lambda_exact small cases") {
    CHECK(lambda_exact(hinge(0.3, 0, 4), 0.2, 0.7) == hinge_atom(0.2, 0.7));
    // p = 0.75, q = 0.25: 0.75 * f(1, 0) + 0.25 * f(0, 1) = 0.25 * 2
    CHECK(lambda_exact(hinge(0.5, 1, 2), 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(lambda_exact(hinge(0.5, -1, 2), 0.0, 0.0), ContractViolation);
    CHECK_THROWS_AS(lambda_exact({LossKind::Rank, 0.5, 1, 2}, 0.0, 0.0), ContractViolation);
}

TEST_CASE("lambda_exact agrees with the memoized recursion and the evaluator") {
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + rng.below(12);
        const double gamma = 0.05 + 0.9 * rng.uniform();
        const int n = static_cast<int>(rng.below(25));
        const double sa = 4.0 * rng.uniform() - 2.0, sb = 4.0 * rng.uniform() - 2.0;
        for (auto kind : {LossKind::Hinge, LossKind::Logistic}) {
            const double exact = lambda_exact({kind, gamma, n, m}, sa, sb);
            const double rec = testkit::lambda_recursive(kind, gamma, m, n, sa, sb);
            CHECK(std::abs(exact - rec) <= 1e-12 * std::max(1.0, rec));
            PotentialEvaluator ev(kind, gamma, m);
            CHECK(std::abs(ev.lambda(n, sa, sb) - rec) <= 1e-12 * std::max(1.0, rec));
            CHECK(exact >= 0.0);
        }
    }
}

TEST_CASE("lambda one-step recurrence") {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + rng.below(10);
        const double gamma = 0.1 * (1 + rng.below(5));
        const int n = 1 + static_cast<int>(rng.below(30));
        const double sa = 3.0 * rng.uniform(), sb = 3.0 * rng.uniform();
        const double p = (1 - gamma) / m + gamma, q = (1 - gamma) / m;
        const auto spec = hinge(gamma, n, m), prev = hinge(gamma, n - 1, m);
        const double rhs = p * lambda_exact(prev, sa + 1, sb) + q * lambda_exact(prev, sa, sb + 1) +
                           (1 - p - q) * lambda_exact(prev, sa, sb);
        CHECK(std::abs(lambda_exact(spec, sa, sb) - rhs) <= 1e-12 * std::max(1.0, rhs));
    }
}

TEST_CASE("lambda is proper on integer grids") {
    for (std::size_t m : {2u, 5u, 14u}) {
        for (double gamma : {0.1, 0.3}) {
            for (int n : {0, 3, 10}) {
                for (int sa = -3; sa <= 3; ++sa) {
                    for (int sb = -3; sb <= 3; ++sb) {
                        const double here = lambda_exact(hinge(gamma, n, m), sa, sb);
                        CHECK(lambda_exact(hinge(gamma, n, m), sa + 1, sb) <= here + 1e-15);
                        CHECK(lambda_exact(hinge(gamma, n, m), sa, sb + 1) >= here - 1e-15);
                    }
                }
            }
        }
    }
}

TEST_CASE("lambda matches Monte Carlo walks") {
    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t m = 2 + rng.below(4);
        const int n = 1 + static_cast<int>(rng.below(6));
        const double gamma = 0.1 * (1 + rng.below(5));
        const double sa = rng.uniform(), sb = rng.uniform();
        const auto mc = testkit::lambda_monte_carlo(LossKind::Hinge, gamma, m, n, sa, sb, 200000, rng);
        CHECK(std::abs(mc.mean - lambda_exact(hinge(gamma, n, m), sa, sb)) <= 3 * mc.std_error);
    }
}

TEST_CASE("upsilon_bruteforce") {
    Rng rng(4);
    const auto s = testkit::random_scores(4, rng);
    RelevanceSet r(4);
    r.insert(2);
    CHECK(upsilon_bruteforce(LossKind::Hinge, r, 0.2, 0, s) == doctest::Approx(loss(LossKind::Hinge, s, r)));
    // a single relevant label makes u^gamma_R the pairwise walk
    for (int n = 0; n <= 5; ++n) {
        CHECK(upsilon_bruteforce(LossKind::Hinge, r, 0.2, n, s) ==
              doctest::Approx(phi_reference(0.2, n, s, r)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(upsilon_bruteforce(LossKind::Hinge, RelevanceSet(7), 0.1, 2, std::vector<double>(7, 0.0)),
                    ScaleGuardError);
    CHECK_THROWS_AS(upsilon_bruteforce(LossKind::Hinge, r, 0.1, 7, s), ScaleGuardError);
}

TEST_CASE("ground-truth potential never exceeds the surrogate") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 2 + rng.below(4);
        const int n = static_cast<int>(rng.below(6));
        const auto r = testkit::random_relevance(m, rng);
        const double gamma = 0.1 * (1 + rng.below(5));
        if (gamma * static_cast<double>(r.size()) > 1.0) continue;
        const auto s = testkit::random_scores(m, rng);
        const double ups = upsilon_bruteforce(LossKind::Hinge, r, gamma, n, s);
        CHECK(phi_reference(gamma, n, s, r) - ups >= -1e-12);
    }
}

TEST_CASE("phi_hat") {
    const std::vector<double> s{0.3, -0.4, 1.1, 0.2, 0.0};
    RelevanceSet truth(5);
    truth.insert(0);
    truth.insert(3);
    const RandomizationScheme scheme{SchemeKind::Uniform, 0.2, 3, false};
    const auto base = Ranking(std::vector<Label>{0, 1, 2, 3, 4});
    const PairWeightTable table(scheme, base, base);
    const auto fb = testkit::feedback_for(base, 3, truth);
    PotentialEvaluator ev(LossKind::Hinge, 0.2, 5);
    CHECK(ev.phi_hat(0, s, table, fb) == doctest::Approx(estimate_loss(LossKind::Hinge, s, table, fb)).epsilon(1e-14));

    RelevanceSet none(5);
    CHECK(ev.phi_hat(4, s, table, testkit::feedback_for(base, 3, none)) == 0.0);

    // expectation over every outcome equals the full pair sum
    const auto e = testkit::enumerate_outcomes(scheme, base);
    for (int n : {1, 4, 9}) {
        const double expected = testkit::expected_estimator(e, [&](const testkit::Outcome& o) {
            return ev.phi_hat(n, s, PairWeightTable(scheme, base, o.ranking), testkit::feedback_for(o.ranking, 3, truth));
        });
        CHECK(std::abs(expected - phi_reference(0.2, n, s, truth)) <= 1e-10);
        CHECK(ev.phi(n, s, truth) == doctest::Approx(phi_reference(0.2, n, s, truth)).epsilon(1e-12));
    }
}

TEST_CASE("bbm_cost_vector") {
    const std::size_t m = 5;
    const std::vector<double> s{0.3, -0.4, 1.1, 0.2, 0.0};
    const RandomizationScheme scheme{SchemeKind::Uniform, 0.2, 3, false};
    const auto base = Ranking::identity(m);

    RelevanceSet none(m);
    const PairWeightTable table(scheme, base, base);
    const auto zero = bbm_cost_vector(hinge(0.2, 3, m), s, table, testkit::feedback_for(base, 3, none));
    for (double c : zero) CHECK(c == 0.0);

    RelevanceSet truth(m);
    truth.insert(1);
    const auto fb = testkit::feedback_for(base, 3, truth);
    const auto cost = bbm_cost_vector(hinge(0.2, 3, m), s, table, fb);
    // revealed pairs: (2,1) and (2,3); labels 4 and 5 are inert
    CHECK(cost[3] == cost[4]);
    for (Label l = 0; l < m; ++l) {
        auto shifted = s;
        shifted[l] += 1.0;
        CHECK(cost[l] == doctest::Approx(phi_hat(hinge(0.2, 3, m), shifted, table, fb)).epsilon(1e-13));
        CHECK(cost[l] >= 0.0);
    }
}

TEST_CASE("bbm cost ordering under full information") {
    // Pair level: moving a up can only help, moving b up can only hurt.
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const double sa = 2.0 * rng.uniform() - 1.0, sb = 2.0 * rng.uniform() - 1.0;
        const auto spec = hinge(0.3, 4, 4);
        const double inert = lambda_exact(spec, sa, sb);
        CHECK(lambda_exact(spec, sa + 1, sb) <= inert);
        CHECK(inert <= lambda_exact(spec, sa, sb + 1));
    }
    // Whole vector, k = m: relevant labels cost no more than staying put,
    // irrelevant ones no less.
    const std::size_t m = 4;
    const RandomizationScheme scheme{SchemeKind::Uniform, 0.0, m, false};
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = testkit::random_scores(m, rng);
        const auto truth = testkit::random_relevance(m, rng);
        PotentialEvaluator ev(LossKind::Hinge, 0.3, m);
        const double stay = ev.phi(4, s, truth);
        const auto base = rank_of_scores(s);
        const auto cost =
            ev.cost_vector(4, s, PairWeightTable(scheme, base, base), testkit::feedback_for(base, m, truth));
        for (Label l = 0; l < m; ++l) {
            if (truth.contains(l)) {
                CHECK(cost[l] <= stay + 1e-12);
            } else {
                CHECK(cost[l] >= stay - 1e-12);
            }
        }
    }
}

TEST_CASE("potential at zero stays under its bound") {
    for (std::size_t m : {4u, 6u, 14u}) {
        for (double gamma : {0.1, 0.2, 0.3, 0.4, 0.5}) {
            PotentialEvaluator ev(LossKind::Hinge, gamma, m);
            const std::vector<double> zero(m, 0.0);
            RelevanceSet half(m);
            for (Label l = 0; l < m / 2; ++l) half.insert(l);
            for (int n = 0; n <= 30; ++n) {
                CHECK(ev.phi(n, zero, half) <= testkit::potential_zero_bound(n, m, gamma));
            }
        }
    }
}
