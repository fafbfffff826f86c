#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "ergphase/errors.hpp"
#include "ergphase/model.hpp"

using Catch::Matchers::WithinAbs;
using namespace ergphase;

TEST_CASE("exponent pair validation and diagnostics", "[model]") {
    const ModelSpec s = validate_spec(3, 5);
    CHECK(s.p == 3);
    CHECK(s.q == 5);
    CHECK(s.ordered);
    CHECK_THAT(s.discriminant, WithinAbs(-39.0, 1e-12));
    CHECK_THAT(s.q_interval_low, WithinAbs(8.0 - 4.0 * std::sqrt(3.0), 1e-12));
    CHECK_THAT(s.q_interval_high, WithinAbs(8.0 + 4.0 * std::sqrt(3.0), 1e-12));

    CHECK_THROWS_AS(validate_spec(1, 3), DomainError);
    CHECK_THROWS_AS(validate_spec(3, 2), DomainError);
    CHECK_THROWS_AS(validate_spec(3, 3), DegenerateModel);
    CHECK_THROWS_AS(validate_spec(2, 10), AssumptionViolation);
    CHECK_NOTHROW(validate_spec(2, 9));   // q = 5p - 1 sits exactly on the boundary
    CHECK_NOTHROW(validate_spec(3, 14));

    try {
        validate_spec(3, 3);
        FAIL("expected DegenerateModel");
    } catch (const Error& e) {
        CHECK(e.kind() == "DegenerateModel");
        CHECK(e.exit_code() == 3);
    }
}

TEST_CASE("evaluation-only specs allow reversed exponents", "[model]") {
    const ModelSpec r = calculus_spec(5, 3);
    CHECK(r.p == 5);
    CHECK(r.q == 3);
    CHECK_FALSE(r.ordered);
    CHECK_FALSE(calculus_spec(2, 2).ordered);
    CHECK_THROWS_AS(calculus_spec(1, 3), DomainError);
    CHECK_THROWS_AS(calculus_spec(3, 1), DomainError);
}

TEST_CASE("objective matches frozen values at an interior point", "[model]") {
    const ModelSpec spec = validate_spec(3, 5);
    const BetaPoint beta{2.0, -4.0, 2.0};
    CHECK_THAT(objective(0.3, beta, spec, 0), WithinAbs(0.8022921510274467315, 1e-12));
    CHECK_THAT(objective(0.3, beta, spec, 1), WithinAbs(1.424648930193601807, 1e-12));
    CHECK_THAT(objective(0.3, beta, spec, 2), WithinAbs(-8.500952380952380952, 1e-12));
    CHECK_THAT(objective(0.3, beta, spec, 3), WithinAbs(-8.664852607709750567, 1e-11));
}

TEST_CASE("objective endpoint conventions", "[model]") {
    const ModelSpec spec = validate_spec(3, 5);
    const BetaPoint beta{0.4, 0.25, 0.125};
    const double inf = std::numeric_limits<double>::infinity();

    CHECK(objective(0.0, beta, spec, 0) == 0.0);
    CHECK(objective(0.0, beta, spec, 1) == inf);
    CHECK(objective(0.0, beta, spec, 2) == -inf);
    CHECK(objective(0.0, beta, spec, 3) == inf);

    CHECK_THAT(objective(1.0, beta, spec, 0),
               WithinAbs(beta.beta1 + beta.beta2 + beta.beta3, 1e-15));
    CHECK(objective(1.0, beta, spec, 1) == -inf);
    CHECK(objective(1.0, beta, spec, 2) == -inf);
    CHECK(objective(1.0, beta, spec, 3) == -inf);
}

TEST_CASE("objective rejects out-of-domain arguments", "[model]") {
    const ModelSpec spec = validate_spec(3, 5);
    const BetaPoint beta{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(objective(-0.1, beta, spec, 0), DomainError);
    CHECK_THROWS_AS(objective(1.1, beta, spec, 0), DomainError);
    CHECK_THROWS_AS(objective(std::nan(""), beta, spec, 0), DomainError);
    CHECK_THROWS_AS(objective(0.5, beta, spec, 4), DomainError);
    CHECK_THROWS_AS(objective(0.5, beta, spec, -1), DomainError);
    CHECK_THROWS_AS(objective(0.5, {std::nan(""), 0.0, 0.0}, spec, 0), DomainError);
}

TEST_CASE("derivatives agree with central differences", "[model]") {
    const ModelSpec spec = validate_spec(3, 5);
    std::mt19937_64 rng(414243);
    std::uniform_real_distribution<double> u_dist(0.05, 0.95);
    std::uniform_real_distribution<double> b_dist(-3.0, 3.0);
    const double h = 1e-6;

    for (int trial = 0; trial < 300; ++trial) {
        const double u = u_dist(rng);
        const BetaPoint beta{b_dist(rng), b_dist(rng), b_dist(rng)};
        for (int order = 1; order <= 3; ++order) {
            const double fd = (objective(u + h, beta, spec, order - 1) -
                               objective(u - h, beta, spec, order - 1)) /
                              (2.0 * h);
            const double exact = objective(u, beta, spec, order);
            REQUIRE_THAT(fd, WithinAbs(exact, 1e-5 * (1.0 + std::fabs(exact))));
        }
    }
}

TEST_CASE("interaction terms commute under exponent exchange", "[model]") {
    const ModelSpec fwd = calculus_spec(3, 5);
    const ModelSpec rev = calculus_spec(5, 3);
    std::mt19937_64 rng(5151);
    std::uniform_real_distribution<double> u_dist(0.01, 0.99);
    std::uniform_real_distribution<double> b_dist(-4.0, 4.0);

    for (int trial = 0; trial < 100; ++trial) {
        const double u = u_dist(rng);
        const double b1 = b_dist(rng), b2 = b_dist(rng), b3 = b_dist(rng);
        for (int order = 0; order <= 3; ++order) {
            const double a = objective(u, {b1, b2, b3}, fwd, order);
            const double b = objective(u, {b1, b3, b2}, rev, order);
            REQUIRE(a == b);  // identical accumulation order, bit for bit
        }
    }
}

TEST_CASE("maximizer structure across the coexistence interval", "[model]") {
    const ModelSpec spec = validate_spec(3, 5);

    // Interval in beta2 at beta1 = 2, beta3 = 2 is about (-3.2292, -2.7057);
    // outside it the objective has one local maximizer, inside two.
    const MaximizerSet far_low = find_maximizers({2.0, -4.0, 2.0}, spec);
    REQUIRE(far_low.locals.size() == 1);
    REQUIRE(far_low.globals.size() == 1);
    CHECK_THAT(far_low.locals[0].u, WithinAbs(0.45876831405323235404, 1e-10));
    CHECK_THAT(far_low.locals[0].value, WithinAbs(0.91682742334034294652, 1e-12));
    CHECK(far_low.locals[0].second_derivative < 0.0);

    const MaximizerSet just_below = find_maximizers({2.0, -3.24, 2.0}, spec);
    REQUIRE(just_below.locals.size() == 1);
    CHECK_THAT(just_below.locals[0].u, WithinAbs(0.52978416045074621771, 1e-10));
    CHECK_THAT(just_below.locals[0].value, WithinAbs(1.0069508161843759563, 1e-12));

    const MaximizerSet inside = find_maximizers({2.0, -3.1, 2.0}, spec);
    REQUIRE(inside.locals.size() == 2);
    CHECK(inside.locals[0].u < inside.locals[1].u);

    const MaximizerSet low_global = find_maximizers({2.0, -2.95, 2.0}, spec);
    REQUIRE(low_global.locals.size() == 2);
    REQUIRE(low_global.globals.size() == 1);
    CHECK(low_global.globals.front() == 0);
    CHECK_THAT(low_global.locals[0].u, WithinAbs(0.57848194466877384095, 1e-10));

    const MaximizerSet just_above = find_maximizers({2.0, -2.7, 2.0}, spec);
    REQUIRE(just_above.locals.size() == 1);
    CHECK_THAT(just_above.locals[0].u, WithinAbs(0.9995822174738634862, 1e-10));

    const MaximizerSet far_high = find_maximizers({2.0, -2.5, 2.0}, spec);
    REQUIRE(far_high.locals.size() == 1);
    CHECK_THAT(far_high.locals[0].u, WithinAbs(0.99987583728730082111, 1e-10));

    CHECK_THROWS_AS(find_maximizers({std::nan(""), 0.0, 0.0}, spec), DomainError);
}

TEST_CASE("tied maximizers at the transition value", "[model]") {
    const ModelSpec spec = validate_spec(3, 5);
    const MaximizerSet tied = find_maximizers({2.0, -2.9438937606636477259, 2.0}, spec);
    REQUIRE(tied.locals.size() == 2);
    CHECK(tied.globals.size() == 2);
    CHECK(std::fabs(tied.locals[0].value - tied.locals[1].value) < 1e-9);
    for (const LocalMaximizer& lm : tied.locals) CHECK(lm.second_derivative <= 0.0);
}

TEST_CASE("free energy at frozen couplings", "[model]") {
    const ModelSpec spec = validate_spec(3, 5);

    const FreeEnergyResult origin = free_energy({0.0, 0.0, 0.0}, spec);
    CHECK_THAT(origin.psi, WithinAbs(0.5 * std::log(2.0), 1e-13));
    CHECK_THAT(origin.maximizers.locals[origin.maximizers.globals.front()].u,
               WithinAbs(0.5, 1e-11));

    const FreeEnergyResult a = free_energy({0.2, 0.1, 0.1}, spec);
    CHECK_THAT(a.psi, WithinAbs(0.497269658448972938, 1e-13));
    CHECK_THAT(a.maximizers.locals[a.maximizers.globals.front()].u,
               WithinAbs(0.7334352361338645681, 1e-11));

    const FreeEnergyResult b = free_energy({0.5, 0.1, 0.1}, spec);
    CHECK_THAT(b.psi, WithinAbs(0.74460075829223999633, 1e-13));
    CHECK_THAT(b.maximizers.locals[b.maximizers.globals.front()].u,
               WithinAbs(0.89186772552644100608, 1e-11));

    const FreeEnergyResult c = free_energy({1.0, 0.0, 0.0}, spec);
    CHECK_THAT(c.psi, WithinAbs(1.0634640055214862482, 1e-13));
    CHECK_THAT(c.maximizers.locals[c.maximizers.globals.front()].u,
               WithinAbs(0.88079707797788244406, 1e-11));
}

TEST_CASE("free energy requires nonnegative interaction couplings", "[model]") {
    const ModelSpec spec = validate_spec(3, 5);
    CHECK_THROWS_AS(free_energy({0.0, -1.0, 0.0}, spec), HypothesisViolation);
    CHECK_THROWS_AS(free_energy({0.0, 0.0, -0.5}, spec), HypothesisViolation);
    try {
        free_energy({0.0, -1.0, 0.0}, spec);
        FAIL("expected HypothesisViolation");
    } catch (const Error& e) {
        CHECK(e.kind() == "HypothesisViolation");
        CHECK(e.exit_code() == 3);
    }
}

TEST_CASE("pure edge model reduces to the logistic curve", "[model]") {
    const ModelSpec spec = validate_spec(3, 5);
    for (int i = 0; i <= 20; ++i) {
        const double b1 = -5.0 + 0.5 * i;
        const FreeEnergyResult res = free_energy({b1, 0.0, 0.0}, spec);
        const double u = res.maximizers.locals[res.maximizers.globals.front()].u;
        REQUIRE_THAT(u, WithinAbs(1.0 / (1.0 + std::exp(-2.0 * b1)), 1e-10));
    }
}

TEST_CASE("reported supremum dominates a fine grid", "[model]") {
    const ModelSpec spec = validate_spec(3, 5);
    std::mt19937_64 rng(909090);
    std::uniform_real_distribution<double> b1_dist(-1.0, 0.5);
    std::uniform_real_distribution<double> b23_dist(0.0, 0.5);

    for (int trial = 0; trial < 20; ++trial) {
        const BetaPoint beta{b1_dist(rng), b23_dist(rng), b23_dist(rng)};
        const double psi = free_energy(beta, spec).psi;
        double sup = -std::numeric_limits<double>::infinity();
        const int grid = 100000;
        for (int i = 0; i <= grid; ++i)
            sup = std::max(sup, objective(double(i) / grid, beta, spec, 0));
        REQUIRE(psi >= sup - 1e-12);
        REQUIRE(psi - sup <= 1e-8);
    }
}
