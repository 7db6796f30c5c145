#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ringdeco/bath.hpp"
#include "ringdeco/error.hpp"

using namespace ringdeco;

TEST_SUITE("bath") {
    TEST_CASE("fixed-coupling influence values") {
        const BathSpec one = BathSpec::fixed({std::numbers::pi / 3});
        CHECK(std::abs(influence_fixed(one, 3, 0, 0) - 1.0) < 1e-15);
        CHECK(std::abs(influence_fixed(one, 3, 0, 1) - (-1.0)) < 1e-15);
        const BathSpec two = BathSpec::fixed({0.3, 0.4});
        CHECK(std::abs(influence_fixed(two, 3, 1, 0) - std::cos(0.3) * std::cos(0.4)) < 1e-15);
        CHECK(std::abs(influence_fixed(two, 3, 1, 0) - 0.87989) < 1e-4);
        CHECK(std::abs(influence_fixed(BathSpec::none(), 5, 3, -2) - 1.0) == 0.0);
    }

    TEST_CASE("polarised spins give a complex influence") {
        const BathSpec b = BathSpec::fixed({0.3, 0.5}, {0.4, -1.0});
        const cplx expected = cplx(std::cos(0.6), 0.4 * std::sin(0.6)) * cplx(std::cos(1.0), -std::sin(1.0));
        CHECK(std::abs(influence(b, 2) - expected) < 1e-15);
        // a fully polarised spin is a pure phase
        CHECK(std::abs(std::abs(influence(BathSpec::fixed({0.7}, {1.0}), 5)) - 1.0) < 1e-15);
    }

    TEST_CASE("Gaussian influence values") {
        CHECK(influence_gaussian(BathSpec::gaussian(0.02), 3, 0, 0) == 1.0);
        CHECK(influence_gaussian(BathSpec::gaussian(0.1), 3, 0, 1) == doctest::Approx(std::exp(-0.45)).epsilon(1e-15));
        CHECK(std::abs(influence_gaussian(BathSpec::gaussian(0.1), 3, 0, 1) - 0.63763) < 1e-5);
        const BathSpec strong = BathSpec::gaussian(100.0);
        for (int mu = -2; mu <= 2; ++mu) {
            for (int p = -2; p <= 2; ++p) {
                if (mu == 0 && p == 0) continue;
                CHECK(influence_gaussian(strong, 3, mu, p) < 1e-12);
            }
        }
    }

    TEST_CASE("the wrong variant is a type error") {
        CHECK_THROWS_AS(influence_fixed(BathSpec::gaussian(0.1), 3, 0, 1), TypeError);
        CHECK_THROWS_AS(influence_gaussian(BathSpec::fixed({0.1}), 3, 0, 1), TypeError);
        CHECK_THROWS_AS(topological_lambda(BathSpec::gaussian(0.1)), TypeError);
    }

    TEST_CASE("validation") {
        CHECK_THROWS_AS(BathSpec::gaussian(-0.1).validate(), ValidationError);
        CHECK_THROWS_AS(BathSpec::fixed({0.1, 0.2}, {0.5}).validate(), ValidationError);
        CHECK_THROWS_AS(BathSpec::fixed({0.1}, {1.5}).validate(), ValidationError);
        CHECK_THROWS_AS(BathSpec::fixed({std::nan("")}).validate(), ValidationError);
        CHECK(BathSpec::none().trivial());
        CHECK(BathSpec::gaussian(0.0).trivial());
        CHECK(BathSpec::fixed({0.0, 0.0}).trivial());
        CHECK_FALSE(BathSpec::fixed({0.1}).trivial());
    }

    TEST_CASE("topological lambda") {
        CHECK(topological_lambda(BathSpec::none()) == 0.0);
        CHECK(topological_lambda(BathSpec::fixed(std::vector<double>(50, 0.2))) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(topological_lambda(BathSpec::fixed({0.3, 0.4})) == doctest::Approx(0.125).epsilon(1e-14));
    }

    TEST_CASE("influence table") {
        const InfluenceTable flat = build_influence_table(BathSpec::gaussian(0.0), 4, 3, 5);
        for (int mu = -3; mu <= 3; ++mu) {
            for (int p = -5; p <= 5; ++p) CHECK(flat.at(mu, p) == cplx(1.0));
        }
        const BathSpec fixed = BathSpec::fixed({0.3, 0.4}, {0.2, 0.0});
        const BathSpec gauss = BathSpec::gaussian(topological_lambda(fixed));
        const InfluenceTable tf = build_influence_table(fixed, 3, 2, 4);
        const InfluenceTable tg = build_influence_table(gauss, 3, 2, 4);
        CHECK(tf.at(0, 0) == cplx(1.0));
        CHECK(tg.at(0, 0) == cplx(1.0));
        CHECK(std::abs(tf.at(1, 2) - tg.at(1, 2)) > 1e-6);
        for (int mu = -2; mu <= 2; ++mu) {
            for (int p = -4; p <= 4; ++p) {
                CHECK(tf.at(mu, p) == influence_fixed(fixed, 3, mu, p));
                CHECK(tg.at(mu, p) == cplx(influence_gaussian(gauss, 3, mu, p)));
            }
        }
        CHECK(tf.contains(2, -4));
        CHECK_FALSE(tf.contains(3, 0));
        CHECK_THROWS_AS(tf.at(0, 5), IndexError);
    }

    TEST_CASE("modulus, hermiticity and thermal reality") {
        const BathSpec specs[] = {BathSpec::fixed({0.3, 0.4, 1.7}), BathSpec::fixed({0.3, 0.9}, {0.8, -0.3}),
                                  BathSpec::gaussian(0.02), BathSpec::gaussian(3.0)};
        for (const BathSpec& b : specs) {
            for (long long w = -60; w <= 60; ++w) {
                const cplx f = influence(b, w);
                CHECK(std::abs(f) <= 1.0 + 1e-15);
                CHECK(std::abs(influence(b, -w) - std::conj(f)) < 1e-15);
            }
        }
        for (long long w = -60; w <= 60; ++w) CHECK(influence(specs[0], w).imag() == 0.0);
    }

    TEST_CASE("many weak spins approach the Gaussian ensemble") {
        const double a = 0.01;
        const int ns = 2000;
        const BathSpec spins = BathSpec::fixed(std::vector<double>(ns, a));
        // matched second moment: Gaussian variance a^2 per spin, lambda = N_s a^2
        const double lambda = ns * a * a;
        const double topological = topological_lambda(spins);
        CHECK(topological == doctest::Approx(lambda / 2).epsilon(1e-12));
        double worst = 0.0;
        for (int w = -20; w <= 20; ++w) {
            const double cosine = std::pow(std::cos(w * a), ns);
            CHECK(std::abs(influence(spins, w).real() - cosine) < 1e-12);
            worst = std::max(worst, std::abs(cosine - influence(BathSpec::gaussian(lambda), w).real()));
            worst = std::max(worst, std::abs(cosine - std::exp(-topological * w * w)));
        }
        CHECK(worst < 1e-4);
    }
}
