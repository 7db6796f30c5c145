#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ringdeco/error.hpp"
#include "ringdeco/ring.hpp"
#include "ringdeco/wavepacket.hpp"
#include "support.hpp"

using namespace ringdeco;

namespace {

constexpr double kPi = std::numbers::pi;

double fourier_amplitude(const Eigen::VectorXd& p, double q) {
    cplx acc = 0.0;
    for (int j = 0; j < p.size(); ++j) acc += p(j) * std::polar(1.0, q * j);
    return std::abs(acc);
}

}  // namespace

TEST_SUITE("wavepacket") {
    TEST_CASE("state normalisation and validation") {
        const InitialState s = build_state({100, 4.0, 50, kPi / 2, true});
        CHECK(std::abs(s.sites.norm() - 1.0) < 1e-12);
        CHECK(std::abs(s.momentum.norm() - 1.0) < 1e-12);
        CHECK_THROWS_AS(build_state({100, 0.0, 50, kPi / 2, true}), ValidationError);
        CHECK_THROWS_AS(build_state({100, 4.0, 100, kPi / 2, true}), ValidationError);
        CHECK_THROWS_AS(build_state({2, 4.0, 0, kPi / 2, true}), ValidationError);
        CHECK_THROWS_AS(prob_wavepacket_free({50, 1.0, 0.0}, {100, 4.0, 50, kPi / 2, true}, 0, 1.0), ValidationError);
    }

    TEST_CASE("momentum amplitudes are consistent with the site amplitudes") {
        const InitialState s = build_state({24, 3.0, 7, 1.1, true});
        const Eigen::MatrixXcd f = momentum_basis(24);
        CHECK(testsupport::max_diff(f * s.momentum, s.sites) < 1e-14);
    }

    TEST_CASE("a very wide packet approaches a momentum eigenstate") {
        const WavepacketSpec spec{40, 5000.0, 0, 1.0, false};
        const Eigen::VectorXd occ = momentum_occupations(build_state(spec).density());
        int best = 0;
        for (int n = 0; n < 40; ++n) {
            if (std::abs(2 * kPi * n / 40 - 1.0) < std::abs(2 * kPi * best / 40 - 1.0)) best = n;
        }
        CHECK(occ(best) > 1.0 - 1e-6);
    }

    TEST_CASE("the two packets are mirror images in momentum") {
        WavepacketSpec first{30, 6.0, 0, 1.2, false};
        const Eigen::VectorXd w = packet_weights(first);
        const InitialState both = build_state({30, 6.0, 0, 1.2, true});
        const Eigen::VectorXd occ = both.momentum.cwiseAbs2();
        for (int n = 1; n < 30; ++n) CHECK(std::abs(occ(n) - occ(30 - n)) < 1e-15);
        // with both packets at site 0 each momentum carries g_n + g_{N-n}
        for (int n = 1; n < 30; ++n) CHECK(w(n) >= 0.0);
    }

    TEST_CASE("at t = 0 the probability sits near site 0 and the offset") {
        const Eigen::VectorXd p = probs_wavepacket_free({100, 1.0, 0.0}, {100, 4.0, 50, kPi / 2, true}, 0.0);
        double near = 0.0;
        for (int d = -8; d <= 8; ++d) near += p(wrap_site(d, 100)) + p(wrap_site(50 + d, 100));
        CHECK(near > 0.999);
        CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    }

    TEST_CASE("free probabilities equal the density-matrix evolution") {
        const RingConfig cfg{30, 1.0, 0.8};
        const WavepacketSpec spec{30, 4.0, 15, kPi / 2, true};
        const DensityMatrix rho_in = build_state(spec).density();
        for (double t : {0.0, 2.5, 9.0}) {
            const Eigen::VectorXd p = probs_wavepacket_free(cfg, spec, t);
            CHECK(std::abs(p.sum() - 1.0) < 1e-12);
            const DensityMatrix rho = density_free(cfg, rho_in, TimeGrid{{t}})[0];
            CHECK((p - rho.diagonal()).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(std::abs(prob_wavepacket_free(cfg, spec, 3, t) - p(3)) < 1e-15);
        }
    }

    TEST_CASE("an empty bath gives the free result") {
        const RingConfig cfg{40, 1.0, 1.7};
        const WavepacketSpec spec{40, 4.0, 20, kPi / 2, true};
        for (double t : {1.0, 6.0}) {
            const Eigen::VectorXd free = probs_wavepacket_free(cfg, spec, t);
            CHECK((probs_wavepacket_decohered(cfg, BathSpec::none(), spec, t) - free).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((probs_wavepacket_decohered(cfg, BathSpec::gaussian(0.0), spec, t) - free).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    TEST_CASE("pair-sum and propagator routes agree") {
        WavepacketOptions via_prop;
        via_prop.use_propagator = true;
        const BathSpec baths[] = {BathSpec::gaussian(0.1), BathSpec::gaussian(1.5), BathSpec::fixed({0.2, 0.1}, {0.4, 0.0})};
        for (int n : {12, 20, 40}) {
            const RingConfig cfg{n, 1.0, 0.9};
            const WavepacketSpec spec{n, 4.0, n / 2, kPi / 2, true};
            for (const BathSpec& b : baths) {
                for (double t : {0.7, 5.0}) {
                    const Eigen::VectorXd a = probs_wavepacket_decohered(cfg, b, spec, t);
                    const Eigen::VectorXd c = probs_wavepacket_decohered(cfg, b, spec, t, via_prop);
                    CHECK((a - c).cwiseAbs().maxCoeff() < 1e-10);
                    CHECK(std::abs(a.sum() - 1.0) < 1e-10);
                }
            }
        }
    }

    TEST_CASE("strong decoherence removes the flux dependence") {
        const WavepacketSpec spec{40, 4.0, 20, kPi / 2, true};
        const BathSpec bath = BathSpec::gaussian(40.0);
        for (double t : {2.0, 5.0, 10.0}) {
            const Eigen::VectorXd base = probs_wavepacket_decohered({40, 1.0, 0.0}, bath, spec, t);
            for (double flux : {0.5, 1.9, 3.0}) {
                const Eigen::VectorXd p = probs_wavepacket_decohered({40, 1.0, flux}, bath, spec, t);
                CHECK((p - base).cwiseAbs().maxCoeff() < 1e-6);
            }
        }
    }

    TEST_CASE("momentum occupations are conserved under decoherence") {
        const RingConfig cfg{16, 1.0, 0.6};
        const WavepacketSpec spec{16, 3.0, 8, kPi / 2, true};
        const DensityMatrix rho_in = build_state(spec).density();
        const Eigen::VectorXd occ0 = momentum_occupations(rho_in);
        for (double lambda : {0.05, 5.0}) {
            const auto series = density_reduced(cfg, BathSpec::gaussian(lambda), rho_in, TimeGrid::uniform(12.0, 6));
            for (const DensityMatrix& r : series) CHECK((momentum_occupations(r) - occ0).cwiseAbs().maxCoeff() < 1e-9);
        }
    }

    TEST_CASE("group velocity and crossing times") {
        const RingConfig cfg{100, 1.0, 0.0};
        CHECK(group_velocity(cfg, kPi / 2) == doctest::Approx(2.0));
        CHECK(group_velocity({100, 1.0, 100 * kPi / 2}, kPi / 2) == doctest::Approx(0.0).epsilon(1e-12));
        const WavepacketSpec spec{100, 4.0, 50, kPi / 2, true};
        const std::vector<double> times = crossing_times(cfg, spec, 40.0);
        REQUIRE(times.size() == 2);
        CHECK(times[0] == doctest::Approx(12.5));
        CHECK(times[1] == doctest::Approx(37.5));
        CHECK(crossing_times({100, 1.0, 100 * kPi / 2}, spec, 40.0).empty());
    }

    TEST_CASE("packets meet at the predicted crossing time") {
        const RingConfig cfg{100, 1.0, 0.0};
        const WavepacketSpec spec{100, 16.0, 50, kPi / 2, true};
        const double tc = crossing_times(cfg, spec, 40.0).front();
        // both packets near site 75 at the crossing, far apart early on
        auto weight_near = [](const Eigen::VectorXd& p, int centre) {
            double s = 0.0;
            for (int d = -10; d <= 10; ++d) s += p(wrap_site(centre + d, 100));
            return s;
        };
        CHECK(weight_near(probs_wavepacket_free(cfg, spec, tc), 75) > 0.9);
        CHECK(weight_near(probs_wavepacket_free(cfg, spec, 0.2 * tc), 75) < 0.1);
    }

    TEST_CASE("interference fringes have period 2 pi over the momentum difference") {
        const RingConfig cfg{90, 1.0, 0.0};
        const double kc = 2 * kPi / 3;
        const WavepacketSpec spec{90, 25.0, 45, kc, true};
        const double tc = crossing_times(cfg, spec, 100.0).front();
        const Eigen::VectorXd at_cross = probs_wavepacket_free(cfg, spec, tc);
        const double dk = std::abs(kc - (2 * kPi - kc));
        const double fringe = fourier_amplitude(at_cross, dk);
        for (double q : {kPi / 2, 2 * kPi / 5, kPi / 4, 5 * kPi / 6}) CHECK(fringe > 5.0 * fourier_amplitude(at_cross, q));
        CHECK(fringe > 0.2);
        const Eigen::VectorXd apart = probs_wavepacket_free(cfg, spec, 0.5 * tc);
        CHECK(fourier_amplitude(apart, dk) < 0.05 * fringe);
    }

    TEST_CASE("single-packet spreading is slowest where the dispersion is linear") {
        const WavepacketSpec spec{100, 9.0, 50, kPi / 2, false};
        const double t = 8.0;
        std::vector<double> growth;
        std::vector<double> link;
        for (int s = 0; s < 16; ++s) {
            const double theta = 2 * kPi * s / 16;
            const RingConfig cfg{100, 1.0, 100 * theta};
            const double v0 = ring_moments(probs_wavepacket_free(cfg, spec, 0.0)).variance;
            growth.push_back(ring_moments(probs_wavepacket_free(cfg, spec, t)).variance - v0);
            link.push_back(theta);
        }
        const auto it = std::min_element(growth.begin(), growth.end());
        const double best = link[static_cast<std::size_t>(it - growth.begin())];
        CHECK((std::abs(best) < 1e-12 || std::abs(best - kPi) < 1e-12));
        CHECK(growth[4] > growth[0]);   // link phase pi / 2 spreads fastest
        CHECK(growth[4] == doctest::Approx(*std::max_element(growth.begin(), growth.end())));
    }

    TEST_CASE("ring moments") {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(10);
        p(9) = 0.5;
        p(1) = 0.5;
        const RingMoments m = ring_moments(p);
        CHECK(std::abs(std::remainder(m.centroid, 10.0)) < 1e-12);
        CHECK(m.variance == doctest::Approx(1.0));
    }

    TEST_CASE("serial and parallel series are identical") {
        const RingConfig cfg{24, 1.0, 0.4};
        const WavepacketSpec spec{24, 4.0, 12, kPi / 2, true};
        const TimeGrid grid = TimeGrid::uniform(10.0, 7);
        for (const BathSpec& b : {BathSpec::none(), BathSpec::gaussian(0.3)}) {
            const auto par = wavepacket_series(cfg, b, spec, grid);
            const auto ser = serial::wavepacket_series(cfg, b, spec, grid);
            for (std::size_t i = 0; i < grid.size(); ++i) CHECK((par[i] - ser[i]).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}
