// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ars/linkbudget.hpp"

using namespace ars;

namespace {

const Frequency f26 = Frequency::from_ghz(26.0);
const double table_area = 0.1526 * 0.1526; // 48x48 panel, 152.6 mm side

LinkParams table1()
{
    LinkParams p;
    p.p_t = PowerLevel{6.0};
    p.g_t = GainDb{18.0};
    p.g_r = GainDb{18.0};
    p.l_t = GainDb{2.5};
    p.g_a = GainDb{19.9};
    p.r1_m = 5.5;
    p.r2_m = 7.0;
    p.f = f26;
    return p;
}

// unit-cancellation setup: lambda = 4 pi meters, unit gains, unit distances
LinkParams unit_link(double p_t_dbm)
{
    LinkParams p;
    p.p_t = PowerLevel{p_t_dbm};
    p.g_t = GainDb{0.0};
    p.g_r = GainDb{0.0};
    p.l_t = GainDb{0.0};
    p.g_a = GainDb{0.0};
    p.r1_m = 1.0;
    p.r2_m = 1.0;
    p.f = Frequency{speed_of_light / (4.0 * pi)};
    return p;
}

} // namespace

TEST_CASE("ideal bistatic cross-section")
{
    const BistaticGeometry geom{Angle{0.0}, Angle{65.0}, table_area};
    const double sigma = bistatic_sigma_ideal(geom, f26);
    CHECK(sigma == doctest::Approx(21.661).epsilon(5e-4));

    // specular limit: flat-plate RCS 4 pi A^2 / lambda^2
    const double lambda = wavelength_of(f26);
    const BistaticGeometry flat{Angle{0.0}, Angle{0.0}, table_area};
    CHECK(bistatic_sigma_ideal(flat, f26) ==
          doctest::Approx(4.0 * pi * table_area * table_area / (lambda * lambda))
              .epsilon(1e-14));

    // symmetric under swapping incidence and observation
    const BistaticGeometry swapped{Angle{65.0}, Angle{0.0}, table_area};
    CHECK(bistatic_sigma_ideal(swapped, f26) == sigma);

    CHECK_THROWS_AS(bistatic_sigma_ideal(BistaticGeometry{Angle{0}, Angle{0}, 0.0}, f26),
                    std::domain_error);
}

TEST_CASE("method 1: radar-equation received power")
{
    // unit cancellation: sigma = 4 pi, lambda = 4 pi, unity gains/distances
    const LinkParams u = unit_link(7.3);
    CHECK(received_power_method1(u, 4.0 * pi).dbm == doctest::Approx(7.3).epsilon(1e-12));

    // shipped link parameters with the ideal sigma at (0, 65) deg
    const LinkParams t = table1();
    const double sigma = bistatic_sigma_ideal({Angle{0.0}, Angle{65.0}, table_area}, f26);
    const PowerLevel p1 = received_power_method1(t, sigma);
    CHECK(p1.dbm == doctest::Approx(-48.0917).epsilon(2e-4));
    CHECK(std::abs(p1.dbm - (-48.1)) < 0.2);

    // doubling R1 costs 6.02 dB
    LinkParams far = t;
    far.r1_m *= 2.0;
    CHECK(p1.dbm - received_power_method1(far, sigma).dbm ==
          doctest::Approx(6.0206).epsilon(1e-4));

    CHECK_THROWS_AS(received_power_method1(t, -1.0), std::domain_error);
    CHECK(received_power_method1(t, 0.0).dbm == -std::numeric_limits<double>::infinity());
}

TEST_CASE("method 2: panel-gain cascade")
{
    const LinkParams u = unit_link(-3.7);
    CHECK(received_power_method2(u, GainDb{0.0}, GainDb{0.0}).dbm ==
          doctest::Approx(-3.7).epsilon(1e-12));

    // ideal-aperture gains reproduce the ideal-aperture 33.4 / 29.7 dBi pair
    const GainDb g_rx = ideal_aperture_gain(table_area, Angle{0.0}, f26);
    const GainDb g_tx = ideal_aperture_gain(table_area, Angle{65.0}, f26);
    CHECK(g_rx.db == doctest::Approx(33.43).epsilon(1e-3));
    CHECK(g_tx.db == doctest::Approx(29.68).epsilon(1e-3));

    const LinkParams t = table1();
    const PowerLevel p2 = received_power_method2(t, g_rx, g_tx);
    CHECK(std::abs(p2.dbm - (-48.1)) < 0.5);

    // cross-check against method 1 through the sigma relation
    const double sigma = bistatic_sigma_ideal({Angle{0.0}, Angle{65.0}, table_area}, f26);
    const PowerLevel p1 = received_power_method1(t, sigma);
    CHECK(p2.watts() == doctest::Approx(p1.watts()).epsilon(1e-10));
}

TEST_CASE("sigma <-> gain-product relation")
{
    const double lambda = wavelength_of(f26);
    CHECK(sigma_to_gain_product(lambda * lambda / (4.0 * pi), f26) ==
          doctest::Approx(1.0).epsilon(1e-14));

    const double product = sigma_to_gain_product(21.661, f26);
    CHECK(10.0 * std::log10(product) == doctest::Approx(63.11).epsilon(1e-4));

    // exact round trip
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> sig(1e-6, 1e4);
    for (int i = 0; i < 100; ++i) {
        const double s = sig(rng);
        CHECK(gain_product_to_sigma(sigma_to_gain_product(s, f26), f26) ==
              doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("methods 1 and 2 agree through the sigma relation (randomized)")
{
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> area(1e-3, 1.0);
    std::uniform_real_distribution<double> ang(-89.0, 89.0);
    std::uniform_real_distribution<double> freq(1.0, 100.0);
    std::uniform_real_distribution<double> dist(0.5, 100.0);
    std::uniform_real_distribution<double> gain(-5.0, 30.0);

    for (int i = 0; i < 1000; ++i) {
        LinkParams p;
        p.p_t = PowerLevel{gain(rng)};
        p.g_t = GainDb{gain(rng)};
        p.g_r = GainDb{gain(rng)};
        p.r1_m = dist(rng);
        p.r2_m = dist(rng);
        p.f = Frequency::from_ghz(freq(rng));
        const BistaticGeometry geom{Angle{ang(rng)}, Angle{ang(rng)}, area(rng)};
        const double sigma = bistatic_sigma_ideal(geom, p.f);
        const double product = sigma_to_gain_product(sigma, p.f);
        const PowerLevel p1 = received_power_method1(p, sigma);
        const PowerLevel p2 =
            received_power_method2(p, GainDb::from_linear(product), GainDb{0.0});
        CHECK(std::abs(p1.watts() / p2.watts() - 1.0) < 1e-10);
    }
}

TEST_CASE("method 2 is symmetric under swapping the two hops")
{
    LinkParams p = table1();
    const GainDb g_rx{31.2};
    const GainDb g_tx{27.9};
    const double forward = received_power_method2(p, g_rx, g_tx).dbm;
    std::swap(p.r1_m, p.r2_m);
    const double swapped = received_power_method2(p, g_tx, g_rx).dbm;
    CHECK(forward == doctest::Approx(swapped).epsilon(1e-12));
}

TEST_CASE("methods are monotone in transmit power")
{
    LinkParams p = table1();
    const double sigma = 21.661;
    const double base = received_power_method1(p, sigma).dbm;
    p.p_t.dbm += 3.7;
    CHECK(received_power_method1(p, sigma).dbm - base == doctest::Approx(3.7).epsilon(1e-9));
}

TEST_CASE("terminal chain")
{
    const LinkParams t = table1();
    CHECK(chain_terminal(PowerLevel{-48.0917}, t).dbm ==
          doctest::Approx(-30.6917).epsilon(1e-10));
    CHECK(chain_terminal(PowerLevel{0.0}, t).dbm == doctest::Approx(17.4).epsilon(1e-12));

    LinkParams none = t;
    none.l_t = GainDb{0.0};
    none.g_a = GainDb{0.0};
    CHECK(chain_terminal(PowerLevel{-12.34}, none).dbm == -12.34);
}

TEST_CASE("line-of-sight Friis reference")
{
    // lambda = 4 pi, R3 = 1, all gains zero: P_theory = P_t
    const LinkParams u = unit_link(4.2);
    CHECK(los_reference(u, 1.0).dbm == doctest::Approx(4.2).epsilon(1e-12));

    // shipped budget at 12.5 m and 26 GHz
    const LinkParams t = table1();
    CHECK(los_reference(t, 12.5).dbm == doctest::Approx(-23.2855).epsilon(1e-4));

    // doubling the distance costs 6.02 dB
    CHECK(los_reference(t, 12.5).dbm - los_reference(t, 25.0).dbm ==
          doctest::Approx(6.0206).epsilon(1e-4));

    CHECK_THROWS_AS(los_reference(t, 0.0), std::domain_error);
}

TEST_CASE("power difference and correction")
{
    CHECK(power_difference_db(PowerLevel{-20.0}, PowerLevel{-20.0}) == 0.0);
    // correction offsets keep their sign
    CHECK(power_difference_db(PowerLevel{-18.04}, PowerLevel{-19.12}) ==
          doctest::Approx(1.08).epsilon(1e-12));

    CorrectionTable table;
    table.insert(26.0, 65.0, 1.08);
    table.insert(27.0, 80.0, -0.04);

    // identity when P_diff = 0
    CorrectionTable zero;
    zero.insert(26.0, 65.0, 0.0);
    CHECK(apply_correction(PowerLevel{-30.7}, zero, f26, Angle{65.0}).dbm == -30.7);

    CHECK(apply_correction(PowerLevel{-30.7}, table, f26, Angle{65.0}).dbm ==
          doctest::Approx(-31.78).epsilon(1e-12));
    // negative P_diff raises the corrected power
    CHECK(apply_correction(PowerLevel{-30.7}, table, Frequency::from_ghz(27.0),
                           Angle{80.0})
              .dbm > -30.7);

    // exact keying, no interpolation
    CHECK_THROWS_AS(apply_correction(PowerLevel{-30.7}, table, f26, Angle{66.0}),
                    std::out_of_range);
    CHECK_THROWS_AS(table.insert(26.0, 65.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(table.insert(26.0, 60.0, std::nan("")), std::invalid_argument);
}

TEST_CASE("correction idempotence against its own measurement")
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dbm(-80.0, -10.0);
    for (int i = 0; i < 50; ++i) {
        const PowerLevel p_theory{dbm(rng)};
        const PowerLevel p_m{dbm(rng)};
        CorrectionTable t;
        t.insert(26.0, 65.0, power_difference_db(p_theory, p_m));
        CHECK(apply_correction(p_theory, t, f26, Angle{65.0}).dbm ==
              doctest::Approx(p_m.dbm).epsilon(1e-12));
    }
}

TEST_CASE("EVM estimator")
{
    // noise floor for 400 MHz and NF 2.7 dB
    const EvmEstimate floor_check = evm_estimate(PowerLevel{-60.0}, 400e6, 2.7);
    CHECK(floor_check.noise_floor_dbm == doctest::Approx(-85.2794).epsilon(1e-5));

    // SNR 20 dB -> EVM 10 %, passes 16QAM
    const EvmEstimate pass = evm_estimate(
        PowerLevel{floor_check.noise_floor_dbm + 20.0}, 400e6, 2.7);
    CHECK(pass.evm_percent == doctest::Approx(10.0).epsilon(1e-10));
    CHECK(pass.pass_16qam);

    // SNR 18 dB -> EVM 12.59 %, fails the 12.5 % threshold
    const EvmEstimate fail = evm_estimate(
        PowerLevel{floor_check.noise_floor_dbm + 18.0}, 400e6, 2.7);
    CHECK(fail.evm_percent == doctest::Approx(12.589).epsilon(1e-4));
    CHECK_FALSE(fail.pass_16qam);

    // strictly decreasing in received power
    double prev = 1e9;
    for (double p = -90.0; p <= -40.0; p += 2.5) {
        const double evm = evm_estimate(PowerLevel{p}, 400e6, 2.7).evm_percent;
        CHECK(evm < prev);
        prev = evm;
    }

    CHECK_THROWS_AS(evm_estimate(PowerLevel{-50.0}, 0.0, 2.7), std::domain_error);
}
