#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "nonrecip/error.hpp"
#include "nonrecip/nelder_mead.hpp"
#include "nonrecip/tuner.hpp"

using namespace nonrecip;
using fixtures::kPi;

namespace {

std::vector<Channel> all_channels() {
    std::vector<Channel> out;
    for (std::size_t o = 0; o < 3; ++o)
        for (std::size_t i = 0; i < 3; ++i) out.emplace_back(o, i);
    return out;
}

double worst_match_db(const ValidatedDevice& dev) {
    auto s = scattering_at(dev, 0.0);
    double w = -1e9;
    for (std::size_t m = 0; m < 3; ++m) w = std::max(w, 10 * std::log10(s.power(m, m)));
    return w;
}

ValidatedDevice threshold_template(double gbc_db, double phi = kPi / 2) {
    return fixtures::diramp_rho(1.0, rho_for_gain(std::pow(10.0, gbc_db / 10)),
                                rho_for_gain(std::pow(10.0, (gbc_db + 1) / 10)), phi);
}

}  // namespace

TEST(NelderMead, Rosenbrock) {
    auto f = [](const std::vector<double>& x) {
        return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
    };
    NelderMeadOptions opts;
    opts.max_evaluations = 5000;
    opts.diameter_tolerance = 1e-10;
    auto r = nelder_mead(f, {-1.2, 1.0}, opts);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-6);
    EXPECT_NEAR(r.x[1], 1.0, 1e-6);
    for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k], r.trace[k - 1]);
}

TEST(PhaseSweep, CirculatorWorkingPoints) {
    auto dev = fixtures::reference_circulator();
    auto phis = linear_grid(-2 * kPi, kPi, 3601);
    std::vector<double> delta{0.0};
    std::vector<Channel> ch{{1, 1}};
    auto map = phase_sweep(dev, phis, delta, ch);
    std::vector<double> minima;
    for (std::size_t p = 1; p + 1 < phis.size(); ++p)
        if (map.at(0, p, 0) < map.at(0, p - 1, 0) && map.at(0, p, 0) < map.at(0, p + 1, 0)) minima.push_back(phis[p]);
    ASSERT_EQ(minima.size(), 3u);
    const double step = phis[1] - phis[0];
    EXPECT_NEAR(minima[0], -1.5 * kPi, step);
    EXPECT_NEAR(minima[1], -0.5 * kPi, step);
    EXPECT_NEAR(minima[2], 0.5 * kPi, step);
    EXPECT_NEAR(minima[2] - minima[1], kPi, 2 * step);
    EXPECT_EQ(circulation_sense(scattering_at(with_total_phase(dev, minima[0]), 0.0)), Circulation::CW);
    EXPECT_EQ(circulation_sense(scattering_at(with_total_phase(dev, minima[1]), 0.0)), Circulation::CCW);
    EXPECT_EQ(circulation_sense(scattering_at(with_total_phase(dev, minima[2]), 0.0)), Circulation::CW);
}

TEST(PhaseSweep, SinglePointMatchesSolve) {
    auto dev = fixtures::reference_circulator(0.0);
    std::vector<double> phi{kPi / 2}, delta{1.5e6};
    auto ch = all_channels();
    auto map = phase_sweep(dev, phi, delta, ch);
    auto s = scattering_at(with_total_phase(dev, kPi / 2), 1.5e6);
    for (std::size_t c = 0; c < ch.size(); ++c) EXPECT_EQ(map.at(c, 0, 0), std::abs(s(ch[c].first, ch[c].second)));
}

TEST(PhaseSweep, ParallelMatchesSerial) {
    auto dev = fixtures::reference_diramp();
    auto phis = linear_grid(-kPi, kPi, 41);
    auto deltas = linear_grid(-20e6, 20e6, 101);
    auto ch = all_channels();
    auto a = phase_sweep(dev, phis, deltas, ch);
    auto b = phase_sweep_serial(dev, phis, deltas, ch);
    EXPECT_EQ(a.magnitude, b.magnitude);
}

TEST(PhaseSweep, TransposeSymmetry) {
    auto dev = fixtures::reference_diramp();
    auto phis = linear_grid(-kPi, kPi, 21);  // symmetric about 0
    auto deltas = linear_grid(-20e6, 20e6, 21);
    auto ch = all_channels();
    auto map = phase_sweep(dev, phis, deltas, ch);
    for (std::size_t p = 0; p < phis.size(); ++p)
        for (std::size_t d = 0; d < deltas.size(); ++d)
            for (std::size_t o = 0; o < 3; ++o)
                for (std::size_t i = 0; i < 3; ++i)
                    EXPECT_NEAR(map.at(o * 3 + i, p, d), map.at(i * 3 + o, phis.size() - 1 - p, d), 1e-9);
}

TEST(PhaseSweep, DirAmpDirectionReverses) {
    auto dev = fixtures::reference_diramp();
    std::vector<double> phis{-kPi / 2, kPi / 2}, delta{0.0};
    std::vector<Channel> ch{{0, 1}, {1, 0}};
    auto map = phase_sweep(dev, phis, delta, ch);
    EXPECT_GT(map.at(1, 0, 0), 3 * map.at(0, 0, 0));  // |S_ba| dominates at −π/2
    EXPECT_GT(map.at(0, 1, 0), 3 * map.at(1, 1, 0));  // |S_ab| dominates at +π/2
}

TEST(ConversionSweep, AbsorptionAboveThresholdGainBelow) {
    auto tmpl = threshold_template(12.0);
    std::vector<double> cs{0.21, 0.989};
    auto sw = conversion_sweep(tmpl, cs);
    EXPECT_EQ(sw.roles.signal, 1u);
    EXPECT_EQ(sw.roles.idler, 2u);
    EXPECT_GT(sw.points[0].input_match, 1.0);
    EXPECT_GT(sw.points[0].forward_gain, 1.0);
    EXPECT_LT(sw.points[1].input_match, 1.0);
    EXPECT_NEAR(sw.threshold, 0.9369042655519807, 1e-12);
}

TEST(ConversionSweep, UnityAtThreshold) {
    auto tmpl = threshold_template(12.0);
    std::vector<double> cs{1.0 - std::pow(10.0, -1.2)};
    EXPECT_NEAR(conversion_sweep(tmpl, cs).points[0].input_match, 1.0, 1e-9);
}

TEST(ConversionSweep, BisectedCrossingMatchesThreshold) {
    for (double g : {6.0, 12.0, 20.0}) {
        auto tmpl = threshold_template(g);
        const double want = directionality_threshold(std::pow(10.0, g / 10));
        auto excess = [&](double c) {
            std::vector<double> one{c};
            return conversion_sweep(tmpl, one).points[0].input_match - 1.0;
        };
        double lo = want - 0.05, hi = std::min(want + 0.05, 1.0);
        ASSERT_GT(excess(lo), 0.0);
        ASSERT_LT(excess(hi), 0.0);
        for (int k = 0; k < 60; ++k) {
            double mid = 0.5 * (lo + hi);
            (excess(mid) > 0.0 ? lo : hi) = mid;
        }
        EXPECT_NEAR(0.5 * (lo + hi), want, 1e-6) << g << " dB";
    }
}

TEST(ConversionSweep, MonotoneAwayFromThreshold) {
    auto tmpl = threshold_template(12.0);
    auto cs = linear_grid(0.95, 0.999, 50);
    auto sw = conversion_sweep(tmpl, cs);
    for (std::size_t k = 1; k < sw.points.size(); ++k) {
        EXPECT_LT(sw.points[k].input_match, sw.points[k - 1].input_match);
        EXPECT_TRUE(sw.points[k].stable);
    }
}

TEST(ConversionSweep, RolesFollowTemplatePhase) {
    auto sw = conversion_sweep(fixtures::reference_diramp(), std::vector<double>{0.998});
    EXPECT_EQ(sw.roles.signal, 0u);
    EXPECT_NEAR(to_db(sw.pair_gain), 13.0, 1e-9);
    EXPECT_NEAR(sw.points[0].input_match, std::pow(10.0, -14.99586569893 / 20), 1e-9);
}

TEST(ConversionSweep, NeedsDirAmp) {
    EXPECT_THROW(conversion_sweep(fixtures::reference_circulator(), std::vector<double>{0.5}), Error);
}

TEST(Calibration, CirculatorOffsets) {
    for (double offset : {0.3, -1.1, 2.9}) {
        PhaseOffsetDevice pod{fixtures::reference_circulator(0.0), offset};
        auto cal = calibrate_phase_offset(pod);
        EXPECT_NEAR(std::remainder(cal.knob_plus - (kPi / 2 - offset), 2 * kPi), 0.0, 1e-6);
        EXPECT_NEAR(std::remainder(cal.knob_minus - (-kPi / 2 - offset), 2 * kPi), 0.0, 1e-6);
        EXPECT_NEAR(std::remainder(cal.offset() - offset, 2 * kPi), 0.0, 1e-6);
    }
}

TEST(Calibration, DirAmpOffsets) {
    for (double offset : {0.3, -2.0}) {
        PhaseOffsetDevice pod{fixtures::reference_diramp(0.0), offset};
        auto cal = calibrate_phase_offset(pod);
        EXPECT_NEAR(std::remainder(cal.offset() - offset, 2 * kPi), 0.0, 1e-6);
        EXPECT_NEAR(std::remainder(cal.knob_minus - (-kPi / 2 - offset), 2 * kPi), 0.0, 1e-6);
    }
}

TEST(Calibration, PumpsOffIsAmbiguous) {
    PhaseOffsetDevice pod{fixtures::make({}), 0.3};
    try {
        calibrate_phase_offset(pod);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::AmbiguousMinimum);
    }
}

TEST(Tune, CirculatorFromSpecStart) {
    auto tmpl = fixtures::reference_circulator();
    Objective obj;
    TuneParams start{{0.8, 0.8, 0.8}, 1.0};
    auto r = tune(tmpl, obj, start, 2000);
    EXPECT_LE(worst_match_db(r.device), -30.0);
    EXPECT_NEAR(r.params.phi_tot, kPi / 2, 1e-3);
    EXPECT_LE(r.evaluations, 2000);
    for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k], r.trace[k - 1]);
}

TEST(Tune, CounterClockwise) {
    Objective obj;
    obj.kind = ObjectiveKind::CirculatorCCW;
    auto r = tune(fixtures::reference_circulator(), obj, TuneParams{{0.9, 0.9, 0.9}, -1.2}, 2000);
    EXPECT_NEAR(r.params.phi_tot, -kPi / 2, 1e-3);
    EXPECT_EQ(circulation_sense(scattering_at(r.device, 0.0)), Circulation::CCW);
}

TEST(Tune, FixedPoint) {
    auto tmpl = fixtures::circulator(1, 1, 1, kPi / 2);
    Objective obj;
    auto start = params_of(tmpl);
    const double v0 = objective_value(tmpl, obj, start, {});
    auto r = tune(tmpl, obj, start, 2000);
    EXPECT_LE(r.value, v0);
    EXPECT_NEAR(r.params.phi_tot, kPi / 2, 1e-6);
    EXPECT_NEAR(r.trace.front(), v0, 1e-12);
}

TEST(Tune, Deterministic) {
    Objective obj;
    TuneParams start{{0.7, 0.9, 1.1}, 1.3};
    auto a = tune(fixtures::reference_circulator(), obj, start, 300);
    auto b = tune(fixtures::reference_circulator(), obj, start, 300);
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.params.rhos, b.params.rhos);
    EXPECT_FALSE(a.converged);
    EXPECT_LE(a.evaluations, 300);
}

TEST(Tune, DirectionalAmpTarget) {
    auto tmpl = fixtures::reference_diramp();
    Objective obj;
    obj.kind = ObjectiveKind::DirectionalAmp;
    obj.target_gain_db = 14.0;
    auto r = tune(tmpl, obj, params_of(tmpl), 2000);
    auto f = amplifier_figures(scattering_at(r.device, 0.0), role_map(r.device, r.params.phi_tot));
    EXPECT_EQ(f.roles.signal, 0u);
    EXPECT_NEAR(f.forward_gain_db, 14.0, 0.5);
    EXPECT_LE(f.signal_match_db, -16.0);
    EXPECT_LE(f.vacuum_match_db, -16.0);
    EXPECT_TRUE(is_stable(r.device));
    for (const auto& c : r.device.couplings())
        if (c.kind == ProcessKind::Gain) EXPECT_LT(c.rho, 1.0);
}

TEST(Tune, PenaltyForInvalidParameters) {
    auto tmpl = fixtures::reference_diramp();
    Objective obj;
    obj.kind = ObjectiveKind::DirectionalAmp;
    auto p = params_of(tmpl);
    p.rhos[1] = 1.2;
    EXPECT_EQ(objective_value(tmpl, obj, p, role_map(tmpl, -kPi / 2)), kObjectivePenalty);
    p.rhos[0] = 0.1;
    p.rhos[1] = 0.9;
    p.rhos[2] = 0.9;
    EXPECT_EQ(objective_value(tmpl, obj, p, role_map(tmpl, -kPi / 2)), kObjectivePenalty);  // unstable
}

TEST(Tune, RejectsBadArguments) {
    auto tmpl = fixtures::reference_circulator();
    Objective obj;
    EXPECT_THROW(tune(tmpl, obj, params_of(tmpl), 0), Error);
    obj.kind = ObjectiveKind::DirectionalAmp;
    EXPECT_THROW(tune(tmpl, obj, params_of(tmpl), 10), Error);
    Objective bad;
    bad.match_weight = 0.0;
    EXPECT_THROW(tune(tmpl, bad, params_of(tmpl), 10), Error);
    EXPECT_THROW(tune(fixtures::two_mode(ProcessKind::Gain, 0.2), Objective{}, TuneParams{{0.2}, 0.0}, 10), Error);
}
