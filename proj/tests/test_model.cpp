#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "nonrecip/error.hpp"

using namespace nonrecip;
using fixtures::kPi;

namespace {

ErrorKind kind_of(const DeviceConfig& cfg) {
    try {
        validate_device(cfg);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "validate_device accepted an invalid config";
    return ErrorKind::ConfigError;
}

DeviceConfig with(std::vector<PumpedCoupling> cs) {
    DeviceConfig cfg;
    cfg.modes = fixtures::reference_modes();
    cfg.couplings = std::move(cs);
    return cfg;
}

}  // namespace

TEST(Validate, ThreeConversionsAreUnconjugated) {
    auto dev = fixtures::make({{ModePair("a", "b"), ProcessKind::Conversion, 0.9, 0.0},
                               {ModePair("b", "c"), ProcessKind::Conversion, 0.9, 0.0},
                               {ModePair("a", "c"), ProcessKind::Conversion, 0.9, 0.0}});
    EXPECT_EQ(dev.topology(), Topology::Circulator);
    for (const auto& ch : dev.frame()) EXPECT_FALSE(ch.conjugated);
}

TEST(Validate, DirectionalAmpConjugatesSharedMode) {
    auto dev = fixtures::reference_diramp();
    EXPECT_EQ(dev.topology(), Topology::DirectionalAmp);
    EXPECT_FALSE(dev.frame()[0].conjugated);
    EXPECT_FALSE(dev.frame()[1].conjugated);
    EXPECT_TRUE(dev.frame()[2].conjugated);
    EXPECT_EQ(dev.frame()[2].detuning_sign, -1);
    EXPECT_DOUBLE_EQ(dev.frame()[2].carrier_freq, 7.174e9);
}

TEST(Validate, AlphabeticallyFirstModeStaysUnconjugated) {
    // gain b-c and conversion a-b: a and b share a class, c flips
    auto dev = fixtures::make({{ModePair("c", "b"), ProcessKind::Gain, 0.3, 0.0},
                               {ModePair("b", "a"), ProcessKind::Conversion, 0.5, 0.0}});
    EXPECT_FALSE(dev.frame()[0].conjugated);
    EXPECT_TRUE(dev.frame()[2].conjugated);
    EXPECT_EQ(dev.topology(), Topology::Partial);

    auto lone = fixtures::make({{ModePair("b", "c"), ProcessKind::Gain, 0.3, 0.0}});
    EXPECT_FALSE(lone.frame()[1].conjugated);
    EXPECT_TRUE(lone.frame()[2].conjugated);
}

TEST(Validate, Rejections) {
    EXPECT_EQ(kind_of(with({{ModePair("a", "b"), ProcessKind::Gain, 0.2, 0.0},
                            {ModePair("b", "c"), ProcessKind::Gain, 0.2, 0.0},
                            {ModePair("a", "c"), ProcessKind::Gain, 0.2, 0.0}})),
              ErrorKind::FrustratedConjugation);
    EXPECT_EQ(kind_of(with({{ModePair("a", "b"), ProcessKind::Gain, 0.2, 0.0},
                            {ModePair("b", "a"), ProcessKind::Conversion, 0.2, 0.0}})),
              ErrorKind::DuplicatePair);
    EXPECT_EQ(kind_of(with({{ModePair("a", "c"), ProcessKind::Gain, 1.0, 0.0}})), ErrorKind::GainAboveThreshold);
    EXPECT_EQ(kind_of(with({{ModePair("a", "c"), ProcessKind::Gain, 1.2, 0.0}})), ErrorKind::GainAboveThreshold);
    EXPECT_EQ(kind_of(with({{ModePair("a", "a"), ProcessKind::Conversion, 0.2, 0.0}})), ErrorKind::InvalidCoupling);
    EXPECT_EQ(kind_of(with({{ModePair("a", "z"), ProcessKind::Conversion, 0.2, 0.0}})), ErrorKind::InvalidCoupling);
    EXPECT_EQ(kind_of(with({{ModePair("a", "b"), ProcessKind::Conversion, -0.1, 0.0}})), ErrorKind::InvalidCoupling);

    auto cfg = with({});
    cfg.modes[1].resonance_freq = cfg.modes[0].resonance_freq;
    EXPECT_EQ(kind_of(cfg), ErrorKind::InvalidMode);
    cfg = with({});
    cfg.modes[2].name = "a";
    EXPECT_EQ(kind_of(cfg), ErrorKind::InvalidMode);
    cfg = with({});
    cfg.modes[0].kappa = 0.0;
    EXPECT_EQ(kind_of(cfg), ErrorKind::InvalidMode);
}

TEST(Validate, ConversionAboveUnityIsAllowed) {
    EXPECT_NO_THROW(fixtures::two_mode(ProcessKind::Conversion, 3.0, "a", "b"));
}

TEST(Validate, ErrorMessageNamesInvariant) {
    try {
        validate_device(with({{ModePair("a", "c"), ProcessKind::Gain, 1.2, 0.0}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("GainAboveThreshold"), std::string::npos);
    }
}

TEST(Validate, CanonicalFormAndIdempotence) {
    auto dev = validate_device(with({{ModePair("c", "a"), ProcessKind::Conversion, 0.4, -1.0},
                                     {ModePair("b", "a"), ProcessKind::Conversion, 0.7, 7.0}}));
    ASSERT_EQ(dev.couplings().size(), 2u);
    EXPECT_EQ(dev.couplings()[0].pair, ModePair("a", "b"));
    EXPECT_EQ(dev.couplings()[1].pair, ModePair("a", "c"));
    for (const auto& c : dev.couplings()) {
        EXPECT_GE(c.phase, 0.0);
        EXPECT_LT(c.phase, 2.0 * kPi);
    }
    auto again = validate_device(dev.config());
    EXPECT_EQ(again.config().couplings, dev.config().couplings);
    EXPECT_EQ(again.frame(), dev.frame());
    EXPECT_EQ(again.topology(), dev.topology());
}

TEST(Validate, ModesSortedByName) {
    DeviceConfig cfg;
    cfg.modes = {ModeSpec{"q", 6e9, 10e6}, ModeSpec{"p", 5e9, 10e6}, ModeSpec{"r", 7e9, 10e6}};
    auto dev = validate_device(cfg);
    EXPECT_EQ(dev.modes()[0].name, "p");
    EXPECT_EQ(dev.index_of("r"), 2u);
    EXPECT_THROW(dev.index_of("x"), Error);
}

TEST(Pumps, Frequencies) {
    auto modes = fixtures::reference_modes();
    PumpedCoupling g{ModePair("a", "c"), ProcessKind::Gain, 0.1, 0.0};
    PumpedCoupling c{ModePair("a", "b"), ProcessKind::Conversion, 0.1, 0.0};
    EXPECT_NEAR(pump_frequency_for(g, modes), 16.341e9, 1.0);
    EXPECT_NEAR(pump_frequency_for(c, modes), 3.926e9, 1.0);
    auto dev = fixtures::reference_diramp();
    EXPECT_EQ(pumped_mode(dev.couplings()[0], dev), "c");
}

TEST(Pumps, ReferenceCirculatorPumpsClose) {
    auto dev = fixtures::reference_circulator();
    std::map<std::string, double> pumps{{"c", 3.928e9}, {"a", 1.9291e9}, {"b", 1.9989e9}};
    EXPECT_TRUE(check_pump_closure(dev, pumps).empty());
}

TEST(Pumps, ReferenceDirAmpPumpsClose) {
    auto dev = fixtures::reference_diramp();
    std::map<std::string, double> pumps{{"c", 3.927e9}, {"b", 16.339e9}, {"a", 12.412e9}};
    EXPECT_TRUE(check_pump_closure(dev, pumps).empty());
}

TEST(Pumps, DisplacedPumpWarns) {
    auto dev = fixtures::reference_circulator();
    std::map<std::string, double> pumps{{"c", 3.928e9}, {"a", 1.9291e9 + 50e6}, {"b", 1.9989e9}};
    auto w = check_pump_closure(dev, pumps);
    ASSERT_EQ(w.size(), 2u);  // deviation on a, and broken closure
    EXPECT_NE(w[0].find("'a'"), std::string::npos);
    EXPECT_NE(w[1].find("closure"), std::string::npos);
}

TEST(Pumps, MissingPumpWarns) {
    auto dev = fixtures::reference_circulator();
    auto w = check_pump_closure(dev, {{"c", 3.928e9}});
    EXPECT_EQ(w.size(), 2u);
}

TEST(Phase, TotalPhaseConventions) {
    auto circ = fixtures::make({{ModePair("a", "b"), ProcessKind::Conversion, 1.0, 0.1},
                                {ModePair("b", "c"), ProcessKind::Conversion, 1.0, 0.2},
                                {ModePair("a", "c"), ProcessKind::Conversion, 1.0, 0.4}});
    auto tp = total_pump_phase(circ);
    EXPECT_EQ(tp.convention, PhaseConvention::Circulator);
    EXPECT_NEAR(tp.value, 0.2 + 0.4 - 0.1, 1e-12);

    auto da = fixtures::make({{ModePair("a", "b"), ProcessKind::Conversion, 1.0, 0.1},
                              {ModePair("b", "c"), ProcessKind::Gain, 0.3, 0.2},
                              {ModePair("a", "c"), ProcessKind::Gain, 0.3, 0.4}});
    tp = total_pump_phase(da);
    EXPECT_EQ(tp.convention, PhaseConvention::DirectionalAmp);
    EXPECT_NEAR(tp.value, -(0.2 - 0.4 + 0.1), 1e-12);
}

TEST(Phase, WithTotalPhaseTouchesOnlyDrivenCoupling) {
    auto dev = fixtures::reference_circulator(0.0);
    auto moved = with_total_phase(dev, 2.0);
    EXPECT_NEAR(total_pump_phase(moved).value, 2.0, 1e-12);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_DOUBLE_EQ(moved.couplings()[k].rho, dev.couplings()[k].rho);
        if (moved.couplings()[k].pair != ModePair("a", "b")) {
            EXPECT_DOUBLE_EQ(moved.couplings()[k].phase, dev.couplings()[k].phase);
        }
    }
    EXPECT_NEAR(total_pump_phase(with_total_phase(dev, -2.5)).value, -2.5, 1e-12);
}

TEST(Phase, OpenChainHasNoTotalPhase) {
    auto dev = fixtures::two_mode(ProcessKind::Gain, 0.3);
    EXPECT_THROW(total_pump_phase(dev), Error);
    EXPECT_THROW(with_total_phase(dev, 1.0), Error);
}

TEST(Phase, Wrap) {
    EXPECT_NEAR(wrap_phase(-kPi / 2), 1.5 * kPi, 1e-15);
    EXPECT_NEAR(wrap_phase(5 * kPi), kPi, 1e-12);
    EXPECT_GE(wrap_phase(-1e-18), 0.0);
    EXPECT_LT(wrap_phase(-1e-18), 2.0 * kPi);
}
