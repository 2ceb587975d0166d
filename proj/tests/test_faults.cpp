#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "oracles.hpp"
#include "remo/faults.hpp"

using namespace remo;

TEST(Masks, RandomHasExactPopcount)
{
    TrialRng rng(1);
    for (unsigned width : {1u, 4u, 7u, 24u, 64u})
        for (unsigned eta = 1; eta <= width; eta += 3) {
            const auto m = random_mask(width, eta, rng);
            EXPECT_EQ(std::popcount(m), static_cast<int>(eta));
            EXPECT_EQ(m & ~low_mask(width), 0u);
        }
    EXPECT_EQ(flip_random(0b1010, 4, 4, rng), 0b0101u);
}

TEST(Masks, SingleBitFromZero)
{
    TrialRng rng(2);
    for (int t = 0; t < 100; ++t) {
        const auto v = flip_random(0, 4, 1, rng);
        EXPECT_TRUE(v == 1 || v == 2 || v == 4 || v == 8);
    }
}

TEST(Masks, Burst)
{
    EXPECT_EQ(flip_burst(0x00, 8, 3, 2), 0x1Cu);
    EXPECT_EQ(flip_burst(0xA5, 8, 8, 0), 0x5Au);
    for (unsigned eta = 2; eta <= 7; ++eta)
        for (unsigned s = 0; s + eta <= 7; ++s) {
            const auto m = burst_mask(7, eta, s);
            EXPECT_EQ(std::popcount(m), static_cast<int>(eta));
            // contiguous: shifting out trailing zeros leaves 2^eta - 1
            EXPECT_EQ(m >> std::countr_zero(m), low_mask(eta));
        }
    EXPECT_THROW(burst_mask(7, 3, 5), Error);
}

TEST(Masks, Errors)
{
    TrialRng rng(3);
    try {
        flip_random(0, 4, 5, rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EtaTooLarge);
    }
    EXPECT_THROW(flip_burst(0, 4, 5, 0), Error);
    EXPECT_THROW(flip_random(16, 4, 1, rng), Error);
}

TEST(Masks, PositionFrequencyWithinThreeSigma)
{
    TrialRng rng(4);
    const unsigned width = 12, eta = 5;
    const int draws = 100000;
    std::vector<int> hits(width, 0);
    for (int t = 0; t < draws; ++t) {
        const auto m = random_mask(width, eta, rng);
        for (unsigned b = 0; b < width; ++b)
            hits[b] += (m >> b) & 1;
    }
    const double p = double(eta) / width;
    const double sigma = std::sqrt(draws * p * (1 - p));
    for (unsigned b = 0; b < width; ++b)
        EXPECT_NEAR(hits[b], draws * p, 3 * sigma) << "bit " << b;
}

TEST(Masks, BurstStartUniform)
{
    TrialRng rng(5);
    std::vector<int> starts(5, 0);
    const int draws = 50000;
    for (int t = 0; t < draws; ++t)
        ++starts[std::countr_zero(draw_mask(FaultMode::Burst, 7, 3, rng))];
    const double p = 0.2, sigma = std::sqrt(draws * p * (1 - p));
    for (int c : starts)
        EXPECT_NEAR(c, draws * p, 3 * sigma);
}

TEST(Rng, BelowIsInRangeAndSeedsDiffer)
{
    TrialRng rng(6);
    for (int t = 0; t < 1000; ++t)
        EXPECT_LT(rng.below(3329), 3329u);
    EXPECT_NE(derive_seed(0, 1, 2), derive_seed(0, 2, 1));
    EXPECT_NE(derive_seed(0, 1, 2), derive_seed(1, 1, 2));
    EXPECT_EQ(derive_seed(9, 8, 7), derive_seed(9, 8, 7));
}

TEST(FaultSpecCheck, Validation)
{
    EXPECT_THROW((FaultSpec{FaultTarget::Alpha, FaultMode::Random, 0, FaultPath::Main, 24}.validate()), Error);
    EXPECT_THROW((FaultSpec{FaultTarget::Alpha, FaultMode::Random, 25, FaultPath::Main, 24}.validate()), Error);
    EXPECT_THROW((FaultSpec{FaultTarget::Alpha, FaultMode::Burst, 1, FaultPath::Main, 24}.validate()), Error);
    EXPECT_NO_THROW((FaultSpec{FaultTarget::Alpha, FaultMode::Burst, 2, FaultPath::Main, 24}.validate()));
}

TEST(Stats, Wilson)
{
    auto s = detection_stats(87, 100);
    EXPECT_DOUBLE_EQ(s.efficiency, 0.87);
    EXPECT_NEAR(s.ci_lo, 0.790196, 1e-6);
    EXPECT_NEAR(s.ci_hi, 0.922428, 1e-6);
    s = detection_stats(100, 100);
    EXPECT_DOUBLE_EQ(s.efficiency, 1.0);
    EXPECT_NEAR(s.ci_lo, 0.963007, 1e-6);
    EXPECT_DOUBLE_EQ(s.ci_hi, 1.0);
    s = detection_stats(0, 100);
    EXPECT_DOUBLE_EQ(s.efficiency, 0.0);
    EXPECT_DOUBLE_EQ(s.ci_lo, 0.0);
    EXPECT_NEAR(s.ci_hi, 0.036993, 1e-6);
    EXPECT_THROW(detection_stats(0, 0), Error);
    EXPECT_THROW(detection_stats(2, 1), Error);
}

TEST(RemoCampaign, ControlArmHasNoDetections)
{
    RemoCampaignConfig cfg;
    cfg.samples = 20000;
    for (unsigned w : {2u, 4u, 8u}) {
        const auto c = run_remo_cell(cfg, {w, 0, FaultTarget::Alpha, FaultMode::Random});
        EXPECT_EQ(c.samples, 20000u);
        EXPECT_EQ(c.detected, 0u);
    }
}

TEST(RemoCampaign, OmegaFaultsDetected)
{
    RemoCampaignConfig cfg;
    cfg.samples = 5000;
    const auto c = run_remo_cell(cfg, {2, 3, FaultTarget::Omega, FaultMode::Random});
    EXPECT_GE(c.stats.efficiency, 0.995);
}

TEST(RemoCampaign, BothPathsFaultedIsInvisible)
{
    RemoCampaignConfig cfg;
    cfg.samples = 2000;
    cfg.path = FaultPath::Both;
    const auto c = run_remo_cell(cfg, {4, 3, FaultTarget::Alpha, FaultMode::Random});
    EXPECT_EQ(c.detected, 0u);
}

TEST(RemoCampaign, GridShapeAndSkippedBursts)
{
    RemoCampaignConfig cfg;
    cfg.samples = 50;
    const auto res = run_remo_campaign(cfg);
    EXPECT_EQ(res.cells.size(), 3u * 6u * 3u * 2u);
    for (const auto& c : res.cells)
        EXPECT_EQ(c.skipped, c.key.mode == FaultMode::Burst && c.key.eta == 1);
}

TEST(RemoCampaign, Validation)
{
    RemoCampaignConfig cfg;
    cfg.etas = {0};
    EXPECT_THROW(run_remo_campaign(cfg), Error);
    cfg.etas = {25};
    EXPECT_THROW(run_remo_campaign(cfg), Error);
    cfg.etas = {1};
    cfg.targets = {FaultTarget::AddrJ};
    EXPECT_THROW(run_remo_campaign(cfg), Error);
    cfg.targets = {FaultTarget::Alpha};
    cfg.samples = 0;
    EXPECT_THROW(run_remo_campaign(cfg), Error);
}

TEST(RemoCampaign, ThreadCountDoesNotChangeResults)
{
    RemoCampaignConfig cfg;
    cfg.samples = 3000;
    cfg.seed = 42;
    cfg.ws = {4};
    cfg.etas = {1, 3};
    const auto a = run_remo_campaign(cfg);
    cfg.threads = 3;
    const auto b = run_remo_campaign(cfg);
    EXPECT_EQ(a.cells, b.cells);
    cfg.seed = 43;
    const auto c = run_remo_campaign(cfg);
    EXPECT_NE(a.cells, c.cells);
}

TEST(MemoryCampaign, MatchesExactEnumeration)
{
    // A single run already holds ~25k samples per cell; the measured rate
    // must sit within 5 sigma of the enumerated probability.
    MemoryCampaignConfig cfg;
    cfg.runs = 1;
    cfg.seed = 11;
    for (auto mode : {FaultMode::Random, FaultMode::Burst})
        for (unsigned eta = (mode == FaultMode::Burst ? 2 : 1); eta <= 7; eta += 2)
            for (auto [target, otarget] : {std::pair{FaultTarget::AddrJ, oracle::AddrTarget::J},
                                           std::pair{FaultTarget::AddrK, oracle::AddrTarget::K},
                                           std::pair{FaultTarget::AddrBoth, oracle::AddrTarget::Both}}) {
                const auto c = run_memory_cell(cfg, {0, eta, target, mode});
                const double p = oracle::address_detection(otarget, eta, mode == FaultMode::Burst);
                const double sigma = std::sqrt(p * (1 - p) / double(c.samples));
                EXPECT_NEAR(c.stats.efficiency, p, 5 * sigma + 1e-12)
                    << to_string(target) << " " << to_string(mode) << " eta=" << eta;
            }
}

TEST(MemoryCampaign, SampleCounts)
{
    MemoryCampaignConfig cfg;
    cfg.runs = 2;
    cfg.variant = KyberVariant::Kyber768;
    EXPECT_EQ(run_memory_cell(cfg, {0, 1, FaultTarget::AddrJ, FaultMode::Random}).samples, 2u * 24576u);
    EXPECT_EQ(run_memory_cell(cfg, {0, 1, FaultTarget::AddrK, FaultMode::Random}).samples, 2u * 49152u);
    EXPECT_EQ(run_memory_cell(cfg, {0, 1, FaultTarget::AddrBoth, FaultMode::Random}).samples, 2u * 24576u);
}

TEST(MemoryCampaign, Validation)
{
    MemoryCampaignConfig cfg;
    cfg.etas = {8};
    EXPECT_THROW(run_memory_campaign(cfg), Error);
    cfg.etas = {1};
    cfg.targets = {FaultTarget::Omega};
    EXPECT_THROW(run_memory_campaign(cfg), Error);
}

TEST(MemoryCampaign, LiteralRuleMissesSomeFaults)
{
    // Under the literal schedule the last stage's k bound stays loose, so
    // even 4-bit faults on both fields escape occasionally.
    MemoryCampaignConfig cfg;
    cfg.runs = 1;
    cfg.rule = RuleKind::Literal;
    const auto c = run_memory_cell(cfg, {0, 4, FaultTarget::AddrBoth, FaultMode::Random});
    EXPECT_LT(c.detected, c.samples);
}

TEST(Parsing, Names)
{
    for (auto t : {FaultTarget::Alpha, FaultTarget::Omega, FaultTarget::Both, FaultTarget::AddrJ,
                   FaultTarget::AddrK, FaultTarget::AddrBoth})
        EXPECT_EQ(parse_target(to_string(t)), t);
    EXPECT_EQ(parse_mode("burst"), FaultMode::Burst);
    EXPECT_EQ(parse_comparator("offset"), Comparator::Offset);
    EXPECT_EQ(parse_path("shadow"), FaultPath::Shadow);
    EXPECT_EQ(parse_rule("literal"), RuleKind::Literal);
    EXPECT_THROW(parse_target("gamma"), Error);
}

TEST(RemoCampaign, OmegaRateMatchesExactModel)
{
    // Multi-bit flips of beta can add a multiple of q, which the shadow
    // comparison cannot see; the campaign must reproduce that exact rate.
    RemoCampaignConfig cfg;
    cfg.samples = 200000;
    cfg.seed = 3;
    for (unsigned eta : {1u, 5u}) {
        const auto c = run_remo_cell(cfg, {2, eta, FaultTarget::Omega, FaultMode::Random});
        const double p = oracle::omega_detection(cfg.q, cfg.l, eta);
        EXPECT_NEAR(c.stats.efficiency, p, 5 * std::sqrt(p * (1 - p) / double(c.samples))) << eta;
    }
}
