#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "remo/report.hpp"
#include "remo/trace_io.hpp"

using namespace remo;

namespace {

CampaignResult random_result(std::mt19937_64& rng)
{
    CampaignResult r;
    r.kind = rng() % 2 ? "remo" : "memory";
    r.metadata = {{"campaign", r.kind}, {"seed", std::to_string(rng() % 1000)}};
    const FaultTarget targets[] = {FaultTarget::Alpha, FaultTarget::Omega, FaultTarget::AddrBoth};
    const int n = 1 + static_cast<int>(rng() % 20);
    for (int t = 0; t < n; ++t) {
        CampaignCell c;
        c.key = {r.kind == "remo" ? 2u + unsigned(rng() % 7) : 0u, 1 + unsigned(rng() % 23), targets[rng() % 3],
                 rng() % 2 ? FaultMode::Random : FaultMode::Burst};
        c.seed = rng();
        c.skipped = rng() % 5 == 0;
        if (!c.skipped) {
            c.samples = 1 + rng() % 1000000;
            c.detected = rng() % (c.samples + 1);
            c.stats = detection_stats(c.detected, c.samples);
        }
        r.cells.push_back(c);
    }
    return r;
}

} // namespace

TEST(CampaignCsv, HeaderAndSkippedRow)
{
    CampaignResult r;
    r.kind = "remo";
    r.metadata = {{"campaign", "remo"}, {"seed", "42"}, {"comparator", "modq"}};
    r.cells.push_back({{4, 1, FaultTarget::Alpha, FaultMode::Random}, false, 100, 87, detection_stats(87, 100), 42});
    r.cells.push_back({{4, 1, FaultTarget::Alpha, FaultMode::Burst}, true, 0, 0, {}, 42});
    EXPECT_EQ(campaign_csv(r), "# campaign: remo\n"
                               "# seed: 42\n"
                               "# comparator: modq\n"
                               "w,eta,target,mode,samples,detected,efficiency_pct,ci_lo,ci_hi,seed\n"
                               "4,1,alpha,random,100,87,87.0000,79.0196,92.2428,42\n"
                               "4,1,alpha,burst,,,,,,42\n");
}

TEST(CampaignCsv, RoundTripProperty)
{
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 200; ++t) {
        const auto r = random_result(rng);
        std::istringstream is(campaign_csv(r));
        const auto back = parse_campaign_csv(is);
        ASSERT_EQ(back.kind, r.kind);
        ASSERT_EQ(back.metadata, r.metadata);
        ASSERT_EQ(back.cells, r.cells);
        ASSERT_EQ(campaign_csv(back), campaign_csv(r));
    }
}

TEST(CampaignCsv, RealCampaignRoundTrips)
{
    MemoryCampaignConfig cfg;
    cfg.runs = 1;
    cfg.etas = {1, 2};
    cfg.variant = KyberVariant::Kyber512;
    const auto res = run_memory_campaign(cfg);
    std::istringstream is(campaign_csv(res));
    EXPECT_EQ(parse_campaign_csv(is).cells, res.cells);
}

TEST(CampaignCsv, ParseErrors)
{
    std::istringstream bad_header("a,b\n");
    EXPECT_THROW(parse_campaign_csv(bad_header), Error);
    std::istringstream bad_row(std::string(kCampaignCsvHeader) + "\n4,1,alpha,random,10\n");
    EXPECT_THROW(parse_campaign_csv(bad_row), Error);
    std::istringstream empty("");
    EXPECT_THROW(parse_campaign_csv(empty), Error);
}

TEST(CampaignJson, Fields)
{
    CampaignResult r;
    r.kind = "memory";
    r.metadata = {{"campaign", "memory"}};
    r.cells.push_back({{0, 2, FaultTarget::AddrJ, FaultMode::Burst}, false, 10, 5, detection_stats(5, 10), 7});
    const auto j = campaign_json(r);
    EXPECT_EQ(j["metadata"]["campaign"], "memory");
    EXPECT_TRUE(j["cells"][0]["w"].is_null());
    EXPECT_EQ(j["cells"][0]["target"], "addr_j");
    EXPECT_DOUBLE_EQ(j["cells"][0]["efficiency_pct"].get<double>(), 50.0);
}

TEST(CampaignMarkdown, Layout)
{
    CampaignResult r;
    r.kind = "remo";
    r.cells.push_back({{2, 1, FaultTarget::Alpha, FaultMode::Random}, false, 4, 3, detection_stats(3, 4), 0});
    r.cells.push_back({{2, 1, FaultTarget::Alpha, FaultMode::Burst}, true, 0, 0, {}, 0});
    std::ostringstream os;
    write_campaign_markdown(os, r);
    EXPECT_EQ(os.str(), "| w | eta | alpha random | alpha burst |\n"
                        "|---|---|---|---|\n"
                        "| 2 | 1 | 75.00 | - |\n");
}

TEST(TraceIo, CsvRowsMatchIterations)
{
    const auto ps = derive(13, 4, 2, 4);
    const auto t = mmrfd(7, 5, ps);
    std::ostringstream os;
    write_trace_csv(os, t);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "i,aw,mu,gamma,aw_f,mu_f,gamma_f,flag,gamma_bits,gamma_f_bits");
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    EXPECT_EQ(rows, 2);
    const auto j = trace_json(t, ps);
    EXPECT_EQ(j["iterations"].size(), 2u);
    EXPECT_EQ(j["final"]["result"], 3);
}

TEST(PolyIo, Formats)
{
    const Poly p{{1, 2, 3328}};
    EXPECT_EQ(parse_poly(poly_text(p)), p);
    EXPECT_EQ(parse_poly(poly_json(p)), p);
    EXPECT_EQ(parse_poly(" [1, 2, 3328] "), p);
    EXPECT_THROW(parse_poly("1\nx\n"), Error);
    EXPECT_THROW(parse_poly("[1, \"a\"]"), Error);
}
