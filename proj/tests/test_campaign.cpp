#include <gtest/gtest.h>

#include "dterm/campaign.hpp"

using namespace dterm;

namespace {

std::string fingerprint(const CampaignSummary& s) {
  std::string out;
  for (const auto& r : s.runs) {
    out += std::to_string(r.seed) + ":" + std::to_string(r.termination.value_or(-1)) + ":" +
           std::to_string(r.max_single_persistence) + ":" + std::to_string(r.fault_reports) + ";";
  }
  return out;
}

}  // namespace

TEST(Campaign, ThreadedMatchesSerial) {
  CampaignSpec spec;
  spec.method = Method::fault_tolerant;
  spec.n_max = 12;
  spec.runs = 40;
  spec.faults = FaultMode::random;
  auto serial = run_campaign(spec);
  spec.threads = 4;
  auto threaded = run_campaign(spec);
  EXPECT_EQ(fingerprint(serial), fingerprint(threaded));
  EXPECT_TRUE(serial.ok());
}

TEST(Campaign, ScenariosAreReproducible) {
  CampaignSpec spec;
  spec.faults = FaultMode::persistent;
  spec.method = Method::fault_tolerant;
  for (std::size_t i = 0; i < 20; ++i) {
    std::uint64_t a = 0, b = 0;
    auto x = make_campaign_scenario(spec, i, &a);
    auto y = make_campaign_scenario(spec, i, &b);
    EXPECT_EQ(a, b);
    EXPECT_EQ(x.graph, y.graph);
    EXPECT_EQ(x.faults.size(), y.faults.size());
    auto val = validate(x);
    EXPECT_FALSE(val.faulty_set_is_cutset);
  }
}

TEST(Campaign, SummaryTable) {
  CampaignSpec spec;
  spec.runs = 5;
  spec.n_max = 6;
  auto s = run_campaign(spec);
  EXPECT_EQ(s.runs.size(), 5u);
  EXPECT_EQ(s.tally.at("exact-termination").pass, 5u);
  auto table = format_summary(s);
  EXPECT_NE(table.find("exact-termination"), std::string::npos);
  EXPECT_EQ(to_string(fault_mode_from_string("persistent")), "persistent");
  EXPECT_THROW(fault_mode_from_string("sometimes"), ContractError);
}
