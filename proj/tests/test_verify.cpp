#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "egmrsi/config.hpp"
#include "egmrsi/errors.hpp"
#include "egmrsi/rng.hpp"
#include "egmrsi/runner.hpp"
#include "egmrsi/verify.hpp"

using namespace egmrsi;

namespace {

const RunArtifacts& short_run() {
    static const RunArtifacts a = [] {
        RunConfig cfg;
        cfg.steps = 600;
        const RunResult r = run(cfg);
        // Checks read serialized traces; round-trip through the CSV format.
        std::stringstream trace, report(r.report.str());
        write_trace(trace, r.rows);
        return RunArtifacts{"memory", read_trace(trace), KeyValueReport::parse(report)};
    }();
    return a;
}

CheckStatus status_of(const RunArtifacts& run, const std::string& name) {
    const std::vector<RunArtifacts> runs{run};
    const std::vector<std::string> sel{name};
    const StatReport rep = verify(runs, sel);
    return rep.find(name)->status;
}

const std::vector<std::string> kHardBounds{"clip_bound",     "trigger_biconditional", "md_mce_bounds",
                                           "mi_entropy_bound", "external_reward_bound", "safety_region",
                                           "lipschitz_step", "reward_accounting",    "goal_monotone"};

}  // namespace

TEST(Registry, NamesAreUniqueAndPartitionedByKind) {
    std::set<std::string> names;
    for (const CheckSpec& c : registry()) EXPECT_TRUE(names.insert(c.name).second) << c.name;
    EXPECT_EQ(checks_of_kind(CheckKind::trace).size() + checks_of_kind(CheckKind::synthetic).size(),
              all_checks().size());
    EXPECT_THROW(find_check("no_such_check"), PreconditionError);
}

TEST(Verify, EmptySelectionGivesEmptyReport) {
    const std::vector<RunArtifacts> runs{short_run()};
    const StatReport rep = verify(runs, std::vector<std::string>{});
    EXPECT_TRUE(rep.checks.empty());
    EXPECT_TRUE(rep.all_pass());
}

TEST(Verify, SelectionRunsInRegistryOrderWithoutDuplicates) {
    const std::vector<RunArtifacts> runs{short_run()};
    const StatReport rep = verify(runs, std::vector<std::string>{"md_mce_bounds", "clip_bound", "clip_bound"});
    ASSERT_EQ(rep.checks.size(), 2u);
    EXPECT_EQ(rep.checks[0].name, "clip_bound");
    EXPECT_EQ(rep.checks[1].name, "md_mce_bounds");
    EXPECT_THROW(verify(runs, std::vector<std::string>{"bogus"}), PreconditionError);
}

TEST(Verify, HardBoundsHoldOnASimulatedRun) {
    for (const std::string& name : kHardBounds) EXPECT_EQ(status_of(short_run(), name), CheckStatus::pass) << name;
}

TEST(Verify, EventualAcceptanceNeedsLongRuns) {
    EXPECT_EQ(status_of(short_run(), "goal_eventual_acceptance"), CheckStatus::not_applicable);
}

TEST(Verify, InjectedFaultsAreDetected) {
    struct Fault {
        std::string check;
        void (*inject)(TraceRow&);
    };
    const std::vector<Fault> faults{
        {"clip_bound", [](TraceRow& r) { r.grad_norm_post = 2.0 * r.k_max + 1.0; }},
        {"trigger_biconditional", [](TraceRow& r) { r.fired = r.fired ? 0 : 1; }},
        {"md_mce_bounds", [](TraceRow& r) { r.md = 100.0; }},
        {"external_reward_bound", [](TraceRow& r) { r.r_ext = 50.0; }},
        {"safety_region", [](TraceRow& r) { r.in_region = 0; }},
        {"reward_accounting", [](TraceRow& r) { r.total = r.total * 1.001 + 1.0; }},
        {"toll_envelope", [](TraceRow& r) { r.toll_l1 += 100.0; }},
    };
    for (const Fault& f : faults) {
        RunArtifacts bad = short_run();
        f.inject(bad.rows[bad.rows.size() / 2]);
        EXPECT_EQ(status_of(bad, f.check), CheckStatus::fail) << f.check;
    }
}

TEST(Verify, ReportListsEveryCheck) {
    const std::vector<RunArtifacts> runs{short_run()};
    const StatReport rep = verify(runs, std::vector<std::string>{"clip_bound", "md_mce_bounds"});
    const KeyValueReport kv = rep.to_report();
    EXPECT_EQ(kv.get("check.clip_bound.status"), "pass");
    EXPECT_EQ(kv.get("checks_run"), "2");
    EXPECT_EQ(kv.get("checks_failed"), "0");
    EXPECT_TRUE(kv.contains("overall"));
}

TEST(SyntheticExperiments, BinaryChannelMiIsALowerBound) {
    Rng rng(1);
    const ChannelMiResult r = binary_channel_mi(50000, 0.1, 0.25, rng);
    const double truth = std::log(2.0) - binary_entropy_nats(0.1);
    EXPECT_NEAR(r.truth, truth, 1e-12);
    EXPECT_NEAR(r.truth, 0.368064, 1e-6);
    EXPECT_NEAR(r.matched.value, truth, 4.0 * r.matched.std_error);
    EXPECT_LT(r.blurred.value, r.matched.value);
}

TEST(SyntheticExperiments, TollExceedanceFallsWithEpsilon) {
    Rng rng(2);
    const std::vector<double> eps{0.1, 0.5, 1.0};
    const auto pts = toll_concentration_experiment(200, 1000, 4, 0.01, eps, rng);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_GE(pts[0].exceedance, pts[1].exceedance);
    EXPECT_GE(pts[1].exceedance, pts[2].exceedance);
    for (const TollPoint& p : pts) EXPECT_LE(p.azuma, p.azuma_steps);
}
