#include "sdd/analysis.hpp"
#include "sdd/error.hpp"
#include "sdd/model.hpp"
#include "sdd/rng.hpp"
#include "sdd/trajectory.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace sdd;

TEST(BinEdges, IndexCoversClosedRange) {
    const BinEdges e{-1.0, 1.0, 20};
    EXPECT_EQ(e.index(-1.0), 0u);
    EXPECT_EQ(e.index(1.0), 19u);
    EXPECT_EQ(e.index(0.0), 10u);
    EXPECT_THROW(e.index(1.0000001), Error);
    EXPECT_DOUBLE_EQ(e.center(0), -0.95);
}

TEST(BinAccumulator, MergeIsOrderIndependent) {
    const BinEdges e{0.0, 1.0, 7};
    Rng rng(11);
    std::vector<BinAccumulator> parts(3, BinAccumulator(e));
    for (int i = 0; i < 3000; ++i) parts[static_cast<std::size_t>(i % 3)].add(rng.uniform(), rng.uniform());
    BinAccumulator ab = parts[0];
    ab.merge(parts[1]);
    ab.merge(parts[2]);
    BinAccumulator cb = parts[2];
    cb.merge(parts[0]);
    cb.merge(parts[1]);
    const auto s1 = ab.finish(), s2 = cb.finish();
    EXPECT_EQ(s1.counts, s2.counts);
    EXPECT_EQ(s1.total, 3000u);
    for (std::size_t i = 0; i < e.count; ++i) EXPECT_NEAR(s1.d_eff[i], s2.d_eff[i], 1e-15);
    EXPECT_THROW(ab.merge(BinAccumulator(BinEdges{0.0, 2.0, 7})), Error);
}

TEST(BinAccumulator, IidCountsHaveUnitInflation) {
    const BinEdges e{0.0, 1.0, 10};
    BinAccumulator acc(e, 0, 50, 2000);
    Rng rng(5);
    for (int i = 0; i < 100000; ++i) acc.add_position(rng.uniform());
    const auto s = acc.finish();
    EXPECT_LT(s.count_inflation, 1.6);
    double integral = 0.0;
    for (double d : s.density) integral += d * e.width();
    EXPECT_NEAR(integral, 1.0, 1e-12);
}

TEST(BinAccumulator, CorrelatedCountsInflate) {
    // Sticky chain: the state is redrawn only every 500 steps.
    const BinEdges e{0.0, 1.0, 10};
    BinAccumulator acc(e, 0, 40, 5000);
    Rng rng(6);
    double x = rng.uniform();
    for (int i = 0; i < 200000; ++i) {
        if (i % 500 == 0) x = rng.uniform();
        acc.add_position(x);
    }
    EXPECT_GT(acc.finish().count_inflation, 100.0);
}

TEST(ChiSquare, BatchedCorrectionIsNeutralForIidSamples) {
    const BinEdges e{0.0, 1.0, 10};
    BinAccumulator acc(e, 0, 100, 2000);
    Rng rng(8);
    for (int i = 0; i < 200000; ++i) acc.add_position(rng.uniform());
    const auto s = acc.finish();
    EXPECT_NEAR(s.chi_square_scale, 1.0, 0.25);
    EXPECT_GT(s.effective_dof, 6.0);
    EXPECT_LE(s.effective_dof, 9.0);
}

// Reflected random walk on [0, 1]: counts are dominated by a few slow modes.
// Under the null the corrected p-values should be roughly uniform.
TEST(ChiSquare, BatchedCorrectionIsCalibratedForCorrelatedChains) {
    const BinEdges e{0.0, 1.0, 20};
    const std::vector<double> flat(20, 0.05);
    int below_05 = 0, below_001 = 0, above_95 = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        BinAccumulator acc(e, 0, 50, 4000);
        Rng rng(1000 + static_cast<std::uint64_t>(rep));
        double x = rng.uniform();
        for (int i = 0; i < 200000; ++i) {
            x += 0.03 * rng.normal();
            while (x < 0.0 || x > 1.0) x = x < 0.0 ? -x : 2.0 - x;
            acc.add_position(x);
        }
        const double p = compare_chi_square_batched(acc.finish(), flat).p_value;
        below_05 += p < 0.05;
        below_001 += p < 0.001;
        above_95 += p > 0.95;
    }
    EXPECT_LE(below_05, 25);   // nominal 10 of 200
    EXPECT_LE(below_001, 4);   // the first-order correction gave 17
    EXPECT_LE(above_95, 40);   // the first-order correction put most runs here
}

TEST(ChiSquare, SurvivalMatchesClosedForms) {
    // dof 2: exp(-x/2); dof 1: erfc(sqrt(x/2)); dof 4: (1 + x/2) exp(-x/2)
    for (double x : {0.1, 1.0, 3.7, 12.0, 40.0}) {
        EXPECT_NEAR(chi_square_survival(x, 2), std::exp(-x / 2), 1e-14);
        EXPECT_NEAR(chi_square_survival(x, 1), std::erfc(std::sqrt(x / 2)), 1e-14);
        EXPECT_NEAR(chi_square_survival(x, 4), (1 + x / 2) * std::exp(-x / 2), 1e-14);
    }
}

TEST(ChiSquare, UniformSamplesPassAndSkewedFail) {
    const BinEdges e{-1.0, 1.0, 20};
    const auto flat = ScalarField::constant(Region::interval(-1, 1), 0.5);
    BinAccumulator good(e), bad(e);
    Rng rng(21);
    for (int i = 0; i < 200000; ++i) {
        good.add_position(rng.uniform(-1, 1));
        const double u = rng.uniform();
        bad.add_position(2.0 * std::sqrt(u) - 1.0);
    }
    EXPECT_GT(compare_chi_square(good.finish(), flat).p_value, 1e-3);
    EXPECT_LT(compare_chi_square(bad.finish(), flat).p_value, 1e-10);
    // Inflation divides the statistic.
    const auto r1 = compare_chi_square(bad.finish(), flat, 1.0);
    const auto r4 = compare_chi_square(bad.finish(), flat, 4.0);
    EXPECT_NEAR(r4.statistic * 4.0, r1.statistic, 1e-9 * r1.statistic);
}

TEST(ChiSquare, LowCountsAreReported) {
    const BinEdges e{0.0, 1.0, 4};
    BinAccumulator acc(e);
    for (int i = 0; i < 10; ++i) acc.add_position(0.1);
    try {
        compare_chi_square(acc.finish(), std::vector<double>(4, 0.25));
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), ErrorCode::low_count);
    }
}

TEST(BinProbabilities, MatchArctangentOracle) {
    const auto f = ScalarField::parse("[-1, 1]: 1 + x^2").raised(-1);
    const BinEdges e{-1.0, 1.0, 8};
    const auto p = bin_probabilities(f, e);
    const double total = std::atan(1.0) - std::atan(-1.0);
    for (std::size_t i = 0; i < e.count; ++i) {
        EXPECT_NEAR(p[i], (std::atan(e.edge(i + 1)) - std::atan(e.edge(i))) / total, 1e-13);
    }
}

TEST(BinTrajectory, DeffModesDifferOnlyInRejectedSteps) {
    SampledTrajectory t;
    t.dim = 1;
    t.h = 0.5;
    t.stride = 1;
    t.positions = {{0.1, 0}, {0.3, 0}, {0.3, 0}, {0.2, 0}};
    t.accepted = {1, 1, 0, 1};
    const BinEdges e{0.0, 1.0, 1};
    const auto all = bin_trajectory(t, e, 0, DeffMode::all_steps);
    const auto acc = bin_trajectory(t, e, 0, DeffMode::accepted_only);
    // steps: 0.04, 0, 0.01 over 2 h dim = 1
    EXPECT_NEAR(all.d_eff[0], (0.04 + 0.0 + 0.01) / 3.0, 1e-15);
    EXPECT_NEAR(acc.d_eff[0], (0.04 + 0.01) / 2.0, 1e-15);
    EXPECT_EQ(all.total, 4u);
}

TEST(BatchMeans, IidSeriesErrorMatchesSigmaOverRootN) {
    Rng rng(17);
    std::vector<double> v(100000);
    for (auto& x : v) x = rng.normal();
    const auto bm = batch_means(v, 50);
    EXPECT_NEAR(bm.std_error, 1.0 / std::sqrt(100000.0), 0.3 / std::sqrt(100000.0));
    EXPECT_NEAR(bm.mean, 0.0, 5.0 / std::sqrt(100000.0));
}

TEST(FitLine, RecoversExactLine) {
    const std::vector<double> x{0, 1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(2.5 * v - 1.0);
    const auto f = fit_line(x, y);
    EXPECT_NEAR(f.slope, 2.5, 1e-14);
    EXPECT_NEAR(f.intercept, -1.0, 1e-14);
    EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
    EXPECT_THROW(fit_line(std::vector<double>{1, 1}, std::vector<double>{0, 1}), Error);
}

TEST(MsdCurve, BallisticEnsemble) {
    // Straight lines at unit speed: MSD = t^2 exactly.
    const std::vector<double> times{1, 2, 3};
    std::vector<std::vector<Vec2>> disp;
    for (int m = 0; m < 8; ++m) {
        const double a = 0.7 * m;
        std::vector<Vec2> d;
        for (double t : times) d.push_back({t * std::cos(a), t * std::sin(a)});
        disp.push_back(d);
    }
    const auto c = msd_curve(disp, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        EXPECT_NEAR(c[k].msd, times[k] * times[k], 1e-12);
        EXPECT_NEAR(c[k].std_error, 0.0, 1e-12);
    }
}
