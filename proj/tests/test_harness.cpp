#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "urnnet/error.hpp"
#include "urnnet/harness.hpp"

using namespace urnnet;

namespace {

Mat from_rows(const std::vector<std::vector<double>>& rows) {
    Mat m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
    return m;
}

Mat cycle_matrix(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, (i + 1) % n) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("single-run ensembles degenerate to that run") {
    const auto sys = make_system(cycle_matrix(3), Attitude::Competitive);
    const auto stats = run_ensemble(sys, StepSchedule::urn(1), 7, 1, 2000);
    REQUIRE(stats.runs.size() == 1);
    CHECK(stats.mean == stats.runs[0].final_state);
    for (double v : stats.variance) CHECK(v == 0.0);
    CHECK(stats.runs[0].seed == Xoshiro256pp::derive_seed(7, 0));

    // The recorded final state is the run's own trajectory end.
    const auto t = simulate(sys, StepSchedule::urn(1), stats.runs[0].seed, 2000);
    CHECK(t.final_state == stats.runs[0].final_state);
}

TEST_CASE("ensembles are reproducible and order-independent") {
    const auto sys = make_system(cycle_matrix(3), Attitude::Competitive);
    const auto a = run_ensemble(sys, StepSchedule::urn(1), 42, 8, 3000, {100, 1000});
    const auto b = run_ensemble(sys, StepSchedule::urn(1), 42, 8, 3000, {100, 1000});
    REQUIRE(a.runs.size() == b.runs.size());
    for (std::size_t k = 0; k < a.runs.size(); ++k) {
        CHECK(a.runs[k].final_state == b.runs[k].final_state);
        CHECK(a.runs[k].checkpoint_states == b.runs[k].checkpoint_states);
        CHECK(a.runs[k].run_index == k);
    }
    CHECK(a.checkpoints == (std::vector<std::size_t>{100, 1000}));

    // Run k's states equal an isolated simulation with the derived seed:
    // the pool cannot leak state across runs.
    const auto solo = simulate(sys, StepSchedule::urn(1), Xoshiro256pp::derive_seed(42, 5), 3000);
    CHECK(solo.final_state == a.runs[5].final_state);
}

TEST_CASE("class diagnostics are the advertised norms") {
    const Vec state{0.1, 0.6, 0.52, 0.9};
    CHECK(sync_gap({1, 2}, state) == doctest::Approx(0.08));
    CHECK(sync_gap({1}, state) == 0.0);
    CHECK(half_distance({0, 1}, state) == doctest::Approx(0.4));
    // Cross pairs: |0.1+0.6-1| = 0.3, |0.1+0.9-1| = 0, worst 0.3.
    CHECK(antisync_residual({0}, {1, 3}, state) == doctest::Approx(0.3));
}

TEST_CASE("default checkpoints clip to the horizon") {
    const auto cps = default_checkpoints(200000);
    CHECK(cps == (std::vector<std::size_t>{1000, 10000, 100000}));
    const auto short_cps = default_checkpoints(5000);
    for (std::size_t c : short_cps) CHECK(c <= 5000);
    CHECK_FALSE(short_cps.empty());
}

TEST_CASE("verification passes the three closed-class stories") {
    // Small horizons keep this fast; thresholds stay at their defaults.
    const auto half_sys = make_system(cycle_matrix(3), Attitude::Competitive);
    const auto half_an = analyze_system(half_sys);
    const auto half_stats = run_ensemble(half_sys, StepSchedule::urn(1), 5, 40, 100000);
    const auto half_rep = verify_against_prediction(half_stats, half_sys, half_an);
    REQUIRE(half_rep.verdicts.size() == 1);
    CHECK(half_rep.all_pass);
    CHECK(half_rep.verdicts[0].kind == LimitKind::DeterministicHalf);
    CHECK(half_rep.verdicts[0].statistic >= 0.95);
    CHECK(half_rep.verdicts[0].medians_nonincreasing);
    REQUIRE(half_rep.verdicts[0].checkpoint_medians.size() >= 2);

    const auto anti_sys = make_system(cycle_matrix(2), Attitude::Competitive);
    const auto anti_an = analyze_system(anti_sys);
    const auto anti_stats = run_ensemble(anti_sys, StepSchedule::urn(1), 5, 60, 50000);
    const auto anti_rep = verify_against_prediction(anti_stats, anti_sys, anti_an);
    CHECK(anti_rep.all_pass);
    CHECK(anti_rep.verdicts[0].kind == LimitKind::RandomAntiSynchronized);
    CHECK(anti_rep.verdicts[0].variance_applicable);
    CHECK(anti_rep.verdicts[0].cross_run_variance >= 1e-3);

    const auto coop_sys = make_system(
        from_rows({{0.2, 0.4, 0.4}, {0.4, 0.2, 0.4}, {0.4, 0.4, 0.2}}),
        Attitude::Cooperative);
    const auto coop_an = analyze_system(coop_sys);
    const auto coop_stats = run_ensemble(coop_sys, StepSchedule::urn(1), 5, 60, 50000);
    const auto coop_rep = verify_against_prediction(coop_stats, coop_sys, coop_an);
    CHECK(coop_rep.all_pass);
    CHECK(coop_rep.verdicts[0].kind == LimitKind::RandomSynchronized);
    CHECK(coop_rep.verdicts[0].cross_run_variance >= 1e-3);
}

TEST_CASE("verification fails honestly on crafted finals") {
    const auto sys = make_system(from_rows({{0.3, 0.3}, {0.2, 0.5}}), Attitude::Competitive);
    const auto an = analyze_system(sys);
    REQUIRE(an.classes[0].prediction.kind == LimitKind::DeterministicPoint);
    const Vec point = an.classes[0].prediction.point;  // -K^-1 c, roughly (0.31, 0.28)

    EnsembleStats stats;
    stats.n_runs = 3;
    stats.n_steps = 200000;
    stats.master_seed = 1;
    stats.runs.resize(3);
    for (std::size_t k = 0; k < 3; ++k) {
        stats.runs[k].run_index = k;
        stats.runs[k].final_state = point;
    }
    stats.runs[2].final_state[1] = point[1] + 0.03;  // one straggler

    auto refresh_moments = [](EnsembleStats& s) {
        const std::size_t n = s.runs[0].final_state.size();
        s.mean.assign(n, 0.0);
        s.variance.assign(n, 0.0);
        for (const auto& r : s.runs)
            for (std::size_t i = 0; i < n; ++i) s.mean[i] += r.final_state[i];
        for (double& m : s.mean) m /= static_cast<double>(s.runs.size());
        for (const auto& r : s.runs)
            for (std::size_t i = 0; i < n; ++i) {
                const double d = r.final_state[i] - s.mean[i];
                s.variance[i] += d * d;
            }
        if (s.runs.size() > 1)
            for (double& v : s.variance) v /= static_cast<double>(s.runs.size() - 1);
    };
    refresh_moments(stats);

    const auto rep = verify_against_prediction(stats, sys, an);
    CHECK_FALSE(rep.all_pass);
    CHECK(rep.verdicts[0].statistic == doctest::Approx(0.03));
    CHECK(rep.verdicts[0].threshold == doctest::Approx(0.02));

    // Within tolerance it passes.
    stats.runs[2].final_state[1] = point[1] + 0.01;
    refresh_moments(stats);
    CHECK(verify_against_prediction(stats, sys, an).all_pass);

    // A constant random limit trips the nondegeneracy flag.
    const auto coop = make_system(from_rows({{0.0, 1.0}, {1.0, 0.0}}), Attitude::Cooperative);
    const auto coop_an = analyze_system(coop);
    EnsembleStats flat;
    flat.n_runs = 40;
    flat.n_steps = 200000;
    flat.runs.resize(40);
    for (auto& r : flat.runs) r.final_state = Vec{0.5, 0.5};
    refresh_moments(flat);
    const auto flat_rep = verify_against_prediction(flat, coop, coop_an);
    CHECK_FALSE(flat_rep.all_pass);
    CHECK(flat_rep.verdicts[0].statistic <= 0.02);  // structure fine
    CHECK_FALSE(flat_rep.verdicts[0].nondegenerate);
    CHECK(flat_rep.verdicts[0].cross_run_variance == 0.0);
}

TEST_CASE("hierarchy residuals shrink and vanish without levels") {
    const Mat w = from_rows({{0, 1, 0}, {1, 0, 0}, {0.25, 0.25, 0.5}});
    const auto sys = make_system(w, Attitude::Competitive);
    const auto an = analyze_system(sys);

    const auto coarse = run_ensemble(sys, StepSchedule::urn(1), 11, 30, 10000);
    const auto fine = run_ensemble(sys, StepSchedule::urn(1), 11, 30, 100000);
    const auto res_c = hierarchy_residuals(coarse, sys, an);
    const auto res_f = hierarchy_residuals(fine, sys, an);
    REQUIRE(res_c.class_ids == std::vector<std::size_t>{1});
    CHECK(res_f.mean_residual[0] < res_c.mean_residual[0]);
    CHECK(res_f.mean_residual[0] < 0.02);
    CHECK(res_f.max_residual[0] >= res_f.mean_residual[0]);

    const auto flat_sys = make_system(cycle_matrix(3), Attitude::Competitive);
    const auto flat_an = analyze_system(flat_sys);
    const auto flat_stats = run_ensemble(flat_sys, StepSchedule::urn(1), 3, 4, 1000);
    const auto flat_res = hierarchy_residuals(flat_stats, flat_sys, flat_an);
    CHECK(flat_res.class_ids.empty());
}

TEST_CASE("stubborn source feeding a copying agent lands on the pin") {
    const Mat w = from_rows({{0.0, 0.0}, {1.0, 0.0}});
    const double pin = 0.73;
    const auto sys = make_system(w, Attitude::Cooperative, {}, {{0, pin}});
    const auto an = analyze_system(sys);
    CHECK(an.limit_deterministic[1]);
    CHECK(an.deterministic_limit[1] == doctest::Approx(pin));

    const auto stats = run_ensemble(sys, StepSchedule::urn(1), 19, 20, 100000);
    const auto res = hierarchy_residuals(stats, sys, an);
    REQUIRE(res.class_ids.size() == 1);
    CHECK(res.max_residual[0] < 0.02);
    for (const auto& r : stats.runs) CHECK(r.final_state[0] == pin);
}

TEST_CASE("nondegeneracy evidence and its error paths") {
    const auto urn = make_system(from_rows({{1.0}}), Attitude::Cooperative);
    const auto an = analyze_system(urn);
    REQUIRE(an.classes[0].prediction.kind == LimitKind::RandomSynchronized);

    const auto stats = run_ensemble(urn, StepSchedule::urn(1), 2, 200, 5000);
    const auto ev = nondegeneracy_test(stats, urn, an, 0);
    CHECK(ev.pass);
    CHECK(ev.variance > 1e-3);
    CHECK(ev.representative == 0);
    std::size_t binned = 0;
    for (std::size_t b : ev.histogram) binned += b;
    CHECK(binned == 200);

    const auto tiny = run_ensemble(urn, StepSchedule::urn(1), 2, 2, 100);
    CHECK_THROWS_AS(nondegeneracy_test(tiny, urn, an, 0), Error);
    try {
        nondegeneracy_test(tiny, urn, an, 0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewRuns);
    }

    const auto det = make_system(cycle_matrix(3), Attitude::Competitive);
    const auto det_an = analyze_system(det);
    const auto det_stats = run_ensemble(det, StepSchedule::urn(1), 2, 40, 100);
    try {
        nondegeneracy_test(det_stats, det, det_an, 0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotApplicable);
    }
}

TEST_CASE("verification rejects mismatched shapes") {
    const auto sys = make_system(cycle_matrix(2), Attitude::Competitive);
    const auto an = analyze_system(sys);
    EnsembleStats stats;
    stats.n_runs = 2;
    stats.runs.resize(2);
    for (auto& r : stats.runs) r.final_state = Vec{0.5, 0.5, 0.5};  // wrong width
    stats.mean = Vec(3, 0.5);
    stats.variance = Vec(3, 0.0);
    CHECK_THROWS_AS(verify_against_prediction(stats, sys, an), Error);
}
