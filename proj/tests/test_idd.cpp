#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "risidd/idd.hpp"

using namespace risidd;

namespace {

struct Scenario {
    SystemConfig cfg;
    PowerBudget budget;
    ParityCheck pc;
    ChannelSet ch;
    ReflectionState refl;
};

Scenario make_scenario(SystemConfig cfg, std::uint64_t seed) {
    Scenario sc{std::move(cfg), {}, {}, {}, {}};
    sc.cfg.validate();
    sc.budget = split_power(sc.cfg);
    sc.pc = construct_code(sc.cfg.ldpc_n, sc.cfg.ldpc_rate, sc.cfg.seed);
    Rng rng(seed);
    const Geometry geo = make_geometry(sc.cfg, rng);
    sc.ch = draw_channels(sc.cfg, geo, rng);
    const DesignResult design = alternating_design(sc.ch, sc.cfg, sc.budget);
    sc.refl = design.state;
    return sc;
}

}  // namespace

TEST_CASE("received vectors carry signal, surface noise, and static noise", "[idd]") {
    Rng rng(71);
    const int M = 4, K = 2, N = 8;
    CMat Heff(M, K), G(M, N);
    for (Eigen::Index i = 0; i < Heff.size(); ++i) Heff(i) = rng.cnormal(1.0);
    for (Eigen::Index i = 0; i < G.size(); ++i) G(i) = rng.cnormal(1.0);
    CVec phi(N), x(K);
    for (int n = 0; n < N; ++n) phi[n] = rng.cnormal(1.0);
    for (int k = 0; k < K; ++k) x[k] = rng.cnormal(1.0);

    SECTION("no noise reproduces the effective channel output exactly") {
        Rng r2(1);
        const CVec y = synthesize_received(Heff, x, G, phi, 0.0, 0.0, r2);
        CHECK((y - Heff * x).norm() == 0.0);
    }

    SECTION("static-only noise has the configured per-antenna variance") {
        Rng r2(2);
        const double ss2 = 0.5;
        const int draws = 4000;
        double acc = 0.0;
        for (int it = 0; it < draws; ++it)
            acc += (synthesize_received(Heff, x, G, phi, 0.0, ss2, r2) - Heff * x).squaredNorm();
        CHECK(acc / (draws * M) == Catch::Approx(ss2).epsilon(0.1));
    }

    SECTION("surface noise adds the forwarded covariance") {
        Rng r2(3);
        const double sv2 = 0.4;
        const CMat gp = G * phi.asDiagonal();
        const double expected = sv2 * gp.squaredNorm();  // trace of the forwarded covariance
        const int draws = 4000;
        double acc = 0.0;
        for (int it = 0; it < draws; ++it)
            acc += (synthesize_received(Heff, x, G, phi, sv2, 0.0, r2) - Heff * x).squaredNorm();
        CHECK(acc / draws == Catch::Approx(expected).epsilon(0.1));
    }
}

TEST_CASE("frames are deterministic in the random stream", "[idd]") {
    SystemConfig cfg = desk_profile();
    cfg.ldpc_n = 128;
    cfg.tau = 1;
    cfg.ris_distance = 30.0;
    cfg.pt_per_user_dbm = 0.0;  // deep in the errorful regime, so payloads matter
    const Scenario sc = make_scenario(cfg, 100);

    Rng ra(5), rb(5);
    const FrameResult a = run_frame(sc.cfg, sc.budget, sc.pc, sc.ch, sc.refl, ra);
    const FrameResult b = run_frame(sc.cfg, sc.budget, sc.pc, sc.ch, sc.refl, rb);
    CHECK(a.bit_errors == b.bit_errors);
    CHECK(a.sum_rate == b.sum_rate);
    CHECK((a.sinr - b.sinr).norm() == 0.0);
    CHECK(a.converged_users == b.converged_users);

    Rng rc(6);
    const FrameResult c = run_frame(sc.cfg, sc.budget, sc.pc, sc.ch, sc.refl, rc);
    // different stream, same channel: payloads and noise differ
    CHECK((a.sum_rate != c.sum_rate || a.bit_errors != c.bit_errors));
}

TEST_CASE("frame results have coherent shapes and ranges", "[idd]") {
    SystemConfig cfg = desk_profile();
    cfg.ldpc_n = 128;
    cfg.tau = 2;
    cfg.ris_distance = 30.0;
    const Scenario sc = make_scenario(cfg, 101);

    Rng rng(7);
    const FrameResult fr = run_frame(sc.cfg, sc.budget, sc.pc, sc.ch, sc.refl, rng);
    REQUIRE(fr.bit_errors.size() == static_cast<std::size_t>(cfg.K));
    REQUIRE(fr.bits_total.size() == static_cast<std::size_t>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) {
        CHECK(fr.bits_total[static_cast<std::size_t>(k)] == sc.pc.k_info);
        CHECK(fr.bit_errors[static_cast<std::size_t>(k)] >= 0);
        CHECK(fr.bit_errors[static_cast<std::size_t>(k)] <= sc.pc.k_info);
    }
    REQUIRE(fr.sinr.size() == cfg.K);
    for (int k = 0; k < cfg.K; ++k) CHECK(fr.sinr[k] > 0.0);
    CHECK(fr.sum_rate > 0.0);
    CHECK(fr.converged_users >= 0);
    CHECK(fr.converged_users <= cfg.K);
    CHECK(fr.iterations_used == cfg.tau);
}

TEST_CASE("ample power drives the desk profile to error-free decoding", "[idd]") {
    SystemConfig cfg = desk_profile();
    cfg.ldpc_n = 256;
    cfg.tau = 1;
    cfg.ris_distance = 30.0;
    cfg.pt_per_user_dbm = 30.0;  // far above the operating region
    const Scenario sc = make_scenario(cfg, 102);

    Rng rng(9);
    int errors = 0;
    for (int f = 0; f < 5; ++f) {
        const FrameResult fr = run_frame(sc.cfg, sc.budget, sc.pc, sc.ch, sc.refl, rng);
        for (int e : fr.bit_errors) errors += e;
        CHECK(fr.converged_users == cfg.K);
    }
    CHECK(errors == 0);
}

TEST_CASE("the linear receiver reports the no-feedback SINR", "[idd]") {
    SystemConfig cfg = desk_profile();
    cfg.ldpc_n = 128;
    cfg.ris_distance = 30.0;
    cfg.tau = 0;
    const Scenario sc = make_scenario(cfg, 103);

    Rng rng(11);
    const FrameResult fr = run_frame(sc.cfg, sc.budget, sc.pc, sc.ch, sc.refl, rng);

    // reference: classical SINR of the full-power MMSE filter bank
    const CMat Heff = effective_channel(sc.ch, sc.refl.phi);
    const CMat ncov = noise_covariance(sc.ch.G, sc.refl.phi, sc.cfg.sigma_v2(), sc.cfg.sigma_s2());
    const CMat W = mmse_filter_bank(Heff, ncov, sc.budget.sigma_x2);
    for (int k = 0; k < cfg.K; ++k) {
        const double ref = sinr_linear(W.row(k).adjoint(), Heff, k, sc.ch.G, sc.refl.phi,
                                       sc.budget.sigma_x2, sc.cfg.sigma_v2(), sc.cfg.sigma_s2());
        CHECK(fr.sinr[k] == Catch::Approx(ref).epsilon(1e-10));
    }
    CHECK(fr.sum_rate == Catch::Approx(sum_rate(fr.sinr)).epsilon(1e-12));
}

TEST_CASE("passive frames ignore the surface-noise field", "[idd]") {
    SystemConfig clean = desk_profile();
    clean.ldpc_n = 128;
    clean.tau = 1;
    clean.ris_distance = 30.0;
    SystemConfig poisoned = clean;
    poisoned.sigma_v2_dbm = 30.0;  // must be inert in passive mode

    const Scenario a = make_scenario(clean, 104);
    const Scenario b = make_scenario(poisoned, 104);
    Rng ra(13), rb(13);
    const FrameResult fa = run_frame(a.cfg, a.budget, a.pc, a.ch, a.refl, ra);
    const FrameResult fb = run_frame(b.cfg, b.budget, b.pc, b.ch, b.refl, rb);
    CHECK(fa.bit_errors == fb.bit_errors);
    CHECK(fa.sum_rate == fb.sum_rate);
}
