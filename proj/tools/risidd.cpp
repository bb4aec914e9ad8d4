// Command-line front end: Monte Carlo sweeps, closed-form deployment
// curves, LDPC matrix export, and the built-in sanity checks.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "risidd/risidd.hpp"

namespace {

// Config fields exposed as flags on a subcommand.  Only flags the user
// actually set override the chosen profile.
class ConfigFlags {
  public:
    void attach(CLI::App& cmd) {
        opt_k_ = cmd.add_option("--K", ovr_.K, "User count");
        opt_m_ = cmd.add_option("--M", ovr_.M, "AP antenna count");
        opt_n_ = cmd.add_option("--N", ovr_.N, "RIS element count");
        opt_ss2_ = cmd.add_option("--sigma_s2_dbm", ovr_.sigma_s2_dbm, "Static AP noise power (dBm)");
        opt_sv2_ = cmd.add_option("--sigma_v2_dbm", ovr_.sigma_v2_dbm,
                                  "RIS dynamic noise power (dBm, active mode only)");
        opt_pt_ = cmd.add_option("--pt_per_user_dbm", ovr_.pt_per_user_dbm,
                                 "Total transmit power divided by K (dBm)");
        opt_ldpc_n_ = cmd.add_option("--ldpc_n", ovr_.ldpc_n, "Code block length");
        opt_rate_ = cmd.add_option("--ldpc_rate", ovr_.ldpc_rate, "Code rate in (0,1)");
        opt_inner_ = cmd.add_option("--ldpc_max_inner", ovr_.ldpc_max_inner,
                                    "Belief-propagation iterations per decoder call");
        opt_nalt_ = cmd.add_option("--n_alt", ovr_.n_alt, "Alternating reflection-design rounds");
        opt_span_ = cmd.add_option("--span_L", ovr_.span_L, "AP-user span (m)");
        opt_dist_ = cmd.add_option("--ris_distance", ovr_.ris_distance,
                                   "RIS horizontal distance from the AP (m)");
        opt_height_ = cmd.add_option("--ris_height", ovr_.ris_height, "RIS height (m)");
        opt_radius_ = cmd.add_option("--user_radius", ovr_.user_radius, "User placement radius (m)");
    }

    risidd::SystemConfig resolve(const std::string& profile) const {
        risidd::SystemConfig cfg =
            profile == "paper" ? risidd::paper_profile() : risidd::desk_profile();
        if (*opt_k_) cfg.K = ovr_.K;
        if (*opt_m_) cfg.M = ovr_.M;
        if (*opt_n_) cfg.N = ovr_.N;
        if (*opt_ss2_) cfg.sigma_s2_dbm = ovr_.sigma_s2_dbm;
        if (*opt_sv2_) cfg.sigma_v2_dbm = ovr_.sigma_v2_dbm;
        if (*opt_pt_) cfg.pt_per_user_dbm = ovr_.pt_per_user_dbm;
        if (*opt_ldpc_n_) cfg.ldpc_n = ovr_.ldpc_n;
        if (*opt_rate_) cfg.ldpc_rate = ovr_.ldpc_rate;
        if (*opt_inner_) cfg.ldpc_max_inner = ovr_.ldpc_max_inner;
        if (*opt_nalt_) cfg.n_alt = ovr_.n_alt;
        if (*opt_span_) cfg.span_L = ovr_.span_L;
        if (*opt_dist_) cfg.ris_distance = ovr_.ris_distance;
        if (*opt_height_) cfg.ris_height = ovr_.ris_height;
        if (*opt_radius_) cfg.user_radius = ovr_.user_radius;
        return cfg;
    }

  private:
    risidd::SystemConfig ovr_;
    CLI::Option *opt_k_ = nullptr, *opt_m_ = nullptr, *opt_n_ = nullptr, *opt_ss2_ = nullptr,
                *opt_sv2_ = nullptr, *opt_pt_ = nullptr, *opt_ldpc_n_ = nullptr,
                *opt_rate_ = nullptr, *opt_inner_ = nullptr, *opt_nalt_ = nullptr,
                *opt_span_ = nullptr, *opt_dist_ = nullptr, *opt_height_ = nullptr,
                *opt_radius_ = nullptr;
};

int cmd_sweep(const std::string& profile, const ConfigFlags& flags, const std::string& variable,
              const std::vector<double>& values, const std::string& scheme,
              const std::vector<int>& tau_list, int frames, std::uint64_t seed, int threads,
              const std::string& out_path) {
    risidd::SweepSpec spec;
    spec.base = flags.resolve(profile);
    spec.base.frames = frames;
    spec.base.seed = seed;
    spec.variable = risidd::variable_from_string(variable);
    spec.values = values;
    spec.scheme = risidd::scheme_from_string(scheme);
    spec.tau_list = tau_list;
    spec.threads = threads;

    const risidd::SweepResult res = risidd::run_sweep(spec);
    risidd::emit_csv(res.rows, out_path);
    risidd::write_metadata(spec, out_path + ".meta");

    std::printf("%s\n", risidd::kCsvHeader);
    for (const auto& r : res.rows)
        std::printf("%s,%d,%s,%g,%d,%.6g,%.6g,%.6g,%llu,%s\n", r.scheme.c_str(), r.tau,
                    r.variable.c_str(), r.value, r.frames, r.ber, r.sum_rate_mean,
                    r.sum_rate_stderr, static_cast<unsigned long long>(r.seed),
                    r.config_hash.c_str());
    std::printf("# wrote %zu rows to %s (+.meta); %d/%d trials failed\n", res.rows.size(),
                out_path.c_str(), res.trials_failed, res.trials_attempted);
    for (const auto& f : res.failures) std::printf("# failed trial %s\n", f.c_str());
    return 0;
}

int cmd_deploy(const std::string& mode_str, double span, int elements, double pt_dbm,
               double noise_dbm, double ris_noise_dbm, double fraction,
               const std::string& direct, double d_start, double d_stop, double d_step,
               const std::string& out_path) {
    const risidd::RisMode mode = risidd::ris_mode_from_string(mode_str);
    risidd::SisoScenario sc;
    sc.L = span;
    sc.N = elements;
    sc.sigma_x2 = risidd::dbm_to_linear(pt_dbm);
    sc.sigma_n2 = risidd::dbm_to_linear(noise_dbm);
    sc.sigma_v2 = mode == risidd::RisMode::active ? risidd::dbm_to_linear(ris_noise_dbm) : 0.0;
    sc.p_ris_fraction = fraction;
    sc.direct_model = direct == "weak" ? risidd::DirectModel::weak : risidd::DirectModel::strong;
    sc.validate();

    std::vector<double> grid;
    for (double d = d_start; d <= d_stop + 1e-9; d += d_step) grid.push_back(d);
    const risidd::DeploymentCurve curve = risidd::deployment_curve(mode, sc, grid);

    std::ofstream out;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
        out.open(out_path, std::ios::binary);
        if (!out) {
            std::fprintf(stderr, "cannot open %s\n", out_path.c_str());
            return 1;
        }
        os = &out;
    }
    (*os) << "d,snr_db\n";
    char buf[64];
    for (const auto& p : curve.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.d, risidd::linear_to_db(p.snr));
        (*os) << buf;
    }
    if (!out_path.empty())
        std::printf("# wrote %zu points to %s\n", curve.points.size(), out_path.c_str());
    return 0;
}

int cmd_selftest() {
    const auto results = risidd::run_selftests();
    int failures = 0;
    for (const auto& r : results) {
        std::printf("[%s] %-32s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        if (!r.pass) ++failures;
    }
    std::printf("%zu checks, %d failed\n", results.size(), failures);
    return failures == 0 ? 0 : 1;
}

int cmd_ldpc_export(int n, double rate, std::uint64_t seed, const std::string& out_path,
                    const std::string& check_path) {
    if (!check_path.empty()) {
        std::ifstream in(check_path, std::ios::binary);
        if (!in) {
            std::fprintf(stderr, "cannot open %s\n", check_path.c_str());
            return 1;
        }
        const risidd::ParityCheck pc = risidd::load_parity_check(in);
        std::printf("loaded %dx%d matrix, k_info=%d, girth>=6: %s\n", pc.m, pc.n, pc.k_info,
                    pc.girth6 ? "yes" : "no");
        return 0;
    }
    const risidd::ParityCheck pc = risidd::construct_code(n, rate, seed);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "cannot open %s\n", out_path.c_str());
        return 1;
    }
    risidd::save_parity_check(pc, out);
    std::printf("wrote %dx%d matrix (k_info=%d, girth>=6: %s) to %s\n", pc.m, pc.n, pc.k_info,
                pc.girth6 ? "yes" : "no", out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Link-level simulator for surface-assisted multiuser uplinks with iterative "
        "detection and decoding"};
    app.require_subcommand(1);

    // sweep
    auto* sweep = app.add_subcommand(
        "sweep",
        "Monte Carlo sweep of one variable. Transmit power is given as total P_T/K in dBm; "
        "the per-symbol power is additionally divided by the code rate.");
    sweep->set_config("--config", "", "Read defaults from a key=value file");
    std::string variable = "ris_distance";
    std::vector<double> values;
    std::string scheme = "idd_passive";
    std::vector<int> tau_list{1};
    std::string profile = "desk";
    int frames = 0;
    std::uint64_t seed = 1;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string out_path = "sweep.csv";
    sweep->add_option("--variable", variable, "One of ris_distance|power_per_user|users|antennas|elements")
        ->check(CLI::IsMember({"ris_distance", "power_per_user", "users", "antennas", "elements"}));
    sweep->add_option("--values", values, "Sweep values, strictly increasing")->required();
    sweep->add_option("--scheme", scheme, "One of linear_passive|linear_active|idd_passive|idd_active")
        ->check(CLI::IsMember({"linear_passive", "linear_active", "idd_passive", "idd_active"}));
    sweep->add_option("--tau", tau_list, "IDD depths to run (ignored for linear schemes)");
    sweep->add_option("--profile", profile, "Baseline parameter profile")
        ->check(CLI::IsMember({"desk", "paper"}));
    sweep->add_option("--frames", frames, "Monte Carlo trials per sweep point (0 = profile default)");
    sweep->add_option("--seed", seed, "Base seed; all trial seeds derive from it");
    sweep->add_option("--threads", threads, "Worker threads for trials");
    sweep->add_option("--out", out_path, "Output CSV path");
    ConfigFlags flags;
    flags.attach(*sweep);

    // deploy-analytic
    auto* deploy = app.add_subcommand("deploy-analytic",
                                      "Closed-form single-antenna SNR-vs-position curve");
    std::string mode = "passive";
    double span = 400.0;
    int elements = 64;
    double pt_dbm = 6.0, noise_dbm = -100.0, ris_noise_dbm = -95.0, fraction = 0.1;
    std::string direct = "strong";
    double d_start = 1.0, d_stop = 399.0, d_step = 1.0;
    std::string deploy_out;
    deploy->add_option("--mode", mode, "passive or active")
        ->check(CLI::IsMember({"passive", "active"}));
    deploy->add_option("--span_L", span, "AP-user span (m)");
    deploy->add_option("--N", elements, "Element count");
    deploy->add_option("--pt_dbm", pt_dbm, "Transmit power (dBm)");
    deploy->add_option("--noise_dbm", noise_dbm, "Receiver noise power (dBm)");
    deploy->add_option("--ris_noise_dbm", ris_noise_dbm, "Surface noise power (dBm, active only)");
    deploy->add_option("--fraction", fraction, "Surface power budget as a fraction of P_T");
    deploy->add_option("--direct", direct, "Path-loss model for the direct link")
        ->check(CLI::IsMember({"strong", "weak"}));
    deploy->add_option("--d_start", d_start, "First surface position (m)");
    deploy->add_option("--d_stop", d_stop, "Last surface position (m)");
    deploy->add_option("--d_step", d_step, "Grid step (m)")->check(CLI::PositiveNumber);
    deploy->add_option("--out", deploy_out, "Output CSV path (stdout when omitted)");

    // selftest
    app.add_subcommand("selftest", "Run the built-in sanity checks");

    // ldpc-export
    auto* ldpc = app.add_subcommand(
        "ldpc-export", "Write the parity-check matrix as text (header 'n m', one row of "
                       "column indices per check)");
    int code_n = 512;
    double code_rate = 0.5;
    std::uint64_t code_seed = 1;
    std::string ldpc_out = "parity.txt";
    std::string ldpc_check;
    ldpc->add_option("--n", code_n, "Block length");
    ldpc->add_option("--rate", code_rate, "Code rate");
    ldpc->add_option("--seed", code_seed, "Construction seed");
    ldpc->add_option("--out", ldpc_out, "Output path");
    ldpc->add_option("--check", ldpc_check, "Validate an existing matrix file instead of exporting");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            risidd::SystemConfig base = flags.resolve(profile);
            if (frames <= 0) frames = base.frames;
            return cmd_sweep(profile, flags, variable, values, scheme, tau_list, frames, seed,
                             threads, out_path);
        }
        if (deploy->parsed())
            return cmd_deploy(mode, span, elements, pt_dbm, noise_dbm, ris_noise_dbm, fraction,
                              direct, d_start, d_stop, d_step, deploy_out);
        if (ldpc->parsed()) return cmd_ldpc_export(code_n, code_rate, code_seed, ldpc_out, ldpc_check);
        return cmd_selftest();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
