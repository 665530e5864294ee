#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "walkport/json_io.hpp"
#include "walkport/walkport.hpp"

namespace {

using namespace walkport;

constexpr int exit_ok = 0;
constexpr int exit_verification_failure = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

cplx parse_complex(const std::string& text) {
    std::istringstream in(text);
    double re = 0.0, im = 0.0;
    char comma = ',';
    if (!(in >> re)) throw UsageError("expected RE,IM but got '" + text + "'");
    if (in >> comma) {
        if (comma != ',' || !(in >> im)) throw UsageError("expected RE,IM but got '" + text + "'");
    }
    return {re, im};
}

SecretSpec parse_secret(const std::string& alpha_text, const std::string& beta_text) {
    const cplx a = parse_complex(alpha_text);
    const cplx b = parse_complex(beta_text);
    const double n2 = std::norm(a) + std::norm(b);
    if (n2 < 1e-12) throw UsageError("alpha and beta cannot both vanish");
    const double scale = 1.0 / std::sqrt(n2);
    if (std::abs(n2 - 1.0) > norm_tol)
        std::cerr << "note: normalizing (alpha, beta) by " << scale << "\n";
    return SecretSpec(a * scale, b * scale);
}

Variant parse_variant(const std::string& name) {
    if (name == "homogeneous") return Variant::homogeneous;
    if (name == "position-dependent") return Variant::position_dependent;
    throw UsageError("unknown variant '" + name + "'");
}

void emit(const json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw UsageError("cannot open output file '" + out_path + "'");
        out << report.dump(2) << "\n";
    }
}

struct RunFlags {
    int n = 2, m = 2;
    std::string variant = "position-dependent";
    std::string alpha = "0.7071067811865476,0";
    std::string beta = "0.7071067811865476,0";
    std::string mode = "enumerate";
    std::uint64_t seed = 0;
    int corrected_receiver = 1;
    std::string out_path;
    bool dump_circuit = false;
};

int cmd_run(const RunFlags& flags) {
    ProtocolConfig config{flags.n, flags.m, parse_variant(flags.variant), flags.corrected_receiver};
    try {
        config.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (flags.mode != "enumerate" && flags.mode != "sample") throw UsageError("mode must be enumerate or sample");
    const SecretSpec secret = parse_secret(flags.alpha, flags.beta);
    const MeasureMode mode = flags.mode == "enumerate" ? MeasureMode::enumerate_all : MeasureMode::sample_one;

    const auto started = std::chrono::steady_clock::now();
    const RunResult result = run_protocol(config, secret, mode, flags.seed);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

    json outcomes = json::array();
    for (const auto& v : result.outcomes) {
        outcomes.push_back({{"outcome", to_json(v.outcome)},
                            {"omega", v.omega},
                            {"correction", to_json(v.plan)},
                            {"fidelity", v.fidelity_vs_target},
                            {"receiver_state", to_json(v.corrected)}});
    }
    json report = {{"config", to_json(config, secret)},
                   {"mode", flags.mode},
                   {"seed", flags.seed},
                   {"outcomes", outcomes},
                   {"aggregate",
                    {{"min_fidelity", result.min_fidelity},
                     {"outcome_count", result.outcomes.size()},
                     {"probability_sum", result.probability_sum},
                     {"wall_time_ms", wall_ms}}},
                   {"version", version}};
    if (flags.dump_circuit) report["circuit"] = to_json(circuit_steps(config), config.shape());
    emit(report, flags.out_path);

    // the probabilities only telescope to one when every branch is enumerated
    const bool complete = mode != MeasureMode::enumerate_all || std::abs(result.probability_sum - 1.0) <= compare_tol;
    const bool pass = result.all_pass() && complete;
    std::cerr << (pass ? "PASS" : "FAIL") << ": " << result.outcomes.size() << " outcome(s), min fidelity "
              << result.min_fidelity << "\n";
    return pass ? exit_ok : exit_verification_failure;
}

struct Check {
    std::string name;
    int n, m;
    double deviation;    // distance-like; smaller is better
    bool pass;
};

void run_identity_checks(int n, int m, std::vector<Check>& checks) {
    const SystemShape shape(n, m);
    std::mt19937_64 rng(0xC0FFEE ^ (static_cast<std::uint64_t>(n) << 8) ^ static_cast<std::uint64_t>(m));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    auto random_secret = [&] {
        const double chi = angle(rng) / 4.0;
        return SecretSpec(std::polar(std::cos(chi), angle(rng)), std::polar(std::sin(chi), angle(rng)));
    };

    auto push = [&](const std::string& name, double deviation, double tol) {
        checks.push_back({name, n, m, deviation, deviation <= tol});
    };

    double dev_h = 0.0, dev_p = 0.0, dev_multiset = 0.0, dev_expansion = 0.0, dev_swap = 0.0, dev_split = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const SecretSpec secret = random_secret();
        const auto mid =
            stage_one(prepare_shared_secret(secret, shape), shape, homogeneous_rules(n, CoinRule::identity()));
        const auto h = stage_two(mid, shape, homogeneous_rules(m, CoinRule::hadamard()));
        dev_h = std::max(dev_h, 1.0 - fidelity(h, oracle::closed_form_h(shape, secret)));
        const auto p = stage_two(mid, shape, position_dependent_rules(m));
        dev_p = std::max(dev_p, 1.0 - fidelity(p, oracle::closed_form_p(shape, secret)));
        dev_multiset = std::max(dev_multiset,
                                max_term_distance(oracle::closed_form_h_unnormalized(shape, secret),
                                                  oracle::closed_form_h_reordered_unnormalized(shape, secret)));
        const auto qubits = oracle::qubit_register(m);
        dev_expansion = std::max(dev_expansion,
                                 max_term_distance(oracle::shared_secret_xbasis_expansion(secret, qubits).normalized(),
                                                   oracle::ghz_secret(secret, qubits).normalized()));

        OutcomeRecord outcome;
        outcome.p_bits.assign(static_cast<std::size_t>(n - 1), 0);
        outcome.c_bits.assign(static_cast<std::size_t>(n), 0);
        const LambdaRanges ranges(m);
        for (int branch = 0; branch < 2; ++branch) {
            const int limit = branch == 0 ? ranges.m_tprime : ranges.m_prime;
            for (int index = 0; index <= limit; ++index) {
                outcome.p1 = {branch, index};
                const auto state = oracle::expected_receiver_state(Variant::homogeneous, shape, outcome, secret);
                for (int a = 1; a <= m; ++a)
                    for (int b = a + 1; b <= m; ++b)
                        dev_swap = std::max(dev_swap, max_term_distance(state, swap_slots(state, shape.receiver_coin(a),
                                                                                          shape.receiver_coin(b))));
            }
        }
    }
    {
        const auto space = oracle::qubit_register(m);
        const Slot last = coin_slot(m - 1);
        const auto helper_space = space.without(last);
        SlotSpace last_space({last}, {2});
        for (int k = 0; k <= m; ++k) {
            StateVector rebuilt(space);
            if (k <= m - 1)
                rebuilt = rebuilt + tensor_product(oracle::perm_sum(k, helper_space),
                                                   StateVector::basis_state(last_space, std::vector<int>{0}));
            if (k >= 1)
                rebuilt = rebuilt + tensor_product(oracle::perm_sum(k - 1, helper_space),
                                                   StateVector::basis_state(last_space, std::vector<int>{1}));
            dev_split = std::max(dev_split, max_term_distance(oracle::perm_sum(k, space), rebuilt));
        }
    }

    push("closed-form-homogeneous", dev_h, compare_tol);
    push("closed-form-position-dependent", dev_p, compare_tol);
    push("regrouped-multiset", dev_multiset, norm_tol);
    push("perm-split", dev_split, norm_tol);
    push("shared-secret-expansion", dev_expansion, norm_tol);
    push("receiver-swap", dev_swap, norm_tol);
}

struct VerifyFlags {
    int n = 2, m = 2;
    bool all = false;
    std::string out_path;
};

int cmd_verify(const VerifyFlags& flags) {
    std::vector<Check> checks;
    if (flags.all) {
        for (int n = 1; n <= 3; ++n)
            for (int m = 2; m <= 4; ++m) run_identity_checks(n, m, checks);
    } else {
        if (flags.n < 1 || flags.m < 2) throw UsageError("verify needs n >= 1 and m >= 2");
        run_identity_checks(flags.n, flags.m, checks);
    }

    json rows = json::array();
    const Check* first_failure = nullptr;
    for (const auto& c : checks) {
        rows.push_back({{"name", c.name}, {"n", c.n}, {"m", c.m}, {"deviation", c.deviation}, {"pass", c.pass}});
        std::cerr << (c.pass ? "ok  " : "FAIL") << " n=" << c.n << " m=" << c.m << " " << c.name
                  << " (deviation " << c.deviation << ")\n";
        if (!c.pass && first_failure == nullptr) first_failure = &c;
    }
    emit(json{{"checks", rows}, {"pass", first_failure == nullptr}, {"version", version}}, flags.out_path);
    if (first_failure != nullptr) {
        std::cerr << "first failing identity: " << first_failure->name << " at n=" << first_failure->n
                  << " m=" << first_failure->m << "\n";
        return exit_verification_failure;
    }
    return exit_ok;
}

struct SecurityFlags {
    int n = 2, m = 2;
    std::string variant = "homogeneous";
    std::string alpha = "0.6,0";
    std::string beta = "0.8,0";
    std::string measured;
    std::string probe;
    std::string out_path;
};

std::vector<int> parse_measured(const std::string& text) {
    std::vector<int> out;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        try {
            out.push_back(std::stoi(token));
        } catch (const std::exception&) {
            throw UsageError("bad sender index '" + token + "' in --measured");
        }
    }
    return out;
}

std::vector<security::Party> parse_probe(const std::string& text) {
    std::vector<security::Party> out;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (token.size() < 2 || (token[0] != 'r' && token[0] != 's'))
            throw UsageError("probe parties look like r1 or s2; got '" + token + "'");
        int index = 0;
        try {
            index = std::stoi(token.substr(1));
        } catch (const std::exception&) {
            throw UsageError("bad probe party '" + token + "'");
        }
        out.push_back(token[0] == 'r' ? security::receiver(index) : security::sender(index));
    }
    return out;
}

int cmd_security(const SecurityFlags& flags) {
    ProtocolConfig config{flags.n, flags.m, parse_variant(flags.variant)};
    try {
        config.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const SecretSpec secret = parse_secret(flags.alpha, flags.beta);

    if (!flags.measured.empty() || !flags.probe.empty()) {
        if (flags.measured.empty() || flags.probe.empty())
            throw UsageError("give both --measured and --probe for a single scenario");
        security::SecurityScenario scenario{config, secret, parse_measured(flags.measured),
                                            parse_probe(flags.probe)};
        security::BlindnessReport report;
        try {
            report = security::phase_blindness_check(scenario, {0.0, std::numbers::pi / 4, std::numbers::pi / 2,
                                                                std::numbers::pi, 2.1});
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        json probe_names = json::array();
        for (const auto& p : scenario.probe) probe_names.push_back(security::party_name(p));
        emit(json{{"scenario",
                   {{"config", to_json(config, secret)},
                    {"measured", scenario.measured_senders},
                    {"probe", probe_names}}},
                  {"worst_deviation", report.worst_unconditional},
                  {"worst_deviation_given_records", report.worst_conditional},
                  {"sector_defect", report.sector_decomposition_defect},
                  {"leaks_given_records", report.leaks_given_records},
                  {"pass", report.pass},
                  {"version", version}},
             flags.out_path);
        std::cerr << (report.pass ? "PASS" : "FAIL") << ": worst deviation " << report.worst_unconditional << "\n";
        return report.pass ? exit_ok : exit_verification_failure;
    }

    const auto sweep = security::sweep_all_subsets(config, secret);
    json entries = json::array();
    for (const auto& entry : sweep.entries) entries.push_back(to_json(entry));
    emit(json{{"config", to_json(config, secret)},
              {"scenarios", entries},
              {"worst_deviation", sweep.worst_unconditional},
              {"worst_sector_defect", sweep.worst_sector_defect},
              {"scenarios_leaking_given_records", sweep.flagged_conditional},
              {"pass", sweep.pass},
              {"version", version}},
         flags.out_path);
    std::cerr << (sweep.pass ? "PASS" : "FAIL") << ": " << sweep.entries.size() << " scenario(s), worst deviation "
              << sweep.worst_unconditional << "\n";
    return sweep.pass ? exit_ok : exit_verification_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-walk teleportation of a shared secret: run, verify, and probe the protocol"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "execute the protocol and verify every outcome");
    run->add_option("--n", run_flags.n, "number of senders/walkers");
    run->add_option("--m", run_flags.m, "number of receivers");
    run->add_option("--variant", run_flags.variant, "homogeneous | position-dependent");
    run->add_option("--alpha", run_flags.alpha, "secret amplitude alpha as RE,IM");
    run->add_option("--beta", run_flags.beta, "secret amplitude beta as RE,IM");
    run->add_option("--mode", run_flags.mode, "enumerate | sample");
    run->add_option("--seed", run_flags.seed, "sampling seed");
    run->add_option("--corrected-receiver", run_flags.corrected_receiver,
                    "receiver applying the designated correction");
    run->add_option("--out", run_flags.out_path, "write the JSON report here instead of stdout");
    run->add_flag("--dump-circuit", run_flags.dump_circuit, "include the step list in the report");

    VerifyFlags verify_flags;
    auto* verify = app.add_subcommand("verify", "cross-check the walk against the closed forms and identities");
    verify->add_option("--n", verify_flags.n, "number of senders/walkers");
    verify->add_option("--m", verify_flags.m, "number of receivers");
    verify->add_flag("--all", verify_flags.all, "sweep n in 1..3, m in 2..4");
    verify->add_option("--out", verify_flags.out_path, "write the JSON report here instead of stdout");

    SecurityFlags security_flags;
    auto* sec = app.add_subcommand("security", "phase-blindness analysis of probe coalitions");
    sec->add_option("--n", security_flags.n, "number of senders/walkers");
    sec->add_option("--m", security_flags.m, "number of receivers");
    sec->add_option("--variant", security_flags.variant, "homogeneous | position-dependent");
    sec->add_option("--alpha", security_flags.alpha, "secret amplitude alpha as RE,IM");
    sec->add_option("--beta", security_flags.beta, "secret amplitude beta as RE,IM");
    sec->add_option("--measured", security_flags.measured, "comma-separated sender indices that measure");
    sec->add_option("--probe", security_flags.probe, "comma-separated probe parties, e.g. r1,s2");
    sec->add_option("--out", security_flags.out_path, "write the JSON report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") return app.exit(e);
        std::cerr << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags);
        if (verify->parsed()) return cmd_verify(verify_flags);
        if (sec->parsed()) return cmd_security(security_flags);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const walkport::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_verification_failure;
    }
    return exit_usage;
}
