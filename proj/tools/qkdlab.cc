// Copyright 2026 The qkdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 1 domain failure, 2 usage.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qkdlab/analysis.h"
#include "qkdlab/batch.h"
#include "qkdlab/codes.h"
#include "qkdlab/config.h"
#include "qkdlab/protocol.h"
#include "qkdlab/source.h"

using namespace qkdlab;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct GlobalFlags {
    std::optional<uint64_t> seed;
    std::optional<size_t> trials;
    std::optional<std::string> out;
    std::optional<std::string> mode;
};

/// The explicit seed, or a fresh one announced on stderr.
uint64_t resolve_seed(const GlobalFlags &g, std::optional<uint64_t> from_config = std::nullopt) {
    if (g.seed) {
        return *g.seed;
    }
    if (from_config) {
        return *from_config;
    }
    std::random_device rd;
    uint64_t seed = (static_cast<uint64_t>(rd()) << 32) ^ rd();
    std::fprintf(stderr, "seed: %" PRIu64 "\n", seed);
    return seed;
}

void emit(const GlobalFlags &g, const std::string &text) {
    if (g.out) {
        std::ofstream f(*g.out, std::ios::binary);
        if (!f) {
            throw std::runtime_error("cannot write " + *g.out);
        }
        f << text;
    } else {
        std::cout << text;
    }
}

std::string fmt(double x, int precision = 6) {
    std::ostringstream os;
    os.precision(precision);
    os << x;
    return os.str();
}

Json optional_config(const std::string &path) {
    return path.empty() ? Json::object() : load_json_file(path);
}

int cmd_source_verify(const GlobalFlags &g, const std::string &path) {
    SourceConfig cfg = source_from_json(load_json_file(path));
    const auto &cert = cfg.source.certificate;
    CertificateReport report = verify_certificate(cfg.source.source, cert, cfg.tolerance);
    if (g.out) {
        ordered_json j;
        for (const auto &c : report.conditions) {
            j["conditions"][c.name] = {{"residual", c.residual}, {"pass", c.passed}};
        }
        j["tolerance"] = cfg.tolerance;
        j["beta_qp"] = cert.beta_qp;
        j["gamma_qp"] = cert.gamma_qp;
        j["recomputed_beta"] = report.recomputed_beta;
        j["recomputed_gamma"] = report.recomputed_gamma;
        j["certified"] = report.passed;
        emit(g, j.dump(2) + "\n");
    }
    std::printf("%-11s %-12s %s\n", "condition", "residual", "status");
    for (const auto &c : report.conditions) {
        std::printf("%-11s %-12.3e %s\n", c.name.c_str(), c.residual, c.passed ? "ok" : "FAIL");
    }
    std::printf("beta_qp  claimed %.9f recomputed %.9f\n", cert.beta_qp, report.recomputed_beta);
    std::printf("gamma_qp claimed %.9f recomputed %.9f\n", cert.gamma_qp, report.recomputed_gamma);
    if (cert.phi) {
        std::printf("phi      %.9f %.9f\n", (*cert.phi)[0], (*cert.phi)[1]);
    }
    std::printf("certified: %s (tol %.1e)\n", report.passed ? "yes" : "no", cfg.tolerance);
    return report.passed ? kExitOk : kExitDomain;
}

int cmd_keyrate(const GlobalFlags &g, double delta_p, double eps, double beta, double gamma) {
    RateTerms t = asymptotic_rate_terms(delta_p, eps, beta, gamma);
    std::string line = "rate " + fmt(t.rate) + " (correction H2 " + fmt(t.correction_term) + ", privacy H2 " +
                       fmt(t.privacy_term) + ")";
    if (t.rate <= 0) {
        line += " no key";
    }
    emit(g, line + "\n");
    return kExitOk;
}

ordered_json code_json(const LinearCode &code) {
    ordered_json j;
    j["construction"] = code.construction_name();
    j["n"] = code.n();
    j["r"] = code.r();
    j["k"] = code.dimension();
    j["t_max"] = code.t_max();
    j["rows"] = code.parity_check().to_strings();
    return j;
}

int cmd_codes_gv(const GlobalFlags &g, size_t n, size_t t) {
    uint64_t seed = resolve_seed(g);
    LinearCode code = gilbert_varshamov_construct(n, t, seed);
    ordered_json j = code_json(code);
    j["seed"] = seed;
    j["gv_redundancy"] = gilbert_varshamov_redundancy(n, t);
    double entropy_cap = 2.0 * static_cast<double>(t) / static_cast<double>(n) <= 1
                             ? binary_entropy(2.0 * static_cast<double>(t) / static_cast<double>(n))
                             : 1.0;
    j["rate_check"] = static_cast<double>(code.r()) / static_cast<double>(n) <= entropy_cap + 2.0 / static_cast<double>(n);
    bool ok = j["rate_check"].get<bool>();
    if (n <= kMinDistanceCap) {
        size_t d = code.min_distance_exhaustive();
        j["min_distance"] = d;
        ok = ok && d >= 2 * t + 1;
    }
    j["pass"] = ok;
    emit(g, j.dump(2) + "\n");
    return ok ? kExitOk : kExitDomain;
}

int cmd_codes_pa(const GlobalFlags &g, size_t n, size_t t, size_t m, std::optional<size_t> d_min) {
    uint64_t seed = resolve_seed(g);
    // t = 0 means no companion code: F is empty.
    LinearCode code = t == 0 ? LinearCode(Gf2Matrix::from_strings({}, n), 0) : gilbert_varshamov_construct(n, t, seed);
    size_t target = d_min.value_or(2 * t + 1);
    PrivacyAmplifier pa = build_privacy_matrix(code.parity_check(), target, m, derive_seed(seed, 1));
    ordered_json j;
    j["seed"] = seed;
    j["code"] = code_json(code);
    j["m"] = pa.m();
    j["d_min"] = target;
    j["d_w"] = pa.d_w;
    j["d_w_exact"] = pa.d_w_exact;
    j["rows"] = pa.k_matrix.to_strings();
    bool ok = !pa.d_w_exact || pa.d_w >= target;
    j["pass"] = ok;
    emit(g, j.dump(2) + "\n");
    return ok ? kExitOk : kExitDomain;
}

int cmd_simulate(const GlobalFlags &g, const std::string &path, const std::string &transcript_path) {
    Json j = load_json_file(path);
    std::optional<uint64_t> config_seed;
    if (j.is_object() && j.contains("seed") && j["seed"].is_number_unsigned()) {
        config_seed = j["seed"].get<uint64_t>();
    }
    uint64_t seed = resolve_seed(g, config_seed);
    SimulationConfig cfg = simulation_from_json(j, seed);
    if (g.mode) {
        cfg.params.mode = parse_mode(*g.mode);
    }
    size_t sessions = g.trials.value_or(cfg.sessions);
    auto outcomes = parallel_map(sessions, [&](size_t i) {
        ProtocolParams local = cfg.params;
        local.seed = session_seed(seed, i);
        return run_session(local, cfg.source.source, cfg.channel, cfg.attack, cfg.options);
    });

    std::string csv = session_csv_header() + "\n";
    size_t aborts = 0, completed = 0, agreed = 0, tested = 0;
    double d_sp_sum = 0;
    for (size_t i = 0; i < sessions; i++) {
        const auto &o = outcomes[i];
        csv += session_csv_row(session_seed(seed, i), o) + "\n";
        aborts += !o.completed();
        completed += o.completed();
        agreed += o.keys_equal();
        if (o.d_sp >= 0) {
            tested++;
            d_sp_sum += static_cast<double>(o.d_sp) / static_cast<double>(cfg.params.n);
        }
    }
    if (!transcript_path.empty() && sessions > 0) {
        std::ofstream f(transcript_path, std::ios::binary);
        if (!f) {
            throw std::runtime_error("cannot write " + transcript_path);
        }
        f << session_to_json(outcomes[0], session_seed(seed, 0)) << "\n";
    }
    emit(g, csv);
    std::string summary = "sessions " + std::to_string(sessions) + " aborts " + std::to_string(aborts) +
                          " mean_d_sp/n " + fmt(tested ? d_sp_sum / static_cast<double>(tested) : 0) +
                          " key_agreement " +
                          fmt(completed ? static_cast<double>(agreed) / static_cast<double>(completed) : 0) + "\n";
    (g.out ? std::cout : std::cerr) << summary;
    return kExitOk;
}

ProtocolParams default_reliability_params(const QuasiPerfectCertificate &cert, size_t n) {
    Json p = {{"n", n},         {"m", 8},        {"delta_p", 0.005}, {"eps", 0.005},
              {"lambda", 0.34}, {"eps_n", 0.5}, {"code", {{"kind", "bch"}}}};
    return protocol_from_json(p, cert, 0);
}

int cmd_bounds(const GlobalFlags &g, const std::string &kind, const std::string &path) {
    Json cfg = optional_config(path);
    ordered_json out = ordered_json::array();
    bool all = true;
    if (kind == "reliability") {
        require_keys(cfg, {"source", "protocol", "flip_probabilities", "sessions"}, "reliability config");
        SourceConfig src = source_from_json(cfg.value("source", Json{{"kind", "ideal"}}));
        uint64_t seed = resolve_seed(g);
        ProtocolParams p = cfg.contains("protocol") ? protocol_from_json(cfg["protocol"], src.source.certificate, seed)
                                                    : default_reliability_params(src.source.certificate, 200);
        std::vector<double> flips = {0, p.delta_p / 2, p.delta_p};
        if (cfg.contains("flip_probabilities")) {
            flips = cfg["flip_probabilities"].get<std::vector<double>>();
        }
        size_t sessions = g.trials.value_or(cfg.value("sessions", size_t{1000}));
        for (size_t i = 0; i < flips.size(); i++) {
            ChannelModel ch;
            ch.flip_probability = flips[i];
            ReliabilityReport r = reliability_experiment(p, src.source, ch, sessions, derive_seed(seed, i));
            bool ok = r.bound.passed && r.decoder_failures == 0;
            all = all && ok;
            ordered_json j = ordered_json::parse(r.bound.to_json());
            j["flip"] = flips[i];
            j["completed"] = r.completed;
            j["decodable"] = r.decodable;
            j["decoder_failures"] = r.decoder_failures;
            j["pass"] = ok;
            out.push_back(j);
        }
    } else if (kind == "tails") {
        require_keys(cfg, {"tuples", "max_n"}, "tails config");
        uint64_t seed = resolve_seed(g);
        size_t tuples = g.trials.value_or(cfg.value("tuples", size_t{200}));
        size_t max_n = cfg.value("max_n", kTailMaxN);
        Rng rng(seed);
        size_t violations = 0;
        double worst = 0;
        for (size_t i = 0; i < tuples; i++) {
            TailTuple tt = random_tail_tuple(rng, max_n);
            TailResult r = binomial_tail_bound(tt.p, tt.r, tt.t, tt.n_r, tt.n_p, tt.side);
            violations += !r.holds;
            worst = std::max(worst, r.exact / r.bound);
        }
        all = violations == 0;
        out.push_back({{"name", "tails"},
                       {"tuples", tuples},
                       {"violations", violations},
                       {"max_exact_over_bound", worst},
                       {"pass", all}});
    } else if (kind == "privacy") {
        require_keys(cfg, {"lambda", "eps", "n_lo", "n_hi", "points"}, "privacy config");
        double lambda = cfg.value("lambda", 0.05);
        double eps = cfg.value("eps", 0.1);
        SlopeFit fit = eps1_slope(lambda, eps, cfg.value("n_lo", size_t{200}), cfg.value("n_hi", size_t{2000}),
                                  cfg.value("points", size_t{19}));
        auto threshold = q_threshold_n(lambda, eps);
        all = fit.slope < 0;
        ordered_json j = {{"name", "privacy"},
                          {"lambda", lambda},
                          {"eps", eps},
                          {"n", fit.n},
                          {"eps1", fit.eps1},
                          {"slope", fit.slope},
                          {"q_threshold_n", threshold ? Json(*threshold) : Json(nullptr)},
                          {"pass", all}};
        out.push_back(j);
    } else {
        throw ConfigError("unknown bounds kind '" + kind + "'");
    }
    emit(g, out.dump(2) + "\n");
    return all ? kExitOk : kExitDomain;
}

int cmd_distinguish(const GlobalFlags &g, const std::string &path) {
    Json cfg = optional_config(path);
    require_keys(cfg, {"rho0", "rho1", "m_max"}, "distinguish config");
    auto state = [&](const char *key, const DensityMatrix &fallback) {
        if (!cfg.contains(key)) {
            return fallback;
        }
        const Json &rows = cfg[key];
        size_t d = rows.size();
        ComplexMatrix m(d);
        for (size_t r = 0; r < d; r++) {
            for (size_t c = 0; c < d; c++) {
                const Json &e = rows.at(r).at(c);
                m(r, c) = e.is_array() ? Complex(e.at(0).get<double>(), e.at(1).get<double>()) : e.get<double>();
            }
        }
        return DensityMatrix(m);
    };
    DensityMatrix rho0 = state("rho0", ideal_state(0, 0));
    DensityMatrix rho1 = state("rho1", ideal_state(1, 0));
    size_t m_max = cfg.value("m_max", size_t{8});
    size_t trials = g.trials.value_or(100000);
    uint64_t seed = resolve_seed(g);
    ordered_json out = ordered_json::array();
    bool all = true;
    for (size_t m = 1; m <= m_max; m++) {
        BoundReport r = product_guess_experiment(rho0, rho1, m, trials, derive_seed(seed, m));
        all = all && r.passed;
        out.push_back(ordered_json::parse(r.to_json()));
    }
    emit(g, out.dump(2) + "\n");
    return all ? kExitOk : kExitDomain;
}

int cmd_independence(const GlobalFlags &g) {
    size_t trials = g.trials.value_or(100);
    uint64_t seed = resolve_seed(g);
    auto results = parallel_map(trials, [&](size_t i) {
        return random_independence_trial(derive_seed(seed, i), i % 2 == 1);
    });
    size_t passed = 0;
    double worst = 0;
    ordered_json rows = ordered_json::array();
    for (const auto &t : results) {
        passed += t.report.passed;
        worst = std::max(worst, t.report.max_spread);
        rows.push_back({{"n", t.n},
                        {"r", t.r},
                        {"m", t.m},
                        {"d_pp", t.d_pp},
                        {"quasiperfect", t.quasiperfect},
                        {"spread", t.report.max_spread},
                        {"pass", t.report.passed}});
    }
    ordered_json j = {{"name", "independence"},
                      {"trials", trials},
                      {"passed", passed},
                      {"max_spread", worst},
                      {"instances", rows},
                      {"pass", passed == trials}};
    emit(g, j.dump(2) + "\n");
    return passed == trials ? kExitOk : kExitDomain;
}

int run(int argc, char **argv) {
    CLI::App app{"qkdlab: BB84 with quasiperfect sources, codes, attacks and bounds"};
    app.fallthrough(true);
    app.require_subcommand(1);
    GlobalFlags g;
    uint64_t seed = 0;
    size_t trials = 0;
    std::string out;
    std::string mode;
    auto *seed_opt = app.add_option("--seed", seed, "Master seed (drawn and printed when omitted)");
    auto *trials_opt = app.add_option("--trials", trials, "Number of sessions, tuples or instances");
    auto *out_opt = app.add_option("--out", out, "Write the main output to this file");
    auto *mode_opt = app.add_option("--mode", mode, "Protocol mode")->check(CLI::IsMember({"bb84", "bb84m", "bb84mm"}));

    std::function<int()> action;

    auto *source = app.add_subcommand("source", "Source certification");
    source->require_subcommand(1);
    std::string source_path;
    auto *verify = source->add_subcommand("verify", "Verify a source specification");
    verify->add_option("path", source_path, "JSON source description")->required();
    verify->callback([&] { action = [&] { return cmd_source_verify(g, source_path); }; });

    auto *keyrate = app.add_subcommand("keyrate", "Asymptotic key rate");
    double kr[4] = {0, 0, 0, 0};
    keyrate->add_option("delta_p", kr[0])->required();
    keyrate->add_option("eps", kr[1])->required();
    keyrate->add_option("beta", kr[2])->required();
    keyrate->add_option("gamma", kr[3])->required();
    keyrate->callback([&] { action = [&] { return cmd_keyrate(g, kr[0], kr[1], kr[2], kr[3]); }; });

    auto *codes = app.add_subcommand("codes", "Code constructions");
    codes->require_subcommand(1);
    size_t code_n = 0, code_t = 0, pa_m = 0, pa_dmin = 0;
    auto *gv = codes->add_subcommand("gv", "Gilbert-Varshamov code");
    gv->add_option("--n", code_n, "Block length")->required();
    gv->add_option("--t", code_t, "Correctable errors")->required();
    gv->callback([&] { action = [&] { return cmd_codes_gv(g, code_n, code_t); }; });
    auto *pa = codes->add_subcommand("pa", "Privacy amplification matrix for a GV code");
    pa->add_option("--n", code_n, "Block length")->required();
    pa->add_option("--t", code_t, "Correctable errors of the companion code")->required();
    pa->add_option("--m", pa_m, "Key length")->required();
    auto *dmin_opt = pa->add_option("--d-min", pa_dmin, "Required joint minimum weight (default 2t+1)");
    pa->callback([&] {
        action = [&] {
            return cmd_codes_pa(g, code_n, code_t, pa_m, dmin_opt->count() ? std::optional<size_t>(pa_dmin) : std::nullopt);
        };
    });

    auto *simulate = app.add_subcommand("simulate", "Run protocol sessions from a config");
    std::string sim_path, transcript_path;
    simulate->add_option("config", sim_path, "JSON simulation config")->required();
    simulate->add_option("--transcript", transcript_path, "Write the first session's transcript as JSON");
    simulate->callback([&] { action = [&] { return cmd_simulate(g, sim_path, transcript_path); }; });

    auto *bounds = app.add_subcommand("bounds", "Check analytic bounds");
    std::string bounds_kind, bounds_path;
    bounds->add_option("kind", bounds_kind, "reliability | tails | privacy")
        ->required()
        ->check(CLI::IsMember({"reliability", "tails", "privacy"}));
    bounds->add_option("config", bounds_path, "Optional JSON config");
    bounds->callback([&] { action = [&] { return cmd_bounds(g, bounds_kind, bounds_path); }; });

    auto *distinguish = app.add_subcommand("distinguish", "Optimal binary measurement against the Helstrom bound");
    std::string dist_path;
    distinguish->add_option("config", dist_path, "Optional JSON config");
    distinguish->callback([&] { action = [&] { return cmd_distinguish(g, dist_path); }; });

    auto *independence = app.add_subcommand("independence", "Brute-force key independence on tiny instances");
    independence->callback([&] { action = [&] { return cmd_independence(g); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }
    if (seed_opt->count()) {
        g.seed = seed;
    }
    if (trials_opt->count()) {
        g.trials = trials;
    }
    if (out_opt->count()) {
        g.out = out;
    }
    if (mode_opt->count()) {
        g.mode = mode;
    }

    try {
        return action ? action() : kExitUsage;
    } catch (const ConfigError &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDomain;
    }
}

}  // namespace

int main(int argc, char **argv) {
    return run(argc, argv);
}
