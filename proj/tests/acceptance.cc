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

// Acceptance checks. Prints one PASS/FAIL line per criterion; `--only N`
// runs a single criterion. Exit status is nonzero when any selected
// criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qkdlab/adversary.h"
#include "qkdlab/analysis.h"
#include "qkdlab/codes.h"
#include "qkdlab/config.h"
#include "qkdlab/protocol.h"
#include "qkdlab/source.h"

using namespace qkdlab;

namespace {

const std::string kData = QKDLAB_TEST_DATA;

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char *format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *format, ...) {
    char buf[1024];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

/// E[cos 2(x - c)] for a symmetric density of half width w around c.
double cos2_moment(const AngularDistribution &d) {
    double w = d.half_width();
    if (d.kind() == AngularDistribution::Kind::kUniform) {
        return std::sin(2 * w) / (2 * w);
    }
    double k = kPi / (2 * w);
    return k * k * std::cos(2 * w) / (k * k - 4);
}

Verdict key_rate() {
    double rate = asymptotic_rate(0.05, 0, 0, 0);
    return {std::abs(rate - 0.0620) <= 0.0005, fmt("rate %.6f, target 0.0620 +- 0.0005", rate)};
}

Verdict ideal_certificate() {
    CertifiedSource s = ideal_bb84_source();
    CertificateReport r = verify_certificate(s.source, s.certificate);
    bool params = r.recomputed_beta == 0 && std::abs(r.recomputed_gamma) < 1e-12;
    return {r.passed && r.max_residual() < 1e-12 && params,
            fmt("max residual %.2e, recovered (%.1e, %.1e)", r.max_residual(), r.recomputed_beta,
                r.recomputed_gamma)};
}

Verdict angular_sources() {
    Rng rng(20260101);
    size_t ok = 0;
    double worst_residual = 0, worst_param = 0;
    for (int i = 0; i < 20; i++) {
        auto pair = random_angular_pair(rng, 0.2, 0.1);
        CertifiedSource s = build_from_distributions(pair[0], pair[1]);
        CertificateReport r = verify_certificate(s.source, s.certificate, 1e-7);
        // Analytic oracle: symmetric densities have phi_a = center_a.
        double beta = 0;
        for (const auto &d : pair) {
            beta = std::max(beta, (1 - cos2_moment(d)) / 2);
        }
        double diff = pair[1].center() - pair[0].center();
        double gamma = std::min(2 * std::abs(std::sin(diff - kPi / 4)), 2 * std::abs(std::sin(-diff - kPi / 4)));
        double err = std::max(std::abs(r.recomputed_beta - beta), std::abs(r.recomputed_gamma - gamma));
        worst_residual = std::max(worst_residual, r.max_residual());
        worst_param = std::max(worst_param, err);
        ok += r.passed && err <= 1e-6;
    }
    return {ok == 20, fmt("%zu/20 certified at 1e-7, max residual %.2e, max parameter error %.2e", ok,
                          worst_residual, worst_param)};
}

Verdict helstrom() {
    DensityMatrix zero = ideal_state(0, 0), plus = ideal_state(1, 0);
    BoundReport one = product_guess_experiment(zero, plus, 1, 100000, 4);
    bool pass = std::abs(one.empirical - 0.8536) <= 0.005 && std::abs(one.bound - helstrom_bound(zero, plus, 1)) < 1e-15;
    std::string worst;
    double worst_excess = -1;
    for (size_t m = 1; m <= 8; m++) {
        BoundReport r = product_guess_experiment(zero, plus, m, 100000, 100 + m);
        pass = pass && r.empirical <= r.bound + 3 * r.sigma;
        double excess = (r.empirical - r.bound) / r.sigma;
        if (excess > worst_excess) {
            worst_excess = excess;
            worst = fmt("m=%zu empirical %.5f bound %.5f", m, r.empirical, r.bound);
        }
    }
    return {pass, fmt("m=1 empirical %.5f (bound %.6f); largest excess %.2f sigma at %s", one.empirical, one.bound,
                      worst_excess, worst.c_str())};
}

Verdict intercept_resend() {
    SimulationConfig cfg = simulation_from_json(load_json_file(kData + "/sim_intercept.json"), 5);
    double total = 0;
    size_t counted = 0;
    for (size_t i = 0; i < 200; i++) {
        ProtocolParams p = cfg.params;
        p.seed = session_seed(5, i);
        SessionOutcome o = run_session(p, cfg.source.source, cfg.channel, cfg.attack, cfg.options);
        if (o.d_sp >= 0) {
            total += static_cast<double>(o.d_sp) / static_cast<double>(p.n);
            counted++;
        }
    }
    double mean = counted ? total / static_cast<double>(counted) : 0;
    return {counted == 200 && std::abs(mean - 0.25) <= 0.02,
            fmt("mean d_sp/n %.4f over %zu sessions at n=256", mean, counted)};
}

Verdict reliability() {
    CertifiedSource src = ideal_bb84_source();
    bool pass = true;
    std::ostringstream detail;
    for (size_t n : {200, 500, 1000}) {
        Json j = {{"n", n}, {"m", 8}, {"delta_p", 0.005}, {"eps", 0.005}, {"lambda", 0.34}};
        ProtocolParams p = protocol_from_json(j, src.certificate, n);
        ParamReport report = validate_params(p, src.certificate);
        if (!report.passed) {
            detail << " n=" << n << " invalid params: " << report.failures() << ";";
            pass = false;
            continue;
        }
        for (double q : {0.0, p.delta_p / 2, p.delta_p}) {
            ChannelModel ch;
            ch.flip_probability = q;
            ReliabilityReport r = reliability_experiment(p, src, ch, 10000, derive_seed(n, static_cast<uint64_t>(q * 1e6)));
            bool ok = r.bound.passed && r.decoder_failures == 0;
            pass = pass && ok;
            detail << fmt(" n=%zu q=%.4f: %.4f<=%.4f+3s, decodable %zu, decoder failures %zu;", n, q, r.bound.empirical,
                          r.bound.bound, r.decodable, r.decoder_failures);
        }
    }
    return {pass, detail.str()};
}

Verdict tails() {
    Rng rng(7);
    size_t violations = 0;
    double worst = 0;
    for (int i = 0; i < 200; i++) {
        TailTuple t = random_tail_tuple(rng, 40);
        TailResult r = binomial_tail_bound(t.p, t.r, t.t, t.n_r, t.n_p, t.side);
        violations += !r.holds;
        worst = std::max(worst, r.exact / r.bound);
    }
    return {violations == 0, fmt("%zu violations in 200 tuples, max exact/bound %.4f", violations, worst)};
}

Verdict coding_suite() {
    bool pass = true;
    std::ostringstream detail;
    LinearCode seven = gilbert_varshamov_construct(7, 1, 1);
    size_t d7 = seven.min_distance_exhaustive();
    pass = pass && seven.dimension() == 3 && d7 >= 3;
    detail << "(7," << seven.dimension() << ") d=" << d7 << ";";

    size_t codes = 0, decodes = 0, rate_violations = 0, pa_checked = 0;
    for (size_t n = 4; n <= 24; n++) {
        for (size_t t = 1; 4 * t < n; t++) {
            LinearCode code;
            try {
                code = gilbert_varshamov_construct(n, t, 7 * n + t);
            } catch (const std::invalid_argument &) {
                continue;
            }
            codes++;
            double cap = binary_entropy(2.0 * static_cast<double>(t) / static_cast<double>(n)) + 2.0 / static_cast<double>(n);
            rate_violations += static_cast<double>(code.r()) / static_cast<double>(n) > cap;
            pass = pass && code.min_distance_exhaustive() >= 2 * t + 1;
            if (n <= 15) {
                // Every codeword plus random coset words, against every
                // error pattern of weight <= t_max.
                std::vector<BitString> errors;
                for (uint64_t e = 0; e < (uint64_t{1} << n); e++) {
                    if (static_cast<size_t>(std::popcount(e)) <= code.t_max()) {
                        errors.push_back(BitString::from_uint(e, n));
                    }
                }
                std::vector<BitString> bases;
                auto basis = code.generator_basis();
                for (uint64_t mask = 0; mask < (uint64_t{1} << basis.size()); mask++) {
                    BitString c(n);
                    for (size_t i = 0; i < basis.size(); i++) {
                        if ((mask >> i) & 1) {
                            c ^= basis[i];
                        }
                    }
                    bases.push_back(c);
                }
                Rng words(n * 131 + t);
                for (int i = 0; i < 64; i++) {
                    bases.push_back(BitString::random(n, words));
                }
                for (const auto &x : bases) {
                    BitString s = gf2_matvec(code.parity_check(), x);
                    for (const auto &e : errors) {
                        BitString y = x;
                        y ^= e;
                        decodes++;
                        if (!(syndrome_decode(y, s, code) == x)) {
                            pass = false;
                        }
                    }
                }
            }
            if (n <= 16 && n - code.r() >= 3) {
                size_t d_min = 2;
                try {
                    PrivacyAmplifier pa = build_privacy_matrix(code.parity_check(), d_min, 1, n + t);
                    pa_checked++;
                    pass = pass && joint_min_weight(code.parity_check(), pa.k_matrix) >= d_min;
                } catch (const std::invalid_argument &) {
                }
            }
        }
    }
    for (size_t m = 1; m <= 5; m++) {
        Gf2Matrix empty = Gf2Matrix::from_strings({}, 10);
        PrivacyAmplifier pa = build_privacy_matrix(empty, 2, m, m);
        pa_checked++;
        pass = pass && joint_min_weight(empty, pa.k_matrix) >= 2;
    }
    pass = pass && rate_violations == 0;
    detail << fmt(" %zu GV codes, %zu rate violations, %zu decodes, %zu PA matrices", codes, rate_violations, decodes,
                  pa_checked);
    return {pass, detail.str()};
}

Verdict independence() {
    size_t passed = 0;
    double worst = 0;
    for (size_t i = 0; i < 100; i++) {
        IndependenceTrial t = random_independence_trial(derive_seed(99, i), i % 2 == 1);
        passed += t.report.passed && t.report.max_spread < 1e-9;
        worst = std::max(worst, t.report.max_spread);
    }
    CertifiedSource src = ideal_bb84_source();
    BitString b = BitString::from_string("010"), h = BitString::from_string("110");
    Rng rng(3);
    ComplexMatrix x = random_supported_operator(src.certificate, b, h, 1, rng);
    IndependenceReport worked =
        key_independence_check(Gf2Matrix::from_strings({}, 3), Gf2Matrix::from_strings({"111"}), src, b, h, 1, x);
    bool pass = passed == 100 && worked.passed && worked.d_w == 3 && worked.max_spread < 1e-10;
    return {pass, fmt("%zu/100 randomized instances, max spread %.2e; n=3 K=[111] spread %.2e", passed, worst,
                      worked.max_spread)};
}

Verdict privacy() {
    SlopeFit near = eps1_slope(0.05, 0.1, 200, 2000);
    SlopeFit far = eps1_slope(0.05, 0.1, 2000, 20000);
    auto threshold = q_threshold_n(0.05, 0.1);

    Json j = {{"n", 16}, {"m", 3},         {"delta_p", 0.25},
              {"eps", 0.05}, {"lambda", 0.3}, {"eps_n", 2.0},
              {"code", {{"kind", "gv"}, {"t", 1}}}, {"amplifier", {{"kind", "coset"}, {"d_min", 2}}}};
    CertifiedSource src = ideal_bb84_source();
    ProtocolParams p = protocol_from_json(j, src.certificate, 1);
    SessionOptions relaxed{false};
    EntropyReport quiet = entropy_vs_bound_experiment(p, src, {}, AttackStrategy::none(), 20000, 11, relaxed);
    EntropyReport attacked =
        entropy_vs_bound_experiment(p, src, {}, AttackStrategy::intercept_resend(), 20000, 12, relaxed);

    bool slope_ok = near.slope < 0;
    bool entropy_ok = quiet.passed && attacked.passed;
    std::string detail = fmt(
        "slope of ln eps1 on [200,2000] = %+.3e (%s); on [2000,20000] = %+.3e; q >= 1 from n = %s; "
        "eps1(200) = %.3g, eps1(2000) = %.3g. Entropy m=3: no attack H = %.4f (floor %.3g, band %.4f, %s), "
        "intercept-resend H = %.4f (floor %.3g, band %.4f, %s, %zu completed)",
        near.slope, slope_ok ? "negative" : "NOT negative", far.slope,
        threshold ? std::to_string(*threshold).c_str() : "none", near.eps1.front(), near.eps1.back(), quiet.empirical,
        quiet.floor, quiet.band, quiet.passed ? "ok" : "below", attacked.empirical, attacked.floor, attacked.band,
        attacked.passed ? "ok" : "below", attacked.completed);
    if (!slope_ok) {
        detail +=
            ". Analysis: with m = floor(0.05 n) and eps = 0.1, the m-proportional prefactors outgrow the "
            "g^(1/4) decay until n is in the low thousands, so eps1 is increasing (and above 1) over [200,2000]. "
            "The exponential decay holds only beyond that range, as the [2000,20000] slope shows. "
            "The m=3 entropy floors are negative at n=16, so that half holds trivially.";
    }
    return {slope_ok && entropy_ok, detail};
}

std::string capture(const std::string &cmd, int &code) {
    FILE *pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
        out.append(buf, got);
    }
    int status = pclose(pipe);
    code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

Verdict determinism() {
    std::string base = std::string(QKDLAB_CLI) + " --seed 20261016 simulate " + kData + "/sim_determinism.json 2>/dev/null";
    int c1, c2, c3, c4;
    std::string first = capture(base, c1);
    std::string second = capture(base, c2);
    std::string one_thread = capture("QKDLAB_THREADS=1 " + base, c3);
    std::string eight_threads = capture("QKDLAB_THREADS=8 " + base, c4);
    bool codes_ok = c1 == 0 && c2 == 0 && c3 == 0 && c4 == 0;
    bool same = first == second && first == one_thread && first == eight_threads;
    size_t rows = static_cast<size_t>(std::count(first.begin(), first.end(), '\n'));
    return {codes_ok && same && rows > 1,
            fmt("%zu CSV lines; repeat %s, 1 thread %s, 8 threads %s", rows, first == second ? "identical" : "DIFFERENT",
                first == one_thread ? "identical" : "DIFFERENT", first == eight_threads ? "identical" : "DIFFERENT")};
}

struct Criterion {
    const char *name;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char **argv) {
    std::vector<Criterion> criteria = {
        {"key rate reproduction", key_rate},
        {"ideal source certification", ideal_certificate},
        {"angular-distribution source certification", angular_sources},
        {"Helstrom attack bound", helstrom},
        {"intercept-resend error signature", intercept_resend},
        {"reliability bound grid", reliability},
        {"binomial tail bound", tails},
        {"coding suite", coding_suite},
        {"key independence", independence},
        {"privacy bookkeeping", privacy},
        {"determinism", determinism},
    };
    int only = 0;
    for (int i = 1; i < argc; i++) {
        std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
            return 2;
        }
    }
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "criterion %d does not exist\n", only);
        return 2;
    }
    bool all = true;
    for (size_t i = 0; i < criteria.size(); i++) {
        if (only != 0 && static_cast<int>(i) + 1 != only) {
            continue;
        }
        Verdict v;
        try {
            v = criteria[i].run();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        all = all && v.pass;
        std::printf("criterion %2zu %s: %s | %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].name, v.detail.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
