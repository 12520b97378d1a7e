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

#include "qkdlab/protocol.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qkdlab {

namespace {

// Independent random streams of one session.
enum StreamId : uint64_t {
    kBoxStream = 1,
    kAliceStream = 2,
    kChannelStream = 3,
    kEveStream = 4,
    kBobStream = 5,
    kAbortStream = 6,
};

constexpr double kIntegerGuard = 1e-9;

std::string join_positions(const std::vector<size_t> &positions) {
    std::string out;
    for (size_t i = 0; i < positions.size(); i++) {
        if (i) {
            out += ',';
        }
        out += std::to_string(positions[i]);
    }
    return out;
}

std::string format_number(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace

std::string mode_name(ProtocolMode mode) {
    switch (mode) {
        case ProtocolMode::kBB84:
            return "bb84";
        case ProtocolMode::kBB84M:
            return "bb84m";
        case ProtocolMode::kBB84MM:
            return "bb84mm";
    }
    return "unknown";
}

ProtocolMode parse_mode(const std::string &text) {
    std::string lower;
    for (char c : text) {
        lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (lower == "bb84") {
        return ProtocolMode::kBB84;
    }
    if (lower == "bb84m") {
        return ProtocolMode::kBB84M;
    }
    if (lower == "bb84mm") {
        return ProtocolMode::kBB84MM;
    }
    throw std::invalid_argument("unknown mode '" + text + "' (expected bb84, bb84m or bb84mm)");
}

size_t ProtocolParams::n_total() const {
    auto total = static_cast<size_t>(std::ceil((4 + eps_n) * static_cast<double>(n) - kIntegerGuard));
    return total + (total & 1);
}

std::string ParamReport::failures() const {
    std::string out;
    for (const auto &c : conditions) {
        if (c.holds) {
            continue;
        }
        if (!out.empty()) {
            out += "; ";
        }
        out += c.name + ": " + format_number(c.lhs) + " " + c.relation + " " + format_number(c.rhs) + " is false";
    }
    return out;
}

size_t verification_threshold(double delta_p, size_t n) {
    return static_cast<size_t>(std::floor(delta_p * static_cast<double>(n) + kIntegerGuard));
}

size_t correction_requirement(double delta_p, double eps, size_t n) {
    return static_cast<size_t>(std::ceil((delta_p + eps) * static_cast<double>(n) - kIntegerGuard));
}

ParamReport validate_params(const ProtocolParams &p, const QuasiPerfectCertificate &cert) {
    ParamReport report;
    auto add = [&](std::string name, double lhs, std::string rel, double rhs) {
        bool holds = false;
        if (rel == "<") {
            holds = lhs < rhs;
        } else if (rel == ">") {
            holds = lhs > rhs;
        } else if (rel == ">=") {
            holds = lhs >= rhs - 1e-12;
        } else if (rel == "==") {
            holds = lhs == rhs;
        }
        report.conditions.push_back({std::move(name), lhs, std::move(rel), rhs, holds});
    };
    double n = static_cast<double>(p.n);
    add("m < n", static_cast<double>(p.m), "<", n);
    add("delta_p > 0", p.delta_p, ">", 0);
    add("eps > 0", p.eps, ">", 0);
    add("eps_n > 0", p.eps_n, ">", 0);
    add("lambda > 0", p.lambda, ">", 0);
    add("lambda < 1", p.lambda, "<", 1);
    add("F columns = n", static_cast<double>(p.code.n()), "==", n);
    add("K columns = n", static_cast<double>(p.amplifier.k_matrix.cols()), "==", n);
    add("K rows = m", static_cast<double>(p.amplifier.m()), "==", static_cast<double>(p.m));

    double ratio = p.lambda < 1 ? p.lambda / (1 - p.lambda) : std::numeric_limits<double>::infinity();
    add("lambda/(1-lambda) delta_p >= eps/2 + beta_qp", ratio * p.delta_p, ">=", 0.5 * p.eps + cert.beta_qp);

    double inv = p.lambda < 1 ? 1 / (1 - p.lambda) : std::numeric_limits<double>::infinity();
    add("d_w >= 2(delta_p/(1-lambda) + gamma_qp/2 + eps) n", static_cast<double>(p.amplifier.d_w), ">=",
        2 * (p.delta_p * inv + 0.5 * cert.gamma_qp + p.eps) * n);
    add("t_max >= ceil((delta_p + eps) n)", static_cast<double>(p.code.t_max()), ">=",
        static_cast<double>(correction_requirement(p.delta_p, p.eps, p.n)));

    report.passed = std::all_of(report.conditions.begin(), report.conditions.end(),
                                [](const ParamCondition &c) { return c.holds; });
    return report;
}

bool agreement_check(const Transcript &t, const ProtocolParams &p) {
    size_t in_r = 0;
    size_t out_r = 0;
    for (size_t i : t.omega) {
        (t.in_r.get(i) ? in_r : out_r)++;
    }
    return in_r >= p.n && out_r >= p.n;
}

VerificationResult verification_test(const Transcript &t, const ProtocolParams &p) {
    if (t.s_p.size() != p.n) {
        throw std::logic_error("verification test needs S_P, which requires the agreement check to pass");
    }
    size_t d = t.g.select(t.s_p).distance(t.h.select(t.s_p));
    return {d <= verification_threshold(p.delta_p, p.n), d};
}

SessionOutcome run_session(const ProtocolParams &p, const CertifiedSource &src, const ChannelModel &ch,
                           const AttackStrategy &attack, const SessionOptions &options) {
    ch.validate();
    attack.validate();
    if (ch.loss_probability >= 1) {
        throw std::invalid_argument("loss_probability 1 never delivers a photon");
    }
    if (src.source.dim() != 2) {
        throw std::invalid_argument("Bob's detector measures qubits; the source has dimension " +
                                    std::to_string(src.source.dim()));
    }
    if (options.enforce_assumptions) {
        ParamReport report = validate_params(p, src.certificate);
        if (!report.passed) {
            throw std::invalid_argument("parameters violate the pre-agreement: " + report.failures());
        }
    } else if (p.code.n() != p.n || p.amplifier.k_matrix.cols() != p.n || p.amplifier.m() != p.m || p.m == 0) {
        throw std::invalid_argument("F and K must have n columns and K must have m rows");
    }

    const size_t total = p.n_total();
    Rng box = Rng::stream(p.seed, kBoxStream);
    Rng alice = Rng::stream(p.seed, kAliceStream);
    Rng channel = Rng::stream(p.seed, kChannelStream);
    Rng eve = Rng::stream(p.seed, kEveStream);
    Rng bob = Rng::stream(p.seed, kBobStream);

    SessionOutcome out;
    Transcript &t = out.transcript;

    // The box fixes R before transmission; it stays private until C1.
    {
        std::vector<size_t> order(total);
        std::iota(order.begin(), order.end(), 0);
        box.shuffle(order);
        t.in_r = BitString(total);
        t.r.assign(order.begin(), order.begin() + static_cast<long>(total / 2));
        std::sort(t.r.begin(), t.r.end());
        for (size_t i : t.r) {
            t.in_r.set(i, true);
        }
    }

    // Pr[h = 0] for each source state measured in each ideal basis.
    std::array<ComplexMatrix, 2> bob_zero = {ideal_state(0, 0).matrix(), ideal_state(1, 0).matrix()};
    double p_zero[2][2][2];
    for (int a = 0; a < 2; a++) {
        for (int g = 0; g < 2; g++) {
            for (int bt = 0; bt < 2; bt++) {
                p_zero[a][g][bt] = trace_product(bob_zero[bt], src.source.state(a, g).matrix()).real();
            }
        }
    }

    t.a = t.b = t.b_tilde = t.g = t.h = BitString(total);
    t.eve.notes.reserve(total);
    const bool attacked = attack.kind != AttackStrategy::Kind::kNone;
    while (out.exchanged_count < total) {
        size_t i = out.exchanged_count;
        int a = alice.bit();
        int g = alice.bit();
        AttackResult hit{DensityMatrix(), EveNote{}};
        if (attacked) {
            hit = apply_attack(attack, src.source.state(a, g), i, eve);
        }
        ChannelEvent event = sample_channel_event(ch, channel);
        if (event == ChannelEvent::kLost) {
            out.lost_count++;
            continue;
        }
        // A basis bit is only consumed by a detected photon.
        int b = box.bit();
        t.basis_bits_drawn++;
        int bt = (p.mode != ProtocolMode::kBB84 && !t.in_r.get(i)) ? 1 - b : b;
        double q0 = attacked ? trace_product(bob_zero[bt], hit.resent.matrix()).real() : p_zero[a][g][bt];
        if (event == ChannelEvent::kDepolarized) {
            q0 = 0.5;
        } else if (event == ChannelEvent::kInverted) {
            q0 = 1 - q0;
        }
        int h = bob.uniform() < q0 ? 0 : 1;
        t.a.set(i, a);
        t.g.set(i, g);
        t.b.set(i, b);
        t.b_tilde.set(i, bt);
        t.h.set(i, h);
        t.eve.notes.push_back(hit.note);
        out.exchanged_count++;
    }

    auto abort = [&](std::string reason) {
        Rng abort_rng = Rng::stream(p.seed, kAbortStream);
        out.status = SessionStatus::kAborted;
        out.abort_reason = std::move(reason);
        out.kappa = BitString::random(p.m, abort_rng);
        out.kappa_b = BitString();
        return out;
    };
    auto announce = [&](const char *step, const char *item, std::string value) {
        t.log.push_back({step, item, std::move(value)});
    };

    if (p.mode == ProtocolMode::kBB84MM) {
        announce("C1", "h", t.h.to_hex());
    }
    announce("C1", "b", t.b.to_hex());
    announce("C1", "R", join_positions(t.r));
    announce("C2", "h[R]", t.h.select(t.r).to_hex());

    t.pi.resize(total);
    std::iota(t.pi.begin(), t.pi.end(), 0);
    box.shuffle(t.pi);
    announce("C3", "pi", join_positions(t.pi));

    announce("C4", "a", t.a.to_hex());
    for (size_t i = 0; i < total; i++) {
        if (t.a.get(i) == t.b.get(i)) {
            t.omega.push_back(i);
        }
    }

    bool agreed = agreement_check(t, p);
    announce("C5", "agreement", agreed ? "pass" : "fail");
    if (!agreed) {
        return abort("agreement-check");
    }
    for (size_t i : t.pi) {
        if (t.a.get(i) != t.b.get(i)) {
            continue;
        }
        auto &set = t.in_r.get(i) ? t.s_p : t.s_k;
        if (set.size() < p.n) {
            set.push_back(i);
        }
    }
    BitString g_key = t.g.select(t.s_k);
    BitString h_key = t.h.select(t.s_k);
    out.d_sk = static_cast<long>(g_key.distance(h_key));

    if (p.mode == ProtocolMode::kBB84MM) {
        BitString key_mask(total);
        for (size_t i : t.s_k) {
            key_mask.set(i, true);
        }
        std::vector<size_t> rest;
        for (size_t i = 0; i < total; i++) {
            if (!key_mask.get(i)) {
                rest.push_back(i);
            }
        }
        announce("C6", "g[S_K-bar]", t.g.select(rest).to_hex());
    } else {
        announce("C6", "g[S_P]", t.g.select(t.s_p).to_hex());
    }

    VerificationResult verdict = verification_test(t, p);
    out.d_sp = static_cast<long>(verdict.d_sp);
    announce("C7", "verification", verdict.passed ? "pass" : "fail");
    if (!verdict.passed) {
        return abort("verification");
    }

    t.syndrome = gf2_matvec(p.code.parity_check(), g_key);
    announce("C8", "syndrome", t.syndrome.to_hex());
    out.kappa = gf2_matvec(p.amplifier.k_matrix, g_key);

    BitString corrected = p.code.decode(h_key, t.syndrome);
    out.kappa_b = gf2_matvec(p.amplifier.k_matrix, corrected);
    out.status = SessionStatus::kCompleted;
    return out;
}

std::string session_to_json(const SessionOutcome &outcome, uint64_t seed) {
    using nlohmann::ordered_json;
    const Transcript &t = outcome.transcript;
    ordered_json j;
    j["seed"] = seed;
    j["status"] = outcome.completed() ? "completed" : "aborted";
    if (!outcome.completed()) {
        j["abort_reason"] = outcome.abort_reason;
    }
    j["kappa"] = outcome.kappa.to_hex();
    j["kappa_b"] = outcome.kappa_b.to_hex();
    j["d_sp"] = outcome.d_sp;
    j["d_sk"] = outcome.d_sk;
    j["exchanged"] = outcome.exchanged_count;
    j["lost"] = outcome.lost_count;
    ordered_json tr;
    tr["a"] = t.a.to_hex();
    tr["b"] = t.b.to_hex();
    tr["b_tilde"] = t.b_tilde.to_hex();
    tr["g"] = t.g.to_hex();
    tr["h"] = t.h.to_hex();
    tr["R"] = t.r;
    tr["omega_size"] = t.omega.size();
    tr["pi"] = t.pi;
    tr["s_p"] = t.s_p;
    tr["s_k"] = t.s_k;
    tr["syndrome"] = t.syndrome.to_hex();
    ordered_json log = ordered_json::array();
    for (const auto &a : t.log) {
        log.push_back({{"step", a.step}, {"item", a.item}, {"value", a.value}});
    }
    tr["announcements"] = std::move(log);
    j["transcript"] = std::move(tr);
    return j.dump(2);
}

std::string session_csv_header() {
    return "seed,status,d_sp,d_sk,key_equal";
}

std::string session_csv_row(uint64_t seed, const SessionOutcome &outcome) {
    std::string status = outcome.completed() ? "completed" : "aborted-" + outcome.abort_reason;
    auto field = [](long v) { return v < 0 ? std::string() : std::to_string(v); };
    return std::to_string(seed) + "," + status + "," + field(outcome.d_sp) + "," + field(outcome.d_sk) + "," +
           (outcome.keys_equal() ? "1" : "0");
}

}  // namespace qkdlab
