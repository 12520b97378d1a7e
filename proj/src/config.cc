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

#include "qkdlab/config.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qkdlab/codes.h"

namespace qkdlab {

Json parse_json(const std::string &text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

Json load_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_json(buf.str());
}

void require_keys(const Json &j, std::initializer_list<const char *> allowed, const std::string &context) {
    if (!j.is_object()) {
        throw ConfigError(context + " must be a JSON object");
    }
    for (const auto &item : j.items()) {
        bool known = false;
        for (const char *a : allowed) {
            known = known || item.key() == a;
        }
        if (!known) {
            throw ConfigError("unknown key '" + item.key() + "' in " + context);
        }
    }
}

namespace {

const Json &member(const Json &j, const char *key, const std::string &context) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ConfigError("missing key '" + std::string(key) + "' in " + context);
    }
    return *it;
}

double number(const Json &j, const std::string &what) {
    if (!j.is_number()) {
        throw ConfigError(what + " must be a number");
    }
    return j.get<double>();
}

double number_or(const Json &j, const char *key, double fallback, const std::string &context) {
    auto it = j.find(key);
    return it == j.end() ? fallback : number(*it, context + "." + key);
}

uint64_t unsigned_value(const Json &j, const std::string &what) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<int64_t>() < 0)) {
        throw ConfigError(what + " must be a nonnegative integer");
    }
    return j.get<uint64_t>();
}

uint64_t unsigned_or(const Json &j, const char *key, uint64_t fallback, const std::string &context) {
    auto it = j.find(key);
    return it == j.end() ? fallback : unsigned_value(*it, context + "." + key);
}

std::string string_value(const Json &j, const std::string &what) {
    if (!j.is_string()) {
        throw ConfigError(what + " must be a string");
    }
    return j.get<std::string>();
}

ComplexMatrix matrix_from_json(const Json &j, const std::string &what) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError(what + " must be a nonempty array of rows");
    }
    size_t d = j.size();
    ComplexMatrix m(d);
    for (size_t r = 0; r < d; r++) {
        if (!j[r].is_array() || j[r].size() != d) {
            throw ConfigError(what + " must be square");
        }
        for (size_t c = 0; c < d; c++) {
            const Json &e = j[r][c];
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ConfigError(what + " entries must be numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

Gf2Matrix rows_from_json(const Json &j, size_t n, const std::string &what) {
    if (!j.is_array()) {
        throw ConfigError(what + " must be an array of bit strings");
    }
    std::vector<std::string> rows;
    for (const auto &r : j) {
        rows.push_back(string_value(r, what + " row"));
    }
    try {
        Gf2Matrix m = Gf2Matrix::from_strings(rows, n);
        if (m.cols() != n) {
            throw ConfigError(what + " rows must have length n = " + std::to_string(n));
        }
        return m;
    } catch (const std::invalid_argument &e) {
        throw ConfigError(what + ": " + e.what());
    }
}

}  // namespace

AngularDistribution distribution_from_json(const Json &j) {
    const std::string ctx = "distribution";
    if (!j.is_object()) {
        throw ConfigError(ctx + " must be an object");
    }
    std::string type = string_value(member(j, "type", ctx), ctx + ".type");
    if (type == "delta") {
        require_keys(j, {"type", "angle"}, ctx);
        return AngularDistribution::delta(number(member(j, "angle", ctx), ctx + ".angle"));
    }
    if (type == "uniform" || type == "von-mises-like") {
        require_keys(j, {"type", "center", "half_width", "nodes"}, ctx);
        double center = number(member(j, "center", ctx), ctx + ".center");
        double w = number(member(j, "half_width", ctx), ctx + ".half_width");
        size_t nodes = unsigned_or(j, "nodes", kDefaultQuadratureNodes, ctx);
        return type == "uniform" ? AngularDistribution::uniform(center, w, nodes)
                                 : AngularDistribution::truncated_cosine(center, w, nodes);
    }
    if (type == "table") {
        require_keys(j, {"type", "densities", "start", "nodes"}, ctx);
        const Json &d = member(j, "densities", ctx);
        if (!d.is_array()) {
            throw ConfigError(ctx + ".densities must be an array");
        }
        std::vector<double> densities;
        for (const auto &x : d) {
            densities.push_back(number(x, ctx + ".densities entry"));
        }
        return AngularDistribution::table(std::move(densities), number_or(j, "start", 0, ctx),
                                          unsigned_or(j, "nodes", kDefaultQuadratureNodes, ctx));
    }
    throw ConfigError("unknown distribution type '" + type + "'");
}

SourceConfig source_from_json(const Json &j) {
    const std::string ctx = "source";
    if (!j.is_object()) {
        throw ConfigError(ctx + " must be an object");
    }
    std::string kind = string_value(member(j, "kind", ctx), ctx + ".kind");
    if (kind == "ideal") {
        require_keys(j, {"kind", "tol"}, ctx);
        return {ideal_bb84_source(), number_or(j, "tol", kCertificateTolerance, ctx)};
    }
    if (kind == "angular") {
        require_keys(j, {"kind", "p0", "p1", "tol"}, ctx);
        AngularDistribution p0 = distribution_from_json(member(j, "p0", ctx));
        AngularDistribution p1 = distribution_from_json(member(j, "p1", ctx));
        return {build_from_distributions(p0, p1), number_or(j, "tol", kQuadratureCertificateTolerance, ctx)};
    }
    throw ConfigError("unknown source kind '" + kind + "'");
}

ChannelModel channel_from_json(const Json &j) {
    require_keys(j, {"loss", "flip", "invert"}, "channel");
    ChannelModel ch;
    ch.loss_probability = number_or(j, "loss", 0, "channel");
    ch.flip_probability = number_or(j, "flip", 0, "channel");
    ch.invert_probability = number_or(j, "invert", 0, "channel");
    return ch;
}

AttackStrategy attack_from_json(const Json &j, const SourceModel &src) {
    auto basis_of = [](const Json &body, const std::string &ctx) -> std::optional<int> {
        require_keys(body, {"basis"}, ctx);
        if (!body.contains("basis")) {
            return std::nullopt;
        }
        uint64_t b = unsigned_value(body["basis"], ctx + ".basis");
        if (b > 1) {
            throw ConfigError(ctx + ".basis must be 0 or 1");
        }
        return static_cast<int>(b);
    };
    auto distinguish = [&](std::optional<int> basis) {
        int a = basis.value_or(0);
        return AttackStrategy::distinguish(src.state(a, 0), src.state(a, 1));
    };
    if (j.is_string()) {
        std::string name = j.get<std::string>();
        if (name == "none") {
            return AttackStrategy::none();
        }
        if (name == "intercept-resend") {
            return AttackStrategy::intercept_resend();
        }
        if (name == "distinguish") {
            return distinguish(std::nullopt);
        }
        throw ConfigError("unknown attack '" + name + "'");
    }
    if (!j.is_object() || j.size() != 1) {
        throw ConfigError("attack must be a name or an object with exactly one key");
    }
    const auto &[name, body] = *j.items().begin();
    if (name == "intercept-resend") {
        return AttackStrategy::intercept_resend(basis_of(body, "attack.intercept-resend"));
    }
    if (name == "distinguish") {
        return distinguish(basis_of(body, "attack.distinguish"));
    }
    if (name == "custom") {
        const std::string ctx = "attack.custom";
        require_keys(body, {"povm", "resend", "guesses"}, ctx);
        const Json &povm = member(body, "povm", ctx);
        const Json &resend = member(body, "resend", ctx);
        const Json &guesses = member(body, "guesses", ctx);
        if (!povm.is_array() || !resend.is_array() || !guesses.is_array()) {
            throw ConfigError(ctx + " fields must be arrays");
        }
        std::vector<MeasurementOperator> ops;
        for (const auto &m : povm) {
            ops.emplace_back(matrix_from_json(m, ctx + ".povm"));
        }
        std::vector<DensityMatrix> states;
        for (const auto &m : resend) {
            states.emplace_back(matrix_from_json(m, ctx + ".resend"));
        }
        std::vector<int> g;
        for (const auto &x : guesses) {
            if (!x.is_number_integer()) {
                throw ConfigError(ctx + ".guesses entries must be integers");
            }
            g.push_back(x.get<int>());
        }
        return AttackStrategy::custom(Povm(std::move(ops)), std::move(states), std::move(g));
    }
    throw ConfigError("unknown attack '" + name + "'");
}

ProtocolParams protocol_from_json(const Json &j, const QuasiPerfectCertificate &cert, uint64_t seed) {
    const std::string ctx = "protocol";
    require_keys(j, {"n", "m", "delta_p", "eps", "eps_n", "lambda", "mode", "code", "amplifier"}, ctx);
    ProtocolParams p;
    p.n = unsigned_value(member(j, "n", ctx), ctx + ".n");
    p.m = unsigned_value(member(j, "m", ctx), ctx + ".m");
    p.delta_p = number(member(j, "delta_p", ctx), ctx + ".delta_p");
    p.eps = number(member(j, "eps", ctx), ctx + ".eps");
    p.eps_n = number_or(j, "eps_n", 0.5, ctx);
    p.lambda = number(member(j, "lambda", ctx), ctx + ".lambda");
    p.seed = seed;
    if (j.contains("mode")) {
        try {
            p.mode = parse_mode(string_value(j["mode"], ctx + ".mode"));
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
    }
    if (p.n == 0 || p.m == 0) {
        throw ConfigError("protocol.n and protocol.m must be positive");
    }

    size_t t_needed = correction_requirement(p.delta_p, p.eps, p.n);
    Json code = j.value("code", Json::object());
    require_keys(code, {"kind", "t", "rows", "t_max"}, ctx + ".code");
    std::string code_kind = code.contains("kind") ? string_value(code["kind"], ctx + ".code.kind")
                                                  : (p.n > kMinDistanceCap ? "bch" : "gv");
    if (code_kind == "bch" || code_kind == "gv") {
        size_t t = unsigned_or(code, "t", t_needed, ctx + ".code");
        p.code = code_kind == "bch" ? LinearCode::bch(p.n, t) : gilbert_varshamov_construct(p.n, t, seed);
    } else if (code_kind == "explicit") {
        Gf2Matrix f = rows_from_json(member(code, "rows", ctx + ".code"), p.n, ctx + ".code.rows");
        p.code = LinearCode(std::move(f), unsigned_value(member(code, "t_max", ctx + ".code"), ctx + ".code.t_max"));
    } else {
        throw ConfigError("unknown code kind '" + code_kind + "'");
    }

    Json amp = j.value("amplifier", Json::object());
    require_keys(amp, {"kind", "extra", "d_min", "rows", "d_w"}, ctx + ".amplifier");
    std::string amp_kind = amp.contains("kind")
                               ? string_value(amp["kind"], ctx + ".amplifier.kind")
                               : (p.code.construction() == LinearCode::Construction::kBch ? "bch-extension" : "coset");
    if (amp_kind == "bch-extension") {
        p.amplifier = bch_privacy_extension(p.code, p.m, unsigned_or(amp, "extra", 2, ctx + ".amplifier"));
    } else if (amp_kind == "coset") {
        double inv = p.lambda < 1 ? 1 / (1 - p.lambda) : 0;
        double need = 2 * (p.delta_p * inv + 0.5 * cert.gamma_qp + p.eps) * static_cast<double>(p.n);
        auto d_min = static_cast<size_t>(
            unsigned_or(amp, "d_min", static_cast<uint64_t>(std::max(1.0, std::ceil(need - 1e-9))), ctx + ".amplifier"));
        p.amplifier = build_privacy_matrix(p.code.parity_check(), d_min, p.m, derive_seed(seed, 0x50a));
    } else if (amp_kind == "random") {
        // Uncertified: d_w = 0, so only usable with enforce_assumptions off.
        Rng rng(derive_seed(seed, 0x50b));
        Gf2Matrix k;
        do {
            k = Gf2Matrix::random(p.m, p.n, rng);
        } while (!Gf2Matrix::stack(p.code.parity_check(), k).has_independent_rows());
        p.amplifier = PrivacyAmplifier{std::move(k), 0, false, "random"};
    } else if (amp_kind == "explicit") {
        Gf2Matrix k = rows_from_json(member(amp, "rows", ctx + ".amplifier"), p.n, ctx + ".amplifier.rows");
        size_t d_w = unsigned_value(member(amp, "d_w", ctx + ".amplifier"), ctx + ".amplifier.d_w");
        p.amplifier = PrivacyAmplifier{std::move(k), d_w, false, "explicit"};
    } else {
        throw ConfigError("unknown amplifier kind '" + amp_kind + "'");
    }
    return p;
}

SimulationConfig simulation_from_json(const Json &j, std::optional<uint64_t> seed_override) {
    require_keys(j, {"source", "protocol", "channel", "attack", "sessions", "seed", "enforce_assumptions"},
                 "simulation config");
    std::optional<uint64_t> seed;
    if (j.contains("seed")) {
        seed = unsigned_value(j["seed"], "seed");
    }
    if (seed_override) {
        seed = seed_override;
    }
    SourceConfig source = source_from_json(member(j, "source", "simulation config"));
    ProtocolParams params =
        protocol_from_json(member(j, "protocol", "simulation config"), source.source.certificate, seed.value_or(0));
    ChannelModel channel = j.contains("channel") ? channel_from_json(j["channel"]) : ChannelModel{};
    AttackStrategy attack =
        j.contains("attack") ? attack_from_json(j["attack"], source.source.source) : AttackStrategy::none();
    size_t sessions = unsigned_or(j, "sessions", 100, "simulation config");
    SessionOptions options;
    if (j.contains("enforce_assumptions")) {
        if (!j["enforce_assumptions"].is_boolean()) {
            throw ConfigError("enforce_assumptions must be a boolean");
        }
        options.enforce_assumptions = j["enforce_assumptions"].get<bool>();
    }
    return SimulationConfig{std::move(source), std::move(params), channel, std::move(attack), sessions, seed, options};
}

}  // namespace qkdlab
