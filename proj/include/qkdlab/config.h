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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "qkdlab/adversary.h"
#include "qkdlab/protocol.h"
#include "qkdlab/source.h"

namespace qkdlab {

/// Malformed or schema-violating configuration: bad JSON, unknown keys,
/// missing keys or wrong types.
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

/// Reads and parses a JSON file. Throws ConfigError.
Json load_json_file(const std::string &path);
/// Parses JSON text. Throws ConfigError.
Json parse_json(const std::string &text);

/// {"type": "delta", "angle"} | {"type": "uniform" | "von-mises-like",
/// "center", "half_width", "nodes"?} | {"type": "table", "densities",
/// "start"?, "nodes"?}.
AngularDistribution distribution_from_json(const Json &j);

/// A source and the tolerance it should be verified at.
struct SourceConfig {
    CertifiedSource source;
    double tolerance;
};

/// {"kind": "ideal"} or {"kind": "angular", "p0": dist, "p1": dist};
/// both accept an optional "tol".
SourceConfig source_from_json(const Json &j);

/// {"loss"?, "flip"?, "invert"?}.
ChannelModel channel_from_json(const Json &j);

/// "none" | "intercept-resend" | "distinguish" | {"intercept-resend":
/// {"basis"?}} | {"distinguish": {"basis"?}} | {"custom": {"povm",
/// "resend", "guesses"}}. Distinguish targets the source's two key states
/// in the given basis (default 0). Matrices are arrays of rows whose
/// entries are numbers or [re, im] pairs.
AttackStrategy attack_from_json(const Json &j, const SourceModel &src);

/// Protocol parameters. Code: {"kind": "bch" | "gv", "t"?} or
/// {"kind": "explicit", "rows", "t_max"}; default "bch" above n = 24 and
/// "gv" otherwise, with t = ceil((delta_p + eps) n). Amplifier:
/// {"kind": "bch-extension", "extra"?} | {"kind": "coset", "d_min"?} |
/// {"kind": "explicit", "rows", "d_w"} | {"kind": "random"}; default
/// matches the code. "random" carries no d_w certificate.
ProtocolParams protocol_from_json(const Json &j, const QuasiPerfectCertificate &cert, uint64_t seed);

struct SimulationConfig {
    SourceConfig source;
    ProtocolParams params;
    ChannelModel channel;
    AttackStrategy attack;
    size_t sessions;
    std::optional<uint64_t> seed;
    SessionOptions options;
};

/// {"source", "protocol", "channel"?, "attack"?, "sessions"?, "seed"?,
/// "enforce_assumptions"?}. `seed_override` replaces the seed used for
/// code construction.
SimulationConfig simulation_from_json(const Json &j, std::optional<uint64_t> seed_override = std::nullopt);

/// Rejects keys outside `allowed`. Throws ConfigError naming `context`.
void require_keys(const Json &j, std::initializer_list<const char *> allowed, const std::string &context);

}  // namespace qkdlab
