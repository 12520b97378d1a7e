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

#include "gtest/gtest.h"

using namespace qkdlab;

TEST(config, malformed_json) {
    EXPECT_THROW(parse_json("{\"kind\": "), ConfigError);
    EXPECT_THROW(load_json_file(QKDLAB_TEST_DATA "/missing.json"), ConfigError);
}

TEST(config, unknown_keys_rejected) {
    EXPECT_THROW(source_from_json(parse_json(R"({"kind": "ideal", "extra": 1})")), ConfigError);
    EXPECT_THROW(channel_from_json(parse_json(R"({"lose": 0.1})")), ConfigError);
}

TEST(config, distributions) {
    auto d = distribution_from_json(parse_json(R"({"type": "uniform", "center": 0.1, "half_width": 0.05})"));
    EXPECT_EQ(d.kind(), AngularDistribution::Kind::kUniform);
    EXPECT_DOUBLE_EQ(d.center(), 0.1);
    auto c = distribution_from_json(parse_json(R"({"type": "von-mises-like", "center": 0, "half_width": 0.1})"));
    EXPECT_EQ(c.kind(), AngularDistribution::Kind::kTruncatedCosine);
    EXPECT_THROW(distribution_from_json(parse_json(R"({"type": "gaussian"})")), ConfigError);
}

TEST(config, angular_source) {
    SourceConfig s = source_from_json(load_json_file(QKDLAB_TEST_DATA "/tilted_source.json"));
    EXPECT_NEAR(s.source.certificate.gamma_qp, 0.099958, 1e-6);
}

TEST(config, attacks) {
    SourceModel src = ideal_bb84_source().source;
    EXPECT_EQ(attack_from_json(parse_json(R"("none")"), src).kind, AttackStrategy::Kind::kNone);
    AttackStrategy ir = attack_from_json(parse_json(R"({"intercept-resend": {"basis": 1}})"), src);
    EXPECT_EQ(ir.kind, AttackStrategy::Kind::kInterceptResend);
    EXPECT_EQ(ir.fixed_basis, 1);
    AttackStrategy custom = attack_from_json(parse_json(R"({"custom": {
        "povm": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]],
        "resend": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]],
        "guesses": [0, 1]}})"),
                                             src);
    EXPECT_EQ(custom.kind, AttackStrategy::Kind::kCustomPovm);
    EXPECT_THROW(attack_from_json(parse_json(R"("photon-splitting")"), src), ConfigError);
}

TEST(config, protocol_defaults) {
    ProtocolParams p = protocol_from_json(
        parse_json(R"({"n": 200, "m": 8, "delta_p": 0.005, "eps": 0.005, "lambda": 0.34})"),
        ideal_bb84_source().certificate, 1);
    EXPECT_EQ(p.code.construction(), LinearCode::Construction::kBch);
    EXPECT_GE(p.code.t_max(), correction_requirement(0.005, 0.005, 200));
    EXPECT_EQ(p.amplifier.m(), 8u);
    EXPECT_EQ(p.mode, ProtocolMode::kBB84);
}

TEST(config, simulation_file) {
    SimulationConfig s = simulation_from_json(load_json_file(QKDLAB_TEST_DATA "/sim_intercept.json"), 5);
    EXPECT_EQ(s.sessions, 200u);
    EXPECT_EQ(s.seed, 5u);
    EXPECT_FALSE(s.options.enforce_assumptions);
    EXPECT_EQ(s.attack.kind, AttackStrategy::Kind::kInterceptResend);
    EXPECT_EQ(s.params.n, 256u);
}
