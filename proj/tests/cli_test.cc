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

// Runs the command-line tool and checks exit codes and key output.

#include <sys/wait.h>

#include <cstdio>
#include <string>

#include "gtest/gtest.h"

namespace {

struct CliResult {
    int code;
    std::string out;
};

CliResult run(const std::string &args) {
    std::string cmd = std::string(QKDLAB_CLI) + " " + args + " 2>/dev/null";
    FILE *pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) {
        out.append(buf, got);
    }
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

const std::string kData = QKDLAB_TEST_DATA;

}  // namespace

TEST(cli, usage_errors) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("keyrate 0.1").code, 2);
    EXPECT_EQ(run("--mode bb99 keyrate 0 0 0 0").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(cli, source_verify) {
    CliResult ideal = run("source verify " + kData + "/ideal_source.json");
    EXPECT_EQ(ideal.code, 0);
    EXPECT_NE(ideal.out.find("certified: yes"), std::string::npos);
    CliResult tilted = run("source verify " + kData + "/tilted_source.json");
    EXPECT_EQ(tilted.code, 0);
    EXPECT_NE(tilted.out.find("0.099958"), std::string::npos);
    EXPECT_EQ(run("source verify " + kData + "/malformed.json").code, 2);
    EXPECT_EQ(run("source verify " + kData + "/does_not_exist.json").code, 2);
}

TEST(cli, keyrate) {
    CliResult known = run("keyrate 0.05 0 0 0");
    EXPECT_EQ(known.code, 0);
    EXPECT_NE(known.out.find("rate 0.0620"), std::string::npos);
    EXPECT_NE(run("keyrate 0 0 0 0").out.find("rate 1 "), std::string::npos);
    CliResult negative = run("keyrate 0.2 0 0 0");
    EXPECT_EQ(negative.code, 0);
    EXPECT_NE(negative.out.find("no key"), std::string::npos);
    EXPECT_EQ(run("keyrate 0.6 0 0 0").code, 1);
}

TEST(cli, codes) {
    EXPECT_EQ(run("--seed 1 codes gv --n 7 --t 1").code, 0);
    EXPECT_EQ(run("--seed 1 codes gv --n 4 --t 2").code, 1);
    EXPECT_EQ(run("--seed 1 codes pa --n 10 --t 0 --m 5 --d-min 2").code, 0);
    EXPECT_EQ(run("--seed 1 codes pa --n 7 --t 1 --m 1 --d-min 2").code, 1);
}

TEST(cli, simulate_noiseless) {
    CliResult r = run("--seed 3 simulate " + kData + "/sim_noiseless.json");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.find("aborted"), std::string::npos);
    EXPECT_EQ(r.out.find(",0\n"), std::string::npos);
}

TEST(cli, simulate_is_deterministic) {
    std::string args = "--seed 11 --trials 20 simulate " + kData + "/sim_noiseless.json";
    CliResult a = run(args);
    CliResult b = run(args);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(cli, seed_is_reported) {
    std::string cmd = std::string(QKDLAB_CLI) + " --trials 2 simulate " + kData + "/sim_noiseless.json 2>&1 >/dev/null";
    FILE *pipe = popen(cmd.c_str(), "r");
    char buf[256] = {0};
    size_t got = fread(buf, 1, sizeof buf - 1, pipe);
    pclose(pipe);
    EXPECT_EQ(std::string(buf, got).rfind("seed: ", 0), 0u);
}

TEST(cli, bounds_and_experiments) {
    EXPECT_EQ(run("--seed 2 bounds tails").code, 0);
    EXPECT_EQ(run("bounds nonsense").code, 2);
    EXPECT_EQ(run("--seed 2 --trials 2000 distinguish").code, 0);
    EXPECT_EQ(run("--seed 2 --trials 6 independence").code, 0);
}
