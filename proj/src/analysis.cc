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

#include "qkdlab/analysis.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "qkdlab/batch.h"
#include "qkdlab/codes.h"

namespace qkdlab {

JointDistribution::JointDistribution(std::vector<std::vector<double>> table) : table_(std::move(table)) {
    if (table_.empty() || table_[0].empty()) {
        throw std::invalid_argument("joint distribution needs at least one key and one view");
    }
    double total = 0;
    for (const auto &row : table_) {
        if (row.size() != table_[0].size()) {
            throw std::invalid_argument("joint distribution rows have different lengths");
        }
        for (double p : row) {
            if (!(p >= 0) || !std::isfinite(p)) {
                throw std::invalid_argument("joint distribution entries must be finite and nonnegative");
            }
            total += p;
        }
    }
    if (std::abs(total - 1) > 1e-9) {
        throw std::invalid_argument("joint distribution sums to " + std::to_string(total));
    }
}

double conditional_entropy(const JointDistribution &j) {
    double h = 0;
    for (size_t v = 0; v < j.views(); v++) {
        double pv = 0;
        for (size_t k = 0; k < j.keys(); k++) {
            pv += j(k, v);
        }
        for (size_t k = 0; k < j.keys(); k++) {
            double p = j(k, v);
            if (p > 0) {
                h -= p * std::log2(p / pv);
            }
        }
    }
    return h;
}

namespace {

std::vector<double> binomial_pmf(size_t n, double p) {
    std::vector<double> out(n + 1);
    for (size_t k = 0; k <= n; k++) {
        out[k] = binomial_coefficient(n, k) * std::pow(p, static_cast<double>(k)) *
                 std::pow(1 - p, static_cast<double>(n - k));
    }
    return out;
}

}  // namespace

TailResult binomial_tail_bound(double p, double r, double t, size_t n_r, size_t n_p, TailSide side) {
    if (n_r == 0 || n_p == 0) {
        throw std::invalid_argument("n_r and n_p must be positive");
    }
    size_t n = n_r + n_p;
    if (n > kTailMaxN) {
        throw std::invalid_argument("n_r + n_p = " + std::to_string(n) + " exceeds " + std::to_string(kTailMaxN));
    }
    if (!(t > 0)) {
        throw std::invalid_argument("t must be positive");
    }
    if (side == TailSide::kUpper && !(0 < r && r <= p && p + t < 1)) {
        throw std::invalid_argument("upper tail needs 0 < r <= p < p + t < 1");
    }
    if (side == TailSide::kLower && !(0 < r - t && r <= p && p < 1)) {
        throw std::invalid_argument("lower tail needs 0 < r - t <= r <= p < 1");
    }
    auto pr = binomial_pmf(n_r, r);
    auto pp = binomial_pmf(n_p, p);
    std::vector<double> sum(n + 1, 0.0);
    for (size_t i = 0; i <= n_r; i++) {
        for (size_t k = 0; k <= n_p; k++) {
            sum[i + k] += pr[i] * pp[k];
        }
    }
    double exact = 0;
    double dn = static_cast<double>(n);
    if (side == TailSide::kUpper) {
        double lo = std::ceil((p + t) * dn - 1e-12);
        for (size_t k = 0; k <= n; k++) {
            if (static_cast<double>(k) >= lo) {
                exact += sum[k];
            }
        }
    } else {
        double hi = std::floor((r - t) * dn + 1e-12);
        for (size_t k = 0; k <= n; k++) {
            if (static_cast<double>(k) <= hi) {
                exact += sum[k];
            }
        }
    }
    double bound = std::exp(-2 * t * t * dn);
    return {exact, bound, exact <= bound};
}

double reliability_bound(size_t n, double eps, double delta_p) {
    double dn = static_cast<double>(n);
    double mid = delta_p + 0.5 * eps;
    double first = std::exp(-(eps * eps / 4) * mid * dn);
    double hi = delta_p + 1.5 * eps;
    double second = std::exp(-0.25 * (hi * hi / mid) * dn);
    return std::max(first, second);
}

PrivacyTerms privacy_bookkeeping(size_t n, size_t m, double eps, std::optional<double> p_bad) {
    PrivacyTerms out;
    double e2n = eps * eps * static_cast<double>(n);
    out.g = std::exp(-e2n) + std::exp(-0.5 * e2n);
    out.h = 2 * std::pow(out.g, 0.25) + std::sqrt(out.g);
    out.p_bad = p_bad ? *p_bad : std::sqrt(out.g);
    double dm = static_cast<double>(m);
    double c = dm + 1 / std::log(2.0);
    out.eps1 = 2 * c * out.h + 2 * std::sqrt(2 * c * dm * out.h) + dm * out.p_bad;
    out.q = std::sqrt(dm / (2 * c * out.h));
    return out;
}

SlopeFit eps1_slope(double lambda, double eps, size_t n_lo, size_t n_hi, size_t points) {
    if (points < 2 || n_hi <= n_lo) {
        throw std::invalid_argument("slope fit needs at least two distinct n");
    }
    SlopeFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < points; i++) {
        size_t n = n_lo + (n_hi - n_lo) * i / (points - 1);
        auto m = static_cast<size_t>(std::floor(lambda * static_cast<double>(n)));
        double e = privacy_bookkeeping(n, m, eps).eps1;
        fit.n.push_back(n);
        fit.eps1.push_back(e);
        double x = static_cast<double>(n);
        double y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double k = static_cast<double>(points);
    fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / k;
    return fit;
}

std::optional<size_t> q_threshold_n(double lambda, double eps, size_t n_max) {
    for (size_t n = 1; n <= n_max; n++) {
        auto m = static_cast<size_t>(std::floor(lambda * static_cast<double>(n)));
        if (m >= 1 && privacy_bookkeeping(n, m, eps).q >= 1) {
            return n;
        }
    }
    return std::nullopt;
}

std::string BoundReport::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["empirical"] = empirical;
    j["bound"] = bound;
    j["sigma"] = sigma;
    j["n"] = n;
    j["trials"] = trials;
    j["pass"] = passed;
    return j.dump();
}

double binomial_sigma(double p, size_t trials) {
    if (trials == 0) {
        return 0;
    }
    return std::sqrt(std::max(0.0, p * (1 - p)) / static_cast<double>(trials));
}

Complex tensor_expectation(const ComplexMatrix &y, const std::vector<const ComplexMatrix *> &factors) {
    size_t dim = size_t{1} << factors.size();
    if (y.dim() != dim) {
        throw std::invalid_argument("tensor_expectation: dimension mismatch");
    }
    std::vector<Complex> cur(dim * dim);
    for (size_t i = 0; i < dim; i++) {
        for (size_t j = 0; j < dim; j++) {
            cur[i * dim + j] = y(i, j);
        }
    }
    // Contract the least significant factor first.
    for (size_t f = factors.size(); f-- > 0;) {
        const ComplexMatrix &m = *factors[f];
        size_t half = dim / 2;
        std::vector<Complex> next(half * half);
        for (size_t x = 0; x < half; x++) {
            for (size_t z = 0; z < half; z++) {
                Complex acc = 0;
                for (size_t a = 0; a < 2; a++) {
                    for (size_t b = 0; b < 2; b++) {
                        acc += cur[(2 * x + a) * dim + (2 * z + b)] * m(b, a);
                    }
                }
                next[x * half + z] = acc;
            }
        }
        cur = std::move(next);
        dim = half;
    }
    return cur[0];
}

ComplexMatrix product_projector(const QuasiPerfectCertificate &cert, const BitString &b, const BitString &j) {
    if (b.size() != j.size()) {
        throw std::invalid_argument("product_projector: basis and outcome strings differ in length");
    }
    ComplexMatrix out = ComplexMatrix::identity(1);
    for (size_t i = 0; i < b.size(); i++) {
        out = tensor_product(out, cert.p_tilde[b.get(i)][j.get(i)].matrix());
    }
    return out;
}

IndependenceReport key_independence_check(const Gf2Matrix &f, const Gf2Matrix &k, const CertifiedSource &src,
                                          const BitString &b, const BitString &h, size_t d_pp,
                                          const ComplexMatrix &x, double tol, double hypothesis_tol) {
    size_t n = k.cols();
    if (n == 0 || n > kIndependenceMaxN) {
        throw std::invalid_argument("key_independence_check needs 1 <= n <= " + std::to_string(kIndependenceMaxN));
    }
    if ((f.rows() > 0 && f.cols() != n) || b.size() != n || h.size() != n) {
        throw std::invalid_argument("key_independence_check: F, K, b and h must all have length n");
    }
    if (x.dim() != (size_t{1} << n)) {
        throw std::invalid_argument("key_independence_check: X must act on 2^n dimensions");
    }
    if (src.source.dim() != 2) {
        throw std::invalid_argument("key_independence_check needs a qubit source");
    }
    const QuasiPerfectCertificate &cert = src.certificate;
    IndependenceReport report;
    Gf2Matrix f_full = f.rows() > 0 ? f : Gf2Matrix(n);
    report.d_w = joint_min_weight(f_full, k);
    if (2 * d_pp > report.d_w) {
        report.note = "d'' exceeds half the joint minimum weight";
        return report;
    }

    // Support hypothesis: ||X P~^j_b||_F^2 = Tr(X^dagger X P~^j_b).
    ComplexMatrix y = x.adjoint() * x;
    std::vector<const ComplexMatrix *> factors(n);
    size_t strings = size_t{1} << n;
    for (uint64_t jv = 0; jv < strings; jv++) {
        BitString j = BitString::from_uint(jv, n);
        if (j.distance(h) < d_pp) {
            continue;
        }
        for (size_t i = 0; i < n; i++) {
            factors[i] = &cert.p_tilde[b.get(i)][j.get(i)].matrix();
        }
        double norm2 = tensor_expectation(y, factors).real();
        report.hypothesis_residual = std::max(report.hypothesis_residual, std::sqrt(std::max(0.0, norm2)));
    }
    if (report.hypothesis_residual >= hypothesis_tol) {
        report.note = "X is not supported on strings within d'' of h";
        return report;
    }
    report.hypothesis_ok = true;

    size_t r = f.rows();
    size_t m = k.rows();
    std::vector<Complex> sums((size_t{1} << r) << m, 0.0);
    std::vector<size_t> counts(sums.size(), 0);
    for (uint64_t gv = 0; gv < strings; gv++) {
        BitString g = BitString::from_uint(gv, n);
        for (size_t i = 0; i < n; i++) {
            factors[i] = &src.source.state(1 - b.get(i), g.get(i)).matrix();
        }
        uint64_t s = r ? gf2_matvec(f, g).to_uint() : 0;
        uint64_t kappa = gf2_matvec(k, g).to_uint();
        size_t cell = (s << m) | kappa;
        sums[cell] += tensor_expectation(x, factors);
        counts[cell]++;
    }
    for (uint64_t s = 0; s < (uint64_t{1} << r); s++) {
        std::optional<Complex> first;
        for (uint64_t kappa = 0; kappa < (uint64_t{1} << m); kappa++) {
            size_t cell = (s << m) | kappa;
            if (counts[cell] == 0) {
                continue;
            }
            Complex mean = sums[cell] / static_cast<double>(counts[cell]);
            if (!first) {
                first = mean;
            }
            report.max_spread = std::max(report.max_spread, std::abs(mean - *first));
        }
    }
    // Spread against the first key bounds the pairwise spread within 2x.
    report.passed = report.max_spread < tol;
    return report;
}

ComplexMatrix random_supported_operator(const QuasiPerfectCertificate &cert, const BitString &b,
                                        const BitString &h, size_t d_pp, Rng &rng) {
    size_t n = b.size();
    size_t dim = size_t{1} << n;
    ComplexMatrix pi(dim);
    for (uint64_t jv = 0; jv < dim; jv++) {
        BitString j = BitString::from_uint(jv, n);
        if (j.distance(h) < d_pp) {
            pi += product_projector(cert, b, j);
        }
    }
    ComplexMatrix m = random_density_matrix(dim, rng).matrix();
    return pi * m * pi;
}

MeasurementOperator small_sphere_projector(const QuasiPerfectCertificate &cert, const BitString &b_tilde,
                                           const BitString &h, const std::vector<size_t> &s_k_positions,
                                           size_t threshold_count) {
    size_t total = b_tilde.size();
    if (total > kSmallSphereMaxPositions) {
        throw std::length_error("small_sphere_projector supports at most " +
                                std::to_string(kSmallSphereMaxPositions) + " positions");
    }
    if (h.size() != total) {
        throw std::invalid_argument("small_sphere_projector: h and b~ differ in length");
    }
    BitString in_key(total);
    for (size_t i : s_k_positions) {
        if (i >= total || in_key.get(i)) {
            throw std::invalid_argument("small_sphere_projector: key positions must be distinct and in range");
        }
        in_key.set(i, true);
    }
    size_t dim = size_t{1} << total;
    if (threshold_count == 0) {
        return MeasurementOperator(ComplexMatrix::identity(dim));
    }
    if (threshold_count > s_k_positions.size()) {
        return MeasurementOperator(ComplexMatrix(dim));
    }
    // bucket[d] accumulates the partial sum over prefixes at distance d,
    // with d capped at the threshold.
    std::vector<std::optional<ComplexMatrix>> bucket(threshold_count + 1);
    bucket[0] = ComplexMatrix::identity(1);
    const ComplexMatrix id2 = ComplexMatrix::identity(2);
    for (size_t i = 0; i < total; i++) {
        std::vector<std::optional<ComplexMatrix>> next(threshold_count + 1);
        auto add = [&](size_t d, ComplexMatrix term) {
            if (next[d]) {
                *next[d] += term;
            } else {
                next[d] = std::move(term);
            }
        };
        for (size_t d = 0; d <= threshold_count; d++) {
            if (!bucket[d]) {
                continue;
            }
            if (!in_key.get(i)) {
                add(d, tensor_product(*bucket[d], id2));
                continue;
            }
            for (int w = 0; w < 2; w++) {
                size_t nd = std::min(threshold_count, d + (w != static_cast<int>(h.get(i))));
                add(nd, tensor_product(*bucket[d], cert.p_tilde[b_tilde.get(i)][w].matrix()));
            }
        }
        bucket = std::move(next);
    }
    return MeasurementOperator(bucket[threshold_count] ? *bucket[threshold_count] : ComplexMatrix(dim));
}

uint64_t session_seed(uint64_t master, size_t index) {
    return derive_seed(master, index);
}

std::string EntropyReport::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = "entropy";
    j["empirical"] = empirical;
    j["plug_in"] = plug_in;
    j["sigma"] = sigma;
    j["bias"] = bias;
    j["band"] = band;
    j["eps1"] = eps1;
    j["floor"] = floor;
    j["m"] = m;
    j["sessions"] = sessions;
    j["completed"] = completed;
    j["cells"] = cells;
    j["pass"] = passed;
    return j.dump();
}

EntropyReport entropy_vs_bound_experiment(const ProtocolParams &p, const CertifiedSource &src,
                                          const ChannelModel &ch, const AttackStrategy &attack, size_t sessions,
                                          uint64_t seed, const SessionOptions &options, size_t threads) {
    if (p.m == 0 || p.m > 8) {
        throw std::invalid_argument("entropy experiment needs 1 <= m <= 8");
    }
    if (sessions == 0) {
        throw std::invalid_argument("entropy experiment needs at least one session");
    }
    struct Sample {
        uint64_t kappa = 0;
        uint64_t view = 0;
        bool completed = false;
    };
    const uint64_t key_space = uint64_t{1} << p.m;
    auto samples = parallel_map(
        sessions,
        [&](size_t i) {
            ProtocolParams local = p;
            local.seed = session_seed(seed, i);
            SessionOutcome out = run_session(local, src, ch, attack, options);
            uint64_t status = out.completed() ? 0 : (out.abort_reason == "verification" ? 2 : 1);
            uint64_t guess = 0;
            if (!out.transcript.s_k.empty()) {
                BitString eve = out.transcript.eve.guess_bits().select(out.transcript.s_k);
                guess = gf2_matvec(p.amplifier.k_matrix, eve).to_uint();
            }
            auto d_sp = static_cast<uint64_t>(out.d_sp + 1);
            Sample s;
            s.kappa = out.kappa.to_uint();
            s.view = ((status * (p.n + 2) + d_sp) * key_space) + guess;
            s.completed = out.completed();
            return s;
        },
        threads);

    std::map<std::pair<uint64_t, uint64_t>, size_t> joint;
    std::map<uint64_t, size_t> views;
    EntropyReport report;
    for (const auto &s : samples) {
        joint[{s.view, s.kappa}]++;
        views[s.view]++;
        report.completed += s.completed;
    }
    double total = static_cast<double>(sessions);
    double mean = 0;
    double second = 0;
    for (const auto &[key, count] : joint) {
        double c = static_cast<double>(count);
        double cond = -std::log2(c / static_cast<double>(views[key.first]));
        mean += c / total * cond;
        second += c / total * cond * cond;
    }
    report.plug_in = mean;
    report.bias = static_cast<double>(joint.size() - views.size()) / (2 * total * std::log(2.0));
    report.empirical = report.plug_in + report.bias;
    report.sigma = std::sqrt(std::max(0.0, second - mean * mean) / total);
    report.band = 3 * report.sigma + std::abs(report.bias);
    // Thin cells: the correction itself is unreliable, so count it twice.
    if (total / static_cast<double>(views.size() * key_space) < 5) {
        report.band += std::abs(report.bias);
    }
    report.m = p.m;
    report.sessions = sessions;
    report.cells = joint.size();
    report.eps1 = privacy_bookkeeping(p.n, p.m, p.eps).eps1;
    report.floor = static_cast<double>(p.m) - report.eps1;
    report.passed = report.empirical + report.band >= report.floor;
    return report;
}

ReliabilityReport reliability_experiment(const ProtocolParams &p, const CertifiedSource &src,
                                         const ChannelModel &ch, size_t sessions, uint64_t seed,
                                         const SessionOptions &options, size_t threads) {
    struct Sample {
        bool completed = false;
        bool equal = false;
        long d_sk = -1;
    };
    auto samples = parallel_map(
        sessions,
        [&](size_t i) {
            ProtocolParams local = p;
            local.seed = session_seed(seed, i);
            SessionOutcome out = run_session(local, src, ch, AttackStrategy::none(), options);
            return Sample{out.completed(), out.keys_equal(), out.d_sk};
        },
        threads);
    ReliabilityReport report;
    for (const auto &s : samples) {
        if (!s.completed) {
            continue;
        }
        report.completed++;
        report.mismatched += !s.equal;
        if (s.d_sk >= 0 && static_cast<size_t>(s.d_sk) <= p.code.t_max()) {
            report.decodable++;
            report.decoder_failures += !s.equal;
        }
    }
    BoundReport &b = report.bound;
    b.name = "reliability";
    b.n = p.n;
    b.trials = sessions;
    b.empirical = sessions ? static_cast<double>(report.mismatched) / static_cast<double>(sessions) : 0;
    b.bound = reliability_bound(p.n, p.eps, p.delta_p);
    b.sigma = binomial_sigma(b.empirical, sessions);
    b.passed = b.empirical <= b.bound + 3 * b.sigma;
    return report;
}

BoundReport product_guess_experiment(const DensityMatrix &rho0, const DensityMatrix &rho1, size_t m,
                                     size_t trials, uint64_t seed) {
    if (m == 0) {
        throw std::invalid_argument("product_guess_experiment needs m >= 1");
    }
    Povm f = optimal_binary_measurement(rho0, rho1);
    double correct[2] = {trace_product(f.op(0).matrix(), rho0.matrix()).real(),
                         trace_product(f.op(1).matrix(), rho1.matrix()).real()};
    Rng rng(seed);
    size_t all = 0;
    for (size_t t = 0; t < trials; t++) {
        bool ok = true;
        for (size_t i = 0; i < m; i++) {
            int bit = rng.bit();
            // Every position draws its outcome, so the stream layout does
            // not depend on earlier results.
            ok = (rng.uniform() < correct[bit]) && ok;
        }
        all += ok;
    }
    BoundReport report;
    report.name = "helstrom";
    report.n = m;
    report.trials = trials;
    report.empirical = trials ? static_cast<double>(all) / static_cast<double>(trials) : 0;
    report.bound = helstrom_bound(rho0, rho1, m);
    report.sigma = binomial_sigma(report.empirical, trials);
    report.passed = report.empirical <= report.bound + 3 * report.sigma;
    return report;
}

TailTuple random_tail_tuple(Rng &rng, size_t max_n) {
    TailTuple tt;
    size_t total = 2 + static_cast<size_t>(rng.below(max_n - 1));
    tt.n_r = 1 + static_cast<size_t>(rng.below(total - 1));
    tt.n_p = total - tt.n_r;
    tt.side = rng.bit() ? TailSide::kUpper : TailSide::kLower;
    // Keep every strict inequality away from its edge.
    if (tt.side == TailSide::kUpper) {
        tt.r = 0.02 + 0.9 * rng.uniform();
        tt.p = tt.r + (0.97 - tt.r) * rng.uniform();
        tt.t = (0.01 + 0.98 * rng.uniform()) * (0.99 - tt.p);
    } else {
        tt.r = 0.05 + 0.9 * rng.uniform();
        tt.p = tt.r + (0.98 - tt.r) * rng.uniform();
        tt.t = (0.01 + 0.98 * rng.uniform()) * (tt.r - 0.01);
    }
    return tt;
}

std::array<AngularDistribution, 2> random_angular_pair(Rng &rng, double max_spread, double max_offset) {
    auto draw = [&](double base) {
        double center = base + max_offset * (2 * rng.uniform() - 1);
        double w = max_spread * (0.05 + 0.95 * rng.uniform());
        return rng.bit() ? AngularDistribution::uniform(center, w) : AngularDistribution::truncated_cosine(center, w);
    };
    AngularDistribution p0 = draw(0);
    AngularDistribution p1 = draw(kPi / 4);
    return {p0, p1};
}

IndependenceTrial random_independence_trial(uint64_t seed, bool quasiperfect) {
    Rng rng(seed);
    IndependenceTrial trial;
    trial.quasiperfect = quasiperfect;
    std::optional<CertifiedSource> src;
    if (quasiperfect) {
        auto pair = random_angular_pair(rng);
        src = build_from_distributions(pair[0], pair[1]);
    } else {
        src = ideal_bb84_source();
    }
    for (int attempt = 0;; attempt++) {
        if (attempt > 1000) {
            throw std::runtime_error("random_independence_trial: no instance with d_w >= 2");
        }
        size_t n = 3 + static_cast<size_t>(rng.below(6));
        size_t r = static_cast<size_t>(rng.below(n - 1));
        size_t m = 1 + static_cast<size_t>(rng.below(std::min<size_t>(3, n - r - 1)));
        Gf2Matrix f = Gf2Matrix::random(r, n, rng);
        Gf2Matrix k = Gf2Matrix::random(m, n, rng);
        if (!Gf2Matrix::stack(f, k).has_independent_rows()) {
            continue;
        }
        size_t d_w = joint_min_weight(r ? f : Gf2Matrix(n), k);
        if (d_w < 2) {
            continue;
        }
        trial.n = n;
        trial.r = r;
        trial.m = m;
        trial.d_pp = d_w / 2;
        BitString b = BitString::random(n, rng);
        BitString h = BitString::random(n, rng);
        ComplexMatrix x = random_supported_operator(src->certificate, b, h, trial.d_pp, rng);
        trial.report = key_independence_check(r ? f : Gf2Matrix(n), k, *src, b, h, trial.d_pp, x);
        return trial;
    }
}

}  // namespace qkdlab
