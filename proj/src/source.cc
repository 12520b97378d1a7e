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

#include "qkdlab/source.h"

#include <cmath>
#include <stdexcept>

namespace qkdlab {

ComplexMatrix rotation(double alpha) {
    double c = std::cos(alpha);
    double s = std::sin(alpha);
    return ComplexMatrix::from_rows({{c, s}, {-s, c}});
}

ComplexMatrix basis_projector(int g) {
    ComplexMatrix m(2);
    m(g, g) = 1;
    return m;
}

ComplexMatrix rotated_projector(double alpha, int g) {
    // R(alpha)^dagger I^g R(alpha), written out to avoid roundoff asymmetry.
    double c = std::cos(alpha);
    double s = std::sin(alpha);
    double sign = g == 0 ? 1 : -1;
    double diag0 = g == 0 ? c * c : s * s;
    double diag1 = g == 0 ? s * s : c * c;
    return ComplexMatrix::from_rows({{diag0, sign * s * c}, {sign * s * c, diag1}});
}

AngularDistribution AngularDistribution::delta(double angle) {
    AngularDistribution p;
    p.kind_ = Kind::kDelta;
    p.center_ = angle;
    p.validate();
    return p;
}

AngularDistribution AngularDistribution::uniform(double center, double half_width, size_t nodes) {
    AngularDistribution p;
    p.kind_ = Kind::kUniform;
    p.center_ = center;
    p.half_width_ = half_width;
    p.nodes_ = nodes;
    p.validate();
    return p;
}

AngularDistribution AngularDistribution::truncated_cosine(double center, double half_width, size_t nodes) {
    AngularDistribution p;
    p.kind_ = Kind::kTruncatedCosine;
    p.center_ = center;
    p.half_width_ = half_width;
    p.nodes_ = nodes;
    p.validate();
    return p;
}

AngularDistribution AngularDistribution::table(std::vector<double> densities, double start, size_t nodes) {
    AngularDistribution p;
    p.kind_ = Kind::kTable;
    p.densities_ = std::move(densities);
    p.start_ = start;
    p.nodes_ = nodes;
    p.validate();
    return p;
}

std::string AngularDistribution::kind_name() const {
    switch (kind_) {
        case Kind::kDelta:
            return "delta";
        case Kind::kUniform:
            return "uniform";
        case Kind::kTruncatedCosine:
            return "von-mises-like";
        case Kind::kTable:
            return "table";
    }
    return "unknown";
}

void AngularDistribution::validate() const {
    if (!std::isfinite(center_) || !std::isfinite(start_)) {
        throw std::invalid_argument("angular distribution angles must be finite");
    }
    if (nodes_ == 0) {
        throw std::invalid_argument("quadrature resolution must be positive");
    }
    if (kind_ == Kind::kUniform || kind_ == Kind::kTruncatedCosine) {
        if (!(half_width_ > 0 && half_width_ <= kPi)) {
            throw std::invalid_argument("half width must be in (0, pi]");
        }
    }
    if (kind_ == Kind::kTable) {
        if (densities_.empty()) {
            throw std::invalid_argument("table distribution needs at least one bin");
        }
        for (double d : densities_) {
            if (!(d >= 0) || !std::isfinite(d)) {
                throw std::invalid_argument("table densities must be finite and nonnegative");
            }
        }
    }
    double total = mass();
    if (std::abs(total - 1) > kQuadratureTolerance) {
        throw std::invalid_argument("angular distribution integrates to " + std::to_string(total) + ", expected 1");
    }
}

double AngularDistribution::density(double alpha) const {
    switch (kind_) {
        case Kind::kDelta:
            return 0;
        case Kind::kUniform:
        case Kind::kTruncatedCosine: {
            double d = std::remainder(alpha - center_, 2 * kPi);
            if (std::abs(d) > half_width_) {
                return 0;
            }
            if (kind_ == Kind::kUniform) {
                return 1 / (2 * half_width_);
            }
            double k = kPi / (2 * half_width_);
            return std::max(0.0, 0.5 * k * std::cos(k * d));
        }
        case Kind::kTable: {
            double width = 2 * kPi / static_cast<double>(densities_.size());
            double x = std::fmod(alpha - start_, 2 * kPi);
            if (x < 0) {
                x += 2 * kPi;
            }
            size_t bin = std::min(densities_.size() - 1, static_cast<size_t>(x / width));
            return densities_[bin];
        }
    }
    return 0;
}

double AngularDistribution::mass() const {
    return integrate([](double) { return 1.0; });
}

AngularMoments angular_moments(const AngularDistribution &p, double phi) {
    double mass = p.mass();
    AngularMoments m;
    m.s = p.integrate([&](double x) { return std::sin(2 * (x - phi)); }) / mass;
    m.c = p.integrate([&](double x) { return std::cos(2 * (x - phi)); }) / mass;
    m.s2 = p.integrate([&](double x) {
        double v = std::sin(x - phi);
        return v * v;
    }) / mass;
    m.c2 = p.integrate([&](double x) {
        double v = std::cos(x - phi);
        return v * v;
    }) / mass;
    return m;
}

SourceModel::SourceModel(States states, double tol) : states_(std::move(states)) {
    size_t d = states_[0][0].dim();
    for (int a = 0; a < 2; a++) {
        for (int g = 0; g < 2; g++) {
            if (states_[a][g].dim() != d) {
                throw std::invalid_argument("source states have different dimensions");
            }
        }
    }
    ComplexMatrix h0 = states_[0][0].matrix() + states_[0][1].matrix();
    ComplexMatrix h1 = states_[1][0].matrix() + states_[1][1].matrix();
    double residual = (h0 - h1).max_abs();
    if (residual > tol) {
        throw std::invalid_argument(
            "source violates rho_0^0 + rho_0^1 = rho_1^0 + rho_1^1 (residual " + std::to_string(residual) + ")");
    }
}

SourceModel SourceModel::unchecked(States states) {
    SourceModel src;
    src.states_ = std::move(states);
    return src;
}

CertifiedSource ideal_bb84_source() {
    SourceModel::States states;
    QuasiPerfectCertificate cert;
    for (int a = 0; a < 2; a++) {
        double angle = a == 0 ? 0 : kPi / 4;
        for (int g = 0; g < 2; g++) {
            ComplexMatrix proj = a == 0 ? basis_projector(g) : rotated_projector(angle, g);
            states[a][g] = DensityMatrix(proj);
            cert.p[a][g] = MeasurementOperator(proj);
            cert.p_tilde[a][g] = MeasurementOperator(proj);
        }
        cert.t[a] = ComplexMatrix::identity(2);
        cert.s[a] = rotation(-angle);
    }
    SourceModel src(std::move(states));
    cert.h = src.h();
    cert.beta_qp = 0;
    cert.gamma_qp = 0;
    return CertifiedSource{std::move(src), std::move(cert)};
}

namespace {

double principal_angle(const AngularMoments &m) {
    if (std::hypot(m.s, m.c) < 1e-12) {
        throw std::invalid_argument("degenerate polarization distribution");
    }
    return 0.5 * std::atan2(m.s, m.c);
}

double gamma_closed_form(double phi0, double phi1) {
    return std::min(2 * std::abs(std::sin(phi1 - phi0 - kPi / 4)), 2 * std::abs(std::sin(phi0 - phi1 - kPi / 4)));
}

}  // namespace

ClosedFormParameters closed_form_parameters(const AngularDistribution &p0, const AngularDistribution &p1) {
    ClosedFormParameters out;
    const AngularDistribution *ps[2] = {&p0, &p1};
    out.beta_qp = 0;
    for (int a = 0; a < 2; a++) {
        out.phi[a] = principal_angle(angular_moments(*ps[a]));
        out.beta_qp = std::max(out.beta_qp, angular_moments(*ps[a], out.phi[a]).s2);
    }
    out.gamma_qp = gamma_closed_form(out.phi[0], out.phi[1]);
    return out;
}

CertifiedSource build_from_distributions(const AngularDistribution &p0, const AngularDistribution &p1) {
    const AngularDistribution *ps[2] = {&p0, &p1};
    ClosedFormParameters params = closed_form_parameters(p0, p1);
    SourceModel::States states;
    for (int a = 0; a < 2; a++) {
        AngularMoments m = angular_moments(*ps[a]);
        for (int g = 0; g < 2; g++) {
            double sign = g == 0 ? 1 : -1;
            double d0 = g == 0 ? m.c2 : m.s2;
            double d1 = g == 0 ? m.s2 : m.c2;
            // Renormalize the diagonal so the trace is exactly one.
            double tr = d0 + d1;
            states[a][g] = DensityMatrix(
                ComplexMatrix::from_rows({{d0 / tr, sign * 0.5 * m.s / tr}, {sign * 0.5 * m.s / tr, d1 / tr}}));
        }
    }
    SourceModel src(std::move(states), kQuadratureCertificateTolerance);

    QuasiPerfectCertificate cert;
    const auto &phi = params.phi;
    for (int a = 0; a < 2; a++) {
        for (int g = 0; g < 2; g++) {
            cert.p[a][g] = MeasurementOperator(rotated_projector(phi[a], g));
        }
        cert.s[a] = rotation(-phi[a]);
    }
    cert.h = src.h();

    // The pi/4 offset may enter with either sign; keep the smaller Delta.
    double best = -1;
    for (int sign : {+1, -1}) {
        std::array<double, 2> theta = {phi[1] - sign * kPi / 4, phi[0] + sign * kPi / 4};
        std::array<std::array<MeasurementOperator, 2>, 2> pt;
        double worst = 0;
        for (int a = 0; a < 2; a++) {
            for (int g = 0; g < 2; g++) {
                pt[a][g] = MeasurementOperator(rotated_projector(theta[a], g));
                ComplexMatrix diff = cert.p[a][g].matrix() * cert.h - pt[a][g].matrix() * cert.h;
                ComplexMatrix herm = 0.5 * (diff + diff.adjoint());
                worst = std::max(worst, trace_norm(herm));
            }
        }
        if (best < 0 || worst < best - 1e-15) {
            best = worst;
            cert.p_tilde = pt;
            cert.t = {rotation(theta[0] - phi[0]), rotation(theta[1] - phi[1])};
        }
    }
    cert.beta_qp = params.beta_qp;
    cert.gamma_qp = params.gamma_qp;
    cert.phi = params.phi;
    return CertifiedSource{std::move(src), std::move(cert)};
}

double CertificateReport::max_residual() const {
    double worst = 0;
    for (const auto &c : conditions) {
        worst = std::max(worst, c.residual);
    }
    return worst;
}

const ConditionResult &CertificateReport::condition(const std::string &name) const {
    for (const auto &c : conditions) {
        if (c.name == name) {
            return c;
        }
    }
    throw std::out_of_range("no condition named " + name);
}

namespace {

double off_diagonal_max(const ComplexMatrix &m) {
    double worst = 0;
    for (size_t i = 0; i < m.dim(); i++) {
        for (size_t j = 0; j < m.dim(); j++) {
            if (i != j) {
                worst = std::max(worst, std::abs(m(i, j)));
            }
        }
    }
    return worst;
}

double unitarity_residual(const ComplexMatrix &u) {
    return (u.adjoint() * u - ComplexMatrix::identity(u.dim())).max_abs();
}

}  // namespace

CertificateReport verify_certificate(const SourceModel &src, const QuasiPerfectCertificate &cert, double tol) {
    size_t d = src.dim();
    auto check_dim = [&](const ComplexMatrix &m, const char *what) {
        if (m.dim() != d) {
            throw std::invalid_argument(std::string("certificate ") + what + " has dimension " +
                                        std::to_string(m.dim()) + ", source has " + std::to_string(d));
        }
    };
    for (int a = 0; a < 2; a++) {
        for (int g = 0; g < 2; g++) {
            check_dim(src.state(a, g).matrix(), "state");
            check_dim(cert.p[a][g].matrix(), "P");
            check_dim(cert.p_tilde[a][g].matrix(), "P~");
        }
        check_dim(cert.t[a], "T");
        check_dim(cert.s[a], "S");
    }
    check_dim(cert.h, "H");

    const ComplexMatrix id = ComplexMatrix::identity(d);
    const ComplexMatrix &h = cert.h;
    auto rho = [&](int a, int g) -> const ComplexMatrix & { return src.state(a, g).matrix(); };
    auto p = [&](int a, int g) -> const ComplexMatrix & { return cert.p[a][g].matrix(); };
    auto pt = [&](int a, int g) -> const ComplexMatrix & { return cert.p_tilde[a][g].matrix(); };

    CertificateReport report;
    auto add = [&](std::string name, double residual) {
        report.conditions.push_back({std::move(name), residual, residual <= tol});
    };

    double r = 0;
    for (int a = 0; a < 2; a++) {
        for (int g = 0; g < 2; g++) {
            r = std::max(r, (p(a, g) * p(a, g) - p(a, g)).max_abs());
            r = std::max(r, (pt(a, g) * pt(a, g) - pt(a, g)).max_abs());
        }
    }
    add("projectors", r);

    r = 0;
    for (int a = 0; a < 2; a++) {
        r = std::max(r, (p(a, 0) + p(a, 1) - id).max_abs());
        r = std::max(r, (pt(a, 0) + pt(a, 1) - id).max_abs());
    }
    add("S1", r);

    ComplexMatrix h0 = rho(0, 0) + rho(0, 1);
    ComplexMatrix h1 = rho(1, 0) + rho(1, 1);
    add("S2", std::max((h0 - h1).max_abs(), (h - h0).max_abs()));

    r = 0;
    for (int a = 0; a < 2; a++) {
        for (int g = 0; g < 2; g++) {
            r = std::max(r, std::abs(trace_product(p(a, g), h) - Complex(1)));
        }
    }
    add("S3", r);

    r = 0;
    for (int a = 0; a < 2; a++) {
        const ComplexMatrix &t = cert.t[a];
        ComplexMatrix td = t.adjoint();
        r = std::max(r, unitarity_residual(t));
        for (int g = 0; g < 2; g++) {
            r = std::max(r, (td * p(a, g) * t - pt(a, g)).max_abs());
        }
        r = std::max(r, (td * h * t - h).max_abs());
    }
    add("S4", r);

    r = 0;
    for (int a = 0; a < 2; a++) {
        r = std::max(r, (pt(a, 0) * h * pt(a, 1)).max_abs());
    }
    add("S5", r);

    r = 0;
    for (int a = 0; a < 2; a++) {
        for (int g = 0; g < 2; g++) {
            r = std::max(r, (pt(a, g) * rho(1 - a, 0) * pt(a, g) - pt(a, g) * rho(1 - a, 1) * pt(a, g)).max_abs());
        }
    }
    add("S6", r);

    r = 0;
    for (int a = 0; a < 2; a++) {
        const ComplexMatrix &s = cert.s[a];
        ComplexMatrix sd = s.adjoint();
        r = std::max(r, unitarity_residual(s));
        for (int g = 0; g < 2; g++) {
            r = std::max(r, off_diagonal_max(sd * p(a, g) * s));
            r = std::max(r, off_diagonal_max(sd * rho(a, g) * s));
        }
    }
    add("S7", r);

    double beta = 0;
    for (int a = 0; a < 2; a++) {
        for (int g = 0; g < 2; g++) {
            beta = std::max(beta, trace_product(p(a, g), rho(a, 1 - g)).real());
        }
    }
    report.recomputed_beta = beta;
    add("S8", std::max(0.0, beta - cert.beta_qp));

    double gamma = 0;
    double herm_residual = 0;
    for (int a = 0; a < 2; a++) {
        for (int g = 0; g < 2; g++) {
            ComplexMatrix diff = p(a, g) * h - pt(a, g) * h;
            herm_residual = std::max(herm_residual, diff.hermitian_residual());
            report.delta[a][g] = trace_norm(0.5 * (diff + diff.adjoint()));
            gamma = std::max(gamma, report.delta[a][g]);
        }
    }
    report.recomputed_gamma = gamma;
    add("S9", std::max({0.0, gamma - cert.gamma_qp, herm_residual}));

    r = 0;
    for (int a = 0; a < 2; a++) {
        for (int g = 0; g < 2; g++) {
            r = std::max(r, (pt(a, 0) * rho(1 - a, g) * pt(a, 1) + pt(a, 0) * rho(1 - a, 1 - g) * pt(a, 1)).max_abs());
        }
    }
    add("L1-cross", r);

    r = 0;
    for (int a = 0; a < 2; a++) {
        r = std::max(r, std::abs(trace_product(p(a, 0), rho(a, 1)) - trace_product(p(a, 1), rho(a, 0))));
    }
    add("L1-overlap", r);

    r = 0;
    for (int a = 0; a < 2; a++) {
        r = std::max(r, std::abs(report.delta[a][0] - report.delta[a][1]));
    }
    add("L1-delta", r);

    report.passed = true;
    for (const auto &c : report.conditions) {
        report.passed = report.passed && c.passed;
    }
    return report;
}

const DensityMatrix &emit_state(const SourceModel &src, int a, int g) {
    if ((a != 0 && a != 1) || (g != 0 && g != 1)) {
        throw std::invalid_argument("emit_state: basis and key bits must be 0 or 1");
    }
    return src.state(a, g);
}

}  // namespace qkdlab
