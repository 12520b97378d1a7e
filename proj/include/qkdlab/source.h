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

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qkdlab/quantum.h"

namespace qkdlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr size_t kDefaultQuadratureNodes = 4096;
/// Tolerance on the total mass of an angular distribution.
inline constexpr double kQuadratureTolerance = 1e-6;
/// Default certificate tolerance for exactly constructed sources.
inline constexpr double kCertificateTolerance = 1e-9;
/// Certificate tolerance for quadrature-built sources.
inline constexpr double kQuadratureCertificateTolerance = 1e-7;

/// R(alpha) = [[cos, sin], [-sin, cos]].
ComplexMatrix rotation(double alpha);
/// Projector onto basis vector g of the computational basis.
ComplexMatrix basis_projector(int g);
/// R(alpha)^dagger I^g R(alpha).
ComplexMatrix rotated_projector(double alpha, int g);

/// Probability density of the polarization angle on [0, 2 pi).
class AngularDistribution {
   public:
    enum class Kind { kDelta, kUniform, kTruncatedCosine, kTable };

    /// Point mass at `angle`.
    static AngularDistribution delta(double angle);
    /// Uniform on [center - half_width, center + half_width].
    static AngularDistribution uniform(double center, double half_width, size_t nodes = kDefaultQuadratureNodes);
    /// Density proportional to cos(pi (x - center) / (2 half_width)) on the
    /// same interval.
    static AngularDistribution truncated_cosine(double center, double half_width,
                                                size_t nodes = kDefaultQuadratureNodes);
    /// Piecewise constant: densities[i] on bin i of len(densities) equal bins
    /// of [start, start + 2 pi). Must integrate to 1.
    static AngularDistribution table(std::vector<double> densities, double start = 0,
                                     size_t nodes = kDefaultQuadratureNodes);

    Kind kind() const {
        return kind_;
    }
    std::string kind_name() const;
    double center() const {
        return center_;
    }
    double half_width() const {
        return half_width_;
    }
    size_t nodes() const {
        return nodes_;
    }
    const std::vector<double> &densities() const {
        return densities_;
    }

    /// p(alpha) (0 for a point mass).
    double density(double alpha) const;
    /// Integral of p(alpha) f(alpha) by the midpoint rule on each smooth
    /// piece of the support; exact for point masses.
    template <typename F>
    double integrate(F &&f) const;
    /// Integral of p.
    double mass() const;

   private:
    AngularDistribution() = default;
    void validate() const;

    Kind kind_ = Kind::kDelta;
    double center_ = 0;
    double half_width_ = 0;
    double start_ = 0;
    size_t nodes_ = kDefaultQuadratureNodes;
    std::vector<double> densities_;
};

/// Moments of a distribution used by the source construction.
struct AngularMoments {
    /// Integral of p sin(2 alpha).
    double s;
    /// Integral of p cos(2 alpha).
    double c;
    /// Integral of p sin^2(alpha).
    double s2;
    /// Integral of p cos^2(alpha).
    double c2;
};

/// Moments of p shifted by -phi, i.e. of alpha - phi.
AngularMoments angular_moments(const AngularDistribution &p, double phi = 0);

/// The four states rho_a^g emitted by a source.
class SourceModel {
   public:
    using States = std::array<std::array<DensityMatrix, 2>, 2>;

    /// Validates rho_0^0 + rho_0^1 = rho_1^0 + rho_1^1 within `tol`.
    explicit SourceModel(States states, double tol = kCertificateTolerance);
    /// Skips the sum check. For exercising the verifier on broken sources.
    static SourceModel unchecked(States states);

    const DensityMatrix &state(int a, int g) const {
        return states_[a][g];
    }
    const States &states() const {
        return states_;
    }
    size_t dim() const {
        return states_[0][0].dim();
    }
    /// rho_0^0 + rho_0^1.
    ComplexMatrix h() const {
        return states_[0][0].matrix() + states_[0][1].matrix();
    }

   private:
    SourceModel() = default;
    States states_;
};

/// Witness matrices and parameters for conditions S1-S9.
struct QuasiPerfectCertificate {
    std::array<std::array<MeasurementOperator, 2>, 2> p;
    std::array<std::array<MeasurementOperator, 2>, 2> p_tilde;
    std::array<ComplexMatrix, 2> t;
    std::array<ComplexMatrix, 2> s;
    ComplexMatrix h;
    double beta_qp = 0;
    double gamma_qp = 0;
    /// Principal angles, when built from distributions.
    std::optional<std::array<double, 2>> phi;
};

struct CertifiedSource {
    SourceModel source;
    QuasiPerfectCertificate certificate;
};

/// rho_0^g = I^g, rho_1^g = R(pi/4)^dagger I^g R(pi/4), parameters (0, 0).
CertifiedSource ideal_bb84_source();

/// Source with rho_a^g = integral of p_a(alpha) R(alpha)^dagger I^g R(alpha).
/// Throws std::invalid_argument("degenerate polarization distribution")
/// when the principal angle of a distribution is undefined.
CertifiedSource build_from_distributions(const AngularDistribution &p0, const AngularDistribution &p1);

/// Closed forms for the parameters of a distribution pair.
struct ClosedFormParameters {
    std::array<double, 2> phi;
    double beta_qp;
    double gamma_qp;
};
ClosedFormParameters closed_form_parameters(const AngularDistribution &p0, const AngularDistribution &p1);

struct ConditionResult {
    std::string name;
    double residual;
    bool passed;
};

struct CertificateReport {
    std::vector<ConditionResult> conditions;
    /// max_{a,g} Tr P_a^g rho_a^(1-g).
    double recomputed_beta = 0;
    /// max_{a,g} Delta_a^g.
    double recomputed_gamma = 0;
    std::array<std::array<double, 2>, 2> delta{};
    bool passed = false;

    double max_residual() const;
    const ConditionResult &condition(const std::string &name) const;
};

/// Checks S1-S9, projector idempotence and the three derived identities.
/// Residuals are max-abs entry norms except for S8/S9, which report how far
/// the recomputed parameter exceeds the claimed one.
CertificateReport verify_certificate(const SourceModel &src, const QuasiPerfectCertificate &cert,
                                     double tol = kCertificateTolerance);

/// rho_a^g.
const DensityMatrix &emit_state(const SourceModel &src, int a, int g);

template <typename F>
double AngularDistribution::integrate(F &&f) const {
    switch (kind_) {
        case Kind::kDelta:
            return f(center_);
        case Kind::kUniform:
        case Kind::kTruncatedCosine: {
            double lo = center_ - half_width_;
            double h = 2 * half_width_ / static_cast<double>(nodes_);
            double total = 0;
            for (size_t i = 0; i < nodes_; i++) {
                double x = lo + (static_cast<double>(i) + 0.5) * h;
                total += density(x) * f(x);
            }
            return total * h;
        }
        case Kind::kTable: {
            size_t bins = densities_.size();
            double width = 2 * kPi / static_cast<double>(bins);
            size_t per_bin = std::max<size_t>(16, nodes_ / bins);
            double h = width / static_cast<double>(per_bin);
            double total = 0;
            for (size_t b = 0; b < bins; b++) {
                if (densities_[b] == 0) {
                    continue;
                }
                double lo = start_ + width * static_cast<double>(b);
                double part = 0;
                for (size_t i = 0; i < per_bin; i++) {
                    part += f(lo + (static_cast<double>(i) + 0.5) * h);
                }
                total += densities_[b] * part * h;
            }
            return total;
        }
    }
    return 0;
}

}  // namespace qkdlab
