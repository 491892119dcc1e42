#pragma once

#include <string_view>

namespace ccpath {

enum class PenaltyFamily { Scad, Mcp, L1 };

std::string_view to_string(PenaltyFamily family) noexcept;
PenaltyFamily parse_penalty_family(std::string_view name);

/// Penalty family with its shape parameter.
///
/// Every family splits as p(t) = J(t) + lambda*t with J concave and
/// differentiable; the solver only ever needs the linearization of J.
class PenaltySpec {
public:
    static constexpr double kDefaultScadA = 3.7;
    static constexpr double kDefaultMcpA = 3.0;

    static PenaltySpec scad(double a = kDefaultScadA);
    static PenaltySpec mcp(double a = kDefaultMcpA);
    static PenaltySpec l1();
    /// Builds `family` with its default shape when `a` is not positive.
    static PenaltySpec make(PenaltyFamily family, double a = 0.0);

    PenaltyFamily family() const noexcept { return family_; }
    double a() const noexcept { return a_; }

    /// p'(t) for t >= 0.
    double deriv(double t, double lambda) const noexcept;
    /// p(t) for t >= 0, with p(0) = 0.
    double value(double t, double lambda) const noexcept;
    /// J(t) = p(t) - lambda*t.
    double concave_value(double t, double lambda) const noexcept;
    /// d/d(beta) J(|beta|) = sign(beta) * (p'(|beta|) - lambda); zero at beta = 0.
    double concave_grad(double beta, double lambda) const noexcept;

private:
    PenaltySpec(PenaltyFamily family, double a) : family_(family), a_(a) {}

    PenaltyFamily family_;
    double a_;
};

double penalty_deriv(const PenaltySpec& spec, double t, double lambda);
double penalty_value(const PenaltySpec& spec, double t, double lambda);
double concave_grad(const PenaltySpec& spec, double beta, double lambda);

/// sign(z) * max(|z| - lambda, 0): the minimizer of 0.5*b^2 - z*b + lambda*|b|.
inline double soft_threshold(double z, double lambda) noexcept {
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

}  // namespace ccpath
