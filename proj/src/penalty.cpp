#include "ccpath/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ccpath/error.hpp"

namespace ccpath {

std::string_view to_string(PenaltyFamily family) noexcept {
    switch (family) {
        case PenaltyFamily::Scad: return "scad";
        case PenaltyFamily::Mcp: return "mcp";
        case PenaltyFamily::L1: return "l1";
    }
    return "unknown";
}

PenaltyFamily parse_penalty_family(std::string_view name) {
    if (name == "scad" || name == "SCAD") return PenaltyFamily::Scad;
    if (name == "mcp" || name == "MCP") return PenaltyFamily::Mcp;
    if (name == "l1" || name == "L1" || name == "lasso") return PenaltyFamily::L1;
    throw Error(ErrorKind::InvalidArgument, "unknown penalty '" + std::string(name) + "'");
}

PenaltySpec PenaltySpec::scad(double a) {
    require(a > 2.0, ErrorKind::InvalidArgument, "SCAD requires a > 2");
    return {PenaltyFamily::Scad, a};
}

PenaltySpec PenaltySpec::mcp(double a) {
    require(a > 1.0, ErrorKind::InvalidArgument, "MCP requires a > 1");
    return {PenaltyFamily::Mcp, a};
}

PenaltySpec PenaltySpec::l1() { return {PenaltyFamily::L1, 0.0}; }

PenaltySpec PenaltySpec::make(PenaltyFamily family, double a) {
    switch (family) {
        case PenaltyFamily::Scad: return scad(a > 0.0 ? a : kDefaultScadA);
        case PenaltyFamily::Mcp: return mcp(a > 0.0 ? a : kDefaultMcpA);
        case PenaltyFamily::L1: break;
    }
    return l1();
}

double PenaltySpec::deriv(double t, double lambda) const noexcept {
    switch (family_) {
        case PenaltyFamily::Scad:
            if (t <= lambda) return lambda;
            return std::max(a_ * lambda - t, 0.0) / (a_ - 1.0);
        case PenaltyFamily::Mcp:
            return std::max(a_ * lambda - t, 0.0) / a_;
        case PenaltyFamily::L1:
            break;
    }
    return lambda;
}

double PenaltySpec::value(double t, double lambda) const noexcept {
    switch (family_) {
        case PenaltyFamily::Scad:
            if (t <= lambda) return lambda * t;
            if (t <= a_ * lambda)
                return (2.0 * a_ * lambda * t - t * t - lambda * lambda) / (2.0 * (a_ - 1.0));
            return 0.5 * (a_ + 1.0) * lambda * lambda;
        case PenaltyFamily::Mcp:
            if (t <= a_ * lambda) return lambda * t - t * t / (2.0 * a_);
            return 0.5 * a_ * lambda * lambda;
        case PenaltyFamily::L1:
            break;
    }
    return lambda * t;
}

double PenaltySpec::concave_value(double t, double lambda) const noexcept {
    return value(t, lambda) - lambda * t;
}

double PenaltySpec::concave_grad(double beta, double lambda) const noexcept {
    if (beta == 0.0 || family_ == PenaltyFamily::L1) return 0.0;
    const double g = deriv(std::abs(beta), lambda) - lambda;
    return beta > 0.0 ? g : -g;
}

double penalty_deriv(const PenaltySpec& spec, double t, double lambda) {
    require(t >= 0.0, ErrorKind::InvalidArgument, "penalty derivative needs t >= 0");
    require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
    return spec.deriv(t, lambda);
}

double penalty_value(const PenaltySpec& spec, double t, double lambda) {
    require(t >= 0.0, ErrorKind::InvalidArgument, "penalty value needs t >= 0");
    require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
    return spec.value(t, lambda);
}

double concave_grad(const PenaltySpec& spec, double beta, double lambda) {
    require(lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
    return spec.concave_grad(beta, lambda);
}

}  // namespace ccpath
