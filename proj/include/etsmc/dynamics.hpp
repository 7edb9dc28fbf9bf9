#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "etsmc/errors.hpp"

namespace etsmc {

enum class DisturbanceKind { none, matched, mismatched };

/// Additive disturbance channel: amplitude * sin(pi^2 * t^2). The kind is a
/// scenario label only; matched and mismatched differ in amplitude regime.
struct DisturbanceSpec {
    double amplitude = 0.0;
    DisturbanceKind kind = DisturbanceKind::none;
};

double disturbance_signal(const DisturbanceSpec& spec, double t);

/// Reference control applied by the leader: 2*cos(0.1*pi*t) / (1 + e^-t).
/// Bounded by 2 for all t.
double leader_u0(double t);

/// Bound on |leader_u0|, used by the gain-adequacy diagnostic.
inline constexpr double kLeaderControlBound = 2.0;

/// One agent's plant: a scalar drift map f(t, x) plus a disturbance channel.
/// The leader's exogenous control is folded into its drift, so every agent
/// integrates as xdot = f(t, x) + u + disturbance.
struct AgentModel {
    int id = 0;  ///< 0 = leader, 1..N = followers
    std::string name;
    std::function<double(double, double)> f;
    DisturbanceSpec disturbance;
};

/// Registered model names: "leader", "f1", "f2", "f3", "f4".
AgentModel make_agent_model(const std::string& name, int id);
const std::vector<std::string>& known_model_names();

/// Plant right-hand side: f(t, x) + u + (disturb_on ? disturbance(t) : 0).
/// Throws NumericError when the result is non-finite.
double eval_dynamics(const AgentModel& model, double t, double x, double u, bool disturb_on);

/// Sampled lower estimate of the local Lipschitz constant of model.f over
/// x in [x_lo, x_hi], t in [t_lo, t_hi]. Draws `samples` (t, x1, x2) triples
/// from a seeded generator; the estimate is nondecreasing in `samples` for a
/// fixed seed.
double lipschitz_probe(const AgentModel& model, double x_lo, double x_hi, double t_lo,
                       double t_hi, int samples, std::uint64_t seed);

}  // namespace etsmc
