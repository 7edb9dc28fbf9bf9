#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "etsmc/dynamics.hpp"
#include "etsmc/linalg.hpp"

namespace etsmc {

/// Gains and trigger constants of the event-driven sliding-mode law.
struct ControllerParams {
    double K = 15.0;       ///< switching gain, > 0
    double tau = 0.5;      ///< switching exponent, in (0, 1)
    double gamma1 = 0.8;   ///< trigger weight on the error, > 0
    double gamma2 = 0.8;   ///< trigger weight on the squared error rate, > 0
    double c0 = 1e-4;      ///< constant trigger threshold, >= 0
    double c1 = 0.2499;    ///< decaying trigger threshold, >= 0 (c0 + c1 > 0)
    double beta = 1.0;     ///< threshold decay rate, > 0
    /// Per-agent disturbance-difference values the controller substitutes
    /// into its feedforward. A real controller cannot measure the true
    /// disturbance, so this defaults to zero.
    Vector assumed_disturbance;

    /// Throws ValidationError on any violated constraint, naming the field.
    void validate(int n_followers) const;

    /// Warning text when beta falls outside (0, lambda2), else nullopt.
    std::optional<std::string> beta_range_warning(double lambda2) const;
};

/// Commanded displacement of each follower from the leader. Zero offsets
/// reduce formation control to plain consensus.
struct FormationSpec {
    Vector offsets;
};

/// Everything a follower samples at one of its own trigger instants.
struct Snapshot {
    double t = 0.0;
    Vector sigma;    ///< full sliding vector at t
    Vector x;        ///< all follower states at t
    double x0 = 0.0; ///< leader state at t
    double u0 = 0.0; ///< leader reference control at t
    Vector assumed_disturbance;  ///< values substituted for the disturbance difference
};

/// Per-agent hold state owned by the simulation loop.
struct ControllerState {
    std::vector<double> last_event_time;  ///< NaN until the first trigger
    Vector held_control;                  ///< changes only at that agent's triggers
    std::vector<Snapshot> snapshot;
    std::vector<std::int64_t> event_count;

    explicit ControllerState(int n_followers = 0);
};

/// e_i = x_i - x0 - offset_i (offsets empty or zero for consensus).
Vector tracking_error(const Vector& x, double x0, const FormationSpec& formation);

/// sigma = H * e.
Vector sliding_surface(const Matrix& grounded, const Vector& e);

/// Trigger function g = |gamma1*e + gamma2*edot^2| - (c0 + c1*exp(-beta*t)).
/// An event fires when g >= 0.
double trigger_value(double e_i, double edot_i, double t, const ControllerParams& p);

inline bool should_trigger(double g) { return g >= 0.0; }

/// New held control for `agent`, computed entirely from its snapshot.
///
/// The switching component K|sigma_j|^tau * sign(sigma_j) is routed through
/// H^-1 so that the stacked sliding dynamics reduce to the pure reaching law;
/// the feedforward (own drift minus leader drift, plus the assumed
/// disturbance difference) is applied per agent. `coupled_feedforward = true`
/// instead routes the feedforward through H^-1 as well; with heterogeneous
/// dynamics that grouping leaves an O(1) cancellation residual and is kept
/// only for comparison studies.
double control_update(int agent, const Snapshot& snap, const Matrix& h_inv,
                      const std::vector<AgentModel>& followers, const AgentModel& leader,
                      const ControllerParams& p, bool coupled_feedforward = false);

/// Empirical check of the reaching inequality Vdot <= -eta * ||sigma||.
struct ReachingReport {
    double eta_measured = 0.0;   ///< largest eta the trace supports (>= 0)
    std::vector<std::int64_t> violations;  ///< sample indices with Vdot >= 0
    std::int64_t samples_checked = 0;
    double band = 0.0;
};

/// Estimates Vdot by central differences and, over samples with
/// ||sigma|| > band, reports the largest eta such that Vdot <= -eta*||sigma||
/// holds everywhere, listing the samples that violate it.
/// Throws InsufficientDataError for traces shorter than 3 samples.
ReachingReport reaching_check(const std::vector<Vector>& sigma_trace,
                              const std::vector<double>& v_trace, double dt, double band);

/// Empirical check that the switching gain dominates the Lyapunov residual.
struct GainReport {
    double K = 0.0;
    double S = 0.0;       ///< measured supremum the gain must exceed
    bool adequate = false;
    std::int64_t samples = 0;
};

/// S = sup over steps/agents of
///   F_tilde - L*|e_i(t_k)| + ||H||*L*|eps_i| - ||H||*L*|eps_0| + ||H||*L*|e_i(t_k)|
/// where eps are the hold-induced state errors since the agent's last event.
/// Rows before an agent's first event carry NaN and are skipped.
GainReport gain_adequacy(double K, const Matrix& e_at_event, const Matrix& eps_follower,
                         const Matrix& eps_leader, double lipschitz, const Matrix& grounded,
                         double f_tilde);

}  // namespace etsmc
