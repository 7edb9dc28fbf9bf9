#include "etsmc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace etsmc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::int64_t step_count(double t_end, double dt) {
    return static_cast<std::int64_t>(std::llround(t_end / dt));
}

}  // namespace

void SimConfig::validate() const {
    const Eigen::Index n = adjacency.rows();
    if (follower_models.size() != static_cast<std::size_t>(n)) {
        throw ValidationError("models.followers must name one model per follower (" +
                              std::to_string(n) + "), got " +
                              std::to_string(follower_models.size()));
    }
    if (follower_initial.size() != n) {
        throw ValidationError("initial.followers length " + std::to_string(follower_initial.size()) +
                              " does not match " + std::to_string(n) + " followers");
    }
    if (!follower_initial.allFinite() || !std::isfinite(leader_initial)) {
        throw ValidationError("initial states must be finite");
    }
    if (!(dt > 0.0)) throw ValidationError("sim.dt must be > 0, got " + std::to_string(dt));
    if (!(t_end > dt)) {
        throw ValidationError("sim.t_end must exceed sim.dt, got t_end = " + std::to_string(t_end) +
                              ", dt = " + std::to_string(dt));
    }
    if (formation.offsets.size() != 0 && formation.offsets.size() != n) {
        throw ValidationError("formation.offsets length " + std::to_string(formation.offsets.size()) +
                              " does not match " + std::to_string(n) + " followers");
    }
    if (formation.offsets.size() != 0 && !formation.offsets.allFinite()) {
        throw ValidationError("formation.offsets must be finite");
    }
    if (!disturbances.empty() && disturbances.size() != static_cast<std::size_t>(n)) {
        throw ValidationError("disturbance.amplitudes must have one entry per follower");
    }
    for (std::size_t i = 0; i < disturbances.size(); ++i) {
        if (!(disturbances[i].amplitude >= 0.0) || !std::isfinite(disturbances[i].amplitude)) {
            throw ValidationError("disturbance.amplitudes[" + std::to_string(i) +
                                  "] must be finite and >= 0");
        }
    }
    if (!(leader_disturbance.amplitude >= 0.0) || !std::isfinite(leader_disturbance.amplitude)) {
        throw ValidationError("disturbance.leader_amplitude must be finite and >= 0");
    }
    if (!(reaching_band >= 0.0)) throw ValidationError("sim.reaching_band must be >= 0");
    params.validate(static_cast<int>(n));
}

RunResult run(const SimConfig& config) {
    RunResult result;
    result.topology = build_topology(config.adjacency, config.pinning);
    config.validate();
    const TopologyMatrices& topo = result.topology;
    const int n = topo.n_followers;

    if (!has_leader_rooted_spanning_tree(topo)) {
        throw ValidationError(
            "topology has no leader-rooted spanning tree: H = L + B is singular and the "
            "consensus control law is undefined");
    }
    const Matrix h_inv = invert(topo.grounded);

    const auto eig = eigenvalues(topo.laplacian);
    Diagnostics& diag = result.diagnostics;
    diag.lambda2 = eig.size() > 1 ? eig[1].real() : kNaN;
    if (auto warning = config.params.beta_range_warning(diag.lambda2)) {
        diag.beta_in_range = false;
        diag.warnings.push_back(*warning);
    }

    AgentModel leader = make_agent_model(config.leader_model, 0);
    leader.disturbance = config.leader_disturbance;
    std::vector<AgentModel> followers;
    followers.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        AgentModel m = make_agent_model(config.follower_models[static_cast<std::size_t>(i)], i + 1);
        if (!config.disturbances.empty()) m.disturbance = config.disturbances[static_cast<std::size_t>(i)];
        followers.push_back(std::move(m));
    }

    const double dt = config.dt;
    const std::int64_t total_steps = step_count(config.t_end, dt);
    if (total_steps < 2) {
        throw ValidationError("horizon too short: fewer than two integration steps");
    }

    ControllerState state(n);
    result.events.instants.assign(static_cast<std::size_t>(n), {});

    double x0 = config.leader_initial;
    Vector x = config.follower_initial;
    Vector e_prev = Vector::Zero(n);

    TrajectoryLog& traj = result.trajectory;
    traj.steps.reserve(static_cast<std::size_t>(total_steps + 1));

    // Stacked state [x0; x] so that the leader and followers share one RK4
    // step. The derivative closes over the held controls for this step.
    auto derivative = [&](double t, const Vector& z) -> Vector {
        Vector zd(n + 1);
        zd(0) = eval_dynamics(leader, t, z(0), 0.0, true);
        for (int i = 0; i < n; ++i) {
            zd(i + 1) = eval_dynamics(followers[static_cast<std::size_t>(i)], t, z(i + 1),
                                      state.held_control(i), true);
        }
        return zd;
    };

    for (std::int64_t step = 0; step <= total_steps; ++step) {
        const double t = static_cast<double>(step) * dt;

        const Vector e = tracking_error(x, x0, config.formation);
        const Vector sigma = sliding_surface(topo.grounded, e);

        // True instantaneous rates under the current hold, disturbances included.
        const double x0dot = eval_dynamics(leader, t, x0, 0.0, true);
        Vector edot(n);
        for (int i = 0; i < n; ++i) {
            edot(i) = eval_dynamics(followers[static_cast<std::size_t>(i)], t, x(i),
                                    state.held_control(i), true) -
                      x0dot;
        }

        if (step < total_steps) {
            for (int i = 0; i < n; ++i) {
                double rate = edot(i);
                if (config.edot_backward_difference) {
                    rate = step == 0 ? 0.0 : (e(i) - e_prev(i)) / dt;
                }
                const double g = trigger_value(e(i), rate, t, config.params);
                if (config.force_trigger_every_step || should_trigger(g)) {
                    Snapshot snap;
                    snap.t = t;
                    snap.sigma = sigma;
                    snap.x = x;
                    snap.x0 = x0;
                    snap.u0 = leader_u0(t);
                    if (config.oracle_disturbance) {
                        const double lead_dist = disturbance_signal(config.leader_disturbance, t);
                        Vector oracle(n);
                        for (int j = 0; j < n; ++j) {
                            const DisturbanceSpec& spec =
                                config.disturbances.empty()
                                    ? followers[static_cast<std::size_t>(j)].disturbance
                                    : config.disturbances[static_cast<std::size_t>(j)];
                            oracle(j) = disturbance_signal(spec, t) - lead_dist;
                        }
                        snap.assumed_disturbance = std::move(oracle);
                    } else {
                        snap.assumed_disturbance = config.params.assumed_disturbance;
                    }
                    state.held_control(i) = control_update(i, snap, h_inv, followers, leader,
                                                           config.params,
                                                           config.coupled_feedforward);
                    state.snapshot[static_cast<std::size_t>(i)] = std::move(snap);
                    state.last_event_time[static_cast<std::size_t>(i)] = t;
                    ++state.event_count[static_cast<std::size_t>(i)];
                    result.events.instants[static_cast<std::size_t>(i)].push_back(t);
                }
            }
        }

        StepRecord rec;
        rec.t = t;
        rec.x0 = x0;
        rec.x = x;
        rec.u = state.held_control;
        rec.sigma = sigma;
        rec.e = e;
        rec.v = 0.5 * sigma.squaredNorm();
        rec.disturbance.resize(n);
        for (int i = 0; i < n; ++i) {
            rec.disturbance(i) =
                disturbance_signal(followers[static_cast<std::size_t>(i)].disturbance, t);
        }
        rec.leader_disturbance = disturbance_signal(config.leader_disturbance, t);
        traj.steps.push_back(std::move(rec));

        e_prev = e;

        if (step < total_steps) {
            Vector z(n + 1);
            z(0) = x0;
            z.tail(n) = x;
            try {
                z = rk4_step(derivative, t, z, dt);
            } catch (const NumericError& err) {
                throw NumericError(std::string("run aborted at step ") + std::to_string(step) +
                                       ": " + err.what(),
                                   err.time(), err.agent());
            }
            x0 = z(0);
            x = z.tail(n);
            if (!std::isfinite(x0) || !x.allFinite()) {
                throw NumericError("run aborted: non-finite state after step " +
                                       std::to_string(step),
                                   t);
            }
        }
    }

    result.controller = state;

    // --- post-run diagnostics ---
    diag.trigger_quantization = dt;

    std::vector<Vector> sigma_trace;
    std::vector<double> v_trace;
    sigma_trace.reserve(traj.steps.size());
    v_trace.reserve(traj.steps.size());
    for (const auto& rec : traj.steps) {
        sigma_trace.push_back(rec.sigma);
        v_trace.push_back(rec.v);
    }
    diag.reaching = reaching_check(sigma_trace, v_trace, dt, config.reaching_band);

    double x_lo = x0, x_hi = x0;
    for (const auto& rec : traj.steps) {
        x_lo = std::min({x_lo, rec.x0, rec.x.minCoeff()});
        x_hi = std::max({x_hi, rec.x0, rec.x.maxCoeff()});
    }
    constexpr int kProbeSamples = 4096;
    double lipschitz = lipschitz_probe(leader, x_lo - 1.0, x_hi + 1.0, 0.0, config.t_end,
                                       kProbeSamples, config.seed);
    for (const auto& model : followers) {
        lipschitz = std::max(lipschitz, lipschitz_probe(model, x_lo - 1.0, x_hi + 1.0, 0.0,
                                                        config.t_end, kProbeSamples, config.seed));
    }
    diag.lipschitz_estimate = lipschitz;

    double max_amp = config.leader_disturbance.amplitude;
    for (const auto& model : followers) max_amp = std::max(max_amp, model.disturbance.amplitude);
    const double h_norm = infinity_norm(topo.grounded);
    const double dist_diff = max_amp + config.leader_disturbance.amplitude;
    diag.f_tilde = kLeaderControlBound + h_norm * kLeaderControlBound + (h_norm + 1.0) * dist_diff;

    // Reconstruct hold errors from the logs: events sit on the grid, so the
    // snapshot state is the logged state at the event step.
    const std::int64_t rows = static_cast<std::int64_t>(traj.steps.size());
    Matrix e_at_event = Matrix::Constant(rows, n, kNaN);
    Matrix eps_follower = Matrix::Constant(rows, n, kNaN);
    Matrix eps_leader = Matrix::Constant(rows, n, kNaN);
    for (int i = 0; i < n; ++i) {
        const auto& ev = result.events.instants[static_cast<std::size_t>(i)];
        std::size_t next = 0;
        std::int64_t event_row = -1;
        for (std::int64_t r = 0; r < rows; ++r) {
            const double t = traj.steps[static_cast<std::size_t>(r)].t;
            while (next < ev.size() && ev[next] <= t + dt / 2.0) {
                event_row = static_cast<std::int64_t>(std::llround(ev[next] / dt));
                ++next;
            }
            if (event_row < 0) continue;
            const auto& at_event = traj.steps[static_cast<std::size_t>(event_row)];
            const auto& now = traj.steps[static_cast<std::size_t>(r)];
            e_at_event(r, i) = at_event.e(i);
            eps_follower(r, i) = at_event.x(i) - now.x(i);
            eps_leader(r, i) = at_event.x0 - now.x0;
        }
    }
    diag.gain = gain_adequacy(config.params.K, e_at_event, eps_follower, eps_leader, lipschitz,
                              topo.grounded, diag.f_tilde);

    diag.max_hold_error = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double eps = std::abs(eps_follower(r, i));
            if (std::isfinite(eps) && eps > diag.max_hold_error(i)) diag.max_hold_error(i) = eps;
        }
    }

    diag.events = inter_event_stats(result.events, dt, total_steps);

    // No-accumulation check over the final half of the horizon: largest
    // per-agent event count inside any sliding 1 s window.
    const double late_start = config.t_end / 2.0;
    std::int64_t worst = 0;
    for (const auto& ev : result.events.instants) {
        std::size_t lo = 0;
        for (std::size_t hi = 0; hi < ev.size(); ++hi) {
            if (ev[hi] < late_start) {
                lo = hi + 1;
                continue;
            }
            while (ev[hi] - ev[lo] > 1.0) ++lo;
            worst = std::max(worst, static_cast<std::int64_t>(hi - lo + 1));
        }
    }
    diag.max_events_per_second_late = worst;

    return result;
}

InterEventStats inter_event_stats(const EventLog& events, double dt, std::int64_t total_steps) {
    InterEventStats stats;
    stats.total_steps = total_steps;
    for (const auto& ev : events.instants) {
        AgentEventStats a;
        a.count = static_cast<std::int64_t>(ev.size());
        stats.total_events += a.count;
        if (ev.size() >= 2) {
            a.has_intervals = true;
            a.min_gap = std::numeric_limits<double>::infinity();
            double sum = 0.0;
            for (std::size_t k = 0; k + 1 < ev.size(); ++k) {
                const double gap = ev[k + 1] - ev[k];
                a.min_gap = std::min(a.min_gap, gap);
                a.max_gap = std::max(a.max_gap, gap);
                sum += gap;
            }
            a.mean_gap = sum / static_cast<double>(ev.size() - 1);
            // allow half a step of roundoff when certifying the grid bound
            if (a.min_gap < dt - dt / 2.0) stats.min_gap_at_least_dt = false;
        }
        stats.per_agent.push_back(a);
    }
    const std::int64_t denom = total_steps * static_cast<std::int64_t>(events.instants.size());
    stats.events_to_steps_ratio =
        denom > 0 ? static_cast<double>(stats.total_events) / static_cast<double>(denom) : 0.0;
    return stats;
}

Matrix formation_error_trace(const TrajectoryLog& log, const FormationSpec& formation) {
    const std::int64_t rows = static_cast<std::int64_t>(log.steps.size());
    if (rows == 0) return Matrix(0, 0);
    const Eigen::Index n = log.steps.front().x.size();
    Matrix out(rows, n);
    for (std::int64_t r = 0; r < rows; ++r) {
        const auto& rec = log.steps[static_cast<std::size_t>(r)];
        out.row(r) = tracking_error(rec.x, rec.x0, formation).cwiseAbs().transpose();
    }
    return out;
}

}  // namespace etsmc
