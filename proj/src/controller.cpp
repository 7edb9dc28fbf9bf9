#include "etsmc/controller.hpp"

#include <cmath>
#include <limits>

namespace etsmc {

namespace {

double signum(double v) {
    if (v > 0.0) return 1.0;
    if (v < 0.0) return -1.0;
    return 0.0;  // no control injection on exact surface hits
}

}  // namespace

void ControllerParams::validate(int n_followers) const {
    if (!(K > 0.0)) throw ValidationError("params.K must be > 0, got " + std::to_string(K));
    if (!(tau > 0.0 && tau < 1.0)) {
        throw ValidationError("params.tau must lie in (0,1), got " + std::to_string(tau));
    }
    if (!(gamma1 > 0.0)) {
        throw ValidationError("params.gamma1 must be > 0, got " + std::to_string(gamma1));
    }
    if (!(gamma2 > 0.0)) {
        throw ValidationError("params.gamma2 must be > 0, got " + std::to_string(gamma2));
    }
    if (!(c0 >= 0.0)) throw ValidationError("params.c0 must be >= 0, got " + std::to_string(c0));
    if (!(c1 >= 0.0)) throw ValidationError("params.c1 must be >= 0, got " + std::to_string(c1));
    if (!(c0 + c1 > 0.0)) {
        throw ValidationError("params.c0 + params.c1 must be > 0 (trigger threshold would vanish)");
    }
    if (!(beta > 0.0)) {
        throw ValidationError("params.beta must be > 0, got " + std::to_string(beta));
    }
    if (assumed_disturbance.size() != 0 && assumed_disturbance.size() != n_followers) {
        throw ValidationError("params.assumed_disturbance must have one entry per follower (" +
                              std::to_string(n_followers) + "), got " +
                              std::to_string(assumed_disturbance.size()));
    }
    if (assumed_disturbance.size() != 0 && !assumed_disturbance.allFinite()) {
        throw ValidationError("params.assumed_disturbance has non-finite entries");
    }
}

std::optional<std::string> ControllerParams::beta_range_warning(double lambda2) const {
    if (std::isfinite(lambda2) && (beta <= 0.0 || beta >= lambda2)) {
        return "beta = " + std::to_string(beta) + " is outside (0, lambda2) with lambda2 = " +
               std::to_string(lambda2) + "; the decaying threshold may not respect the design bound";
    }
    return std::nullopt;
}

ControllerState::ControllerState(int n_followers)
    : last_event_time(static_cast<std::size_t>(n_followers),
                      std::numeric_limits<double>::quiet_NaN()),
      held_control(Vector::Zero(n_followers)),
      snapshot(static_cast<std::size_t>(n_followers)),
      event_count(static_cast<std::size_t>(n_followers), 0) {}

Vector tracking_error(const Vector& x, double x0, const FormationSpec& formation) {
    if (formation.offsets.size() == 0) {
        return x.array() - x0;
    }
    if (formation.offsets.size() != x.size()) {
        throw ValidationError("tracking_error: offsets length " +
                              std::to_string(formation.offsets.size()) +
                              " does not match state length " + std::to_string(x.size()));
    }
    return (x.array() - x0) - formation.offsets.array();
}

Vector sliding_surface(const Matrix& grounded, const Vector& e) {
    if (grounded.cols() != e.size()) {
        throw ValidationError("sliding_surface: dimension mismatch");
    }
    return grounded * e;
}

double trigger_value(double e_i, double edot_i, double t, const ControllerParams& p) {
    return std::abs(p.gamma1 * e_i + p.gamma2 * edot_i * edot_i) -
           (p.c0 + p.c1 * std::exp(-p.beta * t));
}

double control_update(int agent, const Snapshot& snap, const Matrix& h_inv,
                      const std::vector<AgentModel>& followers, const AgentModel& leader,
                      const ControllerParams& p, bool coupled_feedforward) {
    const Eigen::Index n = snap.sigma.size();
    if (agent < 0 || agent >= n) {
        throw ValidationError("control_update: agent index out of range");
    }

    Vector switching(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double s = snap.sigma(j);
        switching(j) = p.K * std::pow(std::abs(s), p.tau) * signum(s);
    }

    const double leader_drift = leader.f(snap.t, snap.x0);
    auto assumed = [&](Eigen::Index j) {
        return snap.assumed_disturbance.size() ? snap.assumed_disturbance(j) : 0.0;
    };

    if (coupled_feedforward) {
        // Literal stacked form: every term, feedforward included, premultiplied
        // by H^-1. Leaves a heterogeneity residual; see header.
        Vector w(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            w(j) = switching(j) + followers[static_cast<std::size_t>(j)].f(snap.t, snap.x(j)) -
                   leader_drift - snap.u0 + assumed(j);
        }
        return -h_inv.row(agent).dot(w);
    }

    const double own_drift = followers[static_cast<std::size_t>(agent)].f(snap.t, snap.x(agent));
    return -h_inv.row(agent).dot(switching) - (own_drift - leader_drift + assumed(agent));
}

ReachingReport reaching_check(const std::vector<Vector>& sigma_trace,
                              const std::vector<double>& v_trace, double dt, double band) {
    if (sigma_trace.size() != v_trace.size()) {
        throw ValidationError("reaching_check: trace lengths differ");
    }
    if (sigma_trace.size() < 3) {
        throw InsufficientDataError("reaching_check: need at least 3 samples, got " +
                                    std::to_string(sigma_trace.size()));
    }
    if (!(dt > 0.0)) throw ValidationError("reaching_check: dt must be positive");

    ReachingReport report;
    report.band = band;
    double eta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < sigma_trace.size(); ++k) {
        const double norm = sigma_trace[k].norm();
        if (norm <= band) continue;
        const double vdot = (v_trace[k + 1] - v_trace[k - 1]) / (2.0 * dt);
        const double ratio = -vdot / norm;  // largest eta this sample permits
        ++report.samples_checked;
        if (ratio <= 0.0) {
            report.violations.push_back(static_cast<std::int64_t>(k));
        }
        if (ratio < eta) eta = ratio;
    }
    report.eta_measured = (report.samples_checked > 0 && eta > 0.0) ? eta : 0.0;
    return report;
}

GainReport gain_adequacy(double K, const Matrix& e_at_event, const Matrix& eps_follower,
                         const Matrix& eps_leader, double lipschitz, const Matrix& grounded,
                         double f_tilde) {
    if (e_at_event.rows() != eps_follower.rows() || e_at_event.rows() != eps_leader.rows() ||
        e_at_event.cols() != eps_follower.cols() || e_at_event.cols() != eps_leader.cols()) {
        throw ValidationError("gain_adequacy: trace shapes differ");
    }
    const double h_norm = infinity_norm(grounded);
    GainReport report;
    report.K = K;
    double sup = -std::numeric_limits<double>::infinity();
    for (Eigen::Index n = 0; n < e_at_event.rows(); ++n) {
        for (Eigen::Index i = 0; i < e_at_event.cols(); ++i) {
            const double ek = std::abs(e_at_event(n, i));
            if (!std::isfinite(ek)) continue;  // before this agent's first event
            const double term = f_tilde - lipschitz * ek +
                                h_norm * lipschitz * std::abs(eps_follower(n, i)) -
                                h_norm * lipschitz * std::abs(eps_leader(n, i)) +
                                h_norm * lipschitz * ek;
            if (term > sup) sup = term;
            ++report.samples;
        }
    }
    report.S = report.samples > 0 ? sup : 0.0;
    report.adequate = K > report.S;
    return report;
}

}  // namespace etsmc
