#include "etsmc/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace etsmc {

namespace {
constexpr double kPi = std::numbers::pi;
}

double disturbance_signal(const DisturbanceSpec& spec, double t) {
    if (spec.amplitude == 0.0) return 0.0;
    return spec.amplitude * std::sin(kPi * kPi * t * t);
}

double leader_u0(double t) {
    return 2.0 * std::cos(0.1 * kPi * t) / (1.0 + std::exp(-t));
}

const std::vector<std::string>& known_model_names() {
    static const std::vector<std::string> names = {"leader", "f1", "f2", "f3", "f4"};
    return names;
}

AgentModel make_agent_model(const std::string& name, int id) {
    AgentModel m;
    m.id = id;
    m.name = name;
    if (name == "leader") {
        m.f = [](double t, double x) { return leader_u0(t) * std::cos(t) + 0.2 * std::sin(x); };
    } else if (name == "f1") {
        // cbrt keeps the cube root real (sign-preserving) for negative sines
        m.f = [](double t, double x) {
            const double c = std::cos(2.0 * kPi * t);
            return 0.1 * std::cbrt(std::sin(x)) + c * c + std::exp(-t);
        };
    } else if (name == "f2") {
        m.f = [](double t, double x) { return 0.1 * std::sin(x) + std::cos(2.0 * kPi * t); };
    } else if (name == "f3") {
        m.f = [](double t, double x) { return -x * std::cos(t) - std::sin(x) - std::cos(x); };
    } else if (name == "f4") {
        m.f = [](double t, double x) { return std::sin(x) + std::cos(std::exp(-x * t)); };
    } else {
        std::string known;
        for (const auto& k : known_model_names()) known += (known.empty() ? "" : ", ") + k;
        throw ValidationError("unknown agent model \"" + name + "\" (known: " + known + ")");
    }
    return m;
}

double eval_dynamics(const AgentModel& model, double t, double x, double u, bool disturb_on) {
    const double rate = model.f(t, x) + u + (disturb_on ? disturbance_signal(model.disturbance, t) : 0.0);
    if (!std::isfinite(rate)) {
        throw NumericError("eval_dynamics: non-finite rate for agent " + std::to_string(model.id) +
                               " at t = " + std::to_string(t),
                           t, model.id);
    }
    return rate;
}

double lipschitz_probe(const AgentModel& model, double x_lo, double x_hi, double t_lo,
                       double t_hi, int samples, std::uint64_t seed) {
    if (samples < 2) {
        throw ValidationError("lipschitz_probe: need at least 2 samples");
    }
    if (!(x_hi > x_lo)) {
        throw ValidationError("lipschitz_probe: degenerate state interval");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dx(x_lo, x_hi);
    std::uniform_real_distribution<double> dt(t_lo, t_hi);
    double best = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double t = dt(rng);
        const double x1 = dx(rng);
        const double x2 = dx(rng);
        const double gap = std::abs(x1 - x2);
        if (gap < 1e-12) continue;
        const double ratio = std::abs(model.f(t, x1) - model.f(t, x2)) / gap;
        if (std::isfinite(ratio) && ratio > best) best = ratio;
    }
    return best;
}

}  // namespace etsmc
