#include "etsmc/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace etsmc {

namespace {

using nlohmann::ordered_json;

void check_keys(const ordered_json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ValidationError("unknown key \"" + (section.empty() ? key : section + "." + key) +
                                  "\" in config");
        }
    }
}

double as_number(const ordered_json& v, const std::string& where) {
    if (!v.is_number()) throw ValidationError(where + " must be a number");
    return v.get<double>();
}

Vector as_vector(const ordered_json& v, const std::string& where) {
    if (!v.is_array()) throw ValidationError(where + " must be an array of numbers");
    Vector out(v.size());
    Eigen::Index i = 0;
    for (const auto& item : v) {
        out(i++) = as_number(item, where + "[" + std::to_string(i) + "]");
    }
    return out;
}

DisturbanceKind kind_from_string(const std::string& s) {
    if (s == "none") return DisturbanceKind::none;
    if (s == "matched") return DisturbanceKind::matched;
    if (s == "mismatched") return DisturbanceKind::mismatched;
    throw ValidationError("disturbance.kind must be one of none|matched|mismatched, got \"" + s +
                          "\"");
}

std::string kind_to_string(DisturbanceKind k) {
    switch (k) {
        case DisturbanceKind::matched: return "matched";
        case DisturbanceKind::mismatched: return "mismatched";
        default: return "none";
    }
}

SimConfig from_json(const ordered_json& j) {
    if (!j.is_object()) throw ValidationError("config root must be an object");
    check_keys(j, "", {"topology", "models", "params", "formation", "disturbance", "initial", "sim"});
    for (const char* required : {"topology", "models", "params", "initial"}) {
        if (!j.contains(required)) {
            throw ValidationError(std::string("config is missing required section \"") + required +
                                  "\"");
        }
    }

    SimConfig cfg;

    const auto& topo = j.at("topology");
    check_keys(topo, "topology", {"adjacency", "pinning"});
    if (!topo.contains("adjacency") || !topo.contains("pinning")) {
        throw ValidationError("topology needs both adjacency and pinning");
    }
    const auto& adj = topo.at("adjacency");
    if (!adj.is_array() || adj.empty()) {
        throw ValidationError("topology.adjacency must be a non-empty array of rows");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(adj.size());
    cfg.adjacency.resize(n, n);
    Eigen::Index r = 0;
    for (const auto& row : adj) {
        const Vector v = as_vector(row, "topology.adjacency[" + std::to_string(r) + "]");
        if (v.size() != n) {
            throw ValidationError("topology.adjacency[" + std::to_string(r) + "] has " +
                                  std::to_string(v.size()) + " entries, expected " +
                                  std::to_string(n));
        }
        cfg.adjacency.row(r++) = v.transpose();
    }
    cfg.pinning = as_vector(topo.at("pinning"), "topology.pinning");

    const auto& models = j.at("models");
    check_keys(models, "models", {"leader", "followers"});
    if (models.contains("leader")) {
        cfg.leader_model = models.at("leader").get<std::string>();
    }
    if (!models.contains("followers")) {
        throw ValidationError("models.followers is required");
    }
    for (const auto& name : models.at("followers")) {
        cfg.follower_models.push_back(name.get<std::string>());
    }

    const auto& params = j.at("params");
    check_keys(params, "params",
               {"K", "tau", "gamma1", "gamma2", "c0", "c1", "beta", "assumed_disturbance"});
    auto field = [&](const char* key, double& into) {
        if (params.contains(key)) into = as_number(params.at(key), std::string("params.") + key);
    };
    field("K", cfg.params.K);
    field("tau", cfg.params.tau);
    field("gamma1", cfg.params.gamma1);
    field("gamma2", cfg.params.gamma2);
    field("c0", cfg.params.c0);
    field("c1", cfg.params.c1);
    field("beta", cfg.params.beta);
    if (params.contains("assumed_disturbance")) {
        cfg.params.assumed_disturbance =
            as_vector(params.at("assumed_disturbance"), "params.assumed_disturbance");
    }

    if (j.contains("formation")) {
        const auto& formation = j.at("formation");
        check_keys(formation, "formation", {"offsets"});
        if (formation.contains("offsets")) {
            cfg.formation.offsets = as_vector(formation.at("offsets"), "formation.offsets");
        }
    }

    if (j.contains("disturbance")) {
        const auto& dist = j.at("disturbance");
        check_keys(dist, "disturbance", {"kind", "amplitude", "amplitudes", "leader_amplitude"});
        DisturbanceKind kind = DisturbanceKind::none;
        if (dist.contains("kind")) kind = kind_from_string(dist.at("kind").get<std::string>());
        if (dist.contains("amplitude") && dist.contains("amplitudes")) {
            throw ValidationError("disturbance: give either amplitude or amplitudes, not both");
        }
        Vector amps;
        if (dist.contains("amplitude")) {
            amps = Vector::Constant(n, as_number(dist.at("amplitude"), "disturbance.amplitude"));
        } else if (dist.contains("amplitudes")) {
            amps = as_vector(dist.at("amplitudes"), "disturbance.amplitudes");
        }
        for (Eigen::Index i = 0; i < amps.size(); ++i) {
            cfg.disturbances.push_back({amps(i), kind});
        }
        if (dist.contains("leader_amplitude")) {
            cfg.leader_disturbance.amplitude =
                as_number(dist.at("leader_amplitude"), "disturbance.leader_amplitude");
            cfg.leader_disturbance.kind = kind;
        }
    }

    const auto& initial = j.at("initial");
    check_keys(initial, "initial", {"leader", "followers"});
    if (!initial.contains("leader") || !initial.contains("followers")) {
        throw ValidationError("initial needs both leader and followers");
    }
    cfg.leader_initial = as_number(initial.at("leader"), "initial.leader");
    cfg.follower_initial = as_vector(initial.at("followers"), "initial.followers");

    if (j.contains("sim")) {
        const auto& sim = j.at("sim");
        check_keys(sim, "sim",
                   {"dt", "t_end", "seed", "oracle_disturbance", "force_trigger_every_step",
                    "edot_backward_difference", "coupled_feedforward", "reaching_band"});
        if (sim.contains("dt")) cfg.dt = as_number(sim.at("dt"), "sim.dt");
        if (sim.contains("t_end")) cfg.t_end = as_number(sim.at("t_end"), "sim.t_end");
        if (sim.contains("seed")) cfg.seed = sim.at("seed").get<std::uint64_t>();
        auto flag = [&](const char* key, bool& into) {
            if (sim.contains(key)) {
                if (!sim.at(key).is_boolean()) {
                    throw ValidationError(std::string("sim.") + key + " must be a boolean");
                }
                into = sim.at(key).get<bool>();
            }
        };
        flag("oracle_disturbance", cfg.oracle_disturbance);
        flag("force_trigger_every_step", cfg.force_trigger_every_step);
        flag("edot_backward_difference", cfg.edot_backward_difference);
        flag("coupled_feedforward", cfg.coupled_feedforward);
        if (sim.contains("reaching_band")) {
            cfg.reaching_band = as_number(sim.at("reaching_band"), "sim.reaching_band");
        }
    }

    // Full structural validation, then the reachability precondition the
    // control law depends on.
    const TopologyMatrices topo_m = build_topology(cfg.adjacency, cfg.pinning);
    cfg.validate();
    for (const auto& name : cfg.follower_models) make_agent_model(name, 0);
    make_agent_model(cfg.leader_model, 0);
    if (!has_leader_rooted_spanning_tree(topo_m)) {
        throw ValidationError(
            "topology has no leader-rooted spanning tree: H = L + B is singular and the "
            "consensus control law is undefined");
    }
    return cfg;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "consensus",  "consensus-matched",  "consensus-mismatched",
        "formation",  "formation-matched",  "formation-mismatched",
    };
    return names;
}

bool is_preset(const std::string& name) {
    for (const auto& p : preset_names()) {
        if (p == name) return true;
    }
    return false;
}

SimConfig preset(const std::string& name) {
    if (!is_preset(name)) {
        std::string known;
        for (const auto& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
        throw ValidationError("unknown preset \"" + name + "\" (known: " + known + ")");
    }

    SimConfig cfg;
    cfg.adjacency.resize(4, 4);
    cfg.adjacency << 0, 0, 1, 0,
                     0, 0, 0, 0,
                     0, 1, 0, 0,
                     0, 0, 1, 0;
    cfg.pinning = Vector(4);
    cfg.pinning << 1, 1, 0, 0;
    cfg.leader_model = "leader";
    cfg.follower_models = {"f1", "f2", "f3", "f4"};
    cfg.leader_initial = 0.0;
    cfg.follower_initial = Vector(4);
    cfg.follower_initial << 10, -7, 4, -9;

    if (name.rfind("formation", 0) == 0) {
        cfg.formation.offsets = Vector(4);
        cfg.formation.offsets << 1, 2, 3, 4;
    }
    if (name.ends_with("-matched")) {
        cfg.disturbances.assign(4, {0.3, DisturbanceKind::matched});
    } else if (name.ends_with("-mismatched")) {
        cfg.disturbances.assign(4, {9.0, DisturbanceKind::mismatched});
    }
    return cfg;
}

SimConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigFileError("cannot open config file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

SimConfig parse_config_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ConfigParseError(std::string("config is not valid JSON: ") + err.what());
    }
    return from_json(j);
}

std::string config_to_json(const SimConfig& cfg) {
    ordered_json j;

    ordered_json adj = ordered_json::array();
    for (Eigen::Index i = 0; i < cfg.adjacency.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index k = 0; k < cfg.adjacency.cols(); ++k) row.push_back(cfg.adjacency(i, k));
        adj.push_back(row);
    }
    ordered_json pin = ordered_json::array();
    for (Eigen::Index i = 0; i < cfg.pinning.size(); ++i) pin.push_back(cfg.pinning(i));
    j["topology"] = {{"adjacency", adj}, {"pinning", pin}};

    j["models"] = {{"leader", cfg.leader_model}, {"followers", cfg.follower_models}};

    ordered_json params = {{"K", cfg.params.K},     {"tau", cfg.params.tau},
                           {"gamma1", cfg.params.gamma1}, {"gamma2", cfg.params.gamma2},
                           {"c0", cfg.params.c0},   {"c1", cfg.params.c1},
                           {"beta", cfg.params.beta}};
    if (cfg.params.assumed_disturbance.size() != 0) {
        ordered_json a = ordered_json::array();
        for (Eigen::Index i = 0; i < cfg.params.assumed_disturbance.size(); ++i) {
            a.push_back(cfg.params.assumed_disturbance(i));
        }
        params["assumed_disturbance"] = a;
    }
    j["params"] = params;

    if (cfg.formation.offsets.size() != 0) {
        ordered_json offsets = ordered_json::array();
        for (Eigen::Index i = 0; i < cfg.formation.offsets.size(); ++i) {
            offsets.push_back(cfg.formation.offsets(i));
        }
        j["formation"] = {{"offsets", offsets}};
    }

    if (!cfg.disturbances.empty() || cfg.leader_disturbance.amplitude != 0.0) {
        ordered_json dist;
        DisturbanceKind kind =
            cfg.disturbances.empty() ? cfg.leader_disturbance.kind : cfg.disturbances.front().kind;
        dist["kind"] = kind_to_string(kind);
        if (!cfg.disturbances.empty()) {
            ordered_json amps = ordered_json::array();
            for (const auto& d : cfg.disturbances) amps.push_back(d.amplitude);
            dist["amplitudes"] = amps;
        }
        dist["leader_amplitude"] = cfg.leader_disturbance.amplitude;
        j["disturbance"] = dist;
    }

    ordered_json followers = ordered_json::array();
    for (Eigen::Index i = 0; i < cfg.follower_initial.size(); ++i) {
        followers.push_back(cfg.follower_initial(i));
    }
    j["initial"] = {{"leader", cfg.leader_initial}, {"followers", followers}};

    j["sim"] = {{"dt", cfg.dt},
                {"t_end", cfg.t_end},
                {"seed", cfg.seed},
                {"oracle_disturbance", cfg.oracle_disturbance},
                {"force_trigger_every_step", cfg.force_trigger_every_step},
                {"edot_backward_difference", cfg.edot_backward_difference},
                {"coupled_feedforward", cfg.coupled_feedforward},
                {"reaching_band", cfg.reaching_band}};

    return j.dump(2) + "\n";
}

}  // namespace etsmc
