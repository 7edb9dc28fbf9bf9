#include "etsmc/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace etsmc {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    return out;
}

}  // namespace

int csv_precision() {
    if (const char* env = std::getenv("ETSMC_CSV_PRECISION")) {
        const int p = std::atoi(env);
        if (p >= 1 && p <= 17) return p;
    }
    return 17;
}

std::string format_double(double v, int precision) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

std::vector<std::filesystem::path> emit_csv(const RunResult& result,
                                            const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec && !fs::is_directory(out_dir)) {
        throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());
    }

    const int prec = csv_precision();
    const int n = result.topology.n_followers;
    std::vector<fs::path> written;

    {
        const fs::path path = out_dir / "trajectory.csv";
        std::ofstream out = open_out(path);
        out << "t,x0";
        for (int i = 1; i <= n; ++i) out << ",x" << i;
        for (int i = 1; i <= n; ++i) out << ",u" << i;
        for (int i = 1; i <= n; ++i) out << ",sigma" << i;
        for (int i = 1; i <= n; ++i) out << ",e" << i;
        out << ",V\n";
        for (const auto& rec : result.trajectory.steps) {
            out << format_double(rec.t, prec) << ',' << format_double(rec.x0, prec);
            for (int i = 0; i < n; ++i) out << ',' << format_double(rec.x(i), prec);
            for (int i = 0; i < n; ++i) out << ',' << format_double(rec.u(i), prec);
            for (int i = 0; i < n; ++i) out << ',' << format_double(rec.sigma(i), prec);
            for (int i = 0; i < n; ++i) out << ',' << format_double(rec.e(i), prec);
            out << ',' << format_double(rec.v, prec) << '\n';
        }
        written.push_back(path);
    }

    {
        const fs::path path = out_dir / "events.csv";
        std::ofstream out = open_out(path);
        out << "agent,k,t_k,T_k\n";
        for (std::size_t i = 0; i < result.events.instants.size(); ++i) {
            const auto& ev = result.events.instants[i];
            for (std::size_t k = 0; k < ev.size(); ++k) {
                out << (i + 1) << ',' << k << ',' << format_double(ev[k], prec) << ',';
                if (k + 1 < ev.size()) out << format_double(ev[k + 1] - ev[k], prec);
                out << '\n';
            }
        }
        written.push_back(path);
    }

    {
        const fs::path path = out_dir / "diagnostics.csv";
        std::ofstream out = open_out(path);
        const Diagnostics& d = result.diagnostics;
        out << "key,value\n";
        auto row = [&](const std::string& key, const std::string& value) {
            out << key << ',' << value << '\n';
        };
        auto num = [&](const std::string& key, double value) { row(key, format_double(value, prec)); };
        num("reaching_eta", d.reaching.eta_measured);
        row("reaching_violations", std::to_string(d.reaching.violations.size()));
        row("reaching_samples", std::to_string(d.reaching.samples_checked));
        num("reaching_band", d.reaching.band);
        num("gain_K", d.gain.K);
        num("gain_S", d.gain.S);
        row("gain_adequate", d.gain.adequate ? "1" : "0");
        num("lipschitz_estimate", d.lipschitz_estimate);
        num("f_tilde", d.f_tilde);
        num("lambda2", d.lambda2);
        row("beta_in_range", d.beta_in_range ? "1" : "0");
        for (std::size_t i = 0; i < d.events.per_agent.size(); ++i) {
            const auto& a = d.events.per_agent[i];
            const std::string tag = std::to_string(i + 1);
            row("event_count_" + tag, std::to_string(a.count));
            if (a.has_intervals) {
                num("min_inter_event_" + tag, a.min_gap);
                num("mean_inter_event_" + tag, a.mean_gap);
                num("max_inter_event_" + tag, a.max_gap);
            }
        }
        row("total_events", std::to_string(d.events.total_events));
        num("events_to_steps_ratio", d.events.events_to_steps_ratio);
        row("min_gap_at_least_dt", d.events.min_gap_at_least_dt ? "1" : "0");
        row("max_events_per_1s_late", std::to_string(d.max_events_per_second_late));
        for (Eigen::Index i = 0; i < d.max_hold_error.size(); ++i) {
            num("hold_error_sup_" + std::to_string(i + 1), d.max_hold_error(i));
        }
        num("trigger_quantization_s", d.trigger_quantization);
        written.push_back(path);
    }

    return written;
}

}  // namespace etsmc
