#include "cfmmlab/cli_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace cfmm {

using nlohmann::json;

namespace {

constexpr double kSecondsPerDay = 86400.0;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& text, const std::string& path, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ": bad numeric field '" +
                              text + "'");
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

void write_json_file(const json& j, const std::string& path) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

PricePath read_price_csv(const std::string& path) {
    auto in = open_input(path);
    PricePath out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("timestamp", 0) == 0) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": expected 2 fields (timestamp,price)");
        out.times.push_back(parse_double(fields[0], path, line_no) / kSecondsPerDay);
        out.prices.push_back(parse_double(fields[1], path, line_no));
    }
    try {
        out.validate();
    } catch (const std::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return out;
}

std::vector<TradeRecord> read_trade_csv(const std::string& path) {
    auto in = open_input(path);
    std::vector<TradeRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("timestamp", 0) == 0) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": expected 5 fields (timestamp,u_x,u_y,reserve_x,reserve_y)");
        TradeRecord rec;
        rec.timestamp = parse_double(fields[0], path, line_no) / kSecondsPerDay;
        rec.u_x = parse_double(fields[1], path, line_no);
        rec.u_y = parse_double(fields[2], path, line_no);
        rec.x = parse_double(fields[3], path, line_no);
        rec.y = parse_double(fields[4], path, line_no);
        if (rec.u_x == 0.0 && rec.u_y == 0.0)
            throw ValidationError(path + ":" + std::to_string(line_no) + ": zero fill");
        if (!(rec.x > 0.0 && rec.y > 0.0))
            throw ValidationError(path + ":" + std::to_string(line_no) + ": nonpositive reserves");
        out.push_back(rec);
    }
    return out;
}

RunConfig load_run_config(const std::string& path) {
    auto in = open_input(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(path + ": JSON parse error: " + e.what());
    }

    RunConfig config;
    std::vector<std::string> violations;
    auto get = [&](const json& obj, const char* key, auto fallback) {
        using T = decltype(fallback);
        if (!obj.contains(key)) return fallback;
        try {
            return obj.at(key).get<T>();
        } catch (const json::exception&) {
            violations.push_back(std::string("field '") + key + "' has the wrong type");
            return fallback;
        }
    };

    SimConfig& sim = config.sim;
    sim.seed = get(j, "seed", std::uint64_t{1});
    sim.trials = get(j, "trials", 1000);
    sim.horizon_days = get(j, "horizon_days", 1.0 / 24.0);
    sim.block_interval = get(j, "block_interval_days", 15.0 / 86400.0);
    sim.threads = get(j, "threads", 1);
    sim.fees.gamma = get(j, "fee_gamma", 0.997);
    sim.initial_price = get(j, "initial_price", 1816.7237);
    sim.initial_pool_value = get(j, "initial_pool_value", 2.847760e8);
    sim.initial_log_ratio = get(j, "initial_log_ratio", 0.0);
    config.equilibrium_bootstrap = get(j, "equilibrium_bootstrap", false);

    if (j.contains("mjd")) {
        const json& m = j.at("mjd");
        sim.mjd.diffusion.mu = get(m, "mu_d", 0.0);
        sim.mjd.diffusion.sigma = get(m, "sigma_d", 0.0);
        sim.mjd.jumps.lambda = get(m, "lambda_j", 0.0);
        sim.mjd.jumps.mu = get(m, "mu_j", 0.0);
        sim.mjd.jumps.sigma = get(m, "sigma_j", 0.0);
    }
    if (j.contains("arb")) sim.arb = ArbParams{get(j.at("arb"), "edge_bps", 0.0)};
    if (j.contains("nt1"))
        sim.nt1 = NT1Params{get(j.at("nt1"), "lambda", 0.0), get(j.at("nt1"), "sigma_delta", 0.0)};
    if (j.contains("nt2"))
        sim.nt2 =
            NT2Params{get(j.at("nt2"), "rate_per_day", 0.0), get(j.at("nt2"), "size_scale", 1.0)};

    if (j.contains("equilibrium")) {
        const json& e = j.at("equilibrium");
        const std::string mode = get(e, "mode", std::string("instantaneous"));
        if (mode == "instantaneous")
            config.equilibrium.cadence = ArbCadence::Instantaneous;
        else if (mode == "poisson")
            config.equilibrium.cadence = ArbCadence::Poisson;
        else
            violations.push_back("equilibrium.mode must be 'instantaneous' or 'poisson'");
        config.equilibrium.arb_rate_per_day = get(e, "arb_rate_per_day", 5760.0);
        config.equilibrium.samples = static_cast<std::size_t>(get(e, "samples", 100000));
        config.equilibrium.sample_interval_days = get(e, "sample_interval_s", 30.0) / kSecondsPerDay;
        config.equilibrium.substep_days = get(e, "substep_s", 0.1) / kSecondsPerDay;
        config.equilibrium.burn_in_fraction = get(e, "burn_in_fraction", 0.1);
    }

    // Collect every invariant violation before rejecting.
    if (!(sim.horizon_days > 0.0)) violations.push_back("horizon_days must be > 0");
    if (sim.trials < 1) violations.push_back("trials must be >= 1");
    if (!(sim.block_interval > 0.0)) violations.push_back("block_interval_days must be > 0");
    if (sim.threads < 1) violations.push_back("threads must be >= 1");
    if (!(sim.fees.gamma > 0.0 && sim.fees.gamma <= 1.0))
        violations.push_back("fee_gamma must be in (0, 1]");
    if (!(sim.initial_price > 0.0)) violations.push_back("initial_price must be > 0");
    if (!(sim.initial_pool_value > 0.0)) violations.push_back("initial_pool_value must be > 0");
    if (!(sim.mjd.diffusion.sigma >= 0.0)) violations.push_back("mjd.sigma_d must be >= 0");
    if (!(sim.mjd.jumps.lambda >= 0.0)) violations.push_back("mjd.lambda_j must be >= 0");
    if (!(sim.mjd.jumps.sigma >= 0.0)) violations.push_back("mjd.sigma_j must be >= 0");
    if (sim.arb && !(sim.arb->edge_bps >= 0.0)) violations.push_back("arb.edge_bps must be >= 0");
    if (sim.nt1 && !(sim.nt1->lambda >= 0.0)) violations.push_back("nt1.lambda must be >= 0");
    if (sim.nt1 && !(sim.nt1->sigma_delta >= 0.0))
        violations.push_back("nt1.sigma_delta must be >= 0");
    if (sim.nt2 && !(sim.nt2->rate >= 0.0)) violations.push_back("nt2.rate_per_day must be >= 0");
    if (sim.nt2 && !(sim.nt2->size_scale > 0.0))
        violations.push_back("nt2.size_scale must be > 0");

    if (!violations.empty()) {
        std::string msg = path + ": invalid configuration:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw ValidationError(msg);
    }

    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a(j.dump());
    config.config_hash = hash.str();
    return config;
}

void write_batch_stats_json(const BatchStats& stats, const RunConfig& config,
                            const std::string& path) {
    json j{{"mean_pnl_bps_per_day", stats.mean_pnl_bps_per_day},
           {"stderr_bps_per_day", stats.stderr_bps_per_day},
           {"mean_fee_bps_per_day", stats.mean_fee_bps_per_day},
           {"mean_volume", stats.mean_volume},
           {"arb_trades_per_day", stats.arb_trades_per_day},
           {"noise_trades_per_day", stats.noise_trades_per_day},
           {"trials", stats.trials},
           {"horizon_days", stats.horizon_days},
           {"initial_pool_value", stats.initial_pool_value},
           {"seed", config.sim.seed},
           {"config_hash", config.config_hash}};
    write_json_file(j, path);
}

void write_trials_csv(const std::vector<TrialResult>& results, const std::string& path) {
    auto out = open_output(path);
    out << "trial,pnl,volume,fee_income,arb_trades,noise_trades,final_log_ratio\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        out << i << ',' << r.pnl << ',' << r.volume << ',' << r.fee_income << ',' << r.arb_trades
            << ',' << r.noise_trades << ',' << r.final_log_ratio << '\n';
    }
}

void write_calibration_json(const CalibrationResult& result, const std::string& path) {
    json j{{"mjd",
            {{"mu_d", result.mjd.diffusion.mu},
             {"sigma_d", result.mjd.diffusion.sigma},
             {"lambda_j", result.mjd.jumps.lambda},
             {"mu_j", result.mjd.jumps.mu},
             {"sigma_j", result.mjd.jumps.sigma}}},
           {"nt1", {{"lambda", result.nt1.lambda}, {"sigma_delta", result.nt1.sigma_delta}}},
           {"nt2", {{"rate_per_day", result.nt2.rate}, {"size_scale", result.nt2.size_scale}}},
           {"loglik", result.loglik},
           {"diagnostics",
            {{"mjd_converged", result.mjd_converged},
             {"observed_trades_per_day", result.observed_trades_per_day},
             {"delta_samples", result.delta_samples},
             {"skipped_trades", result.skipped_trades}}}};
    write_json_file(j, path);
}

void write_greeks_json(const GreeksReport& report, const RunConfig& config,
                       const std::string& path) {
    json sens = json::object();
    for (const auto& [name, entry] : report.sensitivities) {
        sens[name] = {{"value", entry.value},
                      {"stderr", entry.stderr_value},
                      {"bump", entry.bump},
                      {"units", entry.units}};
    }
    json j{{"delta", {{"value", report.delta.value}, {"stderr", report.delta.stderr_value}}},
           {"gamma", {{"value", report.gamma.value}, {"stderr", report.gamma.stderr_value}}},
           {"theta_analogue_bps_per_day", report.theta_analogue_bps_per_day},
           {"sensitivities", sens},
           {"seed", config.sim.seed},
           {"config_hash", config.config_hash}};
    write_json_file(j, path);
}

void write_equilibrium_samples_csv(const std::vector<double>& samples, const std::string& path) {
    auto out = open_output(path);
    out << "log_price_ratio\n";
    out << std::setprecision(17);
    for (double z : samples) out << z << '\n';
}

void write_density_csv(const EquilibriumDensity& density, double z_max, std::size_t points,
                       const std::string& path) {
    if (points < 2) throw std::invalid_argument("density grid needs >= 2 points");
    auto out = open_output(path);
    out << "z,density\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < points; ++i) {
        const double z =
            -z_max + 2.0 * z_max * static_cast<double>(i) / static_cast<double>(points - 1);
        out << z << ',' << density(z) << '\n';
    }
}

}  // namespace cfmm
