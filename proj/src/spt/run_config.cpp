#include "spt/run_config.hpp"

#include <fstream>

#include "json.hpp"

#include "spt/errors.hpp"

namespace spt {

namespace {

using nlohmann::json;

SimConfig sim_from_json(const json& j) {
    SimConfig cfg;
    cfg.d = j.value("d", cfg.d);
    cfg.n_steps = j.value("n_steps", cfg.n_steps);
    cfg.dt = j.value("dt", cfg.dt);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("drifts")) cfg.drifts = j.at("drifts").get<std::vector<double>>();
    if (j.contains("book_drift")) cfg.book_drift = j.at("book_drift").get<std::vector<double>>();
    if (j.contains("init_caps")) cfg.init_caps = j.at("init_caps").get<std::vector<double>>();
    if (j.contains("init_books")) cfg.init_books = j.at("init_books").get<std::vector<double>>();
    if (j.contains("vols")) {
        const auto vols = j.at("vols").get<std::vector<double>>();
        if (vols.size() != cfg.d) throw BadConfig("vols size != d");
        cfg.vol_matrix = Matrix(cfg.d, cfg.d, 0.0);
        for (std::size_t i = 0; i < cfg.d; ++i) cfg.vol_matrix(i, i) = vols[i];
    }
    if (j.contains("vol_matrix")) {
        const auto m = j.at("vol_matrix").get<std::vector<std::vector<double>>>();
        if (m.size() != cfg.d) throw BadConfig("vol_matrix must have d rows");
        const std::size_t f = m.empty() ? 0 : m.front().size();
        cfg.vol_matrix = Matrix(cfg.d, f);
        for (std::size_t i = 0; i < cfg.d; ++i) {
            if (m[i].size() != f) throw BadConfig("vol_matrix rows differ in length");
            for (std::size_t k = 0; k < f; ++k) cfg.vol_matrix(i, k) = m[i][k];
        }
    }
    const std::string mode = j.value("book_mode", std::string("continuous"));
    if (mode == "continuous")
        cfg.book_mode = BookMode::continuous;
    else if (mode == "annual_jump")
        cfg.book_mode = BookMode::annual_jump;
    else
        throw BadConfig("book_mode must be 'continuous' or 'annual_jump'");
    cfg.book_update_interval = j.value("book_update_interval", cfg.book_update_interval);
    cfg.book_jump_vol = j.value("book_jump_vol", cfg.book_jump_vol);
    cfg.book_cycle_amp = j.value("book_cycle_amp", cfg.book_cycle_amp);
    return cfg;
}

} // namespace

FileConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw BadConfig("config parse error: " + std::string(e.what()));
    }
    FileConfig cfg;
    try {
        if (j.contains("sim")) cfg.sim = sim_from_json(j.at("sim"));
        if (j.contains("portfolios"))
            for (const auto& p : j.at("portfolios")) {
                if (p.is_string()) {
                    cfg.portfolios.push_back(p.get<std::string>());
                } else {
                    std::string spec = p.at("name").get<std::string>();
                    if (p.contains("params")) {
                        std::string sep = ":";
                        for (const auto& [k, v] : p.at("params").items()) {
                            spec += sep + k + "=" + std::to_string(v.get<double>());
                            sep = ",";
                        }
                    }
                    cfg.portfolios.push_back(spec);
                }
            }
        cfg.data_path = j.value("data", std::string());
        cfg.universe_path = j.value("universe", std::string());
        cfg.out_dir = j.value("out", std::string());
    } catch (const json::exception& e) {
        throw BadConfig("config schema error: " + std::string(e.what()));
    }
    return cfg;
}

} // namespace spt
