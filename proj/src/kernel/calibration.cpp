#include "nmsurf/kernel/calibration.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nmsurf {

using ordered_json = nlohmann::ordered_json;

std::string Calibration::to_json() const {
    ordered_json j;
    j["calibration_version"] = calibration_version;
    j["n"] = n;
    j["s"] = s;
    j["family"] = family;
    j["C_effacement"] = C_effacement;
    j["C_measure"] = C_measure;
    j["C_tail"] = C_tail;
    j["C_dirichlet"] = C_dirichlet;
    j["delta_harnack"] = delta_harnack;
    j["k0"] = k0;
    j["fit"] = ordered_json{{"effacement_slope", effacement_slope},
                            {"measure_slope", measure_slope},
                            {"dirichlet_slope", dirichlet_slope},
                            {"gauss_C", gauss_C},
                            {"gauss_c", gauss_c}};
    return j.dump(2) + "\n";
}

Calibration Calibration::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    Calibration c;
    c.calibration_version = j.at("calibration_version").get<int>();
    c.n = j.at("n").get<int>();
    c.s = j.at("s").get<double>();
    c.family = j.at("family").get<std::string>();
    c.C_effacement = j.at("C_effacement").get<double>();
    c.C_measure = j.at("C_measure").get<double>();
    c.C_tail = j.at("C_tail").get<double>();
    c.C_dirichlet = j.at("C_dirichlet").get<double>();
    c.delta_harnack = j.at("delta_harnack").get<double>();
    c.k0 = j.at("k0").get<int>();
    if (j.contains("fit")) {
        const auto& f = j["fit"];
        c.effacement_slope = f.value("effacement_slope", 0.0);
        c.measure_slope = f.value("measure_slope", 0.0);
        c.dirichlet_slope = f.value("dirichlet_slope", 0.0);
        c.gauss_C = f.value("gauss_C", 0.0);
        c.gauss_c = f.value("gauss_c", 0.0);
    }
    return c;
}

void Calibration::save(const std::string& path, bool overwrite) const {
    if (!overwrite && std::filesystem::exists(path))
        throw std::runtime_error("calibration file exists, refusing to overwrite: " + path);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write calibration file: " + path);
    out << to_json();
}

Calibration Calibration::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read calibration file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

} // namespace nmsurf
