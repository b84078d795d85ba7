#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "sl2limits/experiments.hpp"

using namespace sl2limits;
using nlohmann::json;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    long p = -1;
    std::string ext;
    int precision = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file");
    cmd->add_option("--out", f.out_path, "report output path");
    cmd->add_option("--p", f.p, "odd prime");
    cmd->add_option("--ext", f.ext, "extension kind: unram | ram-p | ram-ps");
    cmd->add_option("--precision", f.precision, "relative precision (digits)");
    cmd->add_option("--seed", f.seed, "PRNG seed")->each([&](const std::string&) {
        f.seed_set = true;
    });
}

ExperimentConfig load_config(const CommonFlags& f) {
    ExperimentConfig cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw ConfigError("cannot open config: " + f.config_path);
        try {
            json j;
            in >> j;
            cfg = ExperimentConfig::from_json(j);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config does not decode: ") + e.what());
        }
    }
    if (f.p > 0) cfg.p = f.p;
    if (!f.ext.empty()) cfg.ext = parse_extension(f.ext);
    if (f.precision > 0) cfg.precision = f.precision;
    if (f.seed_set) cfg.seed = f.seed;
    return cfg;
}

int emit(const json& report, const CommonFlags& f, const std::string& fallback) {
    std::string path = f.out_path.empty() ? fallback : f.out_path;
    std::ofstream out(path);
    out << report.dump(2) << "\n";
    bool pass = report.at("pass").get<bool>();
    std::cout << report.at("experiment").get<std::string>() << ": "
              << (pass ? "pass" : "FAIL") << " (" << path << ")\n";
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-adic SL(2) involution and limit-group workbench"};
    app.require_subcommand(1);

    CommonFlags flags;
    json classify_params = json::object();

    auto* classify = app.add_subcommand("classify", "involution families and conjugators");
    add_common(classify, flags);
    long a_param = 0, z1 = 0, z2 = 0, y = 0, x1 = 0, x2 = 0, c2 = 0;
    std::string family;
    classify->add_option("--family", family, "zy | diag | weyl");
    classify->add_option("--a", a_param, "inner-family parameter");
    classify->add_option("--z1", z1);
    classify->add_option("--z2", z2);
    classify->add_option("--y", y);
    classify->add_option("--x1", x1);
    classify->add_option("--x2", x2);
    classify->add_option("--c2", c2, "free parameter of the biquadratic case");

    auto* fixed = app.add_subcommand("fixed-group", "fixed-point-group sampling");
    add_common(fixed, flags);
    auto* orbits = app.add_subcommand("orbits", "boundary orbit experiments");
    add_common(orbits, flags);
    auto* polar = app.add_subcommand("polar", "polar decomposition round-trips");
    add_common(polar, flags);
    auto* limp = app.add_subcommand("limits-padic", "diagonal-conjugation limit experiments");
    add_common(limp, flags);
    auto* limr = app.add_subcommand("limits-real", "archimedean limit replay");
    add_common(limr, flags);
    auto* dot = app.add_subcommand("tree-dot", "DOT rendering of a tree ball");
    add_common(dot, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig cfg = load_config(flags);
        if (classify->parsed()) {
            if (classify->count("--family")) {
                classify_params["family"] = family;
                if (classify->count("--a")) classify_params["a"] = a_param;
                if (classify->count("--z1")) classify_params["z1"] = z1;
                if (classify->count("--z2")) classify_params["z2"] = z2;
                if (classify->count("--y")) classify_params["y"] = y;
                if (classify->count("--x1")) classify_params["x1"] = x1;
                if (classify->count("--x2")) classify_params["x2"] = x2;
                if (classify->count("--c2")) classify_params["c2"] = c2;
            }
            return emit(run_classify(cfg, classify_params), flags, "classify-report.json");
        }
        if (fixed->parsed()) return emit(run_fixed_group(cfg), flags, "fixed-group-report.json");
        if (orbits->parsed()) return emit(run_orbits(cfg), flags, "orbits-report.json");
        if (polar->parsed()) return emit(run_polar(cfg), flags, "polar-report.json");
        if (limp->parsed()) return emit(run_limits_padic(cfg), flags, "limits-padic-report.json");
        if (limr->parsed()) return emit(run_limits_real(cfg), flags, "limits-real-report.json");
        if (dot->parsed()) {
            json rep = run_tree_dot(cfg);
            std::string path = flags.out_path.empty() ? "tree-ball.dot" : flags.out_path;
            std::ofstream dotfile(path);
            dotfile << rep.at("items").at(0).at("dot").get<std::string>();
            std::cout << "tree-dot: " << (rep.at("pass").get<bool>() ? "pass" : "FAIL")
                      << " (" << path << ")\n";
            return rep.at("pass").get<bool>() ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
