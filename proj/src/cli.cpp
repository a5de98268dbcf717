#include "tvfbe/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace tvfbe::cli {

std::string ConfigError::join(const std::vector<std::string>& problems) {
    std::string s = "invalid configuration:";
    for (const auto& p : problems) s += "\n  - " + p;
    return s;
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void select_solver(PCConfig& pc, const std::string& name) {
    if (name == "qn-ls") {
        pc.pred_solver.method = SolverMethod::qn;
        pc.corr_solver.method = SolverMethod::qn_ls;
    } else if (name == "qn") {
        pc.pred_solver.method = SolverMethod::qn;
        pc.corr_solver.method = SolverMethod::qn;
    } else if (name == "grad") {
        pc.pred_solver.method = SolverMethod::grad;
        pc.corr_solver.method = SolverMethod::grad;
    } else {
        throw ConfigError({"solver: must be one of qn-ls, qn, grad (got \"" + name + "\")"});
    }
}

std::string solver_name(const PCConfig& pc) {
    switch (pc.corr_solver.method) {
        case SolverMethod::qn_ls: return "qn-ls";
        case SolverMethod::qn: return "qn";
        case SolverMethod::grad: return "grad";
    }
    return "?";
}

namespace {

// Pulls typed values out of the config document, collecting problems instead
// of throwing on first contact.
class FieldReader {
public:
    FieldReader(const json& j, std::vector<std::string>& problems) : j_(j), problems_(problems) {}

    template <typename T>
    bool required(const char* key, T& out, const char* type_name) {
        if (!j_.contains(key)) {
            problems_.push_back(std::string(key) + ": required field is missing");
            return false;
        }
        return read(key, out, type_name);
    }

    template <typename T>
    bool optional(const char* key, T& out, const char* type_name) {
        if (!j_.contains(key)) return false;
        return read(key, out, type_name);
    }

private:
    template <typename T>
    bool read(const char* key, T& out, const char* type_name) {
        try {
            out = j_.at(key).get<T>();
            return true;
        } catch (const json::exception&) {
            problems_.push_back(std::string(key) + ": must be " + type_name);
            return false;
        }
    }

    const json& j_;
    std::vector<std::string>& problems_;
};

void validate_experiment(const ExperimentConfig& cfg, std::vector<std::string>& problems) {
    if (cfg.rows < 1) problems.push_back("rows: must be at least 1");
    if (!(cfg.rows < cfg.cols)) problems.push_back("rows: must be less than cols (underdetermined model)");
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) problems.push_back("alpha: must lie in [0, 1]");
    if (!(cfg.noise_var >= 0.0)) problems.push_back("noise_var: must be nonnegative");
    if (!(cfg.signal.omega >= 0.0)) problems.push_back("omega: must be nonnegative");
    if (cfg.signal.active < 1 || static_cast<std::size_t>(cfg.signal.active) > cfg.cols)
        problems.push_back("active: must lie in [1, cols]");
    if (!(cfg.signal.amp_min > 0.0) || !(cfg.signal.amp_max >= cfg.signal.amp_min))
        problems.push_back("amp_min/amp_max: must satisfy 0 < amp_min <= amp_max");
    if (!(cfg.pc.Ts > 0.0)) problems.push_back("Ts: must be positive");
    if (cfg.pc.P < 0) problems.push_back("P: must be nonnegative");
    if (cfg.pc.C < 1) problems.push_back("C: must be at least 1");
    if (cfg.pc.steps < 0) problems.push_back("steps: must be nonnegative");
    if (!(cfg.pc.gamma_factor_corr > 0.0 && cfg.pc.gamma_factor_corr < 1.0))
        problems.push_back("gamma_factor: gamma must lie in (0, 1/L), so the factor must lie in (0, 1)");
    if (!(cfg.pc.oracle_tol > 0.0)) problems.push_back("oracle_tol: must be positive");
    if (cfg.pc.oracle_cap < 1) problems.push_back("oracle_cap: must be positive");
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({path + ": cannot open config file"});
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    json j;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        j = json::object();  // empty file: report all required fields below
    } else {
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError({path + ": not valid JSON (" + e.what() + ")"});
        }
        if (!j.is_object()) throw ConfigError({path + ": top-level JSON value must be an object"});
    }

    std::vector<std::string> problems;
    FieldReader r(j, problems);
    ExperimentConfig cfg;

    std::int64_t rows = 0, cols = 0, active = 0, P = 0, C = 0, steps = 0;
    std::uint64_t seed = 0;
    double gamma_factor = 0.0;
    std::string solver;

    if (r.required("rows", rows, "an integer")) cfg.rows = static_cast<std::size_t>(std::max<std::int64_t>(rows, 0));
    if (r.required("cols", cols, "an integer")) cfg.cols = static_cast<std::size_t>(std::max<std::int64_t>(cols, 0));
    r.required("alpha", cfg.alpha, "a number");
    r.required("noise_var", cfg.noise_var, "a number");
    r.required("omega", cfg.signal.omega, "a number");
    if (r.required("active", active, "an integer")) cfg.signal.active = static_cast<int>(active);
    r.required("Ts", cfg.pc.Ts, "a number");
    if (r.required("P", P, "an integer")) cfg.pc.P = static_cast<int>(P);
    if (r.required("C", C, "an integer")) cfg.pc.C = static_cast<int>(C);
    if (r.required("gamma_factor", gamma_factor, "a number")) {
        cfg.pc.gamma_factor_pred = gamma_factor;
        cfg.pc.gamma_factor_corr = gamma_factor;
    }
    if (r.required("steps", steps, "an integer")) cfg.pc.steps = static_cast<int>(steps);
    if (r.required("seed", seed, "a nonnegative integer")) cfg.seed = seed;
    if (r.required("solver", solver, "a string")) {
        try {
            select_solver(cfg.pc, solver);
        } catch (const ConfigError& e) {
            problems.insert(problems.end(), e.problems().begin(), e.problems().end());
        }
    }

    r.optional("amp_min", cfg.signal.amp_min, "a number");
    r.optional("amp_max", cfg.signal.amp_max, "a number");
    r.optional("oracle", cfg.pc.with_oracle, "a boolean");
    r.optional("oracle_tol", cfg.pc.oracle_tol, "a number");
    std::int64_t cap = 0;
    if (r.optional("oracle_cap", cap, "an integer")) cfg.pc.oracle_cap = static_cast<int>(cap);

    if (rows < 0) problems.push_back("rows: must be at least 1");
    if (cols < 0) problems.push_back("cols: must be positive");
    validate_experiment(cfg, problems);
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& ov) {
    if (ov.P) cfg.pc.P = *ov.P;
    if (ov.C) cfg.pc.C = *ov.C;
    if (ov.Ts) cfg.pc.Ts = *ov.Ts;
    if (ov.alpha) cfg.alpha = *ov.alpha;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.solver) select_solver(cfg.pc, *ov.solver);
    std::vector<std::string> problems;
    validate_experiment(cfg, problems);
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json j;
    j["rows"] = cfg.rows;
    j["cols"] = cfg.cols;
    j["alpha"] = cfg.alpha;
    j["noise_var"] = cfg.noise_var;
    j["omega"] = cfg.signal.omega;
    j["active"] = cfg.signal.active;
    j["amp_min"] = cfg.signal.amp_min;
    j["amp_max"] = cfg.signal.amp_max;
    j["Ts"] = cfg.pc.Ts;
    j["P"] = cfg.pc.P;
    j["C"] = cfg.pc.C;
    j["gamma_factor"] = cfg.pc.gamma_factor_corr;
    j["steps"] = cfg.pc.steps;
    j["seed"] = cfg.seed;
    j["solver"] = solver_name(cfg.pc);
    j["oracle"] = cfg.pc.with_oracle;
    j["oracle_tol"] = cfg.pc.oracle_tol;
    j["oracle_cap"] = cfg.pc.oracle_cap;
    return j.dump(2) + "\n";
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRecord>& records) {
    std::ofstream out(path, std::ios::binary);  // binary: no newline translation anywhere
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "k,t,E_r,err_norm,resid_pred,resid_corr,matvec_pred,matvec_corr,matvec_oracle\n";
    for (const auto& r : records) {
        out << r.k << ',' << format_double(r.t) << ',' << format_double(r.err_normalized) << ','
            << format_double(r.err_norm) << ',' << format_double(r.resid_pred) << ','
            << format_double(r.resid_corr) << ',' << r.matvec_pred << ',' << r.matvec_corr << ','
            << r.matvec_oracle << '\n';
    }
}

std::string format_summary(const ExperimentReport& rep, const ExperimentConfig& cfg) {
    std::ostringstream s;
    auto line = [&s](const char* key, const std::string& value) { s << key << " = " << value << "\n"; };
    line("solver", solver_name(cfg.pc));
    line("P", std::to_string(cfg.pc.P));
    line("C", std::to_string(cfg.pc.C));
    line("Ts", format_double(cfg.pc.Ts));
    line("steps_requested", std::to_string(cfg.pc.steps));
    line("steps_completed", std::to_string(rep.summary.steps));
    line("seed", std::to_string(rep.seed));
    line("m", format_double(rep.moduli.m));
    line("L", format_double(rep.moduli.L));
    line("gamma", format_double(rep.gamma));
    line("steady_from_step", std::to_string(rep.summary.steady_from));
    line("steady_mean_Er", format_double(rep.summary.ss_mean_Er));
    line("steady_max_Er", format_double(rep.summary.ss_max_Er));
    line("matvec_pred_total", std::to_string(rep.summary.matvec_pred_total));
    line("matvec_corr_total", std::to_string(rep.summary.matvec_corr_total));
    line("matvec_oracle_total", std::to_string(rep.summary.matvec_oracle_total));
    line("matvec_per_step", format_double(rep.summary.matvec_per_step));
    line("aborted", rep.run.aborted ? "yes" : "no");
    if (rep.run.aborted) line("abort_reason", rep.run.abort_reason);
    return s.str();
}

namespace {

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << content;
}

}  // namespace

int cmd_run(const ExperimentConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    write_text_file(out_dir + "/config_effective.json", config_to_json_text(cfg));
    ExperimentReport rep = run_experiment(cfg);
    write_trajectory_csv(out_dir + "/trajectory.csv", rep.run.records);
    write_text_file(out_dir + "/summary.txt", format_summary(rep, cfg));
    if (rep.run.aborted) {
        std::cerr << "run aborted after step " << rep.summary.steps << ": " << rep.run.abort_reason << "\n";
        return 1;
    }
    return 0;
}

SweepAxis parse_axis(const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError({"axis: expected <name>=<v1,v2,...> with name in {P, Ts, solver}"});
    SweepAxis axis;
    axis.name = spec.substr(0, eq);
    if (axis.name != "P" && axis.name != "Ts" && axis.name != "solver")
        throw ConfigError({"axis: name must be one of P, Ts, solver (got \"" + axis.name + "\")"});
    std::string rest = spec.substr(eq + 1);
    std::string item;
    std::istringstream ss(rest);
    while (std::getline(ss, item, ','))
        if (!item.empty()) axis.values.push_back(item);
    if (axis.values.empty()) throw ConfigError({"axis: value list is empty"});
    return axis;
}

namespace {

ExperimentConfig cell_config(const ExperimentConfig& base, const SweepAxis& axis, const std::string& value) {
    ExperimentConfig cfg = base;
    Overrides ov;
    try {
        if (axis.name == "P")
            ov.P = std::stoi(value);
        else if (axis.name == "Ts")
            ov.Ts = std::stod(value);
        else
            ov.solver = value;
    } catch (const std::exception&) {
        throw ConfigError({"axis: cannot parse \"" + value + "\" as a value for " + axis.name});
    }
    apply_overrides(cfg, ov);
    return cfg;
}

}  // namespace

int cmd_sweep(const ExperimentConfig& cfg, const SweepAxis& axis, const std::string& out_dir) {
    // Validate every cell before launching any: a bad axis value is invalid
    // input, not a runtime failure.
    std::vector<ExperimentConfig> cells;
    std::vector<std::string> cell_names;
    for (const auto& v : axis.values) {
        cells.push_back(cell_config(cfg, axis, v));
        cell_names.push_back(axis.name + "_" + v);
    }

    fs::create_directories(out_dir);
    struct CellOutcome {
        std::string status = "ok";
        SummaryStats summary;
        ExperimentConfig cfg;
    };
    std::vector<CellOutcome> outcomes(cells.size());

    // Cells are independent (own instance, own oracle, own RNG streams), so
    // they can run concurrently; each writes only into its own directory.
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cells.size()); ++i) {
        CellOutcome& oc = outcomes[static_cast<std::size_t>(i)];
        oc.cfg = cells[static_cast<std::size_t>(i)];
        const std::string cell_dir = out_dir + "/" + cell_names[static_cast<std::size_t>(i)];
        try {
            fs::create_directories(cell_dir);
            write_text_file(cell_dir + "/config_effective.json", config_to_json_text(oc.cfg));
            ExperimentReport rep = run_experiment(oc.cfg);
            write_trajectory_csv(cell_dir + "/trajectory.csv", rep.run.records);
            write_text_file(cell_dir + "/summary.txt", format_summary(rep, oc.cfg));
            oc.summary = rep.summary;
            if (rep.run.aborted) oc.status = "aborted: " + rep.run.abort_reason;
        } catch (const std::exception& e) {
            oc.status = std::string("error: ") + e.what();
        }
    }

    std::ofstream sum(out_dir + "/sweep_summary.csv", std::ios::binary);
    if (!sum) throw std::runtime_error(out_dir + "/sweep_summary.csv: cannot open for writing");
    sum << "cell,P,C,Ts,seed,solver,status,steps,ss_mean_Er,ss_max_Er,"
           "matvec_pred_total,matvec_corr_total,matvec_oracle_total\n";
    bool any_failed = false;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const CellOutcome& oc = outcomes[i];
        std::string status = oc.status;
        for (char& ch : status)
            if (ch == ',' || ch == '\n') ch = ';';
        sum << cell_names[i] << ',' << oc.cfg.pc.P << ',' << oc.cfg.pc.C << ','
            << format_double(oc.cfg.pc.Ts) << ',' << oc.cfg.seed << ',' << solver_name(oc.cfg.pc) << ','
            << status << ',' << oc.summary.steps << ',' << format_double(oc.summary.ss_mean_Er) << ','
            << format_double(oc.summary.ss_max_Er) << ',' << oc.summary.matvec_pred_total << ','
            << oc.summary.matvec_corr_total << ',' << oc.summary.matvec_oracle_total << '\n';
        if (oc.status != "ok") any_failed = true;
    }
    return any_failed ? 1 : 0;
}

namespace {

// JSON cannot carry IEEE specials; encode them as strings so the sentinel
// cases stay machine-readable.
json number_or_sentinel(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
    BoundsReport r = theorem2_bounds(a.m, a.L, a.gamma, a.C0, a.C1, a.C2, a.C3, a.P, a.C, a.tau, a.Ts);

    auto line = [&out](const char* key, const std::string& value) {
        out << key;
        for (std::size_t i = std::char_traits<char>::length(key); i < 26; ++i) out << ' ';
        out << value << "\n";
    };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::string(buf);
    };
    line("zeta", fmt(r.zeta));
    line("kappa", fmt(r.kappa));
    line("tau", fmt(r.tau));
    line("a1", fmt(r.a1));
    line("a0", fmt(r.a0));
    line("A1", fmt(r.A1));
    line("A0", fmt(r.A0));
    line("theorem1_satisfied", r.theorem1_satisfied ? "yes" : "no");
    line("asymptotic_bound_linear", fmt(r.asymptotic_bound_linear));
    line("a2", fmt(r.a2));
    line("a1_second", fmt(r.a1_second));
    line("a0_second", fmt(r.a0_second));
    line("A2", fmt(r.A2));
    line("A1_second", fmt(r.A1_second));
    line("A0_second", fmt(r.A0_second));
    line("Ts_bar", fmt(r.Ts_bar));
    line("R_bar_statement", fmt(r.R_bar_statement));
    line("R_bar_recursion", fmt(r.R_bar_recursion));
    line("R_bar_mismatch", r.R_bar_mismatch ? "yes" : "no");

    json j;
    j["m"] = r.m;
    j["L"] = r.L;
    j["gamma"] = r.gamma;
    j["Ts"] = r.Ts;
    j["tau"] = r.tau;
    j["C0"] = r.C0;
    j["C1"] = r.C1;
    j["C2"] = r.C2;
    j["C3"] = r.C3;
    j["P"] = r.P;
    j["C"] = r.C;
    j["zeta"] = r.zeta;
    j["kappa"] = r.kappa;
    j["a1"] = r.a1;
    j["a0"] = r.a0;
    j["A1"] = r.A1;
    j["A0"] = r.A0;
    j["theorem1_satisfied"] = r.theorem1_satisfied;
    j["asymptotic_bound_linear"] = number_or_sentinel(r.asymptotic_bound_linear);
    j["a2"] = r.a2;
    j["a1_second"] = r.a1_second;
    j["a0_second"] = r.a0_second;
    j["A2"] = r.A2;
    j["A1_second"] = r.A1_second;
    j["A0_second"] = r.A0_second;
    j["Ts_bar"] = number_or_sentinel(r.Ts_bar);
    j["R_bar_statement"] = number_or_sentinel(r.R_bar_statement);
    j["R_bar_recursion"] = number_or_sentinel(r.R_bar_recursion);
    j["R_bar_mismatch"] = r.R_bar_mismatch;

    fs::create_directories(a.out_dir);
    write_text_file(a.out_dir + "/bounds.json", j.dump(2) + "\n");
    return 0;
}

}  // namespace tvfbe::cli

#include <CLI11.hpp>

namespace tvfbe::cli {

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Track the minimizer of a time-varying composite objective"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", axis_spec;
    Overrides ov;
    int ov_P = 0, ov_C = 0;
    double ov_Ts = 0.0, ov_alpha = 0.0;
    std::uint64_t ov_seed = 0;
    std::string ov_solver;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON experiment config")->required();
        cmd->add_option("--out", out_dir, "output directory")->required();
        cmd->add_option("--P", ov_P, "prediction iterations override");
        cmd->add_option("--C", ov_C, "correction iterations override");
        cmd->add_option("--Ts", ov_Ts, "sampling interval override");
        cmd->add_option("--alpha", ov_alpha, "elastic-net mixing override");
        cmd->add_option("--seed", ov_seed, "RNG seed override");
        cmd->add_option("--solver", ov_solver, "solver override: qn-ls | qn | grad");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "run one tracking experiment");
    add_common(run_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run one experiment per axis value");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--axis", axis_spec, "axis spec, e.g. P=0,1,3,5,10")->required();

    BoundsArgs ba;
    CLI::App* bounds_cmd = app.add_subcommand("bounds", "report tracking-error constants");
    bounds_cmd->add_option("--m", ba.m, "strong convexity modulus")->required();
    bounds_cmd->add_option("--L", ba.L, "gradient Lipschitz modulus")->required();
    bounds_cmd->add_option("--gamma", ba.gamma, "proximal step size")->required();
    bounds_cmd->add_option("--C0", ba.C0, "drift bound C0")->required();
    bounds_cmd->add_option("--C1", ba.C1, "drift bound C1");
    bounds_cmd->add_option("--C2", ba.C2, "drift bound C2");
    bounds_cmd->add_option("--C3", ba.C3, "drift bound C3");
    bounds_cmd->add_option("--P", ba.P, "prediction iterations");
    bounds_cmd->add_option("--C", ba.C, "correction iterations");
    bounds_cmd->add_option("--tau", ba.tau, "target contraction rate")->required();
    bounds_cmd->add_option("--Ts", ba.Ts, "sampling interval")->required();
    bounds_cmd->add_option("--out", ba.out_dir, "output directory for bounds.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message
        return 2;
    }

    auto collect_overrides = [&](const CLI::App* cmd) {
        if (cmd->count("--P")) ov.P = ov_P;
        if (cmd->count("--C")) ov.C = ov_C;
        if (cmd->count("--Ts")) ov.Ts = ov_Ts;
        if (cmd->count("--alpha")) ov.alpha = ov_alpha;
        if (cmd->count("--seed")) ov.seed = ov_seed;
        if (cmd->count("--solver")) ov.solver = ov_solver;
    };

    try {
        if (run_cmd->parsed()) {
            collect_overrides(run_cmd);
            ExperimentConfig cfg = parse_config(config_path);
            apply_overrides(cfg, ov);
            return cmd_run(cfg, out_dir);
        }
        if (sweep_cmd->parsed()) {
            collect_overrides(sweep_cmd);
            SweepAxis axis = parse_axis(axis_spec);
            ExperimentConfig cfg = parse_config(config_path);
            apply_overrides(cfg, ov);
            return cmd_sweep(cfg, axis, out_dir);
        }
        return cmd_bounds(ba, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tvfbe::cli
