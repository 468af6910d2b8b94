#include "sfqgate/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <thread>

namespace sfq {

namespace {

void check_keys(const Json& j, const std::string& pointer, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw UsageError("config: " + (pointer.empty() ? std::string("/") : pointer) + ": expected an object");
    const std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) throw UsageError("config: " + pointer + "/" + item.key() + ": unknown field");
    }
}

template <class T>
void read_field(const Json& j, const char* key, const std::string& pointer, T& target) {
    if (!j.contains(key)) return;
    const Json& v = j.at(key);
    const std::string field = pointer + "/" + key;
    if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw UsageError("config: " + field + ": expected a string");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw UsageError("config: " + field + ": expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_integer() && !v.is_number_unsigned()) throw UsageError("config: " + field + ": must be non-negative");
        }
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw UsageError("config: " + field + ": expected a number");
    } else {
        if (!v.is_array()) throw UsageError("config: " + field + ": expected an array");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw UsageError("config: " + field + "/" + std::to_string(i) + ": expected a number");
        }
    }
    target = v.get<T>();
}

void read_range(const Json& j, const char* key, const std::string& pointer, int& lo, int& hi) {
    if (!j.contains(key)) return;
    const Json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
        throw UsageError("config: " + pointer + "/" + key + ": expected [min, max] integers");
    }
    lo = v[0].get<int>();
    hi = v[1].get<int>();
}

template <class Fn>
void as_usage(const std::string& field, Fn&& fn) {
    try {
        fn();
    } catch (const DomainError& e) {
        throw UsageError("config: " + field + ": " + e.what());
    }
}

void write_table(const RunConfig& config, const std::string& stem, const Table& table) {
    const std::filesystem::path dir(config.out_dir);
    if (config.format == "json") {
        write_text_file((dir / (stem + ".json")).string(), table.to_json().dump(2) + "\n");
    } else {
        write_text_file((dir / (stem + ".csv")).string(), table.to_csv());
    }
}

void write_json(const RunConfig& config, const std::string& name, const Json& j) {
    write_text_file((std::filesystem::path(config.out_dir) / name).string(), j.dump(2) + "\n");
}

std::string cell_status(const SnappedCell& cell) {
    return cell.ramp ? "ok" : std::string(to_string(*cell.discarded));
}

ScheduleDocument document_for(const Schedule& s, const GateSpec& spec, double period, std::optional<SnappedRamp> snapped,
                              double infidelity) {
    ScheduleDocument doc;
    doc.schedule = s;
    doc.theta_targ = spec.theta_targ;
    doc.snapped = std::move(snapped);
    doc.infidelity = infidelity;
    doc.period_ns = period;
    return doc;
}

std::vector<std::string> per_clock_columns(const std::vector<int>& clocks) {
    std::vector<std::string> cols;
    for (int m : clocks) {
        const std::string p = "snapped_" + std::to_string(m) + "_";
        cols.push_back(p + "status");
        cols.push_back(p + "n_train");
        cols.push_back(p + "infidelity");
    }
    return cols;
}

std::vector<std::string> with_prefix(const std::string& prefix, const std::vector<std::string>& cols) {
    std::vector<std::string> out;
    for (const auto& c : cols) out.push_back(prefix + c);
    return out;
}

void append(std::vector<std::string>& a, const std::vector<std::string>& b) { a.insert(a.end(), b.begin(), b.end()); }

} // namespace

void RunConfig::validate() const {
    as_usage("/circuit", [&] { circuit.validate(); });
    as_usage("/gate", [&] { gate.validate(); });
    if (!(t1_us > 0.0)) throw UsageError("config: /coherence/t1_us: must be positive");
    if (!(t2_us > 0.0) || t2_us > 2.0 * t1_us) throw UsageError("config: /coherence/t2_us: must lie in (0, 2 T1]");
    if (n_train_max && *n_train_max < 1) throw UsageError("config: /encoding/n_train_max: must be positive");
    if (sweep_kind != "kick" && sweep_kind != "target") throw UsageError("config: /sweep/kind: expected kick or target");
    if (format != "csv" && format != "json") throw UsageError("config: /output/format: expected csv or json");
    if (trial_budget < 0) throw UsageError("config: /trial_budget: must be non-negative");
    if (threads < 0) throw UsageError("config: /threads: must be non-negative");
}

CoherenceRates RunConfig::rates() const { return CoherenceRates::from_times(t1_us * 1e3, t2_us * 1e3); }

OptimizerSettings RunConfig::settings() const {
    OptimizerSettings s;
    s.trial_budget = trial_budget;
    s.seed = seed;
    s.threads = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return s;
}

EncodingParams RunConfig::encoding(int clock_multiple) const {
    EncodingParams p = EncodingParams::defaults_for(gate.coupling);
    p.n_max = gate.n_max;
    p.r_max = gate.r_max;
    p.clock_multiple = clock_multiple;
    if (n_train_max) p.n_train_max = *n_train_max;
    return p;
}

RunConfig config_from_json(const Json& j) {
    RunConfig c;
    check_keys(j, "", {"circuit", "coherence", "gate", "encoding", "sweep", "output", "seed", "trial_budget", "threads"});
    if (j.contains("circuit")) {
        const Json& s = j.at("circuit");
        check_keys(s, "/circuit", {"e_j", "e_c", "e_l", "phi_ext", "n_fock", "n_levels"});
        read_field(s, "e_j", "/circuit", c.circuit.e_j);
        read_field(s, "e_c", "/circuit", c.circuit.e_c);
        read_field(s, "e_l", "/circuit", c.circuit.e_l);
        read_field(s, "phi_ext", "/circuit", c.circuit.phi_ext);
        read_field(s, "n_fock", "/circuit", c.circuit.n_fock);
        read_field(s, "n_levels", "/circuit", c.circuit.n_levels);
    }
    if (j.contains("coherence")) {
        const Json& s = j.at("coherence");
        check_keys(s, "/coherence", {"t1_us", "t2_us"});
        read_field(s, "t1_us", "/coherence", c.t1_us);
        read_field(s, "t2_us", "/coherence", c.t2_us);
    }
    std::optional<double> theta_kick;
    if (j.contains("gate")) {
        const Json& s = j.at("gate");
        check_keys(s, "/gate", {"coupling", "theta_kick", "theta_targ", "clocks", "n_range", "r_range"});
        std::string coupling = std::string(to_string(c.gate.coupling));
        read_field(s, "coupling", "/gate", coupling);
        as_usage("/gate/coupling", [&] { c.gate.coupling = parse_coupling(coupling); });
        if (s.contains("theta_kick")) {
            double v = 0.0;
            read_field(s, "theta_kick", "/gate", v);
            theta_kick = v;
        }
        read_field(s, "theta_targ", "/gate", c.gate.theta_targ);
        if (s.contains("clocks")) {
            const Json& v = s.at("clocks");
            if (!v.is_array()) throw UsageError("config: /gate/clocks: expected an array");
            c.gate.clock_multiples.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number_integer()) throw UsageError("config: /gate/clocks/" + std::to_string(i) + ": expected an integer");
                c.gate.clock_multiples.push_back(v[i].get<int>());
            }
        }
        read_range(s, "n_range", "/gate", c.gate.n_min, c.gate.n_max);
        read_range(s, "r_range", "/gate", c.gate.r_min, c.gate.r_max);
    }
    c.gate.theta_kick = theta_kick.value_or(GateSpec::defaults_for(c.gate.coupling).theta_kick);
    if (j.contains("encoding")) {
        const Json& s = j.at("encoding");
        check_keys(s, "/encoding", {"n_train_max"});
        if (s.contains("n_train_max")) {
            int v = 0;
            read_field(s, "n_train_max", "/encoding", v);
            c.n_train_max = v;
        }
    }
    if (j.contains("sweep")) {
        const Json& s = j.at("sweep");
        check_keys(s, "/sweep", {"kind", "values"});
        read_field(s, "kind", "/sweep", c.sweep_kind);
        read_field(s, "values", "/sweep", c.sweep_values);
    }
    if (j.contains("output")) {
        const Json& s = j.at("output");
        check_keys(s, "/output", {"dir", "format"});
        read_field(s, "dir", "/output", c.out_dir);
        read_field(s, "format", "/output", c.format);
    }
    read_field(j, "seed", "", c.seed);
    read_field(j, "trial_budget", "", c.trial_budget);
    read_field(j, "threads", "", c.threads);
    return c;
}

RunConfig load_config(const std::optional<std::string>& path, const ConfigOverrides& overrides) {
    Json j = Json::object();
    if (path) {
        std::ifstream in(*path);
        if (!in) throw UsageError("config: cannot open " + *path);
        try {
            j = Json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw UsageError("config: " + *path + ": byte " + std::to_string(e.byte) + ": malformed JSON");
        }
    }
    if (overrides.coupling) {
        if (!j.contains("gate")) j["gate"] = Json::object();
        j["gate"]["coupling"] = *overrides.coupling;
    }
    RunConfig c = config_from_json(j);
    if (overrides.theta_kick) c.gate.theta_kick = *overrides.theta_kick;
    if (overrides.theta_targ) c.gate.theta_targ = *overrides.theta_targ;
    if (!overrides.clocks.empty()) c.gate.clock_multiples = overrides.clocks;
    if (overrides.out_dir) c.out_dir = *overrides.out_dir;
    if (overrides.format) c.format = *overrides.format;
    if (overrides.seed) c.seed = *overrides.seed;
    if (overrides.trials) c.trial_budget = *overrides.trials;
    if (!overrides.values.empty()) c.sweep_values = overrides.values;
    c.validate();
    return c;
}

int cmd_model_info(const RunConfig& config, std::ostream& out) {
    const QubitModel model = diagonalize_model(config.circuit);
    const double n01 = std::abs(matrix_element(model, Operator::charge, 0, 1));
    Json j;
    j["omega01_ghz"] = model.omega01() / (2.0 * std::numbers::pi);
    if (model.n_levels() > 2) j["omega12_ghz"] = (model.omegas(2) - model.omegas(1)) / (2.0 * std::numbers::pi);
    Json levels = Json::array();
    for (int k = 0; k < model.n_levels(); ++k) levels.push_back(model.omegas(k) / (2.0 * std::numbers::pi));
    j["levels_ghz"] = levels;
    j["period_ns"] = model.period;
    j["abs_phi01"] = std::abs(matrix_element(model, Operator::phase, 0, 1));
    j["abs_n01"] = n01;
    if (model.n_levels() > 3) j["n03_over_n01"] = std::abs(matrix_element(model, Operator::charge, 0, 3)) / n01;
    j["fock_convergence"] = model.convergence_warning ? *model.convergence_warning : std::string("ok");
    if (config.circuit.e_j == 0.0) {
        // Harmonic limit: levels spaced by sqrt(8 E_C E_L).
        const double spacing = std::sqrt(8.0 * config.circuit.e_c * config.circuit.e_l);
        double worst = 0.0;
        for (int k = 1; k < model.n_levels(); ++k) {
            const double step = (model.omegas(k) - model.omegas(k - 1)) / (2.0 * std::numbers::pi);
            worst = std::max(worst, std::abs(step - spacing) / spacing);
        }
        j["harmonic_spacing_ghz"] = spacing;
        j["harmonic_max_relative_deviation"] = worst;
    }

    if (config.format == "json") {
        out << j.dump(2) << "\n";
    } else {
        for (const auto& item : j.items()) {
            out << item.key() << ": ";
            if (item.value().is_array()) {
                for (std::size_t k = 0; k < item.value().size(); ++k) out << (k ? " " : "") << format_real(item.value()[k].get<double>());
            } else if (item.value().is_string()) {
                out << item.value().get<std::string>();
            } else {
                out << format_real(item.value().get<double>());
            }
            out << "\n";
        }
    }
    return 0;
}

int cmd_optimize(const RunConfig& config, std::ostream& out) {
    const QubitModel model = diagonalize_model(config.circuit);
    const GateSpec& spec = config.gate;
    std::filesystem::create_directories(config.out_dir);
    const GateResult result = optimize_gate(spec, model, config.settings());

    std::vector<std::string> cols{"n_pulses", "r_periods", "failed", "trials", "n_train", "infidelity_continuous"};
    append(cols, per_clock_columns(spec.clock_multiples));
    Table cells(cols);
    for (const auto& cell : result.cells) {
        std::vector<std::string> row{std::to_string(cell.n_pulses), std::to_string(cell.r_periods), cell.failed ? "1" : "0",
                                     std::to_string(cell.trials)};
        row.push_back(cell.failed ? "" : std::to_string(cell.n_train));
        row.push_back(cell.failed ? "" : format_real(cell.infidelity_continuous));
        for (int m : spec.clock_multiples) {
            const auto it = cell.snapped.find(m);
            if (it == cell.snapped.end()) {
                append(row, {"failed", "", ""});
            } else if (!it->second.ramp) {
                append(row, {cell_status(it->second), "", ""});
            } else {
                append(row, {"ok", std::to_string(it->second.n_train), format_real(it->second.infidelity)});
            }
        }
        cells.add_row(std::move(row));
    }
    write_table(config, "cells", cells);

    if (result.best_continuous < 0) {
        out << "every optimizer cell failed\n";
        return 2;
    }

    std::vector<std::string> best_cols{"label", "clock_multiple", "n_pulses", "r_periods", "n_train", "infidelity"};
    append(best_cols, budget_columns());
    append(best_cols, {"encoded_hex", "ramp_bits", "train_bits", "ramplen_bits", "total_bits", "encoding_status"});
    Table best(best_cols);
    const auto rates = config.rates();

    const auto& cont = result.cells[static_cast<std::size_t>(result.best_continuous)];
    {
        const Schedule s = *schedule_from(cont, spec, model.period, 0);
        write_json(config, "best_continuous.json", to_json(document_for(s, spec, model.period, std::nullopt, cont.infidelity_continuous)));
        std::vector<std::string> row{"continuous", "", std::to_string(cont.n_pulses), std::to_string(cont.r_periods),
                                     std::to_string(cont.n_train), format_real(cont.infidelity_continuous)};
        append(row, budget_cells(full_error_budget(model, s, spec.theta_targ, rates)));
        append(row, {"", "", "", "", "", "not snapped"});
        best.add_row(std::move(row));
        out << "best continuous: n=" << cont.n_pulses << " r=" << cont.r_periods << " n_train=" << cont.n_train
            << " infidelity=" << format_real(cont.infidelity_continuous) << "\n";
    }
    for (int m : spec.clock_multiples) {
        const auto it = result.best_snapped.find(m);
        if (it == result.best_snapped.end()) {
            out << "clock " << m << "x: every cell discarded\n";
            continue;
        }
        const auto& cell = result.cells[static_cast<std::size_t>(it->second)];
        const auto& snapped = cell.snapped.at(m);
        const Schedule s = *schedule_from(cell, spec, model.period, m);
        write_json(config, "best_snapped_" + std::to_string(m) + ".json",
                   to_json(document_for(s, spec, model.period, snapped.ramp, snapped.infidelity)));
        std::vector<std::string> row{"snapped", std::to_string(m), std::to_string(cell.n_pulses), std::to_string(cell.r_periods),
                                     std::to_string(snapped.n_train), format_real(snapped.infidelity)};
        append(row, budget_cells(full_error_budget(model, s, spec.theta_targ, rates)));
        try {
            const auto e = encode(snapped.ramp->ticks, cell.r_periods, snapped.n_train, config.encoding(m));
            append(row, {e.to_hex(), std::to_string(e.layout.ramp_bits), std::to_string(e.layout.train_bits),
                         std::to_string(e.layout.ramplen_bits), std::to_string(e.layout.total()), "ok"});
        } catch (const DomainError& e) {
            append(row, {"", "", "", "", "", e.what()});
        }
        best.add_row(std::move(row));
        out << "best snapped " << m << "x: n=" << cell.n_pulses << " r=" << cell.r_periods << " n_train=" << snapped.n_train
            << " infidelity=" << format_real(snapped.infidelity) << "\n";
    }
    write_table(config, "best", best);
    return 0;
}

int cmd_sweep(const RunConfig& config, const std::string& which, std::ostream& out) {
    if (which != "kick" && which != "target") throw UsageError("sweep: expected kick or target, got '" + which + "'");
    if (config.sweep_values.empty()) throw UsageError("sweep: no sweep values (use --values or /sweep/values)");
    const QubitModel model = diagonalize_model(config.circuit);
    std::filesystem::create_directories(config.out_dir);
    const auto settings = config.settings();
    std::vector<std::string> snapped_cols;
    for (int m : config.gate.clock_multiples) snapped_cols.push_back("snapped_" + std::to_string(m) + "_infidelity");

    if (which == "kick") {
        GateSpec spec = config.gate;
        spec.theta_targ = std::numbers::pi;
        std::vector<std::string> cols{"theta_kick", "best_continuous", "n_pulses", "r_periods", "n_train"};
        append(cols, snapped_cols);
        Table table(cols);
        for (const auto& row : sweep_kick_angle(spec, config.sweep_values, model, settings)) {
            std::vector<std::string> cells{format_real(row.theta_kick), format_real(row.best_continuous), std::to_string(row.n_pulses),
                                           std::to_string(row.r_periods), std::to_string(row.n_train)};
            for (int m : spec.clock_multiples) cells.push_back(format_real(row.best_snapped.at(m)));
            table.add_row(std::move(cells));
        }
        write_table(config, "sweep_kick", table);
        out << "wrote " << table.size() << " kick-angle rows\n";
        return 0;
    }

    std::vector<std::string> cols{"theta_targ", "best_continuous", "n_pulses", "r_periods", "n_train"};
    append(cols, snapped_cols);
    append(cols, with_prefix("no_ramp_", budget_columns()));
    append(cols, with_prefix("ramp_r1_", budget_columns()));
    append(cols, with_prefix("ramp_r5_", budget_columns()));
    Table table(cols);
    const auto rows = sweep_target_angle(config.gate, config.sweep_values, model, settings, config.rates());
    const std::vector<std::string> blank(budget_columns().size());
    for (const auto& row : rows) {
        std::vector<std::string> cells{format_real(row.theta_targ), format_real(row.best_continuous), std::to_string(row.n_pulses),
                                       std::to_string(row.r_periods), std::to_string(row.n_train)};
        for (int m : config.gate.clock_multiples) cells.push_back(format_real(row.best_snapped.at(m)));
        append(cells, budget_cells(row.no_ramp));
        append(cells, row.ramp_r1 ? budget_cells(*row.ramp_r1) : blank);
        append(cells, row.ramp_r5 ? budget_cells(*row.ramp_r5) : blank);
        table.add_row(std::move(cells));
    }
    write_table(config, "sweep_target", table);
    out << "wrote " << table.size() << " target-angle rows\n";
    return 0;
}

int cmd_budget(const RunConfig& config, const std::string& schedule_path, std::ostream& out) {
    const ScheduleDocument doc = read_schedule_file(schedule_path);
    const QubitModel model = diagonalize_model(config.circuit);
    if (std::abs(doc.period_ns - model.period) > 1e-9 * model.period) {
        throw UsageError(schedule_path + ": /period_ns: schedule was made for a different circuit (period " +
                         format_real(doc.period_ns) + " ns, configured circuit " + format_real(model.period) + " ns)");
    }
    const ErrorBudget b = full_error_budget(model, doc.schedule, doc.theta_targ, config.rates());
    Json j = to_json(b);
    j["recorded_infidelity"] = doc.infidelity;
    if (config.format == "json") {
        out << j.dump(2) << "\n";
    } else {
        for (const auto& item : j.items()) {
            out << item.key() << ": " << (item.value().is_null() ? std::string("") : format_real(item.value().get<double>())) << "\n";
        }
    }
    return 0;
}

int cmd_encode(const RunConfig& config, const std::string& schedule_path, std::ostream& out) {
    const ScheduleDocument doc = read_schedule_file(schedule_path);
    if (!doc.snapped) {
        throw UsageError(schedule_path + ": schedule is not snapped to a clock; encode a best_snapped_<clock>.json file from optimize");
    }
    const auto e = encode(doc.snapped->ticks, doc.snapped->r_periods, doc.schedule.n_train, config.encoding(doc.snapped->multiple));
    const Json j = to_json(e);
    if (config.format == "json") {
        out << j.dump(2) << "\n";
    } else {
        for (const auto& item : j.items()) {
            out << item.key() << ": "
                << (item.value().is_string() ? item.value().get<std::string>() : std::to_string(item.value().get<int>())) << "\n";
        }
    }
    return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synthesize, optimize, evaluate and encode SFQ gate schedules for a fluxonium qubit", "sfqgate"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    ConfigOverrides ov;
    std::string schedule_path;
    std::string sweep_which;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration document");
        sub->add_option("--coupling", ov.coupling, "inductive or capacitive");
        sub->add_option("--theta-kick", ov.theta_kick, "Kick angle (rad)");
        sub->add_option("--theta-targ", ov.theta_targ, "Target rotation angle (rad)");
        sub->add_option("--clock", ov.clocks, "Clock multiple (repeatable)");
        sub->add_option("--out", ov.out_dir, "Output directory");
        sub->add_option("--format", ov.format, "csv or json");
        sub->add_option("--seed", ov.seed, "Seed for trial subsampling");
        sub->add_option("--trials", ov.trials, "BFGS starts per ensemble (0 = all)");
    };

    auto* info = app.add_subcommand("model-info", "Spectrum and matrix elements of the qubit model");
    auto* optimize = app.add_subcommand("optimize", "Optimize ramps over every (N, R) and write the results");
    auto* sweep = app.add_subcommand("sweep", "Sweep the kick or target angle");
    auto* budget = app.add_subcommand("budget", "Error budget of a schedule file");
    auto* encode_cmd = app.add_subcommand("encode", "Encode a snapped schedule file");
    for (auto* sub : {info, optimize, sweep, budget, encode_cmd}) add_common(sub);
    sweep->add_option("which", sweep_which, "kick or target")->required();
    sweep->add_option("--values", ov.values, "Swept angles (rad)");
    budget->add_option("schedule", schedule_path, "Schedule JSON file")->required();
    encode_cmd->add_option("schedule", schedule_path, "Schedule JSON file")->required();

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        const RunConfig config = load_config(config_path, ov);
        if (info->parsed()) return cmd_model_info(config, out);
        if (optimize->parsed()) return cmd_optimize(config, out);
        if (sweep->parsed()) return cmd_sweep(config, sweep_which, out);
        if (budget->parsed()) return cmd_budget(config, schedule_path, out);
        return cmd_encode(config, schedule_path, out);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

} // namespace sfq
