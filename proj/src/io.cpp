#include "sfqgate/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sfq {

namespace {

std::string where(const std::string& source, const std::string& pointer) {
    return source + ": " + (pointer.empty() ? "/" : pointer) + ": ";
}

const Json& require(const Json& j, const char* key, const std::string& source) {
    if (!j.contains(key)) throw ParseError(where(source, std::string("/") + key) + "missing field");
    return j.at(key);
}

double read_real(const Json& j, const char* key, const std::string& source) {
    const Json& v = require(j, key, source);
    if (!v.is_number()) throw ParseError(where(source, std::string("/") + key) + "expected a number");
    return v.get<double>();
}

int read_int(const Json& j, const char* key, const std::string& source) {
    const Json& v = require(j, key, source);
    if (!v.is_number_integer()) throw ParseError(where(source, std::string("/") + key) + "expected an integer");
    return v.get<int>();
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json to_json(const ScheduleDocument& doc) {
    Json j;
    j["coupling"] = std::string(to_string(doc.schedule.coupling));
    j["theta_kick"] = doc.schedule.theta_kick;
    j["theta_targ"] = doc.theta_targ;
    j["period_ns"] = doc.period_ns;
    j["r_periods"] = doc.schedule.ramp.r_periods;
    j["n_train"] = doc.schedule.n_train;
    if (doc.snapped) {
        j["clock_multiple"] = doc.snapped->multiple;
        j["ticks"] = doc.snapped->ticks;
    } else {
        j["times_ns"] = doc.schedule.ramp.times;
    }
    j["infidelity"] = doc.infidelity;
    return j;
}

ScheduleDocument schedule_document_from_json(const Json& j, const std::string& source) {
    if (!j.is_object()) throw ParseError(where(source, "") + "expected a JSON object");
    ScheduleDocument doc;
    const Json& coupling = require(j, "coupling", source);
    if (!coupling.is_string()) throw ParseError(where(source, "/coupling") + "expected a string");
    try {
        doc.schedule.coupling = parse_coupling(coupling.get<std::string>());
    } catch (const DomainError& e) {
        throw ParseError(where(source, "/coupling") + e.what());
    }
    doc.schedule.theta_kick = read_real(j, "theta_kick", source);
    doc.theta_targ = read_real(j, "theta_targ", source);
    doc.period_ns = read_real(j, "period_ns", source);
    if (!(doc.period_ns > 0.0)) throw ParseError(where(source, "/period_ns") + "must be positive");
    const int r = read_int(j, "r_periods", source);
    doc.schedule.n_train = read_int(j, "n_train", source);
    doc.infidelity = read_real(j, "infidelity", source);

    const bool has_ticks = j.contains("ticks");
    const bool has_times = j.contains("times_ns");
    if (has_ticks == has_times) throw ParseError(where(source, "") + "exactly one of ticks and times_ns must be present");

    try {
        if (has_ticks) {
            SnappedRamp snapped;
            snapped.r_periods = r;
            snapped.multiple = read_int(j, "clock_multiple", source);
            if (snapped.multiple < 1) throw ParseError(where(source, "/clock_multiple") + "must be positive");
            const Json& ticks = j.at("ticks");
            if (!ticks.is_array()) throw ParseError(where(source, "/ticks") + "expected an array");
            for (std::size_t i = 0; i < ticks.size(); ++i) {
                const std::string ptr = "/ticks/" + std::to_string(i);
                if (!ticks[i].is_number_integer()) throw ParseError(where(source, ptr) + "expected an integer");
                const int t = ticks[i].get<int>();
                if (t < 0 || t >= snapped.multiple * r) throw ParseError(where(source, ptr) + "tick outside the ramp");
                if (!snapped.ticks.empty() && t <= snapped.ticks.back()) {
                    throw ParseError(where(source, ptr) + "ticks must be strictly ascending");
                }
                snapped.ticks.push_back(t);
            }
            doc.schedule.ramp = snapped.to_ramp(doc.period_ns);
            doc.snapped = snapped;
        } else {
            const Json& times = j.at("times_ns");
            if (!times.is_array()) throw ParseError(where(source, "/times_ns") + "expected an array");
            std::vector<double> values;
            for (std::size_t i = 0; i < times.size(); ++i) {
                if (!times[i].is_number()) throw ParseError(where(source, "/times_ns/" + std::to_string(i)) + "expected a number");
                values.push_back(times[i].get<double>());
            }
            doc.schedule.ramp = Ramp::make(r, std::move(values), doc.period_ns);
        }
        doc.schedule.validate(doc.period_ns);
    } catch (const ParseError&) {
        throw;
    } catch (const DomainError& e) {
        throw ParseError(where(source, "") + e.what());
    }
    return doc;
}

ScheduleDocument read_schedule_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": byte " + std::to_string(e.byte) + ": malformed JSON (" + e.what() + ")");
    }
    return schedule_document_from_json(j, path);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError(path + ": cannot open for writing");
    out << text;
    if (!out) throw DomainError(path + ": write failed");
}

std::vector<std::string> budget_columns() {
    return {"infidelity_closed", "leakage", "phase_error", "discretization_error", "unaccounted", "infidelity_open", "incoherent"};
}

std::vector<std::string> budget_cells(const ErrorBudget& b) {
    return {format_real(b.infidelity_closed),
            format_real(b.leakage),
            format_real(b.phase_error),
            format_real(b.discretization_error),
            format_real(b.unaccounted),
            b.infidelity_open ? format_real(*b.infidelity_open) : "",
            b.incoherent ? format_real(*b.incoherent) : ""};
}

Json to_json(const ErrorBudget& b) {
    Json j;
    j["infidelity_closed"] = b.infidelity_closed;
    j["leakage"] = b.leakage;
    j["phase_error"] = b.phase_error;
    j["discretization_error"] = b.discretization_error;
    j["unaccounted"] = b.unaccounted;
    j["infidelity_open"] = b.infidelity_open ? Json(*b.infidelity_open) : Json(nullptr);
    j["incoherent"] = b.incoherent ? Json(*b.incoherent) : Json(nullptr);
    return j;
}

Json to_json(const EncodedSchedule& e) {
    Json j;
    j["hex"] = e.to_hex();
    j["ramp_bits"] = e.layout.ramp_bits;
    j["train_bits"] = e.layout.train_bits;
    j["ramplen_bits"] = e.layout.ramplen_bits;
    j["total_bits"] = e.layout.total();
    j["n_max"] = e.params.n_max;
    j["r_max"] = e.params.r_max;
    j["clock_multiple"] = e.params.clock_multiple;
    j["n_train_max"] = e.params.n_train_max;
    return j;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) {
        throw DomainError("Table: row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(cells));
}

std::string Table::to_csv() const {
    std::ostringstream os;
    auto line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
        os << '\n';
    };
    line(columns_);
    for (const auto& row : rows_) line(row);
    return os.str();
}

Json Table::to_json() const {
    Json rows = Json::array();
    for (const auto& row : rows_) {
        Json obj;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            const std::string& cell = row[i];
            Json value = cell;
            if (cell.empty()) {
                value = nullptr;
            } else {
                const Json parsed = Json::parse(cell, nullptr, false);
                if (parsed.is_number()) value = parsed;
            }
            obj[columns_[i]] = std::move(value);
        }
        rows.push_back(std::move(obj));
    }
    return rows;
}

} // namespace sfq
