// io.hpp: Schedule documents and result tables (CSV / JSON).

#pragma once

#include "sfqgate/closed_dynamics.hpp"
#include "sfqgate/encoding.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sfq {

using Json = nlohmann::ordered_json;

// Malformed input file; the message names the file and the offending location.
class ParseError : public DomainError {
public:
    using DomainError::DomainError;
};

// Round-trip decimal form ("%.17g"); the output is byte-stable across runs.
std::string format_real(double x);

// A schedule as written by the optimizer. Snapped schedules carry their clock and ticks,
// continuous ones the raw times.
struct ScheduleDocument {
    Schedule schedule;
    double theta_targ = 0.0;
    std::optional<SnappedRamp> snapped;
    double infidelity = 1.0;
    double period_ns = 0.0;
};

Json to_json(const ScheduleDocument& doc);

// Builds the schedule using the document's own period; `source` prefixes error messages.
ScheduleDocument schedule_document_from_json(const Json& j, const std::string& source);

ScheduleDocument read_schedule_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Budget columns in the order of the ErrorBudget fields; missing open-system values stay empty.
std::vector<std::string> budget_columns();
std::vector<std::string> budget_cells(const ErrorBudget& b);
Json to_json(const ErrorBudget& b);

Json to_json(const EncodedSchedule& e);

// Column-stable result table rendered as CSV or as a JSON array of row objects.
class Table {
public:
    explicit Table(std::vector<std::string> columns);

    void add_row(std::vector<std::string> cells);
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t size() const { return rows_.size(); }

    std::string to_csv() const;
    // Numeric-looking cells become JSON numbers, empty cells null, the rest strings.
    Json to_json() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace sfq
