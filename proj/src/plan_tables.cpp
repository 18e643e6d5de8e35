#include "trlife/plan_tables.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace trlife {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        const auto first = field.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            fields.emplace_back();
            continue;
        }
        const auto last = field.find_last_not_of(" \t\r");
        fields.push_back(field.substr(first, last - first + 1));
    }
    return fields;
}

double parse_number(const std::string& token, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("table csv: bad number '" + token + "' in " + context);
    }
}

// Half a unit in the last printed decimal place of a numeric token, so a
// reference is only held to the precision it states.
double printed_tolerance(const std::string& token) {
    const auto epos = token.find_first_of("eE");
    int exp10 = 0;
    std::string mantissa = token;
    if (epos != std::string::npos) {
        exp10 = std::stoi(token.substr(epos + 1));
        mantissa = token.substr(0, epos);
    }
    int decimals = 0;
    const auto dot = mantissa.find('.');
    if (dot != std::string::npos) decimals = static_cast<int>(mantissa.size() - dot - 1);
    return 0.5000001 * std::pow(10.0, exp10 - decimals);
}

bool near(double a, double b) { return std::fabs(a - b) <= 1e-9 * (1.0 + std::fabs(b)); }

}  // namespace

std::string format_number(double value, int precision) {
    std::ostringstream os;
    os << std::setprecision(precision) << value;
    return os.str();
}

std::string format_cell(double value, int which, int precision) {
    std::ostringstream os;
    if (which == 1) {
        os << static_cast<long>(std::llround(value));
    } else if (which == 3) {
        os << std::fixed << std::setprecision(2) << value;
    } else {
        os << std::setprecision(precision) << value;
    }
    return os.str();
}

PlanTable emit_table(int which, double lambda) {
    if (which < 1 || which > 4)
        throw std::invalid_argument("emit_table: table index must be in 1..4");

    PlanTable table;
    table.which = which;
    table.lambda = lambda;

    if (which == 1 || which == 3) {
        table.col_label = "t_ratio";
        table.col_grid.assign(kTRatioGrid.begin(), kTRatioGrid.end());
        for (const double p_star : kPStarGrid) {
            for (int c = 0; c <= kMaxAcceptanceNumber; ++c) {
                PlanTable::Row row;
                row.p_star = p_star;
                row.c = c;
                for (const double t_ratio : kTRatioGrid) {
                    const SamplingPlan plan =
                        min_sample_size(DesignQuery(p_star, c, t_ratio, lambda));
                    row.values.push_back(which == 1
                                             ? static_cast<double>(plan.n)
                                             : min_scale_ratio(plan, lambda, kFixedProducerRisk));
                }
                table.rows.push_back(std::move(row));
            }
        }
    } else {
        table.col_label = "scale_ratio";
        table.col_grid.assign(kScaleRatioGrid.begin(), kScaleRatioGrid.end());
        for (const double p_star : kPStarGrid) {
            for (const double t_ratio : kTRatioGrid) {
                const SamplingPlan plan = min_sample_size(
                    DesignQuery(p_star, kFixedAcceptanceNumber, t_ratio, lambda));
                PlanTable::Row row;
                row.p_star = p_star;
                row.c = plan.c;
                row.n = plan.n;
                row.t_ratio = t_ratio;
                for (const double ratio : kScaleRatioGrid)
                    row.values.push_back(which == 2 ? oc_value(plan, ratio, lambda)
                                                    : producer_risk(plan, ratio, lambda));
                table.rows.push_back(std::move(row));
            }
        }
    }
    return table;
}

void write_csv(const PlanTable& table, std::ostream& out, int precision) {
    const bool by_c = table.which == 1 || table.which == 3;
    out << (by_c ? "p_star,c" : "p_star,n,t_ratio");
    for (const double col : table.col_grid) out << ',' << format_number(col);
    out << '\n';
    for (const auto& row : table.rows) {
        out << format_number(row.p_star);
        if (by_c)
            out << ',' << row.c;
        else
            out << ',' << row.n << ',' << format_number(row.t_ratio);
        for (const double v : row.values) out << ',' << format_cell(v, table.which, precision);
        out << '\n';
    }
}

void write_json(const PlanTable& table, std::ostream& out) {
    nlohmann::json doc;
    doc["table"] = table.which;
    doc["lambda"] = table.lambda;
    if (table.which == 3) doc["delta"] = kFixedProducerRisk;
    if (table.which == 2 || table.which == 4) doc["c"] = kFixedAcceptanceNumber;
    doc["col_label"] = table.col_label;
    doc["col_grid"] = table.col_grid;

    nlohmann::json by_p_star = nlohmann::json::object();
    for (const auto& row : table.rows) {
        const std::string p_key = format_number(row.p_star);
        if (table.which == 1 || table.which == 3) {
            if (table.which == 1) {
                std::vector<long> ints;
                for (const double v : row.values) ints.push_back(std::llround(v));
                by_p_star[p_key][std::to_string(row.c)] = ints;
            } else {
                by_p_star[p_key][std::to_string(row.c)] = row.values;
            }
        } else {
            nlohmann::json entry;
            entry["n"] = row.n;
            entry["values"] = row.values;
            by_p_star[p_key][format_number(row.t_ratio)] = entry;
        }
    }
    doc["by_p_star"] = by_p_star;
    out << doc.dump(2) << '\n';
}

std::vector<CellDiff> compare_table_csv(const PlanTable& computed, std::istream& reference) {
    const bool by_c = computed.which == 1 || computed.which == 3;
    std::string line;
    std::vector<std::string> header;
    while (std::getline(reference, line)) {
        if (line.empty() || line[0] == '#') continue;
        header = split_csv_line(line);
        break;
    }
    const std::size_t key_fields = by_c ? 2 : 3;
    if (header.size() != key_fields + computed.col_grid.size())
        throw std::runtime_error("table csv: header has " + std::to_string(header.size()) +
                                 " fields, expected " +
                                 std::to_string(key_fields + computed.col_grid.size()));
    for (std::size_t i = 0; i < computed.col_grid.size(); ++i) {
        const double col = parse_number(header[key_fields + i], "header");
        if (!near(col, computed.col_grid[i]))
            throw std::runtime_error("table csv: column grid mismatch at '" +
                                     header[key_fields + i] + "'");
    }

    std::vector<CellDiff> diffs;
    std::size_t matched_rows = 0;
    int lineno = 1;
    while (std::getline(reference, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error("table csv line " + std::to_string(lineno) +
                                     ": expected " + std::to_string(header.size()) +
                                     " fields, found " + std::to_string(fields.size()));
        const double p_star = parse_number(fields[0], "row key");
        const double row_c = by_c ? parse_number(fields[1], "row key") : -1.0;
        const double row_n = by_c ? -1.0 : parse_number(fields[1], "row key");
        const double row_t = by_c ? -1.0 : parse_number(fields[2], "row key");

        const PlanTable::Row* match = nullptr;
        for (const auto& row : computed.rows) {
            if (!near(p_star, row.p_star)) continue;
            if (by_c ? row.c == static_cast<int>(std::llround(row_c))
                     : near(row_t, row.t_ratio)) {
                match = &row;
                break;
            }
        }
        std::ostringstream key;
        key << "p_star=" << format_number(p_star);
        if (by_c)
            key << " c=" << static_cast<int>(std::llround(row_c));
        else
            key << " t_ratio=" << format_number(row_t);
        if (match == nullptr)
            throw std::runtime_error("table csv line " + std::to_string(lineno) +
                                     ": no computed row matches " + key.str());
        ++matched_rows;

        if (!by_c && static_cast<int>(std::llround(row_n)) != match->n)
            diffs.push_back(CellDiff{key.str(), "n", row_n,
                                     static_cast<double>(match->n), 0.5});
        for (std::size_t i = 0; i < computed.col_grid.size(); ++i) {
            const std::string& token = fields[key_fields + i];
            const double ref = parse_number(token, "cell");
            const double tol = printed_tolerance(token);
            if (std::fabs(ref - match->values[i]) > tol)
                diffs.push_back(CellDiff{key.str(), format_number(computed.col_grid[i]), ref,
                                         match->values[i], tol});
        }
    }
    if (matched_rows != computed.rows.size())
        throw std::runtime_error("table csv: reference has " + std::to_string(matched_rows) +
                                 " rows, computed table has " +
                                 std::to_string(computed.rows.size()));
    return diffs;
}

}  // namespace trlife
