#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "trlife/sampling_plan.hpp"

namespace trlife {

// Grids spanned by the bundled reference tables.
inline constexpr std::array<double, 4> kPStarGrid{0.75, 0.90, 0.95, 0.99};
inline constexpr std::array<double, 8> kTRatioGrid{0.628, 0.942, 1.257, 1.571,
                                                   2.356, 3.141, 3.927, 4.712};
inline constexpr std::array<double, 6> kScaleRatioGrid{2.0, 4.0, 6.0, 8.0, 10.0, 12.0};
inline constexpr int kMaxAcceptanceNumber = 10;
inline constexpr int kFixedAcceptanceNumber = 2;    // tables 2 and 4
inline constexpr double kFixedProducerRisk = 0.05;  // table 3

// A fully evaluated design table.
//   1: minimum sample size         (rows p_star x c, columns t_ratio)
//   2: OC values at c = 2          (rows p_star x t_ratio, columns scale_ratio)
//   3: minimum scale ratio, d=0.05 (rows p_star x c, columns t_ratio)
//   4: producer's risk at c = 2    (rows p_star x t_ratio, columns scale_ratio)
struct PlanTable {
    int which = 0;
    double lambda = 0.5;
    std::string col_label;
    std::vector<double> col_grid;

    struct Row {
        double p_star = 0.0;
        int c = -1;
        int n = -1;            // designed sample size (tables 2 and 4)
        double t_ratio = -1.0; // fixed per row (tables 2 and 4)
        std::vector<double> values;
    };
    std::vector<Row> rows;
};

PlanTable emit_table(int which, double lambda);

void write_csv(const PlanTable& table, std::ostream& out, int precision = 7);
void write_json(const PlanTable& table, std::ostream& out);

// One flagged cell from a table comparison.
struct CellDiff {
    std::string row_key;  // e.g. "p_star=0.9 c=5" or "p_star=0.75 t_ratio=0.628"
    std::string column;   // column grid label, or "n" for the designed-n field
    double reference = 0.0;
    double computed = 0.0;
    double tolerance = 0.0;
};

// Compare a computed table against a CSV in write_csv layout. A cell is
// flagged when it differs from the reference by more than half a unit in the
// last decimal place the reference itself prints.
std::vector<CellDiff> compare_table_csv(const PlanTable& computed, std::istream& reference);

std::string format_cell(double value, int which, int precision);
std::string format_number(double value, int precision = 15);

}  // namespace trlife
