#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace wildgrid {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A solver-agnostic MILP in row form: min c'x + offset subject to
// row_lb <= Ax <= row_ub, col_lb <= x <= col_ub, x_i integer where flagged.
struct MilpModel {
    std::vector<double> col_lb, col_ub, obj;
    std::vector<char> is_integer;
    double obj_offset = 0.0;

    std::vector<std::vector<std::pair<int, double>>> rows;  // (column, coefficient)
    std::vector<double> row_lb, row_ub;

    int add_col(double lb, double ub, double obj_coeff, bool integer) {
        col_lb.push_back(lb);
        col_ub.push_back(ub);
        obj.push_back(obj_coeff);
        is_integer.push_back(integer ? 1 : 0);
        return num_cols() - 1;
    }

    int add_row(std::vector<std::pair<int, double>> coeffs, double lb, double ub) {
        rows.push_back(std::move(coeffs));
        row_lb.push_back(lb);
        row_ub.push_back(ub);
        return num_rows() - 1;
    }

    int num_cols() const { return static_cast<int>(obj.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    void relax_all_integrality() {
        std::fill(is_integer.begin(), is_integer.end(), 0);
    }

    bool has_integrality() const {
        for (char c : is_integer)
            if (c) return true;
        return false;
    }

    // Evaluates a candidate point: returns the largest constraint/bound/
    // integrality violation. Used by plan feasibility checks and tests.
    double max_violation(const std::vector<double>& x) const;

    // LP-format text dump for debugging (flag-gated in the CLI).
    std::string to_lp_text() const;
};

}  // namespace wildgrid
