#include "milp.hpp"

#include <cmath>
#include <sstream>

namespace wildgrid {

double MilpModel::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int j = 0; j < num_cols(); ++j) {
        worst = std::max(worst, col_lb[j] - x[j]);
        worst = std::max(worst, x[j] - col_ub[j]);
        if (is_integer[j]) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
    }
    for (int r = 0; r < num_rows(); ++r) {
        double ax = 0.0;
        for (auto [j, a] : rows[r]) ax += a * x[j];
        if (row_lb[r] > -kInf) worst = std::max(worst, row_lb[r] - ax);
        if (row_ub[r] < kInf) worst = std::max(worst, ax - row_ub[r]);
    }
    return worst;
}

std::string MilpModel::to_lp_text() const {
    std::ostringstream os;
    os << "\\ " << num_cols() << " cols, " << num_rows() << " rows\n";
    os << "Minimize\n obj:";
    for (int j = 0; j < num_cols(); ++j)
        if (obj[j] != 0.0) os << (obj[j] >= 0 ? " + " : " - ") << std::abs(obj[j]) << " x" << j;
    os << "\nSubject To\n";
    for (int r = 0; r < num_rows(); ++r) {
        auto row_expr = [&]() {
            std::ostringstream e;
            for (auto [j, a] : rows[r])
                e << (a >= 0 ? " + " : " - ") << std::abs(a) << " x" << j;
            return e.str();
        };
        if (row_lb[r] == row_ub[r]) {
            os << " r" << r << ":" << row_expr() << " = " << row_ub[r] << "\n";
        } else {
            if (row_ub[r] < kInf) os << " r" << r << "u:" << row_expr() << " <= " << row_ub[r] << "\n";
            if (row_lb[r] > -kInf) os << " r" << r << "l:" << row_expr() << " >= " << row_lb[r] << "\n";
        }
    }
    os << "Bounds\n";
    for (int j = 0; j < num_cols(); ++j)
        os << " " << col_lb[j] << " <= x" << j << " <= " << col_ub[j] << "\n";
    os << "Generals\n";
    for (int j = 0; j < num_cols(); ++j)
        if (is_integer[j]) os << " x" << j << "\n";
    os << "End\n";
    return os.str();
}

}  // namespace wildgrid
