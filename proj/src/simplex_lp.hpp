#pragma once
// Dense two-phase tableau simplex: maximize c·x subject to A x <= b, x >= 0.
// Bland-style index tie-breaking keeps it from cycling on the degenerate
// systems produced by vertex-membership queries. Desk-scale only.

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace hypotest::detail {

class DenseLp {
public:
    using Vector = std::vector<double>;
    using Matrix = std::vector<Vector>;

    enum class Status { Optimal, Infeasible, Unbounded };

    struct Result {
        Status status;
        double value;
        Vector x;
    };

    DenseLp(const Matrix& a, const Vector& b, const Vector& c, double eps = 1e-11)
        : rows_(static_cast<int>(b.size())),
          cols_(static_cast<int>(c.size())),
          eps_(eps),
          nonbasic_(cols_ + 1),
          basic_(rows_),
          tableau_(rows_ + 2, Vector(cols_ + 2, 0.0)) {
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) tableau_[i][j] = a[i][j];
        }
        for (int i = 0; i < rows_; ++i) {
            basic_[i] = cols_ + i;
            tableau_[i][cols_] = -1.0;
            tableau_[i][cols_ + 1] = b[i];
        }
        for (int j = 0; j < cols_; ++j) {
            nonbasic_[j] = j;
            tableau_[rows_][j] = -c[j];
        }
        nonbasic_[cols_] = -1;
        tableau_[rows_ + 1][cols_] = 1.0;
    }

    Result solve() {
        int r = 0;
        for (int i = 1; i < rows_; ++i) {
            if (tableau_[i][cols_ + 1] < tableau_[r][cols_ + 1]) r = i;
        }
        if (rows_ > 0 && tableau_[r][cols_ + 1] < -eps_) {
            pivot(r, cols_);
            if (!run(2) || tableau_[rows_ + 1][cols_ + 1] < -eps_) {
                return {Status::Infeasible, -std::numeric_limits<double>::infinity(), {}};
            }
            for (int i = 0; i < rows_; ++i) {
                if (basic_[i] == -1) {
                    int s = 0;
                    for (int j = 1; j < cols_ + 1; ++j) {
                        if (better(tableau_[i], j, s)) s = j;
                    }
                    pivot(i, s);
                }
            }
        }
        const bool bounded = run(1);
        Vector x(cols_, 0.0);
        for (int i = 0; i < rows_; ++i) {
            if (basic_[i] < cols_) x[basic_[i]] = tableau_[i][cols_ + 1];
        }
        if (!bounded) return {Status::Unbounded, std::numeric_limits<double>::infinity(), x};
        return {Status::Optimal, tableau_[rows_][cols_ + 1], x};
    }

private:
    bool better(const Vector& row, int j, int s) const {
        return std::make_pair(row[j], nonbasic_[j]) < std::make_pair(row[s], nonbasic_[s]);
    }

    void pivot(int r, int s) {
        const double inv = 1.0 / tableau_[r][s];
        for (int i = 0; i < rows_ + 2; ++i) {
            if (i == r || std::abs(tableau_[i][s]) <= eps_) continue;
            const double factor = tableau_[i][s] * inv;
            for (int j = 0; j < cols_ + 2; ++j) tableau_[i][j] -= tableau_[r][j] * factor;
            tableau_[i][s] = tableau_[r][s] * factor;
        }
        for (int j = 0; j < cols_ + 2; ++j) {
            if (j != s) tableau_[r][j] *= inv;
        }
        for (int i = 0; i < rows_ + 2; ++i) {
            if (i != r) tableau_[i][s] *= -inv;
        }
        tableau_[r][s] = inv;
        std::swap(basic_[r], nonbasic_[s]);
    }

    bool run(int phase) {
        const int objective_row = rows_ + phase - 1;
        for (;;) {
            int s = -1;
            for (int j = 0; j <= cols_; ++j) {
                if (nonbasic_[j] == -phase) continue;
                if (s == -1 || better(tableau_[objective_row], j, s)) s = j;
            }
            if (tableau_[objective_row][s] >= -eps_) return true;
            int r = -1;
            for (int i = 0; i < rows_; ++i) {
                if (tableau_[i][s] <= eps_) continue;
                if (r == -1) {
                    r = i;
                    continue;
                }
                const double lhs = tableau_[i][cols_ + 1] / tableau_[i][s];
                const double rhs = tableau_[r][cols_ + 1] / tableau_[r][s];
                if (std::make_pair(lhs, basic_[i]) < std::make_pair(rhs, basic_[r])) r = i;
            }
            if (r == -1) return false;
            pivot(r, s);
        }
    }

    int rows_;
    int cols_;
    double eps_;
    std::vector<int> nonbasic_;
    std::vector<int> basic_;
    Matrix tableau_;
};

} // namespace hypotest::detail
