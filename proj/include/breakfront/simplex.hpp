#pragma once

#include <vector>

namespace breakfront {

// Small dense LP: minimize or maximize c.x subject to row constraints and
// x >= 0. Two-phase primal simplex with Bland's rule; sized for problems with
// tens of variables, where a dense tableau is both simple and robust.
class DenseLP {
  public:
    enum class Status { optimal, infeasible, unbounded };

    struct Result {
        Status status = Status::infeasible;
        double value = 0.0;
        std::vector<double> x;
        bool ok() const { return status == Status::optimal; }
    };

    explicit DenseLP(int num_vars) : n_(num_vars) {}

    void add_le(std::vector<double> coeffs, double rhs);  // coeffs.x <= rhs
    void add_ge(std::vector<double> coeffs, double rhs);  // coeffs.x >= rhs
    void add_eq(std::vector<double> coeffs, double rhs);  // coeffs.x == rhs

    Result minimize(const std::vector<double>& objective) const;
    Result maximize(const std::vector<double>& objective) const;
    Result find_feasible() const;  // phase 1 only

    int num_vars() const { return n_; }

  private:
    enum class RowKind { le, eq };
    struct Row {
        std::vector<double> a;
        double b;
        RowKind kind;
    };

    void add_row(std::vector<double> coeffs, double rhs, RowKind kind);
    Result solve(const std::vector<double>& objective, bool phase2) const;

    int n_;
    std::vector<Row> rows_;
};

}  // namespace breakfront
