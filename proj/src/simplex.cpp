#include "breakfront/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace breakfront {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-10;  // below the 1e-9 strict-defier slack
constexpr int kMaxPivots = 20000;

}  // namespace

void DenseLP::add_row(std::vector<double> coeffs, double rhs, RowKind kind) {
    if (static_cast<int>(coeffs.size()) != n_) {
        throw std::invalid_argument("constraint arity mismatch");
    }
    rows_.push_back(Row{std::move(coeffs), rhs, kind});
}

void DenseLP::add_le(std::vector<double> coeffs, double rhs) {
    add_row(std::move(coeffs), rhs, RowKind::le);
}

void DenseLP::add_ge(std::vector<double> coeffs, double rhs) {
    for (double& v : coeffs) v = -v;
    add_row(std::move(coeffs), -rhs, RowKind::le);
}

void DenseLP::add_eq(std::vector<double> coeffs, double rhs) {
    add_row(std::move(coeffs), rhs, RowKind::eq);
}

DenseLP::Result DenseLP::minimize(const std::vector<double>& objective) const {
    return solve(objective, /*phase2=*/true);
}

DenseLP::Result DenseLP::maximize(const std::vector<double>& objective) const {
    std::vector<double> neg(objective);
    for (double& v : neg) v = -v;
    Result r = solve(neg, /*phase2=*/true);
    r.value = -r.value;
    return r;
}

DenseLP::Result DenseLP::find_feasible() const {
    return solve(std::vector<double>(n_, 0.0), /*phase2=*/false);
}

// Tableau layout: columns [structural | slack | artificial | rhs], one row per
// constraint plus the objective row kept as reduced costs at the bottom.
DenseLP::Result DenseLP::solve(const std::vector<double>& objective, bool phase2) const {
    const int m = static_cast<int>(rows_.size());
    int num_slack = 0;
    for (const auto& row : rows_) {
        if (row.kind == RowKind::le) ++num_slack;
    }

    // Normalize rhs >= 0 first so slack columns of le rows can start basic
    // only when their rhs is nonnegative; everything else gets an artificial.
    const int slack0 = n_;
    const int art0 = n_ + num_slack;
    int num_art = 0;
    std::vector<int> slack_col(m, -1), art_col(m, -1);
    {
        int s = 0;
        for (int i = 0; i < m; ++i) {
            const bool flipped = rows_[i].b < 0.0;
            if (rows_[i].kind == RowKind::le) {
                slack_col[i] = slack0 + s++;
                if (flipped) art_col[i] = art0 + num_art++;
            } else {
                art_col[i] = art0 + num_art++;
            }
        }
    }
    const int total = n_ + num_slack + num_art;
    const int rhs = total;

    std::vector<std::vector<double>> tab(m + 1, std::vector<double>(total + 1, 0.0));
    std::vector<int> basis(m, -1);
    for (int i = 0; i < m; ++i) {
        const double sign = rows_[i].b < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < n_; ++j) tab[i][j] = sign * rows_[i].a[j];
        tab[i][rhs] = sign * rows_[i].b;
        if (slack_col[i] >= 0) tab[i][slack_col[i]] = sign;
        if (art_col[i] >= 0) {
            tab[i][art_col[i]] = 1.0;
            basis[i] = art_col[i];
        } else {
            basis[i] = slack_col[i];
        }
    }

    auto pivot = [&](int pr, int pc) {
        std::vector<double>& prow = tab[pr];
        const double inv = 1.0 / prow[pc];
        for (double& v : prow) v *= inv;
        prow[pc] = 1.0;
        for (int i = 0; i <= m; ++i) {
            if (i == pr) continue;
            const double factor = tab[i][pc];
            if (std::fabs(factor) < kPivotTol * 1e-4) continue;
            for (int j = 0; j <= total; ++j) tab[i][j] -= factor * prow[j];
            tab[i][pc] = 0.0;
        }
        basis[pr] = pc;
    };

    // Bland's rule: first improving column, tie-broken by smallest basis index.
    auto run_simplex = [&](int allowed_cols) -> bool {
        for (int iter = 0; iter < kMaxPivots; ++iter) {
            int entering = -1;
            for (int j = 0; j < allowed_cols; ++j) {
                if (tab[m][j] < -kPivotTol) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0) return true;  // optimal
            int leaving = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                if (tab[i][entering] > kPivotTol) {
                    const double ratio = tab[i][rhs] / tab[i][entering];
                    if (leaving < 0 || ratio < best_ratio - kPivotTol ||
                        (ratio < best_ratio + kPivotTol && basis[i] < basis[leaving])) {
                        leaving = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leaving < 0) return false;  // unbounded
            pivot(leaving, entering);
        }
        throw std::runtime_error("simplex: pivot limit reached");
    };

    Result result;

    if (num_art > 0) {
        // Phase 1: minimize the artificial mass.
        for (int j = 0; j <= total; ++j) tab[m][j] = 0.0;
        for (int j = art0; j < art0 + num_art; ++j) tab[m][j] = 1.0;
        for (int i = 0; i < m; ++i) {
            if (basis[i] >= art0) {
                for (int j = 0; j <= total; ++j) tab[m][j] -= tab[i][j];
            }
        }
        if (!run_simplex(art0)) throw std::runtime_error("simplex: phase 1 unbounded");
        if (-tab[m][rhs] > kFeasTol) {
            result.status = Status::infeasible;
            return result;
        }
        // Pivot surviving artificials out of the basis; an all-zero row is a
        // redundant constraint and stays parked at zero.
        for (int i = 0; i < m; ++i) {
            if (basis[i] < art0) continue;
            int col = -1;
            for (int j = 0; j < art0; ++j) {
                if (std::fabs(tab[i][j]) > kPivotTol) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) pivot(i, col);
        }
    }

    if (!phase2) {
        result.status = Status::optimal;
        result.value = 0.0;
        result.x.assign(n_, 0.0);
        for (int i = 0; i < m; ++i) {
            if (basis[i] < n_) result.x[basis[i]] = tab[i][rhs];
        }
        return result;
    }

    // Phase 2 objective as reduced costs against the current basis.
    for (int j = 0; j <= total; ++j) tab[m][j] = 0.0;
    for (int j = 0; j < n_; ++j) tab[m][j] = objective[j];
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n_ && std::fabs(objective[basis[i]]) > 0.0) {
            const double cb = objective[basis[i]];
            for (int j = 0; j <= total; ++j) tab[m][j] -= cb * tab[i][j];
        }
    }
    // Artificial columns must never re-enter.
    if (!run_simplex(art0)) {
        result.status = Status::unbounded;
        return result;
    }

    result.status = Status::optimal;
    result.x.assign(n_, 0.0);
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n_) result.x[basis[i]] = tab[i][rhs];
    }
    double value = 0.0;
    for (int j = 0; j < n_; ++j) value += objective[j] * result.x[j];
    result.value = value;
    return result;
}

}  // namespace breakfront
