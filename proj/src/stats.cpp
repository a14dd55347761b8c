#include "exmap/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "exmap/errors.hpp"

namespace exmap {

Grouping group_focals(const FocalDesign& design, const AssignmentVector& z,
                      const Network& net) {
    Grouping g;
    g.kappa = design.kappa;
    g.index.resize(design.focals.size());
    for (size_t k = 0; k < design.focals.size(); ++k) {
        const ExposureValue e = eval_exposure(design.pair.e1, design.focals[k], z, net);
        const auto& tset = design.tilde[k];
        auto it = std::find(tset.begin(), tset.end(), e);
        if (it == tset.end())
            throw Error("grouping contract violation: E1 value " + e.to_string() +
                        " of unit " + std::to_string(design.focals[k]) +
                        " is outside its tilde set (membership should have prevented this)");
        g.index[k] = static_cast<int>(it - tset.begin());
    }
    return g;
}

std::vector<double> midranks(const std::vector<double>& values) {
    if (values.empty()) throw ValidationError("midranks of an empty list");
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&values](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    size_t pos = 0;
    while (pos < n) {
        size_t end = pos;
        while (end + 1 < n && values[order[end + 1]] == values[order[pos]]) ++end;
        const double mid = (static_cast<double>(pos + 1) + static_cast<double>(end + 1)) / 2.0;
        for (size_t k = pos; k <= end; ++k) ranks[order[k]] = mid;
        pos = end + 1;
    }
    return ranks;
}

namespace {

struct GroupSums {
    std::vector<int> size;
    std::vector<double> sum;
    int nonempty = 0;
};

GroupSums accumulate_groups(const std::vector<double>& values, const Grouping& grouping,
                            int kappa) {
    if (values.size() != grouping.index.size())
        throw ValidationError("value list does not match the grouping");
    GroupSums gs;
    gs.size.assign(kappa, 0);
    gs.sum.assign(kappa, 0.0);
    for (size_t k = 0; k < values.size(); ++k) {
        const int j = grouping.index[k];
        if (j < 0 || j >= kappa) throw ValidationError("group index outside [0, kappa)");
        gs.size[j] += 1;
        gs.sum[j] += values[k];
    }
    for (int j = 0; j < kappa; ++j)
        if (gs.size[j] > 0) ++gs.nonempty;
    return gs;
}

}  // namespace

std::optional<double> kw_from_ranks(const std::vector<double>& ranks,
                                    const Grouping& grouping, int kappa) {
    GroupSums gs = accumulate_groups(ranks, grouping, kappa);
    if (gs.nonempty < 2) return std::nullopt;
    const double n = static_cast<double>(ranks.size());
    const double grand = (n + 1.0) / 2.0;
    double t = 0.0;
    for (int j = 0; j < kappa; ++j) {
        if (gs.size[j] == 0) continue;
        const double dev = gs.sum[j] / gs.size[j] - grand;
        t += gs.size[j] * dev * dev;
    }
    return 12.0 / (n * (n + 1.0)) * t;
}

std::optional<double> kw_statistic(const std::vector<double>& y_focals,
                                   const Grouping& grouping, int kappa) {
    return kw_from_ranks(midranks(y_focals), grouping, kappa);
}

std::optional<double> acd_statistic(const std::vector<double>& y_focals,
                                    const Grouping& grouping, int kappa) {
    GroupSums gs = accumulate_groups(y_focals, grouping, kappa);
    if (gs.nonempty < 2) return std::nullopt;
    double total = 0.0;
    int pairs = 0;
    for (int j = 0; j < kappa; ++j) {
        if (gs.size[j] == 0) continue;
        for (int k = j + 1; k < kappa; ++k) {
            if (gs.size[k] == 0) continue;
            total += std::abs(gs.sum[j] / gs.size[j] - gs.sum[k] / gs.size[k]);
            ++pairs;
        }
    }
    return total / pairs;
}

namespace {

constexpr double kPivotTolerance = 1e-10;

// rank and residual sum of squares of the least-squares fit of y on A
std::pair<int, double> rank_and_rss(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(kPivotTolerance);
    const int rank = static_cast<int>(qr.rank());
    if (rank == 0) return {0, y.squaredNorm()};
    Eigen::VectorXd beta = qr.solve(y);
    const double rss = (y - A * beta).squaredNorm();
    return {rank, rss};
}

}  // namespace

std::optional<double> ols_f_statistic(const std::vector<double>& y,
                                      const std::vector<std::vector<double>>& e0_rows,
                                      const std::vector<std::vector<double>>& x_rows) {
    const int n = static_cast<int>(y.size());
    if (n == 0 || e0_rows.size() != y.size() || x_rows.size() != y.size())
        throw ValidationError("regression inputs have mismatched lengths");
    const int d0 = static_cast<int>(e0_rows.front().size());
    const int dx = static_cast<int>(x_rows.front().size());
    if (dx == 0) return std::nullopt;

    Eigen::VectorXd yv(n);
    Eigen::MatrixXd full(n, 1 + d0 + dx);
    for (int r = 0; r < n; ++r) {
        yv(r) = y[r];
        full(r, 0) = 1.0;
        for (int c = 0; c < d0; ++c) full(r, 1 + c) = e0_rows[r][c];
        for (int c = 0; c < dx; ++c) full(r, 1 + d0 + c) = x_rows[r][c];
    }

    const auto [rank_restricted, rss_restricted] =
        rank_and_rss(full.leftCols(1 + d0), yv);
    const auto [rank_full, rss_full] = rank_and_rss(full, yv);

    const int q = rank_full - rank_restricted;  // testable x columns
    if (q <= 0) return std::nullopt;
    const int dof = n - rank_full;
    if (dof <= 0) return std::nullopt;

    const double scale = std::max(1.0, yv.squaredNorm());
    if (rss_full <= 1e-24 * scale) return std::numeric_limits<double>::infinity();
    return ((rss_restricted - rss_full) / q) / (rss_full / dof);
}

SimesResult simes(const std::vector<double>& p_values, double alpha) {
    if (p_values.empty()) throw ValidationError("simes on an empty p-value list");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must be in (0, 1)");
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p-value outside [0, 1]");
    std::vector<double> sorted(p_values);
    std::sort(sorted.begin(), sorted.end());
    const int s = static_cast<int>(sorted.size());
    for (int i = 1; i <= s; ++i)
        if (sorted[i - 1] <= static_cast<double>(i) * alpha / s) return {true, i};
    return {false, std::nullopt};
}

double simes_p_value(const std::vector<double>& p_values) {
    if (p_values.empty()) throw ValidationError("simes on an empty p-value list");
    std::vector<double> sorted(p_values);
    std::sort(sorted.begin(), sorted.end());
    const int s = static_cast<int>(sorted.size());
    double best = 1.0;
    for (int i = 1; i <= s; ++i)
        best = std::min(best, static_cast<double>(s) / i * sorted[i - 1]);
    return best;
}

}  // namespace exmap
