#include "fluctrack/assignment.hpp"

#include "fluctrack/errors.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <utility>

namespace fluctrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_entries(const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double x = m.data()[i];
        if (std::isnan(x) || x == -kInf) {
            throw DomainError("cost matrix entries must be finite or +inf");
        }
    }
}

// Shortest augmenting path solver on a square matrix, 1-indexed in the classic formulation:
// p[j] is the row holding column j (0 = free), u/v are the row/column potentials.
// Rows above `real_rows` are zero-cost padding. They are interchangeable, so once one
// matched padding row has been expanded the others cannot shorten any path: their columns
// are settled at the same distance in one step instead of one iteration each.
struct Hungarian {
    std::vector<double> u;
    std::vector<double> v;
    std::vector<int> p;
    int real_rows = 0;

    Hungarian(int n, int real) : u(n + 1, 0.0), v(n + 1, 0.0), p(n + 1, 0), real_rows(real) {}

    // Inserts `row` (1-based) into the current partial assignment. Returns false if no
    // finite augmenting path exists.
    bool augment(const Eigen::MatrixXd& a, int row, std::vector<double>& minv, std::vector<int>& way,
                 std::vector<char>& used) {
        const int n = static_cast<int>(a.rows());
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        p[0] = row;
        int j0 = 0;
        bool padding_expanded = false;
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            const bool padding = j0 != 0 && i0 > real_rows;
            if (padding && !padding_expanded) {
                padding_expanded = true;
                for (int j = 1; j <= n; ++j) {
                    if (!used[j] && p[j] > real_rows) {
                        used[j] = 1;
                        way[j] = j0;
                    }
                }
            }
            double delta = kInf;
            int j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if (j1 < 0 || !std::isfinite(delta)) {
                return false;
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
        return true;
    }

    // Column (0-based) of every row (0-based).
    [[nodiscard]] std::vector<int> row_to_column() const {
        std::vector<int> out(p.size() - 1, -1);
        for (std::size_t j = 1; j < p.size(); ++j) {
            if (p[j] > 0) {
                out[p[j] - 1] = static_cast<int>(j) - 1;
            }
        }
        return out;
    }
};

struct Workspace {
    std::vector<double> minv;
    std::vector<int> way;
    std::vector<char> used;

    explicit Workspace(int n) : minv(n + 1), way(n + 1), used(n + 1) {}
};

struct Node {
    double cost = 0.0;
    std::uint64_t sequence = 0;
    std::vector<std::pair<int, int>> forbidden;
    std::vector<int> fixed_rows;
    Hungarian solver{0, 0};
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.cost != b.cost) {
            return a.cost > b.cost;
        }
        return a.sequence > b.sequence;
    }
};

double real_cost(const Eigen::MatrixXd& a, const std::vector<int>& columns, int real_rows) {
    double total = 0.0;
    for (int i = 0; i < real_rows; ++i) {
        total += a(i, columns[i]);
    }
    return total;
}

void block_row_and_column(Eigen::MatrixXd& a, int row, int column) {
    const double keep = a(row, column);
    a.row(row).setConstant(kInf);
    a.col(column).setConstant(kInf);
    a(row, column) = keep;
}

// Square padding: real rows first, then zero-cost dummy rows.
Eigen::MatrixXd pad_square(const Eigen::MatrixXd& rect) {
    const auto cols = rect.cols();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cols, cols);
    a.topRows(rect.rows()) = rect;
    return a;
}

}  // namespace

CostMatrix::CostMatrix(Eigen::MatrixXd detection_costs, Eigen::VectorXd miss_costs, Eigen::VectorXd death_costs)
    : detection(std::move(detection_costs)), miss(std::move(miss_costs)), death(std::move(death_costs)) {
    if (miss.size() != detection.rows() || death.size() != detection.rows()) {
        throw DomainError("cost matrix row counts disagree");
    }
}

Eigen::MatrixXd CostMatrix::extended() const {
    const int n = tracks();
    const int m = measurements();
    Eigen::MatrixXd out = Eigen::MatrixXd::Constant(n, m + 2 * n, kInf);
    out.leftCols(m) = detection;
    for (int i = 0; i < n; ++i) {
        out(i, m + i) = miss(i);
        out(i, m + n + i) = death(i);
    }
    return out;
}

std::vector<int> optimal_assignment(const Eigen::MatrixXd& costs) {
    if (costs.rows() > costs.cols()) {
        throw DomainError("optimal_assignment needs rows <= cols");
    }
    check_entries(costs);
    if (costs.rows() == 0) {
        return {};
    }
    const Eigen::MatrixXd a = pad_square(costs);
    const int n = static_cast<int>(a.rows());
    Hungarian solver(n, static_cast<int>(costs.rows()));
    Workspace ws(n);
    for (int i = 1; i <= n; ++i) {
        if (!solver.augment(a, i, ws.minv, ws.way, ws.used)) {
            return {};
        }
    }
    auto columns = solver.row_to_column();
    columns.resize(costs.rows());
    return columns;
}

std::vector<Assignment> k_best_assignments(const CostMatrix& costs, int k) {
    if (k < 1) {
        throw DomainError("k must be at least 1");
    }
    const int n_tracks = costs.tracks();
    const int m = costs.measurements();
    if (n_tracks == 0) {
        return {Assignment{}};
    }
    const Eigen::MatrixXd rect = costs.extended();
    check_entries(rect);
    const Eigen::MatrixXd base = pad_square(rect);
    const int n = static_cast<int>(base.rows());
    Workspace ws(n);

    const auto to_assignment = [&](const Hungarian& solver, double cost) {
        const auto columns = solver.row_to_column();
        Assignment out;
        out.total_cost = cost;
        out.mapping.resize(n_tracks);
        for (int i = 0; i < n_tracks; ++i) {
            const int j = columns[i];
            out.mapping[i] = j < m ? j : (j < m + n_tracks ? kMiss : kDeath);
        }
        return out;
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
    std::uint64_t sequence = 0;
    {
        Node root;
        root.solver = Hungarian(n, n_tracks);
        for (int i = 1; i <= n; ++i) {
            if (!root.solver.augment(base, i, ws.minv, ws.way, ws.used)) {
                return {};
            }
        }
        root.cost = real_cost(base, root.solver.row_to_column(), n_tracks);
        root.sequence = sequence++;
        queue.push(std::move(root));
    }

    std::vector<Assignment> results;
    Eigen::MatrixXd a(n, n);
    std::vector<char> is_fixed(n_tracks);
    while (!queue.empty() && static_cast<int>(results.size()) < k) {
        // top() is const; the node is moved out right before pop() discards it.
        Node node = std::move(const_cast<Node&>(queue.top()));
        queue.pop();
        results.push_back(to_assignment(node.solver, node.cost));
        if (static_cast<int>(results.size()) == k) {
            break;
        }

        const auto columns = node.solver.row_to_column();
        a = base;
        for (const auto& [r, c] : node.forbidden) {
            a(r, c) = kInf;
        }
        std::fill(is_fixed.begin(), is_fixed.end(), 0);
        for (const int r : node.fixed_rows) {
            block_row_and_column(a, r, columns[r]);
            is_fixed[r] = 1;
        }

        std::vector<int> fixed = node.fixed_rows;
        for (int t = 0; t < n_tracks; ++t) {
            if (is_fixed[t]) {
                continue;
            }
            const int col = columns[t];
            const double saved = a(t, col);
            a(t, col) = kInf;

            Node child;
            child.solver = node.solver;
            child.solver.p[col + 1] = 0;
            if (child.solver.augment(a, t + 1, ws.minv, ws.way, ws.used)) {
                child.cost = real_cost(base, child.solver.row_to_column(), n_tracks);
                if (std::isfinite(child.cost)) {
                    child.forbidden = node.forbidden;
                    child.forbidden.emplace_back(t, col);
                    child.fixed_rows = fixed;
                    child.sequence = sequence++;
                    queue.push(std::move(child));
                }
            }

            a(t, col) = saved;
            block_row_and_column(a, t, col);
            fixed.push_back(t);
        }
    }
    return results;
}

}  // namespace fluctrack
