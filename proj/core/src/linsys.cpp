#include "gradleak/linsys.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include <lapacke.h>

#include "gradleak/errors.hpp"

namespace gradleak {

void LinearSystem::append(const LinearSystem& other) {
    if (n_unknowns != other.n_unknowns)
        throw ShapeError("cannot stack systems over " + std::to_string(n_unknowns) + " and " +
                         std::to_string(other.n_unknowns) + " unknowns");
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

namespace {

// Union-find over column indices; constraint rows connect the unknowns they
// touch, and disjoint blocks factor independently.
struct DisjointSets {
    std::vector<std::uint32_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::uint32_t>(i);
    }
    std::uint32_t find(std::uint32_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

double default_rank_eps() {
    if (const char* env = std::getenv("GRADLEAK_RANK_EPS")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && std::isfinite(v) && v > 0.0) return v;
    }
    return 1e-10;
}

LeastSquaresResult solve_least_squares(const LinearSystem& sys, double eps_rel) {
    const std::size_t n = sys.n_unknowns;
    LeastSquaresResult result;

    double max_entry = 0.0;
    for (const auto& row : sys.rows)
        for (const auto& [col, v] : row.coeffs) {
            if (col >= n)
                throw ShapeError("row references column " + std::to_string(col) + " of " +
                                 std::to_string(n));
            max_entry = std::max(max_entry, std::abs(v));
        }
    const double eps_abs = eps_rel * max_entry;

    DisjointSets sets(n);
    for (const auto& row : sys.rows)
        for (std::size_t j = 1; j < row.coeffs.size(); ++j)
            sets.unite(row.coeffs[0].first, row.coeffs[j].first);

    // Group columns and rows by component root. Untouched columns become
    // singleton components with no rows, which correctly reads as rank 0.
    std::vector<std::vector<std::uint32_t>> comp_cols;
    std::vector<std::uint32_t> comp_of(n, 0);
    {
        std::vector<std::int64_t> root_to_comp(n, -1);
        for (std::uint32_t c = 0; c < n; ++c) {
            const std::uint32_t root = sets.find(c);
            if (root_to_comp[root] < 0) {
                root_to_comp[root] = static_cast<std::int64_t>(comp_cols.size());
                comp_cols.emplace_back();
            }
            comp_of[c] = static_cast<std::uint32_t>(root_to_comp[root]);
            comp_cols[comp_of[c]].push_back(c);
        }
    }
    std::vector<std::vector<std::uint32_t>> comp_rows(comp_cols.size());
    for (std::uint32_t r = 0; r < sys.rows.size(); ++r)
        if (!sys.rows[r].coeffs.empty())
            comp_rows[comp_of[sys.rows[r].coeffs[0].first]].push_back(r);

    std::vector<double> x(n, 0.0);
    bool deficient = false;

    std::vector<std::uint32_t> local(n, 0);
    for (std::size_t ci = 0; ci < comp_cols.size(); ++ci) {
        const auto& cols = comp_cols[ci];
        const auto& rids = comp_rows[ci];
        const std::size_t k = cols.size();
        const std::size_t m = rids.size();
        if (m == 0) {
            deficient = true;
            continue;
        }
        for (std::size_t j = 0; j < k; ++j) local[cols[j]] = static_cast<std::uint32_t>(j);

        // Column-major m-by-k block plus its right-hand side.
        std::vector<double> a(m * k, 0.0);
        std::vector<double> b(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& row = sys.rows[rids[i]];
            for (const auto& [col, v] : row.coeffs) a[local[col] * m + i] += v;
            b[i] = row.rhs;
        }

        const auto mi = static_cast<lapack_int>(m);
        const auto ki = static_cast<lapack_int>(k);
        std::vector<lapack_int> jpvt(k, 0);
        std::vector<double> tau(std::min(m, k));
        lapack_int info =
            LAPACKE_dgeqp3(LAPACK_COL_MAJOR, mi, ki, a.data(), mi, jpvt.data(), tau.data());
        if (info != 0) throw Error("dgeqp3 failed with info " + std::to_string(info));

        std::size_t rank = 0;
        for (std::size_t i = 0; i < std::min(m, k); ++i)
            if (std::abs(a[i * m + i]) > eps_abs) ++rank;
        result.rank += rank;

        if (rank < k) {
            deficient = true;
            continue;
        }

        info = LAPACKE_dormqr(LAPACK_COL_MAJOR, 'L', 'T', mi, 1, static_cast<lapack_int>(tau.size()),
                              a.data(), mi, tau.data(), b.data(), mi);
        if (info != 0) throw Error("dormqr failed with info " + std::to_string(info));
        info = LAPACKE_dtrtrs(LAPACK_COL_MAJOR, 'U', 'N', 'N', ki, 1, a.data(), mi, b.data(), mi);
        if (info != 0) throw Error("dtrtrs failed with info " + std::to_string(info));

        for (std::size_t j = 0; j < k; ++j) x[cols[jpvt[j] - 1]] = b[j];
    }

    if (!deficient && result.rank == n) {
        double acc = 0.0;
        for (const auto& row : sys.rows) {
            double ax = 0.0;
            for (const auto& [col, v] : row.coeffs) ax += v * x[col];
            const double r = ax - row.rhs;
            acc += r * r;
        }
        result.residual = std::sqrt(acc);
        result.x = std::move(x);
    }
    return result;
}

}  // namespace gradleak
