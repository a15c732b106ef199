#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace gradleak {

// Sparse row-wise linear system over a fixed set of unknowns. Rows are kept
// as (column, coefficient) pairs because constraint rows touch at most one
// convolution window's worth of the input.
struct LinearSystem {
    std::size_t n_unknowns = 0;

    struct Row {
        std::vector<std::pair<std::uint32_t, double>> coeffs;
        double rhs = 0.0;
    };
    std::vector<Row> rows;

    std::size_t n_rows() const { return rows.size(); }
    void append(const LinearSystem& other);
};

struct LeastSquaresResult {
    // Solution vector; left empty when rank < n_unknowns (no unique
    // least-squares solution is reported for deficient systems).
    std::vector<double> x;
    std::size_t rank = 0;
    // l2 norm of (Ax - b) over the original rows; 0 for deficient systems.
    double residual = 0.0;
};

// Rank-revealing least squares via column-pivoted QR. The rank threshold is
// eps_rel times the largest absolute matrix entry; diagonal entries of R at
// or below it do not count toward the rank. Disconnected column blocks are
// factored independently, which keeps per-channel constraint systems cheap.
LeastSquaresResult solve_least_squares(const LinearSystem& sys, double eps_rel = 1e-10);

// Default relative rank threshold, honoring the GRADLEAK_RANK_EPS
// environment variable when set to a positive number.
double default_rank_eps();

}  // namespace gradleak
