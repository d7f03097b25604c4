#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "citemb/sgns.hpp"

namespace citemb {

// Small dense row-major matrix of doubles; just enough for the alignment
// arithmetic.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
    std::span<double> row(std::size_t r) { return {a.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {a.data() + r * cols, cols}; }
};

struct SvdResult {
    Mat u;                     // d x d, left singular vectors as columns
    Mat v;                     // d x d, right singular vectors as columns
    std::vector<double> sigma; // descending not guaranteed; order follows Jacobi
    bool rank_deficient = false;
};

// One-sided Jacobi SVD of a square matrix, iterated until every off-diagonal
// rotation is below 1e-12 or 30 sweeps.
SvdResult jacobi_svd(const Mat& m);

// Orthogonal map d x d applied to row vectors as x -> R x (column form).
struct Rotation {
    std::uint32_t d = 0;
    std::vector<double> m; // row-major d x d
    bool rank_deficient = false;

    static Rotation identity(std::uint32_t d);

    double at(std::uint32_t r, std::uint32_t c) const { return m[r * d + c]; }
    void apply(std::span<const double> x, std::span<double> out) const;
};

// Closed-form orthogonal Procrustes: the R minimizing ||source R^T - target||_F
// over orthogonal R, via R = U V^T with U S V^T the SVD of target^T source.
// Rank-deficient products still return a valid (flagged) minimizer.
Rotation procrustes(const Mat& source, const Mat& target); // throws DimMismatch

// ||source R^T - target||_F
double procrustes_residual(const Mat& source, const Mat& target, const Rotation& r);

// Tokens present in both vocabularies with matching kind and count >=
// anchor_min_count in both, ordered lexicographically by surface.
std::vector<std::pair<std::uint32_t, std::uint32_t>>
shared_rows(const Vocabulary& a, const Vocabulary& b, std::uint64_t anchor_min_count = 1);

struct AlignOptions {
    bool centering = true;          // mean-center shared rows before Procrustes
    std::uint64_t anchor_min_count = 1;
};

struct AlignedSeries {
    std::vector<std::int32_t> periods;
    std::vector<EmbeddingModel> models; // rotated into the frame of the last period
    std::vector<Rotation> rotations;    // applied rotation per period; last is identity

    const EmbeddingModel* model_for(std::int32_t period) const;
};

// Backward-chains Procrustes alignments so every period lands in the frame
// of the latest one. Requires >= 2 models with strictly consecutive years
// and equal dimension.
AlignedSeries align_series(std::vector<EmbeddingModel> models, const AlignOptions& opts = {});

// Audit dump: first line d, then d lines of d decimal floats.
void write_rotation(std::ostream& out, const Rotation& r);
Rotation read_rotation(std::istream& in);

} // namespace citemb
