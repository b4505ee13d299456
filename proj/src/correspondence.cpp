#include "vitdesc/correspondence.hpp"

#include "vitdesc/errors.hpp"
#include "vitdesc/parallel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace vitdesc {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMatrix normalized_rows(std::span<const float> data, std::size_t rows, std::size_t dim, const char* what) {
    RowMatrix out(rows, dim);
    for (std::size_t i = 0; i < rows; ++i) {
        double sq = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            const double v = data[i * dim + c];
            out(i, c) = v;
            sq += v * v;
        }
        if (!(sq > 0.0)) throw InputError(std::string(what) + ": zero-norm descriptor at row " + std::to_string(i));
        out.row(i) /= std::sqrt(sq);
    }
    return out;
}

RowMatrix normalized_rows(const DescriptorField& f, const char* what) {
    return normalized_rows(f.data(), f.cells(), static_cast<std::size_t>(f.dim()), what);
}

struct BestIndex {
    std::size_t index = 0;
    double value = -std::numeric_limits<double>::infinity();
};

constexpr std::size_t kBlockRows = 256;

// Row-wise and column-wise argmax of a * b^T, computed in row blocks. Ties go
// to the lowest index in both directions; blocks are merged in order so the
// result does not depend on the thread count.
void mutual_argmax(const RowMatrix& a, const RowMatrix& b, unsigned threads, std::vector<BestIndex>& row_best,
                   std::vector<BestIndex>& col_best) {
    const std::size_t n = static_cast<std::size_t>(a.rows());
    const std::size_t m = static_cast<std::size_t>(b.rows());
    const std::size_t blocks = (n + kBlockRows - 1) / kBlockRows;
    row_best.assign(n, {});
    std::vector<std::vector<BestIndex>> block_cols(blocks, std::vector<BestIndex>(m));
    parallel_for(blocks, threads, [&](std::size_t blk) {
        const std::size_t begin = blk * kBlockRows;
        const std::size_t count = std::min(kBlockRows, n - begin);
        const RowMatrix sims = a.middleRows(begin, count) * b.transpose();
        auto& cols = block_cols[blk];
        for (std::size_t i = 0; i < count; ++i) {
            BestIndex best;
            for (std::size_t j = 0; j < m; ++j) {
                const double s = sims(i, j);
                if (s > best.value) best = {j, s};
                if (s > cols[j].value) cols[j] = {begin + i, s};
            }
            row_best[begin + i] = best;
        }
    });
    col_best.assign(m, {});
    for (const auto& cols : block_cols) {
        for (std::size_t j = 0; j < m; ++j) {
            if (cols[j].value > col_best[j].value) col_best[j] = cols[j];
        }
    }
}

}  // namespace

NeighborHit nearest_neighbor(std::span<const float> query, const DescriptorMatrix& bank) {
    if (bank.rows == 0) throw InputError("nearest_neighbor: empty bank");
    if (query.size() != bank.dim) throw InputError("nearest_neighbor: dim mismatch");
    const RowMatrix q = normalized_rows(query, 1, bank.dim, "nearest_neighbor query");
    const RowMatrix rows = normalized_rows(bank.data, bank.rows, bank.dim, "nearest_neighbor bank");
    const Eigen::VectorXd sims = rows * q.row(0).transpose();
    NeighborHit hit{0, sims(0)};
    for (std::size_t i = 1; i < bank.rows; ++i) {
        if (sims(i) > hit.similarity) hit = {i, sims(i)};
    }
    return hit;
}

MatchSet best_buddies(const DescriptorField& source, const DescriptorField& target, unsigned threads) {
    if (source.dim() != target.dim()) throw InputError("best_buddies: descriptor dim mismatch");
    const RowMatrix a = normalized_rows(source, "best_buddies source");
    const RowMatrix b = normalized_rows(target, "best_buddies target");
    std::vector<BestIndex> row_best, col_best;
    mutual_argmax(a, b, threads, row_best, col_best);

    MatchSet out;
    out.src_meta = source.meta();
    out.tgt_meta = target.meta();
    const int sw = source.grid_w();
    const int tw = target.grid_w();
    for (std::size_t i = 0; i < row_best.size(); ++i) {
        const std::size_t j = row_best[i].index;
        if (col_best[j].index != i) continue;
        out.pairs.push_back({{static_cast<int>(i / sw), static_cast<int>(i % sw)},
                             {static_cast<int>(j / tw), static_cast<int>(j % tw)},
                             row_best[i].value});
    }
    return out;
}

std::vector<KeypointMatch> match_keypoints_scored(std::span<const PixelCoord> source_keypoints,
                                                 const DescriptorField& source, const DescriptorField& target,
                                                 const BinningConfig& binning, unsigned threads) {
    if (source.dim() != target.dim()) throw InputError("match_keypoints: descriptor dim mismatch");
    std::vector<GridCell> cells;
    cells.reserve(source_keypoints.size());
    for (const auto& kp : source_keypoints) cells.push_back(pixel_to_patch(kp.y, kp.x, source.meta()));

    const DescriptorField src_binned = log_bin(source, binning, threads);
    const DescriptorField tgt_binned = log_bin(target, binning, threads);
    const RowMatrix bank = normalized_rows(tgt_binned, "match_keypoints target");
    const auto d = static_cast<std::size_t>(src_binned.dim());
    const int tw = tgt_binned.grid_w();

    std::vector<KeypointMatch> out(cells.size());
    parallel_for(cells.size(), threads, [&](std::size_t k) {
        const RowMatrix q = normalized_rows(src_binned.at(cells[k].row, cells[k].col), 1, d, "match_keypoints source");
        const Eigen::VectorXd sims = bank * q.row(0).transpose();
        Eigen::Index best = 0;
        for (Eigen::Index j = 1; j < sims.size(); ++j) {
            if (sims(j) > sims(best)) best = j;
        }
        const GridCell cell{static_cast<int>(best / tw), static_cast<int>(best % tw)};
        out[k] = {cells[k], cell, patch_center_px(cell.row, cell.col, target.meta()), sims(best)};
    });
    return out;
}

std::vector<PixelCoord> match_keypoints(std::span<const PixelCoord> source_keypoints, const DescriptorField& source,
                                        const DescriptorField& target, const BinningConfig& binning,
                                        unsigned threads) {
    std::vector<PixelCoord> out;
    for (const auto& m : match_keypoints_scored(source_keypoints, source, target, binning, threads)) {
        out.push_back(m.target);
    }
    return out;
}

}  // namespace vitdesc
