#include "citemb/align.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "citemb/errors.hpp"

namespace citemb {

namespace {

constexpr double kJacobiTol = 1e-12;
constexpr int kMaxSweeps = 30;

double col_dot(const Mat& m, std::size_t p, std::size_t q) {
    double s = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) s += m.at(r, p) * m.at(r, q);
    return s;
}

void rotate_cols(Mat& m, std::size_t p, std::size_t q, double cs, double sn) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double xp = m.at(r, p);
        const double xq = m.at(r, q);
        m.at(r, p) = cs * xp - sn * xq;
        m.at(r, q) = sn * xp + cs * xq;
    }
}

} // namespace

SvdResult jacobi_svd(const Mat& m) {
    if (m.rows != m.cols) throw DimMismatch("jacobi_svd expects a square matrix");
    const std::size_t d = m.rows;

    Mat w = m;
    Mat v(d, d);
    for (std::size_t i = 0; i < d; ++i) v.at(i, i) = 1.0;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool converged = true;
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double app = col_dot(w, p, p);
                const double aqq = col_dot(w, q, q);
                const double apq = col_dot(w, p, q);
                if (app <= 0.0 || aqq <= 0.0) continue;
                if (std::abs(apq) <= kJacobiTol * std::sqrt(app * aqq)) continue;
                converged = false;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t =
                    (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                rotate_cols(w, p, q, cs, sn);
                rotate_cols(v, p, q, cs, sn);
            }
        }
        if (converged) break;
    }

    SvdResult res;
    res.v = std::move(v);
    res.u = Mat(d, d);
    res.sigma.assign(d, 0.0);

    double sigma_max = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        res.sigma[j] = std::sqrt(col_dot(w, j, j));
        sigma_max = std::max(sigma_max, res.sigma[j]);
    }
    const double tiny = sigma_max > 0.0 ? sigma_max * 1e-12 : 0.0;

    std::vector<bool> filled(d, false);
    for (std::size_t j = 0; j < d; ++j) {
        if (res.sigma[j] > tiny && res.sigma[j] > 0.0) {
            for (std::size_t r = 0; r < d; ++r) res.u.at(r, j) = w.at(r, j) / res.sigma[j];
            filled[j] = true;
        } else {
            res.rank_deficient = true;
        }
    }

    // Complete zero columns of U to an orthonormal basis (Gram-Schmidt over
    // the coordinate axes, in index order, for a deterministic outcome).
    for (std::size_t j = 0; j < d; ++j) {
        if (filled[j]) continue;
        for (std::size_t axis = 0; axis < d; ++axis) {
            std::vector<double> cand(d, 0.0);
            cand[axis] = 1.0;
            for (std::size_t k = 0; k < d; ++k) {
                if (!filled[k]) continue;
                double proj = 0.0;
                for (std::size_t r = 0; r < d; ++r) proj += cand[r] * res.u.at(r, k);
                for (std::size_t r = 0; r < d; ++r) cand[r] -= proj * res.u.at(r, k);
            }
            double norm = 0.0;
            for (const double x : cand) norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 0.5) {
                for (std::size_t r = 0; r < d; ++r) res.u.at(r, j) = cand[r] / norm;
                filled[j] = true;
                break;
            }
        }
        if (!filled[j]) throw Error("jacobi_svd failed to complete an orthonormal basis");
    }
    return res;
}

Rotation Rotation::identity(std::uint32_t d) {
    Rotation r;
    r.d = d;
    r.m.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (std::uint32_t i = 0; i < d; ++i) r.m[static_cast<std::size_t>(i) * d + i] = 1.0;
    return r;
}

void Rotation::apply(std::span<const double> x, std::span<double> out) const {
    for (std::uint32_t i = 0; i < d; ++i) {
        double s = 0.0;
        const double* row = m.data() + static_cast<std::size_t>(i) * d;
        for (std::uint32_t j = 0; j < d; ++j) s += row[j] * x[j];
        out[i] = s;
    }
}

Rotation procrustes(const Mat& source, const Mat& target) {
    if (source.cols != target.cols || source.rows != target.rows)
        throw DimMismatch("procrustes needs source and target of identical shape");
    if (source.rows == 0) throw DimMismatch("procrustes needs at least one row");
    const std::size_t d = source.cols;

    // M = target^T * source
    Mat prod(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < source.rows; ++r) s += target.at(r, i) * source.at(r, j);
            prod.at(i, j) = s;
        }

    const SvdResult svd = jacobi_svd(prod);

    Rotation rot;
    rot.d = static_cast<std::uint32_t>(d);
    rot.rank_deficient = svd.rank_deficient;
    rot.m.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += svd.u.at(i, k) * svd.v.at(j, k);
            rot.m[i * d + j] = s;
        }
    return rot;
}

double procrustes_residual(const Mat& source, const Mat& target, const Rotation& r) {
    std::vector<double> rotated(source.cols);
    double sum = 0.0;
    for (std::size_t row = 0; row < source.rows; ++row) {
        r.apply(source.row(row), rotated);
        for (std::size_t c = 0; c < source.cols; ++c) {
            const double diff = rotated[c] - target.at(row, c);
            sum += diff * diff;
        }
    }
    return std::sqrt(sum);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>>
shared_rows(const Vocabulary& a, const Vocabulary& b, std::uint64_t anchor_min_count) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t id_a = 0; id_a < a.size(); ++id_a) {
        const VocabEntry& ea = a.entry(id_a);
        if (ea.count < anchor_min_count) continue;
        const auto id_b = b.id_of(ea.surface);
        if (!id_b) continue;
        const VocabEntry& eb = b.entry(*id_b);
        if (eb.kind != ea.kind || eb.count < anchor_min_count) continue;
        pairs.emplace_back(id_a, *id_b);
    }
    if (pairs.empty()) throw EmptyIntersection("no token shared between the two vocabularies");
    std::sort(pairs.begin(), pairs.end(),
              [&a](const auto& x, const auto& y) {
                  return a.entry(x.first).surface < a.entry(y.first).surface;
              });
    return pairs;
}

const EmbeddingModel* AlignedSeries::model_for(std::int32_t period) const {
    for (std::size_t i = 0; i < periods.size(); ++i)
        if (periods[i] == period) return &models[i];
    return nullptr;
}

AlignedSeries align_series(std::vector<EmbeddingModel> models, const AlignOptions& opts) {
    if (models.size() < 2) throw Error("alignment needs at least two period models");
    for (std::size_t i = 0; i + 1 < models.size(); ++i) {
        if (models[i + 1].period != models[i].period + 1)
            throw Error("periods must be consecutive years; gap between "
                        + std::to_string(models[i].period) + " and "
                        + std::to_string(models[i + 1].period));
        if (models[i].dim != models[i + 1].dim)
            throw DimMismatch("period models differ in embedding dimension");
    }

    AlignedSeries series;
    series.models = std::move(models);
    const std::size_t n = series.models.size();
    const std::uint32_t d = series.models.front().dim;
    const std::int32_t frame = series.models.back().period;
    series.rotations.assign(n, Rotation::identity(d));
    for (auto& m : series.models) {
        series.periods.push_back(m.period);
        m.aligned = true;
        m.frame_period = frame;
    }

    std::vector<double> x(d), y(d);
    for (std::size_t t = n - 1; t-- > 0;) {
        EmbeddingModel& src = series.models[t];
        const EmbeddingModel& dst = series.models[t + 1]; // already in the final frame

        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
        try {
            pairs = shared_rows(src.vocab, dst.vocab, opts.anchor_min_count);
        } catch (const EmptyIntersection&) {
            throw EmptyIntersection("periods " + std::to_string(src.period) + " and "
                                    + std::to_string(dst.period) + " share no vocabulary");
        }

        Mat s(pairs.size(), d), tmat(pairs.size(), d);
        for (std::size_t r = 0; r < pairs.size(); ++r) {
            const auto src_row = src.input_row(pairs[r].first);
            const auto dst_row = dst.input_row(pairs[r].second);
            for (std::uint32_t c = 0; c < d; ++c) {
                s.at(r, c) = src_row[c];
                tmat.at(r, c) = dst_row[c];
            }
        }

        std::vector<double> mean_s(d, 0.0), mean_t(d, 0.0);
        if (opts.centering) {
            for (std::size_t r = 0; r < pairs.size(); ++r)
                for (std::uint32_t c = 0; c < d; ++c) {
                    mean_s[c] += s.at(r, c);
                    mean_t[c] += tmat.at(r, c);
                }
            for (std::uint32_t c = 0; c < d; ++c) {
                mean_s[c] /= static_cast<double>(pairs.size());
                mean_t[c] /= static_cast<double>(pairs.size());
            }
            for (std::size_t r = 0; r < pairs.size(); ++r)
                for (std::uint32_t c = 0; c < d; ++c) {
                    s.at(r, c) -= mean_s[c];
                    tmat.at(r, c) -= mean_t[c];
                }
        }

        const Rotation rot = procrustes(s, tmat);

        // x -> R (x - mean_s) + mean_t, applied to every row of the period.
        for (std::uint32_t id = 0; id < src.vocab.size(); ++id) {
            auto row = src.input_row(id);
            for (std::uint32_t c = 0; c < d; ++c) x[c] = static_cast<double>(row[c]) - mean_s[c];
            rot.apply(x, y);
            for (std::uint32_t c = 0; c < d; ++c) row[c] = static_cast<float>(y[c] + mean_t[c]);
        }
        series.rotations[t] = rot;
    }
    return series;
}

void write_rotation(std::ostream& out, const Rotation& r) {
    out << r.d << '\n';
    char buf[40];
    for (std::uint32_t i = 0; i < r.d; ++i) {
        for (std::uint32_t j = 0; j < r.d; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", r.at(i, j));
            out << (j ? " " : "") << buf;
        }
        out << '\n';
    }
}

Rotation read_rotation(std::istream& in) {
    Rotation r;
    in >> r.d;
    r.m.assign(static_cast<std::size_t>(r.d) * r.d, 0.0);
    for (auto& x : r.m)
        if (!(in >> x)) throw Error("truncated rotation dump");
    return r;
}

} // namespace citemb
