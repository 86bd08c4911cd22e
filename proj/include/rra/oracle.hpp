#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rra/lexicon.hpp"
#include "rra/query.hpp"
#include "rra/transform.hpp"

// Naive dense reference for the transform and for scoring. It materializes
// full |T| x |D| matrices in linear space and shares no normalization code
// with the sparse path; it exists only to check that path.
namespace rra::oracle {

inline constexpr std::size_t max_dense_cells = 10'000'000;

/// Row-major token x document matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    [[nodiscard]] double& at(std::size_t t, std::size_t d) { return data_[t * cols_ + d]; }
    [[nodiscard]] double at(std::size_t t, std::size_t d) const { return data_[t * cols_ + d]; }
    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct DenseLexicon {
    DenseMatrix weights; ///< 0 marks an absent pair
    std::vector<double> prior;
};

struct DenseRra {
    DenseMatrix l0;
    DenseMatrix s1;
    DenseMatrix l1;
};

namespace detail {

inline double neumaier(const std::vector<double>& xs) {
    double sum = 0.0;
    double c = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        c += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + c;
}

inline void guard(std::size_t rows, std::size_t cols) {
    if (rows != 0 && cols > max_dense_cells / rows) {
        throw std::length_error("dense oracle refuses to materialize more than 1e7 cells");
    }
}

} // namespace detail

inline DenseLexicon densify(const SparseLexicon& lex, const Prior& prior) {
    detail::guard(lex.n_tokens(), lex.n_docs());
    prior.check(lex.n_docs());
    DenseLexicon out{DenseMatrix(lex.n_tokens(), lex.n_docs()), {}};
    for (TokenId t = 0; t < lex.n_tokens(); ++t) {
        for (const auto& p : lex.postings(t)) {
            out.weights.at(t, p.doc) = p.value;
        }
    }
    for (DocId d = 0; d < lex.n_docs(); ++d) {
        out.prior.push_back(prior.prob(d, lex.n_docs()));
    }
    return out;
}

/// L0 column-normalized per token with the prior, S1 normalized per document
/// over all tokens, L1 prior-weighted and normalized per token.
inline DenseRra dense_rra(const DenseLexicon& dense, const PreTransform& f, double alpha) {
    const std::size_t nt = dense.weights.rows();
    const std::size_t nd = dense.weights.cols();
    detail::guard(nt, nd);
    if (dense.prior.size() != nd) {
        throw std::invalid_argument("dense prior size mismatch");
    }

    DenseRra r{DenseMatrix(nt, nd), DenseMatrix(nt, nd), DenseMatrix(nt, nd)};
    std::vector<double> buf;

    for (std::size_t t = 0; t < nt; ++t) {
        buf.assign(nd, 0.0);
        for (std::size_t d = 0; d < nd; ++d) {
            const double w = dense.weights.at(t, d);
            buf[d] = dense.prior[d] * (w != 0.0 ? f(w) : f(0.0));
        }
        const double z = detail::neumaier(buf);
        for (std::size_t d = 0; d < nd; ++d) {
            r.l0.at(t, d) = buf[d] / z;
        }
    }

    for (std::size_t d = 0; d < nd; ++d) {
        buf.assign(nt, 0.0);
        for (std::size_t t = 0; t < nt; ++t) {
            buf[t] = std::pow(r.l0.at(t, d), alpha);
        }
        const double z = detail::neumaier(buf);
        for (std::size_t t = 0; t < nt; ++t) {
            r.s1.at(t, d) = buf[t] / z;
        }
    }

    for (std::size_t t = 0; t < nt; ++t) {
        buf.assign(nd, 0.0);
        for (std::size_t d = 0; d < nd; ++d) {
            buf[d] = dense.prior[d] * r.s1.at(t, d);
        }
        const double z = detail::neumaier(buf);
        for (std::size_t d = 0; d < nd; ++d) {
            r.l1.at(t, d) = buf[d] / z;
        }
    }
    return r;
}

/// score(q, d) = sum over t of w(t,q) L1(d|t), no sparsity split.
inline std::vector<double> dense_score(const QueryVector& q, const DenseMatrix& l1) {
    std::vector<double> scores(l1.cols(), 0.0);
    std::vector<double> terms;
    for (std::size_t d = 0; d < l1.cols(); ++d) {
        terms.clear();
        for (const auto& qt : q.terms()) {
            terms.push_back(qt.weight * l1.at(qt.token, d));
        }
        scores[d] = detail::neumaier(terms);
    }
    return scores;
}

} // namespace rra::oracle
