#pragma once

#include <optional>
#include <vector>

#include "algforge/expr.hpp"

namespace algforge {

using QVec = std::vector<Rational>;
using QMatrix = std::vector<QVec>;  // row-major

struct Rref {
    QMatrix rows;             // nonzero rows only
    std::vector<int> pivots;  // pivot column of each row
};

Rref rref(QMatrix m, std::size_t cols);
int rank(const QMatrix& m, std::size_t cols);
// Basis of {x : m x = 0}.
std::vector<QVec> kernel(const QMatrix& m, std::size_t cols);
bool in_span(const std::vector<QVec>& vectors, const QVec& v);
std::optional<QVec> solve(const QMatrix& a, const QVec& b);
std::optional<QMatrix> inverse(const QMatrix& a);

// Span of `vectors` in reduced graph form: column j of `basis` is 1 at pivots[j],
// 0 at the other pivots.
struct GraphSpan {
    std::vector<int> pivots;
    QMatrix basis;  // dim × r
};
GraphSpan graph_span(const std::vector<QVec>& vectors, std::size_t dim);

QVec qvec_add(const QVec& a, const QVec& b);
QVec qvec_scale(const Rational& c, const QVec& a);
bool qvec_is_zero(const QVec& a);

}  // namespace algforge
