#include "algforge/linalg.hpp"

namespace algforge {

Rref rref(QMatrix m, std::size_t cols) {
    Rref out;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t p = r;
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[r]);
        Rational inv = Rational(1) / m[r][c];
        for (auto& x : m[r]) x *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c];
            for (std::size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        out.pivots.push_back(static_cast<int>(c));
        ++r;
    }
    m.resize(r);
    out.rows = std::move(m);
    return out;
}

int rank(const QMatrix& m, std::size_t cols) { return static_cast<int>(rref(m, cols).pivots.size()); }

std::vector<QVec> kernel(const QMatrix& m, std::size_t cols) {
    Rref r = rref(m, cols);
    std::vector<bool> is_pivot(cols, false);
    for (int p : r.pivots) is_pivot[p] = true;
    std::vector<QVec> out;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        QVec v(cols, Rational(0));
        v[f] = 1;
        for (std::size_t i = 0; i < r.rows.size(); ++i) v[r.pivots[i]] = -r.rows[i][f];
        out.push_back(std::move(v));
    }
    return out;
}

bool in_span(const std::vector<QVec>& vectors, const QVec& v) {
    QMatrix m = vectors;
    int before = rank(m, v.size());
    m.push_back(v);
    return rank(m, v.size()) == before;
}

std::optional<QVec> solve(const QMatrix& a, const QVec& b) {
    std::size_t cols = a.empty() ? 0 : a[0].size();
    QMatrix aug = a;
    for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
    Rref r = rref(aug, cols + 1);
    QVec x(cols, Rational(0));
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        if (r.pivots[i] == static_cast<int>(cols)) return std::nullopt;
        x[r.pivots[i]] = r.rows[i][cols];
    }
    return x;
}

std::optional<QMatrix> inverse(const QMatrix& a) {
    std::size_t n = a.size();
    if (n == 0) return QMatrix{};
    QMatrix aug = a;
    for (std::size_t i = 0; i < n; ++i) {
        aug[i].resize(2 * n, Rational(0));
        aug[i][n + i] = 1;
    }
    Rref r = rref(aug, 2 * n);
    if (r.rows.size() < n || r.pivots[n - 1] >= static_cast<int>(n)) return std::nullopt;
    QMatrix inv(n, QVec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = r.rows[i][n + j];
    return inv;
}

GraphSpan graph_span(const std::vector<QVec>& vectors, std::size_t dim) {
    Rref r = rref(vectors, dim);
    GraphSpan g;
    g.pivots = r.pivots;
    g.basis.assign(dim, QVec(r.rows.size(), Rational(0)));
    for (std::size_t j = 0; j < r.rows.size(); ++j)
        for (std::size_t i = 0; i < dim; ++i) g.basis[i][j] = r.rows[j][i];
    return g;
}

QVec qvec_add(const QVec& a, const QVec& b) {
    QVec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

QVec qvec_scale(const Rational& c, const QVec& a) {
    QVec r = a;
    for (auto& x : r) x *= c;
    return r;
}

bool qvec_is_zero(const QVec& a) {
    for (auto& x : a)
        if (x != 0) return false;
    return true;
}

}  // namespace algforge
