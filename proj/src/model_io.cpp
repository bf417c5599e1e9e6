#include "algforge/model_io.hpp"

#include <toml.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "algforge/graded.hpp"
#include "algforge/mechanics.hpp"

namespace algforge {

namespace {

void only_keys(const toml::table& t, const std::string& where, const std::set<std::string>& allowed) {
    for (auto& [k, v] : t)
        if (!allowed.count(std::string(k.str()))) throw SchemaError("unknown key '" + std::string(k.str()) + "' in " + where);
}

const toml::table& as_table(const toml::node& n, const std::string& where) {
    if (auto* t = n.as_table()) return *t;
    throw SchemaError(where + " must be a table");
}

const toml::array& as_array(const toml::node& n, const std::string& where) {
    if (auto* a = n.as_array()) return *a;
    throw SchemaError(where + " must be an array");
}

std::string text_of(const toml::node& n, const std::string& where) {
    if (auto s = n.value<std::string>()) return *s;
    if (n.is_integer()) return std::to_string(*n.value<int64_t>());
    throw SchemaError(where + " must be a string or an integer");
}

Rational rational_of(const toml::node& n, const std::string& where) {
    try {
        return parse_rational(text_of(n, where));
    } catch (const ParseError& e) {
        throw SchemaError(where + ": " + e.what());
    }
}

double double_of(const toml::node& n, const std::string& where) {
    if (auto d = n.value<double>()) return *d;
    throw SchemaError(where + " must be a number");
}

int int_of(const toml::node& n, const std::string& where) {
    if (auto i = n.value<int64_t>()) return static_cast<int>(*i);
    throw SchemaError(where + " must be an integer");
}

Poly poly_of(const toml::node& n, const std::string& where, const std::set<Symbol>* allowed = nullptr) {
    Poly p;
    try {
        p = parse_poly(text_of(n, where));
    } catch (const ParseError& e) {
        throw SchemaError(where + ": " + e.what());
    }
    if (allowed)
        for (auto& s : p.symbols())
            if (!allowed->count(s)) throw SchemaError(where + " uses " + s.str() + ", which is not a base coordinate");
    return p;
}

PolyVec poly_list(const toml::node& n, const std::string& where, const std::set<Symbol>* allowed = nullptr) {
    PolyVec out;
    const auto& a = as_array(n, where);
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(poly_of(a[i], where + "[" + std::to_string(i) + "]", allowed));
    return out;
}

PolyMatrix dense_matrix(const toml::node& n, std::size_t rows, std::size_t cols, const std::string& where,
                        const std::set<Symbol>& allowed) {
    const auto& a = as_array(n, where);
    if (a.size() != rows) throw SchemaError(where + " needs " + std::to_string(rows) + " rows");
    PolyMatrix m;
    for (std::size_t r = 0; r < rows; ++r) {
        PolyVec row = poly_list(a[r], where + "[" + std::to_string(r) + "]", &allowed);
        if (row.size() != cols) throw SchemaError(where + " row " + std::to_string(r + 1) + " needs " + std::to_string(cols) + " entries");
        m.push_back(std::move(row));
    }
    return m;
}

std::vector<int> index_key(std::string_view key, std::size_t arity, const std::vector<int>& bounds, const std::string& where) {
    std::vector<int> idx;
    std::stringstream ss{std::string(key)};
    std::string part;
    while (std::getline(ss, part, '.')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
            idx.push_back(v - 1);
        } catch (const std::exception&) {
            throw SchemaError("bad index key '" + std::string(key) + "' in " + where);
        }
    }
    if (idx.size() != arity) throw SchemaError("index key '" + std::string(key) + "' in " + where + " needs " + std::to_string(arity) + " indices");
    for (std::size_t i = 0; i < arity; ++i)
        if (idx[i] < 0 || idx[i] >= bounds[i]) throw SchemaError("index out of range in '" + std::string(key) + "' of " + where);
    return idx;
}

// Sparse family: keys "i.j.k" (1-based) with polynomial values.
void sparse_family(const toml::table* t, std::size_t arity, const std::vector<int>& bounds, const std::string& where,
                   const std::set<Symbol>& allowed, const std::function<Poly&(const std::vector<int>&)>& slot,
                   const std::function<Poly*(const std::vector<int>&)>& mirror = {}) {
    if (!t) return;
    for (auto& [k, v] : *t) {
        auto idx = index_key(k.str(), arity, bounds, where);
        Poly p = poly_of(v, where + "." + std::string(k.str()), &allowed);
        slot(idx) = p;
        if (mirror)
            if (Poly* other = mirror(idx); other) {
                if (!other->is_zero() && *other != p) throw SchemaError(where + " is symmetric but '" + std::string(k.str()) + "' disagrees with its mirror");
                *other = p;
            }
    }
}

std::string join(const std::vector<int>& idx) {
    std::string s;
    for (int i : idx) s += (s.empty() ? "" : ".") + std::to_string(i + 1);
    return s;
}

ChartSpec parse_chart(const toml::table& t) {
    only_keys(t, "[chart]", {"base", "fiber"});
    ChartSpec c;
    if (auto* b = t.get("base")) {
        const auto& a = as_array(*b, "chart.base");
        for (std::size_t i = 0; i < a.size(); ++i) {
            Symbol s = parse_symbol(text_of(a[i], "chart.base entry"));
            // jet coordinates x.dα of a lifted base carry weight α
            c.base.push_back(s.with_weight(s.jet));
        }
    }
    if (auto* f = t.get("fiber")) {
        const auto& a = as_array(*f, "chart.fiber");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const auto& e = as_table(a[i], "chart.fiber entry");
            only_keys(e, "chart.fiber entry", {"name", "weight"});
            auto* name = e.get("name");
            auto* weight = e.get("weight");
            if (!name || !weight) throw SchemaError("chart.fiber entries need name and weight");
            int w = int_of(*weight, "chart.fiber weight");
            if (w < 1) throw SchemaError("fiber weights must be positive");
            c.fiber.push_back(parse_symbol(text_of(*name, "chart.fiber name")).with_weight(w));
        }
    }
    std::set<std::string> seen;
    for (auto& s : c.base)
        if (!seen.insert(s.str()).second) throw SchemaError("duplicate coordinate " + s.str());
    for (auto& s : c.fiber)
        if (!seen.insert(s.str()).second) throw SchemaError("duplicate coordinate " + s.str());
    return c;
}

std::pair<int, int> fiber_ranks(const ChartSpec& c) {
    int n = 0, p = 0;
    for (auto& s : c.fiber) {
        if (s.weight == 1) ++n;
        else if (s.weight == 2) ++p;
        else throw SchemaError("fiber weights must be 1 or 2, got " + std::to_string(s.weight) + " for " + s.name);
    }
    return {n, p};
}

Algebroid1 parse_algebroid(const toml::table& t, const ChartSpec& chart) {
    only_keys(t, "[algebroid]", {"anchor_left", "anchor_right", "bracket", "skew"});
    auto [n, p] = fiber_ranks(chart);
    if (p != 0) throw SchemaError("[algebroid] needs a fiber of weight 1 only");
    const int m = static_cast<int>(chart.base.size());
    std::set<Symbol> allowed(chart.base.begin(), chart.base.end());
    Algebroid1 A = zero_algebroid(chart.base, n);
    if (auto* l = t.get("anchor_left")) A.QL = dense_matrix(*l, m, n, "algebroid.anchor_left", allowed);
    A.QR = A.QL;
    if (auto* r = t.get("anchor_right")) A.QR = dense_matrix(*r, m, n, "algebroid.anchor_right", allowed);
    bool skew = false;
    if (auto* s = t.get("skew")) {
        auto b = s->value<bool>();
        if (!b) throw SchemaError("algebroid.skew must be a boolean");
        skew = *b;
    }
    const toml::table* br = nullptr;
    if (auto* b = t.get("bracket")) br = &as_table(*b, "algebroid.bracket");
    sparse_family(br, 3, {n, n, n}, "algebroid.bracket", allowed,
                  [&](const std::vector<int>& i) -> Poly& { return A.Qbr[i[0]][i[1]][i[2]]; });
    if (skew && br) {
        std::set<std::tuple<int, int, int>> given;
        for (auto& [k, v] : *br) {
            auto idx = index_key(k.str(), 3, {n, n, n}, "algebroid.bracket");
            given.emplace(idx[0], idx[1], idx[2]);
        }
        for (auto& [k, i, j] : given) {
            if (!given.count({k, j, i})) A.Qbr[k][j][i] = -A.Qbr[k][i][j];
            else if (A.Qbr[k][j][i] != -A.Qbr[k][i][j])
                throw SchemaError("skew bracket entries " + join({k, i, j}) + " and " + join({k, j, i}) + " disagree");
        }
    }
    A.validate();
    return A;
}

HA2 parse_ha2(const toml::table& t, const ChartSpec& chart) {
    static const std::set<std::string> families = {"Q_a_i", "Q_a_ij", "Q_a_mu", "Qp_a_i", "Q_i_jk",
                                                   "Q_mu_i", "Q_mu_ij", "Q_mu_nui", "Q_mu_ijk"};
    only_keys(t, "[ha2]", families);
    auto [n, p] = fiber_ranks(chart);
    const int m = static_cast<int>(chart.base.size());
    std::set<Symbol> allowed(chart.base.begin(), chart.base.end());
    HA2 ha = zero_ha2(chart.base, n, p);
    auto fam = [&](const char* name) -> const toml::table* {
        if (auto* f = t.get(name)) return &as_table(*f, std::string("ha2.") + name);
        return nullptr;
    };
    using I = std::vector<int>;
    sparse_family(fam("Q_a_i"), 2, {m, n}, "ha2.Q_a_i", allowed, [&](const I& i) -> Poly& { return ha.Qa_i[i[0]][i[1]]; });
    sparse_family(
        fam("Q_a_ij"), 3, {m, n, n}, "ha2.Q_a_ij", allowed, [&](const I& i) -> Poly& { return ha.Qa_ij[i[0]][i[1]][i[2]]; },
        [&](const I& i) -> Poly* { return i[1] == i[2] ? nullptr : &ha.Qa_ij[i[0]][i[2]][i[1]]; });
    sparse_family(fam("Q_a_mu"), 2, {m, p}, "ha2.Q_a_mu", allowed, [&](const I& i) -> Poly& { return ha.Qa_mu[i[0]][i[1]]; });
    sparse_family(fam("Qp_a_i"), 2, {m, n}, "ha2.Qp_a_i", allowed, [&](const I& i) -> Poly& { return ha.Qpa_i[i[0]][i[1]]; });
    sparse_family(fam("Q_i_jk"), 3, {n, n, n}, "ha2.Q_i_jk", allowed, [&](const I& i) -> Poly& { return ha.Qi_jk[i[0]][i[1]][i[2]]; });
    sparse_family(fam("Q_mu_i"), 2, {p, n}, "ha2.Q_mu_i", allowed, [&](const I& i) -> Poly& { return ha.Qmu_i[i[0]][i[1]]; });
    sparse_family(fam("Q_mu_ij"), 3, {p, n, n}, "ha2.Q_mu_ij", allowed, [&](const I& i) -> Poly& { return ha.Qmu_ij[i[0]][i[1]][i[2]]; });
    sparse_family(fam("Q_mu_nui"), 3, {p, p, n}, "ha2.Q_mu_nui", allowed, [&](const I& i) -> Poly& { return ha.Qmu_nui[i[0]][i[1]][i[2]]; });
    sparse_family(
        fam("Q_mu_ijk"), 4, {p, n, n, n}, "ha2.Q_mu_ijk", allowed,
        [&](const I& i) -> Poly& { return ha.Qmu_ijk[i[0]][i[3]][i[1]][i[2]]; },
        [&](const I& i) -> Poly* { return i[1] == i[2] ? nullptr : &ha.Qmu_ijk[i[0]][i[3]][i[2]][i[1]]; });
    ha.validate();
    return ha;
}

LieSpec parse_lie(const toml::table& t) {
    only_keys(t, "[liealgebra]", {"dim", "c", "admit_non_lie", "subspace"});
    auto* d = t.get("dim");
    if (!d) throw SchemaError("[liealgebra] needs dim");
    const int n = int_of(*d, "liealgebra.dim");
    if (n < 1) throw SchemaError("liealgebra.dim must be positive");
    Constants c(n, std::vector<QVec>(n, QVec(n, Rational(0))));
    std::set<std::tuple<int, int, int>> given;
    if (auto* cs = t.get("c")) {
        const auto& a = as_array(*cs, "liealgebra.c");
        for (std::size_t e = 0; e < a.size(); ++e) {
            std::string where = "liealgebra.c[" + std::to_string(e) + "]";
            const auto& row = as_array(a[e], where);
            if (row.size() != 4) throw SchemaError(where + " must be [k, i, j, value]");
            int k = int_of(row[0], where) - 1, i = int_of(row[1], where) - 1, j = int_of(row[2], where) - 1;
            if (k < 0 || k >= n || i < 0 || i >= n || j < 0 || j >= n) throw SchemaError(where + " index out of range");
            c[k][i][j] = rational_of(row[3], where);
            given.emplace(k, i, j);
        }
    }
    // c^k_{ji} defaults to −c^k_{ij}
    for (auto& [k, i, j] : given)
        if (!given.count({k, j, i})) c[k][j][i] = -c[k][i][j];
    LieSpec s;
    if (auto* b = t.get("admit_non_lie")) {
        auto v = b->value<bool>();
        if (!v) throw SchemaError("liealgebra.admit_non_lie must be a boolean");
        s.admit_non_lie = *v;
    }
    s.g = LieAlgebraModel::make(c, s.admit_non_lie);
    if (auto* sub = t.get("subspace")) {
        const auto& st = as_table(*sub, "liealgebra.subspace");
        auto* kk = st.get("k");
        if (!kk) throw SchemaError("liealgebra.subspace needs k");
        const int k = int_of(*kk, "liealgebra.subspace.k");
        if (k < 1) throw SchemaError("liealgebra.subspace.k must be positive");
        std::set<std::string> allowed = {"k"};
        for (int i = 0; i < k; ++i) allowed.insert("V" + std::to_string(i));
        only_keys(st, "liealgebra.subspace", allowed);
        GradedSubspace V(k);
        for (int i = 0; i < k; ++i) {
            std::string key = "V" + std::to_string(i);
            auto* vi = st.get(key);
            if (!vi) continue;  // V_i = 0
            const auto& rows = as_array(*vi, "liealgebra.subspace." + key);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto& vec = as_array(rows[r], "liealgebra.subspace." + key);
                if (static_cast<int>(vec.size()) != n) throw SchemaError("subspace vectors need " + std::to_string(n) + " entries");
                QVec v;
                for (std::size_t q = 0; q < vec.size(); ++q) v.push_back(rational_of(vec[q], "liealgebra.subspace." + key));
                V[i].push_back(v);
            }
        }
        s.subspace = V;
    }
    return s;
}

LagrangianSpec parse_lagrangian(const toml::table& t) {
    only_keys(t, "[lagrangian]", {"L", "form", "reconstruct", "conserved", "symmetry"});
    LagrangianSpec l;
    auto* L = t.get("L");
    if (!L) throw SchemaError("[lagrangian] needs L");
    l.L = poly_of(*L, "lagrangian.L");
    if (auto* f = t.get("form")) {
        l.form = text_of(*f, "lagrangian.form");
        static const std::set<std::string> forms = {"prolong2", "ep", "standard", "reduced"};
        if (!forms.count(l.form)) throw SchemaError("lagrangian.form must be prolong2, ep, standard or reduced");
    }
    if (auto* r = t.get("reconstruct")) l.reconstruct = poly_list(*r, "lagrangian.reconstruct");
    if (auto* c = t.get("conserved")) l.conserved = poly_list(*c, "lagrangian.conserved");
    if (auto* s = t.get("symmetry")) l.symmetry = poly_list(*s, "lagrangian.symmetry");
    return l;
}

CurvesSpec parse_curves(const toml::table& t) {
    only_keys(t, "[curves]", {"initial", "h", "T", "exact"});
    CurvesSpec c;
    if (auto* i = t.get("initial"))
        for (auto& [k, v] : as_table(*i, "curves.initial")) c.initial[std::string(k.str())] = double_of(v, "curves.initial." + std::string(k.str()));
    if (auto* h = t.get("h")) c.h = double_of(*h, "curves.h");
    if (auto* T = t.get("T")) c.T = double_of(*T, "curves.T");
    if (auto* e = t.get("exact"))
        for (auto& [k, v] : as_table(*e, "curves.exact")) {
            Poly p = poly_of(v, "curves.exact." + std::string(k.str()));
            for (auto& s : p.symbols())
                if (s != time_symbol()) throw SchemaError("curves.exact entries are polynomials in t");
            c.exact[std::string(k.str())] = p;
        }
    return c;
}

}  // namespace

const Algebroid1& Model::need_algebroid() const {
    if (!algebroid) throw MissingSection("model has no [algebroid] section");
    return *algebroid;
}
const HA2& Model::need_ha2() const {
    if (!ha2) throw MissingSection("model has no [ha2] section");
    return *ha2;
}
const LieSpec& Model::need_liealgebra() const {
    if (!liealgebra) throw MissingSection("model has no [liealgebra] section");
    return *liealgebra;
}
const LagrangianSpec& Model::need_lagrangian() const {
    if (!lagrangian) throw MissingSection("model has no [lagrangian] section");
    return *lagrangian;
}
const CurvesSpec& Model::need_curves() const {
    if (!curves) throw MissingSection("model has no [curves] section");
    return *curves;
}
const ChartSpec& Model::need_chart() const {
    if (!chart) throw MissingSection("model has no [chart] section");
    return *chart;
}

Model parse_model(std::string_view text, const std::string& origin) {
    toml::table doc;
    try {
        doc = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream o;
        o << origin << ":" << e.source().begin.line << ": " << e.description();
        throw SchemaError(o.str());
    }
    only_keys(doc, "the model file", {"chart", "algebroid", "ha2", "liealgebra", "lagrangian", "curves"});
    Model m;
    if (auto* c = doc.get("chart")) m.chart = parse_chart(as_table(*c, "[chart]"));
    if (auto* a = doc.get("algebroid")) {
        if (!m.chart) throw MissingSection("[algebroid] needs a [chart] section");
        m.algebroid = parse_algebroid(as_table(*a, "[algebroid]"), *m.chart);
    }
    if (auto* h = doc.get("ha2")) {
        if (!m.chart) throw MissingSection("[ha2] needs a [chart] section");
        m.ha2 = parse_ha2(as_table(*h, "[ha2]"), *m.chart);
    }
    if (m.algebroid && m.ha2) throw SchemaError("a model holds either [algebroid] or [ha2], not both");
    if (auto* l = doc.get("liealgebra")) m.liealgebra = parse_lie(as_table(*l, "[liealgebra]"));
    if (auto* l = doc.get("lagrangian")) m.lagrangian = parse_lagrangian(as_table(*l, "[lagrangian]"));
    if (auto* c = doc.get("curves")) m.curves = parse_curves(as_table(*c, "[curves]"));
    return m;
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str(), path);
}

namespace {

toml::array poly_array(const PolyVec& v) {
    toml::array a;
    for (auto& p : v) a.push_back(p.str());
    return a;
}

toml::array rational_array(const QVec& v) {
    toml::array a;
    for (auto& q : v) a.push_back(to_string(q));
    return a;
}

void put_sparse(toml::table& t, const std::string& key, const std::vector<std::pair<std::vector<int>, Poly>>& entries) {
    toml::table f;
    for (auto& [idx, p] : entries)
        if (!p.is_zero()) f.insert(join(idx), p.str());
    if (!f.empty()) t.insert(key, std::move(f));
}

}  // namespace

std::string dump_model(const Model& m) {
    toml::table doc;
    if (m.chart) {
        toml::table c;
        toml::array base, fiber;
        for (auto& s : m.chart->base) base.push_back(s.str());
        for (auto& s : m.chart->fiber) fiber.push_back(toml::table{{"name", s.str()}, {"weight", s.weight}});
        c.insert("base", base);
        c.insert("fiber", fiber);
        doc.insert("chart", std::move(c));
    }
    if (m.algebroid) {
        const auto& A = *m.algebroid;
        toml::table t;
        toml::array l, r;
        for (auto& row : A.QL) l.push_back(poly_array(row));
        for (auto& row : A.QR) r.push_back(poly_array(row));
        t.insert("anchor_left", l);
        t.insert("anchor_right", r);
        std::vector<std::pair<std::vector<int>, Poly>> e;
        for (int k = 0; k < A.n; ++k)
            for (int i = 0; i < A.n; ++i)
                for (int j = 0; j < A.n; ++j) e.push_back({{k, i, j}, A.Qbr[k][i][j]});
        put_sparse(t, "bracket", e);
        doc.insert("algebroid", std::move(t));
    }
    if (m.ha2) {
        const auto& h = *m.ha2;
        const int mm = h.m(), n = h.n, p = h.p;
        toml::table t;
        using E = std::vector<std::pair<std::vector<int>, Poly>>;
        E qai, qaij, qamu, qpai, qijk, qmui, qmuij, qmunui, qmuijk;
        for (int a = 0; a < mm; ++a) {
            for (int i = 0; i < n; ++i) {
                qai.push_back({{a, i}, h.Qa_i[a][i]});
                qpai.push_back({{a, i}, h.Qpa_i[a][i]});
                for (int j = i; j < n; ++j) qaij.push_back({{a, i, j}, h.Qa_ij[a][i][j]});
            }
            for (int mu = 0; mu < p; ++mu) qamu.push_back({{a, mu}, h.Qa_mu[a][mu]});
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) qijk.push_back({{i, j, k}, h.Qi_jk[i][j][k]});
        for (int mu = 0; mu < p; ++mu) {
            for (int i = 0; i < n; ++i) {
                qmui.push_back({{mu, i}, h.Qmu_i[mu][i]});
                for (int j = 0; j < n; ++j) qmuij.push_back({{mu, i, j}, h.Qmu_ij[mu][i][j]});
                for (int j = i; j < n; ++j)
                    for (int k = 0; k < n; ++k) qmuijk.push_back({{mu, i, j, k}, h.Qmu_ijk[mu][k][i][j]});
            }
            for (int nu = 0; nu < p; ++nu)
                for (int i = 0; i < n; ++i) qmunui.push_back({{mu, nu, i}, h.Qmu_nui[mu][nu][i]});
        }
        put_sparse(t, "Q_a_i", qai);
        put_sparse(t, "Q_a_ij", qaij);
        put_sparse(t, "Q_a_mu", qamu);
        put_sparse(t, "Qp_a_i", qpai);
        put_sparse(t, "Q_i_jk", qijk);
        put_sparse(t, "Q_mu_i", qmui);
        put_sparse(t, "Q_mu_ij", qmuij);
        put_sparse(t, "Q_mu_nui", qmunui);
        put_sparse(t, "Q_mu_ijk", qmuijk);
        doc.insert("ha2", std::move(t));
    }
    if (m.liealgebra) {
        const auto& g = m.liealgebra->g;
        toml::table t;
        t.insert("dim", g.n);
        toml::array c;
        for (int k = 0; k < g.n; ++k)
            for (int i = 0; i < g.n; ++i)
                for (int j = i + 1; j < g.n; ++j)
                    if (g.c[k][i][j] != 0) c.push_back(toml::array{k + 1, i + 1, j + 1, to_string(g.c[k][i][j])});
        t.insert("c", c);
        if (m.liealgebra->admit_non_lie) t.insert("admit_non_lie", true);
        if (m.liealgebra->subspace) {
            const auto& V = *m.liealgebra->subspace;
            toml::table s;
            s.insert("k", static_cast<int64_t>(V.size()));
            for (std::size_t i = 0; i < V.size(); ++i) {
                toml::array rows;
                for (auto& v : V[i]) rows.push_back(rational_array(v));
                s.insert("V" + std::to_string(i), rows);
            }
            t.insert("subspace", std::move(s));
        }
        doc.insert("liealgebra", std::move(t));
    }
    if (m.lagrangian) {
        const auto& l = *m.lagrangian;
        toml::table t;
        t.insert("L", l.L.str());
        if (!l.form.empty()) t.insert("form", l.form);
        if (!l.reconstruct.empty()) t.insert("reconstruct", poly_array(l.reconstruct));
        if (!l.conserved.empty()) t.insert("conserved", poly_array(l.conserved));
        if (l.symmetry) t.insert("symmetry", poly_array(*l.symmetry));
        doc.insert("lagrangian", std::move(t));
    }
    if (m.curves) {
        const auto& c = *m.curves;
        toml::table t;
        toml::table init, exact;
        for (auto& [k, v] : c.initial) init.insert(k, v);
        for (auto& [k, v] : c.exact) exact.insert(k, v.str());
        if (!init.empty()) t.insert("initial", std::move(init));
        if (c.h) t.insert("h", *c.h);
        if (c.T) t.insert("T", *c.T);
        if (!exact.empty()) t.insert("exact", std::move(exact));
        doc.insert("curves", std::move(t));
    }
    std::ostringstream o;
    o << doc << "\n";
    return o.str();
}

Model model_of(const Algebroid1& A) {
    Model m;
    m.chart = ChartSpec{A.base, indexed("y", A.n, 0, 1)};
    m.algebroid = A;
    return m;
}

Model model_of(const HA2& ha) {
    Model m;
    SymbolList fiber = indexed("y", ha.n, 0, 1);
    for (auto& s : indexed("z", ha.p, 0, 2)) fiber.push_back(s);
    m.chart = ChartSpec{ha.base, fiber};
    m.ha2 = ha;
    return m;
}

}  // namespace algforge
