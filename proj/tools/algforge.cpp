#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "algforge/algebroid.hpp"
#include "algforge/higher.hpp"
#include "algforge/liegroup.hpp"
#include "algforge/mechanics.hpp"
#include "algforge/model_io.hpp"
#include "algforge/report.hpp"

using namespace algforge;

namespace {

struct Options {
    std::string model;
    bool json = false;
    std::string which;
    std::string form;
    bool latex = false;
    std::string out;
    std::optional<double> h, T;
    double tol = 1e-6;
    int k = 0;
    std::string section;
    int alpha = 0;
    int samples = 5;
};

std::uint64_t seed_from_env() {
    const char* s = std::getenv("ALGFORGE_SEED");
    if (!s || !*s) return 20261016;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (*end) throw SchemaError(std::string("ALGFORGE_SEED must be a non-negative integer, got '") + s + "'");
    return v;
}

Rational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-5, 5), den(1, 3);
    Rational q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

QVec random_vec(std::mt19937_64& rng, std::size_t n) {
    QVec v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(random_rational(rng));
    return v;
}

std::string vec_str(const QVec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
    return s + ")";
}

void write_atomically(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw SchemaError("cannot write " + path);
        f << content;
    }
    std::filesystem::rename(tmp, path);
}

Report from_check(const std::string& name, const CheckResult& r) {
    Report rep;
    rep.check = name;
    rep.pass = r.ok;
    rep.witness = r.witness;
    if (!r.ok && !r.residual.is_zero()) rep.add("residual", r.residual.str());
    return rep;
}

Algebroid1 order1_of(const Model& m) {
    if (m.algebroid) return *m.algebroid;
    if (m.liealgebra) return to_algebroid(m.liealgebra->g);
    throw MissingSection("model has neither [algebroid] nor [liealgebra]");
}

CheckResult jacobi_bruteforce(const Algebroid1& A) {
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j)
            for (int k = 0; k < A.n; ++k) {
                Section1 J = jacobiator(A, basis_section(A.n, i), basis_section(A.n, j), basis_section(A.n, k));
                for (int c = 0; c < A.n; ++c)
                    if (!J[c].is_zero())
                        return CheckResult::fail("Jacobiator of (e" + std::to_string(i + 1) + ", e" + std::to_string(j + 1) + ", e" +
                                                     std::to_string(k + 1) + ") has component " + std::to_string(c + 1) + " = " + J[c].str(),
                                                 J[c]);
            }
    return CheckResult::pass();
}

Report cmd_check(const Model& m, const Options& o, std::mt19937_64& rng) {
    const std::string& w = o.which;
    if (w == "strong") {
        const HA2& ha = m.need_ha2();
        std::vector<QVec> pts;
        for (int i = 0; i < o.samples; ++i) pts.push_back(random_vec(rng, ha.m()));
        return from_check("strong", is_strong(ha, pts));
    }
    if (m.ha2 && (w == "skew" || w == "al" || w == "lie")) {
        if (w == "skew") return from_check("skew", is_skew2(*m.ha2));
        if (w == "al") return from_check("al", al_check2(*m.ha2));
        int count = 0;
        Report r = from_check("lie", lie_check2(*m.ha2, &count));
        r.add("identities", std::to_string(count));
        return r;
    }
    if (w == "jacobi" && m.liealgebra && !m.algebroid) return from_check("jacobi", m.liealgebra->g.jacobi());
    Algebroid1 A = order1_of(m);
    if (w == "skew") return from_check("skew", is_skew(A));
    if (w == "al") return from_check("al", is_almost_lie(A));
    if (w == "lie") return from_check("lie", is_lie(A));
    if (w == "jacobi") return from_check("jacobi", jacobi_bruteforce(A));
    if (w == "leibniz") {
        CheckResult r = leibniz_check(A);
        if (r) {
            // one more pair of seeded test functions
            Poly f = Poly(random_rational(rng)), g = Poly(random_rational(rng));
            for (auto& x : A.base) {
                f += Poly(random_rational(rng)) * Poly(x) * Poly(x);
                g += Poly(random_rational(rng)) * Poly(x);
            }
            r = leibniz_check(A, f, g);
        }
        return from_check("leibniz", r);
    }
    throw SchemaError("--which must be skew, al, lie, strong, leibniz or jacobi");
}

ELSystem build_el(const Model& m, const std::string& form, Algebroid1* A_out = nullptr) {
    const LagrangianSpec& l = m.need_lagrangian();
    Lagrangian L{l.L};
    if (form == "prolong2") {
        Algebroid1 A = order1_of(m);
        if (A_out) *A_out = A;
        return el_prolong2(A, L);
    }
    if (form == "ep") {
        const LieSpec& g = m.need_liealgebra();
        if (A_out) *A_out = to_algebroid(g.g);
        return euler_poincare2(g.g, L);
    }
    if (form == "standard") return standard_el2(L, m.need_chart().base);
    if (form == "reduced") return reduced_example_el(L);
    throw SchemaError("--form must be prolong2, ep, standard or reduced");
}

std::string resolve_form(const Model& m, const Options& o) {
    if (!o.form.empty()) return o.form;
    if (m.lagrangian && !m.lagrangian->form.empty()) return m.lagrangian->form;
    if (m.algebroid) return "prolong2";
    if (m.liealgebra) return "ep";
    return "standard";
}

int cmd_el(const Model& m, const Options& o, const std::string& forced = "") {
    std::string form = forced.empty() ? resolve_form(m, o) : forced;
    Algebroid1 A;
    ELSystem el = build_el(m, form, &A);
    std::cout << (o.latex ? el.latex() : el.str());
    if (!forced.empty() && !o.latex && m.lagrangian->symmetry) {
        const Section1& s = *m.lagrangian->symmetry;
        Lagrangian L{m.lagrangian->L};
        if (form == "ep") {
            std::map<Symbol, Symbol> to_y, to_a;
            for (int i = 1; i <= A.n; ++i)
                for (int j = 0; j <= 2; ++j) {
                    to_y[Symbol("a" + std::to_string(i), j)] = Symbol("y" + std::to_string(i), j);
                    to_a[Symbol("y" + std::to_string(i), j)] = Symbol("a" + std::to_string(i), j);
                }
            L.L = rename(L.L, to_y);
            std::cout << "symmetry defect: " << rename(symmetry_defect(A, L, s), to_a).str() << "\n";
        } else {
            std::cout << "symmetry defect: " << symmetry_defect(A, L, s).str() << "\n";
        }
        std::cout << "conserved: " << conserved_quantity(A, el, s).str() << "\n";
    }
    return 0;
}

Report cmd_integrate(const Model& m, const Options& o) {
    const CurvesSpec& c = m.need_curves();
    const LagrangianSpec& l = m.need_lagrangian();
    std::string form = resolve_form(m, o);
    Algebroid1 A;
    ELSystem el = build_el(m, form, &A);
    OdeSystem ode = assemble_ode(el, l.reconstruct);

    std::vector<double> y0;
    for (auto& s : ode.state) {
        auto it = c.initial.find(s.str());
        if (it == c.initial.end()) throw SchemaError("missing initial value for " + s.str());
        y0.push_back(it->second);
    }
    for (auto& [k, v] : c.initial) {
        bool known = false;
        for (auto& s : ode.state) known |= s.str() == k;
        if (!known) throw SchemaError("initial value for " + k + ", which is not a state variable");
    }
    double h = o.h ? *o.h : c.h.value_or(1e-3);
    double T = o.T ? *o.T : c.T.value_or(1.0);

    PolyVec quantities = l.conserved;
    if (l.symmetry) {
        if (form != "prolong2" && form != "ep") throw SchemaError("symmetry generators need form prolong2 or ep");
        quantities.push_back(conserved_quantity(A, el, *l.symmetry));
    }

    NumTrajectory tr = integrate_rk4(ode, y0, h, T);
    auto res = residual_series(ode, tr);
    std::vector<std::vector<double>> cons(tr.t.size());
    Report rep;
    rep.check = "integrate";
    rep.add("form", form);
    rep.add("steps", std::to_string(tr.t.size() - 1));
    char buf[64];
    double worst = max_abs(res);
    std::snprintf(buf, sizeof buf, "%.3e", worst);
    rep.add("max_residual", buf);
    if (worst > o.tol) {
        rep.pass = false;
        rep.witness = std::string("residual ") + buf + " above tolerance";
    }
    for (std::size_t q = 0; q < quantities.size(); ++q) {
        auto series = quantity_series(quantities[q], ode, tr);
        double dev = 0;
        for (std::size_t i = 0; i < series.size(); ++i) {
            cons[i].push_back(series[i]);
            dev = std::max(dev, std::fabs(series[i] - series.front()));
        }
        std::snprintf(buf, sizeof buf, "%.3e", dev);
        rep.add("conservation_" + std::to_string(q + 1), quantities[q].str() + " deviates " + buf);
        if (dev > o.tol && rep.pass) {
            rep.pass = false;
            rep.witness = "quantity " + std::to_string(q + 1) + " deviates " + buf;
        }
    }
    for (auto& [name, p] : c.exact) {
        std::size_t col = tr.names.size();
        for (std::size_t i = 0; i < tr.names.size(); ++i)
            if (tr.names[i].str() == name) col = i;
        if (col == tr.names.size()) throw SchemaError("exact solution for unknown state " + name);
        double err = 0;
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            double ref = poly_eval_double(p, {{time_symbol(), tr.t[i]}});
            err = std::max(err, std::fabs(tr.states[i][col] - ref));
        }
        std::snprintf(buf, sizeof buf, "%.3e", err);
        rep.add("exact_error_" + name, buf);
        if (err > o.tol && rep.pass) {
            rep.pass = false;
            rep.witness = name + " misses the exact solution by " + buf;
        }
    }
    std::string final_state;
    for (std::size_t i = 0; i < tr.names.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.10g", tr.states.back()[i]);
        final_state += (i ? ", " : "") + tr.names[i].str() + "=" + buf;
    }
    rep.add("final", final_state);
    if (!o.out.empty()) {
        std::ostringstream csv;
        write_csv(csv, tr, res, cons);
        write_atomically(o.out, csv.str());
        rep.add("csv", o.out);
    }
    return rep;
}

Report cmd_kappa_eval(const Model& m, const Options& o, std::mt19937_64& rng) {
    Report rep;
    rep.check = "kappa-eval";
    if (m.liealgebra && !m.algebroid && !m.ha2) {
        const LieAlgebraModel& g = m.liealgebra->g;
        const int k = o.k > 0 ? o.k : 2;
        Tuple Y, X;
        for (int i = 0; i < k; ++i) Y.push_back(random_vec(rng, g.n));
        for (int i = 0; i <= k; ++i) X.push_back(random_vec(rng, g.n));
        Tuple out = kappa_g(g, k, Y, X);
        for (int i = 0; i < k; ++i) rep.add("Y" + std::to_string(i), vec_str(Y[i]));
        for (int i = 0; i <= k; ++i) rep.add("X" + std::to_string(i), vec_str(X[i]));
        for (int i = 0; i < k; ++i) rep.add("Ydot" + std::to_string(i), vec_str(out[i]));
        // the same point through the comorphism form
        Comorphism r = kappa_g_comorphism(g, k);
        QVec base, fiber;
        for (auto& v : Y) base.insert(base.end(), v.begin(), v.end());
        for (auto& v : X) fiber.insert(fiber.end(), v.begin(), v.end());
        FiberVector img = apply(r, base, {{}, fiber});
        QVec flat;
        for (auto& v : out) flat.insert(flat.end(), v.begin(), v.end());
        if (img.components != flat) {
            rep.pass = false;
            rep.witness = "comorphism form gives " + vec_str(img.components);
        }
        if (k == 2 && rep.pass) {
            Comorphism p = kappa2_of(prolong2(to_algebroid(g)));
            // (Y, Z) = (Y0, Y1), source (y, y.d1, y.d2) = (X0, X1, 2 X2)
            QVec pb = Y[0];
            pb.insert(pb.end(), Y[1].begin(), Y[1].end());
            QVec pf = X[0];
            pf.insert(pf.end(), X[1].begin(), X[1].end());
            for (auto& q : X[2]) pf.push_back(2 * q);
            FiberVector pi = apply(p, pb, {{}, pf});
            bool same = pi.components == flat;
            rep.add("matches_prolongation", same ? "yes" : "no");
            if (!same) {
                rep.pass = false;
                rep.witness = "prolongation gives " + vec_str(pi.components);
            }
        }
        return rep;
    }
    Comorphism r = m.ha2 ? kappa2_of(*m.ha2) : kappa_of(m.need_algebroid());
    for (auto& e : r.equations()) rep.add("equation", e);
    QVec y = random_vec(rng, r.target.base.size());
    std::map<Symbol, Rational> at;
    for (std::size_t i = 0; i < y.size(); ++i) at.emplace(r.target.base[i], y[i]);
    FiberVector x;
    for (auto& p : r.base_map) x.base_point.push_back(poly_eval(p, at));
    x.components = random_vec(rng, r.source.rank());
    FiberVector img = apply(r, y, x);
    rep.add("target_base", vec_str(y));
    rep.add("source_base", vec_str(x.base_point));
    rep.add("source_fiber", vec_str(x.components));
    rep.add("target_fiber", vec_str(img.components));
    if (auto v = biweight_violation(r)) {
        rep.pass = false;
        rep.witness = "bi-weight: " + *v;
    }
    return rep;
}

Report cmd_subalg(const Model& m) {
    const LieSpec& l = m.need_liealgebra();
    if (!l.subspace) throw MissingSection("model has no [liealgebra.subspace] table");
    const int k = static_cast<int>(l.subspace->size());
    CheckResult direct = subalgebroid_test(l.g, k, *l.subspace);
    CheckResult restricted = subalgebroid_by_restriction(l.g, k, *l.subspace);
    Report rep = from_check("subalg", direct);
    rep.add("restriction", restricted.ok ? "succeeds" : "fails: " + restricted.witness);
    if (direct.ok != restricted.ok) {
        rep.pass = false;
        rep.witness = "bracket criterion and restriction disagree";
    }
    return rep;
}

int emit(const Report& r, const Options& o) {
    std::cout << (o.json ? r.json() : r.human());
    return r.pass ? 0 : 1;
}

int exit_code_for(const Error& e) {
    static const std::set<std::string> usage = {"SchemaError", "MissingSection", "ParseError",
                                                "MissingSymbol", "DimensionMismatch", "JetOverflow"};
    return usage.count(e.kind()) ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"algforge: algebroids, higher algebroids and their variational calculus"};
    // -h is left free so that integrate can take --h for the step size
    app.set_help_flag("--help", "print this help");
    app.require_subcommand(1);
    Options o;

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("model", o.model, "model TOML file")->required();
        sub->add_flag("--json", o.json, "JSON report");
    };
    auto* check = app.add_subcommand("check", "run an axiom check");
    check->add_option("--which", o.which, "skew|al|lie|strong|leibniz|jacobi")->required();
    check->add_option("--samples", o.samples, "sample points for pointwise strongness");
    add_model(check);
    auto* prolong = app.add_subcommand("prolong", "second prolongation as an HA2 model");
    prolong->add_option("--out", o.out, "output TOML");
    add_model(prolong);
    auto* lift = app.add_subcommand("lift", "tangent lift of an algebroid, or an algebroid lift of a section");
    lift->add_option("--k", o.k, "lift order");
    lift->add_option("--section", o.section, "comma-separated section components");
    lift->add_option("--alpha", o.alpha, "lift degree 0..2 for --section");
    lift->add_option("--out", o.out, "output TOML");
    add_model(lift);
    auto* el = app.add_subcommand("el", "Euler-Lagrange equations");
    el->add_option("--form", o.form, "prolong2|ep|standard|reduced");
    el->add_flag("--latex", o.latex, "LaTeX document output");
    add_model(el);
    auto* ep = app.add_subcommand("ep", "second-order Euler-Poincare equations with symmetry data");
    ep->add_flag("--latex", o.latex, "LaTeX document output");
    add_model(ep);
    auto* integ = app.add_subcommand("integrate", "RK4 integration of the equations of motion");
    integ->add_option("--form", o.form, "prolong2|ep|standard|reduced");
    integ->add_option("--h", o.h, "step");
    integ->add_option("--T", o.T, "horizon");
    integ->add_option("--out", o.out, "CSV output");
    integ->add_option("--tol", o.tol, "pass tolerance for residuals, conservation and exact error");
    add_model(integ);
    auto* keval = app.add_subcommand("kappa-eval", "evaluate the structure relation at a seeded point");
    keval->add_option("--k", o.k, "order for Lie algebra models");
    add_model(keval);
    auto* subalg = app.add_subcommand("subalg", "graded subalgebroid test for [liealgebra.subspace]");
    add_model(subalg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    try {
        std::mt19937_64 rng(seed_from_env());
        Model m = load_model(o.model);
        Report rep;
        if (check->parsed()) rep = cmd_check(m, o, rng);
        else if (prolong->parsed()) {
            HA2 ha = prolong2(order1_of(m));
            std::string text = dump_model(model_of(ha));
            if (o.out.empty()) {
                std::cout << text;
                return 0;
            }
            write_atomically(o.out, text);
            rep.check = "prolong";
            rep.add("out", o.out);
        } else if (lift->parsed()) {
            if (!o.section.empty()) {
                HA2 ha = m.ha2 ? *m.ha2 : prolong2(order1_of(m));
                Section1 s;
                std::stringstream ss(o.section);
                std::string part;
                while (std::getline(ss, part, ',')) s.push_back(parse_poly(part));
                VectorField v = alg_lift(ha, s, o.alpha);
                SymbolList coords = e2_coordinates(ha);
                for (std::size_t i = 0; i < coords.size(); ++i) std::cout << "d/d" << coords[i].str() << ": " << v[i].str() << "\n";
                return 0;
            }
            Algebroid1 L = tangent_lift_algebroid(order1_of(m), o.k > 0 ? o.k : 1);
            std::string text = dump_model(model_of(L));
            if (o.out.empty()) {
                std::cout << text;
                return 0;
            }
            write_atomically(o.out, text);
            rep.check = "lift";
            rep.add("out", o.out);
        } else if (el->parsed()) {
            return cmd_el(m, o);
        } else if (ep->parsed()) {
            return cmd_el(m, o, "ep");
        } else if (integ->parsed()) {
            rep = cmd_integrate(m, o);
        } else if (keval->parsed()) {
            rep = cmd_kappa_eval(m, o, rng);
        } else if (subalg->parsed()) {
            rep = cmd_subalg(m);
        }
        rep.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return emit(rep, o);
    } catch (const Error& e) {
        std::cerr << "algforge: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "algforge: " << e.what() << "\n";
        return 2;
    }
}
