#include <CLI11.hpp>

#include <iostream>
#include <random>

#include "report.hpp"

using namespace sdist;
using namespace sdist::cli;

namespace {

using cli::j;

constexpr int kInputError = 3;

struct Options {
    std::string out;
    std::uint64_t seed = 1;
    std::size_t budget = 200000;
    std::size_t horizon = 30;
    unsigned jobs = 1;
    std::string corpus;

    std::string family = "S(1)", set, vector, space = "T";
    std::string lhs, rhs, seq = "even";
    std::string xi = "1", zeta = "0", a, b;
    std::string eps = "1/4", t = "5/4", K = "2";
    std::string which = "iii";
    std::uint64_t n = 2, k = 4, first = 1, floor = 1, count = 50;
    std::size_t depth = 4;
};

json common(const Options& o) { return json{{"seed", o.seed}, {"budget", o.budget}, {"horizon", o.horizon}}; }

Rational rational_arg(const std::string& s)
{
    detail::Cursor c(s);
    Rational r = c.rational();
    c.finish();
    return r;
}

BlockSequence blocks(const Options& o, std::size_t at_least)
{
    if (!o.corpus.empty())
        return load_corpus(o.corpus);
    return BlockSequence::unit_vectors(Index(std::max<std::size_t>(at_least, 1)));
}

// ---------------------------------------------------------------------------

int schreier_member(const Options& o)
{
    FamilyExpr f = parse_family(o.family);
    FinSet e = parse_set(o.set);
    Report r("schreier member", {{"family", j(f)}, {"set", j(e)}});
    MembershipResult m = member(e, f);
    r["member"] = m.member;
    if (m.witness)
        r["decomposition"] = j(*m.witness);
    return r.finish(o.out);
}

int schreier_enumerate(const Options& o)
{
    FamilyExpr f = parse_family(o.family);
    Report r("schreier enumerate", {{"family", j(f)}, {"first", o.first}, {"horizon", o.horizon}, {"budget", o.budget}});
    Enumeration e = enumerate_maximal(f, Index(o.first), Index(o.horizon), o.budget);
    json sets = json::array();
    for (const auto& s : e.sets)
        sets.push_back(json{{"set", j(s.set)}, {"truncated", s.truncated}});
    r["count"] = e.sets.size();
    r["maximal"] = sets;
    r.budget_exhausted = e.budget_exhausted;
    return r.finish(o.out);
}

json j(const InclusionReport& rep)
{
    json o{{"pass", rep.pass}, {"certified_horizon", rep.certified_horizon}, {"states", rep.states_explored}};
    if (rep.counterexample)
        o["counterexample"] = j(*rep.counterexample);
    return o;
}

int schreier_inclusion(const Options& o)
{
    FamilyExpr l = parse_family(o.lhs), h = parse_family(o.rhs);
    Report r("schreier inclusion", {{"lhs", j(l)}, {"rhs", j(h)}, {"horizon", o.horizon}});
    InclusionReport rep = verify_inclusion(l, h, Index(o.horizon), 1, o.budget);
    r["result"] = j(rep);
    r.violation = !rep.pass;
    r.budget_exhausted = rep.budget_exhausted;
    return r.finish(o.out);
}

int schreier_mass(const Options& o)
{
    FamilyExpr f = parse_family(o.family);
    Vector x = parse_vector(o.vector);
    Report r("schreier mass", {{"family", j(f)}, {"vector", j(x)}});
    std::map<Index, Rational> c;
    for (const auto& [i, v] : x)
        c[i] = v;
    MassResult m = family_mass(c, f);
    r["mass"] = j(m.mass);
    r["argmax"] = j(m.argmax);
    return r.finish(o.out);
}

// ---------------------------------------------------------------------------

int ordinal_normalize(const Options& o)
{
    Report r("ordinal normalize", {{"input", o.a}});
    Ordinal a = parse_ordinal(o.a);
    r["normal_form"] = j(a);
    r["finite"] = a.is_finite();
    r["limit"] = a.is_limit();
    return r.finish(o.out);
}

int ordinal_fundamental(const Options& o)
{
    Ordinal a = parse_ordinal(o.a);
    Report r("ordinal fundamental", {{"ordinal", j(a)}, {"n", o.n}});
    if (!a.is_limit())
        throw std::invalid_argument(to_string(a) + " is not a limit ordinal");
    r["term"] = j(fundamental(a, o.n));
    return r.finish(o.out);
}

int ordinal_compare(const Options& o)
{
    Ordinal a = parse_ordinal(o.a), b = parse_ordinal(o.b);
    Report r("ordinal compare", {{"a", j(a)}, {"b", j(b)}});
    auto c = compare(a, b);
    r["result"] = c < 0 ? "<" : c > 0 ? ">" : "=";
    r["sum"] = j(add(a, b));
    return r.finish(o.out);
}

// ---------------------------------------------------------------------------

json j(const NormResult& n)
{
    json o{{"value", j(n.value)}, {"approx", double(n.approx)}, {"exact", n.exact}, {"converged", n.converged}};
    if (n.depth)
        o["depth"] = n.depth;
    if (n.witness)
        o["witness"] = to_string(*n.witness);
    if (!n.pieces.empty()) {
        o["pieces"] = json::array();
        for (const auto& p : n.pieces)
            o["pieces"].push_back(j(p));
    }
    return o;
}

int norm_eval(const Options& o)
{
    NormSpace s = parse_space(o.space);
    Vector x = parse_vector(o.vector);
    Report r("norm eval", {{"space", to_string(s)}, {"vector", j(x)}});
    NormResult n = norm(s, x);
    r["norm"] = j(n);
    r.budget_exhausted = !n.converged;
    return r.finish(o.out);
}

int norm_interval(const Options& o)
{
    NormSpace s = parse_space(o.space);
    Vector x = parse_vector(o.vector);
    Report r("norm interval", {{"space", to_string(s)}, {"vector", j(x)}, {"n", o.n}});
    NormResult n = interval_norm(s, x, o.n);
    r["interval_norm"] = j(n);
    r.budget_exhausted = !n.converged;
    return r.finish(o.out);
}

int norm_w(const Options& o)
{
    Ordinal xi = parse_ordinal(o.xi);
    Vector x = parse_vector(o.vector);
    Report r("norm w", {{"xi", j(xi)}, {"vector", j(x)}, {"depth", o.depth}});
    WMax w = max_over_W(xi, x, o.depth);
    r["value"] = j(w.value);
    if (w.witness)
        r["witness"] = to_string(*w.witness);
    r.budget_exhausted = w.truncated;
    return r.finish(o.out);
}

// ---------------------------------------------------------------------------

json j(const SccResult& s)
{
    return json{{"vector", j(s.vector)}, {"F", j(s.F)}, {"mass", j(s.mass_certificate.mass)},
                {"mass_argmax", j(s.mass_certificate.argmax)}};
}

int scc_cmd(const Options& o)
{
    Ordinal xi = parse_ordinal(o.xi), zeta = parse_ordinal(o.zeta);
    Rational eps = rational_arg(o.eps);
    IndexSequence m = parse_sequence(o.seq);
    Report r("scc basic", {{"xi", j(xi)}, {"zeta", j(zeta)}, {"eps", j(eps)}, {"sequence", to_string(m)}});
    SccResult s = scc_basic(xi, zeta, eps, m, o.budget);
    r["scc"] = j(s);
    SccCheck c = verify_scc(s);
    r["verified"] = c.ok();
    r.violation = !c.ok();
    return r.finish(o.out);
}

// ---------------------------------------------------------------------------

json j(const SpreadingEstimate& e)
{
    return json{{"family", j(e.family)},
                {"horizon", e.horizon},
                {"l1_lower", j(e.l1_lower)},
                {"l1_upper", j(e.l1_upper)},
                {"c0_lower", j(e.c0_lower)},
                {"c0_upper", j(e.c0_upper)},
                {"l1_lower_witness", j(e.l1_lower_witness)},
                {"l1_upper_witness", j(e.l1_upper_witness)},
                {"c0_lower_witness", j(e.c0_lower_witness)},
                {"c0_upper_witness", j(e.c0_upper_witness)},
                {"sets_examined", e.sets_examined},
                {"exact", e.exact}};
}

SearchOptions search(const Options& o)
{
    SearchOptions s;
    s.set_budget = o.budget;
    s.seed = o.seed;
    s.first = Index(o.first);
    return s;
}

int smodel_profile(const Options& o)
{
    NormSpace s = parse_space(o.space);
    FamilyExpr f = parse_family(o.family);
    json p = common(o);
    p["space"] = to_string(s);
    p["family"] = j(f);
    Report r("smodel profile", p);
    SpreadingEstimate e = spreading_profile(s, blocks(o, o.horizon), f, o.horizon, search(o));
    r["estimate"] = j(e);
    r.budget_exhausted = e.budget_exhausted;
    return r.finish(o.out);
}

int smodel_james(const Options& o)
{
    NormSpace s = parse_space(o.space);
    Ordinal xi = parse_ordinal(o.xi);
    Rational K = rational_arg(o.K);
    json p = common(o);
    p["space"] = to_string(s);
    p["n"] = o.n;
    p["K"] = j(K);
    p["xi"] = j(xi);
    Report r("smodel james", p);
    BlockingCertificate c = james_blocking_step(evaluator(s), blocks(o, o.horizon), o.n, K, o.horizon, xi, search(o));
    r["outcome"] = c.improved ? "ImprovedBlocking" : "PropertyPn";
    r["target"] = j(c.target);
    r["family"] = j(c.family);
    if (c.improved) {
        json g = json::array();
        for (const auto& grp : c.groups) {
            json cs = json::array();
            for (const auto& a : grp.coeffs)
                cs.push_back(j(a));
            g.push_back(json{{"indices", j(grp.indices)}, {"coefficients", cs}});
        }
        r["groups"] = g;
        json w = json::array();
        for (const auto& cw : c.combinations)
            w.push_back(j(cw));
        r["combinations"] = w;
        r["blocking"] = j(c.blocking);
    } else {
        r["constant"] = j(c.constant);
        r["constant_witness"] = j(c.constant_witness);
    }
    r["sets_examined"] = c.sets_examined;
    r.budget_exhausted = c.budget_exhausted && !c.improved;
    return r.finish(o.out);
}

// ---------------------------------------------------------------------------

json j(const DistortionWitness& w)
{
    return json{{"E", j(w.E)}, {"x", j(w.x)}, {"y", j(w.y)}, {"ratio", j(w.ratio)}};
}

int distort_search(const Options& o)
{
    NormSpace s = parse_space(o.space);
    FamilyExpr f = parse_family(o.family);
    Rational t = rational_arg(o.t);
    json p = common(o);
    p["space"] = to_string(s);
    p["n"] = o.n;
    p["t"] = j(t);
    p["family"] = j(f);
    Report r("distort search", p);
    NormEvaluator first = evaluator(s), second = interval_evaluator(s, o.n);
    BlockSequence bs = blocks(o, o.horizon);
    DistortionReport d = distortion_witness(first, second, f, bs, t, o.horizon, o.budget, search(o));
    r["found"] = d.found;
    if (d.witness) {
        r["witness"] = j(*d.witness);
        r["revalidated"] = revalidate(*d.witness, first, second, f, bs);
    }
    if (d.best)
        r["best"] = j(*d.best);
    r["sets_examined"] = d.sets_examined;
    r["candidates"] = d.candidates;
    r.budget_exhausted = d.budget_exhausted && !d.found;
    return r.finish(o.out);
}

int distort_interval_bound(const Options& o)
{
    Ordinal xi = parse_ordinal(o.xi);
    Rational eps = rational_arg(o.eps);
    Report r("distort interval-bound", {{"xi", j(xi)}, {"n", o.n}, {"k", o.k}, {"eps", j(eps)}, {"horizon", o.horizon}});
    IntervalBoundReport t = theorem3_experiment(xi, o.n, o.k, eps, Index(o.horizon));
    r["formula"] = j(t.formula);
    r["y_set"] = j(t.y_set);
    r["z_set"] = j(t.z_set);
    r["combined_member"] = t.combined_member;
    if (t.achieved) {
        r["y_norm"] = j(t.y_norm);
        r["z_norm"] = j(t.z_norm);
        r["y_interval"] = j(t.y_interval);
        r["z_interval"] = j(t.z_interval);
        r["achieved"] = j(*t.achieved);
        r["attainment"] = j(*t.attainment);
    }
    r.violation = !t.combined_member;
    r.budget_exhausted = t.budget_exhausted;
    return r.finish(o.out);
}

// ---------------------------------------------------------------------------

int verify_prop1(const Options& o)
{
    Ordinal xi = parse_ordinal(o.xi), zeta = parse_ordinal(o.zeta);
    IndexSequence m = parse_sequence(o.seq);
    Report r("verify prop1",
             {{"which", o.which}, {"xi", j(xi)}, {"zeta", j(zeta)}, {"horizon", o.horizon}, {"seed", o.seed}});
    ConstructionCheck p = construction_check(o.which, xi, zeta, Index(o.horizon), m, o.seed);
    r["sequence"] = to_string(p.sequence);
    r["inclusion"] = j(p.main);
    if (p.spread) {
        r["spread_sequence"] = to_string(*p.spread_sequence);
        r["spread_inclusion"] = j(*p.spread);
    }
    r["pass"] = p.pass();
    r.violation = !p.pass();
    r.budget_exhausted = p.main.budget_exhausted || (p.spread && p.spread->budget_exhausted);
    return r.finish(o.out);
}

int verify_bracket_a2(const Options& o)
{
    Ordinal xi = parse_ordinal(o.xi);
    IndexSequence m = parse_sequence(o.seq);
    FamilyExpr lhs = FamilyExpr::relabel(
        FamilyExpr::bracket(FamilyExpr::schreier(xi), FamilyExpr::cardinality(2)), m);
    FamilyExpr rhs = FamilyExpr::schreier(xi);
    Report r("verify bracket-a2", {{"lhs", j(lhs)}, {"rhs", j(rhs)}, {"horizon", o.horizon}});
    InclusionReport rep = verify_inclusion(lhs, rhs, Index(o.horizon), 1, o.budget);
    r["inclusion"] = j(rep);
    r["pass"] = rep.pass;
    r.violation = !rep.pass;
    r.budget_exhausted = rep.budget_exhausted;
    return r.finish(o.out);
}

json j(const LemmaSuiteReport& s)
{
    json o{{"instances", s.instances}, {"violations", s.violations}, {"worst_ratio", j(s.worst_ratio)}};
    if (!s.first_violation.empty())
        o["first_violation"] = s.first_violation;
    return o;
}

int verify_lemmas(const Options& o)
{
    Report r("verify lemmas", {{"count", o.count}, {"seed", o.seed}});
    LemmaSuiteReport a = lemma_suite_average_on_blocks(o.count, o.seed);
    LemmaSuiteReport b = lemma_suite_average_on_scc(o.count, o.seed);
    r["average_on_blocks"] = j(a);
    r["average_on_scc"] = j(b);
    r.violation = !a.ok() || !b.ok();
    return r.finish(o.out);
}

int verify_scc_cmd(const Options& o)
{
    Report r("verify scc", {{"count", o.count}, {"seed", o.seed}});
    SccSuiteReport s = scc_suite(o.count, o.seed);
    r["checked"] = s.checked;
    r["failures"] = s.failures;
    r["budget_skipped"] = s.skipped;
    if (s.first_failure)
        r["first_failure"] = j(*s.first_failure);
    r.violation = !s.ok();
    r.budget_exhausted = s.checked < o.count;
    return r.finish(o.out);
}

// ---------------------------------------------------------------------------

int diag_alpha(const Options& o)
{
    Ordinal xi = parse_ordinal(o.xi);
    Report r("diag alpha", {{"xi", j(xi)}, {"n", o.n}, {"size_floor", o.floor}, {"horizon", o.horizon}});
    AlphaDiagnostic d = alpha_index_diagnostic(blocks(o, o.horizon), xi, o.n, o.floor, o.horizon, o.budget);
    r["value"] = j(d.value);
    r["block"] = d.block;
    json av = json::array();
    for (const auto& [lo, hi, size] : d.witness.averages)
        av.push_back(json{{"first", lo}, {"last", hi}, {"size", size}});
    r["averages"] = av;
    r.budget_exhausted = d.truncated;
    return r.finish(o.out);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Schreier families, spreading models and distortion of Banach space norms"};
    app.require_subcommand(1);
    Options o;
    int rc = 0;

    app.add_option("--out", o.out, "write the JSON report to a file");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--budget", o.budget, "search budget");
    app.add_option("--horizon", o.horizon, "largest index examined");
    app.add_option("--jobs", o.jobs, "worker threads (accepted, runs single-threaded)");
    app.add_option("--corpus", o.corpus, "JSON block sequence; unit vectors otherwise");

    // flags are accepted before or after the verb
    auto globals = [&](CLI::App* s) {
        s->add_option("--out", o.out);
        s->add_option("--seed", o.seed);
        s->add_option("--budget", o.budget);
        s->add_option("--horizon", o.horizon);
        s->add_option("--jobs", o.jobs);
        s->add_option("--corpus", o.corpus);
    };
    auto verb = [&](CLI::App* group, const std::string& name, const std::string& help, int (*fn)(const Options&)) {
        CLI::App* s = group->add_subcommand(name, help);
        globals(s);
        s->callback([&rc, &o, fn] { rc = fn(o); });
        return s;
    };
    auto noun = [&](const std::string& name, const std::string& help) {
        CLI::App* g = app.add_subcommand(name, help);
        g->require_subcommand(1);
        globals(g);
        return g;
    };

    CLI::App* sch = noun("schreier", "Schreier family operations");
    auto* s = verb(sch, "member", "membership with a decomposition witness", schreier_member);
    s->add_option("--family", o.family)->required();
    s->add_option("--set", o.set)->required();
    s = verb(sch, "enumerate", "maximal members with a given minimum", schreier_enumerate);
    s->add_option("--family", o.family)->required();
    s->add_option("--first", o.first);
    s = verb(sch, "inclusion", "exhaustive inclusion check up to the horizon", schreier_inclusion);
    s->add_option("--lhs", o.lhs)->required();
    s->add_option("--rhs", o.rhs)->required();
    s = verb(sch, "mass", "max over the family of sum of coefficients", schreier_mass);
    s->add_option("--family", o.family)->required();
    s->add_option("--vector", o.vector)->required();

    CLI::App* ord = noun("ordinal", "ordinal arithmetic");
    s = verb(ord, "normalize", "Cantor normal form", ordinal_normalize);
    s->add_option("ordinal", o.a)->required();
    s = verb(ord, "fundamental", "n-th term of the fundamental sequence", ordinal_fundamental);
    s->add_option("ordinal", o.a)->required();
    s->add_option("--n", o.n);
    s = verb(ord, "compare", "compare two ordinals", ordinal_compare);
    s->add_option("a", o.a)->required();
    s->add_option("b", o.b)->required();

    CLI::App* nrm = noun("norm", "norm evaluation");
    s = verb(nrm, "eval", "norm of a finitely supported vector", norm_eval);
    s->add_option("--space", o.space);
    s->add_option("--vector", o.vector)->required();
    s = verb(nrm, "interval", "|x|_n: max over n successive intervals", norm_interval);
    s->add_option("--space", o.space);
    s->add_option("--vector", o.vector)->required();
    s->add_option("--n", o.n);
    s = verb(nrm, "w", "max over the norming set W up to a depth", norm_w);
    s->add_option("--xi", o.xi);
    s->add_option("--vector", o.vector)->required();
    s->add_option("--depth", o.depth);

    CLI::App* sc = noun("scc", "special convex combinations");
    s = verb(sc, "basic", "basic (xi, zeta, eps) s.c.c. on a sequence", scc_cmd);
    s->add_option("--xi", o.xi);
    s->add_option("--zeta", o.zeta);
    s->add_option("--eps", o.eps);
    s->add_option("--seq", o.seq);

    CLI::App* sm = noun("smodel", "spreading models");
    s = verb(sm, "profile", "l1 and c0 constants over family sets", smodel_profile);
    s->add_option("--space", o.space);
    s->add_option("--family", o.family);
    s->add_option("--first", o.first);
    s = verb(sm, "james", "one blocking step towards l1 or property P_n", smodel_james);
    s->add_option("--space", o.space);
    s->add_option("--n", o.n);
    s->add_option("--K", o.K);
    s->add_option("--xi", o.xi);

    CLI::App* dis = noun("distort", "distortion searches");
    s = verb(dis, "search", "pair with |x|/|y| above t in a block span", distort_search);
    s->add_option("--space", o.space);
    s->add_option("--family", o.family);
    s->add_option("--n", o.n);
    s->add_option("--t", o.t);
    s = verb(dis, "interval-bound", "|.|_n distortion lower bound in X", distort_interval_bound);
    s->add_option("--xi", o.xi);
    s->add_option("--n", o.n);
    s->add_option("--k", o.k);
    s->add_option("--eps", o.eps);

    CLI::App* ver = noun("verify", "family and lemma checks");
    s = verb(ver, "prop1", "S_xi(L)[S_zeta] inclusions in S_{zeta+xi}", verify_prop1);
    s->add_option("--which", o.which)->check(CLI::IsMember({"ii", "iii", "iv"}));
    s->add_option("--xi", o.xi);
    s->add_option("--zeta", o.zeta);
    s->add_option("--seq", o.seq);
    s = verb(ver, "bracket-a2", "S_xi[A_2](M) in S_xi", verify_bracket_a2);
    s->add_option("--xi", o.xi);
    s->add_option("--seq", o.seq);
    s = verb(ver, "lemmas", "random instances of the averaging lemmas", verify_lemmas);
    s->add_option("--count", o.count);
    s = verb(ver, "scc", "random s.c.c. constructions re-verified", verify_scc_cmd);
    s->add_option("--count", o.count);

    CLI::App* dg = noun("diag", "diagnostics");
    s = verb(dg, "alpha", "finite alpha index stand-in over a block sequence", diag_alpha);
    s->add_option("--xi", o.xi);
    s->add_option("--n", o.n);
    s->add_option("--floor", o.floor);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    } catch (const sdist::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: corpus: " << e.what() << '\n';
        return kInputError;
    } catch (const ConstructionError& e) {
        std::cerr << "construction failed: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return rc;
}
