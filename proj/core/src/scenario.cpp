#include "dmpair/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>

#include "json.hpp"

namespace dmpair {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what)
{
    throw ScenarioError("scenario error at '" + where + "': " + what);
}

const json& require(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key)) fail(where, std::string("missing key '") + key + "'");
    return j.at(key);
}

Vec2 parse_vec2(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 2) fail(where, "expected a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Vec2> parse_vertex_list(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() < 3) fail(where, "expected a list of at least 3 vertices");
    std::vector<Vec2> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_vec2(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Expr parse_expr_checked(const std::string& text, const std::string& where)
{
    try {
        return Expr::parse(text);
    } catch (const ParseError& e) {
        fail(where, std::string("bad expression: ") + e.what());
    }
}

Window parse_window(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 4) fail(where, "expected [xmin, xmax, ymin, ymax]");
    Window w{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    if (w.xmax <= w.xmin || w.ymax <= w.ymin) fail(where, "window must have positive extent");
    return w;
}

int thread_budget()
{
    if (const char* env = std::getenv("DMPAIR_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& name)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
    }

    Scenario sc;
    sc.name = name;
    sc.window = parse_window(require(root, "window", "scenario"), "window");

    if (root.contains("partitions")) {
        for (const auto& [pname, pj] : root.at("partitions").items()) {
            const std::string where = "partitions." + pname;
            if (!pj.is_array() || pj.empty()) fail(where, "expected a list of cells");
            std::vector<Polygon> cells;
            cells.reserve(pj.size());
            for (std::size_t i = 0; i < pj.size(); ++i) {
                try {
                    cells.emplace_back(
                        parse_vertex_list(pj[i], where + "[" + std::to_string(i) + "]"));
                } catch (const GeometryError& e) {
                    fail(where + "[" + std::to_string(i) + "]", e.what());
                }
            }
            try {
                sc.partitions.emplace(pname, PolygonalPartition(sc.window, std::move(cells)));
            } catch (const GeometryError& e) {
                fail(where, e.what());
            }
        }
    }

    if (root.contains("fields")) {
        for (const auto& [fname, fj] : root.at("fields").items()) {
            const std::string where = "fields." + fname;
            const std::string pname = require(fj, "partition", where).get<std::string>();
            auto pit = sc.partitions.find(pname);
            if (pit == sc.partitions.end())
                fail(where, "unknown partition '" + pname + "'");
            const json& comps = require(fj, "components", where);
            if (!comps.is_array() || comps.size() != pit->second.size())
                fail(where, "need one [A1, A2] pair per cell");
            std::vector<std::array<Expr, 2>> parsed;
            parsed.reserve(comps.size());
            for (std::size_t i = 0; i < comps.size(); ++i) {
                const std::string cw = where + ".components[" + std::to_string(i) + "]";
                if (!comps[i].is_array() || comps[i].size() != 2) fail(cw, "expected [A1, A2]");
                parsed.push_back({parse_expr_checked(comps[i][0].get<std::string>(), cw),
                                  parse_expr_checked(comps[i][1].get<std::string>(), cw)});
            }
            sc.fields.emplace(fname, PiecewiseVectorField(pit->second, std::move(parsed)));
        }
    }

    if (root.contains("functions")) {
        for (const auto& [uname, uj] : root.at("functions").items()) {
            const std::string where = "functions." + uname;
            const std::string pname = require(uj, "partition", where).get<std::string>();
            auto pit = sc.partitions.find(pname);
            if (pit == sc.partitions.end())
                fail(where, "unknown partition '" + pname + "'");
            const json& values = require(uj, "values", where);
            if (!values.is_array() || values.size() != pit->second.size())
                fail(where, "need one expression per cell");
            std::vector<Expr> parsed;
            parsed.reserve(values.size());
            for (std::size_t i = 0; i < values.size(); ++i)
                parsed.push_back(parse_expr_checked(
                    values[i].get<std::string>(),
                    where + ".values[" + std::to_string(i) + "]"));
            sc.functions.emplace(uname, BVFunc(pit->second, std::move(parsed)));
        }
    }

    if (root.contains("polygons")) {
        for (const auto& [pname, pj] : root.at("polygons").items()) {
            try {
                sc.polygons.emplace(pname, Polygon(parse_vertex_list(pj, "polygons." + pname)));
            } catch (const GeometryError& e) {
                fail("polygons." + pname, e.what());
            }
        }
    }

    if (root.contains("interfaces")) {
        for (const auto& [iname, ij] : root.at("interfaces").items()) {
            const std::string where = "interfaces." + iname;
            if (!ij.is_array()) fail(where, "expected a list of segments");
            std::vector<OrientedSegment> segs;
            for (std::size_t i = 0; i < ij.size(); ++i) {
                const std::string sw = where + "[" + std::to_string(i) + "]";
                segs.push_back({parse_vec2(require(ij[i], "a", sw), sw + ".a"),
                                parse_vec2(require(ij[i], "b", sw), sw + ".b"),
                                parse_vec2(require(ij[i], "normal", sw), sw + ".normal")});
            }
            try {
                sc.interfaces.emplace(iname, OrientedInterface(std::move(segs)));
            } catch (const GeometryError& e) {
                fail(where, e.what());
            }
        }
    }

    if (root.contains("regions")) {
        for (const auto& [rname, rj] : root.at("regions").items()) {
            const std::string where = "regions." + rname;
            const std::string kind = require(rj, "kind", where).get<std::string>();
            if (kind == "window") {
                sc.regions.emplace(rname, RegionSpec::window());
            } else if (kind == "interior" || kind == "closure") {
                const std::string pname = require(rj, "polygon", where).get<std::string>();
                auto pit = sc.polygons.find(pname);
                if (pit == sc.polygons.end()) fail(where, "unknown polygon '" + pname + "'");
                sc.regions.emplace(rname, kind == "interior"
                                              ? RegionSpec::interior(pit->second)
                                              : RegionSpec::interior_plus_boundary(pit->second));
            } else if (kind == "interface") {
                const std::string iname = require(rj, "interface", where).get<std::string>();
                auto iit = sc.interfaces.find(iname);
                if (iit == sc.interfaces.end()) fail(where, "unknown interface '" + iname + "'");
                sc.regions.emplace(rname, RegionSpec::interface_restriction(iit->second));
            } else if (kind == "interval") {
                sc.regions.emplace(rname,
                                   RegionSpec::interval(require(rj, "lo", where).get<double>(),
                                                        require(rj, "hi", where).get<double>()));
            } else {
                fail(where, "unknown region kind '" + kind + "'");
            }
        }
    }

    if (root.contains("test_functions")) {
        for (const auto& [tname, tj] : root.at("test_functions").items()) {
            const std::string where = "test_functions." + tname;
            try {
                if (tj.contains("bump")) {
                    const json& b = tj.at("bump");
                    if (!b.is_array() || b.size() != 4) fail(where, "bump needs [x0,x1,y0,y1]");
                    sc.test_functions.emplace(
                        tname, TestFunc::bump(b[0].get<double>(), b[1].get<double>(),
                                              b[2].get<double>(), b[3].get<double>()));
                } else {
                    const Expr e = parse_expr_checked(
                        require(tj, "expr", where).get<std::string>(), where);
                    Polygon support(parse_vertex_list(require(tj, "support", where), where));
                    sc.test_functions.emplace(tname, TestFunc(e, std::move(support)));
                }
            } catch (const Error& e) {
                fail(where, e.what());
            }
        }
    }

    const auto parse_1d_base = [&](const json& j, const std::string& where) {
        const json& dom = require(j, "domain", where);
        if (!dom.is_array() || dom.size() != 2) fail(where, "domain must be [lo, hi]");
        std::vector<double> breaks;
        if (j.contains("breakpoints"))
            breaks = j.at("breakpoints").get<std::vector<double>>();
        const json& pieces = require(j, "pieces", where);
        std::vector<Expr> parsed;
        for (std::size_t i = 0; i < pieces.size(); ++i)
            parsed.push_back(parse_expr_checked(pieces[i].get<std::string>(),
                                                where + ".pieces[" + std::to_string(i) + "]"));
        try {
            return PiecewiseExpr1D(dom[0].get<double>(), dom[1].get<double>(), std::move(breaks),
                                   std::move(parsed));
        } catch (const Error& e) {
            fail(where, e.what());
        }
    };

    if (root.contains("fields_1d")) {
        for (const auto& [fname, fj] : root.at("fields_1d").items())
            sc.fields_1d.emplace(fname, parse_1d_base(fj, "fields_1d." + fname));
    }

    if (root.contains("functions_1d")) {
        for (const auto& [uname, uj] : root.at("functions_1d").items()) {
            const std::string where = "functions_1d." + uname;
            PiecewiseExpr1D base = parse_1d_base(uj, where);
            std::vector<CantorComponent> cantor;
            if (uj.contains("cantor")) {
                for (const auto& cj : uj.at("cantor")) {
                    CantorComponent c;
                    c.lo = require(cj, "lo", where).get<double>();
                    c.hi = require(cj, "hi", where).get<double>();
                    c.mass = cj.value("mass", 1.0);
                    c.depth = cj.value("depth", 20);
                    cantor.push_back(c);
                }
            }
            try {
                sc.functions_1d.emplace(uname, BVFunc1D(std::move(base), std::move(cantor)));
            } catch (const Error& e) {
                fail(where, e.what());
            }
        }
    }

    if (root.contains("checks")) {
        const json& checks = root.at("checks");
        if (!checks.is_array()) fail("checks", "expected a list");
        for (std::size_t i = 0; i < checks.size(); ++i) {
            const json& cj = checks[i];
            const std::string where = "checks[" + std::to_string(i) + "]";
            CheckConfig cfg;
            cfg.name = require(cj, "name", where).get<std::string>();
            const bool known = std::find(known_checks().begin(), known_checks().end(), cfg.name) !=
                               known_checks().end();
            if (!known) fail(where, "unknown check '" + cfg.name + "'");
            cfg.tolerance = cj.value("tolerance", cfg.name == "oracle" ? 0.02 : 1e-8);
            cfg.field = cj.value("field", std::string{});
            cfg.function = cj.value("function", std::string{});
            cfg.function2 = cj.value("function2", std::string{});
            cfg.polygon = cj.value("polygon", std::string{});
            cfg.interface_name = cj.value("interface", std::string{});
            if (cj.contains("test_functions"))
                cfg.test_functions = cj.at("test_functions").get<std::vector<std::string>>();
            if (cj.contains("regions")) {
                for (const auto& rj : cj.at("regions")) {
                    if (rj.is_string()) {
                        cfg.regions.emplace_back(rj.get<std::string>(), std::nullopt);
                    } else {
                        cfg.regions.emplace_back(
                            require(rj, "region", where).get<std::string>(),
                            rj.contains("expect")
                                ? std::optional<double>(rj.at("expect").get<double>())
                                : std::nullopt);
                    }
                }
            }
            if (cj.contains("h")) cfg.h_exprs = cj.at("h").get<std::vector<std::string>>();
            if (cj.contains("interval")) {
                const json& iv = cj.at("interval");
                cfg.interval = std::make_pair(iv[0].get<double>(), iv[1].get<double>());
            }
            if (cj.contains("expect")) cfg.expect = cj.at("expect").get<double>();
            cfg.oracle_epsilon = cj.value("epsilon", 0.01);
            cfg.cantor_depth = cj.value("depth", 20);
            cfg.cantor_levels = cj.value("levels", 8);

            // Validate references now so load errors carry the name.
            const auto check_ref = [&](const std::string& ref, const auto& map,
                                       const char* what) {
                if (!ref.empty() && map.find(ref) == map.end())
                    fail(where, std::string("unknown ") + what + " '" + ref + "'");
            };
            if (!cfg.field.empty() && sc.fields.find(cfg.field) == sc.fields.end() &&
                sc.fields_1d.find(cfg.field) == sc.fields_1d.end())
                fail(where, "unknown field '" + cfg.field + "'");
            if (!cfg.function.empty() &&
                sc.functions.find(cfg.function) == sc.functions.end() &&
                sc.functions_1d.find(cfg.function) == sc.functions_1d.end())
                fail(where, "unknown function '" + cfg.function + "'");
            check_ref(cfg.function2, sc.functions, "function");
            check_ref(cfg.polygon, sc.polygons, "polygon");
            check_ref(cfg.interface_name, sc.interfaces, "interface");
            for (const auto& t : cfg.test_functions) check_ref(t, sc.test_functions, "test function");
            for (const auto& [r, e] : cfg.regions) check_ref(r, sc.regions, "region");
            sc.checks.push_back(std::move(cfg));
        }
    }

    return sc;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string name = path;
    const auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    const auto dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    return parse_scenario(buf.str(), name);
}

namespace {

void push_residual(CheckResult& result, const std::string& label, double residual)
{
    CheckItem item;
    item.label = label;
    item.value = residual;
    item.residual = residual;
    item.passed = residual <= result.tolerance;
    result.items.push_back(std::move(item));
    result.passed = result.passed && result.items.back().passed;
}

void push_value(CheckResult& result, const std::string& label, double value,
                std::optional<double> expected, std::optional<double> tol = std::nullopt)
{
    CheckItem item;
    item.label = label;
    item.value = value;
    item.expected = expected;
    item.residual = expected ? std::abs(value - *expected) : 0.0;
    item.passed = !expected || item.residual <= tol.value_or(result.tolerance);
    result.items.push_back(std::move(item));
    result.passed = result.passed && result.items.back().passed;
}

void run_pairing_check(const Scenario& sc, const CheckConfig& cfg, CheckResult& result)
{
    if (sc.fields_1d.count(cfg.field)) {
        const auto& A = sc.fields_1d.at(cfg.field);
        const auto& u = sc.functions_1d.at(cfg.function);
        const GenMeasure m = pairing_1d(A, u);
        const auto iv = cfg.interval.value_or(std::make_pair(A.lo(), A.hi()));
        const double value = m.eval_on(RegionSpec::interval(iv.first, iv.second));
        push_value(result, "pairing_1d[" + std::to_string(iv.first) + "," +
                               std::to_string(iv.second) + "]",
                   value, cfg.expect);
        return;
    }
    const auto& A = sc.fields.at(cfg.field);
    const auto& u = sc.functions.at(cfg.function);
    const PairingMeasure pm = pairing_measure(A, u);
    const GenMeasure total = pm.total();
    for (const auto& [rname, expect] : cfg.regions)
        push_value(result, "pairing(" + rname + ")", total.eval_on(sc.regions.at(rname)), expect);
    for (const auto& tname : cfg.test_functions) {
        push_residual(result, "anzellotti:" + tname,
                      anzellotti_identity_residual(A, u, sc.test_functions.at(tname)));
    }
    if (!cfg.interface_name.empty()) {
        for (const auto& tname : cfg.test_functions) {
            push_residual(result, "jump_identity:" + tname,
                          jump_identity_residual(A, sc.interfaces.at(cfg.interface_name),
                                                 sc.test_functions.at(tname)));
        }
    }
    if (!cfg.polygon.empty()) {
        for (const auto& tname : cfg.test_functions) {
            push_residual(result, "trace_definition:" + tname,
                          trace_definition_check(A, sc.polygons.at(cfg.polygon),
                                                 sc.test_functions.at(tname)));
        }
    }
}

void run_coarea_check(const Scenario& sc, const CheckConfig& cfg, CheckResult& result)
{
    const auto& A = sc.fields.at(cfg.field);
    const auto& u = sc.functions.at(cfg.function);
    const RegionSpec B = cfg.regions.empty() ? RegionSpec::window()
                                             : sc.regions.at(cfg.regions.front().first);
    const CoareaResult r = coarea_decompose(A, u, B);
    push_value(result, "coarea.lhs", r.lhs, std::nullopt);
    push_value(result, "coarea.rhs", r.rhs, std::nullopt);
    push_residual(result, "coarea.residual", r.residual());
}

void run_chain_check(const Scenario& sc, const CheckConfig& cfg, CheckResult& result)
{
    const auto& A = sc.fields.at(cfg.field);
    const auto& u = sc.functions.at(cfg.function);
    for (const auto& htext : cfg.h_exprs) {
        const Expr h = Expr::parse(htext);
        const ChainRuleResult cr = chain_rule(A, u, h);
        const BVFunc hu = bv_compose(h, u);
        const GenMeasure direct = pairing_measure(A, hu).total();
        const GenMeasure viaformula = cr.pairing.total();
        for (const auto& tname : cfg.test_functions) {
            const auto& phi = sc.test_functions.at(tname);
            push_residual(result, "chain[" + htext + "]:" + tname,
                          std::abs(viaformula.pair_test(phi) - direct.pair_test(phi)));
        }
        if (cr.theta_preserved) {
            double worst = 0.0;
            int samples = 0;
            for (const auto& j : hu.jump_set()) {
                const Vec2 x = j.seg.midpoint();
                worst = std::max(worst, std::abs(theta(A, hu, x) - theta(A, u, x)));
                ++samples;
            }
            if (samples > 0)
                push_residual(result, "theta_transfer[" + htext + "]", worst);
        }
    }
}

void run_leibniz_check(const Scenario& sc, const CheckConfig& cfg, CheckResult& result)
{
    const auto& A = sc.fields.at(cfg.field);
    const auto& u = sc.functions.at(cfg.function);
    const auto& v = sc.functions.at(cfg.function2);
    const ProductPairingResult lz = leibniz(A, u, v);
    const ProductPairingResult pp = product_pairing(v, A, u);
    const ProductPairingResult sp = self_product_pairing(A, u);
    for (const auto& tname : cfg.test_functions) {
        const auto& phi = sc.test_functions.at(tname);
        push_residual(result, "leibniz:" + tname,
                      std::abs(lz.formula.pair_test(phi) - lz.direct.pair_test(phi)));
        push_residual(result, "product:" + tname,
                      std::abs(pp.formula.pair_test(phi) - pp.direct.pair_test(phi)));
        push_residual(result, "self_product:" + tname,
                      std::abs(sp.formula.pair_test(phi) - sp.direct.pair_test(phi)));
    }
}

void run_gaussgreen_check(const Scenario& sc, const CheckConfig& cfg, CheckResult& result)
{
    const auto& A = sc.fields.at(cfg.field);
    const auto& u = sc.functions.at(cfg.function);
    const auto& E = sc.polygons.at(cfg.polygon);
    const GaussGreenReport report = gauss_green(A, u, E);
    push_value(result, "gauss_green.lhs_interior", report.lhs_interior, std::nullopt);
    push_value(result, "gauss_green.rhs_interior", report.rhs_interior, std::nullopt);
    push_residual(result, "gauss_green.residual_interior", report.residual_interior());
    push_value(result, "gauss_green.lhs_closure", report.lhs_closure, std::nullopt);
    push_value(result, "gauss_green.rhs_closure", report.rhs_closure, std::nullopt);
    push_residual(result, "gauss_green.residual_closure", report.residual_closure());

    const NormalTraceMeasures ntm = normal_trace_measures(A, E);
    for (const auto& tname : cfg.test_functions) {
        const auto& phi = sc.test_functions.at(tname);
        push_residual(result, "sigma_i.routes:" + tname,
                      std::abs(ntm.sigma_i.pair_test(phi) - ntm.sigma_i_product.pair_test(phi)));
        push_residual(result, "sigma_e.routes:" + tname,
                      std::abs(ntm.sigma_e.pair_test(phi) - ntm.sigma_e_product.pair_test(phi)));
    }
    for (const auto& [rname, expect] : cfg.regions) {
        push_value(result, "sigma_i(" + rname + ")",
                   ntm.sigma_i.eval_on(sc.regions.at(rname)), expect);
    }
}

void run_oracle_check(const Scenario& sc, const CheckConfig& cfg, CheckResult& result)
{
    const auto& A = sc.fields.at(cfg.field);
    const auto& u = sc.functions.at(cfg.function);
    const GenMeasure pairing = pairing_measure(A, u).total();
    for (const auto& tname : cfg.test_functions) {
        const auto& phi = sc.test_functions.at(tname);
        const double exact = pairing.pair_test(phi);
        std::vector<double> values;
        for (double factor : {8.0, 4.0, 2.0, 1.0}) {
            const double eps = cfg.oracle_epsilon * factor;
            values.push_back(mollified_pairing(A, u, phi, {eps, eps / 4.0}));
        }
        const double rel = std::abs(values.back() - exact) / (1.0 + std::abs(exact));
        push_residual(result, "oracle.concordance:" + tname, rel);
        for (std::size_t k = 0; k + 2 < values.size(); ++k) {
            const double d1 = std::abs(values[k] - values[k + 1]);
            const double d2 = std::abs(values[k + 1] - values[k + 2]);
            CheckItem item;
            item.label = "oracle.cauchy[" + std::to_string(k) + "]:" + tname;
            item.value = d2;
            item.expected = d1;
            item.residual = std::max(0.0, d2 - d1);
            item.passed = d2 <= d1 + 1e-9;
            result.items.push_back(item);
            result.passed = result.passed && item.passed;
        }
    }
}

void run_cantor_check(const Scenario& sc, const CheckConfig& cfg, CheckResult& result)
{
    const int depth = cfg.cantor_depth;
    push_value(result, "cantor.mean", cantor_integrate([](double x) { return x; }, depth), 0.5,
               1e-10);
    push_value(result, "cantor.second_moment",
               cantor_integrate([](double x) { return x * x; }, depth), 0.375, 1e-6);

    if (!cfg.field.empty() && sc.fields_1d.count(cfg.field) &&
        sc.functions_1d.count(cfg.function)) {
        const GenMeasure m = pairing_1d(sc.fields_1d.at(cfg.field),
                                        sc.functions_1d.at(cfg.function));
        const auto iv = cfg.interval.value_or(std::make_pair(0.0, 1.0));
        push_value(result, "cantor.pairing_1d",
                   m.eval_on(RegionSpec::interval(iv.first, iv.second)), cfg.expect, 1e-6);
    }

    std::vector<double> radii;
    for (int k = 2; k <= 10; ++k) radii.push_back(std::pow(3.0, -k));
    const double lo_bound = 1.0 / 54.0 - 0.02;
    const double hi_bound = 53.0 / 54.0 + 0.02;
    for (double x : {0.0, 1.0, 0.25}) {
        const auto [lo, hi] = counterexample_probe(cfg.cantor_levels, x, radii);
        CheckItem item_lo;
        item_lo.label = "cantor.probe_low[x=" + std::to_string(x) + "]";
        item_lo.value = lo;
        item_lo.expected = lo_bound;
        item_lo.residual = std::max(0.0, lo_bound - lo);
        item_lo.passed = lo >= lo_bound;
        result.items.push_back(item_lo);
        CheckItem item_hi;
        item_hi.label = "cantor.probe_high[x=" + std::to_string(x) + "]";
        item_hi.value = hi;
        item_hi.expected = hi_bound;
        item_hi.residual = std::max(0.0, hi - hi_bound);
        item_hi.passed = hi <= hi_bound;
        result.items.push_back(item_hi);
        result.passed = result.passed && item_lo.passed && item_hi.passed;
    }

    for (const auto& [a, b] : std::initializer_list<std::pair<double, double>>{
             {0.0, 1.0}, {0.25, 0.75}, {0.0, 0.5}}) {
        const IpoViolationDemo demo = ipo_violation_demo(a, b);
        push_value(result,
                   "cantor.ipo_mass(" + std::to_string(a) + "," + std::to_string(b) + ")",
                   demo.cantor_mass, b - a, 0.0);
    }

    bool refused = false;
    try {
        counterexample_pairing_measure(0.0, 1.0);
    } catch (const HypothesisViolation&) {
        refused = true;
    }
    CheckItem refusal;
    refusal.label = "cantor.pairing_refused";
    refusal.value = refused ? 1.0 : 0.0;
    refusal.expected = 1.0;
    refusal.residual = refused ? 0.0 : 1.0;
    refusal.passed = refused;
    result.items.push_back(refusal);
    result.passed = result.passed && refused;

    if (!cfg.test_functions.empty()) {
        const auto& phi = sc.test_functions.at(cfg.test_functions.front());
        push_value(result, "cantor.divergence_zero",
                   counterexample_divergence_pairing(phi, cfg.cantor_levels), 0.0, 1e-6);
    }
}

CheckResult run_one_check(const Scenario& sc, const CheckConfig& cfg,
                          std::optional<double> tolerance_override)
{
    CheckResult result;
    result.check = cfg.name;
    result.tolerance = tolerance_override.value_or(cfg.tolerance);
    CheckConfig local = cfg;
    local.tolerance = result.tolerance;
    try {
        if (cfg.name == "pairing") run_pairing_check(sc, local, result);
        else if (cfg.name == "coarea") run_coarea_check(sc, local, result);
        else if (cfg.name == "chain") run_chain_check(sc, local, result);
        else if (cfg.name == "leibniz") run_leibniz_check(sc, local, result);
        else if (cfg.name == "gaussgreen") run_gaussgreen_check(sc, local, result);
        else if (cfg.name == "oracle") run_oracle_check(sc, local, result);
        else if (cfg.name == "cantor") run_cantor_check(sc, local, result);
        else throw ScenarioError("unknown check '" + cfg.name + "'");
    } catch (const std::exception& e) {
        result.error = std::string(cfg.name) + ": " + e.what();
        result.passed = false;
    }
    return result;
}

}  // namespace

ReportBundle run_scenario(const Scenario& scenario, const std::vector<std::string>& selection,
                          std::optional<double> tolerance_override, bool with_oracle)
{
    ReportBundle bundle;
    bundle.scenario = scenario.name;

    std::vector<const CheckConfig*> selected;
    for (const auto& cfg : scenario.checks) {
        if (cfg.name == "oracle" && !with_oracle && selection.empty()) continue;
        if (!selection.empty() &&
            std::find(selection.begin(), selection.end(), cfg.name) == selection.end())
            continue;
        selected.push_back(&cfg);
    }

    const int threads = thread_budget();
    if (threads <= 1 || selected.size() <= 1) {
        for (const auto* cfg : selected)
            bundle.checks.push_back(run_one_check(scenario, *cfg, tolerance_override));
    } else {
        // Waves of independent checks; assembly stays in declaration order.
        std::vector<std::future<CheckResult>> futures(selected.size());
        std::size_t next = 0;
        while (next < selected.size()) {
            const std::size_t wave_end =
                std::min(selected.size(), next + static_cast<std::size_t>(threads));
            for (std::size_t i = next; i < wave_end; ++i) {
                futures[i] = std::async(std::launch::async, [&, i] {
                    return run_one_check(scenario, *selected[i], tolerance_override);
                });
            }
            next = wave_end;
        }
        for (auto& f : futures) bundle.checks.push_back(f.get());
    }

    for (const auto& c : bundle.checks) bundle.passed = bundle.passed && c.passed;
    return bundle;
}

std::string report_to_json(const ReportBundle& report)
{
    json root;
    root["scenario"] = report.scenario;
    root["passed"] = report.passed;
    root["checks"] = json::array();
    for (const auto& c : report.checks) {
        json cj;
        cj["check"] = c.check;
        cj["tolerance"] = c.tolerance;
        cj["passed"] = c.passed;
        if (!c.error.empty()) cj["error"] = c.error;
        cj["items"] = json::array();
        for (const auto& item : c.items) {
            json ij;
            ij["label"] = item.label;
            ij["value"] = item.value;
            if (item.expected) ij["expected"] = *item.expected;
            ij["residual"] = item.residual;
            ij["passed"] = item.passed;
            cj["items"].push_back(ij);
        }
        root["checks"].push_back(cj);
    }
    return root.dump(2) + "\n";
}

const std::vector<std::string>& known_checks()
{
    static const std::vector<std::string> names{"pairing", "coarea",     "chain", "leibniz",
                                                "gaussgreen", "oracle", "cantor"};
    return names;
}

}  // namespace dmpair
