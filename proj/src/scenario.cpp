#include "natform/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace natform {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_number(const std::string& s, int line) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(line, "expected a number, got '" + s + "'");
    }
}

int parse_int(const std::string& s, int line) {
    try {
        size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(line, "expected an integer, got '" + s + "'");
    }
}

Vec parse_vec(const std::string& s, int line) {
    const auto parts = split(s, ',');
    Vec v(static_cast<int>(parts.size()));
    for (size_t i = 0; i < parts.size(); ++i) v[static_cast<int>(i)] = parse_number(parts[i], line);
    return v;
}

/// "dy1^dy3" / "dx2" / "1" -> 0-based strictly increasing axes.
std::vector<int> parse_pattern(const std::string& s, int nvars, int line) {
    const std::string t = trim(s);
    if (t == "1") return {};
    std::vector<int> axes;
    for (const auto& piece : split(t, '^')) {
        if (piece.size() < 3 || piece[0] != 'd' || (piece[1] != 'x' && piece[1] != 'y'))
            throw ConfigError(line, "bad basis factor '" + piece + "' (want dy<i> or dx<i>)");
        const int axis = parse_int(piece.substr(2), line);
        if (axis < 1 || axis > nvars)
            throw ConfigError(line, "basis axis " + std::to_string(axis) + " out of range 1.." +
                                        std::to_string(nvars));
        axes.push_back(axis - 1);
    }
    for (size_t i = 1; i < axes.size(); ++i)
        if (axes[i - 1] >= axes[i])
            throw ConfigError(line, "basis pattern axes must be strictly increasing");
    return axes;
}

}  // namespace

Poly parse_poly(const std::string& expr, int nvars, char var_prefix, int line) {
    Poly p(nvars);
    // Split into signed terms at top-level +/-.
    std::vector<std::pair<double, std::string>> terms;
    std::string cur;
    double sign = 1.0;
    bool at_term_start = true;
    for (char c : expr) {
        if (c == '+' || c == '-') {
            if (at_term_start && trim(cur).empty()) {
                if (c == '-') sign = -sign;
                continue;
            }
            terms.emplace_back(sign, cur);
            cur.clear();
            sign = (c == '-') ? -1.0 : 1.0;
            at_term_start = true;
            continue;
        }
        if (!std::isspace(static_cast<unsigned char>(c))) at_term_start = false;
        cur += c;
    }
    if (!trim(cur).empty()) terms.emplace_back(sign, cur);
    if (terms.empty()) throw ConfigError(line, "empty polynomial expression");

    for (auto& [sgn, body] : terms) {
        double c = sgn;
        std::vector<int> exps(static_cast<size_t>(nvars), 0);
        for (const auto& f : split(body, '*')) {
            if (f.empty()) throw ConfigError(line, "empty factor in '" + body + "'");
            if (f[0] == var_prefix) {
                const auto caret = f.find('^');
                const std::string vs = caret == std::string::npos ? f.substr(1) : f.substr(1, caret - 1);
                const int axis = parse_int(vs, line);
                if (axis < 1 || axis > nvars)
                    throw ConfigError(line, "variable " + f + " out of range (1.." +
                                                std::to_string(nvars) + ")");
                const int e = caret == std::string::npos ? 1 : parse_int(f.substr(caret + 1), line);
                if (e < 0) throw ConfigError(line, "negative exponent in '" + f + "'");
                exps[static_cast<size_t>(axis - 1)] += e;
            } else {
                c *= parse_number(f, line);
            }
        }
        int total = 0;
        for (int e : exps) total += e;
        if (total > 4)
            throw ConfigError(line, "monomial degree " + std::to_string(total) +
                                        " exceeds the catalog limit of 4");
        p.add_term(c, std::move(exps));
    }
    return p;
}

ScenarioSpec parse_scenario(const std::string& text, const std::string& id) {
    ScenarioSpec spec;
    spec.id = id;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    bool have_domain = false, have_map = false;

    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            static const std::vector<std::string> known = {"domain", "map",  "form",  "battery",
                                                           "grid",   "sweep", "expect"};
            if (std::find(known.begin(), known.end(), section) == known.end())
                throw ConfigError(line, "unknown section [" + section + "]");
            if (section == "sweep") spec.sweep = SweepSpec{};
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (section.empty()) throw ConfigError(line, "key outside of any section");

        if (section == "domain") {
            if (key == "lower") {
                spec.lower = parse_vec(val, line);
                have_domain = true;
            } else if (key == "upper") {
                spec.upper = parse_vec(val, line);
            } else if (key == "exclude") {
                spec.extra_excluded.push_back(parse_vec(val, line));
            } else {
                throw ConfigError(line, "unknown key '" + key + "' in [domain]");
            }
        } else if (section == "map") {
            have_map = true;
            if (key == "family") {
                spec.map.family = val;
            } else if (key == "dim") {
                spec.map.dim = parse_int(val, line);
            } else if (key == "s") {
                spec.map.s = parse_number(val, line);
            } else if (key == "matrix") {
                for (const auto& row : split(val, ';')) {
                    std::vector<double> r;
                    for (const auto& x : split(row, ',')) r.push_back(parse_number(x, line));
                    spec.map.matrix_rows.push_back(std::move(r));
                }
            } else if (key == "source_dim") {
                spec.map.source_dim = parse_int(val, line);
            } else if (key == "comp") {
                if (spec.map.source_dim <= 0)
                    throw ConfigError(line, "set source_dim before polynomial components");
                spec.map.components.push_back(parse_poly(val, spec.map.source_dim, 'x', line));
            } else {
                throw ConfigError(line, "unknown key '" + key + "' in [map]");
            }
        } else if (section == "form") {
            const int nvars = spec.map.family == "linear"
                                  ? static_cast<int>(spec.map.matrix_rows.size())
                                  : (spec.map.family == "polynomial"
                                         ? static_cast<int>(spec.map.components.size())
                                         : spec.map.dim);
            if (nvars <= 0) throw ConfigError(line, "[form] must come after a complete [map]");
            if (key == "degree") {
                spec.form.degree = parse_int(val, line);
            } else if (key == "named") {
                spec.form.named = val;
            } else if (key == "term") {
                const auto comma = val.rfind(',');
                if (comma == std::string::npos)
                    throw ConfigError(line, "term wants 'coeff_expr, basis_pattern'");
                FormTermSpec t;
                t.coeff = parse_poly(val.substr(0, comma), nvars, 'y', line);
                t.pattern = parse_pattern(val.substr(comma + 1), nvars, line);
                spec.form.terms.push_back(std::move(t));
            } else if (key == "a") {
                spec.decomposed_a = parse_poly(val, nvars, 'y', line);
            } else if (key == "gamma") {
                if (!spec.decomposed_gamma) spec.decomposed_gamma = FormSpec{};
                const auto comma = val.rfind(',');
                if (comma == std::string::npos)
                    throw ConfigError(line, "gamma wants 'coeff_expr, basis_pattern'");
                FormTermSpec t;
                t.coeff = parse_poly(val.substr(0, comma), nvars, 'y', line);
                t.pattern = parse_pattern(val.substr(comma + 1), nvars, line);
                spec.decomposed_gamma->degree = static_cast<int>(t.pattern.size());
                spec.decomposed_gamma->terms.push_back(std::move(t));
            } else if (key == "h") {
                spec.leibniz_h = parse_poly(val, spec.lower.dim(), 'x', line);
            } else if (key == "beta") {
                if (!spec.leibniz_beta) spec.leibniz_beta = FormSpec{};
                const auto comma = val.rfind(',');
                if (comma == std::string::npos)
                    throw ConfigError(line, "beta wants 'coeff_expr, basis_pattern'");
                FormTermSpec t;
                t.coeff = parse_poly(val.substr(0, comma), spec.lower.dim(), 'x', line);
                t.pattern = parse_pattern(val.substr(comma + 1), spec.lower.dim(), line);
                spec.leibniz_beta->degree = static_cast<int>(t.pattern.size());
                spec.leibniz_beta->terms.push_back(std::move(t));
            } else {
                throw ConfigError(line, "unknown key '" + key + "' in [form]");
            }
        } else if (section == "battery") {
            if (key == "radius") {
                spec.battery.radius = parse_number(val, line);
            } else if (key == "amplitude") {
                spec.battery.amplitude = parse_number(val, line);
            } else if (key == "sites") {
                spec.battery.site_center = spec.battery.site_singular = spec.battery.site_off = false;
                for (const auto& sname : split(val, ',')) {
                    if (sname == "center") spec.battery.site_center = true;
                    else if (sname == "singular") spec.battery.site_singular = true;
                    else if (sname == "off") spec.battery.site_off = true;
                    else throw ConfigError(line, "unknown battery site '" + sname + "'");
                }
            } else if (key == "off") {
                spec.battery.off_override = parse_vec(val, line);
            } else if (key == "patterns") {
                if (val != "all") {
                    for (const auto& tup : split(val, ',')) {
                        std::vector<int> axes;
                        for (const auto& a : split(tup, '-')) axes.push_back(parse_int(a, line) - 1);
                        for (size_t i = 1; i < axes.size(); ++i)
                            if (axes[i - 1] >= axes[i])
                                throw ConfigError(line, "pattern axes must be strictly increasing");
                        spec.battery.patterns.push_back(std::move(axes));
                    }
                }
            } else {
                throw ConfigError(line, "unknown key '" + key + "' in [battery]");
            }
        } else if (section == "grid") {
            if (key == "resolution") spec.grid.resolution = parse_int(val, line);
            else if (key == "levels") spec.grid.levels = parse_int(val, line);
            else if (key == "epsilon0") spec.grid.epsilon0 = parse_number(val, line);
            else if (key == "tol") spec.grid.tol = parse_number(val, line);
            else if (key == "sobolev_p") spec.grid.sobolev_p = parse_number(val, line);
            else if (key == "lambda_q") spec.grid.lambda_q = parse_number(val, line);
            else if (key == "mollify_eps0") spec.grid.mollify_eps0 = parse_number(val, line);
            else if (key == "mollify_levels") spec.grid.mollify_levels = parse_int(val, line);
            else throw ConfigError(line, "unknown key '" + key + "' in [grid]");
        } else if (section == "sweep") {
            auto& sw = *spec.sweep;
            if (key == "param") {
                if (val != "s" && val != "k" && val != "p" && val != "q")
                    throw ConfigError(line, "unknown sweep parameter '" + val + "'");
                sw.param = val;
            } else if (key == "values") {
                for (const auto& v : split(val, ',')) sw.values.push_back(parse_number(v, line));
            } else if (key == "from") {
                sw.from = parse_number(val, line);
            } else if (key == "to") {
                sw.to = parse_number(val, line);
            } else if (key == "steps") {
                sw.steps = parse_int(val, line);
            } else {
                throw ConfigError(line, "unknown key '" + key + "' in [sweep]");
            }
        } else if (section == "expect") {
            static const std::vector<std::string> checks = {
                "naturality", "closedness", "decomposed", "routegap",  "leibniz",   "sobolev",
                "lambda",     "stability",  "kdagger",    "kdagger_k", "kdagger_k1", "tau"};
            const std::string base = key.substr(0, key.find('@'));
            if (std::find(checks.begin(), checks.end(), base) == checks.end())
                throw ConfigError(line, "unknown check '" + base + "' in [expect]");
            static const std::vector<std::string> verdicts = {
                "holds",  "fails",  "inconclusive", "finite",      "divergent", "bounded",
                "blowup", "evidence", "no-evidence", "converged", "any"};
            if (std::find(verdicts.begin(), verdicts.end(), val) == verdicts.end())
                throw ConfigError(line, "unknown expected verdict '" + val + "'");
            spec.expectations.emplace_back(key, val);
        }
    }

    if (!have_domain) throw ConfigError(0, "missing [domain] section with lower/upper");
    if (spec.lower.dim() == 0 || spec.upper.dim() == 0)
        throw ConfigError(0, "[domain] needs both lower and upper corners");
    if (!have_map) throw ConfigError(0, "missing [map] section");
    if (spec.sweep) {
        auto& sw = *spec.sweep;
        if (sw.values.empty()) {
            if (!sw.from || !sw.to || sw.steps < 1)
                throw ConfigError(0, "[sweep] needs either values or from/to/steps");
            for (int i = 0; i < sw.steps; ++i) {
                const double t = sw.steps == 1 ? 0.0 : static_cast<double>(i) / (sw.steps - 1);
                sw.values.push_back(*sw.from + t * (*sw.to - *sw.from));
            }
        }
        if (sw.param.empty()) throw ConfigError(0, "[sweep] needs a param");
        if (sw.values.empty()) throw ConfigError(0, "[sweep] range is empty");
    }
    return spec;
}

ScenarioSpec parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string id = path;
    const auto slash = id.find_last_of("/\\");
    if (slash != std::string::npos) id = id.substr(slash + 1);
    const auto dot = id.rfind('.');
    if (dot != std::string::npos) id = id.substr(0, dot);
    return parse_scenario(ss.str(), id);
}

namespace {

FormField poly_term_field(const std::vector<FormTermSpec>& terms, int degree, int ambient) {
    // coefficients and their gradients are exact polynomial evaluations
    struct Prepared {
        Poly coeff;
        std::vector<Poly> grad;
        std::int64_t rank;
        std::vector<int> pattern;
    };
    auto prepared = std::make_shared<std::vector<Prepared>>();
    for (const auto& t : terms) {
        Prepared p;
        p.coeff = t.coeff;
        for (int i = 0; i < ambient; ++i) p.grad.push_back(t.coeff.derivative(i));
        p.rank = MultiIndex(t.pattern, ambient).rank();
        p.pattern = t.pattern;
        prepared->push_back(std::move(p));
    }
    FormField out;
    out.degree = degree;
    out.ambient_dim = ambient;
    out.coeff = [prepared, degree, ambient](const Vec& y) {
        Covector v(degree, ambient);
        for (const auto& t : *prepared) v.coeff(t.rank) += t.coeff.eval(y);
        return v;
    };
    out.d_coeff = [prepared, degree, ambient](const Vec& y) {
        Covector v(degree + 1, ambient);
        for (const auto& t : *prepared) {
            Covector da(1, ambient);
            for (int i = 0; i < ambient; ++i) da.coeff(i) = t.grad[static_cast<size_t>(i)].eval(y);
            Covector base(degree, ambient);
            base.coeff(t.rank) = 1.0;
            v += wedge(da, base);
        }
        return v;
    };
    return out;
}

FormField named_form(const std::string& name, int ambient, int auto_degree) {
    if (name == "volume") {
        std::vector<int> all(static_cast<size_t>(ambient));
        for (int i = 0; i < ambient; ++i) all[static_cast<size_t>(i)] = i;
        return constant_field(Covector::basis(MultiIndex(all, ambient)));
    }
    if (name == "half_angle") {
        if (ambient != 2) throw ConfigError(0, "half_angle needs a 2-dimensional target");
        std::vector<FormTermSpec> terms(2);
        terms[0].coeff = Poly::variable(2, 0) * Poly::constant(2, 0.5);
        terms[0].pattern = {1};
        terms[1].coeff = Poly::variable(2, 1) * Poly::constant(2, -0.5);
        terms[1].pattern = {0};
        return poly_term_field(terms, 1, 2);
    }
    if (name == "angle") {
        if (ambient != 2) throw ConfigError(0, "angle needs a 2-dimensional target");
        FormField out;
        out.degree = 1;
        out.ambient_dim = 2;
        out.coeff = [](const Vec& y) {
            Covector v(1, 2);
            const double r2 = y.norm2();
            if (r2 == 0.0) return v;  // a.e. value at the singular point
            v.coeff(0) = -y[1] / r2;
            v.coeff(1) = y[0] / r2;
            return v;
        };
        out.d_coeff = [](const Vec&) { return Covector(2, 2); };  // closed away from 0
        return out;
    }
    if (name == "auto") {
        // y_{(k mod n)+1} dy_1 ^ ... ^ dy_k: a generic non-closed degree-k form
        const int k = auto_degree;
        if (k < 0) throw ConfigError(0, "named = auto needs a degree (sweep over k)");
        if (k > ambient) throw ConfigError(0, "auto form degree exceeds the target dimension");
        std::vector<int> pat(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) pat[static_cast<size_t>(i)] = i;
        std::vector<FormTermSpec> terms(1);
        terms[0].coeff = Poly::variable(ambient, k % ambient);
        terms[0].pattern = pat;
        return poly_term_field(terms, k, ambient);
    }
    throw ConfigError(0, "unknown named form '" + name + "'");
}

}  // namespace

FormField build_form(const FormSpec& spec, int ambient, int auto_degree) {
    if (!spec.named.empty()) {
        if (!spec.terms.empty()) throw ConfigError(0, "form: named and term are exclusive");
        return named_form(spec.named, ambient, auto_degree >= 0 ? auto_degree : spec.degree);
    }
    if (spec.terms.empty()) throw ConfigError(0, "form: no terms given");
    int degree = spec.degree;
    if (degree < 0) degree = static_cast<int>(spec.terms.front().pattern.size());
    for (const auto& t : spec.terms)
        if (static_cast<int>(t.pattern.size()) != degree)
            throw ConfigError(0, "form: term pattern degree does not match the declared degree");
    return poly_term_field(spec.terms, degree, ambient);
}

namespace {

MapModel build_map(const MapSpec& ms, const std::optional<SweepOverride>& over) {
    double s = ms.s;
    if (over && over->param == "s") s = over->value;
    if (ms.family == "winding") return winding_map();
    if (ms.family == "radial_power") {
        const int d = ms.dim > 0 ? ms.dim : 2;
        return radial_power_map(s, d);
    }
    if (ms.family == "identity") {
        const int d = ms.dim > 0 ? ms.dim : 2;
        return linear_map(Matrix::identity(d));
    }
    if (ms.family == "linear") {
        if (ms.matrix_rows.empty()) throw ConfigError(0, "linear map needs a matrix");
        const int n = static_cast<int>(ms.matrix_rows.size());
        const int m = static_cast<int>(ms.matrix_rows.front().size());
        Matrix A(n, m);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(ms.matrix_rows[static_cast<size_t>(i)].size()) != m)
                throw ConfigError(0, "linear map matrix rows have unequal lengths");
            for (int j = 0; j < m; ++j) A(i, j) = ms.matrix_rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
        return linear_map(A);
    }
    if (ms.family == "polynomial") {
        if (ms.components.empty()) throw ConfigError(0, "polynomial map needs components");
        return polynomial_map(ms.components, ms.source_dim);
    }
    throw ConfigError(0, "unknown map family '" + ms.family + "'");
}

}  // namespace

BuiltScenario build_scenario(const ScenarioSpec& spec, const std::optional<SweepOverride>& over) {
    MapModel map = build_map(spec.map, over);
    const int m = spec.lower.dim();
    if (spec.upper.dim() != m) throw ConfigError(0, "domain corners have different dimensions");
    if (map.source_dim != m)
        throw ConfigError(0, "map source dimension " + std::to_string(map.source_dim) +
                                 " does not match the domain dimension " + std::to_string(m));

    std::vector<Excision> excised;
    for (const auto& p : map.singular_points) excised.push_back({p, spec.grid.epsilon0});
    for (const auto& p : spec.extra_excluded) excised.push_back({p, spec.grid.epsilon0});
    Domain domain(spec.lower, spec.upper, excised);
    map.fd_step = 1e-5 * domain.diameter();

    BuiltScenario built{domain, map};

    int auto_degree = spec.form.degree;
    if (over && over->param == "k") auto_degree = static_cast<int>(std::lround(over->value));
    built.alpha = build_form(spec.form, map.target_dim, auto_degree);
    built.k = built.alpha.degree;
    if (built.k > std::min(map.source_dim, map.target_dim))
        throw ConfigError(0, "form degree k = " + std::to_string(built.k) +
                                 " exceeds min(source_dim, target_dim)");

    // Battery ingredients; the forms themselves are materialized per check
    // degree by make_battery.
    const double min_side = [&] {
        double v = domain.upper()[0] - domain.lower()[0];
        for (int i = 1; i < m; ++i) v = std::min(v, domain.upper()[i] - domain.lower()[i]);
        return v;
    }();
    built.battery_radius = spec.battery.radius > 0.0 ? spec.battery.radius : 0.15 * min_side;
    built.battery_amplitude = spec.battery.amplitude;
    built.battery_patterns = spec.battery.patterns;

    auto push_site = [&](const std::string& name, const Vec& at, bool replaces) {
        for (auto& s : built.battery_sites)
            if (dist(s.second, at) < 1e-12) {
                if (replaces) s.first = name;
                return;
            }
        built.battery_sites.emplace_back(name, at);
    };
    if (spec.battery.site_center) push_site("center", domain.center(), false);
    if (spec.battery.site_singular) {
        int si = 0;
        for (const auto& e : domain.excluded()) push_site("sing" + std::to_string(si++), e.point, true);
    }
    if (spec.battery.site_off) {
        Vec off(m);
        if (spec.battery.off_override) {
            off = *spec.battery.off_override;
            if (off.dim() != m) throw ConfigError(0, "battery off site has the wrong dimension");
        } else {
            for (int i = 0; i < m; ++i)
                off[i] = domain.lower()[i] + 0.7 * (domain.upper()[i] - domain.lower()[i]);
        }
        push_site("off", off, false);
    }

    if (spec.decomposed_a) {
        FormField a;
        std::vector<FormTermSpec> t(1);
        t[0].coeff = *spec.decomposed_a;
        t[0].pattern = {};
        built.decomposed_a = poly_term_field(t, 0, map.target_dim);
    }
    if (spec.decomposed_gamma)
        built.decomposed_gamma = build_form(*spec.decomposed_gamma, map.target_dim);
    if (spec.leibniz_h) {
        std::vector<FormTermSpec> t(1);
        t[0].coeff = *spec.leibniz_h;
        t[0].pattern = {};
        built.leibniz_h = poly_term_field(t, 0, m);
    }
    if (spec.leibniz_beta) built.leibniz_beta = build_form(*spec.leibniz_beta, m);

    built.sched = GridSchedule{spec.grid.resolution, spec.grid.levels, 1.0};
    built.tol = spec.grid.tol;
    built.sobolev_p = spec.grid.sobolev_p > 0.0 ? spec.grid.sobolev_p : built.k + 1.0;
    if (over && over->param == "p") built.sobolev_p = over->value;
    built.lambda_q = spec.grid.lambda_q;
    if (over && over->param == "q") built.lambda_q = over->value;
    if (built.lambda_q == 0.0 && built.k >= 2)
        built.lambda_q = static_cast<double>(built.k) / (built.k - 1.0);
    built.mollify_eps0 =
        spec.grid.mollify_eps0 > 0.0 ? spec.grid.mollify_eps0 : 0.1 * domain.diameter();
    built.mollify_levels = spec.grid.mollify_levels;
    return built;
}

std::vector<BatteryEntry> make_battery(const BuiltScenario& built, int degree,
                                       const Domain* domain_override) {
    const Domain& domain = domain_override ? *domain_override : built.domain;
    const int m = domain.dim();
    if (degree < 0 || degree > m)
        throw ConfigError(0, "no admissible test forms of degree " + std::to_string(degree) +
                                 " (check the form degree against the domain dimension)");
    if (built.battery_sites.empty()) throw ConfigError(0, "empty test-form battery: no sites");

    std::vector<std::vector<int>> patterns = built.battery_patterns;
    if (patterns.empty()) {
        for (std::int64_t r = 0; r < binomial(m, degree); ++r)
            patterns.push_back(MultiIndex::unrank(r, m, degree).entries());
    }
    for (const auto& pat : patterns)
        if (static_cast<int>(pat.size()) != degree)
            throw ConfigError(0, "battery pattern degree must be " + std::to_string(degree));
    if (patterns.empty()) throw ConfigError(0, "empty test-form battery: no patterns");

    std::vector<BatteryEntry> battery;
    for (const auto& [name, at] : built.battery_sites) {
        for (const auto& pat : patterns) {
            const MultiIndex mi(pat, m);
            BatteryEntry e;
            e.id = name + ".p" + std::to_string(mi.rank());
            try {
                e.form = bump_test_form(domain, at, built.battery_radius, built.battery_amplitude, mi);
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(0, std::string("battery: ") + ex.what());
            }
            battery.push_back(std::move(e));
        }
    }
    return battery;
}

}  // namespace natform
