#include "dseries/io.hpp"
#include "dseries/catalog.hpp"
#include "dseries/zeta.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dseries {

using nlohmann::json;

Complex parse_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw precondition_error("complex values are numbers or [re, im] pairs, got " + j.dump());
}

Target parse_target(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "poles") return Target::poles();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception&) {
        throw precondition_error("target: expected a number, [re, im], or \"inf\", got '" +
                                 text + "'");
    }
    return Target::value(parse_complex(j));
}

std::vector<double> parse_grid(const std::string& text) {
    if (text.empty()) throw precondition_error("grid: empty specification");
    auto parse_num = [](const std::string& s) {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw precondition_error("grid: bad number '" + s + "'");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ':')) parts.push_back(tok);
        if (parts.size() != 3) throw precondition_error("grid: expected a:b:n, got '" + text + "'");
        bool logspace = false;
        std::string count = parts[2];
        if (count.size() > 3 && count.substr(count.size() - 3) == "log") {
            logspace = true;
            count = count.substr(0, count.size() - 3);
        }
        double a = parse_num(parts[0]), b = parse_num(parts[1]);
        long n = std::stol(count);
        if (n < 1) throw precondition_error("grid: point count must be >= 1");
        if (!(a > 0) || !(b >= a))
            throw precondition_error("grid: need 0 < a <= b, got '" + text + "'");
        std::vector<double> g(n);
        for (long i = 0; i < n; ++i) {
            double t = n == 1 ? 0.0 : double(i) / (n - 1);
            g[i] = logspace ? a * std::pow(b / a, t) : a + (b - a) * t;
        }
        return g;
    }
    std::vector<double> g;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) g.push_back(parse_num(tok));
    if (g.empty()) throw precondition_error("grid: no values in '" + text + "'");
    for (std::size_t i = 1; i < g.size(); ++i)
        if (g[i] <= g[i - 1]) throw precondition_error("grid: values must increase");
    return g;
}

namespace {

ExponentialSum parse_sum(const json& j) {
    if (!j.contains("terms") || !j["terms"].is_array())
        throw precondition_error("exp_sum: missing 'terms' array");
    std::vector<Term> terms;
    for (const auto& t : j["terms"]) {
        if (t.is_array() && t.size() == 2 && t[0].is_number())
            terms.push_back({t[0].get<double>(), parse_complex(t[1])});
        else if (t.is_object())
            terms.push_back({t.at("lambda").get<double>(), parse_complex(t.at("a"))});
        else
            throw precondition_error("exp_sum: term must be [lambda, a] or {lambda, a}");
    }
    SumConvention conv = SumConvention::dirichlet;
    std::string cname = j.value("convention", "dirichlet");
    if (cname == "exponent")
        conv = SumConvention::exponent;
    else if (cname != "dirichlet")
        throw precondition_error("exp_sum: convention must be dirichlet or exponent");
    std::optional<TailBound> tail;
    if (j.contains("tail")) {
        const auto& t = j["tail"];
        tail = TailBound{t.at("C").get<double>(), t.at("lambda_floor").get<double>(),
                         t.at("sigma_min").get<double>()};
    }
    return make_sum(std::move(terms), conv, tail);
}

} // namespace

FunctionSpec parse_function_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw precondition_error("function config: missing 'type'");
    std::string type = j["type"].get<std::string>();
    FunctionSpec spec;
    spec.echo = j;
    if (type == "exp_sum") {
        spec.series = parse_sum(j);
        spec.oracle = as_oracle(*spec.series);
        spec.name = j.value("name", "exp_sum[" + std::to_string(spec.series->terms.size()) + "]");
    } else if (type == "geometric") {
        spec.oracle = geometric_oracle(j.value("validity", 256.0));
        spec.name = j.value("name", "1/(1-e^-s)");
    } else if (type == "zeta") {
        spec.oracle = zeta_oracle(j.value("validity", 35.0));
        spec.name = j.value("name", "zeta");
    } else if (type == "constant") {
        Complex c = parse_complex(j.at("value"));
        spec.oracle = constant_oracle(c);
        spec.name = j.value("name", "constant");
    } else if (type == "exp_poly") {
        std::vector<Complex> coeffs;
        for (const auto& c : j.at("coeffs")) coeffs.push_back(parse_complex(c));
        spec.oracle = exp_polynomial_oracle(std::move(coeffs));
        spec.name = j.value("name", "exp_poly");
    } else if (type == "quotient") {
        FunctionSpec num = parse_function_json(j.at("numerator"));
        FunctionSpec den = parse_function_json(j.at("denominator"));
        spec.oracle = quotient_oracle(num.oracle, den.oracle);
        spec.name = j.value("name", num.name + "/" + den.name);
    } else if (type == "shift") {
        FunctionSpec base = parse_function_json(j.at("base"));
        spec.oracle = shift_oracle(base.oracle, parse_complex(j.at("tau")));
        spec.name = j.value("name", base.name + " shifted");
    } else if (type == "product") {
        const auto& factors = j.at("factors");
        if (!factors.is_array() || factors.empty())
            throw precondition_error("product: 'factors' must be a nonempty array");
        FunctionSpec first = parse_function_json(factors[0]);
        spec.oracle = first.oracle;
        spec.name = first.name;
        for (std::size_t i = 1; i < factors.size(); ++i) {
            FunctionSpec next = parse_function_json(factors[i]);
            spec.oracle = product_oracle(spec.oracle, next.oracle);
            spec.name += "*" + next.name;
        }
        spec.name = j.value("name", spec.name);
    } else if (type == "scale") {
        FunctionSpec base = parse_function_json(j.at("base"));
        spec.oracle = scale_by_exponential(base.oracle, j.at("lambda").get<double>());
        spec.name = j.value("name", base.name + " scaled");
    } else if (type == "catalog") {
        const CatalogEntry& e = catalog_entry(j.at("name").get<std::string>());
        if (!e.make)
            throw precondition_error("catalog entry '" + e.name + "' has no evaluator");
        spec.oracle = e.make();
        spec.series = e.series;
        spec.name = e.name;
    } else {
        throw precondition_error("function config: unknown type '" + type + "'");
    }
    return spec;
}

FunctionSpec parse_function_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw precondition_error("config '" + path + "': " + e.what());
    }
    return parse_function_json(j);
}

std::vector<Complex> parse_points_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw precondition_error("points file '" + path + "': " + e.what());
    }
    if (j.is_object() && j.contains("points")) j = j["points"];
    if (!j.is_array()) throw precondition_error("points file: expected an array of [re, im]");
    std::vector<Complex> pts;
    for (const auto& p : j) pts.push_back(parse_complex(p));
    return pts;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json records_json(const LocateResult& loc) {
    json arr = json::array();
    for (const auto& rec : loc.records) {
        json r;
        r["position"] = complex_json(rec.position);
        r["multiplicity"] = rec.multiplicity;
        r["kind"] = rec.kind == ZeroRecord::Kind::pole ? "pole" : "value";
        r["certification_radius"] = rec.certification_radius;
        r["residual"] = rec.residual;
        r["merged_cluster"] = rec.merged_cluster;
        arr.push_back(std::move(r));
    }
    json out;
    out["records"] = std::move(arr);
    out["used_radius"] = loc.used_radius;
    out["total"] = loc.total;
    return out;
}

json tolerances_json() {
    json t;
    t["winding_tol"] = 5e-4;
    t["integer_tol"] = 0.25;
    t["boundary_margin"] = "max(1e-9*max(1,r), 1.2e-5*r)";
    t["max_retreats"] = 26;
    t["retreat_schedule"] = "r*(1+1e-6*1.445^(k-1))";
    t["box_floor"] = 1e-3;
    t["multiplicity_cap"] = 16;
    t["quad_tol"] = 1e-9;
    t["series_eval_tol"] = 1e-12;
    t["match_tol"] = 1e-6;
    t["theta"] = 0.05;
    return t;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw precondition_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw precondition_error("cannot write '" + path + "'");
    out << content;
    if (!out.flush()) throw precondition_error("short write to '" + path + "'");
}

json make_manifest(const std::string& subcommand, const json& config, unsigned long long seed,
                   int threads) {
    json m;
    m["tool"] = "dcount";
    m["version"] = "1.0.0";
    m["subcommand"] = subcommand;
    m["config"] = config;
    m["tolerances"] = tolerances_json();
    m["seed"] = seed;
    m["threads"] = threads;
    return m;
}

void write_manifest(json manifest, double wall_ms, const std::vector<std::string>& outputs,
                    const std::string& path) {
    manifest["wall_ms"] = wall_ms;
    manifest["outputs"] = outputs;
    write_text_file(path, manifest.dump(2) + "\n");
}

} // namespace dseries
