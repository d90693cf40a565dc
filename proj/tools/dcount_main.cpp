#include "dseries/almost_periodic.hpp"
#include "dseries/cartan.hpp"
#include "dseries/io.hpp"
#include "dseries/lambda_op.hpp"
#include "dseries/parallel.hpp"
#include "dseries/symdiff.hpp"
#include "dseries/verify.hpp"
#include "dseries/weierstrass.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>

namespace {

using dseries::Complex;
using nlohmann::json;

const char* kUsage = R"(dcount - zero/pole counting for Dirichlet-type series

usage: dcount <subcommand> [flags]

subcommands
  eval         evaluate a function          --fn F --s S
  count        n(r, a) in a closed disk     --fn F --r R [--a A]
  zeros        locate solutions of f = a    --fn F --r R [--a A]
  table        counting table over a grid   --fn F --grid G [--a A]
  jensen       Jensen identity residual     --fn F --r R [--tol T]
  poisson      Poisson-Jensen residual      --fn F --r R --s S [--tol T]
  product      genus-1 product + growth     --points P [--s S]
  lambda       iterated shift quotient      --fn F --tau T --d K --s S
  cartan       exclusion disk cover         --points P --h H [--R1 X]
  translation  translation number scan      --fn F --eps E --window W
                 [--step D --sigma0 S --range R]
  symdiff      zero set difference          --F A --G B (--T X | --grid G)
                 [--match-tol M]
  verify       catalog suite                [--grid G] (default 5:50:8log)
  catalog      list built-in functions

flags
  --fn/--F/--G  function config JSON path   --a     target, "inf" for poles
  --r/--T       radius / height             --grid  a:b:n, a:b:nlog, or x,y,z
  --s           complex point [re,im]       --tol   quadrature tolerance
  --match-tol   pairing tolerance           --out   output path (and manifest base)
  --threads     worker count                --seed  recorded in the manifest

exit codes: 0 success, 1 computation or assertion failure, 2 usage error
)";

struct Args {
    std::string subcommand;
    std::map<std::string, std::string> flags;

    bool has(const std::string& k) const { return flags.count(k) > 0; }
    std::string get(const std::string& k) const {
        auto it = flags.find(k);
        if (it == flags.end())
            throw dseries::precondition_error("missing required flag --" + k);
        return it->second;
    }
    std::string get_or(const std::string& k, const std::string& d) const {
        auto it = flags.find(k);
        return it == flags.end() ? d : it->second;
    }
    double num(const std::string& k) const {
        std::string v = get(k);
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size())
            throw dseries::precondition_error("flag --" + k + ": bad number '" + v + "'");
        return x;
    }
    double num_or(const std::string& k, double d) const { return has(k) ? num(k) : d; }
    long integer(const std::string& k) const {
        double x = num(k);
        long n = std::lround(x);
        if (x != double(n))
            throw dseries::precondition_error("flag --" + k + ": expected an integer");
        return n;
    }
};

Args parse_args(int argc, char** argv) {
    Args a;
    if (argc < 2) throw dseries::precondition_error("no subcommand given");
    a.subcommand = argv[1];
    for (int i = 2; i < argc; ++i) {
        std::string tok = argv[i];
        if (tok.rfind("--", 0) != 0)
            throw dseries::precondition_error("expected a --flag, got '" + tok + "'");
        std::string key = tok.substr(2);
        if (key.empty()) throw dseries::precondition_error("empty flag name");
        if (i + 1 >= argc)
            throw dseries::precondition_error("flag --" + key + " needs a value");
        a.flags[key] = argv[++i];
    }
    static const std::map<std::string, std::vector<std::string>> known = {
        {"eval", {"fn", "s", "tol", "out", "threads", "seed"}},
        {"count", {"fn", "r", "a", "out", "threads", "seed"}},
        {"zeros", {"fn", "r", "a", "out", "threads", "seed"}},
        {"table", {"fn", "grid", "a", "out", "threads", "seed"}},
        {"jensen", {"fn", "r", "tol", "out", "threads", "seed"}},
        {"poisson", {"fn", "r", "s", "tol", "out", "threads", "seed"}},
        {"product", {"points", "s", "out", "threads", "seed"}},
        {"lambda", {"fn", "tau", "d", "s", "out", "threads", "seed"}},
        {"cartan", {"points", "h", "R1", "out", "threads", "seed"}},
        {"translation",
         {"fn", "eps", "window", "step", "sigma0", "range", "out", "threads", "seed"}},
        {"symdiff", {"F", "G", "T", "grid", "match-tol", "out", "threads", "seed"}},
        {"verify", {"grid", "out", "threads", "seed"}},
        {"catalog", {"out", "threads", "seed"}},
    };
    auto it = known.find(a.subcommand);
    if (it == known.end())
        throw dseries::precondition_error("unknown subcommand '" + a.subcommand + "'");
    for (const auto& [key, value] : a.flags) {
        (void)value;
        if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
            throw dseries::precondition_error("subcommand '" + a.subcommand +
                                              "' does not take --" + key);
    }
    return a;
}

Complex parse_point(const std::string& text) {
    return dseries::parse_target(text).a; // reuses the number / [re,im] grammar
}

json config_echo(const Args& args) {
    json c;
    c["subcommand"] = args.subcommand;
    for (const auto& [k, v] : args.flags) c[k] = v;
    return c;
}

struct Emitter {
    const Args& args;
    std::vector<std::string> outputs;

    // primary artifact: stdout always, plus --out when given
    void primary(const std::string& content) {
        std::cout << content;
        if (args.has("out")) {
            dseries::write_text_file(args.get("out"), content);
            outputs.push_back(args.get("out"));
        }
    }
    void aux(const std::string& path, const std::string& content) {
        dseries::write_text_file(path, content);
        outputs.push_back(path);
    }
    std::string manifest_path() const {
        return args.has("out") ? args.get("out") + ".manifest.json" : "dcount-manifest.json";
    }
};

std::string slug(const std::string& name) {
    std::string s;
    for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return s;
}

json suite_json(const dseries::SuiteReport& suite) {
    json entries = json::array();
    for (const auto& e : suite.entries) {
        json je;
        je["name"] = e.name;
        je["skipped"] = e.skipped;
        je["passed"] = e.passed;
        if (!e.note.empty()) je["note"] = e.note;
        json checks = json::array();
        for (const auto& c : e.checks) {
            json jc;
            jc["name"] = c.name;
            jc["passed"] = c.passed;
            if (!c.detail.empty()) jc["detail"] = c.detail;
            checks.push_back(std::move(jc));
        }
        je["checks"] = std::move(checks);
        if (e.dichotomy) {
            je["dichotomy"] = {{"branch", e.dichotomy->branch},
                               {"A_lower", e.dichotomy->A_lower},
                               {"tail_integral_partial", e.dichotomy->tail_integral_partial},
                               {"hypothesis_violating", e.dichotomy->hypothesis_violating}};
        }
        entries.push_back(std::move(je));
    }
    json out;
    out["entries"] = std::move(entries);
    out["all_passed"] = suite.all_passed;
    return out;
}

int dispatch(const Args& args, Emitter& em, int threads) {
    using namespace dseries;

    if (args.subcommand == "eval") {
        FunctionSpec f = parse_function_file(args.get("fn"));
        Complex s = parse_point(args.get("s"));
        EvalResult e = f.oracle.eval(s);
        json out = {{"value", complex_json(e.value)}, {"error_bound", e.err}};
        em.primary(out.dump(2) + "\n");
        return 0;
    }

    if (args.subcommand == "count") {
        FunctionSpec f = parse_function_file(args.get("fn"));
        Target tgt = parse_target(args.get_or("a", "0"));
        CountOptions opt;
        opt.threads = threads;
        CountResult c = count_in_disk(f.oracle, args.num("r"), tgt, opt);
        std::cout << c.count << "\n";
        // one counting-schema row accumulates per run
        std::string path = args.get_or("out", "dcount-counts.csv");
        bool fresh = !std::ifstream(path).good();
        std::ofstream rowfile(path, std::ios::app);
        if (!rowfile) throw precondition_error("cannot write '" + path + "'");
        if (fresh) rowfile << "r,n_zero,n_pole,N_zero,N_pole,ratio\n";
        long nz = tgt.is_pole ? 0 : c.count;
        long np = tgt.is_pole ? c.count : c.pole_count;
        rowfile << fmt_sig(c.used_radius) << ',' << nz << ',' << np << ",,,"
                << fmt_sig(double(nz + np) / args.num("r")) << "\n";
        em.outputs.push_back(path);
        return 0;
    }

    if (args.subcommand == "zeros") {
        FunctionSpec f = parse_function_file(args.get("fn"));
        Target tgt = parse_target(args.get_or("a", "0"));
        CountOptions opt;
        opt.threads = threads;
        LocateResult loc = locate_values(f.oracle, args.num("r"), tgt, opt);
        em.primary(records_json(loc).dump(2) + "\n");
        return 0;
    }

    if (args.subcommand == "table") {
        FunctionSpec f = parse_function_file(args.get("fn"));
        Target tgt = parse_target(args.get_or("a", "0"));
        if (tgt.is_pole)
            throw precondition_error(
                "table: target must be finite (poles are always tabulated)");
        CountingTable t =
            counting_table(f.oracle, parse_grid(args.get("grid")), tgt.a, threads);
        em.primary(to_csv(t));
        return 0;
    }

    if (args.subcommand == "jensen") {
        FunctionSpec f = parse_function_file(args.get("fn"));
        double R = args.num("r");
        CountOptions opt;
        opt.threads = threads;
        double res = jensen_residual(f.oracle, R, args.num_or("tol", 1e-9), opt);
        json out = {{"R", R}, {"residual", res}};
        em.primary(out.dump(2) + "\n");
        return 0;
    }

    if (args.subcommand == "poisson") {
        FunctionSpec f = parse_function_file(args.get("fn"));
        double R = args.num("r");
        Complex s = parse_point(args.get("s"));
        CountOptions opt;
        opt.threads = threads;
        double res = poisson_jensen_residual(f.oracle, s, R, args.num_or("tol", 1e-9), opt);
        json out = {{"R", R}, {"s", complex_json(s)}, {"residual", res}};
        em.primary(out.dump(2) + "\n");
        return 0;
    }

    if (args.subcommand == "product") {
        std::vector<Complex> pts = parse_points_file(args.get("points"));
        MeromorphicOracle prod = weierstrass_oracle(pts);
        json out;
        out["n_zeros"] = pts.size();
        if (args.has("s")) {
            Complex s = parse_point(args.get("s"));
            EvalResult e = prod.eval(s);
            GrowthBound gb = growth_bound_check(pts, s);
            out["s"] = complex_json(s);
            out["value"] = complex_json(e.value);
            out["growth_lhs"] = gb.lhs;
            out["growth_rhs"] = gb.rhs;
            out["bound_holds"] = gb.at_zero || gb.lhs <= gb.rhs;
        }
        em.primary(out.dump(2) + "\n");
        return 0;
    }

    if (args.subcommand == "lambda") {
        FunctionSpec f = parse_function_file(args.get("fn"));
        double tau = args.num("tau");
        long d = args.integer("d");
        if (d < 0) throw precondition_error("flag --d: iterate count must be >= 0");
        MeromorphicOracle g = lambda_iterate(f.oracle, tau, int(d));
        Complex s = parse_point(args.get("s"));
        EvalResult e = g.eval(s);
        json out = {{"tau", tau}, {"d", d}, {"s", complex_json(s)},
                    {"value", complex_json(e.value)}, {"error_bound", e.err}};
        em.primary(out.dump(2) + "\n");
        return 0;
    }

    if (args.subcommand == "cartan") {
        std::vector<Complex> pts = parse_points_file(args.get("points"));
        DiskCover cover = cartan_cover(pts, args.num("h"));
        json disks = json::array();
        double sum_radii = 0;
        for (const auto& d : cover.disks) {
            disks.push_back(json::array({complex_json(d.center), d.radius}));
            sum_radii += d.radius;
        }
        json out = {{"disks", std::move(disks)}, {"h", cover.h},
                    {"n_points", cover.n_points}, {"sum_radii", sum_radii}};
        if (args.has("R1")) {
            Complex s0 = select_annulus_point({cover}, args.num("R1"));
            out["annulus_point"] = complex_json(s0);
        }
        em.primary(out.dump(2) + "\n");
        return 0;
    }

    if (args.subcommand == "translation") {
        FunctionSpec f = parse_function_file(args.get("fn"));
        if (!f.series)
            throw precondition_error(
                "translation: config must be an exponential sum (term list required)");
        double eps = args.num("eps");
        double window = args.num("window");
        double step = args.num_or("step", 1e-3);
        TranslationNumberSet set =
            translation_numbers(*f.series, eps, window, step, args.num_or("sigma0", 0.0),
                                args.num_or("range", 5000.0));
        json out = {{"epsilon", set.epsilon},
                    {"window", set.window},
                    {"found", set.found},
                    {"relatively_dense", set.relatively_dense},
                    {"max_gap", set.max_gap}};
        if (set.failing_window)
            out["failing_window"] =
                json::array({set.failing_window->first, set.failing_window->second});
        em.primary(out.dump(2) + "\n");
        return 0;
    }

    if (args.subcommand == "symdiff") {
        FunctionSpec F = parse_function_file(args.get("F"));
        FunctionSpec G = parse_function_file(args.get("G"));
        std::vector<double> grid =
            args.has("grid") ? parse_grid(args.get("grid"))
                             : std::vector<double>{args.num("T")};
        double match_tol = args.num_or("match-tol", 1e-6);
        double T_max = grid.back();
        CountOptions opt;
        opt.threads = threads;
        LocateResult zF = locate_values(F.oracle, T_max, Target::value({0, 0}), opt);
        LocateResult zG = locate_values(G.oracle, T_max, Target::value({0, 0}), opt);
        SymDiffReport rep = symmetric_difference(zF.records, zG.records, grid, match_tol);
        json out;
        out["T"] = rep.T_grid;
        out["D"] = rep.D_values;
        out["slope"] = grid.size() > 2 ? rep.slope_estimate
                                       : double(rep.D_values.back()) / T_max;
        if (grid.size() > 2) out["slope_stderr"] = rep.slope_stderr;
        if (grid.size() >= 8) {
            GrowthVerdict v = linear_growth_verdict(rep);
            out["verdict"] = v.linear ? "linear" : "sublinear";
            out["A_estimate"] = v.A_estimate;
        } else {
            out["verdict"] = "insufficient-grid";
        }
        out["matched"] = rep.matched_pairs.size();
        out["unmatched_F"] = rep.unmatched_F.size();
        out["unmatched_G"] = rep.unmatched_G.size();
        em.primary(out.dump(2) + "\n");
        return 0;
    }

    if (args.subcommand == "verify") {
        std::vector<double> grid = parse_grid(args.get_or("grid", "5:50:8log"));
        SuiteReport suite = run_suite(grid, threads);
        std::string base = args.get_or("out", "verify");
        for (const auto& e : suite.entries) {
            if (e.table.rows.empty()) continue;
            em.aux(base + "-" + slug(e.name) + ".csv", to_csv(e.table));
        }
        json summary = suite_json(suite);
        std::cout << summary.dump(2) << "\n";
        em.aux(base + "-summary.json", summary.dump(2) + "\n");
        return suite.all_passed ? 0 : 1;
    }

    if (args.subcommand == "catalog") {
        json out = json::array();
        for (const auto& e : catalog()) {
            json je;
            je["name"] = e.name;
            switch (e.role) {
            case CatalogEntry::Role::positive: je["role"] = "positive"; break;
            case CatalogEntry::Role::negative_control: je["role"] = "negative-control"; break;
            case CatalogEntry::Role::counterexample_pair: je["role"] = "counterexample-pair"; break;
            case CatalogEntry::Role::showcase: je["role"] = "showcase"; break;
            case CatalogEntry::Role::metadata_only: je["role"] = "metadata-only"; break;
            }
            je["evaluable"] = bool(e.make);
            je["declared_order"] = std::isinf(e.declared_order)
                                       ? json("inf")
                                       : json(e.declared_order);
            je["nonzero_limit"] = e.flag_nonzero_limit;
            je["finite_order"] = e.flag_finite_order;
            je["nontrivial"] = e.flag_nontrivial;
            out.push_back(std::move(je));
        }
        em.primary(out.dump(2) + "\n");
        return 0;
    }

    throw precondition_error("unknown subcommand '" + args.subcommand + "'");
}

} // namespace

int main(int argc, char** argv) {
    if (argc >= 2 && (std::string(argv[1]) == "--help" || std::string(argv[1]) == "-h" ||
                      std::string(argv[1]) == "help")) {
        std::cout << kUsage;
        return 0;
    }
    Args args;
    try {
        args = parse_args(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n\n" << kUsage;
        return 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    Emitter em{args, {}};
    int threads = int(args.num_or("threads", double(dseries::default_threads())));
    if (threads < 1) {
        std::cerr << "error: flag --threads: must be >= 1\n";
        return 2;
    }
    unsigned long long seed = 0;
    if (args.has("seed")) seed = std::stoull(args.get("seed"));

    json manifest = dseries::make_manifest(args.subcommand, config_echo(args), seed, threads);
    int code;
    try {
        code = dispatch(args, em, threads);
    } catch (const dseries::precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    auto t1 = std::chrono::steady_clock::now();
    double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    try {
        dseries::write_manifest(std::move(manifest), wall_ms, em.outputs, em.manifest_path());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return code;
}
