// sigre: experiment runner for signature-based path reconstruction.
// Subcommands compute signatures, routes, certified widths, reconstructions,
// degree selection and p-variation on paths from JSON files or named
// generators, and the demo subcommand reproduces the two counterexamples
// end to end.  All outputs are machine readable (JSON or CSV), deterministic
// for a fixed seed, and written atomically when --out is given.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sigre/degree_select.hpp"
#include "sigre/generators.hpp"
#include "sigre/geometry.hpp"
#include "sigre/one_forms.hpp"
#include "sigre/path_model.hpp"
#include "sigre/reconstruct.hpp"
#include "sigre/signature_core.hpp"
#include "sigre/stability.hpp"
#include "sigre/words.hpp"

using nlohmann::json;
using namespace sigre;

namespace {

// 16 significant digits everywhere a number lands in CSV
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15e", v);
    return buf;
}

struct Ctx {
    std::uint64_t seed = 20260819ull;
    std::string out_dir;
    int jobs = 1;
};

void write_atomic(const std::string& dir, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    std::filesystem::path final_path = std::filesystem::path(dir) / name;
    std::filesystem::path tmp_path = final_path;
    tmp_path += ".tmp";
    {
        std::ofstream f(tmp_path, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp_path.string());
        f << content;
    }
    std::filesystem::rename(tmp_path, final_path);
}

void emit(const Ctx& ctx, const std::string& artifact_name, const std::string& content) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    if (!ctx.out_dir.empty()) write_atomic(ctx.out_dir, artifact_name, content);
}

// first exception wins, rest of the jobs still drain
template <class F>
void parallel_for(int n, int jobs, F f) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> ws;
    for (int w = 0; w < jobs; ++w)
        ws.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (std::thread& t : ws) t.join();
    if (err) std::rethrow_exception(err);
}

PiecewiseLinearPath resolve_path(const std::string& file, const std::string& gen,
                                 std::uint64_t seed) {
    if (!file.empty()) return load_path(file);
    if (!gen.empty()) return named_path(gen, seed);
    throw std::invalid_argument("no path given: use --path FILE or --gen NAME");
}

json route_json(const RouteWord& rw) {
    json arr = json::array();
    for (const RouteEntry& e : rw.entries) {
        const Domain& d = rw.domains[e.domain];
        arr.push_back({{"label", d.z.str()},
                       {"scheme_level", d.scheme_level},
                       {"entry_time", e.entry_time}});
    }
    return arr;
}

json polygonal_json(const PiecewiseLinearPath& p) {
    json arr = json::array();
    for (std::size_t i = 0; i < p.times().size(); ++i) {
        json rec = json::array();
        rec.push_back(p.times()[i]);
        for (double c : p.points()[i]) rec.push_back(c);
        arr.push_back(rec);
    }
    return arr;
}

json selection_json(const DeltaSelection& sel) {
    json word = json::array();
    for (const LatticePoint& z : sel.word) word.push_back(z.str());
    return {{"level", sel.level},     {"delta", sel.delta},
            {"sup", sel.sup},         {"stable_quantity", sel.sq},
            {"thresholds", sel.thresholds}, {"word", word}};
}

AmbientTrajectory make_trajectory(const PiecewiseLinearPath& x, int degree) {
    return degree > 0 ? AmbientTrajectory::from_lifted(x, degree)
                      : AmbientTrajectory::from_pl(x);
}

int run_signature(const Ctx& ctx, const PiecewiseLinearPath& x, int degree) {
    TruncatedTensor g = path_signature(x, degree);
    json coeffs = json::array();
    for (int n = 1; n <= degree; ++n)
        for (std::int64_t i = 0; i < level_size(x.dim(), n); ++i) {
            Word w = word_at(x.dim(), n, i);
            coeffs.push_back({{"word", word_str(w)}, {"value", g.coeff(w)}});
        }
    json out = {{"dim", x.dim()}, {"degree", degree}, {"coefficients", coeffs}};
    emit(ctx, "signature.json", out.dump(2));
    return 0;
}

int run_route(const Ctx& ctx, const PiecewiseLinearPath& x, int degree, double eps, bool verify,
              double tol, int rounds) {
    AmbientTrajectory y = make_trajectory(x, degree);
    SchemeStack st = build_scheme_stack(y, eps);
    RouteWord rw = extract_route(y, st.schemes, true);
    json out = {{"eps", eps},
                {"ambient_dim", st.ambient_dim},
                {"deltas", st.deltas},
                {"route", route_json(rw)}};
    int rc = 0;
    if (verify) {
        RouteVerdict v = verify_route(y, st.schemes, rw.labels(), tol, rounds);
        out["verdict"] = {{"chi", v.chi},
                          {"magnitude", v.magnitude},
                          {"witness_kind", v.witness_kind}};
        if (v.chi != 1) rc = 1;
    }
    emit(ctx, "route.json", out.dump(2));
    return rc;
}

int run_stable_delta(const Ctx& ctx, const PiecewiseLinearPath& x, int degree, double eps) {
    AmbientTrajectory y = make_trajectory(x, degree);
    SchemeStack st = build_scheme_stack(y, eps);
    json sels = json::array();
    for (const DeltaSelection& s : st.selections) sels.push_back(selection_json(s));
    json out = {{"eps", eps},
                {"ambient_dim", st.ambient_dim},
                {"deltas", st.deltas},
                {"selections", sels}};
    emit(ctx, "stable_delta.json", out.dump(2));
    return 0;
}

int run_reconstruct(const Ctx& ctx, const PiecewiseLinearPath& x, int degree,
                    const std::vector<double>& eps_list) {
    if (eps_list.empty()) throw std::invalid_argument("reconstruct: --eps-list is empty");
    AmbientTrajectory y = make_trajectory(x, degree);
    std::vector<ReconstructionResult> results(eps_list.size());
    parallel_for(static_cast<int>(eps_list.size()), ctx.jobs,
                 [&](int i) { results[i] = reconstruct_polygonal(y, eps_list[i]); });

    const int D = results[0].stack.ambient_dim;
    std::string csv = "eps,D";
    for (int k = 1; k <= D; ++k) csv += ",delta_" + std::to_string(k);
    csv += ",L,sup_error,bound,d_metric\n";
    bool all_ok = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const ReconstructionResult& r = results[i];
        csv += fmt(eps_list[i]) + "," + std::to_string(r.stack.ambient_dim);
        for (double d : r.stack.deltas) csv += "," + fmt(d);
        csv += "," + std::to_string(r.route.entries.size());
        csv += "," + fmt(r.sup_error) + "," + fmt(r.bound) + "," + fmt(r.d_metric) + "\n";
        all_ok = all_ok && r.sup_error <= r.bound;
        if (!ctx.out_dir.empty()) {
            json dump = {{"eps", eps_list[i]},
                         {"deltas", r.stack.deltas},
                         {"route", route_json(r.route)},
                         {"polygonal", polygonal_json(r.polygonal)},
                         {"sup_error", r.sup_error},
                         {"bound", r.bound},
                         {"d_metric", r.d_metric}};
            write_atomic(ctx.out_dir, "reconstruct_" + std::to_string(i) + ".json",
                         dump.dump(2));
        }
    }
    emit(ctx, "reconstruct.csv", csv);
    return all_ok ? 0 : 1;
}

int run_degree_select(const Ctx& ctx, const PiecewiseLinearPath& x,
                      std::vector<double> delta_grid, int n_max, int floor_deg) {
    DegreeSelection sel = projection_stabilized_degree(x, std::move(delta_grid), n_max, floor_deg);
    json rows = json::array();
    for (const DegreeEvidence& ev : sel.evidence)
        rows.push_back({{"delta", ev.delta},
                        {"selected", ev.selected},
                        {"tested", ev.tested},
                        {"top_nonzero", ev.top_nonzero}});
    json out = {{"n_g", sel.n_g},
                {"degree_floor", sel.degree_floor},
                {"n_max", sel.n_max},
                {"per_delta", rows},
                {"tail_check",
                 {{"degree", sel.tail_degree}, {"worst", sel.tail_worst}, {"ok", sel.tail_ok}}}};
    emit(ctx, "degree_select.json", out.dump(2));
    return sel.tail_ok ? 0 : 1;
}

int run_pvar(const Ctx& ctx, const PiecewiseLinearPath& x, double p, int samples) {
    PVarResult r = p_variation(x, p, samples);
    json out = {{"p", p},
                {"samples", samples},
                {"value", r.value},
                {"witness_times", r.witness_times}};
    emit(ctx, "pvar.json", out.dump(2));
    return 0;
}

// the arc and the arc-with-spike share their signature; both p-variations sit
// at the endpoint chord for small angle and spike
int demo_example_2_1(const Ctx& ctx, double central, int chords, double spike, double p,
                     int samples, double tol) {
    PiecewiseLinearPath with_spike = circle_arc_path(central, chords, spike);
    PiecewiseLinearPath plain = circle_arc_path(central, chords, 0.0);
    double chord = 2.0 * std::sin(central / 2.0);
    PVarResult a = p_variation(with_spike, p, samples);
    PVarResult b = p_variation(plain, p, samples);
    bool ok = std::abs(a.value - chord) <= tol && std::abs(b.value - chord) <= tol;
    json out = {{"demo", "example-2-1"},
                {"central_angle", central},
                {"chords", chords},
                {"spike", spike},
                {"p", p},
                {"samples", samples},
                {"chord", chord},
                {"pvar_with_spike", a.value},
                {"pvar_arc", b.value},
                {"tolerance", tol},
                {"pass", ok}};
    emit(ctx, "demo_example_2_1.json", out.dump(2));
    return ok ? 0 : 1;
}

// at scales 2/(2n+1) the corner sits midway between cube columns: top-level
// cubes alone collapse to the x-axis while the full stack converges
int demo_example_3_1(const Ctx& ctx, int n) {
    if (n < 1) throw std::invalid_argument("demo example-3-1: --n must be >= 1");
    double eps = 2.0 / (2.0 * n + 1.0);
    AmbientTrajectory y = AmbientTrajectory::from_pl(l_path());
    ReconstructionResult naive = naive_reconstruct(y, eps, 0.25 * eps);
    ReconstructionResult full = reconstruct_polygonal(y, eps);
    bool collapsed = naive.sup_error >= 0.5;
    bool converged = full.sup_error <= full.bound && full.sup_error < 0.5;
    json out = {{"demo", "example-3-1"},
                {"n", n},
                {"eps", eps},
                {"naive",
                 {{"delta", 0.25 * eps},
                  {"route", route_json(naive.route)},
                  {"polygonal", polygonal_json(naive.polygonal)},
                  {"sup_error", naive.sup_error},
                  {"collapsed", collapsed}}},
                {"full",
                 {{"deltas", full.stack.deltas},
                  {"route_length", full.route.entries.size()},
                  {"sup_error", full.sup_error},
                  {"bound", full.bound},
                  {"d_metric", full.d_metric}}},
                {"pass", collapsed && converged}};
    emit(ctx, "demo_example_3_1.json", out.dump(2));
    return (collapsed && converged) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "sigre: reconstruct a tree-reduced path from its signature.\n"
        "Paths come from --path FILE (JSON rows [t, x1..xm]) or --gen NAME\n"
        "(l-path, spiral, figure-eight, example-2-1[-arc], example-3-1,\n"
        "tunnel-runner, random:<dim>:<segments>).  --config FILE supplies\n"
        "defaults for any flag (JSON, keys named like the long flags);\n"
        "explicit flags win.  Seed order: --seed, config, SIGRE_SEED env."};
    app.require_subcommand(0, 1);

    // config defaults are read in a pre-pass so flag values can override them
    json cfg = json::object();
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") {
            std::ifstream f(argv[i + 1]);
            if (!f) {
                std::cout << json{{"error", std::string("cannot read config ") + argv[i + 1]}}
                                 .dump()
                          << "\n";
                return 1;
            }
            try {
                f >> cfg;
            } catch (const std::exception& e) {
                std::cout << json{{"error", std::string("malformed config: ") + e.what()}}.dump()
                          << "\n";
                return 1;
            }
        }
    auto cfg_num = [&cfg](const std::string& key, double dflt) {
        return cfg.contains(key) ? cfg[key].get<double>() : dflt;
    };
    auto cfg_str = [&cfg](const std::string& key, std::string dflt) {
        return cfg.contains(key) ? cfg[key].get<std::string>() : std::move(dflt);
    };

    Ctx ctx;
    if (const char* env = std::getenv("SIGRE_SEED")) ctx.seed = std::strtoull(env, nullptr, 10);
    ctx.seed = static_cast<std::uint64_t>(cfg_num("seed", static_cast<double>(ctx.seed)));
    ctx.out_dir = cfg_str("out", "");
    ctx.jobs = static_cast<int>(cfg_num("jobs", 1));

    std::string cfg_file, path_file = cfg_str("path", ""), gen = cfg_str("gen", "");
    app.add_option("--config", cfg_file, "JSON config file with flag defaults");
    app.add_option("--seed", ctx.seed, "seed for all randomness");
    app.add_option("--out", ctx.out_dir, "directory for output artifacts (atomic writes)");
    app.add_option("--jobs", ctx.jobs, "parallel jobs for batch subcommands")
        ->check(CLI::PositiveNumber);

    int degree = static_cast<int>(cfg_num("degree", 4));
    int lift_degree = static_cast<int>(cfg_num("lift-degree", 0));
    double eps = cfg_num("eps", 0.25);
    std::vector<double> eps_list, delta_grid;
    if (cfg.contains("eps-list")) eps_list = cfg["eps-list"].get<std::vector<double>>();
    if (cfg.contains("delta-grid")) delta_grid = cfg["delta-grid"].get<std::vector<double>>();
    int n_max = static_cast<int>(cfg_num("n-max", 6));
    int floor_deg = static_cast<int>(cfg_num("floor", 1));
    double p = cfg_num("p", 1.5);
    int samples = static_cast<int>(cfg_num("samples", 2000));
    double tol = cfg_num("tol", 1e-6);
    int rounds = static_cast<int>(cfg_num("rounds", 2));
    bool verify = false;

    CLI::App* sig = app.add_subcommand("signature", "truncated signature coefficient table (JSON)");
    sig->add_option("--path", path_file, "path JSON file");
    sig->add_option("--gen", gen, "named generator");
    sig->add_option("--degree", degree, "truncation degree")->check(CLI::PositiveNumber);

    CLI::App* rt = app.add_subcommand(
        "route", "scheme-stack route word of the path trajectory (JSON)");
    rt->add_option("--path", path_file, "path JSON file");
    rt->add_option("--gen", gen, "named generator");
    rt->add_option("--eps", eps, "stack scale")->check(CLI::PositiveNumber);
    rt->add_option("--lift-degree", lift_degree, "run on the signature lift of this degree");
    rt->add_flag("--verify", verify, "certify the word by one-form integrals (chi must be 1)");
    rt->add_option("--tol", tol, "verification magnitude threshold");
    rt->add_option("--rounds", rounds, "generic bump rounds per letter");

    CLI::App* sd = app.add_subcommand(
        "stable-delta", "certified stable widths per stack level (JSON)");
    sd->add_option("--path", path_file, "path JSON file");
    sd->add_option("--gen", gen, "named generator");
    sd->add_option("--eps", eps, "stack scale")->check(CLI::PositiveNumber);
    sd->add_option("--lift-degree", lift_degree, "run on the signature lift of this degree");

    CLI::App* rec = app.add_subcommand(
        "reconstruct",
        "polygonal reconstruction across scales.  CSV columns: eps; D (ambient\n"
        "dimension); delta_1..delta_D (certified tunnel widths, top level first);\n"
        "L (route word length); sup_error (max |trajectory - polygonal|); bound\n"
        "(68 D^1.5 eps); d_metric (monotone matching distance).  With --out also\n"
        "writes reconstruct_<i>.json holding route and polygonal vertices.");
    rec->add_option("--path", path_file, "path JSON file");
    rec->add_option("--gen", gen, "named generator");
    rec->add_option("--eps-list", eps_list, "scales to run")->delimiter(',');
    rec->add_option("--lift-degree", lift_degree, "run on the signature lift of this degree");

    CLI::App* ds = app.add_subcommand(
        "degree-select", "projection-stabilized truncation degree N(g) (JSON)");
    ds->add_option("--path", path_file, "path JSON file");
    ds->add_option("--gen", gen, "named generator");
    ds->add_option("--delta-grid", delta_grid, "wall widths to test (default 1/8..1/64)")
        ->delimiter(',');
    ds->add_option("--n-max", n_max, "largest degree probed");
    ds->add_option("--floor", floor_deg, "variation floor (least admissible degree)");

    CLI::App* pv = app.add_subcommand("pvar", "p-variation with witness partition (JSON)");
    pv->add_option("--path", path_file, "path JSON file");
    pv->add_option("--gen", gen, "named generator");
    pv->add_option("--p", p, "variation exponent >= 1");
    pv->add_option("--samples", samples, "DP grid size")->check(CLI::PositiveNumber);

    CLI::App* dm = app.add_subcommand(
        "demo", "reproduce the counterexamples end to end (both when no name given)");
    std::string which;
    dm->add_option("name", which, "example-2-1 | example-3-1");
    int demo_n = static_cast<int>(cfg_num("n", 3));
    double central = cfg_num("central", 0.2), spike = cfg_num("spike", 1e-3);
    int chords = static_cast<int>(cfg_num("chords", 512));
    dm->add_option("--n", demo_n, "scale index: eps = 2/(2n+1)");
    dm->add_option("--central", central, "arc central angle");
    dm->add_option("--spike", spike, "retraced radial spike length");
    dm->add_option("--chords", chords, "arc chord count");
    dm->add_option("--p", p, "variation exponent");
    dm->add_option("--samples", samples, "DP grid size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (sig->parsed())
            return run_signature(ctx, resolve_path(path_file, gen, ctx.seed), degree);
        if (rt->parsed())
            return run_route(ctx, resolve_path(path_file, gen, ctx.seed), lift_degree, eps,
                             verify, tol, rounds);
        if (sd->parsed())
            return run_stable_delta(ctx, resolve_path(path_file, gen, ctx.seed), lift_degree, eps);
        if (rec->parsed())
            return run_reconstruct(ctx, resolve_path(path_file, gen, ctx.seed), lift_degree,
                                   eps_list);
        if (ds->parsed())
            return run_degree_select(ctx, resolve_path(path_file, gen, ctx.seed), delta_grid,
                                     n_max, floor_deg);
        if (pv->parsed()) return run_pvar(ctx, resolve_path(path_file, gen, ctx.seed), p, samples);
        if (dm->parsed()) {
            if (which == "example-2-1")
                return demo_example_2_1(ctx, central, chords, spike, p, samples, 1e-3);
            if (which == "example-3-1") return demo_example_3_1(ctx, demo_n);
            if (which.empty()) {
                int a = demo_example_2_1(ctx, central, chords, spike, p, samples, 1e-3);
                int b = demo_example_3_1(ctx, demo_n);
                return (a == 0 && b == 0) ? 0 : 1;
            }
            throw std::invalid_argument("unknown demo: " + which);
        }
        std::cout << app.help();
        return 0;
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
}
