// Command-line surface: identity verification reports, curve/trace
// enumeration, Bowditch checking, fan-summation property checks, and a
// parallel raster scanner over complex parameter slices.
//
// Exit codes: 0 success, 1 internal/io error, 2 parse/usage error,
// 3 refused precondition (Bowditch or invariance), 4 budget exhausted.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "markoff/json_io.hpp"
#include "markoff/markoff.hpp"
#include "markoff/prop41.hpp"

namespace {

using namespace markoff;

enum class LogLevel { off = 0, error = 1, info = 2, debug = 3 };

LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("MARKOFF_LOG");
        if (!env) return LogLevel::off;
        std::string v(env);
        if (v == "debug") return LogLevel::debug;
        if (v == "info") return LogLevel::info;
        if (v == "error") return LogLevel::error;
        return LogLevel::off;
    }();
    return level;
}

void log_line(LogLevel lv, const std::string& msg) {
    if (log_level() >= lv) std::cerr << "[markoff] " << msg << "\n";
}

class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

struct CommonInputs {
    std::string seed;
    std::string matrices;
    std::string mu;
    bool use_z_branch = false;
    int bq_depth = 64;
    long max_vertices = 200000;
    bool relaxed = false;
    double escape_threshold = 2.0 + 1e-9;
    double interval_tolerance = 1e-12;
    std::string out;
};

BQConfig bq_config(const CommonInputs& in) {
    return {in.bq_depth, in.escape_threshold, in.relaxed, in.interval_tolerance, in.max_vertices};
}

cplx parse_one_complex(const std::string& text, const char* what) {
    try {
        return parse_complex(text);
    } catch (const std::exception& e) {
        throw usage_error(std::string("cannot parse ") + what + " '" + text + "': " + e.what());
    }
}

std::vector<cplx> parse_list(const std::string& text, const char* what) {
    try {
        return parse_complex_list(text);
    } catch (const std::exception& e) {
        throw usage_error(std::string("cannot parse ") + what + " '" + text + "': " + e.what());
    }
}

MarkoffMap build_map(const CommonInputs& in) {
    if (!in.matrices.empty() && !in.seed.empty())
        throw usage_error("give either --seed or --matrices, not both");
    if (!in.matrices.empty()) {
        auto semi = in.matrices.find(';');
        if (semi == std::string::npos)
            throw usage_error("--matrices wants 'a,b,c,d;e,f,g,h' (row-major A then B)");
        auto ea = parse_list(in.matrices.substr(0, semi), "--matrices A");
        auto eb = parse_list(in.matrices.substr(semi + 1), "--matrices B");
        if (ea.size() != 4 || eb.size() != 4)
            throw usage_error("--matrices needs four entries per matrix");
        MatrixPair pair{{ea[0], ea[1], ea[2], ea[3]}, {eb[0], eb[1], eb[2], eb[3]}};
        try {
            return from_matrices(pair);
        } catch (const std::invalid_argument& e) {
            throw usage_error(e.what());
        }
    }
    if (in.seed.empty()) throw usage_error("a seed is required (--seed or --matrices)");
    auto values = parse_list(in.seed, "--seed");
    if (in.use_z_branch) {
        if (values.size() != 2) throw usage_error("--z-branch wants --seed x,y (two traces)");
        if (in.mu.empty()) throw usage_error("--z-branch needs --mu");
        cplx mu = parse_one_complex(in.mu, "--mu");
        return MarkoffMap::from_seed(values[0], values[1], z_branch(values[0], values[1], mu));
    }
    if (values.size() != 3) throw usage_error("--seed wants three comma-separated traces");
    return MarkoffMap::from_seed(values[0], values[1], values[2]);
}

json seed_json(const MarkoffMap& m) {
    MarkoffTriple t = m.seed();
    return json::array({complex_to_json(t.x), complex_to_json(t.y), complex_to_json(t.z)});
}

void emit(const json& doc, const std::string& out_path) {
    std::string text = doc.dump(2);
    std::cout << text << "\n";
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + out_path + " for writing");
        f << text << "\n";
    }
}

// Edge selector "root:K" or "root:K:rev": the inward edge whose head is the
// K-th root region in canonical order; ":rev" flips it outward.
DirectedEdge parse_edge(const std::string& sel, const TreeVertex& root) {
    std::string s = sel.empty() ? "root:0" : sel;
    bool rev = false;
    std::string body = s;
    if (body.size() > 4 && body.substr(body.size() - 4) == ":rev") {
        rev = true;
        body = body.substr(0, body.size() - 4);
    }
    if (body.rfind("root:", 0) != 0) throw usage_error("--edge wants root:K or root:K:rev");
    int k = -1;
    try {
        k = std::stoi(body.substr(5));
    } catch (const std::exception&) {
        throw usage_error("--edge index is not a number");
    }
    if (k < 0 || k > 2) throw usage_error("--edge index must be 0, 1 or 2");
    const Slope& head = root.regions[k];
    const Slope& f1 = root.regions[(k + 1) % 3];
    const Slope& f2 = root.regions[(k + 2) % 3];
    DirectedEdge e = make_edge(f1, f2, fourth_region(f1, f2, head), head);
    return rev ? reverse(e) : e;
}

struct VerifyArgs {
    CommonInputs common;
    std::string which;
    std::string weights;
    std::string edge;
    std::string theta;
    int depth = 30;
    double tol = 1e-8;
    bool force = false;
};

IntegerMatrix2 parse_theta(const std::string& text) {
    if (text.empty()) throw usage_error("--theta a,b,c,d is required here");
    std::vector<std::int64_t> v;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        std::string piece =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        try {
            std::size_t used = 0;
            v.push_back(std::stoll(piece, &used));
            if (used != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            throw usage_error("cannot parse --theta entry '" + piece + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (v.size() != 4) throw usage_error("--theta wants four integers a,b,c,d");
    return {v[0], v[1], v[2], v[3]};
}

int cmd_verify(const VerifyArgs& args) {
    BQConfig cfg = bq_config(args.common);
    json report;
    report["identity"] = args.which;

    if (args.which == "relative") {
        IntegerMatrix2 theta = parse_theta(args.theta);
        try {
            require_anosov(theta);
        } catch (const std::invalid_argument& e) {
            throw usage_error(e.what());
        }
        std::optional<MarkoffMap> map;
        if (!args.common.seed.empty() || !args.common.matrices.empty()) {
            map.emplace(build_map(args.common));
        } else {
            cplx mu = args.common.mu.empty() ? cplx(0.0)
                                             : parse_one_complex(args.common.mu, "--mu");
            log_line(LogLevel::info, "solving for a theta-fixed character");
            auto triples = anosov_fixed_seed(theta, mu);
            for (const MarkoffTriple& t : triples) {
                MarkoffMap candidate = MarkoffMap::from_triple(t);
                if (check_relative_bq(candidate, theta, cfg).status == BQStatus::satisfied) {
                    map.emplace(std::move(candidate));
                    break;
                }
            }
            if (!map) {
                report["error"] = "no theta-fixed character satisfying the relative "
                                  "Bowditch conditions was found";
                emit(report, args.common.out);
                return 3;
            }
        }
        report["seed"] = seed_json(*map);
        report["mu"] = complex_to_json(map->mu());
        BQReport rel = check_relative_bq(*map, theta, cfg);
        report["bq_report"] = to_json(rel);
        RelativeOptions opts;
        opts.force = args.force;
        opts.bq = cfg;
        SeriesResult s;
        try {
            s = sum_relative(*map, theta, args.tol, args.depth, opts);
        } catch (const precondition_error& e) {
            report["error"] = e.what();
            emit(report, args.common.out);
            return 3;
        }
        report["series_result"] = to_json(s);
        report["expected"] = complex_to_json(cplx(0.0));
        report["abs_error"] = std::abs(s.value);
        emit(report, args.common.out);
        return s.converged ? 0 : 4;
    }

    MarkoffMap map = build_map(args.common);
    report["seed"] = seed_json(map);
    report["mu"] = complex_to_json(map.mu());
    BQReport bq = check_bq(map, cfg);
    report["bq_report"] = to_json(bq);
    if (bq.status != BQStatus::satisfied && !args.force) {
        report["error"] = std::string("Bowditch conditions not established: ") +
                          to_string(bq.status);
        emit(report, args.common.out);
        return bq.status == BQStatus::violated ? 3 : 4;
    }

    SumOptions opts;
    opts.force = args.force;
    opts.bq = cfg;
    opts.precomputed_bq = &bq;

    SeriesResult s;
    cplx expected;
    if (args.which == "main") {
        s = sum_main(map, args.tol, args.depth, opts);
        expected = 0.5;
    } else if (args.which == "tricolor") {
        Weights w{};
        if (!args.weights.empty()) {
            auto p = parse_list(args.weights, "--weights");
            if (p.size() != 3) throw usage_error("--weights wants p1,p2,p3");
            try {
                w = make_weights(p[0], p[1], p[2]);
            } catch (const std::invalid_argument& e) {
                throw usage_error(e.what());
            }
        }
        s = sum_tricolor(map, w, args.tol, args.depth, opts);
        expected = 0.5;
    } else if (args.which == "branch") {
        DirectedEdge e = parse_edge(args.edge, map.root());
        report["edge"] = json::array({to_string(e.flank[0]), to_string(e.flank[1]),
                                      to_string(e.tail_region), to_string(e.head_region)});
        s = sum_branch(map, e, args.tol, args.depth, opts);
        expected = psi_edge_value(e, map);
    } else {
        throw usage_error("verify wants one of: main, tricolor, branch, relative");
    }

    report["series_result"] = to_json(s);
    report["expected"] = complex_to_json(expected);
    report["abs_error"] = std::abs(s.value - expected);
    emit(report, args.common.out);
    return s.converged ? 0 : 4;
}

int cmd_check_bq(const CommonInputs& in) {
    MarkoffMap map = build_map(in);
    BQReport bq = check_bq(map, bq_config(in));
    json report = to_json(bq);
    report["seed"] = seed_json(map);
    report["mu"] = complex_to_json(map.mu());
    emit(report, in.out);
    return bq.status == BQStatus::inconclusive ? 4 : 0;
}

struct EnumerateArgs {
    CommonInputs common;
    int depth = 3;
    std::string format = "json";
};

int cmd_enumerate(const EnumerateArgs& args) {
    if (args.depth < 0 || args.depth > 20)
        throw usage_error("--depth must lie in [0, 20] for enumerate");
    MarkoffMap map = build_map(args.common);
    auto regions = regions_within(args.depth, map.root());

    struct Row {
        Slope slope;
        int cls;
        std::optional<cplx> trace;
        std::optional<double> h_abs;
    };
    std::vector<Row> rows;
    rows.reserve(regions.size());
    for (const Slope& x : regions) {
        Row row{x, parity_index(x), map.try_trace(x), std::nullopt};
        if (row.trace && h_domain_check(*row.trace, map.mu()) == HDomain::ok)
            row.h_abs = std::abs(detail::h_weighted_value(*row.trace, map.mu(), cplx(1.0 / 3.0)));
        rows.push_back(row);
    }

    if (args.format == "json") {
        json out;
        out["depth"] = args.depth;
        out["count"] = rows.size();
        json arr = json::array();
        for (const Row& r : rows) {
            json jr;
            jr["slope"] = to_string(r.slope);
            jr["class"] = r.cls;
            jr["trace"] = r.trace ? complex_to_json(*r.trace) : json();
            jr["h_abs"] = r.h_abs ? json(*r.h_abs) : json();
            arr.push_back(jr);
        }
        out["rows"] = arr;
        emit(out, args.common.out);
    } else if (args.format == "csv" || args.format == "table") {
        bool csv = args.format == "csv";
        std::string text = csv ? "slope,class,trace_re,trace_im,h_abs\n" : "";
        for (const Row& r : rows) {
            if (csv) {
                text += to_string(r.slope) + "," + std::to_string(r.cls);
                text += r.trace ? "," + format_double(r.trace->real()) + "," +
                                      format_double(r.trace->imag())
                                : ",,";
                text += r.h_abs ? "," + format_double(*r.h_abs) : ",";
                text += "\n";
            } else {
                text += to_string(r.slope) + "\tclass " + std::to_string(r.cls) + "\t";
                text += r.trace ? format_complex(*r.trace) : std::string("escaped");
                if (r.h_abs) text += "\t|h|=" + format_double(*r.h_abs);
                text += "\n";
            }
        }
        std::cout << text;
        if (!args.common.out.empty()) {
            std::ofstream f(args.common.out, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open " + args.common.out);
            f << text;
        }
    } else {
        throw usage_error("enumerate --format wants json, csv or table");
    }
    return 0;
}

struct ScanArgs {
    CommonInputs common;
    std::string mode = "vary_z";
    std::string fixed;
    std::string center = "3+0i";
    double width = 4.0;
    double height = 4.0;
    std::string res = "128x128";
    int workers = 1;
    bool compute_sum = false;
    std::string format = "both";
};

int cmd_scan(const ScanArgs& args) {
    ScanConfig cfg;
    if (args.mode == "vary_z") cfg.mode = ScanMode::vary_z;
    else if (args.mode == "vary_mu") cfg.mode = ScanMode::vary_mu;
    else if (args.mode == "vary_xy_diagonal") cfg.mode = ScanMode::vary_xy_diagonal;
    else throw usage_error("--mode wants vary_z, vary_mu or vary_xy_diagonal");

    if (!args.fixed.empty()) {
        auto fixed = parse_list(args.fixed, "--fixed");
        if (cfg.mode == ScanMode::vary_xy_diagonal) {
            if (fixed.size() != 1) throw usage_error("--fixed wants one value (z) in this mode");
            cfg.fixed_z = fixed[0];
        } else {
            if (fixed.size() != 2) throw usage_error("--fixed wants two values (x,y) in this mode");
            cfg.fixed_x = fixed[0];
            cfg.fixed_y = fixed[1];
        }
    }
    cfg.center = parse_one_complex(args.center, "--center");
    cfg.width = args.width;
    cfg.height = args.height;
    auto xpos = args.res.find('x');
    if (xpos == std::string::npos) throw usage_error("--res wants WxH, e.g. 128x128");
    try {
        cfg.res_w = std::stoi(args.res.substr(0, xpos));
        cfg.res_h = std::stoi(args.res.substr(xpos + 1));
    } catch (const std::exception&) {
        throw usage_error("--res wants WxH, e.g. 128x128");
    }
    if (cfg.res_w <= 0 || cfg.res_h <= 0 || !(cfg.width > 0) || !(cfg.height > 0))
        throw usage_error("scan window/resolution must be positive");
    cfg.bq = bq_config(args.common);
    cfg.compute_sum = args.compute_sum;
    if (args.common.out.empty()) throw usage_error("scan needs --out BASE for its output files");

    log_line(LogLevel::info, "scanning " + std::to_string(cfg.res_w) + "x" +
                                 std::to_string(cfg.res_h) + " with " +
                                 std::to_string(args.workers) + " worker(s)");
    ScanResult res = run_scan(cfg, args.workers);

    long satisfied = 0, violated = 0, inconclusive = 0;
    for (const PixelRecord& r : res.records) {
        if (r.status == BQStatus::satisfied) ++satisfied;
        else if (r.status == BQStatus::violated) ++violated;
        else ++inconclusive;
    }

    json summary;
    summary["mode"] = args.mode;
    summary["width"] = cfg.res_w;
    summary["height"] = cfg.res_h;
    summary["satisfied"] = satisfied;
    summary["violated"] = violated;
    summary["inconclusive"] = inconclusive;
    if (args.format == "pgm" || args.format == "both") {
        std::string path = args.common.out + ".pgm";
        write_pgm(res, path);
        summary["out_pgm"] = path;
    }
    if (args.format == "csv" || args.format == "both") {
        std::string path = args.common.out + ".csv";
        write_csv(cfg, res, path);
        summary["out_csv"] = path;
    }
    if (args.format != "pgm" && args.format != "csv" && args.format != "both")
        throw usage_error("scan --format wants pgm, csv or both");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

struct Prop41Args {
    int trials = 1000;
    std::uint64_t rng_seed = 12345;
    std::string out;
};

int cmd_prop41(const Prop41Args& args) {
    if (args.trials < 1) throw usage_error("--trials must be at least 1");
    Prop41Report rep = run_prop41(args.trials, args.rng_seed);
    json doc;
    doc["trials"] = rep.trials;
    doc["rng_seed"] = rep.rng_seed;
    doc["rejected_draws"] = rep.rejected_draws;
    doc["max_dev_one_sided"] = rep.max_dev_one_sided;
    doc["max_dev_two_sided"] = rep.max_dev_two_sided;
    doc["max_dev_reflection"] = rep.max_dev_reflection;
    doc["hand_dev_one_sided"] = rep.hand_dev_one_sided;
    doc["hand_dev_two_sided"] = rep.hand_dev_two_sided;
    doc["pass"] = rep.pass;
    json rows = json::array();
    for (const Prop41Row& r : rep.rows) {
        rows.push_back(json{{"lambda", complex_to_json(r.pair.lambda)},
                            {"A", complex_to_json(r.pair.A)},
                            {"B", complex_to_json(r.pair.B)},
                            {"dev_one_sided", r.dev_one_sided},
                            {"dev_two_sided", r.dev_two_sided},
                            {"dev_reflection", r.dev_reflection}});
    }
    doc["rows"] = rows;
    emit(doc, args.out);
    return rep.pass ? 0 : 1;
}

void add_common(CLI::App* cmd, CommonInputs& in, bool with_seed = true) {
    if (with_seed) {
        cmd->add_option("--seed", in.seed, "seed traces x,y,z as complex literals re[+im i]");
        cmd->add_option("--matrices", in.matrices, "SL(2,C) pair 'a,b,c,d;e,f,g,h'");
        cmd->add_option("--mu", in.mu, "target mu (with --z-branch or relative solve)");
        cmd->add_flag("--z-branch", in.use_z_branch, "derive z from --seed x,y and --mu");
    }
    cmd->add_option("--bq-depth", in.bq_depth, "Bowditch exploration depth budget");
    cmd->add_option("--max-vertices", in.max_vertices, "Bowditch exploration work budget");
    cmd->add_flag("--relaxed", in.relaxed, "tolerate traces exactly ±2 (condition (i'))");
    cmd->add_option("--escape-threshold", in.escape_threshold, "escape certificate threshold (> 2)");
    cmd->add_option("--interval-tolerance", in.interval_tolerance,
                    "tolerance for membership in [-2,2]");
    cmd->add_option("--out", in.out, "also write the report/output to this path");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mu-Markoff maps on the Farey dual tree: Bowditch testing and "
                 "trace-identity verification"};
    app.require_subcommand(1);

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "run an identity check end to end");
    v->add_option("which", verify.which, "main | tricolor | branch | relative")->required();
    add_common(v, verify.common);
    v->add_option("--weights", verify.weights, "tricolor weights p1,p2,p3 (sum 1)");
    v->add_option("--edge", verify.edge, "branch edge selector root:K[:rev]");
    v->add_option("--theta", verify.theta, "mapping-class matrix a,b,c,d (relative)");
    v->add_option("--depth", verify.depth, "series depth cap");
    v->add_option("--tol", verify.tol, "series tail tolerance");
    v->add_flag("--force", verify.force, "evaluate despite failed preconditions");

    CommonInputs bq_in;
    auto* b = app.add_subcommand("check-bq", "test the Bowditch conditions");
    add_common(b, bq_in);

    EnumerateArgs enumerate;
    auto* e = app.add_subcommand("enumerate", "list regions, classes, traces and |h|");
    add_common(e, enumerate.common);
    e->add_option("--depth", enumerate.depth, "tree radius (0..20)");
    e->add_option("--format", enumerate.format, "json | csv | table");

    ScanArgs scan;
    auto* s = app.add_subcommand("scan", "raster scan of Bowditch behavior over a slice");
    add_common(s, scan.common, /*with_seed=*/false);
    s->add_option("--mode", scan.mode, "vary_z | vary_mu | vary_xy_diagonal");
    s->add_option("--fixed", scan.fixed, "non-varying coordinates (x,y or z)");
    s->add_option("--center", scan.center, "window center (complex literal)");
    s->add_option("--width", scan.width, "window width");
    s->add_option("--height", scan.height, "window height");
    s->add_option("--res", scan.res, "resolution WxH");
    s->add_option("--workers", scan.workers, "worker thread count");
    s->add_flag("--compute-sum", scan.compute_sum, "evaluate sum_main on satisfied pixels");
    s->add_option("--format", scan.format, "pgm | csv | both");

    Prop41Args prop41;
    auto* p = app.add_subcommand("prop41", "fan-summation property suite");
    p->add_option("--trials", prop41.trials, "number of random geometric pairs");
    p->add_option("--rng-seed", prop41.rng_seed, "RNG seed for reproducible reports");
    p->add_option("--out", prop41.out, "also write the JSON report to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 2;
    }

    try {
        if (v->parsed()) return cmd_verify(verify);
        if (b->parsed()) return cmd_check_bq(bq_in);
        if (e->parsed()) return cmd_enumerate(enumerate);
        if (s->parsed()) return cmd_scan(scan);
        if (p->parsed()) return cmd_prop41(prop41);
    } catch (const usage_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const precondition_error& err) {
        std::cerr << "refused: " << err.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
