#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "chords/asymptotics.hpp"
#include "chords/bucket.hpp"
#include "chords/gf.hpp"
#include "chords/sampler.hpp"

#ifndef CHORDS_VERSION
#define CHORDS_VERSION "dev"
#endif

using namespace chords;
using nlohmann::json;

namespace {

enum Exit { Ok = 0, Mismatch = 1, Usage = 2, Resource = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string family = "matching";
    std::string sizes;
    int k = -1;
    int kmax = -1;
    int order = -1;
    std::string y;
    std::string format;
    std::string output;
    std::string manifest;
    unsigned precision = 0;
    std::string mode = "estimate";
    int mmax = 200;
    double theta = -1;
    std::uint64_t seed = 1;
    long samples = 1;
    long max_steps = 10'000'000;
    bool connected = false;
    std::string by = "blocks";
    std::string golden;
    std::string perturb;
    bool keep_going = false;
    bool family_given = false;
};

struct Result {
    std::string text;
    int code = Ok;
};

Family family_of(const Options& o) { return Family::parse(o.family, o.sizes); }

std::string fmt_or(const Options& o, const std::string& fallback, std::initializer_list<const char*> allowed) {
    std::string f = o.format.empty() ? fallback : o.format;
    for (const char* a : allowed)
        if (f == a) return f;
    throw UsageError("format " + f + " is not available for this command");
}

std::string rational_list(const TruncatedSeries& s) {
    std::string out;
    for (int n = 0; n <= s.order; ++n) out += (n ? "," : "") + s.coeff(n).at(0).get_str();
    return out + "\n";
}

// ---- commands ----------------------------------------------------------

Result cmd_enumerate(const Options& o) {
    std::string f = fmt_or(o, "csv", {"csv", "json", "text"});
    if (o.kmax < 1) throw UsageError("enumerate needs --kmax >= 1");
    if (o.by != "blocks" && o.by != "vertices") throw UsageError("--by is blocks or vertices");
    ConnectedTable t = connected_table(family_of(o), o.kmax);
    if (f == "json") return {t.json().dump(2) + "\n"};
    return {t.csv(o.by == "vertices")};
}

Result cmd_core_poly(const Options& o) {
    std::string f = fmt_or(o, "text", {"text", "json"});
    if (o.k < 1) throw UsageError("core-poly needs --k >= 1");
    Family fam = family_of(o);
    if (fam.is_hyperchord_like()) throw UsageError("core polynomials are available for matchings, partitions and diagrams");
    if (o.k > core_poly_k_bound(fam))
        throw ResourceBoundExceeded("core polynomials for " + fam.str() + " stop at k = " + std::to_string(core_poly_k_bound(fam)));
    const CorePolynomial& p = cached_core_polynomial(fam, o.k);
    if (f == "json")
        return {json{{"family", fam.str()}, {"k", o.k}, {"polynomial", p.str()}, {"rooted_cores", p.rooted_count().get_str()}}.dump(2) + "\n"};
    return {p.str() + "\n"};
}

Result cmd_series(const Options& o) {
    std::string f = fmt_or(o, "text", {"text", "csv", "json"});
    if (o.k < 0) throw UsageError("series needs --k >= 0");
    if (o.order < 0) throw UsageError("series needs --order >= 0");
    Family fam = family_of(o);
    std::optional<mpq_class> yv;
    if (!o.y.empty()) {
        try {
            yv = mpq_class(o.y);
            yv->canonicalize();
        } catch (const std::exception&) {
            throw UsageError("--y must be a rational number");
        }
    }
    TruncatedSeries s = gf_k(fam, o.k, o.order);
    if (yv) s = s.eval_y(*yv);
    if (f == "json") return {s.json().dump(2) + "\n"};
    if (f == "csv") {
        std::string out = "n,y,coefficient\n";
        for (int n = 0; n <= s.order; ++n)
            for (int d = 0; d <= s.coeff(n).degree(); ++d)
                if (s.coeff(n).at(d) != 0) out += std::to_string(n) + "," + std::to_string(d) + "," + s.coeff(n).at(d).get_str() + "\n";
        return {out};
    }
    if (s.univariate()) return {rational_list(s)};
    std::string out;
    for (int n = 0; n <= s.order; ++n) out += "x^" + std::to_string(n) + ": " + s.coeff(n).str() + "\n";
    return {out};
}

json expansion_json(const SingularExpansion& s) {
    json r;
    for (const auto& [k, v] : s.residuals) r[k] = real_str(v);
    return {{"family", s.family.str()}, {"rho", real_str(s.rho)},        {"rho_inverse", real_str(1 / s.rho)},
            {"value", real_str(s.value)}, {"coeff", real_str(s.coeff)}, {"period", s.period},
            {"provenance", s.provenance}, {"residuals", r}};
}

std::string fixed(const Real& r, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << r;
    return os.str();
}

Result cmd_asymptotics(const Options& o) {
    const std::string& m = o.mode;
    std::string f = fmt_or(o, "json", {"json", "text", "csv"});
    if (f == "csv" && m != "table6" && m != "ratio") throw UsageError("csv output exists for --mode table6 and ratio");
    Family fam = family_of(o);
    if (m == "estimate") {
        if (o.k < 0) throw UsageError("asymptotics --mode estimate needs --k >= 0");
        AsymptoticEstimate e = o.k == 0 ? crossing_free_asymptotics(fam) : closed_form_asymptotics(fam, o.k);
        return {e.json().dump(2) + "\n"};
    }
    if (m == "constants") {
        if (fam.tag == FamilyTag::Hyperchord) return {hyperchord_constants().json().dump(2) + "\n"};
        if (fam.tag == FamilyTag::HyperchordRestricted)
            return {hyperchord_constants(fam.S, NumericConfig::from_env().series_order).json().dump(2) + "\n"};
        if (fam.tag == FamilyTag::PartitionRestricted) return {restricted_partition_constants(fam.S).json().dump(2) + "\n"};
        return {expansion_json(base_singularity(fam)).dump(2) + "\n"};
    }
    if (m == "block-law") {
        BlockLaw b = block_law_constants(fam);
        json j{{"family", fam.str()}, {"mu", real_str(b.mu)},         {"sigma2", real_str(b.sigma2)},
               {"rho", real_str(b.rho)}, {"rho_d1", real_str(b.rho_d1)}, {"rho_d2", real_str(b.rho_d2)}};
        if (b.mu_exact) j["mu_exact"] = b.mu_exact->get_str();
        if (b.sigma2_exact) j["sigma2_exact"] = b.sigma2_exact->get_str();
        return {j.dump(2) + "\n"};
    }
    if (m == "ratio") {
        if (o.k < 0) throw UsageError("asymptotics --mode ratio needs --k >= 0");
        RatioReport r = empirical_ratio_check(fam, o.k, o.mmax);
        if (f == "csv") {
            std::string out = "m,n,ratio\n";
            for (const auto& row : r.rows) out += std::to_string(row.m) + "," + std::to_string(row.n) + "," + fixed(row.ratio, 12) + "\n";
            return {out};
        }
        json rows = json::array();
        for (const auto& row : r.rows) rows.push_back({{"m", row.m}, {"n", row.n}, {"ratio", real_str(row.ratio)}});
        return {json{{"estimate", r.estimate.json()}, {"rows", rows}, {"improving", r.improving}, {"final_error", real_str(r.final_error)}}.dump(2) + "\n"};
    }
    if (m == "table6") {
        std::string out = f == "csv" ? "S,tau,rho,rho_inverse,alpha,beta\n" : "";
        json rows = json::array();
        for (const char* s : {"{3}", "{4}", "{5}", "{6}", "{7}", "3N*", "4N*", "5N*", "6N*", "7N*"}) {
            RestrictedConstants c = hyperchord_constants(SizeSet::parse(s), NumericConfig::from_env().series_order);
            if (f == "csv")
                out += std::string(s) + "," + fixed(c.tau, 8) + "," + fixed(c.rho, 8) + "," + fixed(1 / c.rho, 8) + "," + fixed(c.alpha, 8) + "," + fixed(c.beta, 8) + "\n";
            rows.push_back(c.json());
        }
        return {f == "csv" ? out : rows.dump(2) + "\n"};
    }
    throw UsageError("--mode is estimate, constants, block-law, ratio or table6");
}

Result cmd_sample(const Options& o) {
    std::string f = fmt_or(o, "text", {"text", "json"});
    if (o.theta <= 0) throw UsageError("sample needs --theta > 0");
    if (o.samples < 1) throw UsageError("--samples must be positive");
    SamplerConfig cfg;
    cfg.family = family_of(o);
    cfg.theta = o.theta;
    cfg.k = std::max(o.k, 0);
    cfg.seed = o.seed;
    cfg.max_steps = o.max_steps;
    cfg.connected = o.connected;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    Sampler s(cfg);
    std::vector<ChordSystem> out;
    for (long i = 0; i < o.samples; ++i) out.push_back(s.next());
    BatchStats st = batch_stats(out);
    json stats{{"count", st.count}, {"mean_size", st.mean}, {"variance", st.variance}, {"theta", o.theta}, {"k", cfg.k}, {"seed", o.seed}};
    if (cfg.family.tag == FamilyTag::Matching) {
        SizeMoments m = size_moments(cfg.k, o.theta);
        stats["expected_mean"] = m.mean.convert_to<double>();
        stats["expected_variance"] = m.variance.convert_to<double>();
        stats["expected_variance_table"] = m.variance_table.convert_to<double>();
    }
    if (f == "json") {
        json arr = json::array();
        for (const auto& c : out) arr.push_back(to_json(c));
        return {json{{"samples", arr}, {"stats", stats}}.dump(2) + "\n"};
    }
    std::string text;
    for (const auto& c : out) text += c.str() + "\n";
    return {text + stats.dump() + "\n"};
}

Result dispatch(const std::vector<std::string>& args);

// ---- verify ------------------------------------------------------------

struct Check {
    std::string name;
    bool ok;
    std::string detail;
};

struct FirstFailure {};

struct Verifier {
    bool keep_going;
    std::vector<Check> checks;
    void add(const std::string& name, bool ok, const std::string& detail = "") {
        checks.push_back({name, ok, detail});
        if (!ok) {
            std::cerr << "FAIL " << name << (detail.empty() ? "" : ": " + detail) << "\n";
            if (!keep_going) throw FirstFailure{};
        }
    }
};

struct Perturbation {
    std::string family;
    int k = -1, n = -1;
};

Perturbation parse_perturb(const std::string& text) {
    Perturbation p;
    if (text.empty()) return p;
    auto a = text.find(':'), b = text.rfind(':');
    if (a == std::string::npos || a == b) throw UsageError("--perturb is family:k:n");
    try {
        p.family = text.substr(0, a);
        p.k = std::stoi(text.substr(a + 1, b - a - 1));
        p.n = std::stoi(text.substr(b + 1));
        Family::parse(p.family);
    } catch (const std::exception&) {
        throw UsageError("--perturb is family:k:n");
    }
    if (p.k < 0 || p.n < 0) throw UsageError("--perturb needs k, n >= 0");
    return p;
}

void verify_family(Verifier& v, const Family& f, int order, int kmax, const Perturbation& pert) {
    const std::string tag = f.str();
    // Past the core polynomial bound, gf_k uses the cores on at most `order` vertices.
    const int kcore = order <= small_core_vertex_bound(f) ? kmax : std::min(kmax, core_poly_k_bound(f));
    std::vector<TruncatedSeries> series;
    for (int k = 0; k <= kcore; ++k) {
        TruncatedSeries s = gf_k(f, k, order);
        if (pert.family == f.name() && pert.k == k && pert.n <= order) s.c[pert.n] += YPoly(1);
        series.push_back(std::move(s));
    }
    // Brute-force bucketing against every coefficient, by block count.
    int top = std::min(order, enumerate_all_bound(f));
    for (int n = 0; n <= top; ++n) {
        Histogram h = bucket_parallel(f, n);
        long long kmax_n = 0;
        for (const auto& [key, c] : h) kmax_n = std::max(kmax_n, key.first);
        for (int k = 0; k <= kcore; ++k) {
            bool ok = true;
            std::string detail;
            const YPoly& coef = series[k].coeff(n);
            for (int m = 0; m <= std::max(coef.degree(), n); ++m) {
                auto it = h.find({k, m});
                mpz_class brute = it == h.end() ? 0 : mpz_class(static_cast<unsigned long>(it->second));
                mpq_class got = f.tag == FamilyTag::Matching ? (2 * m == n ? coef.at(0) : mpq_class(0)) : coef.at(m);
                if (got != brute) {
                    ok = false;
                    detail = "m=" + std::to_string(m) + " series " + got.get_str() + " brute " + brute.get_str();
                    break;
                }
            }
            v.add(tag + " brute-force n=" + std::to_string(n) + " k=" + std::to_string(k), ok, detail);
        }
        // Totals: the known k's never exceed all configurations, and match when complete.
        mpz_class sum = 0;
        for (int k = 0; k <= kcore; ++k) sum += series[k].eval_y(1).coeff(n).at(0).get_num();
        mpz_class total = total_configurations(f, n);
        bool complete = kmax_n <= kcore;
        v.add(tag + " totals n=" + std::to_string(n), complete ? sum == total : sum <= total,
              "series " + sum.get_str() + " total " + total.get_str());
    }
    if (f.tag == FamilyTag::Matching) {
        for (int m = 0; 2 * m <= order; ++m) {
            std::vector<mpz_class> tr = touchard_riordan(m);
            for (int k = 0; k <= kmax; ++k) {
                mpz_class want = k < static_cast<int>(tr.size()) ? tr[k] : mpz_class(0);
                if (k <= kcore) {
                    mpq_class got = series[k].coeff(2 * m).at(0);
                    v.add(tag + " touchard-riordan m=" + std::to_string(m) + " k=" + std::to_string(k), got == want,
                          "series " + got.get_str() + " formula " + want.get_str());
                } else if (2 * m <= enumerate_all_bound(f)) {
                    Histogram h = bucket_parallel(f, 2 * m);
                    auto it = h.find({k, m});
                    mpz_class brute = it == h.end() ? 0 : mpz_class(static_cast<unsigned long>(it->second));
                    v.add(tag + " touchard-riordan brute m=" + std::to_string(m) + " k=" + std::to_string(k), brute == want,
                          "brute " + brute.get_str() + " formula " + want.get_str());
                }
            }
        }
        for (int k = 1; k <= std::min(kmax, 4); ++k) {
            std::vector<ChordSystem> cores = enumerate_cores(f, k);
            int bound = std::max(2 * k - 3, 0), at_max = 0;
            bool ok = true;
            for (const ChordSystem& c : cores) {
                int phi = potential(region_profile(c));
                ok = ok && phi <= bound;
                at_max += phi == bound;
            }
            v.add(tag + " potential bound k=" + std::to_string(k), ok);
            if (k >= 2) v.add(tag + " maximal cores k=" + std::to_string(k), at_max == 4, std::to_string(at_max) + " rooted maximizers");
            v.add(tag + " rooted cores k=" + std::to_string(k),
                  cached_core_polynomial(f, k).rooted_count() == static_cast<long>(cores.size()));
        }
    }
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw UsageError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_words(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> w;
    for (std::string s; is >> s;) w.push_back(s);
    return w;
}

void verify_golden(Verifier& v, const std::string& dir) {
    std::filesystem::path root(dir);
    std::istringstream index(read_file(root / "index.txt"));
    for (std::string line; std::getline(index, line);) {
        if (line.empty() || line[0] == '#') continue;
        auto bar = line.find('|');
        if (bar == std::string::npos) throw UsageError("golden index lines are: file | command args");
        std::string file = split_words(line.substr(0, bar)).at(0);
        std::vector<std::string> args = split_words(line.substr(bar + 1));
        Result r = dispatch(args);
        std::string want = read_file(root / file);
        std::string detail;
        if (r.text != want) {
            size_t p = 0;
            while (p < r.text.size() && p < want.size() && r.text[p] == want[p]) ++p;
            size_t ls = r.text.rfind('\n', p == 0 ? 0 : p - 1);
            ls = ls == std::string::npos ? 0 : ls + 1;
            detail = "first difference at byte " + std::to_string(p) + ", got line: " + r.text.substr(ls, r.text.find('\n', ls) - ls);
        }
        v.add("golden " + file, r.text == want, detail);
    }
}

Result cmd_verify(const Options& o) {
    std::string f = fmt_or(o, "text", {"text", "json"});
    Perturbation pert = parse_perturb(o.perturb);
    struct Plan {
        Family family;
        int order, kmax;
    };
    std::vector<Plan> plans;
    // Default k range: every crossing number reached at the top order.
    auto defaults = [&](const Family& fam) -> std::pair<int, int> {
        int n = o.order >= 0 ? o.order : fam.tag == FamilyTag::Matching ? 12 : fam.tag == FamilyTag::Diagram ? 8 : 10;
        long long k = 0;
        for (int top = std::min(n, enumerate_all_bound(fam)); top >= std::max(0, std::min(n, enumerate_all_bound(fam)) - 1); --top)
            for (const auto& [key, c] : bucket_parallel(fam, top)) k = std::max(k, key.first);
        return {n, static_cast<int>(k)};
    };
    if (o.family_given) {
        Family fam = family_of(o);
        if (fam.is_hyperchord_like()) throw UsageError("verify covers matchings, partitions and diagrams");
        auto [n0, k0] = defaults(fam);
        plans.push_back({fam, o.order >= 0 ? o.order : n0, o.kmax >= 0 ? o.kmax : k0});
    } else {
        for (const Family& fam : {Family::matching(), Family::partition(), Family::diagram()}) {
            auto [n0, k0] = defaults(fam);
            plans.push_back({fam, o.order >= 0 ? o.order : n0, o.kmax >= 0 ? o.kmax : k0});
        }
    }
    Verifier v{o.keep_going, {}};
    try {
        for (const Plan& p : plans) verify_family(v, p.family, p.order, p.kmax, pert);
        if (!o.golden.empty()) verify_golden(v, o.golden);
    } catch (const FirstFailure&) {
    }
    long failed = 0;
    for (const Check& c : v.checks) failed += !c.ok;
    int code = failed ? Mismatch : Ok;
    if (f == "json") {
        json arr = json::array();
        for (const Check& c : v.checks) arr.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
        return {json{{"checks", arr}, {"failed", failed}, {"ok", failed == 0}}.dump(2) + "\n", code};
    }
    std::string out;
    for (const Check& c : v.checks) out += std::string(c.ok ? "PASS " : "FAIL ") + c.name + (c.ok || c.detail.empty() ? "" : ": " + c.detail) + "\n";
    out += "verify: " + std::to_string(v.checks.size()) + " checks, " + std::to_string(failed) + " failed\n";
    return {out, code};
}

// ---- plumbing ----------------------------------------------------------

struct Parsed {
    Options opts;
    std::string command;
};

Parsed parse(const std::vector<std::string>& args, CLI::App& app) {
    Parsed p;
    Options& o = p.opts;
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(CHORDS_VERSION));
    auto common = [&](CLI::App* c) {
        c->add_option("--format", o.format, "text, csv or json");
        c->add_option("-o,--output", o.output, "write to this file (plus <file>.manifest.json)");
        c->add_option("--manifest", o.manifest, "manifest path");
        c->add_option("--precision", o.precision, "working precision in decimal digits (overrides CHORDS_PRECISION)")->check(CLI::Range(20u, 5000u));
    };
    auto family = [&](CLI::App* c) {
        c->add_option("--family", o.family, "matching, partition, diagram or hyperchord");
        c->add_option("--sizes,-S", o.sizes, "allowed block sizes, e.g. {3}, 3N*, {1,3}+{5}/2");
    };
    CLI::App* en = app.add_subcommand("enumerate", "crossing-connected counts by (k, size)");
    family(en);
    common(en);
    en->add_option("--kmax", o.kmax, "largest crossing number")->required();
    en->add_option("--by", o.by, "blocks or vertices");
    CLI::App* cp = app.add_subcommand("core-poly", "k-core polynomial");
    family(cp);
    common(cp);
    cp->add_option("--k", o.k)->required();
    CLI::App* se = app.add_subcommand("series", "coefficients of the k-crossing generating function");
    family(se);
    common(se);
    se->add_option("--k", o.k)->required();
    se->add_option("--order,-N", o.order)->required();
    se->add_option("--y", o.y, "substitute a rational value for y");
    CLI::App* as = app.add_subcommand("asymptotics", "asymptotic constants");
    family(as);
    common(as);
    as->add_option("--k", o.k);
    as->add_option("--mode", o.mode, "estimate, constants, block-law, ratio or table6");
    as->add_option("--mmax", o.mmax, "last ratio row");
    CLI::App* sa = app.add_subcommand("sample", "Boltzmann samples with a stats footer");
    family(sa);
    common(sa);
    sa->add_option("--k", o.k);
    sa->add_option("--theta", o.theta)->required();
    sa->add_option("--seed", o.seed);
    sa->add_option("--samples,-n", o.samples);
    sa->add_option("--max-steps", o.max_steps);
    sa->add_flag("--connected", o.connected, "connected crossing-free diagrams");
    CLI::App* ve = app.add_subcommand("verify", "cross-checks; exit 1 on any mismatch");
    CLI::Option* fam_opt = ve->add_option("--family", o.family);
    ve->add_option("--sizes,-S", o.sizes);
    common(ve);
    ve->add_option("--order,-N", o.order);
    ve->add_option("--kmax", o.kmax);
    ve->add_option("--golden", o.golden, "directory with index.txt and expected outputs");
    ve->add_option("--perturb", o.perturb, "add 1 to [x^n] of gf_k: family:k:n");
    ve->add_flag("--keep-going", o.keep_going, "report every mismatch");

    std::vector<const char*> argv{"chords_cli"};
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
    for (CLI::App* sub : app.get_subcommands()) p.command = sub->get_name();
    o.family_given = fam_opt->count() > 0;
    return p;
}

Result run(const Parsed& p) {
    const Options& o = p.opts;
    if (p.command == "enumerate") return cmd_enumerate(o);
    if (p.command == "core-poly") return cmd_core_poly(o);
    if (p.command == "series") return cmd_series(o);
    if (p.command == "asymptotics") return cmd_asymptotics(o);
    if (p.command == "sample") return cmd_sample(o);
    if (p.command == "verify") return cmd_verify(o);
    throw UsageError("unknown command " + p.command);
}

Result dispatch(const std::vector<std::string>& args) {
    CLI::App app;
    Parsed p = parse(args, app);
    try {
        Family::parse(p.opts.family, p.opts.sizes);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return run(p);
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_atomically(const std::string& path, const std::string& text) {
    std::string tmp = path + ".partial";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    CLI::App app{"Chord configurations with a prescribed number of crossings"};
    Parsed p;
    try {
        p = parse(args, app);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? Ok : Usage;
    }
    try {
        try {
            Family::parse(p.opts.family, p.opts.sizes);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (p.opts.precision) setenv("CHORDS_PRECISION", std::to_string(p.opts.precision).c_str(), 1);
        NumericConfig::from_env();
        Result r = run(p);
        if (p.opts.output.empty()) {
            std::cout << r.text;
        } else {
            write_atomically(p.opts.output, r.text);
        }
        std::string mpath = !p.opts.manifest.empty() ? p.opts.manifest : p.opts.output.empty() ? "" : p.opts.output + ".manifest.json";
        if (!mpath.empty()) {
            json m{{"command", p.command}, {"args", args},       {"version", CHORDS_VERSION},
                   {"timestamp", timestamp()}, {"exit_code", r.code}, {"output", p.opts.output.empty() ? "stdout" : p.opts.output}};
            write_atomically(mpath, m.dump(2) + "\n");
        }
        return r.code;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return Usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return Usage;
    } catch (const ResourceBoundExceeded& e) {
        std::cerr << "resource bound: " << e.what() << "\n";
        return Resource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Resource;
    }
}
