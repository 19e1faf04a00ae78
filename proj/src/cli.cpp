#include "torrank/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "torrank/acceptance.hpp"
#include "torrank/census.hpp"
#include "torrank/rank_bounds.hpp"
#include "torrank/weights.hpp"

namespace torrank {

namespace {

using json = nlohmann::ordered_json;

// doubles go out with 12 significant digits
double d12(double x) { return std::isfinite(x) ? std::stod(fmt12(x)) : x; }

std::string q_str(const mpq_class& q) {
    mpq_class c = q;
    c.canonicalize();
    return c.get_den() == 1 ? c.get_num().get_str() : c.get_num().get_str() + "/" + c.get_den().get_str();
}

std::string label(Group G) { return torsion_group(G).label; }

// TSV/JSON to --out when given, else to out
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw std::runtime_error("cannot write " + path);
    }
    std::ostream& operator()(std::ostream& fallback) { return file_.is_open() ? file_ : fallback; }

private:
    std::ofstream file_;
};

std::vector<i64> primes_of(const RunConfig& cfg) {
    if (cfg.p_lo > cfg.p_hi) throw UsageError("empty prime range");
    auto ps = primes_between(cfg.p_lo, cfg.p_hi);
    if (ps.empty()) throw UsageError("no primes in " + std::to_string(cfg.p_lo) + ".." + std::to_string(cfg.p_hi));
    return ps;
}

std::string cache_dir(const RunConfig& cfg) { return cfg.cache.empty() ? default_cache_dir() : cfg.cache; }

}  // namespace

std::pair<i64, i64> parse_prime_range(const std::string& s) {
    auto num = [&](const std::string& t) {
        std::size_t used = 0;
        i64 v = 0;
        try {
            v = std::stoll(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (t.empty() || used != t.size()) throw UsageError("bad prime range \"" + s + "\"");
        return v;
    };
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        const i64 p = num(s);
        return {p, p};
    }
    return {num(s.substr(0, dots)), num(s.substr(dots + 2))};
}

void validate(const RunConfig& cfg) {
    if (cfg.workers < 1) throw UsageError("--workers must be >= 1");
    if (cfg.p_lo != 0 || cfg.p_hi != 0) {
        if (cfg.p_lo > cfg.p_hi) throw UsageError("empty prime range");
        if (cfg.p_lo < 5 || cfg.p_hi > 10000) throw UsageError("prime range must lie in [5, 10000]");
    }
    for (i64 p : cfg.local)
        if (p < 5 || p > 10000 || !is_prime(p)) throw UsageError("--local needs a prime in [5, 10000]");
    if (!(cfg.tol > 0)) throw UsageError("--tol must be positive");
    if (cfg.command == "census" && cfg.X < 1) throw UsageError("census needs --X >= 1");
    if (cfg.command == "rank-bounds" && cfg.X != 0 && cfg.X < 1) throw UsageError("--X must be >= 1");
    if ((cfg.command == "weights" || cfg.command == "census" || cfg.command == "rank-bounds") && cfg.groups.empty())
        throw UsageError(cfg.command + " needs --group");
}

int cmd_weights(const RunConfig& cfg, std::ostream& out) {
    const auto ps = primes_of(cfg);
    Sink tables(cfg.out);
    bool fail = false;
    out << "group\tp\tsingular_sum\texpected\tstatus\n";
    for (Group G : cfg.groups) {
        if (G == Group::Trivial) throw UsageError("weights need a nontrivial group");
        for (i64 p : ps) {
            const PrimeModulus pm(p);
            const auto t = build_weight_table(G, pm, cfg.workers);
            const i64 s = singular_weight_sum(t);
            const auto e = expected_singular_sum(G, p);
            std::string status = "n/a";
            if (e) status = *e == s ? "PASS" : "FAIL";
            if (t.total() != static_cast<u64>(p * p)) status = "FAIL";
            fail |= status == "FAIL";
            out << label(G) << '\t' << p << '\t' << s << '\t' << (e ? std::to_string(*e) : "-") << '\t' << status
                << '\n';
            if (G == Group::Z7 && p == 5) {
                const bool ok = t.at(2, 1) == 0 && t.at(2, 4) == 12;
                fail |= !ok;
                out << "example\t7\t5\tW(2,1)=" << t.at(2, 1) << " W(2,4)=" << t.at(2, 4) << '\t'
                    << (ok ? "PASS" : "FAIL") << '\n';
            }
            if (!cfg.out.empty()) tables(out) << weight_table_tsv(t, false);
        }
    }
    return fail ? kVerifyFailed : kOk;
}

int cmd_census(const RunConfig& cfg, std::ostream& out) {
    const std::string dir = cache_dir(cfg);
    ApCache ap;
    const std::string ap_path = dir + "/ap-cache.txt";
    if (!cfg.local.empty() && std::filesystem::exists(ap_path)) ap.load(ap_path);
    json all = json::array();
    std::map<Group, CensusResult> censuses;
    for (Group G : cfg.groups) {
        auto c = cached_census(G, cfg.X, dir, cfg.workers);
        if (!cfg.out.empty()) save_census(c, cfg.groups.size() == 1 ? cfg.out : cfg.out + "." + label(G));
        const double cg = c_constant(G, cfg.tol);
        const double expect = cg * std::pow(static_cast<double>(c.X), count_exponent(G));
        json j;
        j["group"] = label(G);
        j["X"] = to_string(c.X);
        j["count"] = c.size();
        j["c"] = d12(cg);
        j["expected"] = d12(expect);
        j["ratio"] = d12(static_cast<double>(c.size()) / expect);
        j["pairs_scanned"] = c.pairs_scanned;
        j["singular_images"] = c.singular_images;
        json m = json::object();
        for (auto [k, n] : c.multiplicity) m[std::to_string(k)] = n;
        j["multiplicity"] = m;
        json loc = json::array();
        for (i64 p : cfg.local) {
            const auto data = local_data(c, p, &ap);
            for (const char* k : {"good", "split", "nonsplit", "mult", "additive", "semistable"}) {
                const auto r = local_density(c, data, p, parse_local_condition(k));
                json row;
                row["p"] = p;
                row["condition"] = k;
                row["count"] = r.count;
                row["density"] = d12(r.density);
                row["predicted"] = d12(r.predicted);
                row["tolerance"] = d12(r.tolerance);
                row["ok"] = r.ok;
                loc.push_back(row);
            }
        }
        j["local"] = loc;
        censuses.emplace(G, std::move(c));
        all.push_back(j);
    }
    json summary;
    summary["censuses"] = all;
    if (!cfg.local.empty()) {
        json checks = json::array();
        for (const auto& l : corollary_checks(censuses, cfg.local)) {
            if (l.name.rfind("cusps ", 0) == 0) continue;  // weight-table lines, not census data
            checks.push_back({{"name", l.name},
                              {"observed", d12(l.observed)},
                              {"expected", d12(l.expected)},
                              {"tolerance", d12(l.tolerance)},
                              {"ok", l.ok}});
        }
        summary["corollary_checks"] = checks;
        std::filesystem::create_directories(dir);
        ap.save(ap_path);
    }
    out << summary.dump(2) << '\n';
    return kOk;
}

int cmd_rank_bounds(const RunConfig& cfg, std::ostream& out) {
    Sink sink(cfg.out);
    std::ostream& o = sink(out);
    o << "quantity\tgroup\targument\tvalue\tdecimal\n";
    auto row = [&](const std::string& what, Group G, const std::string& arg, const mpq_class& v) {
        o << what << '\t' << label(G) << '\t' << arg << '\t' << q_str(v) << '\t' << fmt12(v.get_d()) << '\n';
    };
    const bool any = cfg.moments || cfg.tail || cfg.average;
    for (Group G : cfg.groups) {
        const bool nlevel = G == Group::Z2 || G == Group::Z2xZ2;
        if (cfg.average || !any) {
            try {
                if (!nlevel) row("sigma", G, "-", sigma_for(G));
                row("average_rank_bound", G, "-", average_rank_bound(G));
            } catch (const UnsupportedBound& e) {
                o << "average_rank_bound\t" << label(G) << "\t-\tunsupported\t-\n";
            }
        }
        if (cfg.moments) {
            if (!nlevel) throw UsageError("--moments needs --group 2 or 2x2");
            for (int n = cfg.moments->first; n <= cfg.moments->second; ++n) row("moment_bound", G, std::to_string(n), moment_bound(G, n));
        }
        if (cfg.tail) {
            if (!nlevel) throw UsageError("--tail needs --group 2 or 2x2");
            mpq_class a;
            try {
                a = mpq_class(*cfg.tail);
                a.canonicalize();
            } catch (const std::exception&) {
                throw UsageError("bad --tail threshold \"" + *cfg.tail + "\"");
            }
            try {
                const auto t = tail_bound(G, a);
                row("tail_bound", G, q_str(a), t.bound);
                o << "tail_bound_n\t" << label(G) << '\t' << q_str(a) << '\t' << t.n << '\t' << t.n << '\n';
                row("tail_bound_C", G, q_str(a), t.C);
            } catch (const VacuousBound&) {
                o << "tail_bound\t" << label(G) << '\t' << q_str(a) << "\tvacuous\t-\n";
            }
        }
        if (cfg.X > 0) {
            const double sigma = nlevel ? sigma_n(G, 1).get_d() : sigma_for(G).get_d();
            const auto c = cached_census(G, cfg.X, cache_dir(cfg), cfg.workers);
            const auto s = empirical_S1_S2(c, sigma);
            o << "S1\t" << label(G) << "\tX=" << to_string(cfg.X) << "\t-\t" << fmt12(s.S1) << '\n';
            o << "S2\t" << label(G) << "\tX=" << to_string(cfg.X) << "\t-\t" << fmt12(s.S2) << '\n';
            o << "S2_target\t" << label(G) << "\tX=" << to_string(cfg.X) << "\t-\t" << fmt12(s.target_S2) << '\n';
        }
    }
    return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    AcceptanceOptions opt;
    opt.quick = cfg.quick;
    opt.workers = cfg.workers;
    opt.cache_dir = cache_dir(cfg);
    opt.only = cfg.criteria;
    opt.on_result = [&](const CriterionResult& r) {
        out << "criterion\t" << r.id << '\t' << (r.pass ? "PASS" : "FAIL") << '\t' << r.title << '\t' << r.summary
            << '\n';
        out.flush();
    };
    const auto results = run_acceptance(opt);
    bool ok = true;
    json j = json::array();
    for (const auto& r : results) {
        ok &= r.pass;
        j.push_back({{"criterion", r.id},
                     {"status", r.pass ? "PASS" : "FAIL"},
                     {"title", r.title},
                     {"summary", r.summary},
                     {"detail", r.detail}});
    }
    if (!cfg.out.empty()) {
        std::ofstream f(cfg.out);
        if (!f) throw std::runtime_error("cannot write " + cfg.out);
        f << json{{"quick", cfg.quick}, {"pass", ok}, {"criteria", j}}.dump(2) << '\n';
    }
    return ok ? kOk : kVerifyFailed;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"torsion-family rank statistics"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::vector<std::string> groups;
    std::string X, primes, moments;
    std::vector<std::string> tail;

    auto common = [&](CLI::App* sc, bool with_primes) {
        sc->add_option("--group", groups, "torsion group label, repeatable: 0 2 3 ... 12 2x2 2x4 2x6 2x8");
        sc->add_option("--out", cfg.out, "output path");
        sc->add_option("--cache", cfg.cache, "cache directory");
        sc->add_option("--workers", cfg.workers, "worker threads");
        if (with_primes) sc->add_option("--primes", primes, "prime range a..b");
    };
    auto* w = app.add_subcommand("weights", "weight tables and singular sums");
    common(w, true);
    auto* c = app.add_subcommand("census", "enumerate E_G(X)");
    common(c, false);
    c->add_option("--X", X, "height bound")->required();
    c->add_option("--local", cfg.local, "prime for local tallies, repeatable");
    c->add_option("--tol", cfg.tol, "region area tolerance");
    auto* r = app.add_subcommand("rank-bounds", "rank-bound constants");
    common(r, false);
    r->add_option("--moments", moments, "n range a..b");
    r->add_option("--tail", tail, "threshold a (integer or num/den)");
    r->add_flag("--average", cfg.average, "average-rank bound");
    r->add_option("--X", X, "census height for empirical S1, S2");
    auto* v = app.add_subcommand("verify", "acceptance suite");
    v->add_flag("--quick", cfg.quick, "p <= 30, X <= 1e6");
    v->add_option("--out", cfg.out, "JSON summary path");
    v->add_option("--cache", cfg.cache, "cache directory");
    v->add_option("--workers", cfg.workers, "worker threads");
    v->add_option("--only", cfg.criteria, "criterion ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        for (const auto& g : groups) {
            try {
                cfg.groups.push_back(parse_group(g));
            } catch (const std::exception&) {
                throw UsageError("unknown group \"" + g + "\"");
            }
        }
        if (!X.empty()) {
            try {
                cfg.X = parse_height(X);
            } catch (const std::exception&) {
                throw UsageError("bad --X \"" + X + "\"");
            }
            if (cfg.X < 1) throw UsageError("--X must be >= 1");
        }
        if (!primes.empty()) std::tie(cfg.p_lo, cfg.p_hi) = parse_prime_range(primes);
        else if (cfg.command == "weights") throw UsageError("weights needs --primes");
        if (!moments.empty()) {
            auto [a, b] = parse_prime_range(moments);
            if (a < 1 || a > b || b > 64) throw UsageError("--moments range must lie in 1..64");
            cfg.moments = {static_cast<int>(a), static_cast<int>(b)};
        }
        if (!tail.empty()) cfg.tail = tail.front();
        for (int id : cfg.criteria)
            if (id < 1 || id > 15) throw UsageError("--only ids must be in 1..15");
        validate(cfg);
        if (cfg.command == "weights") return cmd_weights(cfg, out);
        if (cfg.command == "census") return cmd_census(cfg, out);
        if (cfg.command == "rank-bounds") return cmd_rank_bounds(cfg, out);
        return cmd_verify(cfg, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const CacheError& e) {
        err << "cache integrity error: " << e.what() << '\n';
        return kUsageError;
    } catch (const RegionError& e) {
        err << "region error: " << e.what() << '\n';
        return kVerifyFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
}

}  // namespace torrank
