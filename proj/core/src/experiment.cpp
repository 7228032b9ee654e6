#include "steinpair/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <variant>
#include <vector>

#include <json.hpp>

#include "steinpair/colored_graph.hpp"
#include "steinpair/curie_weiss.hpp"
#include "steinpair/estimators.hpp"
#include "steinpair/heisenberg.hpp"
#include "steinpair/quadratic.hpp"
#include "steinpair/stats.hpp"

namespace steinpair {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::uint64_t salt_seed(std::uint64_t seed, std::uint64_t salt) {
    return detail::mix64(seed + 0x9E3779B97F4A7C15ULL * (salt + 1));
}

using ModelVariant =
    std::variant<QuadraticModel, CurieWeissModel, HeisenbergModel, ColoredGraphModel>;

struct Config {
    json raw;
    std::string mode;
    std::vector<int> n_grid;
    std::uint64_t reps = 100000;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out_dir = "results";
    std::string hash;
};

Config parse_config(const std::string& text, const RunOptions& opts) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config parse error: ") + e.what());
    }
    Config cfg;
    cfg.raw = j;
    if (!j.contains("mode") || !j["mode"].is_string())
        throw ValidationError("config: missing string field 'mode'");
    cfg.mode = j["mode"].get<std::string>();
    if (j.contains("n_grid")) {
        for (const auto& v : j["n_grid"]) cfg.n_grid.push_back(v.get<int>());
        for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
            if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
                throw ValidationError("config: n_grid must be strictly increasing");
    }
    if (j.contains("M")) cfg.reps = j["M"].get<std::uint64_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (const char* env = std::getenv("STEINPAIR_OUT")) cfg.out_dir = env;
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.workers) cfg.workers = *opts.workers;
    if (opts.out_dir) cfg.out_dir = *opts.out_dir;
    cfg.hash = config_hash_hex(j.dump());
    return cfg;
}

BaseMeasure parse_measure(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "two_point") return BaseMeasure::two_point();
    if (kind == "uniform") return BaseMeasure::uniform();
    if (kind == "atoms") {
        std::vector<double> xs, ps;
        for (const auto& atom : j.at("atoms")) {
            xs.push_back(atom.at(0).get<double>());
            ps.push_back(atom.at(1).get<double>());
        }
        return BaseMeasure::atoms(std::move(xs), std::move(ps));
    }
    throw ValidationError("config: unknown base measure kind '" + kind + "'");
}

ModelVariant make_model(const json& model, int n) {
    const std::string kind = model.at("kind").get<std::string>();
    if (kind == "quadratic") {
        const XLaw xlaw = XLaw::parse(model.value("x_law", std::string("rademacher")));
        const json& mj = model.at("matrix");
        const std::string mkind = mj.at("kind").get<std::string>();
        SymmetricMatrix a;
        if (mkind == "tridiagonal")
            a = SymmetricMatrix::tridiagonal(n, mj.value("off_diagonal", 1.0));
        else if (mkind == "erdos_renyi")
            a = SymmetricMatrix::erdos_renyi(n, mj.at("p").get<double>(),
                                             mj.value("seed", std::uint64_t{1}));
        else if (mkind == "rank_one")
            a = SymmetricMatrix::rank_one(n, mj.value("seed", std::uint64_t{1}));
        else if (mkind == "csv")
            a = SymmetricMatrix::from_csv(mj.at("path").get<std::string>());
        else
            throw ValidationError("config: unknown matrix kind '" + mkind + "'");
        if (a.n != n)
            throw ValidationError("config: matrix dimension disagrees with n_grid entry");
        return QuadraticModel(std::move(a), xlaw);
    }
    if (kind == "curie_weiss") {
        return CurieWeissModel(parse_measure(model.at("rho")), model.at("beta").get<double>(),
                               n);
    }
    if (kind == "heisenberg") {
        return HeisenbergModel(model.at("beta").get<double>(), n);
    }
    if (kind == "colored_graph") {
        const json& gj = model.at("graph");
        const std::string gkind = gj.at("kind").get<std::string>();
        Graph g;
        if (gkind == "complete")
            g = Graph::complete(n);
        else if (gkind == "erdos_renyi")
            g = Graph::erdos_renyi(n, gj.at("p").get<double>(),
                                   gj.value("seed", std::uint64_t{1}));
        else if (gkind == "regular")
            g = Graph::random_regular(n, gj.at("degree").get<int>(),
                                      gj.value("seed", std::uint64_t{1}));
        else if (gkind == "edge_list")
            g = Graph::from_edge_list(gj.at("path").get<std::string>());
        else
            throw ValidationError("config: unknown graph kind '" + gkind + "'");
        if (g.n != n)
            throw ValidationError("config: graph order disagrees with n_grid entry");
        int colors;
        const json& cj = model.at("colors");
        if (cj.is_string() && cj.get<std::string>() == "n")
            colors = n;
        else
            colors = cj.get<int>();
        return ColoredGraphModel(std::move(g), colors);
    }
    throw ValidationError("config: unknown model kind '" + kind + "'");
}

std::string model_label(const json& model) { return model.at("kind").get<std::string>(); }

std::filesystem::path prepare_out_dir(const Config& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream probe(dir / ".write_probe");
    if (!probe) throw ValidationError("config: output directory not writable: " + cfg.out_dir);
    probe.close();
    std::filesystem::remove(dir / ".write_probe", ec);
    return dir;
}

void write_metadata(const Config& cfg, const std::filesystem::path& dir) {
    json meta;
    meta["config_hash"] = cfg.hash;
    meta["seed"] = cfg.seed;
    meta["mode"] = cfg.mode;
    meta["version"] = "steinpair 0.1.0";
    meta["config"] = cfg.raw;
    meta["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    std::ofstream out(dir / "metadata.json");
    out << meta.dump(2) << "\n";
}

struct SampleResult {
    std::vector<double> draws;
    double ks = 0.0;
    double ks_se = 0.0;
    std::vector<double> boot;  // bootstrap KS replicates
};

SampleResult sample_and_ks(const ModelVariant& model, const Config& cfg, std::size_t ni,
                           int boot_reps) {
    SampleResult res;
    res.draws.resize(cfg.reps);
    std::visit(
        [&](const auto& m) {
            parallel_for(cfg.reps, cfg.workers, [&](std::uint64_t lo, std::uint64_t hi) {
                for (std::uint64_t i = lo; i < hi; ++i) {
                    RngStream rng = derive_stream(cfg.seed, kStreamRates + ni, i);
                    res.draws[i] = m.w_of(m.sample_config(rng));
                }
            });
        },
        model);
    const auto target_cdf = std::visit(
        [](const auto& m) {
            const TargetLaw* t = &m.target();
            return std::function<double(double)>([t](double x) { return t->cdf(x); });
        },
        model);
    const Ecdf ecdf(res.draws);
    res.ks = ks_distance(ecdf, target_cdf);
    if (boot_reps > 0) {
        RngStream rng = derive_stream(cfg.seed, kStreamBootstrap + ni, 0);
        res.boot = bootstrap_ks(ecdf, target_cdf, boot_reps, rng);
        const MeanSe ms = mean_se(res.boot);
        res.ks_se = ms.se * std::sqrt(static_cast<double>(res.boot.size()));
    }
    return res;
}

int run_rates(const Config& cfg, std::ostream& log, bool check) {
    if (cfg.n_grid.size() < 3)
        throw ValidationError("rates mode: need an n_grid with at least 3 entries");
    if (cfg.reps < 1000) throw ValidationError("rates mode: M >= 1000 required");
    const auto dir = prepare_out_dir(cfg);
    std::vector<RatePoint> points;
    std::vector<std::vector<double>> boot;
    std::vector<double> ses;
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        const ModelVariant model = make_model(cfg.raw.at("model"), cfg.n_grid[ni]);
        const SampleResult res = sample_and_ks(model, cfg, ni, 1000);
        points.push_back({static_cast<double>(cfg.n_grid[ni]), res.ks});
        boot.push_back(res.boot);
        ses.push_back(res.ks_se);
        log << "n=" << cfg.n_grid[ni] << " ks=" << res.ks << " se=" << res.ks_se << "\n";
    }
    const RateFit fit = fit_rate_with_ci(points, boot);
    log << "slope=" << fit.slope << " ci=[" << fit.ci_lo << ", " << fit.ci_hi << "]\n";

    std::ofstream csv(dir / "rates.csv");
    csv << "model,params,n,M,ks,se,slope,ci_lo,ci_hi,config_hash\n";
    const std::string label = model_label(cfg.raw.at("model"));
    const std::string params = cfg.raw.at("model").dump();
    for (std::size_t i = 0; i < points.size(); ++i) {
        csv << label << ",\"" << params << "\"," << cfg.n_grid[i] << "," << cfg.reps << ","
            << fmt17(points[i].distance) << "," << fmt17(ses[i]) << "," << fmt17(fit.slope)
            << "," << fmt17(fit.ci_lo) << "," << fmt17(fit.ci_hi) << "," << cfg.hash << "\n";
    }
    csv.close();
    write_metadata(cfg, dir);

    if (check && cfg.raw.contains("check")) {
        const json& ck = cfg.raw["check"];
        const double lo = ck.value("slope_min", -std::numeric_limits<double>::infinity());
        const double hi = ck.value("slope_max", std::numeric_limits<double>::infinity());
        if (!(fit.slope >= lo && fit.slope <= hi)) {
            log << "check FAILED: slope " << fit.slope << " outside [" << lo << ", " << hi
                << "]\n";
            return kExitCheckFailed;
        }
    }
    return kExitOk;
}

int run_bound(const Config& cfg, std::ostream& log, bool check) {
    if (cfg.n_grid.empty()) throw ValidationError("bound mode: n_grid required");
    const auto dir = prepare_out_dir(cfg);
    json rows = json::array();
    bool all_valid = true;
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        const ModelVariant model = make_model(cfg.raw.at("model"), cfg.n_grid[ni]);
        const std::uint64_t seed_n = salt_seed(cfg.seed, ni);
        BoundTerms bt;
        ValueSe cor2;
        std::optional<Corollary1Terms> cor1;
        json tags = json::object();
        std::visit(
            [&](const auto& m) {
                bt = estimate_bound_terms(m, cfg.reps, seed_n, cfg.workers);
                cor2 = corollary2_term(m, cfg.reps, seed_n, cfg.workers);
                if constexpr (HasDeltaBound<std::decay_t<decltype(m)>>)
                    cor1 = corollary1_terms(m, cfg.reps, seed_n, cfg.workers);
                if constexpr (std::is_same_v<std::decay_t<decltype(m)>, HeisenbergModel>) {
                    tags["kappa"] = m.kappa();
                    tags["B2"] = m.b2();
                }
            },
            model);
        const SampleResult res = sample_and_ks(model, cfg, ni, 200);
        const bool valid = res.ks <= bt.rhs.value + 3.0 * bt.rhs.se;
        all_valid = all_valid && valid;
        json row;
        row["model"] = model_label(cfg.raw.at("model"));
        row["params"] = cfg.raw.at("model");
        row["n"] = cfg.n_grid[ni];
        row["M"] = cfg.reps;
        row["seed"] = seed_n;
        row["t1"] = bt.t1.value;
        row["se_t1"] = bt.t1.se;
        row["t2"] = bt.t2.value;
        row["se_t2"] = bt.t2.se;
        row["t3"] = bt.t3.value;
        row["se_t3"] = bt.t3.se;
        row["rhs"] = bt.rhs.value;
        row["se_rhs"] = bt.rhs.se;
        row["corollary2_term"] = cor2.value;
        row["se_corollary2_term"] = cor2.se;
        if (cor1) {
            row["corollary1_rhs"] = cor1->terms.rhs.value;
            row["delta_max"] = cor1->delta_max;
            row["mean_abs_w_ok"] = cor1->mean_abs_w_ok;
        }
        row["ks"] = res.ks;
        row["valid"] = valid;
        row["config_hash"] = cfg.hash;
        for (const auto& [key, value] : tags.items()) row[key] = value;
        rows.push_back(row);
        log << "n=" << cfg.n_grid[ni] << " rhs=" << bt.rhs.value << " ks=" << res.ks
            << (valid ? " valid" : " VIOLATED") << "\n";
    }
    std::ofstream out(dir / "bound.json");
    out << rows.dump(2) << "\n";
    out.close();
    write_metadata(cfg, dir);
    if (check && !all_valid) {
        log << "check FAILED: empirical KS exceeded rhs + 3 se at some n\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int run_diagnose(const Config& cfg, std::ostream& log, bool check) {
    if (cfg.n_grid.empty()) throw ValidationError("diagnose mode: n_grid required");
    const auto dir = prepare_out_dir(cfg);
    json reports = json::array();
    bool all_pass = true;
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        const ModelVariant model = make_model(cfg.raw.at("model"), cfg.n_grid[ni]);
        const std::uint64_t seed_n = salt_seed(cfg.seed, ni);
        DiagnosticReport rep;
        std::visit([&](const auto& m) { rep = exchangeability_check(m, cfg.reps, seed_n,
                                                                    cfg.workers); },
                   model);
        all_pass = all_pass && rep.pass;
        json rj;
        rj["model"] = model_label(cfg.raw.at("model"));
        rj["n"] = cfg.n_grid[ni];
        rj["pass"] = rep.pass;
        rj["config_hash"] = cfg.hash;
        rj["rows"] = json::array();
        for (const auto& row : rep.rows) {
            rj["rows"].push_back({{"name", row.name},
                                  {"value", row.value},
                                  {"se", row.se},
                                  {"pass", row.pass},
                                  {"gated", row.gated}});
        }
        reports.push_back(rj);
        log << "n=" << cfg.n_grid[ni] << " diagnostics " << (rep.pass ? "pass" : "FAIL")
            << "\n";
    }
    std::ofstream out(dir / "diagnose.json");
    out << reports.dump(2) << "\n";
    out.close();
    write_metadata(cfg, dir);
    return (check && !all_pass) ? kExitCheckFailed : kExitOk;
}

TargetLaw target_from_config(const Config& cfg) {
    if (cfg.raw.contains("target")) {
        const json& tj = cfg.raw["target"];
        const json& dj = tj.at("drift");
        const std::string kind = dj.at("kind").get<std::string>();
        DriftSpec drift;
        if (kind == "linear")
            drift = DriftSpec::linear(dj.at("c").get<double>());
        else if (kind == "monomial")
            drift = DriftSpec::monomial(dj.at("c").get<double>(), dj.at("k").get<int>());
        else
            throw ValidationError("target-table: unknown drift kind '" + kind + "'");
        Interval domain;
        if (tj.contains("domain")) {
            const auto& dom = tj["domain"];
            auto endpoint = [](const json& v, double fallback) {
                if (v.is_null()) return fallback;
                if (v.is_string()) {
                    const std::string s = v.get<std::string>();
                    if (s == "inf") return std::numeric_limits<double>::infinity();
                    if (s == "-inf") return -std::numeric_limits<double>::infinity();
                    throw ValidationError("target-table: bad domain endpoint '" + s + "'");
                }
                return v.get<double>();
            };
            domain.a = endpoint(dom.at(0), domain.a);
            domain.b = endpoint(dom.at(1), domain.b);
        }
        return build_target(drift, domain, tj.value("w0", 0.0));
    }
    if (cfg.raw.contains("model")) {
        if (cfg.n_grid.empty())
            throw ValidationError("target-table: n_grid required with a model spec");
        const ModelVariant model = make_model(cfg.raw.at("model"), cfg.n_grid.front());
        return std::visit([](const auto& m) { return m.target(); }, model);
    }
    throw ValidationError("target-table: provide either 'target' or 'model'");
}

int run_target_table(const Config& cfg, std::ostream& log) {
    const auto dir = prepare_out_dir(cfg);
    const TargetLaw law = target_from_config(cfg);
    std::ofstream csv(dir / "target_table.csv");
    csv << "y,G,p,F\n";
    for (const auto& row : law.table())
        csv << fmt17(row.y) << "," << fmt17(row.g_value) << "," << fmt17(row.p) << ","
            << fmt17(row.f) << "\n";
    csv.close();
    write_metadata(cfg, dir);
    log << "target table with c1=" << law.c1() << " written\n";
    return kExitOk;
}

}  // namespace

std::string config_hash_hex(const std::string& canonical_text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const unsigned char c : canonical_text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int run_experiment_json(const std::string& config_text, const RunOptions& opts,
                        std::ostream& log) {
    try {
        const Config cfg = parse_config(config_text, opts);
        if (cfg.mode == "rates") return run_rates(cfg, log, opts.check);
        if (cfg.mode == "bound") return run_bound(cfg, log, opts.check);
        if (cfg.mode == "diagnose") return run_diagnose(cfg, log, opts.check);
        if (cfg.mode == "target-table") return run_target_table(cfg, log);
        throw ValidationError("config: unknown mode '" + cfg.mode + "'");
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

int run_experiment_file(const std::string& config_path, const RunOptions& opts,
                        std::ostream& log) {
    std::ifstream in(config_path);
    if (!in) {
        log << "error: cannot open config " << config_path << "\n";
        return kExitValidation;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return run_experiment_json(text, opts, log);
}

}  // namespace steinpair
