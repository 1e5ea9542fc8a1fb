// volalab: day-of-week return descriptives and GARCH-family QML estimation.
//
// Exit codes: 0 success; 1 usage/config error; 2 data error; 3 estimation
// error; 4 at least one fit failed to converge; 5 output I/O error.

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "volalab/csv.hpp"
#include "volalab/errors.hpp"
#include "volalab/estimate.hpp"
#include "volalab/panel.hpp"
#include "volalab/report.hpp"
#include "volalab/series.hpp"
#include "volalab/simulate.hpp"
#include "volalab/stats.hpp"

namespace {

using namespace volalab;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitNonConvergence = 4;
constexpr int kExitIo = 5;

struct CommonOptions {
    std::string prices;
    std::string market_prices;
    std::string factors;
    std::string method = "log";
    std::string family = "all";
    std::string start;
    std::string end;
    std::string split;
    int lags = 1;
    std::string variance_regressors = "none";
    std::string out = ".";
    std::uint64_t seed = 20150107;
    std::string factor_units = "percent";
    std::string config_path;
};

// Flat key=value config support: every key names a CLI flag of the same
// subcommand; a flag given on the command line wins over the file.
class ConfigBinder {
  public:
    void bind(CLI::Option* opt, const std::string& key, std::string* target) {
        entries_[key] = {opt, [target](const std::string& v) { *target = v; }};
    }
    void bind(CLI::Option* opt, const std::string& key, int* target) {
        entries_[key] = {opt, [target](const std::string& v) { *target = std::stoi(v); }};
    }
    void bind(CLI::Option* opt, const std::string& key, std::uint64_t* target) {
        entries_[key] = {opt, [target](const std::string& v) { *target = std::stoull(v); }};
    }

    void apply(const std::map<std::string, std::string>& kv) const {
        for (const auto& [key, value] : kv) {
            const auto it = entries_.find(key);
            if (it == entries_.end()) {
                throw CLI::ValidationError("config: unknown key '" + key + "'");
            }
            if (it->second.opt->count() > 0) continue;  // flag overrides file
            it->second.apply(value);
        }
    }

  private:
    struct Entry {
        CLI::Option* opt;
        std::function<void(const std::string&)> apply;
    };
    std::map<std::string, Entry> entries_;
};

void add_input_flags(CLI::App* cmd, CommonOptions& opt, ConfigBinder& binder,
                     bool need_factors) {
    binder.bind(cmd->add_option("--prices", opt.prices, "dependent index price CSV (date,close)"),
                "prices", &opt.prices);
    binder.bind(cmd->add_option("--market-prices", opt.market_prices, "market index price CSV"),
                "market-prices", &opt.market_prices);
    if (need_factors) {
        binder.bind(cmd->add_option("--factors", opt.factors,
                                    "factor CSV (date,mkt_rf,smb,hml,umd,rf)"),
                    "factors", &opt.factors);
        binder.bind(cmd->add_option("--factor-units", opt.factor_units, "percent|decimal")
                        ->check(CLI::IsMember({"percent", "decimal"})),
                    "factor-units", &opt.factor_units);
    }
    binder.bind(cmd->add_option("--method", opt.method, "return definition: simple|log")
                    ->check(CLI::IsMember({"simple", "log"})),
                "method", &opt.method);
    binder.bind(cmd->add_option("--start", opt.start, "first date to keep (YYYY-MM-DD)"),
                "start", &opt.start);
    binder.bind(cmd->add_option("--end", opt.end, "last date to keep (YYYY-MM-DD)"), "end",
                &opt.end);
    binder.bind(cmd->add_option("--split", opt.split,
                                "pre/post cutoff date; cutoff day lands in pre"),
                "split", &opt.split);
    binder.bind(cmd->add_option("--out", opt.out, "output directory"), "out", &opt.out);
    cmd->add_option("--config", opt.config_path, "flat key=value config; flags override");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write " + path);
    out << content;
}

Date parse_flag_date(const std::string& text, const char* flag) {
    try {
        return Date::parse(text);
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError(std::string(flag) + ": " + e.what());
    }
}

struct LoadedReturns {
    ReturnSeries dep;
    ReturnSeries market;
    std::string dep_name;
    std::string market_name;
};

LoadedReturns load_returns(const CommonOptions& opt) {
    if (opt.prices.empty() || opt.market_prices.empty()) {
        throw CLI::ValidationError("--prices and --market-prices are required");
    }
    LoadedReturns lr;
    const ReturnMethod method = parse_return_method(opt.method);
    lr.dep = compute_returns(load_price_csv(opt.prices), method);
    lr.market = compute_returns(load_price_csv(opt.market_prices), method);
    lr.dep_name = std::filesystem::path(opt.prices).stem().string();
    lr.market_name = std::filesystem::path(opt.market_prices).stem().string();
    if (lr.market_name == lr.dep_name) lr.market_name += "_market";
    return lr;
}

DateRange effective_range(const CommonOptions& opt, const std::vector<Date>& dates) {
    DateRange r{dates.front(), dates.back()};
    if (!opt.start.empty()) r.start = parse_flag_date(opt.start, "--start");
    if (!opt.end.empty()) r.end = parse_flag_date(opt.end, "--end");
    if (r.end < r.start) throw CLI::ValidationError("--start must not exceed --end");
    return r;
}

// ---------------------------------------------------------------- describe
int run_describe(const CommonOptions& opt) {
    const LoadedReturns lr = load_returns(opt);
    const DataTable joined = align({to_table(lr.dep, "a"), to_table(lr.market, "b")});
    const DateRange full = effective_range(opt, joined.dates);

    std::vector<PeriodStats> periods;
    auto add_period = [&](const std::string& label, DateRange range) {
        PeriodStats ps;
        ps.label = label;
        ps.start = range.start;
        ps.end = range.end;
        ps.rows = weekday_summary(lr.dep, lr.market, range);
        periods.push_back(std::move(ps));
    };
    add_period("full", full);
    if (!opt.split.empty()) {
        const Date cut = parse_flag_date(opt.split, "--split");
        if (cut < full.start || full.end < cut) {
            throw CutoffOutOfRange("--split outside the analysis period");
        }
        add_period("pre", {full.start, cut});
        add_period("post", {cut + 1, full.end});
    }

    const std::string text = describe_text(periods, lr.dep_name, lr.market_name);
    std::cout << text;
    std::filesystem::create_directories(opt.out);
    write_text_file(opt.out + "/describe.txt", text);
    write_text_file(opt.out + "/describe.csv", describe_csv(periods));
    return kExitOk;
}

// --------------------------------------------------------------------- fit
std::vector<Family> families_from_flag(const std::string& flag) {
    if (flag == "all") return {Family::garch, Family::egarch, Family::gjr};
    return {parse_family(flag)};
}

int fit_grid_threads(std::size_t cells) {
    int cap = omp_get_max_threads();
    if (const char* env = std::getenv("VOLALAB_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) cap = std::min(cap, v);
    }
    return std::max(1, std::min<int>(cap, static_cast<int>(cells)));
}

int run_fit(const CommonOptions& opt) {
    if (opt.factors.empty()) throw CLI::ValidationError("--factors is required");
    const LoadedReturns lr = load_returns(opt);
    const Units units = opt.factor_units == "percent" ? Units::percent : Units::decimal;
    const FactorTable factors = load_factor_csv(opt.factors, units);

    const DataTable joined =
        align({to_table(lr.dep, "y"), to_table(factors)});
    ReturnPanel panel = build_panel(joined, opt.lags);
    const DateRange range = effective_range(opt, panel.dates);
    panel = clip_period(panel, range.start, range.end);

    struct Cell {
        Family family;
        FitReportMeta meta;
        const ReturnPanel* panel;
    };
    std::vector<ReturnPanel> period_panels;
    std::vector<std::string> period_labels;
    period_panels.push_back(panel);
    period_labels.push_back("full");
    if (!opt.split.empty()) {
        const Date cut = parse_flag_date(opt.split, "--split");
        const auto [pre, post] = split_period(panel, cut);
        period_panels.push_back(pre);
        period_labels.push_back("pre");
        period_panels.push_back(post);
        period_labels.push_back("post");
    }

    std::vector<Cell> grid;
    for (const Family family : families_from_flag(opt.family)) {
        for (std::size_t p = 0; p < period_panels.size(); ++p) {
            Cell cell;
            cell.family = family;
            cell.meta.period_label = period_labels[p];
            cell.meta.start = period_panels[p].dates.front();
            cell.meta.end = period_panels[p].dates.back();
            cell.panel = &period_panels[p];
            grid.push_back(cell);
        }
    }

    std::vector<FitResult> results(grid.size());
    std::vector<std::exception_ptr> failures(grid.size());
    const int threads = fit_grid_threads(grid.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            ModelSpec spec;
            spec.family = grid[i].family;
            spec.lag_order = opt.lags;
            spec.variance_regressors = opt.variance_regressors == "all";
            OptimizerOptions opts;
            opts.seed = opt.seed;
            results[i] = fit(*grid[i].panel, spec, opts);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (failures[i]) std::rethrow_exception(failures[i]);
    }

    std::filesystem::create_directories(opt.out);
    bool all_converged = true;
    std::vector<std::pair<FitReportMeta, const FitResult*>> summary;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::string stem =
            "fit_" + to_string(grid[i].family) + "_" + grid[i].meta.period_label;
        const std::string text = fit_text(results[i], grid[i].meta);
        std::cout << text << '\n';
        write_text_file(opt.out + "/" + stem + ".txt", text);
        write_text_file(opt.out + "/" + stem + ".csv", fit_csv(results[i]));
        summary.emplace_back(grid[i].meta, &results[i]);
        all_converged = all_converged && results[i].converged;
    }
    write_text_file(opt.out + "/fits_summary.csv", fits_summary_csv(summary));
    return all_converged ? kExitOk : kExitNonConvergence;
}

// ---------------------------------------------------------------- plotdata
int run_plotdata(const CommonOptions& opt) {
    if (opt.prices.empty() || opt.market_prices.empty()) {
        throw CLI::ValidationError("--prices and --market-prices are required");
    }
    const PriceSeries dep = load_price_csv(opt.prices);
    const PriceSeries market = load_price_csv(opt.market_prices);
    const ReturnMethod method = parse_return_method(opt.method);
    const std::string dep_name = std::filesystem::path(opt.prices).stem().string();
    std::string market_name = std::filesystem::path(opt.market_prices).stem().string();
    if (market_name == dep_name) market_name += "_market";

    std::filesystem::create_directories(opt.out);
    write_text_file(opt.out + "/returns_" + dep_name + ".csv",
                    returns_csv(compute_returns(dep, method)));
    write_text_file(opt.out + "/returns_" + market_name + ".csv",
                    returns_csv(compute_returns(market, method)));
    write_text_file(opt.out + "/prices_compare.csv", prices_compare_csv(dep, market));
    return kExitOk;
}

// ---------------------------------------------------------------- simulate
std::map<std::string, std::string> read_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EmptyFile("cannot open sim config: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto is_space = [](char c) { return c == ' ' || c == '\t'; };
        line.erase(line.begin(), std::find_if_not(line.begin(), line.end(), is_space));
        while (!line.empty() && is_space(line.back())) line.pop_back();
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw MalformedRow(path, line_no, "expected key=value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && is_space(key.back())) key.pop_back();
        value.erase(value.begin(), std::find_if_not(value.begin(), value.end(), is_space));
        kv[key] = value;
    }
    return kv;
}

SimulationConfig sim_config_from_file(const std::string& path) {
    SimulationConfig cfg;
    cfg.factors = FactorSimConfig{};
    // Documented defaults: daily-return scale GARCH(1,1).
    cfg.mean.intercept = 2e-4;
    cfg.variance.vc = 5e-7;
    cfg.variance.va = 0.90;
    cfg.variance.vb = 0.05;
    if (path.empty()) return cfg;
    const auto kv = read_key_value_file(path);

    auto num = [&](const char* key, double fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : std::stod(it->second);
    };
    auto has = [&](const char* key) { return kv.count(key) > 0; };

    if (has("family")) cfg.family = parse_family(kv.at("family"));
    cfg.n = static_cast<int>(num("n", cfg.n));
    cfg.burn_in = static_cast<int>(num("burn_in", cfg.burn_in));
    cfg.seed = static_cast<std::uint64_t>(num("seed", static_cast<double>(cfg.seed)));
    if (has("start_date")) cfg.start_date = Date::parse(kv.at("start_date"));

    cfg.mean.intercept = num("intercept", cfg.mean.intercept);
    cfg.mean.weekday[0] = num("tue", 0.0);
    cfg.mean.weekday[1] = num("wed", 0.0);
    cfg.mean.weekday[2] = num("thu", 0.0);
    cfg.mean.weekday[3] = num("fri", 0.0);
    cfg.mean.rf = num("rf", 0.0);
    cfg.mean.mkt_rf = num("mkt_rf", 0.0);
    cfg.mean.smb = num("smb", 0.0);
    cfg.mean.hml = num("hml", 0.0);
    cfg.mean.umd = num("umd", 0.0);
    for (int i = 1; has(("lag" + std::to_string(i)).c_str()); ++i) {
        cfg.mean.ylag.push_back(std::stod(kv.at("lag" + std::to_string(i))));
    }
    if (has("qlag")) cfg.mean.qlag = std::stod(kv.at("qlag"));

    cfg.variance.vc = num("vc", cfg.variance.vc);
    cfg.variance.va = num("va", cfg.variance.va);
    cfg.variance.vb = num("vb", cfg.variance.vb);
    cfg.variance.gamma = num("gamma", cfg.variance.gamma);

    if (has("wd_mon") || has("wd_tue") || has("wd_wed") || has("wd_thu") || has("wd_fri")) {
        cfg.weekday_effect = {num("wd_mon", 0.0), num("wd_tue", 0.0), num("wd_wed", 0.0),
                              num("wd_thu", 0.0), num("wd_fri", 0.0)};
    }

    FactorSimConfig fc;
    fc.mkt_mean = num("mkt_mean", fc.mkt_mean);
    fc.mkt_sd = num("mkt_sd", fc.mkt_sd);
    fc.smb_sd = num("smb_sd", fc.smb_sd);
    fc.hml_sd = num("hml_sd", fc.hml_sd);
    fc.umd_sd = num("umd_sd", fc.umd_sd);
    fc.smb_on_mkt = num("smb_on_mkt", fc.smb_on_mkt);
    fc.hml_on_mkt = num("hml_on_mkt", fc.hml_on_mkt);
    fc.umd_on_mkt = num("umd_on_mkt", fc.umd_on_mkt);
    fc.rf_level = num("rf_level", fc.rf_level);
    fc.rf_sd = num("rf_sd", fc.rf_sd);
    cfg.factors = fc;
    return cfg;
}

int run_simulate(const std::string& sim_config_path, const std::string& out,
                 std::optional<std::uint64_t> seed_override) {
    SimulationConfig cfg = sim_config_from_file(sim_config_path);
    if (seed_override.has_value()) cfg.seed = *seed_override;

    const SimulationResult sim = simulate(cfg);
    const EmittedPanel files = emit_panel(sim.panel);

    std::filesystem::create_directories(out);
    write_price_csv(out + "/sim_prices.csv", files.prices);
    write_price_csv(out + "/sim_market_prices.csv", files.market_prices);
    write_factor_csv(out + "/sim_factors.csv", files.factors);

    std::ostringstream truth;
    truth << "rng=" << sim.rng_algorithm << "\n"
          << "family=" << to_string(cfg.family) << "\n"
          << "n=" << cfg.n << "\nburn_in=" << cfg.burn_in << "\nseed=" << cfg.seed << "\n"
          << "start_date=" << cfg.start_date.to_string() << "\n"
          << "intercept=" << format_double(cfg.mean.intercept) << "\n"
          << "vc=" << format_double(cfg.variance.vc) << "\n"
          << "va=" << format_double(cfg.variance.va) << "\n"
          << "vb=" << format_double(cfg.variance.vb) << "\n"
          << "gamma=" << format_double(cfg.variance.gamma) << "\n"
          << "factor_units=decimal\n";
    std::cout << truth.str();
    write_text_file(out + "/sim_truth.txt", truth.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"day-of-week return analysis under GARCH-family variance models"};
    app.require_subcommand(1);

    CommonOptions d_opt;
    ConfigBinder d_binder;
    CLI::App* d = app.add_subcommand("describe", "per-weekday stats and t-tests (Table-1 layout)");
    add_input_flags(d, d_opt, d_binder, false);

    CommonOptions f_opt;
    ConfigBinder f_binder;
    CLI::App* f = app.add_subcommand("fit", "QML fits per family and period (Table-2/4 layout)");
    add_input_flags(f, f_opt, f_binder, true);
    f_binder.bind(f->add_option("--family", f_opt.family, "garch|egarch|gjr|all")
                      ->check(CLI::IsMember({"garch", "egarch", "gjr", "all"})),
                  "family", &f_opt.family);
    f_binder.bind(f->add_option("--lags", f_opt.lags, "lagged dependent terms in the mean equation")
                      ->check(CLI::NonNegativeNumber),
                  "lags", &f_opt.lags);
    f_binder.bind(f->add_option("--variance-regressors", f_opt.variance_regressors,
                                "none|all exogenous terms in the variance equation")
                      ->check(CLI::IsMember({"none", "all"})),
                  "variance-regressors", &f_opt.variance_regressors);
    f_binder.bind(f->add_option("--seed", f_opt.seed, "multistart jitter seed"), "seed",
                  &f_opt.seed);

    CommonOptions p_opt;
    ConfigBinder p_binder;
    CLI::App* p = app.add_subcommand("plotdata", "daily returns and closing-price comparison CSVs");
    add_input_flags(p, p_opt, p_binder, false);

    std::string sim_config_path;
    std::string sim_out = ".";
    std::uint64_t sim_seed = 0;
    std::string sim_run_config;
    ConfigBinder s_binder;
    CLI::App* s = app.add_subcommand("simulate", "generate a synthetic panel with known parameters");
    s_binder.bind(s->add_option("--sim-config", sim_config_path,
                                "key=value simulation parameter file"),
                  "sim-config", &sim_config_path);
    s_binder.bind(s->add_option("--out", sim_out, "output directory"), "out", &sim_out);
    CLI::Option* seed_opt = s->add_option("--seed", sim_seed, "overrides the config seed");
    s_binder.bind(seed_opt, "seed", &sim_seed);
    s->add_option("--config", sim_run_config, "flat key=value config; flags override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        auto apply_config = [](const ConfigBinder& binder, const std::string& path) {
            if (!path.empty()) binder.apply(read_key_value_file(path));
        };
        if (d->parsed()) {
            apply_config(d_binder, d_opt.config_path);
            return run_describe(d_opt);
        }
        if (f->parsed()) {
            apply_config(f_binder, f_opt.config_path);
            return run_fit(f_opt);
        }
        if (p->parsed()) {
            apply_config(p_binder, p_opt.config_path);
            return run_plotdata(p_opt);
        }
        if (s->parsed()) {
            const bool seed_from_flag = seed_opt->count() > 0;
            bool seed_from_config = false;
            if (!sim_run_config.empty()) {
                const auto kv = read_key_value_file(sim_run_config);
                seed_from_config = kv.count("seed") > 0;
                s_binder.apply(kv);
            }
            std::optional<std::uint64_t> seed;
            if (seed_from_flag || seed_from_config) seed = sim_seed;
            return run_simulate(sim_config_path, sim_out, seed);
        }
    } catch (const MalformedRow& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const RankDeficient& e) {
        std::cerr << "estimation error: " << e.what() << '\n';
        return kExitEstimation;
    } catch (const ConstraintViolation& e) {
        std::cerr << "estimation error: " << e.what() << '\n';
        return kExitEstimation;
    } catch (const NonPositiveVariance& e) {
        std::cerr << "estimation error: " << e.what() << '\n';
        return kExitEstimation;
    } catch (const SingularHessian& e) {
        std::cerr << "estimation error: " << e.what() << '\n';
        return kExitEstimation;
    } catch (const DegenerateSample& e) {
        std::cerr << "estimation error: " << e.what() << '\n';
        return kExitEstimation;
    } catch (const DimensionMismatch& e) {
        std::cerr << "estimation error: " << e.what() << '\n';
        return kExitEstimation;
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitEstimation;
    }
    return kExitUsage;
}
