// trlife: design and evaluate time-truncated single acceptance sampling plans
// for lots whose lifetimes follow the transmuted Rayleigh distribution, and
// fit that distribution to observed lifetime data.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trlife/fitting.hpp"
#include "trlife/monte_carlo.hpp"
#include "trlife/plan_tables.hpp"
#include "trlife/sampling_plan.hpp"
#include "trlife/tr_distribution.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputSpec {
    std::string format;
    std::string destination = "-";
    int precision = 7;
};

void add_output_options(CLI::App* cmd, OutputSpec& out,
                        const std::vector<std::string>& formats) {
    cmd->add_option("--format", out.format, "output format")
        ->check(CLI::IsMember(formats))
        ->capture_default_str();
    cmd->add_option("-o,--output", out.destination, "output file; '-' for stdout")
        ->capture_default_str();
    cmd->add_option("--precision", out.precision, "decimal digits in numeric output")
        ->check(CLI::Range(1, 15))
        ->capture_default_str();
}

void deliver(const OutputSpec& out, const std::string& payload) {
    if (out.destination == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream file(out.destination);
    if (!file) throw std::ios_base::failure("cannot open output file: " + out.destination);
    file << payload;
    file.flush();
    if (!file) throw std::ios_base::failure("write failed: " + out.destination);
}

std::string fmt(double v, int precision) { return trlife::format_number(v, precision); }

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> grid;
    std::istringstream in(csv);
    std::string token;
    while (std::getline(in, token, ',')) {
        try {
            grid.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw UsageError("--grid: bad number '" + token + "'");
        }
    }
    if (grid.empty()) throw UsageError("--grid: empty grid");
    return grid;
}

// ---------------------------------------------------------------------------
// design
// ---------------------------------------------------------------------------

struct DesignArgs {
    double p_star = 0.0;
    int c = 0;
    double lambda = 0.5;
    std::optional<double> t_ratio;
    std::optional<double> mu0;
    std::optional<double> test_time;
    OutputSpec out{.format = "text"};
};

int run_design(const DesignArgs& args) {
    if (args.t_ratio && args.test_time)
        throw UsageError("give either --tratio or --t, not both");
    if (!args.t_ratio && !args.test_time)
        throw UsageError("either --tratio or (--mu0 with --t) is required");
    if (args.test_time && !args.mu0) throw UsageError("--t requires --mu0");

    std::optional<double> sigma0;
    if (args.mu0) sigma0 = trlife::sigma_from_mu(*args.mu0, args.lambda);

    double t_ratio = 0.0;
    std::optional<double> abs_time;
    if (args.t_ratio) {
        t_ratio = *args.t_ratio;
        if (sigma0) abs_time = t_ratio * *sigma0;
    } else {
        if (!(*args.test_time > 0.0)) throw UsageError("--t must be positive");
        t_ratio = *args.test_time / *sigma0;
        abs_time = *args.test_time;
    }

    const trlife::SamplingPlan plan =
        trlife::min_sample_size(trlife::DesignQuery(args.p_star, args.c, t_ratio, args.lambda));
    const double p_fail = trlife::failure_prob(t_ratio, 1.0, args.lambda);

    const int prec = args.out.precision;
    if (args.out.format == "json") {
        nlohmann::json doc;
        doc["n"] = plan.n;
        doc["c"] = plan.c;
        doc["t_ratio"] = t_ratio;
        doc["p_star"] = args.p_star;
        doc["lambda"] = args.lambda;
        doc["p_fail"] = p_fail;
        if (args.mu0) doc["mu0"] = *args.mu0;
        if (sigma0) doc["sigma0"] = *sigma0;
        if (abs_time) doc["test_time"] = *abs_time;
        deliver(args.out, doc.dump(2) + "\n");
        return 0;
    }

    std::ostringstream text;
    text << "n        " << plan.n << "\n"
         << "c        " << plan.c << "\n"
         << "t_ratio  " << fmt(t_ratio, prec) << "\n"
         << "p_fail   " << fmt(p_fail, prec) << "\n";
    if (sigma0) text << "sigma0   " << fmt(*sigma0, prec) << "\n";
    if (abs_time) text << "time     " << fmt(*abs_time, prec) << "\n";
    text << "decision accept the lot if at most " << plan.c << " of " << plan.n
         << " units fail by time "
         << (abs_time ? fmt(*abs_time, prec) : fmt(t_ratio, prec) + " * sigma0") << "\n";
    deliver(args.out, text.str());
    return 0;
}

// ---------------------------------------------------------------------------
// tables
// ---------------------------------------------------------------------------

struct TablesArgs {
    int which = 0;
    double lambda = 0.5;
    std::string compare_path;
    OutputSpec out{.format = "csv"};
};

int run_tables(const TablesArgs& args) {
    const trlife::PlanTable table = trlife::emit_table(args.which, args.lambda);

    if (!args.compare_path.empty()) {
        std::ifstream ref(args.compare_path);
        if (!ref)
            throw std::ios_base::failure("cannot open reference file: " + args.compare_path);
        const auto diffs = trlife::compare_table_csv(table, ref);
        std::ostringstream text;
        for (const auto& d : diffs)
            text << "mismatch " << d.row_key << " col " << d.column << ": reference "
                 << fmt(d.reference, args.out.precision) << ", computed "
                 << fmt(d.computed, args.out.precision) << " (tolerance "
                 << fmt(d.tolerance, 3) << ")\n";
        const std::size_t cells = table.rows.size() * table.col_grid.size();
        text << diffs.size() << " mismatching cells of " << cells << "\n";
        deliver(args.out, text.str());
        return 0;
    }

    std::ostringstream body;
    if (args.out.format == "json")
        trlife::write_json(table, body);
    else
        trlife::write_csv(table, body, args.out.precision);
    deliver(args.out, body.str());
    return 0;
}

// ---------------------------------------------------------------------------
// oc / risk
// ---------------------------------------------------------------------------

struct CurveArgs {
    std::optional<int> n;
    int c = 0;
    std::optional<double> p_star;
    std::optional<double> t_ratio;
    std::optional<double> ratio;
    double lambda = 0.5;
    std::string curve;  // "", "scale", "tratio"
    std::string grid_csv;
    OutputSpec out{.format = "text"};
};

trlife::SamplingPlan resolve_plan(const CurveArgs& args, double t_ratio) {
    const double p_star = args.p_star.value_or(0.95);
    if (args.n) {
        if (*args.n <= args.c)
            throw UsageError("--n must exceed --c (a plan that cannot reject is degenerate)");
        return trlife::SamplingPlan(*args.n, args.c, t_ratio, p_star);
    }
    if (!args.p_star)
        throw UsageError("either --n or --pstar is required to determine the sample size");
    return trlife::min_sample_size(trlife::DesignQuery(p_star, args.c, t_ratio, args.lambda));
}

int run_oc_risk(const CurveArgs& args, bool risk_mode) {
    const char* value_label = risk_mode ? "producer_risk" : "prob_accept";
    const int prec = args.out.precision;

    if (args.curve.empty()) {
        if (!args.t_ratio) throw UsageError("--tratio is required");
        if (!args.ratio) throw UsageError("--ratio is required (or use --curve)");
        const trlife::SamplingPlan plan = resolve_plan(args, *args.t_ratio);
        const trlife::OCPoint point = trlife::oc_point(plan, *args.ratio, args.lambda);
        const double value = risk_mode ? 1.0 - point.prob_accept : point.prob_accept;
        if (args.out.format == "json") {
            nlohmann::json doc;
            doc["n"] = plan.n;
            doc["c"] = plan.c;
            doc["t_ratio"] = plan.t_ratio;
            doc["scale_ratio"] = point.scale_ratio;
            doc["lambda"] = args.lambda;
            doc["p_fail"] = point.p_fail;
            doc[value_label] = value;
            deliver(args.out, doc.dump(2) + "\n");
        } else {
            deliver(args.out, fmt(value, prec) + "\n");
        }
        return 0;
    }

    // Curve data in CSV form (text format falls through to CSV here).
    std::ostringstream body;
    if (args.curve == "scale") {
        if (!args.t_ratio) throw UsageError("--tratio is required for --curve scale");
        const trlife::SamplingPlan plan = resolve_plan(args, *args.t_ratio);
        std::vector<double> grid(trlife::kScaleRatioGrid.begin(),
                                 trlife::kScaleRatioGrid.end());
        if (!args.grid_csv.empty()) grid = parse_grid(args.grid_csv);
        body << "scale_ratio,n,p_fail," << value_label << "\n";
        for (const double r : grid) {
            const trlife::OCPoint point = trlife::oc_point(plan, r, args.lambda);
            const double value = risk_mode ? 1.0 - point.prob_accept : point.prob_accept;
            body << fmt(r, prec) << ',' << plan.n << ',' << fmt(point.p_fail, prec) << ','
                 << fmt(value, prec) << "\n";
        }
    } else {  // tratio
        if (!args.ratio) throw UsageError("--ratio is required for --curve tratio");
        std::vector<double> grid(trlife::kTRatioGrid.begin(), trlife::kTRatioGrid.end());
        if (!args.grid_csv.empty()) grid = parse_grid(args.grid_csv);
        body << "t_ratio,n,p_fail," << value_label << "\n";
        for (const double t : grid) {
            const trlife::SamplingPlan plan = resolve_plan(args, t);
            const trlife::OCPoint point = trlife::oc_point(plan, *args.ratio, args.lambda);
            const double value = risk_mode ? 1.0 - point.prob_accept : point.prob_accept;
            body << fmt(t, prec) << ',' << plan.n << ',' << fmt(point.p_fail, prec) << ','
                 << fmt(value, prec) << "\n";
        }
    }
    deliver(args.out, body.str());
    return 0;
}

// ---------------------------------------------------------------------------
// min-ratio
// ---------------------------------------------------------------------------

struct MinRatioArgs {
    double p_star = 0.0;
    int c = 0;
    double t_ratio = 0.0;
    double lambda = 0.5;
    double delta = 0.05;
    std::optional<int> n;
    OutputSpec out{.format = "text"};
};

int run_min_ratio(const MinRatioArgs& args) {
    const trlife::SamplingPlan plan =
        args.n ? trlife::SamplingPlan(*args.n, args.c, args.t_ratio, args.p_star)
               : trlife::min_sample_size(
                     trlife::DesignQuery(args.p_star, args.c, args.t_ratio, args.lambda));
    const double ratio = trlife::min_scale_ratio(plan, args.lambda, args.delta);

    if (args.out.format == "json") {
        nlohmann::json doc;
        doc["n"] = plan.n;
        doc["c"] = plan.c;
        doc["t_ratio"] = plan.t_ratio;
        doc["p_star"] = plan.p_star;
        doc["lambda"] = args.lambda;
        doc["delta"] = args.delta;
        doc["min_scale_ratio"] = ratio;
        deliver(args.out, doc.dump(2) + "\n");
    } else {
        std::ostringstream text;
        text << std::fixed << std::setprecision(2) << ratio << "\n";
        deliver(args.out, text.str());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
    std::string datafile;
    OutputSpec out{.format = "text"};
};

int run_fit(const FitArgs& args) {
    const trlife::LifetimeSample sample = trlife::read_lifetime_file(args.datafile);
    const trlife::DescriptiveStats stats = trlife::describe(sample);
    const trlife::FitResult fit = trlife::fit_mle(sample);
    const int prec = args.out.precision;

    if (args.out.format == "json") {
        nlohmann::json doc;
        doc["file"] = args.datafile;
        doc["n"] = sample.size();
        doc["data"] = {{"minimum", stats.minimum},   {"q1", stats.q1},
                       {"median", stats.median},     {"mean", stats.mean},
                       {"q3", stats.q3},             {"maximum", stats.maximum},
                       {"skewness", stats.skewness}, {"kurtosis", stats.kurtosis}};
        doc["fit"] = {{"sigma", fit.params.sigma}, {"lambda", fit.params.lambda},
                      {"loglik", fit.loglik},      {"aic", fit.aic},
                      {"bic", fit.bic},            {"ks_stat", fit.ks_stat},
                      {"ks_pvalue", fit.ks_pvalue}, {"converged", fit.converged}};
        deliver(args.out, doc.dump(2) + "\n");
        return 0;
    }
    if (args.out.format == "csv") {
        std::ostringstream body;
        body << "n,minimum,q1,median,mean,q3,maximum,skewness,kurtosis,"
                "sigma,lambda,loglik,aic,bic,ks_stat,ks_pvalue,converged\n";
        body << sample.size() << ',' << fmt(stats.minimum, prec) << ',' << fmt(stats.q1, prec)
             << ',' << fmt(stats.median, prec) << ',' << fmt(stats.mean, prec) << ','
             << fmt(stats.q3, prec) << ',' << fmt(stats.maximum, prec) << ','
             << fmt(stats.skewness, prec) << ',' << fmt(stats.kurtosis, prec) << ','
             << fmt(fit.params.sigma, prec) << ',' << fmt(fit.params.lambda, prec) << ','
             << fmt(fit.loglik, prec) << ',' << fmt(fit.aic, prec) << ',' << fmt(fit.bic, prec)
             << ',' << fmt(fit.ks_stat, prec) << ',' << fmt(fit.ks_pvalue, prec) << ','
             << (fit.converged ? 1 : 0) << "\n";
        deliver(args.out, body.str());
        return 0;
    }

    std::ostringstream text;
    text << "observations  " << sample.size() << "\n"
         << "minimum       " << fmt(stats.minimum, prec) << "\n"
         << "q1            " << fmt(stats.q1, prec) << "\n"
         << "median        " << fmt(stats.median, prec) << "\n"
         << "mean          " << fmt(stats.mean, prec) << "\n"
         << "q3            " << fmt(stats.q3, prec) << "\n"
         << "maximum       " << fmt(stats.maximum, prec) << "\n"
         << "skewness      " << fmt(stats.skewness, prec) << "\n"
         << "kurtosis      " << fmt(stats.kurtosis, prec) << "\n"
         << "sigma         " << fmt(fit.params.sigma, prec) << "\n"
         << "lambda        " << fmt(fit.params.lambda, prec) << "\n"
         << "loglik        " << fmt(fit.loglik, prec) << "\n"
         << "aic           " << fmt(fit.aic, prec) << "\n"
         << "bic           " << fmt(fit.bic, prec) << "\n"
         << "ks_stat       " << fmt(fit.ks_stat, prec) << "\n"
         << "ks_pvalue     " << fmt(fit.ks_pvalue, prec) << "\n"
         << "converged     " << (fit.converged ? "yes" : "no") << "\n";
    deliver(args.out, text.str());
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    int n = 0;
    int c = 0;
    double t_ratio = 0.0;
    double ratio = 0.0;
    double lambda = 0.5;
    double p_star = 0.95;
    double spec_sigma = 1.0;
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    OutputSpec out{.format = "text"};
};

int run_simulate(const SimulateArgs& args) {
    if (args.n <= args.c)
        throw UsageError("--n must exceed --c (a plan that cannot reject is degenerate)");
    const trlife::SamplingPlan plan(args.n, args.c, args.t_ratio, args.p_star);
    const trlife::TRParams true_params(args.ratio * args.spec_sigma, args.lambda);
    const trlife::SimulationReport report =
        trlife::simulate_plan(plan, true_params, args.spec_sigma, args.trials, args.seed);
    const int prec = args.out.precision;

    if (args.out.format == "json") {
        nlohmann::json doc = nlohmann::json::parse(trlife::to_json_string(report));
        doc["n"] = plan.n;
        doc["c"] = plan.c;
        doc["t_ratio"] = plan.t_ratio;
        doc["scale_ratio"] = args.ratio;
        doc["lambda"] = args.lambda;
        doc["seed"] = args.seed;
        deliver(args.out, doc.dump(2) + "\n");
        return 0;
    }
    std::ostringstream text;
    text << "trials       " << report.trials << "\n"
         << "acceptances  " << report.acceptances << "\n"
         << "estimate     " << fmt(report.estimate, prec) << "\n"
         << "std_error    " << fmt(report.std_error, prec) << "\n"
         << "analytic     " << fmt(report.analytic, prec) << "\n"
         << "z_score      " << fmt(report.z_score, prec) << "\n";
    deliver(args.out, text.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance sampling plans for transmuted Rayleigh lifetimes"};
    app.require_subcommand(1);

    DesignArgs design;
    auto* design_cmd = app.add_subcommand(
        "design", "Find the minimum sample size for a truncated life test");
    design_cmd->add_option("--pstar", design.p_star, "consumer confidence, in (0,1)")
        ->required();
    design_cmd->add_option("--c", design.c, "acceptance number")->required();
    design_cmd->add_option("--lambda", design.lambda, "transmutation parameter")
        ->capture_default_str();
    design_cmd->add_option("--tratio", design.t_ratio, "test duration over sigma0");
    design_cmd->add_option("--mu0", design.mu0, "specified mean lifetime");
    design_cmd->add_option("--t", design.test_time,
                           "absolute test duration (requires --mu0)");
    add_output_options(design_cmd, design.out, {"text", "json"});

    TablesArgs tables;
    auto* tables_cmd =
        app.add_subcommand("tables", "Reproduce a full design table over the standard grids");
    tables_cmd->add_option("--which", tables.which, "table index, 1..4")->required();
    tables_cmd->add_option("--lambda", tables.lambda, "transmutation parameter")
        ->capture_default_str();
    tables_cmd->add_option("--compare", tables.compare_path,
                           "CSV to compare against; prints per-cell mismatches");
    add_output_options(tables_cmd, tables.out, {"csv", "json"});

    CurveArgs oc;
    auto* oc_cmd = app.add_subcommand("oc", "Operating characteristic values and curves");
    oc_cmd->add_option("--n", oc.n, "sample size (designed from --pstar when omitted)");
    oc_cmd->add_option("--c", oc.c, "acceptance number")->required();
    oc_cmd->add_option("--pstar", oc.p_star, "consumer confidence for plan design");
    oc_cmd->add_option("--tratio", oc.t_ratio, "test duration over sigma0");
    oc_cmd->add_option("--ratio", oc.ratio, "quality ratio sigma/sigma0");
    oc_cmd->add_option("--lambda", oc.lambda, "transmutation parameter")
        ->capture_default_str();
    oc_cmd->add_option("--curve", oc.curve, "emit a series over 'scale' or 'tratio'")
        ->check(CLI::IsMember({"scale", "tratio"}));
    oc_cmd->add_option("--grid", oc.grid_csv, "comma-separated curve grid override");
    add_output_options(oc_cmd, oc.out, {"text", "csv", "json"});

    CurveArgs risk;
    auto* risk_cmd = app.add_subcommand("risk", "Producer's risk values and curves");
    risk_cmd->add_option("--n", risk.n, "sample size (designed from --pstar when omitted)");
    risk_cmd->add_option("--c", risk.c, "acceptance number")->required();
    risk_cmd->add_option("--pstar", risk.p_star, "consumer confidence for plan design");
    risk_cmd->add_option("--tratio", risk.t_ratio, "test duration over sigma0");
    risk_cmd->add_option("--ratio", risk.ratio, "quality ratio sigma/sigma0");
    risk_cmd->add_option("--lambda", risk.lambda, "transmutation parameter")
        ->capture_default_str();
    risk_cmd->add_option("--curve", risk.curve, "emit a series over 'scale' or 'tratio'")
        ->check(CLI::IsMember({"scale", "tratio"}));
    risk_cmd->add_option("--grid", risk.grid_csv, "comma-separated curve grid override");
    add_output_options(risk_cmd, risk.out, {"text", "csv", "json"});

    MinRatioArgs min_ratio;
    auto* min_ratio_cmd = app.add_subcommand(
        "min-ratio", "Smallest quality ratio with producer's risk at most delta");
    min_ratio_cmd->add_option("--pstar", min_ratio.p_star, "consumer confidence")->required();
    min_ratio_cmd->add_option("--c", min_ratio.c, "acceptance number")->required();
    min_ratio_cmd->add_option("--tratio", min_ratio.t_ratio, "test duration over sigma0")
        ->required();
    min_ratio_cmd->add_option("--lambda", min_ratio.lambda, "transmutation parameter")
        ->capture_default_str();
    min_ratio_cmd->add_option("--delta", min_ratio.delta, "producer's risk bound")
        ->capture_default_str();
    min_ratio_cmd->add_option("--n", min_ratio.n, "sample size override");
    add_output_options(min_ratio_cmd, min_ratio.out, {"text", "json"});

    FitArgs fit;
    auto* fit_cmd =
        app.add_subcommand("fit", "Fit the lifetime model to a data file by maximum likelihood");
    fit_cmd->add_option("datafile", fit.datafile, "one observation per line; '#' comments")
        ->required();
    add_output_options(fit_cmd, fit.out, {"text", "csv", "json"});

    SimulateArgs simulate;
    auto* simulate_cmd = app.add_subcommand(
        "simulate", "Monte-Carlo estimate of the lot acceptance probability");
    simulate_cmd->add_option("--n", simulate.n, "sample size")->required();
    simulate_cmd->add_option("--c", simulate.c, "acceptance number")->required();
    simulate_cmd->add_option("--tratio", simulate.t_ratio, "test duration over sigma0")
        ->required();
    simulate_cmd->add_option("--ratio", simulate.ratio, "true quality ratio sigma/sigma0")
        ->required();
    simulate_cmd->add_option("--lambda", simulate.lambda, "transmutation parameter")
        ->capture_default_str();
    simulate_cmd->add_option("--pstar", simulate.p_star, "confidence recorded on the plan")
        ->capture_default_str();
    simulate_cmd->add_option("--spec-sigma", simulate.spec_sigma, "specified scale sigma0")
        ->capture_default_str();
    simulate_cmd->add_option("--trials", simulate.trials, "number of simulated lots")
        ->capture_default_str();
    simulate_cmd->add_option("--seed", simulate.seed, "random seed")->capture_default_str();
    add_output_options(simulate_cmd, simulate.out, {"text", "json"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*design_cmd) return run_design(design);
        if (*tables_cmd) return run_tables(tables);
        if (*oc_cmd) return run_oc_risk(oc, false);
        if (*risk_cmd) return run_oc_risk(risk, true);
        if (*min_ratio_cmd) return run_min_ratio(min_ratio);
        if (*fit_cmd) return run_fit(fit);
        if (*simulate_cmd) return run_simulate(simulate);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const trlife::DataFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
