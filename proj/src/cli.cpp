#include "eigenmarket/cli.hpp"

#include "eigenmarket/corrcore.hpp"
#include "eigenmarket/eigenanalysis.hpp"
#include "eigenmarket/error.hpp"
#include "eigenmarket/ingest.hpp"
#include "eigenmarket/marketmode.hpp"
#include "eigenmarket/returns.hpp"
#include "eigenmarket/spectrum.hpp"
#include "eigenmarket/svg.hpp"
#include "eigenmarket/synth.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace eigenmarket::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return kMissingInput;
        case ErrorKind::Domain: return kDomainError;
        case ErrorKind::Parse:
        case ErrorKind::Integrity: return kParseError;
        case ErrorKind::Parameter:
        case ErrorKind::Specification: return kParameterError;
        case ErrorKind::Numerical: return kNumericalError;
    }
    return kFailure;
}

json error_json(const Error& e) {
    return json{{"module", e.module()}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
}

/// Writes files into one directory and remembers their names.
class Writer {
public:
    Writer(fs::path dir, NumberFormat fmt) : dir_(std::move(dir)), fmt_(fmt) {}

    const NumberFormat& fmt() const { return fmt_; }

    /// Rounds to the output precision so JSON agrees with the CSV artifacts.
    double num(double v) const {
        if (fmt_.full_precision || !std::isfinite(v)) return v;
        return std::stod(format_significant(v, 6));
    }
    json opt(const std::optional<double>& v) const { return v ? json(num(*v)) : json(nullptr); }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cli", "cannot write '" + (dir_ / name).string() + "'");
        body(out);
        if (!out) throw Error(ErrorKind::Io, "cli", "failed writing '" + (dir_ / name).string() + "'");
        written_.push_back(name);
    }
    void text(const std::string& name, const std::string& content) {
        write(name, [&](std::ostream& os) { os << content; });
    }
    void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

    const std::vector<std::string>& written() const { return written_; }

private:
    fs::path dir_;
    NumberFormat fmt_;
    std::vector<std::string> written_;
};

/// Lazily evaluated pipeline stages; each stage is computed at most once.
class Pipeline {
public:
    explicit Pipeline(const RunConfig& cfg) : cfg_(cfg) {}

    const RunConfig& config() const { return cfg_; }

    const PricePanel& filled() {
        if (!filled_) {
            PricePanel raw = load_panel(cfg_.input);
            if (cfg_.meta) raw = attach_metadata(raw, load_metadata(*cfg_.meta));
            filled_ = align_and_fill(raw);
            observed_ = raw.count(FillFlag::Observed);
        }
        return *filled_;
    }

    std::size_t observed_cells() {
        filled();
        return observed_;
    }

    const ExclusionCalendar& calendar() {
        if (!calendar_) calendar_ = cfg_.exclusions ? load_exclusions(*cfg_.exclusions) : ExclusionCalendar{};
        return *calendar_;
    }

    const ExclusionResult& trimmed() {
        if (!trimmed_) {
            trimmed_ = apply_exclusions(filled(), calendar());
            for (const Date& d : trimmed_->ignored) {
                warnings.push_back("exclusion date " + d.iso() + " is not in the panel; ignored");
            }
        }
        return *trimmed_;
    }

    const ReturnPanel& returns() {
        if (!returns_) {
            trimmed();
            returns_ = compute_returns(filled(), calendar());
        }
        return *returns_;
    }

    const CorrelationMatrix& corr() {
        if (!corr_) corr_ = correlate(returns());
        return *corr_;
    }

    const SpectralDecomposition& spectrum() {
        if (!spectrum_) spectrum_ = decompose(corr());
        return *spectrum_;
    }

    MarchenkoPasturLaw law() { return mp_law(corr().size(), returns().observation_count()); }

    const Eigenportfolio& market_portfolio() {
        if (!market_) market_ = eigenportfolio(spectrum(), returns(), 1);
        return *market_;
    }

    const MarketModeRemoval& removal() {
        if (!removal_) {
            removal_ = remove_market_mode(returns(), market_portfolio().returns);
            for (const auto& m : removal_->excluded) {
                warnings.push_back("instrument " + m.label.str() +
                                   " is fitted exactly by the market factor; excluded from the residual matrix");
            }
        }
        return *removal_;
    }

    double index_base() {
        if (cfg_.base == "auto") return average_price(trimmed().panel).front();
        try {
            std::size_t used = 0;
            const double v = std::stod(cfg_.base, &used);
            if (used != cfg_.base.size()) throw std::invalid_argument(cfg_.base);
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parameter, "cli", "--base must be a positive number or 'auto', got '" + cfg_.base + "'");
        }
    }

    std::vector<std::string> warnings;

private:
    RunConfig cfg_;
    std::optional<PricePanel> filled_;
    std::size_t observed_ = 0;
    std::optional<ExclusionCalendar> calendar_;
    std::optional<ExclusionResult> trimmed_;
    std::optional<ReturnPanel> returns_;
    std::optional<CorrelationMatrix> corr_;
    std::optional<SpectralDecomposition> spectrum_;
    std::optional<Eigenportfolio> market_;
    std::optional<MarketModeRemoval> removal_;
};

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> day_index(std::size_t count, std::size_t offset = 0) {
    std::vector<double> x(count);
    for (std::size_t i = 0; i < count; ++i) x[i] = static_cast<double>(i + offset);
    return x;
}

// ---- per-subcommand artifact emitters --------------------------------------

void emit_ingest(Pipeline& p, Writer& w) {
    const auto& panel = p.trimmed().panel;
    w.write("panel_filled.csv", [&](std::ostream& os) { write_panel_csv(os, panel, w.fmt()); });
    w.write("fill_flags.csv", [&](std::ostream& os) { write_flags_csv(os, panel); });
    w.json_file("ingest.json", json{{"instruments", panel.instrument_count()},
                                    {"dates", panel.date_count()},
                                    {"observed_cells_raw", p.observed_cells()},
                                    {"observed", panel.count(FillFlag::Observed)},
                                    {"backfilled_from_listing", panel.count(FillFlag::BackfilledFromListing)},
                                    {"forward_filled", panel.count(FillFlag::ForwardFilled)},
                                    {"excluded_dates", p.filled().date_count() - panel.date_count()},
                                    {"warnings", p.warnings}});
}

void emit_stats(Pipeline& p, Writer& w) {
    const auto stats = descriptive_stats(p.returns());
    w.write("stats.csv", [&](std::ostream& os) { write_stats_csv(os, stats, w.fmt()); });
}

void emit_corr(Pipeline& p, Writer& w) {
    const auto& cm = p.corr();
    const auto dist = coefficient_distribution(cm, p.config().bins);
    w.write("correlation.csv", [&](std::ostream& os) { write_matrix_csv(os, cm, w.fmt()); });
    w.write("coefficients.csv", [&](std::ostream& os) { write_histogram_csv(os, dist.histogram, w.fmt()); });
    w.json_file("coefficients.json", json{{"pairs", dist.pairs},
                                          {"mean", w.num(dist.mean)},
                                          {"sd", w.num(dist.sd)},
                                          {"skewness", w.opt(dist.skewness)},
                                          {"kurtosis", w.opt(dist.kurtosis)}});
    w.text("coefficients.svg",
           svg::histogram_chart({"Distribution of correlation coefficients", "c_ij", "f(c_ij)"},
                                {{"C", dist.histogram, "#1f77b4"}}));
}

json law_json(const Writer& w, const MarchenkoPasturLaw& law) {
    return json{{"Q", w.num(law.q)}, {"lambda_min", w.num(law.lambda_min)}, {"lambda_max", w.num(law.lambda_max)}};
}

svg::Series mp_curve(const MarchenkoPasturLaw& law) {
    svg::Series s{"Marchenko-Pastur", {}, {}, "#d62728"};
    constexpr int kPoints = 400;
    for (int i = 0; i <= kPoints; ++i) {
        const double x = law.lambda_min + (law.lambda_max - law.lambda_min) * i / kPoints;
        s.x.push_back(x);
        s.y.push_back(law.density(x));
    }
    return s;
}

void emit_spectrum(Pipeline& p, Writer& w) {
    const auto& sd = p.spectrum();
    const auto law = p.law();
    const auto dev = classify_deviations(sd, law);
    w.write("eigenvalues.csv", [&](std::ostream& os) { write_eigenvalues_csv(os, sd, dev, w.fmt()); });
    json mp = law_json(w, law);
    mp["below"] = dev.below.size();
    mp["bulk"] = dev.bulk.size();
    mp["above"] = dev.above.size();
    w.json_file("mp.json", mp);
    const double lo = std::min(sd.eigenvalues.minCoeff(), law.lambda_min);
    const double hi = std::max(sd.eigenvalues.maxCoeff(), law.lambda_max);
    const auto hist = empirical_density(sd, p.config().bins, std::make_pair(lo, hi));
    w.text("spectrum.svg", svg::histogram_chart({"Eigenvalue density", "lambda", "density"},
                                                {{"empirical", hist, "#1f77b4"}}, {mp_curve(law)}));
}

void emit_ipr(Pipeline& p, Writer& w) {
    const auto& sd = p.spectrum();
    const auto series = ipr(sd);
    w.write("ipr.csv", [&](std::ostream& os) {
        os << "rank,lambda,ipr\n";
        for (std::size_t k = 0; k < sd.size(); ++k) {
            os << k + 1 << ',' << w.fmt()(sd.eigenvalues(static_cast<Eigen::Index>(k))) << ','
               << w.fmt()(series.values[k]) << '\n';
        }
    });
    const auto lambdas = to_std(sd.eigenvalues);
    const double lo = *std::min_element(lambdas.begin(), lambdas.end());
    const double hi = *std::max_element(lambdas.begin(), lambdas.end());
    w.text("ipr.svg",
           svg::scatter_chart({"Inverse participation ratio", "lambda", "I"}, {{"I^k", lambdas, series.values, "#1f77b4"}},
                              {{"<I> = " + format_significant(series.mean, 3), {lo, hi}, {series.mean, series.mean},
                                "#d62728"}}));
}

void emit_index(Pipeline& p, Writer& w) {
    const auto index = afpi(p.market_portfolio(), p.index_base());
    const auto avg = average_price(p.trimmed().panel);
    w.write("afpi.csv", [&](std::ostream& os) {
        os << "date,afpi,average_price\n";
        for (std::size_t t = 0; t < index.values.size(); ++t) {
            os << index.dates[t].iso() << ',' << w.fmt()(index.values[t]) << ',' << w.fmt()(avg[t]) << '\n';
        }
    });
    w.text("afpi.svg", svg::line_chart({"Eigenportfolio index vs average price", "day", "price"},
                                       {{"AFPI", day_index(index.values.size()), index.values, "#d62728"},
                                        {"<P>", day_index(avg.size()), avg, "#1f77b4"}}));
}

void emit_portfolios(Pipeline& p, Writer& w) {
    const auto& rp = p.returns();
    const Eigen::VectorXd mean_r = mean_return(rp);
    json summaries = json::array();
    for (int k : p.config().ranks) {
        const std::string csv = "portfolio_" + std::to_string(k) + ".csv";
        const std::string scatter = "portfolio_" + std::to_string(k) + "_scatter.svg";
        const svg::Axes axes{"Eigenportfolio " + std::to_string(k) + " vs mean return", "G^" + std::to_string(k), "<r>"};
        try {
            const auto ep = eigenportfolio(p.spectrum(), rp, k);
            const auto fit = linearity_test(ep, rp);
            w.write(csv, [&](std::ostream& os) {
                os << "date,G_" << k << '\n';
                for (Eigen::Index t = 0; t < ep.returns.size(); ++t) {
                    os << ep.dates[static_cast<std::size_t>(t)].iso() << ',' << w.fmt()(ep.returns(t)) << '\n';
                }
            });
            const auto gx = to_std(ep.returns);
            const double lo = ep.returns.minCoeff(), hi = ep.returns.maxCoeff();
            w.text(scatter, svg::scatter_chart(axes, {{"", gx, to_std(mean_r), "#1f77b4"}},
                                               {{"OLS fit", {lo, hi},
                                                 {fit.intercept + fit.slope * lo, fit.intercept + fit.slope * hi},
                                                 "#d62728"}}));
            summaries.push_back(json{{"rank", k},
                                     {"normalizer", w.num(ep.normalizer)},
                                     {"slope", w.num(fit.slope)},
                                     {"intercept", w.num(fit.intercept)},
                                     {"r_squared", w.num(fit.r_squared)}});
        } catch (const Error& e) {
            // A balanced eigenvector has no defined eigenportfolio; record it and keep going.
            if (e.kind() != ErrorKind::Domain || e.module() != "eigenanalysis") throw;
            w.write(csv, [&](std::ostream& os) { os << "date,G_" << k << '\n'; });
            w.text(scatter, svg::scatter_chart(axes, {}));
            summaries.push_back(json{{"rank", k}, {"degenerate", true}, {"message", e.what()}});
        }
    }
    w.json_file("linearity.json", summaries);
    emit_index(p, w);
}

void emit_remove_market(Pipeline& p, Writer& w) {
    const auto& mr = p.removal();
    const auto& rp = p.returns();
    const auto& sd = mr.residual_spectrum;
    w.write("market_mode.csv", [&](std::ostream& os) {
        os << "label,alpha,beta,included\n";
        for (std::size_t i = 0; i < rp.instrument_count(); ++i) {
            const bool inc = std::find(mr.included.begin(), mr.included.end(), i) != mr.included.end();
            os << rp.instruments[i].label.str() << ',' << w.fmt()(mr.alphas(static_cast<Eigen::Index>(i))) << ','
               << w.fmt()(mr.betas(static_cast<Eigen::Index>(i))) << ',' << (inc ? 1 : 0) << '\n';
        }
    });
    std::optional<MarchenkoPasturLaw> law;
    try {
        law = mp_law(sd.size(), mr.observations);
    } catch (const Error&) {
    }
    const auto dev = law ? classify_deviations(sd, *law) : DeviationReport{};
    w.write("residual_eigenvalues.csv", [&](std::ostream& os) {
        if (law) {
            write_eigenvalues_csv(os, sd, dev, w.fmt());
        } else {
            os << "rank,lambda,class\n";
            for (std::size_t k = 0; k < sd.size(); ++k) os << k + 1 << ',' << w.fmt()(sd.eigenvalues(static_cast<Eigen::Index>(k))) << ",NA\n";
        }
    });
    const auto before = coefficient_distribution(p.corr(), p.config().bins);
    const bool after_defined = mr.residual_corr.size() >= 2;
    const auto after = after_defined ? coefficient_distribution(mr.residual_corr, p.config().bins) : CoefficientDistribution{};
    w.write("coefficients_before_after.csv", [&](std::ostream& os) {
        os << "bin_left,bin_right,density_before,density_after\n";
        for (std::size_t i = 0; i < before.histogram.bins(); ++i) {
            os << w.fmt()(before.histogram.edges[i]) << ',' << w.fmt()(before.histogram.edges[i + 1]) << ','
               << w.fmt()(before.histogram.densities[i]) << ','
               << (after_defined ? w.fmt()(after.histogram.densities[i]) : std::string("NA")) << '\n';
        }
    });
    std::vector<svg::BarHistogram> bars{{"before", before.histogram, "#1f77b4"}};
    if (after_defined) bars.push_back({"after", after.histogram, "#ff7f0e"});
    w.text("coefficients_before_after.svg",
           svg::histogram_chart({"Correlation coefficients before and after market-mode removal", "c_ij", "f(c_ij)"}, bars));
    json excluded = json::array();
    for (const auto& m : mr.excluded) excluded.push_back(m.label.value);
    w.json_file("remove_market.json", json{{"mean_c_before", w.num(before.mean)},
                                           {"mean_c_after", after_defined ? json(w.num(after.mean)) : json(nullptr)},
                                           {"skewness_before", w.opt(before.skewness)},
                                           {"skewness_after", after_defined ? w.opt(after.skewness) : json(nullptr)},
                                           {"residual_size", sd.size()},
                                           {"excluded", excluded},
                                           {"mp", law ? law_json(w, *law) : json(nullptr)},
                                           {"above", dev.above.size()},
                                           {"below", dev.below.size()}});
}

json block_json(const Writer& w, const SectorBlock& b) {
    json members = json::array();
    for (const auto& pt : b.participants) {
        members.push_back(json{{"label", pt.instrument.label.value}, {"component", w.num(pt.component)}});
    }
    return json{{"members", members},
                {"by_exchange", b.by_exchange},
                {"by_country", b.by_country},
                {"by_commodity", b.by_commodity}};
}

void emit_sectors(Pipeline& p, Writer& w, const std::vector<int>& ranks) {
    const auto& mr = p.removal();
    const auto report = sector_report(mr, p.filled().instruments(), ranks, p.config().threshold);
    w.write("sectors.csv", [&](std::ostream& os) { write_sectors_csv(os, report, w.fmt()); });
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back(json{{"rank", e.rank},
                               {"eigenvalue", w.num(e.eigenvalue)},
                               {"above_bulk", e.above_bulk},
                               {"positive", block_json(w, e.positive)},
                               {"negative", block_json(w, e.negative)}});
    }
    w.json_file("sectors.json", json{{"threshold_factor", report.threshold_factor},
                                     {"entries", entries},
                                     {"warnings", report.warnings}});
    const double cut = p.config().threshold / std::sqrt(static_cast<double>(mr.residual_spectrum.size()));
    for (int k : ranks) {
        w.text("sector_u" + std::to_string(k) + ".svg",
               svg::bar_chart({"Components of residual eigenvector u^" + std::to_string(k), "instrument", "u"},
                              to_std(mr.residual_spectrum.vector(k)), cut));
    }
}

void emit_pairs(Pipeline& p, Writer& w) {
    const auto& mr = p.removal();
    const auto report = pair_report(mr, p.corr(), p.config().count);
    w.write("pairs.csv", [&](std::ostream& os) { write_pairs_csv(os, report, w.fmt()); });
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back(json{{"rank", e.rank},
                               {"eigenvalue", w.num(e.eigenvalue)},
                               {"label_a", e.a.label.value},
                               {"label_b", e.b.label.value},
                               {"component_a", w.num(e.component_a)},
                               {"component_b", w.num(e.component_b)},
                               {"c_ij", w.num(e.c_ij)},
                               {"correlation_rank", e.correlation_rank},
                               {"top2_share", w.num(e.top2_share)},
                               {"dominant", e.dominant},
                               {"null_mode", e.null_mode}});
    }
    w.json_file("pairs.json", json{{"entries", entries}});
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        w.text("pair_smallest_" + std::to_string(i + 1) + ".svg",
               svg::bar_chart({"Components of residual eigenvector u^" + std::to_string(e.rank), "instrument", "u"},
                              to_std(mr.residual_spectrum.vector(e.rank))));
    }
}

struct Group {
    std::string name;
    std::vector<std::string> files;
    std::function<void(Pipeline&, Writer&)> emit;
};

std::vector<Group> report_groups(const RunConfig& cfg) {
    std::vector<std::string> portfolios;
    for (int k : cfg.ranks) {
        portfolios.push_back("portfolio_" + std::to_string(k) + ".csv");
        portfolios.push_back("portfolio_" + std::to_string(k) + "_scatter.svg");
    }
    for (const char* f : {"linearity.json", "afpi.csv", "afpi.svg"}) portfolios.emplace_back(f);
    std::vector<std::string> sectors{"sectors.csv", "sectors.json"};
    for (int k : cfg.sector_ranks) sectors.push_back("sector_u" + std::to_string(k) + ".svg");
    std::vector<std::string> pairs{"pairs.csv", "pairs.json"};
    for (std::size_t i = 0; i < cfg.count; ++i) pairs.push_back("pair_smallest_" + std::to_string(i + 1) + ".svg");
    const auto sector_ranks = cfg.sector_ranks;

    return {
        {"stats", {"stats.csv"}, emit_stats},
        {"coefficient_distribution", {"correlation.csv", "coefficients.csv", "coefficients.json", "coefficients.svg"}, emit_corr},
        {"spectrum", {"eigenvalues.csv", "mp.json", "spectrum.svg"}, emit_spectrum},
        {"ipr", {"ipr.csv", "ipr.svg"}, emit_ipr},
        {"eigenportfolios", portfolios, emit_portfolios},
        {"market_removal",
         {"market_mode.csv", "residual_eigenvalues.csv", "coefficients_before_after.csv", "coefficients_before_after.svg",
          "remove_market.json"},
         emit_remove_market},
        {"sectors", sectors, [sector_ranks](Pipeline& p, Writer& w) { emit_sectors(p, w, sector_ranks); }},
        {"pairs", pairs, emit_pairs},
    };
}

json config_json(const RunConfig& cfg) {
    return json{{"input", cfg.input.filename().string()},
                {"meta", cfg.meta ? json(cfg.meta->filename().string()) : json(nullptr)},
                {"exclusions", cfg.exclusions ? json(cfg.exclusions->filename().string()) : json(nullptr)},
                {"bins", cfg.bins},
                {"threshold", cfg.threshold},
                {"ranks", cfg.ranks},
                {"sector_ranks", cfg.sector_ranks},
                {"count", cfg.count},
                {"base", cfg.base},
                {"full_precision", cfg.fmt.full_precision}};
}

std::optional<std::string> missing_input(const RunConfig& cfg) {
    if (cfg.input.empty()) return std::string("no --input given");
    if (!fs::exists(cfg.input)) return "input file not found: " + cfg.input.string();
    if (cfg.meta && !fs::exists(*cfg.meta)) return "metadata file not found: " + cfg.meta->string();
    if (cfg.exclusions && !fs::exists(*cfg.exclusions)) return "exclusion calendar not found: " + cfg.exclusions->string();
    return std::nullopt;
}

void validate(const RunConfig& cfg) {
    if (cfg.bins < 1) throw Error(ErrorKind::Parameter, "cli", "--bins must be >= 1");
    if (!(cfg.threshold > 0.0)) throw Error(ErrorKind::Parameter, "cli", "--threshold must be positive");
    for (int k : cfg.ranks) {
        if (k < 1) throw Error(ErrorKind::Parameter, "cli", "--ranks entries must be >= 1");
    }
}

int run_single(const RunConfig& cfg, const std::string& command, std::ostream& out, std::ostream& err) {
    if (auto missing = missing_input(cfg)) {
        err << "error: " << *missing << '\n';
        return kMissingInput;
    }
    try {
        validate(cfg);
        fs::create_directories(cfg.out);
        Pipeline p(cfg);
        Writer w(cfg.out, cfg.fmt);
        static const std::map<std::string, std::function<void(Pipeline&, Writer&)>> table{
            {"ingest", emit_ingest},
            {"stats", emit_stats},
            {"corr", emit_corr},
            {"spectrum", emit_spectrum},
            {"ipr", emit_ipr},
            {"portfolios", emit_portfolios},
            {"index", emit_index},
            {"remove-market", emit_remove_market},
            {"pairs", emit_pairs},
        };
        if (command == "sectors") {
            emit_sectors(p, w, cfg.sector_ranks);
        } else {
            table.at(command)(p, w);
        }
        for (const auto& warning : p.warnings) err << "warning: " << warning << '\n';
        for (const auto& f : w.written()) out << (cfg.out / f).string() << '\n';
        return kOk;
    } catch (const Error& e) {
        err << "error [" << e.module() << "/" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }
}

int run_synth(const fs::path& spec_path, const fs::path& out_path, std::optional<std::uint64_t> seed, std::ostream& out,
              std::ostream& err) {
    if (!fs::exists(spec_path)) {
        err << "error: synthetic spec not found: " << spec_path.string() << '\n';
        return kMissingInput;
    }
    try {
        std::ifstream in(spec_path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Parse, "synth", spec_path.string() + ": " + e.what());
        }
        SyntheticSpec spec = spec_from_json(j);
        if (seed) spec.seed = *seed;
        const PricePanel panel = generate(spec);
        if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw Error(ErrorKind::Io, "synth", "cannot write '" + out_path.string() + "'");
        write_synthetic_csv(os, spec, panel);
        out << out_path.string() << '\n';
        return kOk;
    } catch (const Error& e) {
        err << "error [" << e.module() << "/" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }
}

}  // namespace

std::vector<int> parse_ranks(const std::string& text) {
    std::vector<int> ranks;
    std::stringstream ss(text);
    std::string part;
    auto to_int = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size() || v < 1) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parameter, "cli", "invalid rank '" + s + "' in '" + text + "'");
        }
    };
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        if (const auto dash = part.find('-'); dash != std::string::npos) {
            const int lo = to_int(part.substr(0, dash));
            const int hi = to_int(part.substr(dash + 1));
            if (hi < lo) throw Error(ErrorKind::Parameter, "cli", "descending rank range '" + part + "'");
            for (int k = lo; k <= hi; ++k) ranks.push_back(k);
        } else {
            ranks.push_back(to_int(part));
        }
    }
    if (ranks.empty()) throw Error(ErrorKind::Parameter, "cli", "empty rank list");
    return ranks;
}

int run_full_report(const RunConfig& cfg, std::ostream& log) {
    if (auto missing = missing_input(cfg)) {
        log << "error: " << *missing << '\n';
        return kMissingInput;
    }
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) {
        log << "error: cannot create output directory " << cfg.out.string() << '\n';
        return kMissingInput;
    }

    const auto groups = report_groups(cfg);
    json manifest;
    manifest["config"] = config_json(cfg);
    json planned = json::object();
    for (const auto& g : groups) planned[g.name] = g.files;
    manifest["artifacts"] = planned;

    Writer w(cfg.out, cfg.fmt);
    Pipeline p(cfg);
    json completed = json::array();
    int code = kOk;
    try {
        validate(cfg);
        for (const auto& g : groups) {
            g.emit(p, w);
            completed.push_back(g.name);
        }
        manifest["status"] = "ok";
    } catch (const Error& e) {
        manifest["status"] = "error";
        manifest["error"] = error_json(e);
        log << "error [" << e.module() << "/" << to_string(e.kind()) << "]: " << e.what() << '\n';
        code = exit_code_for(e.kind());
    }
    manifest["completed"] = completed;
    manifest["warnings"] = p.warnings;
    std::ofstream out(cfg.out / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (code == kOk) log << "report written to " << cfg.out.string() << '\n';
    return code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random-matrix analysis of price-panel correlation structure", "eigenmarket"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string input, meta, exclusions, out_dir = "out", ranks, sector_ranks, spec_path;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", input, "price panel CSV");
        sub->add_option("--meta", meta, "instrument metadata CSV");
        sub->add_option("--exclusions", exclusions, "exclusion calendar");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--bins", cfg.bins, "histogram bins");
        sub->add_option("--threshold", cfg.threshold, "significance factor for |u| >= factor/sqrt(N)");
        sub->add_option("--ranks", ranks, "eigenvector ranks, e.g. 1,2,3 or 2-5");
        sub->add_option("--count", cfg.count, "number of smallest eigenvectors for pairs");
        sub->add_option("--base", cfg.base, "index base price or 'auto'");
        sub->add_option("--seed", seed, "RNG seed (synth)");
        sub->add_flag("--full-precision", cfg.fmt.full_precision, "round-trip numeric output");
    };

    const std::vector<std::pair<std::string, std::string>> commands{
        {"ingest", "load, align and fill the panel"},
        {"stats", "descriptive statistics of log returns"},
        {"corr", "correlation matrix and coefficient distribution"},
        {"spectrum", "eigenvalues against the Marchenko-Pastur law"},
        {"ipr", "inverse participation ratios"},
        {"portfolios", "eigenportfolio returns and linearity tests"},
        {"index", "price index from the largest eigenportfolio"},
        {"remove-market", "market-mode removal and residual spectrum"},
        {"sectors", "significant participants of residual eigenvectors"},
        {"pairs", "dominant pairs of the smallest residual eigenvectors"},
        {"report", "run every stage and write a manifest"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, desc] : commands) {
        subs[name] = app.add_subcommand(name, desc);
        add_common(subs[name]);
    }
    subs["report"]->add_option("--sector-ranks", sector_ranks, "residual ranks for the sector table (default 2-5)");
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic price panel");
    synth->add_option("--spec", spec_path, "JSON synthetic specification")->required();
    synth->add_option("--out", out_dir, "output CSV path")->required();
    CLI::Option* seed_opt = synth->add_option("--seed", seed, "override the spec's seed");

    std::vector<const char*> argv{"eigenmarket"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kParameterError;
    }

    if (synth->parsed()) {
        std::optional<std::uint64_t> override;
        if (seed_opt->count() > 0) override = seed;
        return run_synth(spec_path, out_dir, override, out, err);
    }

    try {
        if (!input.empty()) cfg.input = input;
        if (!meta.empty()) cfg.meta = fs::path(meta);
        if (!exclusions.empty()) cfg.exclusions = fs::path(exclusions);
        cfg.out = out_dir;
        cfg.seed = seed;
        const bool is_sectors = subs["sectors"]->parsed();
        if (!ranks.empty()) {
            if (is_sectors) {
                cfg.sector_ranks = parse_ranks(ranks);
            } else {
                cfg.ranks = parse_ranks(ranks);
            }
        }
        if (!sector_ranks.empty()) cfg.sector_ranks = parse_ranks(sector_ranks);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kParameterError;
    }

    if (subs["report"]->parsed()) return run_full_report(cfg, err);
    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) return run_single(cfg, name, out, err);
    }
    return kFailure;
}

}  // namespace eigenmarket::cli
