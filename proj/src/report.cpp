#include "mgt/report.hpp"
#include "mgt/iteration.hpp"

#include "format.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mgt {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

// Reasons are free text; keep CSV cells free of separators.
std::string csv_cell(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

json record_json(const LifespanRecord& r) {
    json j{{"eps", r.eps}, {"T_num", opt_json(r.T_num)}, {"reason", r.reason},
           {"wallclock", r.wallclock}, {"dt", r.dt_used}};
    if (r.gate_passed) {
        j["gate_passed"] = *r.gate_passed;
        j["dt_rel_change"] = r.dt_rel_change;
        j["threshold_rel_change"] = r.threshold_rel_change;
    }
    return j;
}

json fit_json(const FitResult& f) {
    return json{{"model", to_string(f.model)}, {"exponent", f.exponent}, {"intercept", f.intercept},
                {"r_squared", f.r_squared}, {"n_points", f.n_points}};
}

json trace_json(const FunctionalTrace& t) {
    json j{{"t", t.times}, {"U", t.U}, {"U1", t.U1}, {"E", t.E},
           {"nonlin", t.nonlin_integral}, {"support_radius", t.support_radius}};
    j["Ucal"] = t.Ucal ? json(*t.Ucal) : json(nullptr);
    return j;
}

std::optional<double> theorem_exponent(const ReportContext& ctx) {
    if (ctx.n >= 2 && theta(ctx.p, ctx.n) <= 0.0) return std::nullopt;
    return subcritical_lifespan_exponent(ctx.p, ctx.n);
}

std::optional<double> sharp_exponent(const ReportContext& ctx) {
    if (ctx.n == 1) return (ctx.p - 1.0) / 2.0;
    return std::nullopt;
}

} // namespace

OutputFormat output_format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown output format '" + s + "' (csv, json)");
}

std::string format_double(double v) { return detail::shortest(v); }

void write_lifespan_csv(const std::vector<LifespanRecord>& records, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "eps,T_num,reason,dt\n";
    for (const auto& r : records)
        out << format_double(r.eps) << ',' << opt(r.T_num) << ',' << csv_cell(r.reason) << ','
            << format_double(r.dt_used) << '\n';
    finish(out, path);
}

std::vector<LifespanRecord> read_lifespan_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
    std::string line;
    if (!std::getline(in, line) || line != "eps,T_num,reason,dt")
        throw std::runtime_error(path.string() + ": missing or unexpected header");
    std::vector<LifespanRecord> records;
    for (std::size_t no = 2; std::getline(in, line); ++no) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != 4)
            throw std::runtime_error(path.string() + ":" + std::to_string(no) + ": expected 4 columns");
        LifespanRecord r;
        r.eps = parse_double(cells[0], path, no);
        if (!cells[1].empty()) r.T_num = parse_double(cells[1], path, no);
        r.reason = cells[2];
        r.dt_used = parse_double(cells[3], path, no);
        records.push_back(r);
    }
    return records;
}

std::vector<EnvelopeRow> calibrated_envelopes(const std::vector<LifespanRecord>& records,
                                              const ReportContext& ctx) {
    const auto kappa = theorem_exponent(ctx);
    const auto sharp = sharp_exponent(ctx);
    // Calibrate on the largest eps with a measured time.
    const LifespanRecord* anchor = nullptr;
    for (const auto& r : records)
        if (r.T_num && (!anchor || r.eps > anchor->eps)) anchor = &r;

    std::vector<EnvelopeRow> rows;
    for (const auto& r : records) {
        EnvelopeRow row{r.eps, r.T_num, std::nullopt, std::nullopt};
        if (anchor) {
            if (kappa) row.theorem_envelope = *anchor->T_num * std::pow(r.eps / anchor->eps, -*kappa);
            if (sharp) row.sharp_envelope = *anchor->T_num * std::pow(r.eps / anchor->eps, -*sharp);
        }
        rows.push_back(row);
    }
    return rows;
}

void emit_report(const std::vector<LifespanRecord>& records, const std::vector<FitResult>& fits,
                 const std::vector<FunctionalTrace>& traces, const std::filesystem::path& out_dir,
                 OutputFormat format, const ReportContext& ctx) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error(out_dir.string() + ": " + ec.message());

    const auto lifespan = out_dir / "lifespan.csv";
    write_lifespan_csv(records, lifespan);

    const auto fits_path = out_dir / "fits.json";
    {
        json j = json::array();
        for (const auto& f : fits) j.push_back(fit_json(f));
        auto out = open_out(fits_path);
        out << j.dump(2) << '\n';
        finish(out, fits_path);
    }

    for (std::size_t k = 0; k < traces.size(); ++k) {
        if (format == OutputFormat::csv) {
            write_trace_csv(traces[k], out_dir / ("trace_" + std::to_string(k) + ".csv"));
        } else {
            const auto path = out_dir / ("trace_" + std::to_string(k) + ".json");
            auto out = open_out(path);
            out << trace_json(traces[k]).dump() << '\n';
            finish(out, path);
        }
    }

    const auto rows = calibrated_envelopes(records, ctx);
    {
        const auto path = out_dir / "envelopes.csv";
        auto out = open_out(path);
        out << "eps,T_num,theorem_envelope,sharp_envelope\n";
        for (const auto& r : rows)
            out << format_double(r.eps) << ',' << opt(r.T_num) << ',' << opt(r.theorem_envelope) << ','
                << opt(r.sharp_envelope) << '\n';
        finish(out, path);
    }

    if (format == OutputFormat::json) {
        json recs = json::array(), envs = json::array();
        for (const auto& r : records) recs.push_back(record_json(r));
        for (const auto& r : rows)
            envs.push_back(json{{"eps", r.eps}, {"T_num", opt_json(r.T_num)},
                                {"theorem_envelope", opt_json(r.theorem_envelope)},
                                {"sharp_envelope", opt_json(r.sharp_envelope)}});
        for (const auto& [name, doc] : {std::pair{"lifespan.json", recs}, std::pair{"envelopes.json", envs}}) {
            const auto path = out_dir / name;
            auto out = open_out(path);
            out << doc.dump(2) << '\n';
            finish(out, path);
        }
    }

    const auto summary_path = out_dir / "summary.txt";
    auto out = open_out(summary_path);
    std::size_t blowups = 0, gated = 0, passed = 0, dominated = 0, compared = 0;
    for (const auto& r : records) {
        if (r.T_num) ++blowups;
        if (r.gate_passed) {
            ++gated;
            if (*r.gate_passed) ++passed;
        }
    }
    for (const auto& r : rows)
        if (r.T_num && r.theorem_envelope) {
            ++compared;
            if (*r.T_num <= *r.theorem_envelope * (1.0 + 1e-12)) ++dominated;
        }
    out << "runs: " << records.size() << '\n';
    if (records.empty()) out << "no runs recorded\n";
    out << "blow-ups detected: " << blowups << '\n';
    out << "robustness gate: " << passed << " of " << gated << " passed\n";
    out << "n = " << ctx.n << ", p = " << format_double(ctx.p) << ", beta = " << format_double(ctx.beta)
        << ", R = " << format_double(ctx.R) << '\n';
    const auto kappa = theorem_exponent(ctx);
    const auto sharp = sharp_exponent(ctx);
    out << "theorem exponent 2p(p-1)/theta: " << (kappa ? format_double(*kappa) : "n/a") << '\n';
    out << "sharp exponent: " << (sharp ? format_double(*sharp) : "n/a") << '\n';
    if (fits.empty()) out << "fits: none\n";
    for (const auto& f : fits) {
        out << "fit " << to_string(f.model) << ": exponent " << format_double(f.exponent)
            << ", intercept " << format_double(f.intercept) << ", r^2 " << format_double(f.r_squared)
            << ", points " << f.n_points << '\n';
        if (f.model == FitModel::power_law && kappa)
            out << "  fitted/theorem exponent ratio: " << format_double(f.exponent / *kappa) << '\n';
        if (f.model == FitModel::power_law && sharp)
            out << "  fitted - sharp exponent: " << format_double(f.exponent - *sharp) << '\n';
    }
    out << "envelope dominance: " << dominated << " of " << compared << " below the calibrated theorem envelope\n";
    finish(out, summary_path);
}

} // namespace mgt
