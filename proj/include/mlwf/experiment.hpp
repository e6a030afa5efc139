#ifndef MLWF_EXPERIMENT_HPP
#define MLWF_EXPERIMENT_HPP

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mlwf/analysis.hpp"
#include "mlwf/model.hpp"
#include "mlwf/stepper.hpp"

namespace mlwf {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Batch experiment description, read from a plain key=value file.
struct ExperimentConfig {
    enum class TestCase { custom, table1, table4 };
    enum class SchemeChoice { lbie, lrpi, both };

    struct Reference {
        enum class Kind { analytic, fine_grid };
        Kind kind = Kind::analytic;
        int n_ref = 1024;
        int m_ref = 1024;
    };

    TestCase test_case = TestCase::custom;
    SchemeChoice scheme = SchemeChoice::both;
    std::vector<int> grid_sizes;
    std::vector<int> time_steps; // empty: M = N per row
    double sigma = 0.2;
    double rate = 0.05;
    double strike = 10.0;
    double maturity = 0.5;
    double theta = 0.5;
    double xi = 1.0;
    double s_max_multiple = 5.0;
    bool american = false;
    bool richardson = false;
    Reference reference;
    std::string output_path = "experiment";
    std::vector<std::string> warnings;

    ModelParams model() const {
        return ModelParams{sigma, rate, strike, maturity, s_max_multiple * strike, xi, theta};
    }

    /// Nine monitor points: the built-in cases use their conventional
    /// grids (8 + 0.5i and 80 + 5i); custom runs take nine equispaced
    /// points strictly inside (0.8 E, 1.2 E).
    std::vector<double> sample_points() const {
        std::vector<double> pts(9);
        for (int i = 0; i < 9; ++i) {
            if (test_case == TestCase::table1) pts[i] = 8.0 + 0.5 * i;
            else if (test_case == TestCase::table4) pts[i] = 80.0 + 5.0 * i;
            else pts[i] = 0.8 * strike + 0.4 * strike * (i + 1) / 10.0;
        }
        return pts;
    }

    int steps_for(std::size_t row) const {
        return time_steps.empty() ? grid_sizes[row] : time_steps[row];
    }

    void validate() const {
        if (grid_sizes.empty()) throw ConfigError("config: grid_sizes must not be empty");
        for (std::size_t i = 0; i + 1 < grid_sizes.size(); ++i)
            if (grid_sizes[i] >= grid_sizes[i + 1])
                throw ConfigError("config: grid_sizes must be strictly ascending");
        for (int n : grid_sizes)
            if (n < 4) throw ConfigError("config: grid_sizes entries must be >= 4");
        if (!time_steps.empty() && time_steps.size() != grid_sizes.size())
            throw ConfigError("config: time_steps must match grid_sizes in length");
        for (int m : time_steps)
            if (m < 1) throw ConfigError("config: time_steps entries must be >= 1");
        if (reference.kind == Reference::Kind::analytic && american)
            throw ConfigError("config: reference=analytic is only valid for European runs");
        if (reference.kind == Reference::Kind::fine_grid && (reference.n_ref < 4 || reference.m_ref < 1))
            throw ConfigError("config: reference grid must satisfy N >= 4, M >= 1");
        if (richardson && !american)
            throw ConfigError("config: richardson extrapolation applies to American runs");
        model().validate();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline double parse_double(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("config line " + std::to_string(line) + ": value of '" + key +
                          "' is not a number: '" + v + "'");
    }
}

inline bool parse_bool(const std::string& v, int line, const std::string& key) {
    const std::string s = lower(v);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("config line " + std::to_string(line) + ": value of '" + key +
                      "' is not a boolean: '" + v + "'");
}

inline std::vector<int> parse_int_list(const std::string& v, int line, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stoi(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("");
        } catch (...) {
            throw ConfigError("config line " + std::to_string(line) + ": value of '" + key +
                              "' is not an integer list: '" + v + "'");
        }
    }
    return out;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}

} // namespace detail

inline void apply_test_case_defaults(ExperimentConfig& cfg, ExperimentConfig::TestCase tc) {
    cfg.test_case = tc;
    if (tc == ExperimentConfig::TestCase::table1) {
        cfg.sigma = 0.2;
        cfg.rate = 0.05;
        cfg.strike = 10.0;
        cfg.maturity = 0.5;
        cfg.xi = 1.0;
        cfg.american = false;
        cfg.reference.kind = ExperimentConfig::Reference::Kind::analytic;
    } else if (tc == ExperimentConfig::TestCase::table4) {
        cfg.sigma = 0.3;
        cfg.rate = 0.1;
        cfg.strike = 100.0;
        cfg.maturity = 1.0;
        cfg.xi = 0.1;
        cfg.american = true;
        cfg.reference.kind = ExperimentConfig::Reference::Kind::fine_grid;
        cfg.reference.n_ref = 1024;
        cfg.reference.m_ref = 1024;
    }
}

/// Plain-text parser: one key=value per line, '#' starts a comment,
/// unknown keys are rejected. Later keys override earlier ones, so
/// test_case presets can be refined below the test_case line.
inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    ExperimentConfig cfg;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string text = detail::trim(raw);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line) + ": expected key=value, got '" +
                              text + "'");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line) + ": empty key");

        if (key == "test_case") {
            const std::string v = detail::lower(value);
            if (v == "custom") apply_test_case_defaults(cfg, ExperimentConfig::TestCase::custom);
            else if (v == "table1") apply_test_case_defaults(cfg, ExperimentConfig::TestCase::table1);
            else if (v == "table4") apply_test_case_defaults(cfg, ExperimentConfig::TestCase::table4);
            else
                throw ConfigError("config line " + std::to_string(line) +
                                  ": test_case must be custom|table1|table4");
        } else if (key == "scheme") {
            const std::string v = detail::lower(value);
            if (v == "lbie") cfg.scheme = ExperimentConfig::SchemeChoice::lbie;
            else if (v == "lrpi") cfg.scheme = ExperimentConfig::SchemeChoice::lrpi;
            else if (v == "both") cfg.scheme = ExperimentConfig::SchemeChoice::both;
            else
                throw ConfigError("config line " + std::to_string(line) +
                                  ": scheme must be LBIE|LRPI|both");
        } else if (key == "grid_sizes") {
            cfg.grid_sizes = detail::parse_int_list(value, line, key);
        } else if (key == "time_steps") {
            cfg.time_steps = detail::parse_int_list(value, line, key);
        } else if (key == "sigma") {
            cfg.sigma = detail::parse_double(value, line, key);
        } else if (key == "rate") {
            cfg.rate = detail::parse_double(value, line, key);
        } else if (key == "strike") {
            cfg.strike = detail::parse_double(value, line, key);
        } else if (key == "maturity") {
            cfg.maturity = detail::parse_double(value, line, key);
        } else if (key == "theta") {
            cfg.theta = detail::parse_double(value, line, key);
        } else if (key == "xi") {
            cfg.xi = detail::parse_double(value, line, key);
        } else if (key == "s_max_multiple") {
            cfg.s_max_multiple = detail::parse_double(value, line, key);
        } else if (key == "american") {
            cfg.american = detail::parse_bool(value, line, key);
        } else if (key == "richardson") {
            cfg.richardson = detail::parse_bool(value, line, key);
        } else if (key == "reference") {
            const std::string v = detail::lower(value);
            if (v == "analytic") {
                cfg.reference.kind = ExperimentConfig::Reference::Kind::analytic;
            } else if (v.rfind("fine-grid(", 0) == 0 && v.back() == ')') {
                const std::string inner = v.substr(10, v.size() - 11);
                const auto ints = detail::parse_int_list(inner, line, key);
                if (ints.size() != 2)
                    throw ConfigError("config line " + std::to_string(line) +
                                      ": reference=fine-grid(N,M) needs two integers");
                cfg.reference.kind = ExperimentConfig::Reference::Kind::fine_grid;
                cfg.reference.n_ref = ints[0];
                cfg.reference.m_ref = ints[1];
            } else {
                throw ConfigError("config line " + std::to_string(line) +
                                  ": reference must be analytic or fine-grid(N,M)");
            }
        } else if (key == "output_path") {
            cfg.output_path = value;
        } else {
            throw ConfigError("config line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    if (cfg.theta != 0.0 && cfg.theta != 0.5)
        cfg.warnings.push_back("theta = " + std::to_string(cfg.theta) +
                               " is outside the proven unconditionally stable set {0, 0.5}");
    return cfg;
}

struct ExperimentRow {
    int n = 0;
    int m = 0;
    double rms = 0.0;
    double max = 0.0;
    std::optional<double> ratio;
    double cpu_seconds = 0.0;
    int solver_iterations = 0;
    bool failed = false;
    std::string error;
    std::vector<double> prices;
};

struct SchemeReport {
    Scheme scheme = Scheme::lbie;
    std::vector<ExperimentRow> rows;
    std::string csv_path;
    std::string plot_path;
};

struct ExperimentReport {
    std::vector<double> sample_points;
    std::vector<double> reference_values;
    bool reference_from_cache = false;
    double reference_seconds = 0.0;
    std::vector<SchemeReport> schemes;
    std::string summary_path;
};

namespace detail {

inline std::string reference_cache_key(const ExperimentConfig& cfg, const NumericsConfig& num) {
    const ModelParams p = cfg.model();
    std::ostringstream os;
    os.precision(17);
    os << "sigma=" << p.sigma << ";rate=" << p.rate << ";strike=" << p.strike
       << ";maturity=" << p.maturity << ";s_max=" << p.s_max << ";xi=" << p.xi
       << ";theta=" << p.theta << ";american=" << cfg.american << ";n_ref=" << cfg.reference.n_ref
       << ";m_ref=" << cfg.reference.m_ref << ";panels=" << num.quadrature.panels_per_half
       << ";rq=" << num.rq_over_h << ";rw=" << num.rw_over_rq << ";points=";
    for (double s : cfg.sample_points()) os << s << ",";
    return os.str();
}

inline std::vector<double> compute_reference(const ExperimentConfig& cfg, const NumericsConfig& num,
                                             const std::string& out_dir, bool& from_cache,
                                             double& seconds) {
    const std::vector<double> pts = cfg.sample_points();
    from_cache = false;
    seconds = 0.0;
    if (cfg.reference.kind == ExperimentConfig::Reference::Kind::analytic) {
        std::vector<double> vals(pts.size());
        const ModelParams p = cfg.model();
        for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = bs_put_exact(pts[i], 0.0, p);
        return vals;
    }

    const std::string key = reference_cache_key(cfg, num);
    const std::filesystem::path cache_dir = std::filesystem::path(out_dir) / "refcache";
    char namebuf[32];
    std::snprintf(namebuf, sizeof(namebuf), "ref_%016llx.txt",
                  static_cast<unsigned long long>(fnv1a(key)));
    const std::filesystem::path cache_file = cache_dir / namebuf;

    if (std::ifstream in{cache_file}) {
        std::string header, stored;
        std::getline(in, header);
        std::getline(in, stored);
        if (stored == key) {
            std::vector<double> vals;
            double s, v;
            while (in >> s >> v) vals.push_back(v);
            if (vals.size() == pts.size()) {
                from_cache = true;
                return vals;
            }
        }
    }

    // the reference surface is always the LBIE run on the fine grid
    const auto t0 = std::chrono::steady_clock::now();
    const PricingEngine engine(Scheme::lbie, cfg.model(), cfg.reference.n_ref, num);
    const PriceSurface surf = cfg.american ? engine.price_bermudan(cfg.reference.m_ref)
                                           : engine.price_european(cfg.reference.m_ref);
    const std::vector<double> vals = surf.values_at_s(pts);
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::filesystem::create_directories(cache_dir);
    std::ofstream out(cache_file);
    out << "# reference price cache\n" << key << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < pts.size(); ++i) out << pts[i] << " " << vals[i] << "\n";
    return vals;
}

inline ExperimentRow run_row(Scheme scheme, const ExperimentConfig& cfg, const NumericsConfig& num,
                             int n, int m, const std::vector<double>& pts,
                             const std::vector<double>& ref) {
    ExperimentRow row;
    row.n = n;
    row.m = m;
    try {
        const auto t0 = std::chrono::steady_clock::now();
        const PricingEngine engine(scheme, cfg.model(), n, num);
        PriceSurface surf;
        if (!cfg.american) surf = engine.price_european(m);
        else if (cfg.richardson) surf = engine.price_american_richardson(m);
        else surf = engine.price_bermudan(m);
        row.prices = surf.values_at_s(pts);
        row.cpu_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.solver_iterations = surf.max_solver_iterations;
        const ErrorReport er = error_metrics(row.prices, ref);
        row.rms = er.rms;
        row.max = er.max;
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

} // namespace detail

inline std::string environment_stamp() {
    std::ostringstream os;
#if defined(__clang__)
    os << "clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
    os << "gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#else
    os << "unknown compiler";
#endif
    os << ", c++" << (__cplusplus / 100 % 100);
#if defined(NDEBUG)
    os << ", release";
#else
    os << ", debug";
#endif
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%d %H:%M:%S", std::gmtime(&now));
    os << ", run " << buf << " UTC";
    return os.str();
}

inline std::string config_echo(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    const char* tc = cfg.test_case == ExperimentConfig::TestCase::table1   ? "table1"
                     : cfg.test_case == ExperimentConfig::TestCase::table4 ? "table4"
                                                                           : "custom";
    const char* sc = cfg.scheme == ExperimentConfig::SchemeChoice::lbie   ? "LBIE"
                     : cfg.scheme == ExperimentConfig::SchemeChoice::lrpi ? "LRPI"
                                                                          : "both";
    os << "test_case=" << tc << "\nscheme=" << sc << "\ngrid_sizes=";
    for (std::size_t i = 0; i < cfg.grid_sizes.size(); ++i)
        os << (i ? "," : "") << cfg.grid_sizes[i];
    os << "\ntime_steps=";
    for (std::size_t i = 0; i < cfg.time_steps.size(); ++i)
        os << (i ? "," : "") << cfg.time_steps[i];
    os << "\nsigma=" << cfg.sigma << "\nrate=" << cfg.rate << "\nstrike=" << cfg.strike
       << "\nmaturity=" << cfg.maturity << "\ntheta=" << cfg.theta << "\nxi=" << cfg.xi
       << "\ns_max_multiple=" << cfg.s_max_multiple << "\namerican=" << (cfg.american ? "true" : "false")
       << "\nrichardson=" << (cfg.richardson ? "true" : "false") << "\nreference=";
    if (cfg.reference.kind == ExperimentConfig::Reference::Kind::analytic) os << "analytic";
    else os << "fine-grid(" << cfg.reference.n_ref << "," << cfg.reference.m_ref << ")";
    os << "\noutput_path=" << cfg.output_path << "\n";
    return os.str();
}

/// Runs the configured study and writes, per scheme, a CSV table
/// (columns N,M,RMSError,MaxError,Ratio,CPUTime), a plot-data file of
/// (N, MaxError) pairs, and one plain-text summary with the config echo
/// and environment stamp. Rows may run in parallel workers; results are
/// assembled in config order either way.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                       const NumericsConfig& num = {}, int jobs = 1) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    ExperimentReport report;
    report.sample_points = cfg.sample_points();
    report.reference_values = detail::compute_reference(cfg, num, out_dir, report.reference_from_cache,
                                                        report.reference_seconds);

    std::vector<Scheme> schemes;
    if (cfg.scheme != ExperimentConfig::SchemeChoice::lrpi) schemes.push_back(Scheme::lbie);
    if (cfg.scheme != ExperimentConfig::SchemeChoice::lbie) schemes.push_back(Scheme::lrpi);

    for (Scheme sc : schemes) {
        SchemeReport sr;
        sr.scheme = sc;
        const std::size_t count = cfg.grid_sizes.size();
        sr.rows.resize(count);
        if (jobs > 1) {
            std::vector<std::future<ExperimentRow>> futures(count);
            for (std::size_t i = 0; i < count; ++i)
                futures[i] = std::async(std::launch::async, [&, i] {
                    return detail::run_row(sc, cfg, num, cfg.grid_sizes[i], cfg.steps_for(i),
                                           report.sample_points, report.reference_values);
                });
            for (std::size_t i = 0; i < count; ++i) sr.rows[i] = futures[i].get();
        } else {
            for (std::size_t i = 0; i < count; ++i)
                sr.rows[i] = detail::run_row(sc, cfg, num, cfg.grid_sizes[i], cfg.steps_for(i),
                                             report.sample_points, report.reference_values);
        }
        for (std::size_t i = 1; i < count; ++i)
            if (!sr.rows[i].failed && !sr.rows[i - 1].failed && sr.rows[i - 1].max > 0.0 &&
                sr.rows[i].max > 0.0)
                sr.rows[i].ratio = convergence_ratio(sr.rows[i - 1].max, sr.rows[i].max);

        const std::string base = cfg.output_path + "_" + (sc == Scheme::lbie ? "lbie" : "lrpi");
        sr.csv_path = (std::filesystem::path(out_dir) / (base + ".csv")).string();
        std::ofstream csv(sr.csv_path);
        csv << "N,M,RMSError,MaxError,Ratio,CPUTime\n";
        for (const ExperimentRow& r : sr.rows) {
            csv << r.n << "," << r.m << ",";
            if (r.failed) {
                csv << ",,,\n";
                continue;
            }
            csv << detail::format_sci(r.rms) << "," << detail::format_sci(r.max) << ",";
            if (r.ratio) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "%.2f", *r.ratio);
                csv << buf;
            }
            char tbuf[32];
            std::snprintf(tbuf, sizeof(tbuf), "%.6f", r.cpu_seconds);
            csv << "," << tbuf << "\n";
        }
        csv.close();

        sr.plot_path = (std::filesystem::path(out_dir) / (base + "_plot.dat")).string();
        std::ofstream plot(sr.plot_path);
        plot << "# N MaxError\n";
        for (const ExperimentRow& r : sr.rows)
            if (!r.failed) plot << r.n << " " << detail::format_sci(r.max) << "\n";
        plot.close();

        report.schemes.push_back(std::move(sr));
    }

    report.summary_path =
        (std::filesystem::path(out_dir) / (cfg.output_path + "_summary.txt")).string();
    std::ofstream sum(report.summary_path);
    sum << "# experiment summary\n[environment]\n" << environment_stamp() << "\n\n[config]\n"
        << config_echo(cfg);
    if (!cfg.warnings.empty()) {
        sum << "\n[warnings]\n";
        for (const std::string& w : cfg.warnings) sum << w << "\n";
    }
    sum << "\n[reference]\n";
    if (cfg.reference.kind == ExperimentConfig::Reference::Kind::analytic) {
        sum << "analytic Black-Scholes put\n";
    } else {
        sum << "LBIE " << (cfg.american ? "Bermudan" : "European") << " N=" << cfg.reference.n_ref
            << " M=" << cfg.reference.m_ref << (report.reference_from_cache ? " (cached)" : " (computed)")
            << "\n";
    }
    sum.precision(17);
    for (std::size_t i = 0; i < report.sample_points.size(); ++i)
        sum << "s=" << report.sample_points[i] << " value=" << report.reference_values[i] << "\n";
    for (const SchemeReport& sr : report.schemes) {
        sum << "\n[" << scheme_name(sr.scheme) << "]\n";
        for (const ExperimentRow& r : sr.rows) {
            if (r.failed) {
                sum << "N=" << r.n << " M=" << r.m << " FAILED: " << r.error << "\n";
            } else {
                sum << "N=" << r.n << " M=" << r.m << " RMSError=" << detail::format_sci(r.rms)
                    << " MaxError=" << detail::format_sci(r.max)
                    << " solver_iterations=" << r.solver_iterations << "\n";
            }
        }
    }
    return report;
}

} // namespace mlwf

#endif
