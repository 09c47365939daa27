// freeclt: batch front door for the diagram-formula CLT engine.
//
// Subcommands: partitions, cumulant, clt-scan, mc, rmt, breaking, selftest.
// Exit codes: 0 ok, 2 usage, 3 cap exceeded, 4 hypothesis violation,
// 5 numeric failure. Errors go to stderr as one JSON object.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "freeclt/breaking.hpp"
#include "freeclt/covariance.hpp"
#include "freeclt/diagram.hpp"
#include "freeclt/orthopoly.hpp"
#include "freeclt/partitions.hpp"
#include "freeclt/simulate.hpp"

using nlohmann::json;
using freeclt::cap_error;
using freeclt::hypothesis_error;
using freeclt::numeric_error;
namespace part = freeclt::partitions;
namespace ortho = freeclt::orthopoly;
namespace cov = freeclt::covariance;
namespace diag = freeclt::diagram;
namespace sim = freeclt::simulate;
namespace brkg = freeclt::breaking;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCap = 3;
constexpr int kExitHypothesis = 4;
constexpr int kExitNumeric = 5;

// ---- formatting ---------------------------------------------------------

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct CsvWriter {
    std::ostringstream body;
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body << ',';
            body << csv_quote(cells[i]);
        }
        body << "\r\n";
    }
    std::string str() const { return body.str(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << content;
}

void emit_json(const json& j, const std::string& out_path) {
    std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

// ---- input parsing ------------------------------------------------------

std::vector<std::int64_t> parse_int_list(const std::string& s, const char* what) {
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoll(item));
    }
    if (out.empty()) throw std::invalid_argument(std::string("empty list for ") + what);
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument(std::string("empty list for ") + what);
    return out;
}

cov::CovarianceModel parse_model(const std::string& spec) {
    if (!spec.empty() && spec.front() == '{') {  // config-object form
        json j = json::parse(spec);
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "geometric") return cov::CovarianceModel::geometric(j.at("a").get<double>());
        if (kind == "power") return cov::CovarianceModel::power(j.at("beta").get<double>());
        if (kind == "tabulated")
            return cov::CovarianceModel::tabulated(j.at("values").get<std::vector<double>>());
        throw std::invalid_argument("unknown model kind: " + kind);
    }
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "geometric") return cov::CovarianceModel::geometric(std::stod(args));
    if (kind == "power") return cov::CovarianceModel::power(std::stod(args));
    if (kind == "tabulated") return cov::CovarianceModel::tabulated(parse_double_list(args, "tabulated model"));
    throw std::invalid_argument("unknown model '" + spec +
                                "' (expected geometric:a, power:beta, tabulated:v0,v1,...)");
}

// Named presets (H1..H_n, U1..U_n, expand:<builtin>) or explicit --coeffs.
ortho::FunctionalSeries parse_series(const std::string& preset, const std::string& coeffs,
                                     const std::string& basis_name, int max_deg, int quad_order) {
    if (!coeffs.empty()) {
        if (basis_name.empty())
            throw std::invalid_argument("--coeffs needs --basis hermite|chebyshev");
        return ortho::FunctionalSeries(ortho::basis_from_name(basis_name),
                                       parse_double_list(coeffs, "coeffs"));
    }
    if (preset.empty()) throw std::invalid_argument("need --series or --coeffs");
    if ((preset[0] == 'H' || preset[0] == 'U') && preset.size() > 1 &&
        std::isdigit(static_cast<unsigned char>(preset[1]))) {
        int deg = std::stoi(preset.substr(1));
        auto basis = preset[0] == 'H' ? ortho::Basis::Hermite : ortho::Basis::Chebyshev;
        return ortho::FunctionalSeries::pure(basis, deg);
    }
    if (preset.rfind("expand:", 0) == 0) {
        std::string fn = preset.substr(7);
        if (basis_name.empty())
            throw std::invalid_argument("expand presets need --basis hermite|chebyshev");
        auto basis = ortho::basis_from_name(basis_name);
        std::function<double(double)> f;
        if (fn == "x2")
            f = [](double x) { return x * x; };
        else if (fn == "x3m2x")
            f = [](double x) { return x * x * x - 2.0 * x; };
        else if (fn == "clip")
            f = [](double x) { return std::clamp(x, -1.0, 1.0); };
        else
            throw std::invalid_argument("unknown expand preset: " + fn);
        return ortho::expand(f, basis, max_deg, quad_order > 0 ? quad_order : 2 * max_deg + 1);
    }
    throw std::invalid_argument("unknown series preset: " + preset);
}

std::map<int, double> parse_p_values(const std::string& s) {
    std::map<int, double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("p values look like k:p (got '" + item + "')");
        int k = std::stoi(item.substr(0, colon));
        std::string pv = item.substr(colon + 1);
        double p = (pv == "inf" || pv == "Inf" || pv == "INF")
                       ? std::numeric_limits<double>::infinity()
                       : std::stod(pv);
        out[k] = p;
    }
    if (out.empty()) throw std::invalid_argument("empty p value list");
    return out;
}

part::Partition parse_partition(const std::string& text, int ground) {
    json j = json::parse(text);
    std::vector<std::vector<int>> blocks;
    for (const auto& b : j) blocks.push_back(b.get<std::vector<int>>());
    return part::Partition(blocks, ground);
}

json series_json(const ortho::FunctionalSeries& s) {
    return json{{"basis", ortho::basis_name(s.basis)},
                {"coeffs", s.coeffs},
                {"rank", ortho::rank(s)},
                {"dropped_c0", s.dropped_c0},
                {"tail_mass", s.tail_mass}};
}

json partition_to_json(const part::Partition& p) {
    json j = json::array();
    for (const auto& b : p.blocks()) j.push_back(b);
    return j;
}

json error_json(int code, const std::string& kind, const std::string& message) {
    return json{{"schema", 1}, {"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
}

// ---- shared option bundle ----------------------------------------------

struct CommonOpts {
    unsigned threads = freeclt::default_threads();
    double budget = 1e9;
    std::uint64_t seed = 12345;
    std::string out_path;
    std::string csv_path;
};

diag::EvalOptions eval_options(const CommonOpts& c) {
    diag::EvalOptions o;
    o.max_evals = c.budget;
    o.threads = c.threads;
    return o;
}

// ---- subcommands --------------------------------------------------------

int run_partitions(const std::string& rows_arg, const std::string& klass, bool list_them,
                   int cap, const CommonOpts& common) {
    auto rows64 = parse_int_list(rows_arg, "--rows");
    std::vector<int> rows(rows64.begin(), rows64.end());
    part::RowTable table(rows);
    std::vector<part::Partition> result;
    if (klass == "pair") {
        result = part::enumerate_pair_partitions(table.total(), cap);
    } else if (klass == "noncrossing") {
        for (auto& p : part::enumerate_pair_partitions(table.total(), cap))
            if (part::is_noncrossing(p)) result.push_back(std::move(p));
    } else if (klass == "classical") {
        result = part::enumerate_classical_diagrams(table, cap);
    } else if (klass == "free") {
        result = part::enumerate_free_diagrams(table, false, cap);
    } else if (klass == "free-connected") {
        result = part::enumerate_free_diagrams(table, true, cap);
    } else {
        throw std::invalid_argument("unknown class '" + klass +
                                    "' (pair|noncrossing|classical|free|free-connected)");
    }
    json j{{"schema", 1},
           {"subcommand", "partitions"},
           {"rows", rows},
           {"class", klass},
           {"count", result.size()}};
    if (list_them) {
        json arr = json::array();
        for (const auto& p : result) arr.push_back(partition_to_json(p));
        j["partitions"] = arr;
    }
    emit_json(j, common.out_path);
    return kExitOk;
}

int run_cumulant(const std::string& degrees_arg, const std::string& times_arg,
                 const std::string& world_arg, const std::string& model_arg, bool with_oracle,
                 const CommonOpts& common) {
    auto deg64 = parse_int_list(degrees_arg, "--degrees");
    std::vector<int> degrees(deg64.begin(), deg64.end());
    auto times = parse_int_list(times_arg, "--times");
    auto model = parse_model(model_arg);
    diag::CumulantRequest req;
    req.degrees = degrees;
    req.times = times;
    req.world = cov::world_from_name(world_arg);
    req.model = &model;
    double value = diag::joint_cumulant(req, eval_options(common));
    json j{{"schema", 1},
           {"subcommand", "cumulant"},
           {"degrees", degrees},
           {"times", times},
           {"world", world_arg},
           {"model", model.describe()},
           {"value", value}};
    if (with_oracle) {
        double oracle = diag::oracle_cumulant(req);
        j["oracle"] = oracle;
        j["abs_diff"] = std::abs(value - oracle);
    }
    emit_json(j, common.out_path);
    return kExitOk;
}

int run_clt_scan(const std::string& series_arg, const std::string& coeffs_arg,
                 const std::string& basis_arg, const std::string& model_arg,
                 const std::string& world_arg, const std::string& n_arg, int r_max,
                 const CommonOpts& common) {
    auto world = cov::world_from_name(world_arg);
    std::string basis = basis_arg;
    if (basis.empty()) basis = world == cov::World::Classical ? "hermite" : "chebyshev";
    auto series = parse_series(series_arg, coeffs_arg, basis, 8, 0);
    auto model = parse_model(model_arg);
    auto n_values = parse_int_list(n_arg, "--N");

    auto scan = diag::clt_scan(series, model, n_values, r_max, world, eval_options(common));

    CsvWriter csv;
    csv.row({"N", "R", "kappa_raw", "kappa_normalized", "sigma2_ref"});
    json rows = json::array();
    for (std::size_t ni = 0; ni < scan.n_values.size(); ++ni) {
        for (int r = 2; r <= scan.r_max; ++r) {
            double raw = scan.raw[ni][static_cast<std::size_t>(r - 2)];
            double norm = scan.normalized[ni][static_cast<std::size_t>(r - 2)];
            csv.row({std::to_string(scan.n_values[ni]), std::to_string(r), fmt_double(raw),
                     fmt_double(norm), fmt_double(scan.sigma2_ref)});
            rows.push_back(json{{"N", scan.n_values[ni]},
                                {"R", r},
                                {"kappa_raw", raw},
                                {"kappa_normalized", norm}});
        }
    }
    if (!common.csv_path.empty())
        write_file(common.csv_path, csv.str());
    else
        std::cout << csv.str();
    json j{{"schema", 1},
           {"subcommand", "clt-scan"},
           {"world", world_arg},
           {"model", model.describe()},
           {"series", series_json(series)},
           {"sigma2_ref", scan.sigma2_ref},
           {"rows", rows}};
    if (!common.out_path.empty()) emit_json(j, common.out_path);
    return kExitOk;
}

int run_mc(const std::string& series_arg, const std::string& coeffs_arg,
           const std::string& model_arg, std::int64_t n, std::int64_t reps,
           const CommonOpts& common) {
    auto series = parse_series(series_arg, coeffs_arg, "hermite", 8, 0);
    auto model = parse_model(model_arg);
    auto rep = sim::mc_distribution(series, model, n, reps, common.seed, common.threads);
    json j{{"schema", 1},
           {"subcommand", "mc"},
           {"series", series_json(series)},
           {"model", model.describe()},
           {"N", rep.n},
           {"reps", rep.reps},
           {"seed", rep.seed},
           {"sample_mean", rep.sample_mean},
           {"sample_var", rep.sample_var},
           {"sample_skew", rep.sample_skew},
           {"sample_kurtosis", rep.sample_kurtosis},
           {"ks_distance", rep.ks_distance},
           {"sigma2_ref", rep.sigma2_ref}};
    emit_json(j, common.out_path);
    if (!common.csv_path.empty()) {
        CsvWriter csv;
        csv.row({"N", "reps", "seed", "sample_mean", "sample_var", "sample_skew",
                 "sample_kurtosis", "ks_distance", "sigma2_ref"});
        csv.row({std::to_string(rep.n), std::to_string(rep.reps), std::to_string(rep.seed),
                 fmt_double(rep.sample_mean), fmt_double(rep.sample_var),
                 fmt_double(rep.sample_skew), fmt_double(rep.sample_kurtosis),
                 fmt_double(rep.ks_distance), fmt_double(rep.sigma2_ref)});
        write_file(common.csv_path, csv.str());
    }
    return kExitOk;
}

int run_rmt(const std::string& series_arg, const std::string& coeffs_arg,
            const std::string& model_arg, std::int64_t n, int dim, const std::string& hist_path,
            int bins, const CommonOpts& common) {
    auto series = parse_series(series_arg, coeffs_arg, "chebyshev", 8, 0);
    auto model = parse_model(model_arg);
    auto rep = sim::rmt_clt_check(series, model, n, dim, common.seed);
    json samples = json::array();
    for (const auto& sample : rep.stieltjes_samples) {
        samples.push_back(json{{"z", {sample.z.real(), sample.z.imag()}},
                               {"empirical", {sample.empirical.real(), sample.empirical.imag()}},
                               {"reference", {sample.reference.real(), sample.reference.imag()}}});
    }
    json j{{"schema", 1},
           {"subcommand", "rmt"},
           {"series", series_json(series)},
           {"model", model.describe()},
           {"N", rep.n},
           {"dim", rep.dim},
           {"seed", rep.seed},
           {"empirical_moments", rep.empirical_moments},
           {"reference_moments", rep.reference_moments},
           {"sigma2_ref", rep.sigma2_ref},
           {"ma_residual", rep.ma_residual},
           {"stieltjes", samples}};
    emit_json(j, common.out_path);
    if (!common.csv_path.empty()) {
        CsvWriter csv;
        csv.row({"N", "dim", "seed", "m1", "m2", "m3", "m4", "m5", "m6", "sigma2_ref",
                 "ma_residual"});
        std::vector<std::string> cells{std::to_string(rep.n), std::to_string(rep.dim),
                                       std::to_string(rep.seed)};
        for (double v : rep.empirical_moments) cells.push_back(fmt_double(v));
        cells.push_back(fmt_double(rep.sigma2_ref));
        cells.push_back(fmt_double(rep.ma_residual));
        csv.row(cells);
        write_file(common.csv_path, csv.str());
    }
    if (!hist_path.empty()) {
        CsvWriter csv;
        csv.row({"bin_center", "density"});
        for (const auto& bin : sim::eigenvalue_histogram(rep.eigenvalues, bins))
            csv.row({fmt_double(bin.center), fmt_double(bin.density)});
        write_file(hist_path, csv.str());
    }
    return kExitOk;
}

int run_breaking(bool check53, bool alpha, bool spectral, bool slope, int m_order,
                 const std::string& p_arg, const std::string& rows_arg,
                 const std::string& partition_arg, const std::string& c_arg,
                 const std::string& d_arg, int k_order, const std::string& j_arg, int grid,
                 const std::string& model_arg, const std::string& n_arg,
                 const CommonOpts& common) {
    int chosen = static_cast<int>(check53) + static_cast<int>(alpha) + static_cast<int>(spectral) +
                 static_cast<int>(slope);
    if (chosen != 1)
        throw std::invalid_argument("breaking: pick exactly one of --check53 --alpha --spectral --slope");

    if (check53) {
        auto p_values = parse_p_values(p_arg);
        auto rep = brkg::theorem53_check(m_order, p_values);
        json rows = json::array();
        for (const auto& row : rep.rows)
            rows.push_back(json{{"k", row.k},
                                {"branch", row.branch},
                                {"required_z", row.required_z},
                                {"z", row.z},
                                {"ok", row.ok}});
        emit_json(json{{"schema", 1},
                       {"subcommand", "breaking.check53"},
                       {"m", rep.m},
                       {"rows", rows},
                       {"all_ok", rep.all_ok}},
                  common.out_path);
        return rep.all_ok ? kExitOk : kExitHypothesis;
    }

    if (alpha) {
        auto rows64 = parse_int_list(rows_arg, "--rows");
        std::vector<int> rows(rows64.begin(), rows64.end());
        part::RowTable table(rows);
        auto p = parse_partition(partition_arg, table.total());
        auto graph = brkg::build_breaking_graph(table, p, parse_p_values(p_arg));
        auto res = brkg::alpha_g(graph, common.threads);
        json edges = json::array();
        for (const auto& e : graph.edges)
            edges.push_back(json{{"row", e.row}, {"subset", e.subset}, {"cost", e.cost}});
        emit_json(json{{"schema", 1},
                       {"subcommand", "breaking.alpha"},
                       {"rows", graph.rows},
                       {"subsets", graph.subsets},
                       {"row_sizes", rows},
                       {"edges", edges},
                       {"alpha", res.value},
                       {"witness_removed_edges", res.witness}},
                  common.out_path);
        return kExitOk;
    }

    if (spectral) {
        brkg::LinearProcessSpec spec;
        spec.c_coeffs = parse_double_list(c_arg, "--c");
        for (const auto& [k, v] : parse_p_values(d_arg)) spec.d[k] = v;  // reuse k:v parser
        auto jvec = parse_int_list(j_arg, "--j");
        auto rep = brkg::verify_spectral_representation(spec, k_order, jvec, grid);
        emit_json(json{{"schema", 1},
                       {"subcommand", "breaking.spectral"},
                       {"k", k_order},
                       {"j", jvec},
                       {"grid", grid},
                       {"lhs", rep.lhs},
                       {"rhs", rep.rhs},
                       {"abs_err", rep.abs_err},
                       {"grid_warning", rep.grid_warning}},
                  common.out_path);
        return kExitOk;
    }

    // slope: J_N scaling of one pair-partition diagram vs alpha_G at z = 1
    auto rows64 = parse_int_list(rows_arg, "--rows");
    std::vector<int> rows(rows64.begin(), rows64.end());
    part::RowTable table(rows);
    auto p = parse_partition(partition_arg, table.total());
    auto model = parse_model(model_arg);
    auto n_values = parse_int_list(n_arg, "--N");
    auto edge = part::edge_matrix(p, table);
    std::vector<double> xs, ys;
    json points = json::array();
    for (auto n : n_values) {
        double v = diag::j_n(edge, n, model, diag::SumStrategy::Auto, eval_options(common));
        xs.push_back(static_cast<double>(n));
        ys.push_back(v);
        points.push_back(json{{"N", n}, {"J_N", v}});
    }
    double fitted = brkg::log_log_slope(xs, ys);
    std::map<int, double> p_inf;
    for (const auto& block : p.blocks())
        p_inf[static_cast<int>(block.size())] = std::numeric_limits<double>::infinity();
    auto graph = brkg::build_breaking_graph(table, p, p_inf);
    auto res = brkg::alpha_g(graph, common.threads);
    emit_json(json{{"schema", 1},
                   {"subcommand", "breaking.slope"},
                   {"rows", rows},
                   {"partition", partition_to_json(p)},
                   {"model", model.describe()},
                   {"points", points},
                   {"fitted_slope", fitted},
                   {"alpha_g", res.value},
                   {"abs_diff", std::abs(fitted - res.value)}},
              common.out_path);
    return kExitOk;
}

int run_selftest(int max_sum, const std::string& model_arg, const CommonOpts& common) {
    auto model = parse_model(model_arg);
    diag::EvalOptions opts = eval_options(common);
    double max_diff = 0.0;
    long cases = 0;
    for (int k = 1; k <= 4; ++k) {
        std::vector<int> deg(static_cast<std::size_t>(k), 1);
        for (;;) {
            int total = 0;
            for (int d : deg) total += d;
            if (total <= max_sum) {
                std::vector<std::int64_t> times(static_cast<std::size_t>(k), 0);
                for (;;) {
                    for (auto world : {cov::World::Classical, cov::World::Free}) {
                        diag::CumulantRequest req;
                        req.degrees = deg;
                        req.times = times;
                        req.world = world;
                        req.model = &model;
                        double a = diag::joint_cumulant(req, opts);
                        double b = diag::oracle_cumulant(req);
                        max_diff = std::max(max_diff, std::abs(a - b));
                        ++cases;
                    }
                    int pos = k - 1;
                    while (pos >= 0 && ++times[static_cast<std::size_t>(pos)] == 3) {
                        times[static_cast<std::size_t>(pos)] = 0;
                        --pos;
                    }
                    if (pos < 0) break;
                }
            }
            int pos = k - 1;
            while (pos >= 0 && ++deg[static_cast<std::size_t>(pos)] == max_sum + 1) {
                deg[static_cast<std::size_t>(pos)] = 1;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    bool pass = max_diff <= 1e-10;
    std::cout << "selftest: " << cases << " cases, max |engine - oracle| = " << fmt_double(max_diff)
              << (pass ? "  [PASS]" : "  [FAIL]") << "\n";
    if (!common.out_path.empty())
        emit_json(json{{"schema", 1},
                       {"subcommand", "selftest"},
                       {"cases", cases},
                       {"max_abs_diff", max_diff},
                       {"pass", pass}},
                  common.out_path);
    return pass ? kExitOk : 1;
}

// Reads --config JSON and injects values as flags the user did not pass.
std::vector<std::string> apply_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot read config file: " + config_path);
    json cfg = json::parse(in);
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const std::string flag = "--" + it.key();
        bool present = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) {
                present = true;
                break;
            }
        if (present) continue;
        std::string value = it.value().is_string() ? it.value().get<std::string>()
                                                   : it.value().dump();
        args.push_back(flag);
        args.push_back(value);
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "freeclt: diagram formulas, exact joint cumulants and empirical CLT checks for\n"
        "Hermite functionals of stationary Gaussian sequences (classical world) and\n"
        "Chebyshev functionals of stationary semicircular families (free world).\n"
        "Exit codes: 0 ok, 2 usage, 3 cap exceeded, 4 hypothesis violation, 5 numeric."};
    app.require_subcommand(1);

    CommonOpts common;
    if (const char* env = std::getenv("FREECLT_BUDGET")) common.budget = std::atof(env);
    app.add_option("--threads", common.threads, "worker threads (default: cores)");
    app.add_option("--budget", common.budget, "evaluation budget (env FREECLT_BUDGET)");
    app.add_option("--seed", common.seed, "64-bit RNG seed");
    app.add_option("--out", common.out_path, "write the JSON report here (default: stdout)");
    app.add_option("--csv", common.csv_path, "write the CSV table here");
    std::string config_file;
    app.add_option("--config", config_file, "JSON config mirroring long flags; flags win");

    // partitions
    auto* sub_part = app.add_subcommand("partitions", "count/enumerate diagram classes");
    std::string rows_arg, class_arg = "classical";
    bool list_flag = false;
    int cap = part::kDefaultEnumerationCap;
    sub_part->add_option("--rows", rows_arg, "row sizes, e.g. 2,2,2")->required();
    sub_part->add_option("--class", class_arg, "pair|noncrossing|classical|free|free-connected");
    sub_part->add_flag("--list", list_flag, "include the partitions in the JSON output");
    sub_part->add_option("--cap", cap, "enumeration cap on the ground-set size");

    // cumulant
    auto* sub_cum = app.add_subcommand("cumulant", "one joint cumulant, optionally oracle-checked");
    std::string degrees_arg, times_arg, world_arg = "classical", model_arg = "geometric:0.5";
    bool oracle_flag = false;
    sub_cum->add_option("--degrees", degrees_arg)->required();
    sub_cum->add_option("--times", times_arg)->required();
    sub_cum->add_option("--world", world_arg, "classical|free");
    sub_cum->add_option("--model", model_arg);
    sub_cum->add_flag("--oracle", oracle_flag, "cross-check against the Wick/Moebius oracle");

    // clt-scan
    auto* sub_scan = app.add_subcommand("clt-scan", "normalized kappa_R table over N");
    std::string series_arg, coeffs_arg, basis_arg, n_list_arg;
    int r_max = 4;
    sub_scan->add_option("--series", series_arg, "preset: H1..,U1..,expand:x2|x3m2x|clip");
    sub_scan->add_option("--coeffs", coeffs_arg, "explicit c_0,c_1,... (c_0 = 0)");
    sub_scan->add_option("--basis", basis_arg, "hermite|chebyshev (for --coeffs / expand)");
    sub_scan->add_option("--model", model_arg);
    sub_scan->add_option("--world", world_arg, "classical|free");
    sub_scan->add_option("--N", n_list_arg, "N values, e.g. 64,128,256")->required();
    sub_scan->add_option("--Rmax", r_max, "highest cumulant order (>= 2)");

    // mc
    auto* sub_mc = app.add_subcommand("mc", "Monte Carlo classical CLT report");
    std::int64_t mc_n = 512, mc_reps = 10000;
    sub_mc->add_option("--series", series_arg);
    sub_mc->add_option("--coeffs", coeffs_arg);
    sub_mc->add_option("--model", model_arg);
    sub_mc->add_option("--N", mc_n);
    sub_mc->add_option("--reps", mc_reps);

    // rmt
    auto* sub_rmt = app.add_subcommand("rmt", "random-matrix free CLT report");
    std::int64_t rmt_n = 64;
    int rmt_dim = 1024, rmt_bins = 64;
    std::string hist_path;
    sub_rmt->add_option("--series", series_arg);
    sub_rmt->add_option("--coeffs", coeffs_arg);
    sub_rmt->add_option("--model", model_arg);
    sub_rmt->add_option("--N", rmt_n);
    sub_rmt->add_option("--dim", rmt_dim);
    sub_rmt->add_option("--hist", hist_path, "eigenvalue histogram CSV path");
    sub_rmt->add_option("--bins", rmt_bins);

    // breaking
    auto* sub_brk = app.add_subcommand("breaking", "alpha_G, threshold check, spectral identity");
    bool f53 = false, falpha = false, fspectral = false, fslope = false;
    int m_order = 1, k_order = 2, grid = 256;
    std::string p_arg, partition_arg, c_arg, d_arg = "2:1", j_arg;
    sub_brk->add_flag("--check53", f53, "evaluate the cost threshold per block size");
    sub_brk->add_flag("--alpha", falpha, "exact optimal breaking value");
    sub_brk->add_flag("--spectral", fspectral, "verify the linear-process spectral identity");
    sub_brk->add_flag("--slope", fslope, "log-log slope of J_N vs alpha_G");
    sub_brk->add_option("--m", m_order, "Appell order m of the threshold");
    sub_brk->add_option("--p", p_arg, "p values as k:p pairs, inf allowed (e.g. 2:inf,3:4)");
    sub_brk->add_option("--rows", rows_arg);
    sub_brk->add_option("--partition", partition_arg, "JSON, e.g. [[1,3],[2,4]]");
    sub_brk->add_option("--c", c_arg, "linear-process coefficients c_0,c_1,...");
    sub_brk->add_option("--d", d_arg, "base cumulants as k:d_k pairs");
    sub_brk->add_option("--k", k_order, "cumulant order for --spectral");
    sub_brk->add_option("--j", j_arg, "time indices j_1,...,j_k for --spectral");
    sub_brk->add_option("--grid", grid, "quadrature grid per dimension");
    sub_brk->add_option("--model", model_arg);
    sub_brk->add_option("--N", n_list_arg, "N values for --slope");

    // selftest
    auto* sub_self = app.add_subcommand("selftest", "exhaustive oracle-equivalence grid");
    int max_sum = 8;
    sub_self->add_option("--max-sum", max_sum, "cap on the total degree (default 8)");
    sub_self->add_option("--model", model_arg);

    // global flags may follow the subcommand name
    for (auto* sub : {sub_part, sub_cum, sub_scan, sub_mc, sub_rmt, sub_brk, sub_self})
        sub->fallthrough();

    try {
        auto args = apply_config(argc, argv);
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());

        if (*sub_part) return run_partitions(rows_arg, class_arg, list_flag, cap, common);
        if (*sub_cum)
            return run_cumulant(degrees_arg, times_arg, world_arg, model_arg, oracle_flag, common);
        if (*sub_scan)
            return run_clt_scan(series_arg, coeffs_arg, basis_arg, model_arg, world_arg,
                                n_list_arg, r_max, common);
        if (*sub_mc) return run_mc(series_arg, coeffs_arg, model_arg, mc_n, mc_reps, common);
        if (*sub_rmt)
            return run_rmt(series_arg, coeffs_arg, model_arg, rmt_n, rmt_dim, hist_path, rmt_bins,
                           common);
        if (*sub_brk)
            return run_breaking(f53, falpha, fspectral, fslope, m_order, p_arg, rows_arg,
                                partition_arg, c_arg, d_arg, k_order, j_arg, grid, model_arg,
                                n_list_arg, common);
        if (*sub_self) return run_selftest(max_sum, model_arg, common);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << error_json(kExitUsage, "usage", e.what()).dump() << "\n";
        return kExitUsage;
    } catch (const cap_error& e) {
        std::cerr << error_json(kExitCap, "cap", e.what()).dump() << "\n";
        return kExitCap;
    } catch (const hypothesis_error& e) {
        std::cerr << error_json(kExitHypothesis, "hypothesis", e.what()).dump() << "\n";
        return kExitHypothesis;
    } catch (const numeric_error& e) {
        std::cerr << error_json(kExitNumeric, "numeric", e.what()).dump() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << error_json(kExitUsage, "usage", e.what()).dump() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << error_json(kExitNumeric, "numeric", e.what()).dump() << "\n";
        return kExitNumeric;
    }
}
