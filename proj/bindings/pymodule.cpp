// Python bindings for the core operations: enumeration, cumulants, scans,
// sampling and the breaking machinery. Shapes mirror the C++ API; partitions
// travel as lists of lists of 1-based ints.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "freeclt/breaking.hpp"
#include "freeclt/covariance.hpp"
#include "freeclt/diagram.hpp"
#include "freeclt/orthopoly.hpp"
#include "freeclt/partitions.hpp"
#include "freeclt/simulate.hpp"

namespace py = pybind11;
using namespace freeclt;
namespace part = freeclt::partitions;
namespace ortho = freeclt::orthopoly;
namespace cov = freeclt::covariance;
namespace diag = freeclt::diagram;
namespace sim = freeclt::simulate;
namespace brkg = freeclt::breaking;

namespace {

using Blocks = std::vector<std::vector<int>>;

Blocks to_blocks(const part::Partition& p) { return p.blocks(); }

part::Partition from_blocks(const Blocks& blocks, int ground) {
    return part::Partition(blocks, ground);
}

cov::CovarianceModel make_model(const std::string& kind, py::object arg) {
    if (kind == "geometric") return cov::CovarianceModel::geometric(arg.cast<double>());
    if (kind == "power") return cov::CovarianceModel::power(arg.cast<double>());
    if (kind == "tabulated")
        return cov::CovarianceModel::tabulated(arg.cast<std::vector<double>>());
    throw std::invalid_argument("model kind must be geometric|power|tabulated");
}

ortho::FunctionalSeries make_series(const std::string& basis, std::vector<double> coeffs) {
    return ortho::FunctionalSeries(ortho::basis_from_name(basis), std::move(coeffs));
}

diag::CumulantRequest make_request(const std::vector<int>& degrees,
                                   const std::vector<std::int64_t>& times,
                                   const std::string& world, const cov::CovarianceModel& model) {
    diag::CumulantRequest req;
    req.degrees = degrees;
    req.times = times;
    req.world = cov::world_from_name(world);
    req.model = &model;
    return req;
}

}  // namespace

PYBIND11_MODULE(_freeclt, m) {
    m.doc() = "diagram-formula CLT engine: partitions, cumulants, scans, simulation";

    py::register_exception<cap_error>(m, "CapError");
    py::register_exception<hypothesis_error>(m, "HypothesisError");
    py::register_exception<numeric_error>(m, "NumericError");

    // ---- partitions ----
    m.def("enumerate_pair_partitions", [](int mm, int cap) {
        std::vector<Blocks> out;
        for (const auto& p : part::enumerate_pair_partitions(mm, cap)) out.push_back(to_blocks(p));
        return out;
    }, py::arg("m"), py::arg("cap") = part::kDefaultEnumerationCap);

    m.def("is_noncrossing", [](const Blocks& blocks, int ground) {
        return part::is_noncrossing(from_blocks(blocks, ground));
    }, py::arg("blocks"), py::arg("ground"));

    m.def("is_nonhomogeneous", [](const Blocks& blocks, const std::vector<int>& rows) {
        part::RowTable t(rows);
        return part::is_nonhomogeneous(from_blocks(blocks, t.total()), t);
    });
    m.def("is_inhomogeneous", [](const Blocks& blocks, const std::vector<int>& rows) {
        part::RowTable t(rows);
        return part::is_inhomogeneous(from_blocks(blocks, t.total()), t);
    });
    m.def("is_connected", [](const Blocks& blocks, const std::vector<int>& rows) {
        part::RowTable t(rows);
        return part::is_connected(from_blocks(blocks, t.total()), t);
    });

    m.def("classical_diagrams", [](const std::vector<int>& rows, int cap) {
        std::vector<Blocks> out;
        for (const auto& p : part::enumerate_classical_diagrams(part::RowTable(rows), cap))
            out.push_back(to_blocks(p));
        return out;
    }, py::arg("rows"), py::arg("cap") = part::kDefaultEnumerationCap);

    m.def("free_diagrams", [](const std::vector<int>& rows, bool connected_only, int cap) {
        std::vector<Blocks> out;
        for (const auto& p : part::enumerate_free_diagrams(part::RowTable(rows), connected_only, cap))
            out.push_back(to_blocks(p));
        return out;
    }, py::arg("rows"), py::arg("connected_only") = true,
       py::arg("cap") = part::kDefaultEnumerationCap);

    m.def("edge_matrix", [](const Blocks& blocks, const std::vector<int>& rows) {
        part::RowTable t(rows);
        auto em = part::edge_matrix(from_blocks(blocks, t.total()), t);
        std::vector<std::vector<int>> out(static_cast<std::size_t>(em.k),
                                          std::vector<int>(static_cast<std::size_t>(em.k)));
        for (int i = 0; i < em.k; ++i)
            for (int j = 0; j < em.k; ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = em.at(i, j);
        return out;
    });

    // ---- orthopoly ----
    m.def("hermite_eval", &ortho::hermite_eval);
    m.def("chebyshev_eval", &ortho::chebyshev_eval);
    m.def("expand", [](const std::function<double(double)>& f, const std::string& basis,
                       int max_deg, int quad_order) {
        auto s = ortho::expand(f, ortho::basis_from_name(basis), max_deg, quad_order);
        return py::dict(py::arg("basis") = ortho::basis_name(s.basis), py::arg("coeffs") = s.coeffs,
                        py::arg("rank") = ortho::rank(s), py::arg("dropped_c0") = s.dropped_c0,
                        py::arg("tail_mass") = s.tail_mass);
    }, py::arg("f"), py::arg("basis"), py::arg("max_deg"), py::arg("quad_order"));
    m.def("series_rank", [](const std::string& basis, std::vector<double> coeffs) {
        return ortho::rank(make_series(basis, std::move(coeffs)));
    });

    // ---- covariance ----
    m.def("covariance_value", [](const std::string& kind, py::object arg, std::int64_t t) {
        return make_model(kind, std::move(arg)).r(t);
    });
    m.def("functional_covariance",
          [](const std::string& basis, std::vector<double> coeffs, const std::string& kind,
             py::object arg, std::int64_t t) {
              return cov::functional_covariance(make_series(basis, std::move(coeffs)),
                                                make_model(kind, std::move(arg)), t);
          });
    m.def("sigma_squared",
          [](const std::string& basis, std::vector<double> coeffs, const std::string& kind,
             py::object arg, const std::string& world) {
              auto sig = cov::sigma_squared(make_series(basis, std::move(coeffs)),
                                            make_model(kind, std::move(arg)),
                                            cov::world_from_name(world));
              return py::dict(py::arg("value") = sig.value, py::arg("tail_bound") = sig.tail_bound,
                              py::arg("zero_flagged") = sig.zero_flagged);
          });
    m.def("summability_check",
          [](const std::string& basis, std::vector<double> coeffs, const std::string& kind,
             py::object arg) {
              auto rep = cov::summability_check(make_series(basis, std::move(coeffs)),
                                                make_model(kind, std::move(arg)));
              return py::dict(py::arg("summable") = rep.summable, py::arg("rank") = rep.rank,
                              py::arg("witness") = rep.witness);
          });
    m.def("psd_check", [](const std::string& kind, py::object arg, int trunc, int grid) {
        auto rep = cov::psd_check(make_model(kind, std::move(arg)), trunc, grid);
        return py::dict(py::arg("min_spectral_value") = rep.min_spectral_value,
                        py::arg("flagged") = rep.flagged);
    });

    // ---- diagram ----
    m.def("joint_cumulant",
          [](const std::vector<int>& degrees, const std::vector<std::int64_t>& times,
             const std::string& world, const std::string& kind, py::object arg) {
              auto model = make_model(kind, std::move(arg));
              return diag::joint_cumulant(make_request(degrees, times, world, model));
          });
    m.def("oracle_cumulant",
          [](const std::vector<int>& degrees, const std::vector<std::int64_t>& times,
             const std::string& world, const std::string& kind, py::object arg) {
              auto model = make_model(kind, std::move(arg));
              return diag::oracle_cumulant(make_request(degrees, times, world, model));
          });
    m.def("joint_moment_free",
          [](const std::vector<int>& degrees, const std::vector<std::int64_t>& times,
             const std::string& kind, py::object arg) {
              auto model = make_model(kind, std::move(arg));
              return diag::joint_moment_free(degrees, times, model);
          });
    m.def("j_n", [](const std::vector<std::vector<int>>& l, std::int64_t n,
                    const std::string& kind, py::object arg) {
        part::EdgeMatrix em;
        em.k = static_cast<int>(l.size());
        em.l.assign(static_cast<std::size_t>(em.k) * em.k, 0);
        for (int i = 0; i < em.k; ++i)
            for (int j = 0; j < em.k; ++j) em.at(i, j) = l[static_cast<std::size_t>(i)].at(static_cast<std::size_t>(j));
        auto model = make_model(kind, std::move(arg));
        return diag::j_n(em, n, model);
    });
    m.def("kappa_r_sn",
          [](const std::string& basis, std::vector<double> coeffs, const std::string& kind,
             py::object arg, std::int64_t n, int r, const std::string& world, unsigned threads) {
              auto model = make_model(kind, std::move(arg));
              diag::EvalOptions opts;
              opts.threads = threads;
              return diag::kappa_r_sn(make_series(basis, std::move(coeffs)), model, n, r,
                                      cov::world_from_name(world), opts);
          },
          py::arg("basis"), py::arg("coeffs"), py::arg("kind"), py::arg("arg"), py::arg("n"),
          py::arg("r"), py::arg("world"), py::arg("threads") = 1);
    m.def("kappa2_sn_closed",
          [](const std::string& basis, std::vector<double> coeffs, const std::string& kind,
             py::object arg, std::int64_t n, const std::string& world) {
              auto model = make_model(kind, std::move(arg));
              return diag::kappa2_sn_closed(make_series(basis, std::move(coeffs)), model, n,
                                            cov::world_from_name(world));
          });

    // ---- simulate ----
    m.def("sample_gaussian_path", [](const std::string& kind, py::object arg, std::int64_t n,
                                     std::uint64_t seed) {
        return sim::sample_gaussian_path(make_model(kind, std::move(arg)), n, seed);
    });
    m.def("mc_distribution",
          [](const std::string& basis, std::vector<double> coeffs, const std::string& kind,
             py::object arg, std::int64_t n, std::int64_t reps, std::uint64_t seed,
             unsigned threads) {
              auto rep = sim::mc_distribution(make_series(basis, std::move(coeffs)),
                                              make_model(kind, std::move(arg)), n, reps, seed,
                                              threads);
              return py::dict(py::arg("reps") = rep.reps, py::arg("n") = rep.n,
                              py::arg("sample_mean") = rep.sample_mean,
                              py::arg("sample_var") = rep.sample_var,
                              py::arg("sample_skew") = rep.sample_skew,
                              py::arg("sample_kurtosis") = rep.sample_kurtosis,
                              py::arg("ks_distance") = rep.ks_distance,
                              py::arg("sigma2_ref") = rep.sigma2_ref, py::arg("seed") = rep.seed);
          },
          py::arg("basis"), py::arg("coeffs"), py::arg("kind"), py::arg("arg"), py::arg("n"),
          py::arg("reps"), py::arg("seed"), py::arg("threads") = 1);
    m.def("ma_coefficients", [](const std::string& kind, py::object arg, int max_lag) {
        auto ma = sim::ma_coefficients(make_model(kind, std::move(arg)), max_lag);
        return py::dict(py::arg("a") = ma.a, py::arg("residual") = ma.residual);
    });
    m.def("stieltjes_semicircle", &sim::stieltjes_semicircle);
    m.def("stieltjes_empirical", &sim::stieltjes_empirical);
    m.def("rmt_clt_check",
          [](const std::string& basis, std::vector<double> coeffs, const std::string& kind,
             py::object arg, std::int64_t n, int dim, std::uint64_t seed) {
              auto rep = sim::rmt_clt_check(make_series(basis, std::move(coeffs)),
                                            make_model(kind, std::move(arg)), n, dim, seed);
              py::list samples;
              for (const auto& s : rep.stieltjes_samples)
                  samples.append(py::make_tuple(s.z, s.empirical, s.reference));
              return py::dict(py::arg("dim") = rep.dim, py::arg("n") = rep.n,
                              py::arg("empirical_moments") = rep.empirical_moments,
                              py::arg("reference_moments") = rep.reference_moments,
                              py::arg("sigma2_ref") = rep.sigma2_ref,
                              py::arg("ma_residual") = rep.ma_residual,
                              py::arg("eigenvalues") = rep.eigenvalues,
                              py::arg("stieltjes") = samples);
          });

    // ---- breaking ----
    m.def("alpha_g", [](const std::vector<int>& rows, const Blocks& blocks,
                        const std::map<int, double>& p_values, unsigned threads) {
        part::RowTable t(rows);
        auto g = brkg::build_breaking_graph(t, from_blocks(blocks, t.total()), p_values);
        auto res = brkg::alpha_g(g, threads);
        return py::make_tuple(res.value, res.witness);
    }, py::arg("rows"), py::arg("blocks"), py::arg("p_values"), py::arg("threads") = 1);
    m.def("theorem53_check", [](int m_order, const std::map<int, double>& p_values) {
        auto rep = brkg::theorem53_check(m_order, p_values);
        py::list rows;
        for (const auto& r : rep.rows)
            rows.append(py::dict(py::arg("k") = r.k, py::arg("branch") = r.branch,
                                 py::arg("required_z") = r.required_z, py::arg("z") = r.z,
                                 py::arg("ok") = r.ok));
        return py::dict(py::arg("m") = rep.m, py::arg("rows") = rows,
                        py::arg("all_ok") = rep.all_ok);
    });
    m.def("spectral_cumulant_linear",
          [](const std::vector<double>& c, const std::map<int, double>& d, int k,
             const std::vector<double>& x) {
              brkg::LinearProcessSpec spec;
              spec.c_coeffs = c;
              spec.d = d;
              return brkg::spectral_cumulant_linear(spec, k, x);
          });
    m.def("verify_spectral_representation",
          [](const std::vector<double>& c, const std::map<int, double>& d, int k,
             const std::vector<std::int64_t>& j, int grid) {
              brkg::LinearProcessSpec spec;
              spec.c_coeffs = c;
              spec.d = d;
              auto rep = brkg::verify_spectral_representation(spec, k, j, grid);
              return py::dict(py::arg("lhs") = rep.lhs, py::arg("rhs") = rep.rhs,
                              py::arg("abs_err") = rep.abs_err,
                              py::arg("grid_warning") = rep.grid_warning);
          });
}
