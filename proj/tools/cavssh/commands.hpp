#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cavssh/cavssh.hpp"
#include "config.hpp"
#include "output.hpp"

namespace cli {

using cavssh::cplx;
using cavssh::CsvWriter;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Each row block is rendered into its own buffer and joined in index order.
template <class Render>
std::string render_rows(std::size_t count, unsigned threads, Render&& render) {
    std::vector<std::string> blocks(count);
    cavssh::parallel_for(count, threads, [&](std::size_t i) {
        std::ostringstream os;
        CsvWriter w(os);
        render(i, w);
        blocks[i] = os.str();
    });
    std::string out;
    for (auto& b : blocks) out += b;
    return out;
}

inline std::string header_line(std::initializer_list<std::string_view> names) {
    std::ostringstream os;
    CsvWriter(os).header(names);
    return os.str();
}

inline void run_bands(const RunConfig& cfg, unsigned threads, OutputSet& out) {
    const auto& k = cfg.k;
    std::string csv = header_line({"k", "valence", "conduction", "gap", "dipole", "theta"});
    csv += render_rows(k.count, threads, [&](std::size_t i, CsvWriter& w) {
        const double kk = k[i];
        const auto e = cavssh::band_energies(kk, cfg.model);
        w.cell(kk).cell(e.valence).cell(e.conduction).cell(cavssh::band_gap(kk, cfg.model));
        w.cell(cavssh::dipole(kk, cfg.model)).cell(cavssh::bloch_phase(kk, cfg.model));
        w.end_row();
    });
    out.add("bands.csv", std::move(csv));
}

inline void run_zak(const RunConfig& cfg, unsigned, OutputSet& out) {
    const double gamma = cavssh::zak_phase(cfg.model, cfg.n_k);
    const auto edge = cavssh::band_edge_params(cfg.model);
    std::ostringstream os;
    CsvWriter w(os);
    w.header({"t1", "t2", "zak_phase", "gap0", "curvature", "dipole_slope"});
    w.cell(cfg.model.t1).cell(cfg.model.t2).cell(gamma).cell(edge.gap0).cell(edge.curvature).cell(edge.dipole_slope);
    w.end_row();
    out.add("zak.csv", os.str());
    out.meta("topological", cfg.model.topological());
}

inline void run_self_energy(const RunConfig& cfg, unsigned threads, OutputSet& out) {
    const auto& grid = cfg.omega_grid();
    const cavssh::PolarizationBubble bubble(cfg.model, cfg.cavity.eta, cfg.n_k);
    const double scale = static_cast<double>(cfg.self_energy.n + 1);
    std::string csv = header_line({"omega", "ReSigma", "ImSigma"});
    csv += render_rows(grid.count, threads, [&](std::size_t i, CsvWriter& w) {
        const cplx s = scale * cavssh::photon_self_energy(bubble, grid[i], cfg.cavity);
        w.cell(grid[i]).cell(s.real()).cell(s.imag());
        w.end_row();
    });
    out.add("self_energy.csv", std::move(csv));
    out.meta("n", cfg.self_energy.n);
}

inline void run_spectrum(const RunConfig& cfg, unsigned threads, OutputSet& out) {
    const auto& wg = cfg.omega_grid();
    const auto& qg = cfg.q_grid();
    const auto map = cavssh::spectral_map(wg, qg, cfg.model, cfg.cavity, cfg.n_k, threads);
    std::string csv = header_line({"omega", "q", "A"});
    csv += render_rows(wg.count, threads, [&](std::size_t i, CsvWriter& w) {
        for (std::size_t j = 0; j < qg.count; ++j) {
            w.cell(wg[i]).cell(qg[j]).cell(map.at(i, j));
            w.end_row();
        }
    });
    out.add("spectrum.csv", std::move(csv));
    out.meta("omega_c", cfg.cavity.omega_c);
}

inline void run_hopfield(const RunConfig& cfg, unsigned threads, OutputSet& out) {
    const auto& qg = cfg.q_grid();
    const double delta_pi = cavssh::band_gap(std::numbers::pi, cfg.model);
    std::string csv = header_line({"q", "lower", "upper"});
    csv += render_rows(qg.count, threads, [&](std::size_t j, CsvWriter& w) {
        const auto b = cavssh::hopfield_branches(qg[j], cfg.cavity.g, cfg.cavity.mass_beta, delta_pi);
        w.cell(qg[j]).cell(b.lower).cell(b.upper);
        w.end_row();
    });
    out.add("hopfield.csv", std::move(csv));
}

inline void run_kerr_scan(const RunConfig& cfg, unsigned threads, OutputSet& out) {
    const auto& block = cfg.kerr_scan;
    const auto rows = cavssh::kerr_scan(block.r_values, cfg.model, cfg.cavity, cfg.n_k, block.n_max, threads);
    std::ostringstream scan;
    std::ostringstream closed;
    std::ostringstream ladder;
    CsvWriter ws(scan);
    CsvWriter wc(closed);
    CsvWriter wl(ladder);
    ws.header({"r", "omega0", "ReU", "ImU", "ReUprime", "ImUprime", "residual", "converged"});
    wc.header({"r", "omega_c", "ReU", "ImU"});
    wl.header({"r", "n", "ReOmega", "ImOmega"});
    json errors = json::object();
    for (const auto& row : rows) {
        const bool ok = row.converged;
        const auto& f = row.fit;
        ws.cell(row.r).cell(ok ? f.omega0.real() : kNaN);
        ws.cell(ok ? f.U.real() : kNaN).cell(ok ? f.U.imag() : kNaN);
        ws.cell(ok ? f.Uprime.real() : kNaN).cell(ok ? f.Uprime.imag() : kNaN);
        ws.cell(ok ? f.fit_residual : kNaN).cell(ok);
        ws.end_row();
        wc.cell(row.r).cell(row.omega_c).cell(row.U_closed.real()).cell(row.U_closed.imag());
        wc.end_row();
        for (std::size_t n = 0; n < f.omega_n_list.size(); ++n) {
            wl.cell(row.r).cell(n).cell(f.omega_n_list[n].real()).cell(f.omega_n_list[n].imag());
            wl.end_row();
        }
        const std::string key = "r=" + cavssh::format_double(row.r);
        out.converged(key, ok);
        if (!ok) errors[key] = row.error;
    }
    out.add("kerr_scan.csv", scan.str());
    out.add("kerr_closed.csv", closed.str());
    out.add("kerr_ladder.csv", ladder.str());
    if (!errors.empty()) out.meta("errors", errors);
}

inline void run_vertex(const RunConfig& cfg, unsigned threads, OutputSet& out) {
    const auto& grid = cfg.omega_grid();
    const std::vector<double> w = grid.values();
    const std::size_t m = w.size();
    std::string csv = header_line({"omega1", "omega2", "ReG4", "ImG4", "method"});
    for (const auto& method : cfg.vertex.methods) {
        if (method == "direct") {
            const cavssh::DirectVertex v(cfg.model, cfg.cavity.eta, cfg.kernel, cfg.n_k2d, cfg.vertex.prefactor);
            const auto g = v.matrix(w, threads);
            csv += render_rows(m, threads, [&](std::size_t i, CsvWriter& wr) {
                for (std::size_t j = 0; j < m; ++j) {
                    wr.cell(w[i]).cell(w[j]).cell(g[i * m + j].real()).cell(g[i * m + j].imag()).cell("direct");
                    wr.end_row();
                }
            });
        } else {
            const auto edge = cavssh::band_edge_params(cfg.model);
            csv += render_rows(m, threads, [&](std::size_t i, CsvWriter& wr) {
                for (std::size_t j = 0; j < m; ++j) {
                    cplx g{kNaN, kNaN};
                    // below-threshold pairs are left as nan
                    const auto s = cavssh::evaluate_saddle(w[i], w[j], edge);
                    if (s.above_first && s.above_second) {
                        g = cavssh::gamma4_stationary(w[i], w[j], cfg.kernel, edge, cfg.cavity.eta,
                                                      cfg.vertex.prefactor);
                    }
                    wr.cell(w[i]).cell(w[j]).cell(g.real()).cell(g.imag()).cell("stationary");
                    wr.end_row();
                }
            });
        }
    }
    out.add("vertex.csv", std::move(csv));
}

inline void run_saddle(const RunConfig& cfg, unsigned threads, OutputSet& out) {
    const auto& grid = cfg.omega_grid();
    const auto edge = cavssh::band_edge_params(cfg.model);
    std::string csv = header_line({"omega1", "omega2", "q_star", "q_star_prime", "above_first", "above_second"});
    csv += render_rows(grid.count, threads, [&](std::size_t i, CsvWriter& w) {
        for (std::size_t j = 0; j < grid.count; ++j) {
            const auto s = cavssh::evaluate_saddle(grid[i], grid[j], edge);
            w.cell(grid[i]).cell(grid[j]).cell(s.q_star).cell(s.q_star_prime).cell(s.above_first).cell(s.above_second);
            w.end_row();
        }
    });
    out.add("saddle.csv", std::move(csv));
    out.meta("band_edge", {{"gap0", edge.gap0}, {"curvature", edge.curvature}, {"dipole_slope", edge.dipole_slope}});
}

namespace detail {

inline std::string grid_comment(const cavssh::FrequencyGrid& g) {
    return "# omega grid start=" + cavssh::format_double(g.start) + " stop=" + cavssh::format_double(g.stop) +
           " count=" + std::to_string(g.count) + "; rows omega1, columns omega2\n";
}

inline void dump_matrix(OutputSet& out, const std::string& stem, const cavssh::BiphotonState& s, unsigned threads) {
    const auto n = static_cast<std::size_t>(s.amplitude.rows());
    for (int part = 0; part < 2; ++part) {
        std::string body = grid_comment(s.grid);
        body += render_rows(n, threads, [&](std::size_t i, CsvWriter& w) {
            for (std::size_t j = 0; j < n; ++j) {
                const cplx a = s.amplitude(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                w.cell(part == 0 ? a.real() : a.imag());
            }
            w.end_row();
        });
        out.add(stem + (part == 0 ? "_re.csv" : "_im.csv"), std::move(body));
    }
}

inline void schmidt_row(CsvWriter& w, double zeta, const cavssh::SchmidtSpectrum& s, const cavssh::GeometricFit& fit) {
    w.cell(zeta).cell(s.entropy).cell(s.entropy_bits);
    for (std::size_t n = 0; n < cavssh::kSchmidtFitModes; ++n) {
        w.cell(n < s.coefficients.size() ? s.coefficients[n] : kNaN);
    }
    w.cell(fit.ratio).cell(fit.r2);
    w.end_row();
}

inline void schmidt_header(CsvWriter& w) {
    w.header({"zeta", "S_nats", "S_bits", "lambda0", "lambda1", "lambda2", "lambda3", "ratio_fit", "fit_r2"});
}

}  // namespace detail

inline void run_biphoton(const RunConfig& cfg, unsigned threads, OutputSet& out) {
    const auto& grid = cfg.omega_grid();
    const auto& b = cfg.biphoton;
    const auto in = cavssh::input_state(grid, b.omega0, b.sigma);
    Eigen::MatrixXcd gamma;
    if (b.vertex == "direct") {
        const cavssh::DirectVertex v(cfg.model, cfg.cavity.eta, cfg.kernel, cfg.n_k2d, cfg.vertex.prefactor);
        const std::vector<double> w = grid.values();
        const auto g = v.matrix(w, threads);
        const auto n = static_cast<Eigen::Index>(w.size());
        gamma.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) gamma(i, j) = g[static_cast<std::size_t>(i * n + j)];
        }
    } else {
        gamma = cavssh::stationary_kernel_matrix(grid, cavssh::band_edge_params(cfg.model), cfg.kernel.zeta,
                                                 cfg.kernel.V0);
    }
    const auto state = cavssh::apply_vertex(in, gamma);
    const auto spectrum = cavssh::schmidt_decompose(state);
    const std::size_t m = std::min(cavssh::kSchmidtFitModes, spectrum.coefficients.size());
    const auto fit = cavssh::geometric_fit(std::span<const double>(spectrum.coefficients.data(), m));

    std::ostringstream summary;
    CsvWriter ws(summary);
    detail::schmidt_header(ws);
    detail::schmidt_row(ws, cfg.kernel.zeta, spectrum, fit);
    out.add("biphoton.csv", summary.str());

    std::ostringstream coeffs;
    CsvWriter wc(coeffs);
    wc.header({"n", "lambda"});
    for (std::size_t n = 0; n < spectrum.coefficients.size(); ++n) {
        wc.cell(n).cell(spectrum.coefficients[n]);
        wc.end_row();
    }
    out.add("schmidt_coefficients.csv", coeffs.str());

    const auto input_spectrum = cavssh::schmidt_decompose(in);
    out.meta("input_entropy_nats", input_spectrum.entropy);
    if (b.dump_state) {
        detail::dump_matrix(out, "psi_in", in, threads);
        detail::dump_matrix(out, "psi_out", state, threads);
    }
}

inline void run_schmidt_scan(const RunConfig& cfg, unsigned threads, OutputSet& out) {
    const auto& grid = cfg.omega_grid();
    const auto& s = cfg.schmidt_scan;
    const auto edge = cavssh::band_edge_params(cfg.model);
    const auto rows = cavssh::entropy_scan(s.zeta_values, grid, s.omega0, s.sigma, edge, cfg.kernel.V0, threads);

    std::ostringstream scan;
    CsvWriter ws(scan);
    detail::schmidt_header(ws);
    std::ostringstream analytic;
    CsvWriter wa(analytic);
    wa.header({"zeta", "ratio", "lambda0_closed", "lambda0", "lambda1", "lambda2", "lambda3"});
    json errors = json::object();
    for (const auto& row : rows) {
        const std::string key = "zeta=" + cavssh::format_double(row.zeta);
        out.converged(key, row.ok);
        if (row.ok) {
            detail::schmidt_row(ws, row.zeta, row.spectrum, row.fit);
        } else {
            errors[key] = row.error;
            detail::schmidt_row(ws, row.zeta, {{}, kNaN, kNaN}, {});
        }
        if (row.zeta > 0.0) {
            const auto a = cavssh::analytic_schmidt(row.zeta, static_cast<int>(cavssh::kSchmidtFitModes) - 1);
            wa.cell(row.zeta).cell(a.ratio).cell(a.printed[0]);
            for (double l : a.normalized) wa.cell(l);
            wa.end_row();
        }
    }
    out.add("schmidt_scan.csv", scan.str());
    out.add("schmidt_analytic.csv", analytic.str());
    if (!errors.empty()) out.meta("errors", errors);
}

inline void run_dressed_bands(const RunConfig& cfg, unsigned threads, OutputSet& out) {
    const auto& kg = cfg.k;
    std::string csv = header_line({"k", "omega", "ReScv", "ImScv", "Eplus", "Eminus"});
    auto row = [&](CsvWriter& w, double k, double omega) {
        const auto m = cavssh::sigma_matrix(k, omega, cfg.model, cfg.cavity);
        const auto e = cavssh::dressed_bands(k, omega, cfg.model, cfg.cavity);
        w.cell(k).cell(omega).cell(m.sigma_cv.real()).cell(m.sigma_cv.imag()).cell(e.e_plus).cell(e.e_minus);
        w.end_row();
    };
    if (cfg.dressed_bands.on_shell) {
        csv += render_rows(kg.count, threads, [&](std::size_t i, CsvWriter& w) {
            const auto e = cavssh::band_energies(kg[i], cfg.model);
            row(w, kg[i], e.valence);
            row(w, kg[i], e.conduction);
        });
    } else {
        const auto& wg = cfg.omega_grid();
        csv += render_rows(kg.count, threads, [&](std::size_t i, CsvWriter& w) {
            for (std::size_t j = 0; j < wg.count; ++j) row(w, kg[i], wg[j]);
        });
    }
    out.add("dressed_bands.csv", std::move(csv));
}

inline void run_keldysh(const RunConfig& cfg, unsigned threads, OutputSet& out) {
    const auto& wg = cfg.omega_grid();
    const auto& qg = cfg.q_grid();
    const cavssh::PolarizationBubble bubble(cfg.model, cfg.cavity.eta, cfg.n_k);
    std::string csv = header_line({"omega", "q", "ReGK", "ImGK", "A", "n"});
    csv += render_rows(wg.count, threads, [&](std::size_t i, CsvWriter& w) {
        const double omega = wg[i];
        const cplx sigma = cavssh::photon_self_energy(bubble, omega, cfg.cavity);
        const double nb = cavssh::bose_occupation(omega, cfg.thermal);
        for (std::size_t j = 0; j < qg.count; ++j) {
            const double q = qg[j];
            const cplx gk = cavssh::keldysh_green_from_sigma(omega, q, cfg.cavity, sigma, nb);
            const double a =
                cavssh::spectral_from_green(cavssh::dressed_propagator_from_sigma(omega, q, cfg.cavity, sigma));
            const double n = cavssh::occupation_from_sigma(omega, q, cfg.cavity, sigma, nb);
            w.cell(omega).cell(q).cell(gk.real()).cell(gk.imag()).cell(a).cell(n);
            w.end_row();
        }
    });
    out.add("keldysh.csv", std::move(csv));
    out.meta("temperature", cfg.thermal.temperature);
}

/// Command-specific checks that need no heavy computation; failures are ConfigInvalid.
inline void preflight(const std::string& command, const RunConfig& cfg) {
    auto needs_omega = [&] { (void)cfg.omega_grid(); };
    auto needs_q = [&] { (void)cfg.q_grid(); };
    auto state_fits = [&](double omega0, double sigma) {
        try {
            (void)cavssh::input_state(cfg.omega_grid(), omega0, sigma);
        } catch (const cavssh::Error& e) {
            throw ConfigInvalid(e.what());
        }
    };
    if (command == "self-energy" || command == "vertex" || command == "saddle") needs_omega();
    if (command == "hopfield") needs_q();
    if (command == "spectrum" || command == "keldysh") {
        needs_omega();
        needs_q();
    }
    if (command == "dressed-bands" && !cfg.dressed_bands.on_shell) needs_omega();
    if (command == "keldysh" && cfg.thermal.temperature > 0.0 && !(cfg.omega_grid().start > 0.0)) {
        throw ConfigInvalid("keldysh at T > 0 needs grids.omega.start > 0");
    }
    if (command == "vertex") {
        for (const auto& m : cfg.vertex.methods) {
            if (m == "stationary" && cfg.kernel.zeta == 0.0) throw ConfigInvalid("stationary vertex needs kernel.zeta > 0");
        }
    }
    if (command == "biphoton") state_fits(cfg.biphoton.omega0, cfg.biphoton.sigma);
    if (command == "schmidt-scan") state_fits(cfg.schmidt_scan.omega0, cfg.schmidt_scan.sigma);
}

using CommandFn = std::function<void(const RunConfig&, unsigned, OutputSet&)>;

inline const std::map<std::string, CommandFn>& command_table() {
    static const std::map<std::string, CommandFn> table{
        {"bands", run_bands},
        {"zak", run_zak},
        {"self-energy", run_self_energy},
        {"spectrum", run_spectrum},
        {"hopfield", run_hopfield},
        {"kerr-scan", run_kerr_scan},
        {"vertex", run_vertex},
        {"saddle", run_saddle},
        {"biphoton", run_biphoton},
        {"schmidt-scan", run_schmidt_scan},
        {"dressed-bands", run_dressed_bands},
        {"keldysh", run_keldysh},
    };
    return table;
}

}  // namespace cli
