#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dbar/operators.hpp"
#include "dbar/serialize.hpp"

namespace dbar::cli {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CurveFlags {
    int r = 0, s = 0;
    std::string curve_file;

    Curve resolve() const {
        if (!curve_file.empty()) return curve_from_file(curve_file);
        if (r > 0 && s > 0) return Curve::cusp(r, s);
        throw validation_error("specify a curve with --r/--s or --curve FILE");
    }
};

struct QuadFlags {
    int nodes = 2048; // circle rule
    int n_theta = 1024;
    int panels = 3;
    int order = 16;
    double eps0 = 0.0;
    double pv_shrink = 0.5;
    double pv_tol = 1e-9;
    int pv_steps = 40;

    QuadOptions to_options(std::optional<double> rho) const {
        QuadOptions q;
        q.n_theta = n_theta;
        q.panels_per_segment = panels;
        q.gl_order = order;
        q.domain_radius = rho;
        q.pv = PVConfig{eps0, pv_shrink, pv_steps, pv_tol};
        return q;
    }
};

inline std::vector<cx> parse_targets(const std::vector<std::string>& raw) {
    std::vector<cx> out;
    for (const auto& s : raw) out.push_back(parse_complex(s));
    if (out.empty()) throw validation_error("at least one --t target required");
    return out;
}

inline void emit(const std::string& payload, const std::string& out_file, std::ostream& out) {
    if (out_file.empty()) {
        out << payload;
        return;
    }
    std::ofstream f(out_file);
    if (!f) throw validation_error("cannot open output file: " + out_file);
    f << payload;
}

/// Dispatch a full command line (without argv[0]); writes reports to `out`,
/// diagnostics to `err`. Exit codes: 0 success, 2 validation error,
/// 3 numerical convergence error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Integral operators for the dbar-equation on singular plane curves"};
    app.require_subcommand(1);

    CurveFlags curve;
    QuadFlags quad;
    std::string phi_text, out_file, csv_file;
    std::vector<std::string> target_raw;
    double rho = 0.0, eps = 0.1, h = 1e-4, theta = 0.0, r0 = 0.1, ratio = 0.5;
    double moment_tol = 1e-6;
    int mu = 0, count = 6;

    auto add_curve = [&](CLI::App* cmd, bool cusp_only) {
        cmd->add_option("--r", curve.r, "cusp exponent r");
        cmd->add_option("--s", curve.s, "cusp exponent s");
        if (!cusp_only) cmd->add_option("--curve", curve.curve_file, "curve JSON file");
    };
    auto add_quad = [&](CLI::App* cmd) {
        cmd->add_option("--ntheta", quad.n_theta, "angular nodes of the area rule");
        cmd->add_option("--panels", quad.panels, "radial panels per segment");
        cmd->add_option("--order", quad.order, "Gauss-Legendre order");
        cmd->add_option("--eps0", quad.eps0, "starting inner radius of the pv limit");
        cmd->add_option("--pv-shrink", quad.pv_shrink, "pv shrink factor");
        cmd->add_option("--pv-tol", quad.pv_tol, "pv stopping tolerance");
        cmd->add_option("--pv-steps", quad.pv_steps, "pv maximum steps");
    };

    auto* sg_cmd = app.add_subcommand("semigroup", "Frobenius number and gaps of <r,s>");
    add_curve(sg_cmd, true);
    sg_cmd->add_option("--out", out_file, "write the JSON report to a file");

    auto* rep_cmd = app.add_subcommand("represent", "boundary representation P phi at targets");
    add_curve(rep_cmd, false);
    rep_cmd->add_option("--rho", rho, "boundary circle radius")->required();
    rep_cmd->add_option("--phi", phi_text, "degree-0 form expression")->required();
    rep_cmd->add_option("--t", target_raw, "target parameter (repeatable, a+bi)")->required();
    rep_cmd->add_option("--nodes", quad.nodes, "circle rule node count");
    rep_cmd->add_option("--out", out_file, "write the JSON report to a file");

    auto* solve_cmd = app.add_subcommand("solve", "area solve u = K phi at targets (CSV)");
    add_curve(solve_cmd, false);
    solve_cmd->add_option("--phi", phi_text, "(0,1)-form expression (append ', dbar')")->required();
    solve_cmd->add_option("--t", target_raw, "target parameter (repeatable)")->required();
    solve_cmd->add_option("--mu", mu, "weight power");
    solve_cmd->add_option("--rho", rho, "domain radius (defaults to the bump support)");
    add_quad(solve_cmd);
    solve_cmd->add_option("--out", out_file, "write the CSV table to a file");

    auto* mom_cmd = app.add_subcommand("moment", "strong-holomorphy moment criterion");
    add_curve(mom_cmd, true);
    mom_cmd->add_option("--phi", phi_text, "degree-0 form expression")->required();
    mom_cmd->add_option("--eps", eps, "inner test radius");
    mom_cmd->add_option("--nodes", quad.nodes, "circle rule node count");
    mom_cmd->add_option("--tol", moment_tol, "pairing zero threshold");
    mom_cmd->add_option("--out", out_file, "write the JSON report to a file");

    auto* ver_cmd = app.add_subcommand("verify", "Koppelman identity residuals (CSV)");
    add_curve(ver_cmd, false);
    ver_cmd->add_option("--phi", phi_text, "(0,1)-form expression")->required();
    ver_cmd->add_option("--t", target_raw, "target parameter (repeatable)")->required();
    ver_cmd->add_option("--mu", mu, "weight power");
    ver_cmd->add_option("--rho", rho, "domain radius");
    ver_cmd->add_option("--fd-step", h, "finite-difference step");
    add_quad(ver_cmd);
    ver_cmd->add_option("--out", out_file, "write the CSV table to a file");

    auto* gr_cmd = app.add_subcommand("growth", "log-log growth profile of K_mu phi along a ray");
    add_curve(gr_cmd, false);
    gr_cmd->add_option("--phi", phi_text, "(0,1)-form expression")->required();
    gr_cmd->add_option("--mu", mu, "weight power");
    gr_cmd->add_option("--theta", theta, "ray direction (radians)");
    gr_cmd->add_option("--r0", r0, "largest radius");
    gr_cmd->add_option("--ratio", ratio, "radius shrink per sample");
    gr_cmd->add_option("--count", count, "number of samples");
    gr_cmd->add_option("--rho", rho, "domain radius");
    add_quad(gr_cmd);
    gr_cmd->add_option("--csv", csv_file, "also write (log r, log |u|) rows to a CSV file");
    gr_cmd->add_option("--out", out_file, "write the JSON report to a file");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        const std::optional<double> rho_opt =
            rho > 0.0 ? std::optional<double>(rho) : std::nullopt;

        if (sg_cmd->parsed()) {
            if (curve.r <= 0 || curve.s <= 0) throw validation_error("semigroup: --r and --s required");
            Curve c = Curve::cusp(curve.r, curve.s); // validates the pair
            emit(to_json(semigroup(curve.r, curve.s)).dump() + "\n", out_file, out);
            return 0;
        }
        if (rep_cmd->parsed()) {
            const Curve c = curve.resolve();
            const MonomialFormSum phi = parse_expr(phi_text);
            const auto targets = parse_targets(target_raw);
            ordered_json results = ordered_json::array();
            for (cx t : targets) {
                const cx v = represent_boundary(c, phi, rho, t, quad.nodes);
                ordered_json row;
                row["t_re"] = t.real();
                row["t_im"] = t.imag();
                row["re"] = v.real();
                row["im"] = v.imag();
                results.push_back(row);
            }
            ordered_json j;
            j["results"] = results;
            emit(j.dump() + "\n", out_file, out);
            return 0;
        }
        if (solve_cmd->parsed()) {
            const KernelContext ctx(curve.resolve(), mu);
            const MonomialFormSum phi = parse_expr(phi_text);
            const auto targets = parse_targets(target_raw);
            const SolveReport rep = solve_area(ctx, phi, targets, quad.to_options(rho_opt));
            std::ostringstream csv;
            csv << "t_re,t_im,u_re,u_im\n";
            for (const auto& e : rep.values)
                csv << fmt(e.t.real()) << ',' << fmt(e.t.imag()) << ',' << fmt(e.u.real()) << ','
                    << fmt(e.u.imag()) << '\n';
            emit(csv.str(), out_file, out);
            return 0;
        }
        if (mom_cmd->parsed()) {
            if (curve.r <= 0 || curve.s <= 0) throw validation_error("moment: --r and --s required");
            const Curve c = Curve::cusp(curve.r, curve.s);
            MomentOptions mopts;
            mopts.eps = eps;
            mopts.nodes = quad.nodes;
            mopts.moment_tol = moment_tol;
            const MomentReport rep = moment_check(c, parse_expr(phi_text), mopts);
            emit(to_json(rep).dump() + "\n", out_file, out);
            return 0;
        }
        if (ver_cmd->parsed()) {
            const KernelContext ctx(curve.resolve(), mu);
            const MonomialFormSum phi = parse_expr(phi_text);
            const auto targets = parse_targets(target_raw);
            const VerifyReport rep =
                verify_koppelman(ctx, phi, targets, h, quad.to_options(rho_opt));
            std::ostringstream csv;
            csv << "t_re,t_im,u_re,u_im,residual\n";
            for (const auto& e : rep.entries)
                csv << fmt(e.t.real()) << ',' << fmt(e.t.imag()) << ',' << fmt(e.u.real()) << ','
                    << fmt(e.u.imag()) << ',' << fmt(e.residual) << '\n';
            emit(csv.str(), out_file, out);
            return 0;
        }
        if (gr_cmd->parsed()) {
            const KernelContext ctx(curve.resolve(), mu);
            const MonomialFormSum phi = parse_expr(phi_text);
            std::vector<double> radii;
            for (int k = 0; k < count; ++k) radii.push_back(r0 * std::pow(ratio, k));
            const QuadOptions qopts = quad.to_options(rho_opt);
            auto u = [&](cx t) {
                const cx tv = t;
                return solve_area(ctx, phi, std::span<const cx>(&tv, 1), qopts).values[0].u;
            };
            const GrowthFit fit = growth_profile(u, theta, radii);
            ordered_json j;
            j["slope"] = fit.slope;
            j["fit_residual"] = fit.fit_residual;
            j["points"] = ordered_json::array();
            for (auto [x, y] : fit.points) j["points"].push_back({x, y});
            if (!csv_file.empty()) {
                std::ostringstream csv;
                csv << "log_r,log_abs_u\n";
                for (auto [x, y] : fit.points) csv << fmt(x) << ',' << fmt(y) << '\n';
                emit(csv.str(), csv_file, out);
            }
            emit(j.dump() + "\n", out_file, out);
            return 0;
        }
        throw validation_error("no subcommand given");
    } catch (const validation_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const convergence_error& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace dbar::cli
