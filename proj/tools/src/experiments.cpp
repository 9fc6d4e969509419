#include "sdd_tools/experiments.hpp"

#include "sdd/csv.hpp"
#include "sdd/fokker_planck.hpp"
#include "sdd/lorentz_stats.hpp"
#include "sdd/packing.hpp"
#include "sdd/parallel.hpp"
#include "sdd/sampler.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>

namespace sdd::tools {

namespace {

std::string fmt(double v) { return format_double(v); }

void require(bool ok, const std::string& what) {
    if (!ok) config_fail(what);
}

void check_phi(double phi, const std::string& key) {
    require(phi > phi_min && phi < 1.0, key + " must lie in (" + fmt(phi_min) + ", 1)");
}

void echo_common(CsvWriter& w, const std::string& name, const RunContext& ctx) {
    w.meta("experiment", name);
    w.meta("seed", std::to_string(ctx.seed));
    w.meta("version", SDD_VERSION);
}

// [model] block shared by maem, em-box and fp.
DiffusionModel read_model(Config& cfg, const std::string& default_domain, const std::string& default_d) {
    const std::string domain_text = cfg.text("model", "domain", default_domain);
    const std::string d_text = cfg.text("model", "D", default_d);
    const Region domain = parse_region(domain_text);
    const std::string rho_text = cfg.text("model", "rho_eq", format_region(domain) + ": 1");
    return DiffusionModel(domain, ScalarField::parse(d_text), ScalarField::parse(rho_text));
}

PackingOptions read_packing(Config& cfg) {
    PackingOptions p;
    p.max_sweeps = static_cast<int>(cfg.count("billiard", "max_sweeps", 20000));
    p.equilibration_sweeps = static_cast<int>(cfg.count("billiard", "equilibration_sweeps", 100));
    require(p.equilibration_sweeps >= 100, "billiard.equilibration_sweeps must be at least 100");
    return p;
}

void write_side(const DiscField& field, int side, const std::filesystem::path& path) {
    CsvWriter w(path);
    w.meta("box", format_region(field.side_region(side)));
    w.meta("x_mid", fmt(*field.x_mid()));
    w.meta("free_fraction", fmt(field.free_fraction(side)));
    w.header({"cx", "cy", "r", "side"});
    for (const auto& d : field.discs()) {
        if (d.side != side) continue;
        w.cell(d.c.x).cell(d.c.y).cell(d.r).cell(d.side);
        w.end_row();
    }
}

RunSummary run_occupation(Config& cfg, const RunContext& ctx) {
    TwoDomainSetup s;
    s.r1 = cfg.number("billiard", "r1", 0.3);
    s.phi1 = cfg.number("billiard", "phi1", 0.5);
    s.r2 = cfg.number("billiard", "r2", 0.6);
    s.phi2 = cfg.number("billiard", "phi2", 0.5);
    s.width = cfg.number("billiard", "box_width", 60.0);
    s.height = cfg.number("billiard", "box_height", 30.0);
    const auto field_file = cfg.maybe_text("billiard", "field_file");
    const PackingOptions packing = read_packing(cfg);
    OccupationOptions opt;
    const double total_time = cfg.number("occupation", "total_time", 1e5);
    opt.trajectories = cfg.count("occupation", "trajectories", 1);
    opt.batches = cfg.count("occupation", "batches", 20);
    opt.sample_period = cfg.number("occupation", "sample_period", 0.0);
    opt.workers = ctx.workers;
    opt.packing = packing;
    cfg.reject_unknown();
    check_phi(s.phi1, "billiard.phi1");
    check_phi(s.phi2, "billiard.phi2");
    require(s.r1 > 0 && s.r2 > 0 && s.width > 0 && s.height > 0, "radii and box sides must be positive");
    require(total_time > 0, "occupation.total_time must be positive");
    require(opt.trajectories >= 1, "occupation.trajectories must be at least 1");
    require(opt.batches >= 20, "occupation.batches must be at least 20");
    require(opt.sample_period >= 0, "occupation.sample_period must be nonnegative");

    PackingReport left, right;
    const DiscField field = field_file ? DiscField::load_csv(*field_file)
                                       : make_two_domain_field(s, ctx.seed, packing, &left, &right);
    field.validate();
    const OccupationResult res = occupation_ratio(field, total_time, ctx.seed, opt);

    CsvWriter w(ctx.output_dir / "occupation.csv");
    echo_common(w, "occupation", ctx);
    w.meta("estimator", "exact side times from line crossings");
    w.header({"trajectory_time", "trajectories", "time_left", "time_right", "ratio", "std_error", "batches",
              "phi_left", "phi_right", "predicted_ratio", "events", "line_crossings", "sampled_ratio"});
    w.cell(res.trajectory_time).cell(res.trajectories).cell(res.time_left).cell(res.time_right).cell(res.ratio);
    w.cell(res.std_error).cell(res.batches).cell(res.phi_left).cell(res.phi_right);
    w.cell(res.phi_right / res.phi_left).cell(static_cast<unsigned long long>(res.events));
    w.cell(static_cast<unsigned long long>(res.line_crossings));
    w.cell(res.sampled_ratio ? *res.sampled_ratio : std::nan(""));
    w.end_row();
    write_side(field, 0, ctx.output_dir / "field_left.csv");
    write_side(field, 1, ctx.output_dir / "field_right.csv");

    RunSummary out{{"occupation.csv", "field_left.csv", "field_right.csv"}, {}};
    out.derived["ratio"] = fmt(res.ratio);
    out.derived["std_error"] = fmt(res.std_error);
    out.derived["phi_left"] = fmt(res.phi_left);
    out.derived["phi_right"] = fmt(res.phi_right);
    if (!field_file) {
        out.derived["packing_left"] = left.method + ", " + std::to_string(left.discs) + " discs";
        out.derived["packing_right"] = right.method + ", " + std::to_string(right.discs) + " discs";
    }
    return out;
}

DiffusionOptions read_diffusion_options(Config& cfg, const std::string& section, const RunContext& ctx) {
    DiffusionOptions o;
    o.run_multiple = cfg.count(section, "run_multiple", 1);
    o.checkpoints = cfg.count(section, "checkpoints", 40);
    o.fit_from = cfg.number(section, "fit_from", 0.25);
    o.cell_side = cfg.number(section, "cell_side", 0.0);
    o.min_members = cfg.count(section, "min_members", 100);
    o.workers = ctx.workers;
    o.packing = read_packing(cfg);
    return o;
}

void write_msd(const DiffusionEstimate& e, const std::filesystem::path& path, const std::string& name,
               const RunContext& ctx) {
    CsvWriter w(path);
    echo_common(w, name, ctx);
    w.meta("r", fmt(e.r));
    w.meta("phi", fmt(e.phi));
    w.header({"t", "msd", "std_error", "msd_x", "msd_y", "std_error_x", "std_error_y"});
    for (const auto& p : e.msd) {
        w.cell(p.t).cell(p.msd).cell(p.std_error).cell(p.msd_x).cell(p.msd_y).cell(p.std_error_x).cell(p.std_error_y);
        w.end_row();
    }
}

RunSummary run_estimate_d(Config& cfg, const RunContext& ctx) {
    const double r = cfg.number("diffusion", "r", 0.3);
    const double phi = cfg.number("diffusion", "phi", 0.5);
    const std::size_t members = cfg.count("diffusion", "members", 200);
    const double horizon = cfg.number("diffusion", "horizon", 2000.0);
    const DiffusionOptions opt = read_diffusion_options(cfg, "diffusion", ctx);
    cfg.reject_unknown();
    check_phi(phi, "diffusion.phi");
    require(r > 0 && horizon > 0, "diffusion.r and diffusion.horizon must be positive");
    require(members >= std::max<std::size_t>(2, opt.min_members), "diffusion.members is below diffusion.min_members");

    const DiffusionEstimate e = estimate_D(r, phi, members, horizon, ctx.seed, opt);
    CsvWriter w(ctx.output_dir / "diffusion.csv");
    echo_common(w, "estimate-d", ctx);
    w.meta("fit_window", "[" + fmt(e.t_lo) + ", " + fmt(e.t_hi) + "]");
    w.header({"r", "phi", "members", "horizon", "cell_side", "D", "std_error", "regression_stderr", "f", "D_x",
              "D_y", "std_error_x", "std_error_y", "t_lo", "t_hi", "window_points", "events"});
    w.cell(e.r).cell(e.phi).cell(e.members).cell(horizon).cell(e.cell_side).cell(e.d_hat).cell(e.std_error);
    w.cell(e.regression_stderr).cell(e.f()).cell(e.d_x).cell(e.d_y).cell(e.std_error_x).cell(e.std_error_y);
    w.cell(e.t_lo).cell(e.t_hi).cell(e.window_points).cell(static_cast<unsigned long long>(e.events));
    w.end_row();
    write_msd(e, ctx.output_dir / "msd.csv", "estimate-d", ctx);
    RunSummary out{{"diffusion.csv", "msd.csv"}, {}};
    out.derived["D"] = fmt(e.d_hat);
    out.derived["std_error"] = fmt(e.std_error);
    return out;
}

RunSummary run_fcurve(Config& cfg, const RunContext& ctx) {
    const std::vector<double> phis = cfg.numbers("fcurve", "phis", {0.3, 0.5, 0.6});
    const double r_ref = cfg.number("fcurve", "r_ref", 0.5);
    const std::size_t members = cfg.count("fcurve", "members", 200);
    const double horizon = cfg.number("fcurve", "horizon", 2000.0);
    const DiffusionOptions opt = read_diffusion_options(cfg, "fcurve", ctx);
    cfg.reject_unknown();
    for (double phi : phis) check_phi(phi, "fcurve.phis entries");
    require(r_ref > 0 && horizon > 0, "fcurve.r_ref and fcurve.horizon must be positive");
    require(members >= std::max<std::size_t>(2, opt.min_members), "fcurve.members is below fcurve.min_members");

    const auto curve = f_curve(phis, r_ref, members, horizon, ctx.seed, opt);
    CsvWriter w(ctx.output_dir / "fcurve.csv");
    echo_common(w, "fcurve", ctx);
    w.meta("r_ref", fmt(r_ref));
    w.header({"phi", "f", "f_stderr", "D", "D_stderr", "cell_side", "members", "horizon", "increasing"});
    for (const auto& p : curve) {
        w.cell(p.phi).cell(p.f).cell(p.f_stderr).cell(p.estimate.d_hat).cell(p.estimate.std_error);
        w.cell(p.estimate.cell_side).cell(p.estimate.members).cell(horizon).cell(p.increasing ? 1 : 0);
        w.end_row();
    }
    RunSummary out{{"fcurve.csv"}, {}};
    out.derived["points"] = std::to_string(curve.size());
    return out;
}

struct ChainSet {
    BinnedStats stats;
    std::uint64_t proposals = 0, acceptances = 0, folds = 0;
    bool inexact = false;
    std::vector<std::vector<std::uint64_t>> batches;
    SampledTrajectory first;
};

ChainSet run_chains(const DiffusionModel& model, SamplerConfig base, std::size_t chains, unsigned workers) {
    std::vector<SampledTrajectory> runs(chains);
    parallel_for(chains, workers, [&](std::size_t c) {
        SamplerConfig sc = base;
        sc.chain = c;
        if (c > 0) sc.stride = 0;
        runs[c] = run(model, sc);
    });
    ChainSet out;
    BinAccumulator acc = *runs[0].bins;
    for (std::size_t c = 1; c < chains; ++c) acc.merge(*runs[c].bins);
    for (const auto& r : runs) {
        out.proposals += r.proposals;
        out.acceptances += r.acceptances;
        out.folds += r.wall_folds;
        out.inexact = out.inexact || r.folded_kernel_inexact;
    }
    out.stats = acc.finish();
    out.batches = acc.batch_counts();
    out.first = std::move(runs[0]);
    return out;
}

void write_trajectory(const SampledTrajectory& t, const std::filesystem::path& path, const std::string& name,
                      const RunContext& ctx) {
    CsvWriter w(path);
    echo_common(w, name, ctx);
    w.meta("stride", std::to_string(t.stride));
    if (t.dim == 1) {
        w.header({"step", "time", "x", "accepted"});
    } else {
        w.header({"step", "time", "x", "y", "accepted"});
    }
    for (std::size_t i = 0; i < t.positions.size(); ++i) {
        const std::uint64_t step = t.first_step + i * t.stride;
        w.cell(static_cast<unsigned long long>(step)).cell(static_cast<double>(step) * t.h).cell(t.positions[i].x);
        if (t.dim == 2) w.cell(t.positions[i].y);
        w.cell(static_cast<int>(t.accepted[i]));
        w.end_row();
    }
}

SamplerConfig read_sampler(Config& cfg, const DiffusionModel& model, Scheme default_scheme, double default_h,
                           std::uint64_t default_steps) {
    SamplerConfig sc;
    sc.scheme = parse_scheme(cfg.text("sampler", "scheme", std::string(to_string(default_scheme))));
    sc.h = cfg.number("sampler", "h", default_h);
    sc.steps = cfg.count("sampler", "steps", default_steps);
    sc.stride = cfg.count("sampler", "stride", 0);
    const Vec2 centre = model.domain().center();
    sc.x0.x = cfg.number("sampler", "x0", centre.x);
    if (model.dim() == 2) sc.x0.y = cfg.number("sampler", "y0", centre.y);
    sc.x0_from_rho_eq = cfg.flag("sampler", "x0_from_rho_eq", false);
    if (cfg.has("sampler", "burn_in")) sc.burn_in = cfg.count("sampler", "burn_in", 0);
    const std::string wall = cfg.text("sampler", "wall_mode", "reject");
    require(wall == "reject" || wall == "fold", "sampler.wall_mode must be reject or fold");
    sc.wall_mode = wall == "reject" ? WallMode::reject : WallMode::fold;
    require(sc.h > 0, "sampler.h must be positive");
    require(sc.steps > 0, "sampler.steps must be positive");
    return sc;
}

RunSummary run_maem(Config& cfg, const RunContext& ctx) {
    const DiffusionModel model = read_model(cfg, "[-1, 1]", "[-1, 0]: 1 | [0, 1]: 2");
    SamplerConfig sc = read_sampler(cfg, model, Scheme::maem, 1e-4, 10'000'000);
    const std::size_t chains = cfg.count("sampler", "chains", 1);
    BinEdges edges;
    edges.lo = cfg.number("bins", "lo", model.domain().lo[0]);
    edges.hi = cfg.number("bins", "hi", model.domain().hi[0]);
    edges.count = cfg.count("bins", "count", 20);
    sc.bin_axis = static_cast<int>(cfg.count("bins", "axis", 0));
    sc.batches = cfg.count("bins", "batches", 20);
    cfg.reject_unknown();
    require(chains >= 1, "sampler.chains must be at least 1");
    require(edges.count >= 1 && edges.hi > edges.lo, "bins need count >= 1 and hi > lo");
    require(sc.bin_axis < model.dim(), "bins.axis exceeds the model dimension");
    sc.seed = ctx.seed;
    sc.bins = edges;

    const ChainSet cs = run_chains(model, sc, chains, ctx.workers);
    const BinnedStats& st = cs.stats;
    CsvWriter w(ctx.output_dir / "bins.csv");
    echo_common(w, "maem", ctx);
    w.meta("scheme", std::string(to_string(sc.scheme)));
    w.meta("h", fmt(sc.h));
    w.meta("proposals", std::to_string(cs.proposals));
    w.meta("rejections", std::to_string(cs.proposals - cs.acceptances));
    w.meta("acceptance_fraction", fmt(static_cast<double>(cs.acceptances) / static_cast<double>(cs.proposals)));
    w.meta("wall_folds", std::to_string(cs.folds));
    w.meta("folded_kernel_inexact", cs.inexact ? "true" : "false");
    w.meta("count_inflation", fmt(st.count_inflation));
    w.meta("chi_square_scale", fmt(st.chi_square_scale));
    w.header({"bin_lo", "bin_hi", "center", "count", "density", "stderr", "d_eff", "d_eff_stderr", "D"});
    for (std::size_t i = 0; i < edges.count; ++i) {
        Vec2 c = model.domain().center();
        c[sc.bin_axis] = edges.center(i);
        w.cell(edges.edge(i)).cell(edges.edge(i + 1)).cell(edges.center(i));
        w.cell(static_cast<unsigned long long>(st.counts[i])).cell(st.density[i]).cell(st.density_stderr[i]);
        w.cell(st.d_eff[i]).cell(st.d_eff_stderr[i]).cell(model.diffusion()(c));
        w.end_row();
    }
    RunSummary out{{"bins.csv"}, {}};

    if (model.dim() == 1) {
        try {
            const auto probs = bin_probabilities(model.rho_eq(), edges);
            const ChiSquareResult chi = compare_chi_square_batched(st, probs);
            CsvWriter cw(ctx.output_dir / "comparison.csv");
            echo_common(cw, "maem", ctx);
            cw.meta("expected", "rho_eq");
            cw.header({"stat", "dof", "effective_dof", "p"});
            cw.cell(chi.statistic).cell(chi.dof).cell(chi.effective_dof).cell(chi.p_value);
            cw.end_row();
            out.outputs.push_back("comparison.csv");
            out.derived["chi_square_p"] = fmt(chi.p_value);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::low_count) throw;
            out.derived["chi_square_p"] = "skipped (low bin counts)";
        }
    }
    if (sc.stride > 0) {
        write_trajectory(cs.first, ctx.output_dir / "trajectory.csv", "maem", ctx);
        out.outputs.push_back("trajectory.csv");
    }
    out.derived["rejections"] = std::to_string(cs.proposals - cs.acceptances);
    return out;
}

RunSummary run_em_box(Config& cfg, const RunContext& ctx) {
    const DiffusionModel model = read_model(cfg, "[-20, 20]x[-10, 10]", "[-20, 0]x[-10, 10]: 1 | [0, 20]x[-10, 10]: 2");
    SamplerConfig sc = read_sampler(cfg, model, Scheme::em_driftfree, 0.5, 10'000'000);
    const std::size_t chains = cfg.count("sampler", "chains", 1);
    sc.batches = cfg.count("bins", "batches", 20);
    cfg.reject_unknown();
    require(chains >= 1, "sampler.chains must be at least 1");
    require(sc.batches >= 2, "bins.batches must be at least 2");
    sc.seed = ctx.seed;
    const Region& dom = model.domain();
    sc.bins = BinEdges{dom.lo[0], dom.hi[0], 2};
    sc.bin_axis = 0;

    const ChainSet cs = run_chains(model, sc, chains, ctx.workers);
    const BinnedStats& st = cs.stats;
    const double left = static_cast<double>(st.counts[0]);
    const double right = static_cast<double>(st.counts[1]);
    const double ratio = right / left;
    // Batch-means error of the ratio by the delta method, batches of all chains pooled.
    const auto& blocks = cs.batches;
    double se = std::nan("");
    if (blocks.size() > 1) {
        const double n = static_cast<double>(blocks.size());
        double ss = 0.0;
        for (const auto& b : blocks) {
            const double d = static_cast<double>(b[1]) - ratio * static_cast<double>(b[0]);
            ss += d * d;
        }
        se = std::sqrt(ss / (n * (n - 1.0))) / (left / n);
    }
    const Region left_half = Region::rect(dom.lo[0], dom.center().x, dom.lo[1], dom.hi[1]);
    const Region right_half = Region::rect(dom.center().x, dom.hi[0], dom.lo[1], dom.hi[1]);
    const ScalarField inv_d = model.diffusion().raised(-1.0);
    const double predicted = inv_d.integrate(right_half) / inv_d.integrate(left_half);

    CsvWriter w(ctx.output_dir / "occupation.csv");
    echo_common(w, "em-box", ctx);
    w.meta("scheme", std::string(to_string(sc.scheme)));
    w.meta("h", fmt(sc.h));
    w.meta("wall_folds", std::to_string(cs.folds));
    w.header({"steps", "chains", "samples_left", "samples_right", "ratio", "std_error", "predicted_ratio"});
    w.cell(static_cast<unsigned long long>(sc.steps)).cell(chains).cell(static_cast<unsigned long long>(st.counts[0]));
    w.cell(static_cast<unsigned long long>(st.counts[1])).cell(ratio).cell(se).cell(predicted);
    w.end_row();
    RunSummary out{{"occupation.csv"}, {}};
    out.derived["ratio"] = fmt(ratio);
    out.derived["std_error"] = fmt(se);
    out.derived["predicted_ratio"] = fmt(predicted);
    return out;
}

RunSummary run_fp(Config& cfg, const RunContext& ctx) {
    const DiffusionModel model = read_model(cfg, "[-1, 1]", "[-1, 0]: 1 | [0, 1]: 2");
    const std::string mode = cfg.text("fp", "mode", "evolve");
    const std::size_t cells = cfg.count("fp", "cells", 400);
    const double t = cfg.number("fp", "t", 0.5);
    const double dt = cfg.number("fp", "dt", 1e-3);
    const double theta = cfg.number("fp", "theta", 1.0);
    const std::string initial = cfg.text("fp", "initial", model.rho_eq().to_string());
    cfg.reject_unknown();
    require(mode == "evolve" || mode == "steady" || mode == "driftfree-ito",
            "fp.mode must be evolve, steady or driftfree-ito");
    require(model.dim() == 1, "the fp experiment needs a 1D model");
    require(cells >= 2 && t >= 0 && dt > 0 && theta >= 0 && theta <= 1, "fp.cells, t, dt or theta out of range");

    const Grid1D grid = Grid1D::over(model, cells);
    DensityProfile p;
    if (mode == "steady") {
        p = steady_state(model, grid);
    } else if (mode == "driftfree-ito") {
        p = driftfree_ito_steady(model.diffusion(), grid);
    } else {
        DensityProfile p0 = sample_profile(ScalarField::parse(initial), grid);
        p = evolve(model, p0, t, dt, {theta});
    }
    CsvWriter w(ctx.output_dir / "profile.csv");
    echo_common(w, "fp", ctx);
    w.meta("mode", mode);
    w.meta("time", fmt(p.time));
    w.meta("mass", fmt(p.mass()));
    w.header({"x", "rho"});
    for (std::size_t i = 0; i < grid.cells; ++i) {
        w.cell(grid.center(i)).cell(p.rho[i]);
        w.end_row();
    }
    RunSummary out{{"profile.csv"}, {}};
    out.derived["mass"] = fmt(p.mass());
    return out;
}

RunSummary run_gen_field(Config& cfg, const RunContext& ctx) {
    const std::string mode = cfg.text("billiard", "mode", "two-domain");
    require(mode == "two-domain" || mode == "box" || mode == "periodic", "billiard.mode must be two-domain, box or periodic");
    RunSummary out{{"field.csv"}, {}};
    PackingReport a, b;
    std::optional<DiscField> field;
    if (mode == "two-domain") {
        TwoDomainSetup s;
        s.r1 = cfg.number("billiard", "r1", 0.3);
        s.phi1 = cfg.number("billiard", "phi1", 0.5);
        s.r2 = cfg.number("billiard", "r2", 0.6);
        s.phi2 = cfg.number("billiard", "phi2", 0.5);
        s.width = cfg.number("billiard", "box_width", 60.0);
        s.height = cfg.number("billiard", "box_height", 30.0);
        const PackingOptions packing = read_packing(cfg);
        cfg.reject_unknown();
        check_phi(s.phi1, "billiard.phi1");
        check_phi(s.phi2, "billiard.phi2");
        field = make_two_domain_field(s, ctx.seed, packing, &a, &b);
        out.derived["packing_left"] = a.method + ", " + std::to_string(a.discs) + " discs";
        out.derived["packing_right"] = b.method + ", " + std::to_string(b.discs) + " discs";
    } else if (mode == "box") {
        const double r = cfg.number("billiard", "r", 0.5);
        const double phi = cfg.number("billiard", "phi", 0.5);
        const double width = cfg.number("billiard", "box_width", 30.0);
        const double height = cfg.number("billiard", "box_height", 30.0);
        const PackingOptions packing = read_packing(cfg);
        cfg.reject_unknown();
        check_phi(phi, "billiard.phi");
        Rng rng = Rng::stream(ctx.seed, 0);
        const Region box = Region::rect(0.0, width, 0.0, height);
        field.emplace(box, GeometryMode::box, pack_discs({box, r, phi, GeometryMode::box, false, false, 0}, rng, packing, &a));
        out.derived["packing"] = a.method + ", " + std::to_string(a.discs) + " discs";
    } else {
        const double r = cfg.number("billiard", "r", 0.5);
        const double phi = cfg.number("billiard", "phi", 0.5);
        const double side = cfg.number("billiard", "cell_side", 20.0);
        const PackingOptions packing = read_packing(cfg);
        cfg.reject_unknown();
        check_phi(phi, "billiard.phi");
        field = generate_periodic(side, r, phi, ctx.seed, packing, &a);
        out.derived["packing"] = a.method + ", " + std::to_string(a.discs) + " discs";
    }
    field->validate();
    field->save_csv(ctx.output_dir / "field.csv");
    out.derived["free_fraction"] = fmt(field->free_fraction());
    return out;
}

using Runner = std::function<RunSummary(Config&, const RunContext&)>;

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> table{
        {"occupation", run_occupation}, {"fcurve", run_fcurve}, {"estimate-d", run_estimate_d},
        {"maem", run_maem},             {"em-box", run_em_box}, {"fp", run_fp},
        {"gen-field", run_gen_field},
    };
    return table;
}

} // namespace

std::string experiment_description(const std::string& name) {
    static const std::map<std::string, std::string> text{
        {"occupation", "Occupation times of a billiard in a two-sided disc box"},
        {"fcurve", "Diffusion coefficient per radius over a list of free fractions"},
        {"estimate-d", "Diffusion coefficient of one periodic disc field from the mean squared displacement"},
        {"maem", "Metropolis-adjusted Euler-Maruyama chains with per-bin statistics"},
        {"em-box", "Drift-free Euler-Maruyama occupation in a two-valued box"},
        {"fp", "Finite-volume Fokker-Planck evolution or steady state"},
        {"gen-field", "Generate and save a disc field"},
    };
    const auto it = text.find(name);
    return it == text.end() ? std::string() : it->second;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"occupation", "fcurve", "estimate-d", "maem", "em-box", "fp", "gen-field"};
    return names;
}

RunSummary run_experiment(const std::string& name, Config& cfg, const RunContext& ctx) {
    const auto it = runners().find(name);
    if (it == runners().end()) config_fail("unknown experiment '" + name + "'");
    std::filesystem::create_directories(ctx.output_dir);
    return it->second(cfg, ctx);
}

void write_manifest(const std::filesystem::path& path, const std::string& name, const std::string& config_path,
                    const Config& cfg, const RunContext& ctx, const RunSummary& summary) {
    nlohmann::ordered_json j;
    j["tool"] = "sdd";
    j["version"] = SDD_VERSION;
    j["experiment"] = name;
    j["seed"] = ctx.seed;
    j["workers"] = ctx.workers;
    j["config_file"] = config_path;
    j["output_dir"] = ctx.output_dir.string();
    nlohmann::ordered_json conf = nlohmann::ordered_json::object();
    for (const auto& [section, body] : cfg.resolved()) {
        for (const auto& [key, value] : body) conf[section][key] = value;
    }
    j["config"] = conf;
    j["outputs"] = summary.outputs;
    j["results"] = summary.derived;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

int exit_code(const Error& e) {
    return e.code() == ErrorCode::config_error || e.code() == ErrorCode::parse_error ? 2 : 3;
}

} // namespace sdd::tools
