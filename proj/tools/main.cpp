// ovlb command-line front end.
//
// Subcommands:
//   gen-model  synthetic cluster spectra (fixture generator)
//   moments    moment vectors from a matrix+state pair or a spectral model
//   bound      optimal lower/upper overlap bounds across a degree ladder
//   sweep      gap-family study, long-form CSV for plotting
//   classic    closed-form comparator table
//
// Exit codes: 0 success, 2 input/parse error, 3 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ovlb/ovlb.hpp"

using namespace ovlb;
using nlohmann::json;

namespace {

int to_int(const std::string& s) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw input_error("trailing characters in '" + s + "'");
        return v;
    } catch (const input_error&) {
        throw;
    } catch (const std::exception&) {
        throw input_error("expected an integer, got '" + s + "'");
    }
}

double to_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw input_error("trailing characters in '" + s + "'");
        return v;
    } catch (const input_error&) {
        throw;
    } catch (const std::exception&) {
        throw input_error("expected a number, got '" + s + "'");
    }
}

// "1,2,5" or "1..8"
std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int a = to_int(text.substr(0, dots));
        const int b = to_int(text.substr(dots + 2));
        if (b < a) throw input_error("descending range '" + text + "'");
        for (int d = a; d <= b; ++d) out.push_back(d);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_int(item));
    }
    if (out.empty()) throw input_error("empty list '" + text + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(item));
    return out;
}

MomentBasis parse_basis(const std::string& name) {
    if (name == "chebyshev") return MomentBasis::chebyshev;
    if (name == "monomial") return MomentBasis::monomial;
    throw input_error("unknown basis '" + name + "' (chebyshev|monomial)");
}

json window_json(const std::optional<ScalingWindow>& w, const std::string& policy) {
    json j;
    j["policy"] = policy;
    if (w) {
        j["lo"] = w->lo;
        j["hi"] = w->hi;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Shared input handling

struct InputFlags {
    std::string model_path;
    std::string matrix_path;
    std::string state_path;
};

struct Inputs {
    std::optional<SpectralModel> model;
    std::optional<DenseSymmetricMatrix> matrix;
    std::optional<StateVector> state;
    json descriptor;
};

void add_input_flags(CLI::App* cmd, InputFlags& f) {
    auto* m = cmd->add_option("--model", f.model_path, "spectral model JSON");
    auto* a = cmd->add_option("--matrix", f.matrix_path, "dense symmetric matrix file");
    auto* s = cmd->add_option("--state", f.state_path, "trial state vector file");
    a->needs(s);
    s->needs(a);
    m->excludes(a);
}

Inputs load_inputs(const InputFlags& f, bool required) {
    Inputs in;
    if (!f.model_path.empty()) {
        in.model = load_model(f.model_path);
        in.descriptor["model"] = f.model_path;
    } else if (!f.matrix_path.empty()) {
        in.matrix = load_matrix(f.matrix_path);
        in.state = load_state(f.state_path);
        if (in.state->size() != in.matrix->size())
            throw input_error("state dimension " + std::to_string(in.state->size()) +
                              " does not match matrix dimension " +
                              std::to_string(in.matrix->size()));
        in.descriptor["matrix"] = f.matrix_path;
        in.descriptor["state"] = f.state_path;
    } else if (required) {
        throw input_error("need --model or --matrix/--state");
    }
    return in;
}

struct WindowFlags {
    std::string policy = "gershgorin";
    double lo = 0.0, hi = 0.0;
    int lanczos_steps = 24;
    unsigned long long seed = 12345;
    CLI::Option* lo_opt = nullptr;
    CLI::Option* hi_opt = nullptr;
};

void add_window_flags(CLI::App* cmd, WindowFlags& f) {
    cmd->add_option("--window", f.policy,
                    "scaling window policy: gershgorin|lanczos|explicit|none")
        ->default_val("gershgorin");
    f.lo_opt = cmd->add_option("--window-lo", f.lo, "explicit window lower edge");
    f.hi_opt = cmd->add_option("--window-hi", f.hi, "explicit window upper edge");
    cmd->add_option("--lanczos-steps", f.lanczos_steps, "Krylov steps for the lanczos policy")
        ->default_val(24);
    cmd->add_option("--seed", f.seed, "seed for the lanczos start vector")->default_val(12345);
}

std::optional<ScalingWindow> resolve_window(const WindowFlags& f, const Inputs& in,
                                            MomentBasis basis) {
    if (f.policy == "none") {
        if (basis != MomentBasis::monomial)
            throw input_error("--window none is only meaningful for monomial moments");
        return std::nullopt;
    }
    if (f.policy == "explicit") {
        if (f.lo_opt->count() == 0 || f.hi_opt->count() == 0)
            throw input_error("--window explicit requires --window-lo and --window-hi");
        ScalingWindow w{f.lo, f.hi};
        w.validate();
        return w;
    }
    if (f.policy == "gershgorin") {
        if (in.matrix) {
            const auto [lo, hi] = gershgorin(*in.matrix);
            return round_window_outward(lo, hi);
        }
        if (in.model)
            return round_window_outward(in.model->eigenvalues.front(),
                                        in.model->eigenvalues.back());
        throw input_error("--window gershgorin needs an input operator or model");
    }
    if (f.policy == "lanczos") {
        if (!in.matrix)
            throw input_error("--window lanczos needs --matrix/--state input");
        const int n = in.matrix->size();
        std::mt19937_64 rng(f.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> raw(static_cast<std::size_t>(n));
        for (double& x : raw) x = gauss(rng);
        double nrm = norm2(raw);
        if (nrm == 0.0) nrm = 1.0;
        for (double& x : raw) x /= nrm;
        const LanczosResult lz =
            lanczos_extremal(*in.matrix, StateVector(raw), std::min(f.lanczos_steps, n));
        return round_window_outward(lz.ritz_min - lz.residual_min,
                                    lz.ritz_max + lz.residual_max);
    }
    throw input_error("unknown window policy '" + f.policy + "'");
}

MomentVector compute_moments(const Inputs& in, int order, MomentBasis basis,
                             const std::optional<ScalingWindow>& w) {
    if (in.model) return moments_from_spectrum(*in.model, order, basis, w);
    if (basis == MomentBasis::chebyshev) return chebyshev_moments(*in.matrix, *in.state, order, *w);
    if (w) return power_moments(*in.matrix, *in.state, order, *w);
    return power_moments(*in.matrix, *in.state, order);
}

// ---------------------------------------------------------------------------
// Target / indicator handling

struct TargetFlags {
    std::string mode = "exact";
    std::string targets = "0";
    std::string weights;
    double gamma_minus = 0.3;
    double gamma_plus = 0.3;
    int level_window_count = 0;  // 0 = auto
    double below = 0.0;
    CLI::Option* below_opt = nullptr;
    std::string indicator_path;
};

void add_target_flags(CLI::App* cmd, TargetFlags& f) {
    cmd->add_option("--mode", f.mode, "target mode: exact|intervals|threshold")
        ->default_val("exact");
    cmd->add_option("--targets", f.targets, "target level indices, e.g. 0 or 0,2")
        ->default_val("0");
    cmd->add_option("--weights", f.weights, "per-target weights (default all 1)");
    cmd->add_option("--gamma-minus", f.gamma_minus, "window margin below each level")
        ->default_val(0.3);
    cmd->add_option("--gamma-plus", f.gamma_plus, "window margin above each level")
        ->default_val(0.3);
    cmd->add_option("--level-windows", f.level_window_count,
                    "number of leading levels to window (default: targets + 2)");
    f.below_opt = cmd->add_option("--below", f.below, "threshold mode cutoff energy");
    cmd->add_option("--indicator", f.indicator_path, "pre-built indicator spec JSON");
}

struct ResolvedTarget {
    IndicatorSpec spec;
    json descriptor;
    std::optional<MergeReport> merges;
};

ResolvedTarget resolve_target(const TargetFlags& f, const std::optional<SpectralModel>& model,
                              const ScalingWindow& w) {
    ResolvedTarget out;
    if (!f.indicator_path.empty()) {
        out.spec = load_indicator(f.indicator_path);
        out.descriptor["indicator"] = f.indicator_path;
        return out;
    }
    const std::vector<int> targets = parse_int_list(f.targets);
    const std::vector<double> weights =
        f.weights.empty() ? std::vector<double>{} : parse_double_list(f.weights);
    out.descriptor["mode"] = f.mode;
    out.descriptor["targets"] = targets;
    if (!weights.empty()) out.descriptor["weights"] = weights;

    if (f.mode == "threshold") {
        if (f.below_opt->count() == 0)
            throw input_error("threshold mode requires --below CUTOFF");
        if (f.below <= w.lo || f.below > w.hi)
            throw input_error("threshold cutoff must lie inside the scaling window");
        const double value = weights.empty() ? 1.0 : weights.front();
        out.spec = build_threshold_indicator(f.below, {w.lo, w.hi}, value);
        out.descriptor["below"] = f.below;
        return out;
    }
    if (!model) throw input_error("mode '" + f.mode + "' needs a spectral model input");
    if (f.mode == "exact") {
        out.spec = build_exact_indicator(*model, targets, weights);
        return out;
    }
    if (f.mode == "intervals") {
        const int max_target = *std::max_element(targets.begin(), targets.end());
        const int count = f.level_window_count > 0
                              ? f.level_window_count
                              : std::min(model->levels(), max_target + 2);
        const std::vector<LevelWindow> lw =
            level_windows(*model, count, f.gamma_minus, f.gamma_plus);
        const std::array<double, 2> outer{std::min(w.lo, lw.front().lo),
                                          std::max(w.hi, lw.back().hi)};
        IntervalIndicatorResult res = build_interval_indicator(lw, targets, weights, outer);
        out.spec = std::move(res.spec);
        out.merges = std::move(res.merges);
        out.descriptor["gamma_minus"] = f.gamma_minus;
        out.descriptor["gamma_plus"] = f.gamma_plus;
        out.descriptor["level_windows"] = count;
        return out;
    }
    throw input_error("unknown mode '" + f.mode + "' (exact|intervals|threshold)");
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("OVLB_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return 1;
}

// ---------------------------------------------------------------------------
// gen-model

struct GenModelOpts {
    std::string out;
    double gap = 0.0;
    CLI::Option* gap_opt = nullptr;
    ClusterModelParams p;
};

void run_gen_model(const GenModelOpts& o) {
    ClusterModelParams p = o.p;
    if (o.gap_opt->count() > 0) {
        p.grid_lo = -1.0 + o.gap;
        if (p.grid_lo >= p.grid_hi)
            throw input_error("gap leaves an empty residual grid");
    }
    const SpectralModel S = gen_cluster_model(p);

    json params;
    params["ground_energy"] = p.ground_energy;
    params["ground_overlap"] = p.ground_overlap;
    params["first_center"] = p.first_center;
    params["second_center"] = p.second_center;
    params["cluster_size"] = p.cluster_size;
    params["cluster_spacing"] = p.cluster_spacing;
    params["cluster_sigma"] = p.cluster_sigma;
    params["cluster_mass"] = p.cluster_mass;
    params["grid_lo"] = p.grid_lo;
    params["grid_hi"] = p.grid_hi;
    params["grid_count"] = p.grid_count;
    json meta;
    meta["command"] = "gen-model";
    meta["generator"] = "cluster";
    meta["deterministic"] = true;
    meta["params"] = params;
    if (o.gap_opt->count() > 0) meta["gap"] = o.gap;

    save_model(o.out, S, meta);
    std::printf("wrote %s (%d levels)\n", o.out.c_str(), S.levels());
}

// ---------------------------------------------------------------------------
// moments

struct MomentsOpts {
    InputFlags in;
    WindowFlags win;
    int order = 8;
    std::string basis = "chebyshev";
    std::string out;
};

void run_moments(const MomentsOpts& o) {
    const Inputs in = load_inputs(o.in, true);
    const MomentBasis basis = parse_basis(o.basis);
    const std::optional<ScalingWindow> w = resolve_window(o.win, in, basis);
    const MomentVector M = compute_moments(in, o.order, basis, w);
    save_moments(o.out, M);
    std::printf("wrote %s (order %d, basis %s)\n", o.out.c_str(), M.degree(),
                basis_name(M.basis));
    if (M.basis == MomentBasis::monomial && M.degree() >= 2) {
        const HankelReport h = hankel_consistency(M);
        std::printf("hankel: order %d, min eigenvalue %s -> %s\n", h.order,
                    format_double(h.min_eigenvalue).c_str(),
                    h.pass ? "consistent" : "INCONSISTENT");
    } else {
        std::printf("hankel: skipped (needs monomial moments of order >= 2)\n");
    }
}

// ---------------------------------------------------------------------------
// bound

struct BoundOpts {
    InputFlags in;
    WindowFlags win;
    TargetFlags target;
    std::string moments_path;
    int order = -1;
    std::string basis = "chebyshev";
    std::string degrees = "1..8";
    int target_points = 20;
    int complement_points = 200;
    bool no_certify = false;
    int certify_factor = 4;
    int certify_rounds = 3;
    double certify_tol = 1e-6;
    int threads = 0;
    std::string out;
    std::string sidecar;
};

std::string default_sidecar(const std::string& out) {
    const auto dot = out.rfind('.');
    if (dot != std::string::npos && out.substr(dot) == ".csv")
        return out.substr(0, dot) + ".json";
    return out + ".json";
}

void append_bound_row(std::string& csv, const BoundResult& r) {
    csv += std::to_string(r.degree);
    csv += ',';
    csv += direction_name(r.direction);
    csv += ',';
    csv += format_double(r.raw_value);
    csv += ',';
    csv += format_double(r.clamped_value);
    csv += ',';
    csv += format_double(r.certified_margin);
    csv += ',';
    csv += lp_status_name(r.lp_status);
    csv += ',';
    csv += basis_name(r.basis);
    csv += ',';
    csv += std::to_string(r.grid_points);
    csv += '\n';
}

json result_json(const BoundResult& r) {
    json j;
    j["degree"] = r.degree;
    j["direction"] = direction_name(r.direction);
    j["raw_value"] = r.raw_value;
    j["clamped_value"] = r.clamped_value;
    j["certified"] = r.certified;
    j["certified_margin"] = r.certified_margin;
    j["lp_status"] = lp_status_name(r.lp_status);
    j["lp_iterations"] = r.lp_iterations;
    j["basis"] = basis_name(r.basis);
    j["grid_points"] = r.grid_points;
    j["provenance"] = provenance_name(r.provenance);
    j["coefficients"] = r.coefficients;
    j["active_rows"] = r.active_rows;
    return j;
}

void run_bound(const BoundOpts& o) {
    const std::vector<int> degrees = parse_int_list(o.degrees);
    const int max_degree = *std::max_element(degrees.begin(), degrees.end());

    Inputs in = load_inputs(o.in, o.moments_path.empty());
    MomentVector M;
    std::optional<ScalingWindow> w;
    std::string policy;
    if (!o.moments_path.empty()) {
        M = load_moments(o.moments_path);
        w = M.window;
        policy = "from-moments-file";
        in.descriptor["moments"] = o.moments_path;
    } else {
        const MomentBasis basis = parse_basis(o.basis);
        w = resolve_window(o.win, in, basis);
        policy = o.win.policy;
        const int order = o.order >= 0 ? o.order : max_degree;
        M = compute_moments(in, order, basis, w);
    }
    const ScalingWindow grid_window = w ? *w : ScalingWindow{-1.0, 1.0};

    std::optional<SpectralModel> model = in.model;
    if (!model && in.matrix) model = spectral_from_matrix(*in.matrix, *in.state);
    const ResolvedTarget target = resolve_target(o.target, model, grid_window);
    if (target.merges && target.merges->any()) {
        for (const MergedGroup& g : target.merges->groups)
            std::printf("note: merged %zu overlapping level windows into one region\n",
                        g.levels.size());
    }

    DiscretizationCounts counts;
    counts.target_points = o.target_points;
    counts.complement_points = o.complement_points;
    const ConstraintGrid grid = discretize(target.spec, grid_window, counts);

    SweepOptions opt;
    opt.do_certify = !o.no_certify;
    opt.certify.factor = o.certify_factor;
    opt.certify.max_rounds = o.certify_rounds;
    opt.certify.margin_tol = o.certify_tol;
    opt.threads = resolve_threads(o.threads);
    const std::vector<BoundResult> results = degree_sweep(M, grid, degrees, opt);

    json config;
    config["command"] = "bound";
    config["inputs"] = in.descriptor;
    config["target"] = target.descriptor;
    config["basis"] = basis_name(M.basis);
    config["order"] = M.degree();
    config["degrees"] = degrees;
    config["window"] = window_json(w, policy);
    config["counts"] = {{"target_points", counts.target_points},
                        {"complement_points", counts.complement_points}};
    config["certify"] = {{"enabled", opt.do_certify},
                         {"factor", opt.certify.factor},
                         {"max_rounds", opt.certify.max_rounds},
                         {"margin_tol", opt.certify.margin_tol}};
    config["threads"] = opt.threads;

    std::string csv = "# " + config.dump() + "\n";
    csv += "degree,direction,raw_value,clamped_value,certified_margin,lp_status,basis,grid_points\n";
    for (const BoundResult& r : results) append_bound_row(csv, r);
    atomic_write_text(o.out, csv);

    json side;
    side["config"] = config;
    side["results"] = json::array();
    for (const BoundResult& r : results) side["results"].push_back(result_json(r));
    const std::string sidecar = o.sidecar.empty() ? default_sidecar(o.out) : o.sidecar;
    atomic_write_text(sidecar, side.dump(2) + "\n");

    std::printf("wrote %s and %s (%zu rows)\n", o.out.c_str(), sidecar.c_str(), results.size());
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOpts {
    std::string gaps = "0.05,0.1,0.2,0.4";
    std::string degrees = "1..8";
    std::string basis = "chebyshev";
    std::string targets = "0";
    double center2 = 0.2;
    int threads = 0;
    std::string out;
};

void run_sweep(const SweepOpts& o) {
    const std::vector<double> gaps = parse_double_list(o.gaps);
    if (gaps.empty()) throw input_error("empty gap list");
    const std::vector<int> degrees = parse_int_list(o.degrees);
    const int max_degree = *std::max_element(degrees.begin(), degrees.end());
    const MomentBasis basis = parse_basis(o.basis);
    const std::vector<int> targets = parse_int_list(o.targets);

    SweepOptions opt;
    opt.threads = resolve_threads(o.threads);

    json config;
    config["command"] = "sweep";
    config["gaps"] = gaps;
    config["degrees"] = degrees;
    config["basis"] = basis_name(basis);
    config["targets"] = targets;
    config["second_center"] = o.center2;
    config["threads"] = opt.threads;

    std::string csv = "# " + config.dump() + "\n";
    csv += "system_id,gap,degree,direction,value,error,certified_margin\n";
    for (const double gap : gaps) {
        const SpectralModel S = gen_cluster_model_gap(gap, o.center2);
        const ScalingWindow w =
            round_window_outward(S.eigenvalues.front(), S.eigenvalues.back());
        const MomentVector M = moments_from_spectrum(S, max_degree, basis, w);
        const ConstraintGrid grid = discretize(build_exact_indicator(S, targets), w);
        const double exact = exact_overlap(S, targets);
        const std::vector<BoundResult> results = degree_sweep(M, grid, degrees, opt);
        const std::string system_id = "cluster-" + format_double(gap);
        for (const BoundResult& r : results) {
            csv += system_id;
            csv += ',';
            csv += format_double(gap);
            csv += ',';
            csv += std::to_string(r.degree);
            csv += ',';
            csv += direction_name(r.direction);
            csv += ',';
            csv += format_double(r.clamped_value);
            csv += ',';
            csv += format_double(std::abs(r.clamped_value - exact));
            csv += ',';
            csv += format_double(r.certified_margin);
            csv += '\n';
        }
    }
    atomic_write_text(o.out, csv);
    std::printf("wrote %s (%zu gaps x %zu degrees)\n", o.out.c_str(), gaps.size(),
                degrees.size());
}

// ---------------------------------------------------------------------------
// classic

struct ClassicOpts {
    InputFlags in;
    double mean = 0.0, second = 0.0, e0 = 0.0, e1 = 0.0, ed = 0.0;
    CLI::Option *mean_opt = nullptr, *second_opt = nullptr, *e0_opt = nullptr,
                *e1_opt = nullptr, *ed_opt = nullptr;
    std::string out;
};

void run_classic(const ClassicOpts& o) {
    double mean, second, e0, e1, ed;
    const bool explicit_in = o.mean_opt->count() > 0;
    if (explicit_in) {
        if (o.second_opt->count() == 0 || o.e0_opt->count() == 0 || o.e1_opt->count() == 0 ||
            o.ed_opt->count() == 0)
            throw input_error("explicit input needs --mean --second --e0 --e1 --ed together");
        mean = o.mean;
        second = o.second;
        e0 = o.e0;
        e1 = o.e1;
        ed = o.ed;
    } else {
        const Inputs in = load_inputs(o.in, true);
        SpectralModel S =
            in.model ? *in.model : spectral_from_matrix(*in.matrix, *in.state);
        if (S.levels() < 2)
            throw input_error("need at least two levels for comparator formulas");
        CompensatedSum m1, m2;
        for (int i = 0; i < S.levels(); ++i) {
            const auto k = static_cast<std::size_t>(i);
            m1.add(S.overlaps[k] * S.eigenvalues[k]);
            m2.add(S.overlaps[k] * S.eigenvalues[k] * S.eigenvalues[k]);
        }
        mean = m1.value();
        second = m2.value();
        e0 = S.eigenvalues.front();
        e1 = S.eigenvalues[1];
        ed = S.eigenvalues.back();
    }

    const double eckart = eckart_lower(mean, e0, e1);
    const FirstOrderBounds fo = first_order_bounds(mean, e0, e1, ed);
    const double variance = second - mean * mean;

    std::string table = "quantity,value\n";
    table += "eckart," + format_double(eckart) + "\n";
    table += "eckart_clamped," + format_double(std::max(0.0, eckart)) + "\n";
    if (variance <= 1e-14) {
        table += "mora,undefined (zero variance)\n";
    } else {
        table += "mora," + format_double(mora_upper(mean, second, e0)) + "\n";
    }
    table += "first_order_lower," + format_double(fo.lower) + "\n";
    table += "first_order_upper," + format_double(fo.upper) + "\n";
    table += "s," + format_double(fo.s) + "\n";
    table += std::string("trivial_lower,") + (fo.trivial_lower ? "true" : "false") + "\n";

    std::fputs(table.c_str(), stdout);
    if (!o.out.empty()) atomic_write_text(o.out, table);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal overlap bounds from spectral moments"};
    app.set_version_flag("--version", "ovlb 1.0.0");
    app.require_subcommand(1);

    GenModelOpts gen;
    auto* cg = app.add_subcommand("gen-model", "generate a synthetic cluster spectrum");
    cg->add_option("--out", gen.out, "output model JSON path")->required();
    gen.gap_opt = cg->add_option("--gap", gen.gap,
                                 "first excitation gap; residual grid spans [-1+gap, 1]");
    cg->add_option("--center2", gen.p.second_center, "second cluster center")->default_val(0.2);
    cg->add_option("--ground-energy", gen.p.ground_energy)->default_val(-1.0);
    cg->add_option("--ground-overlap", gen.p.ground_overlap)->default_val(0.4);
    cg->add_option("--center1", gen.p.first_center)->default_val(-0.4);
    cg->add_option("--cluster-size", gen.p.cluster_size)->default_val(5);
    cg->add_option("--cluster-spacing", gen.p.cluster_spacing)->default_val(0.02);
    cg->add_option("--cluster-sigma", gen.p.cluster_sigma)->default_val(0.04);
    cg->add_option("--cluster-mass", gen.p.cluster_mass)->default_val(0.2);
    auto* glo = cg->add_option("--grid-lo", gen.p.grid_lo)->default_val(-0.9);
    cg->add_option("--grid-hi", gen.p.grid_hi)->default_val(1.0);
    cg->add_option("--grid-count", gen.p.grid_count)->default_val(19);
    gen.gap_opt->excludes(glo);
    cg->callback([&gen] { run_gen_model(gen); });

    MomentsOpts mo;
    auto* cm = app.add_subcommand("moments", "compute a moment vector");
    add_input_flags(cm, mo.in);
    add_window_flags(cm, mo.win);
    cm->add_option("--order", mo.order, "highest moment order")->default_val(8);
    cm->add_option("--basis", mo.basis, "chebyshev|monomial")->default_val("chebyshev");
    cm->add_option("--out", mo.out, "output moment JSON path")->required();
    cm->callback([&mo] { run_moments(mo); });

    BoundOpts bo;
    auto* cb = app.add_subcommand("bound", "optimal overlap bounds over a degree ladder");
    add_input_flags(cb, bo.in);
    add_window_flags(cb, bo.win);
    add_target_flags(cb, bo.target);
    cb->add_option("--moments", bo.moments_path, "precomputed moment JSON (skips --order/--basis)");
    cb->add_option("--order", bo.order, "moment order (default: max degree)");
    cb->add_option("--basis", bo.basis, "chebyshev|monomial")->default_val("chebyshev");
    cb->add_option("--degrees", bo.degrees, "degree list, e.g. 1,2,3 or 1..8")
        ->default_val("1..8");
    cb->add_option("--target-points", bo.target_points, "grid points per target region")
        ->default_val(20);
    cb->add_option("--complement-points", bo.complement_points,
                   "grid points per complement region")
        ->default_val(200);
    cb->add_flag("--no-certify", bo.no_certify, "skip refinement certification");
    cb->add_option("--certify-factor", bo.certify_factor)->default_val(4);
    cb->add_option("--certify-rounds", bo.certify_rounds)->default_val(3);
    cb->add_option("--certify-tol", bo.certify_tol)->default_val(1e-6);
    cb->add_option("--threads", bo.threads, "worker threads (or OVLB_THREADS env)");
    cb->add_option("--out", bo.out, "output CSV path")->required();
    cb->add_option("--json", bo.sidecar, "sidecar JSON path (default: CSV path with .json)");
    cb->callback([&bo] { run_bound(bo); });

    SweepOpts so;
    auto* cs = app.add_subcommand("sweep", "bound error across a gap family");
    cs->add_option("--gaps", so.gaps, "comma-separated gap list")
        ->default_val("0.05,0.1,0.2,0.4");
    cs->add_option("--degrees", so.degrees, "degree list")->default_val("1..8");
    cs->add_option("--basis", so.basis, "chebyshev|monomial")->default_val("chebyshev");
    cs->add_option("--targets", so.targets, "target level indices")->default_val("0");
    cs->add_option("--center2", so.center2, "second cluster center")->default_val(0.2);
    cs->add_option("--threads", so.threads, "worker threads (or OVLB_THREADS env)");
    cs->add_option("--out", so.out, "output CSV path")->required();
    cs->callback([&so] { run_sweep(so); });

    ClassicOpts co;
    auto* cc = app.add_subcommand("classic", "closed-form comparator table");
    add_input_flags(cc, co.in);
    co.mean_opt = cc->add_option("--mean", co.mean, "energy expectation value");
    co.second_opt = cc->add_option("--second", co.second, "second energy moment");
    co.e0_opt = cc->add_option("--e0", co.e0, "ground energy");
    co.e1_opt = cc->add_option("--e1", co.e1, "first excited energy");
    co.ed_opt = cc->add_option("--ed", co.ed, "highest energy");
    cc->add_option("--out", co.out, "also write the table to this path");
    cc->callback([&co] { run_classic(co); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const input_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
