// Command-line front end: segmentation runs, edge-field analysis, method
// comparison and synthetic scene generation.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geosnakes/diagnostics.hpp"
#include "geosnakes/edge.hpp"
#include "geosnakes/field.hpp"
#include "geosnakes/image_io.hpp"
#include "geosnakes/levelset.hpp"
#include "geosnakes/metrics.hpp"
#include "geosnakes/scheduler.hpp"
#include "geosnakes/synth.hpp"

namespace fs = std::filesystem;
using namespace geosnakes;

namespace {

struct Manifest {
    std::string input;      // image path; mutually exclusive with synthetic
    std::string synthetic;  // synthetic kind name
    int width = 80, height = 80;
    double fg = 200.0, bg = 50.0;
    double arc_gap = 10.0;
    std::uint64_t seed = 0;
    double noise_sigma = 0.0;

    EdgeModelConfig edge;
    FlowParams flow;
    ScheduleConfig schedule;

    std::string method = "geosnakes_alt";
    std::vector<std::string> init_circles;  // "cx,cy,r"
    std::vector<std::string> init_rects;    // "x0,y0,x1,y1"
    double psp_tol = 0.03;                  // residual tolerance per contour point
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Key table shared by the --config parser and the summary serializer.
// Values are formatted so that a written config reparses to the same state.
struct KeyBinding {
    std::string key;
    std::function<void(Manifest&, const std::string&)> apply;
    std::function<std::string(const Manifest&)> serialize;
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw UsageError("bad numeric value: " + s);
    return v;
}

int parse_int(const std::string& s) {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw UsageError("bad integer value: " + s);
    return v;
}

const std::vector<KeyBinding>& key_bindings() {
    static const std::vector<KeyBinding> table = [] {
        std::vector<KeyBinding> t;
        auto add_str = [&](const std::string& key, std::string Manifest::* f) {
            t.push_back({key, [f](Manifest& m, const std::string& v) { m.*f = v; },
                         [f](const Manifest& m) { return m.*f; }});
        };
        auto add_dbl = [&](const std::string& key, auto getter) {
            t.push_back({key,
                         [getter](Manifest& m, const std::string& v) { *getter(m) = parse_double(v); },
                         [getter](const Manifest& m) { return fmt_double(*getter(const_cast<Manifest&>(m))); }});
        };
        auto add_int = [&](const std::string& key, auto getter) {
            t.push_back({key,
                         [getter](Manifest& m, const std::string& v) { *getter(m) = parse_int(v); },
                         [getter](const Manifest& m) { return std::to_string(*getter(const_cast<Manifest&>(m))); }});
        };

        add_str("input", &Manifest::input);
        add_str("synthetic", &Manifest::synthetic);
        add_int("width", [](Manifest& m) { return &m.width; });
        add_int("height", [](Manifest& m) { return &m.height; });
        add_dbl("fg", [](Manifest& m) { return &m.fg; });
        add_dbl("bg", [](Manifest& m) { return &m.bg; });
        add_dbl("arc-gap", [](Manifest& m) { return &m.arc_gap; });
        t.push_back({"seed",
                     [](Manifest& m, const std::string& v) { m.seed = std::stoull(v); },
                     [](const Manifest& m) { return std::to_string(m.seed); }});
        add_dbl("noise-sigma", [](Manifest& m) { return &m.noise_sigma; });

        add_dbl("sigma", [](Manifest& m) { return &m.edge.sigma; });
        add_dbl("q", [](Manifest& m) { return &m.edge.q; });
        add_dbl("gvf-mu", [](Manifest& m) { return &m.edge.gvf_mu; });
        add_int("gvf-iterations", [](Manifest& m) { return &m.edge.gvf_iterations; });
        add_dbl("gvf-dt", [](Manifest& m) { return &m.edge.gvf_dt; });
        add_int("aniso-iterations", [](Manifest& m) { return &m.edge.aniso_iterations; });
        add_dbl("aniso-kappa", [](Manifest& m) { return &m.edge.aniso_kappa; });
        add_dbl("aniso-dt", [](Manifest& m) { return &m.edge.aniso_dt; });

        add_dbl("dt", [](Manifest& m) { return &m.flow.dt; });
        add_dbl("balloon", [](Manifest& m) { return &m.flow.balloon; });
        add_dbl("ada-lambda", [](Manifest& m) { return &m.flow.ada_lambda; });
        add_dbl("ada-beta", [](Manifest& m) { return &m.flow.ada_beta; });
        add_dbl("cv-lambda1", [](Manifest& m) { return &m.flow.cv_lambda1; });
        add_dbl("cv-lambda2", [](Manifest& m) { return &m.flow.cv_lambda2; });
        add_dbl("cv-mu", [](Manifest& m) { return &m.flow.cv_mu; });
        add_dbl("cv-nu", [](Manifest& m) { return &m.flow.cv_nu; });
        add_int("rotation-direction", [](Manifest& m) { return &m.flow.rotation_direction; });

        add_int("max-cycle", [](Manifest& m) { return &m.schedule.max_cycle; });
        add_int("max-iteration", [](Manifest& m) { return &m.schedule.max_iteration; });
        add_dbl("motion-tolerance", [](Manifest& m) { return &m.schedule.motion_tolerance; });
        add_int("reinit-every", [](Manifest& m) { return &m.schedule.reinit_every; });
        add_int("reinit-iterations", [](Manifest& m) { return &m.schedule.reinit_iterations; });
        add_int("snapshot-every", [](Manifest& m) { return &m.schedule.snapshot_every; });

        add_str("method", &Manifest::method);
        add_dbl("psp-tol", [](Manifest& m) { return &m.psp_tol; });
        return t;
    }();
    return table;
}

void apply_config_line(Manifest& m, const std::string& key, const std::string& value) {
    if (key == "init-circle") {
        m.init_circles.push_back(value);
        return;
    }
    if (key == "init-rect") {
        m.init_rects.push_back(value);
        return;
    }
    for (const KeyBinding& b : key_bindings())
        if (b.key == key) {
            b.apply(m, value);
            return;
        }
    throw UsageError("unknown config key: " + key);
}

void load_config_file(Manifest& m, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        std::size_t begin = 0;
        while (begin < line.size() && std::isspace(static_cast<unsigned char>(line[begin]))) ++begin;
        line.erase(0, begin);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("bad config line (expected key=value): " + line);
        apply_config_line(m, line.substr(0, eq), line.substr(eq + 1));
    }
}

std::string serialize_config(const Manifest& m) {
    std::string out;
    for (const KeyBinding& b : key_bindings()) {
        const std::string v = b.serialize(m);
        if ((b.key == "input" || b.key == "synthetic") && v.empty()) continue;
        out += b.key + "=" + v + "\n";
    }
    for (const std::string& c : m.init_circles) out += "init-circle=" + c + "\n";
    for (const std::string& r : m.init_rects) out += "init-rect=" + r + "\n";
    return out;
}

std::vector<double> split_numbers(const std::string& s, std::size_t expected, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
    if (out.size() != expected)
        throw UsageError(std::string(what) + ": expected " + std::to_string(expected) +
                         " comma-separated numbers, got '" + s + "'");
    return out;
}

struct Inputs {
    ScalarField image;
    std::optional<ScalarField> mask;  // ground truth, synthetic only
    std::vector<ShapeSpec> shapes;
};

Inputs build_inputs(const Manifest& m, bool need_shapes) {
    if (m.input.empty() == m.synthetic.empty())
        throw UsageError("exactly one of --input and --synthetic is required");
    Inputs in;
    if (!m.synthetic.empty()) {
        SyntheticSpec spec;
        spec.kind = SyntheticSpec::kind_from_string(m.synthetic);
        spec.width = m.width;
        spec.height = m.height;
        spec.foreground = m.fg;
        spec.background = m.bg;
        spec.arc_gap_degrees = m.arc_gap;
        spec.seed = m.seed;
        spec.noise_sigma = m.noise_sigma;
        Synthetic s = generate(spec);
        in.image = std::move(s.image);
        in.mask = std::move(s.mask);
    } else {
        if (!fs::exists(m.input)) throw UsageError("input file does not exist: " + m.input);
        in.image = read_image(m.input);
    }

    for (const std::string& c : m.init_circles) {
        const std::vector<double> v = split_numbers(c, 3, "init-circle");
        in.shapes.push_back(ShapeSpec::circle(v[0], v[1], v[2]));
    }
    for (const std::string& r : m.init_rects) {
        const std::vector<double> v = split_numbers(r, 4, "init-rect");
        in.shapes.push_back(ShapeSpec::rectangle(v[0], v[1], v[2], v[3]));
    }
    if (in.shapes.empty() && need_shapes) {
        if (m.synthetic.empty())
            throw UsageError("file inputs need at least one --init-circle or --init-rect");
        in.shapes = standard_initializations(SyntheticSpec::kind_from_string(m.synthetic),
                                             in.image.width, in.image.height);
    }
    return in;
}

struct PspSummary {
    double tangential = 0.0;
    double normal = 0.0;
    int points = 0;
    bool is_psp = false;
    bool is_full = false;
};

PspSummary psp_summary(const RunResult& result, const PreparedFields& fields, double tol_per_point) {
    PspSummary s;
    const ScalarField kappa = curvature(result.phi);
    for (const Contour& c : result.contours) {
        if (!c.closed) continue;
        const PspReport rep = classify_psp(c, fields.g, fields.F, sample_on_contour(kappa, c), 1.0);
        s.tangential += rep.tangential_residual;
        s.normal += rep.normal_residual;
        s.points += static_cast<int>(c.points.size());
    }
    const double tol = tol_per_point * std::max(s.points, 1);
    s.is_psp = s.normal < tol && s.tangential >= 10.0 * tol;
    s.is_full = s.normal < tol && s.tangential < tol;
    return s;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
}

struct RunArtifacts {
    RunResult result;
    PreparedFields fields;
    double wall_seconds = 0.0;
};

RunArtifacts run_method(const Manifest& m, const Inputs& in, const std::string& method,
                        const fs::path& out_dir) {
    fs::create_directories(out_dir);
    RunArtifacts art;
    art.fields = prepare_fields(in.image, m.edge);
    ScalarField phi = init_from_shapes(in.shapes, in.image.width, in.image.height);

    SnapshotObserver observer;
    if (m.schedule.snapshot_every > 0) {
        observer = [&](int iter, const ScalarField&, const std::vector<Contour>& contours) {
            char name[64];
            std::snprintf(name, sizeof(name), "snap_%06d", iter);
            write_contour_overlay_png(out_dir / (std::string(name) + ".png"), in.image, contours);
            write_text(out_dir / (std::string(name) + ".txt"), contours_to_text(contours));
        };
        observer(0, phi, extract_contours(phi));
    }

    const auto t0 = std::chrono::steady_clock::now();
    if (method == "geosnakes_alt") {
        art.result = run_plan_on_fields(art.fields.g, art.fields.F, &art.fields.image, std::move(phi),
                                        m.flow, m.schedule, alternating_plan(m.schedule.max_cycle),
                                        /*vanish_is_error=*/true, observer);
    } else {
        art.result = run_plan_on_fields(art.fields.g, art.fields.F, &art.fields.image, std::move(phi),
                                        m.flow, m.schedule, {step_kind_from_string(method)},
                                        /*vanish_is_error=*/false, observer);
    }
    art.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_text(out_dir / "final_contours.txt", contours_to_text(art.result.contours));
    write_text(out_dir / "trace.csv", art.result.trace.to_csv());
    write_text(out_dir / "phases.csv", art.result.trace.phases_csv());
    if (m.schedule.snapshot_every > 0 && observer)
        observer(art.result.trace.records.empty() ? 0 : art.result.trace.records.back().iteration + 1,
                 art.result.phi, art.result.contours);
    return art;
}

std::string summary_text(const Manifest& m, const RunArtifacts& art) {
    std::string out = serialize_config(m);
    out += "# --- run summary (comments are ignored when reused as --config) ---\n";
    char buf[256];
    int total_iters = 0;
    for (const PhaseSpan& p : art.result.trace.phases) {
        std::snprintf(buf, sizeof(buf), "# phase %s: iterations %d..%d (%d), wall %.3f s%s\n",
                      p.phase.c_str(), p.start_iter, p.end_iter, p.end_iter - p.start_iter + 1,
                      p.wall_seconds, p.converged_by_motion ? ", converged by motion" : "");
        out += buf;
        total_iters = p.end_iter;
    }
    std::snprintf(buf, sizeof(buf), "# total iterations: %d, wall %.3f s\n", total_iters,
                  art.wall_seconds);
    out += buf;
    if (art.result.vanished) {
        std::snprintf(buf, sizeof(buf), "# contour vanished at iteration %d\n",
                      art.result.vanish_iteration);
        out += buf;
    }
    const PspSummary psp = psp_summary(art.result, art.fields, m.psp_tol);
    std::snprintf(buf, sizeof(buf),
                  "# psp: tangential_sum=%.6g normal_sum=%.6g points=%d is_psp=%d is_full=%d\n",
                  psp.tangential, psp.normal, psp.points, psp.is_psp ? 1 : 0, psp.is_full ? 1 : 0);
    out += buf;
    return out;
}

int cmd_segment(const Manifest& m, const std::string& out_dir) {
    const Inputs in = build_inputs(m, /*need_shapes=*/true);
    const RunArtifacts art = run_method(m, in, m.method, out_dir);
    write_text(fs::path(out_dir) / "summary.txt", summary_text(m, art));
    return 0;
}

int cmd_analyze(const Manifest& m, const std::string& out_dir, int quiver_step, double grad_tol) {
    const Inputs in = build_inputs(m, /*need_shapes=*/false);
    fs::create_directories(out_dir);

    const ScalarField norm255 = rescale(in.image, 0.0, 255.0);
    EdgeModelConfig cfg = m.edge;
    const ScalarField smoothed = anisotropic_smooth(norm255, cfg);
    const ScalarField g = edge_indicator(smoothed, cfg);

    ScalarField g255 = g;
    for (double& v : g255.values) v *= 255.0;
    write_png_gray(fs::path(out_dir) / "edge_indicator.png", g255);

    const VectorField grad = gradient_central(g);
    std::string quiver = "x,y,u,v\n";
    char line[128];
    for (int y = 0; y < g.height; y += quiver_step)
        for (int x = 0; x < g.width; x += quiver_step) {
            const std::size_t i = static_cast<std::size_t>(y) * g.width + x;
            const double len = std::hypot(grad.u[i], grad.v[i]) + 1e-12;
            std::snprintf(line, sizeof(line), "%d,%d,%.6g,%.6g\n", x, y, grad.u[i] / len,
                          grad.v[i] / len);
            quiver += line;
        }
    write_text(fs::path(out_dir) / "quiver.csv", quiver);

    const double tol = grad_tol > 0.0 ? grad_tol : default_critical_grad_tol(g);
    const std::vector<CriticalPoint> cps =
        tol > 0.0 ? find_critical_points(g, tol) : std::vector<CriticalPoint>{};
    write_text(fs::path(out_dir) / "critical_points.csv", critical_points_csv(cps));
    return 0;
}

int cmd_compare(const Manifest& base, const std::vector<std::string>& methods,
                const std::string& out_dir) {
    if (methods.size() < 2) throw UsageError("compare needs at least 2 methods");
    const Inputs in = build_inputs(base, /*need_shapes=*/true);
    fs::create_directories(out_dir);

    std::optional<std::vector<Contour>> gt_contours;
    if (in.mask) gt_contours = contours_from_mask(*in.mask);

    std::string csv = "method,dice,hausdorff,iterations,psp,wall_ms\n";
    bool any_failed = false;
    for (const std::string& method : methods) {
        try {
            const RunArtifacts art = run_method(base, in, method, fs::path(out_dir) / method);
            Manifest m = base;
            m.method = method;
            write_text(fs::path(out_dir) / method / "summary.txt", summary_text(m, art));

            double dice_v = std::nan(""), haus_v = std::nan("");
            if (in.mask) {
                const ScalarField seg_mask = mask_from_phi(art.result.phi);
                dice_v = method == "chan_vese" ? dice_label_agnostic(seg_mask, *in.mask)
                                               : dice(seg_mask, *in.mask);
                if (gt_contours && !art.result.contours.empty())
                    haus_v = contours_hausdorff(art.result.contours, *gt_contours);
            }
            const PspSummary psp = psp_summary(art.result, art.fields, base.psp_tol);
            const int iters =
                art.result.trace.records.empty() ? 0 : art.result.trace.records.back().iteration;
            char line[256];
            std::snprintf(line, sizeof(line), "%s,%.6g,%.6g,%d,%d,%.1f\n", method.c_str(), dice_v,
                          haus_v, iters, psp.is_psp ? 1 : 0, art.wall_seconds * 1000.0);
            csv += line;
        } catch (const std::exception& e) {
            std::cerr << "method " << method << " failed: " << e.what() << "\n";
            csv += method + ",error,error,0,0,0\n";
            any_failed = true;
        }
    }
    write_text(fs::path(out_dir) / "comparison.csv", csv);
    return any_failed ? 1 : 0;
}

int cmd_synth(const Manifest& m, const std::string& out_dir) {
    if (m.synthetic.empty()) throw UsageError("synth requires --synthetic <kind>");
    SyntheticSpec spec;
    spec.kind = SyntheticSpec::kind_from_string(m.synthetic);
    spec.width = m.width;
    spec.height = m.height;
    spec.foreground = m.fg;
    spec.background = m.bg;
    spec.arc_gap_degrees = m.arc_gap;
    spec.seed = m.seed;
    spec.noise_sigma = m.noise_sigma;
    const Synthetic s = generate(spec);

    fs::create_directories(out_dir);
    const std::string stem = m.synthetic;
    write_pgm(fs::path(out_dir) / (stem + ".pgm"), s.image);
    write_png_gray(fs::path(out_dir) / (stem + ".png"), rescale(s.image, 0.0, 255.0));
    ScalarField mask255 = s.mask;
    for (double& v : mask255.values) v *= 255.0;
    write_pgm(fs::path(out_dir) / (stem + "_mask.pgm"), mask255);
    write_png_gray(fs::path(out_dir) / (stem + "_mask.png"), mask255);
    return 0;
}

void add_manifest_options(CLI::App* cmd, Manifest& m, std::string& config_path,
                          std::vector<std::string>& cli_circles, std::vector<std::string>& cli_rects) {
    cmd->add_option("--config", config_path, "flat key=value file overriding defaults");
    cmd->add_option("--input", m.input, "input image (PGM P5 or PNG)");
    cmd->add_option("--synthetic", m.synthetic,
                    "synthetic scene: ushape | two_rectangles | three_objects | three_circle_arcs");
    cmd->add_option("--width", m.width);
    cmd->add_option("--height", m.height);
    cmd->add_option("--fg", m.fg, "synthetic foreground intensity");
    cmd->add_option("--bg", m.bg, "synthetic background intensity");
    cmd->add_option("--arc-gap", m.arc_gap, "gap in degrees for three_circle_arcs");
    cmd->add_option("--seed", m.seed);
    cmd->add_option("--noise-sigma", m.noise_sigma);

    cmd->add_option("--sigma", m.edge.sigma, "Gaussian width of the edge indicator");
    cmd->add_option("--q", m.edge.q, "edge indicator exponent");
    cmd->add_option("--gvf-mu", m.edge.gvf_mu);
    cmd->add_option("--gvf-iterations", m.edge.gvf_iterations);
    cmd->add_option("--gvf-dt", m.edge.gvf_dt);
    cmd->add_option("--aniso-iterations", m.edge.aniso_iterations);
    cmd->add_option("--aniso-kappa", m.edge.aniso_kappa);
    cmd->add_option("--aniso-dt", m.edge.aniso_dt);

    cmd->add_option("--dt", m.flow.dt, "evolution time step");
    cmd->add_option("--balloon", m.flow.balloon, "balloon weight, positive shrinks");
    cmd->add_option("--ada-lambda", m.flow.ada_lambda);
    cmd->add_option("--ada-beta", m.flow.ada_beta);
    cmd->add_option("--cv-lambda1", m.flow.cv_lambda1);
    cmd->add_option("--cv-lambda2", m.flow.cv_lambda2);
    cmd->add_option("--cv-mu", m.flow.cv_mu);
    cmd->add_option("--cv-nu", m.flow.cv_nu);
    cmd->add_option("--rotation-direction", m.flow.rotation_direction, "+1 or -1");

    cmd->add_option("--max-cycle", m.schedule.max_cycle);
    cmd->add_option("--max-iteration", m.schedule.max_iteration);
    cmd->add_option("--motion-tolerance", m.schedule.motion_tolerance,
                    "contour displacement in px per 10 iterations");
    cmd->add_option("--reinit-every", m.schedule.reinit_every);
    cmd->add_option("--reinit-iterations", m.schedule.reinit_iterations);
    cmd->add_option("--snapshot-every", m.schedule.snapshot_every);

    cmd->add_option("--init-circle", cli_circles, "initial circle cx,cy,r (repeatable)");
    cmd->add_option("--init-rect", cli_rects, "initial rectangle x0,y0,x1,y1 (repeatable)");
    cmd->add_option("--psp-tol", m.psp_tol, "PSP residual tolerance per contour point");
}

// Fold config-file values and explicit flags into the manifest: defaults,
// then the config file, then any flag the user actually passed.
Manifest resolve_manifest(CLI::App* cmd, const Manifest& flag_values, const std::string& config_path,
                          const std::vector<std::string>& cli_circles,
                          const std::vector<std::string>& cli_rects) {
    Manifest m;
    if (!config_path.empty()) load_config_file(m, config_path);
    for (const KeyBinding& b : key_bindings()) {
        const CLI::Option* opt = cmd->get_option_no_throw("--" + b.key);
        if (opt && opt->count() > 0) b.apply(m, b.serialize(flag_values));
    }
    if (!cli_circles.empty()) m.init_circles = cli_circles;
    if (!cli_rects.empty()) m.init_rects = cli_rects;
    if (cmd->count("--input") > 0 && cmd->count("--synthetic") == 0) m.synthetic.clear();
    if (cmd->count("--synthetic") > 0 && cmd->count("--input") == 0) m.input.clear();
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge-based active contour segmentation with alternating curve evolutions"};
    app.require_subcommand(1);

    Manifest flag_values;
    std::string config_path, out_dir, methods_arg;
    std::vector<std::string> cli_circles, cli_rects;
    int quiver_step = 2;
    double grad_tol = 0.0;

    CLI::App* seg = app.add_subcommand("segment", "run one segmentation method");
    add_manifest_options(seg, flag_values, config_path, cli_circles, cli_rects);
    seg->add_option("--method", flag_values.method,
                    "geosnakes_alt | gac | gac_balloon | gac_adaptive | chan_vese");
    seg->add_option("--out", out_dir, "output directory")->required();

    CLI::App* ana = app.add_subcommand("analyze", "edge indicator, quiver and critical points");
    add_manifest_options(ana, flag_values, config_path, cli_circles, cli_rects);
    ana->add_option("--out", out_dir, "output directory")->required();
    ana->add_option("--quiver-step", quiver_step, "quiver subsampling stride");
    ana->add_option("--grad-tol", grad_tol, "critical point gradient tolerance (0 = auto)");

    CLI::App* cmp = app.add_subcommand("compare", "run several methods on one input");
    add_manifest_options(cmp, flag_values, config_path, cli_circles, cli_rects);
    cmp->add_option("--methods", methods_arg, "comma-separated method list (at least 2)")->required();
    cmp->add_option("--out", out_dir, "output directory")->required();

    CLI::App* syn = app.add_subcommand("synth", "emit a synthetic image and its mask");
    add_manifest_options(syn, flag_values, config_path, cli_circles, cli_rects);
    syn->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        const Manifest m = resolve_manifest(cmd, flag_values, config_path, cli_circles, cli_rects);
        if (cmd == seg) return cmd_segment(m, out_dir);
        if (cmd == ana) return cmd_analyze(m, out_dir, quiver_step, grad_tol);
        if (cmd == cmp) {
            std::vector<std::string> methods;
            std::stringstream ss(methods_arg);
            std::string item;
            while (std::getline(ss, item, ',')) methods.push_back(item);
            return cmd_compare(m, methods, out_dir);
        }
        return cmd_synth(m, out_dir);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
