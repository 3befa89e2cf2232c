#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "geosnakes/image_io.hpp"

using namespace geosnakes;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return GEOSNAKES_CLI_PATH; }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "geosnakes_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Quick settings so CLI runs stay fast.
const std::string kQuick = " --max-iteration 30 --gvf-iterations 30 --motion-tolerance 1e-9";

}  // namespace

TEST_CASE("synth emits image and mask files") {
    const fs::path dir = fresh_dir("synth");
    REQUIRE(run_cli("synth --synthetic two_rectangles --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "two_rectangles.pgm"));
    CHECK(fs::exists(dir / "two_rectangles.png"));
    CHECK(fs::exists(dir / "two_rectangles_mask.pgm"));
    CHECK(fs::exists(dir / "two_rectangles_mask.png"));
    const ScalarField mask = read_pgm((dir / "two_rectangles_mask.pgm").string());
    bool has_fg = false, has_bg = false;
    for (double v : mask.values) {
        has_fg = has_fg || v == 255.0;
        has_bg = has_bg || v == 0.0;
        CHECK((v == 0.0 || v == 255.0));
    }
    CHECK(has_fg);
    CHECK(has_bg);
}

TEST_CASE("segment writes the artifact manifest") {
    const fs::path dir = fresh_dir("segment");
    REQUIRE(run_cli("segment --synthetic ushape --method geosnakes_alt --snapshot-every 10" + kQuick +
                    " --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "final_contours.txt"));
    CHECK(fs::exists(dir / "trace.csv"));
    CHECK(fs::exists(dir / "phases.csv"));
    CHECK(fs::exists(dir / "summary.txt"));
    int snapshots = 0;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename().string().rfind("snap_", 0) == 0 && e.path().extension() == ".png")
            ++snapshots;
    CHECK(snapshots >= 3);

    const std::string trace = slurp(dir / "trace.csv");
    CHECK(trace.rfind("iter,phase,tangential_sum,normal_sum,points,mean_disp\n", 0) == 0);
    const std::string phases = slurp(dir / "phases.csv");
    CHECK(phases.rfind("phase,start_iter,end_iter\n", 0) == 0);
}

TEST_CASE("segment reruns bit-identically from its own summary") {
    const fs::path dir1 = fresh_dir("rerun1");
    const fs::path dir2 = fresh_dir("rerun2");
    REQUIRE(run_cli("segment --synthetic two_rectangles --method gac" + kQuick + " --out " +
                    dir1.string()) == 0);
    REQUIRE(run_cli("segment --config " + (dir1 / "summary.txt").string() + " --out " +
                    dir2.string()) == 0);
    const std::string a = slurp(dir1 / "trace.csv");
    REQUIRE(!a.empty());
    CHECK(a == slurp(dir2 / "trace.csv"));
    CHECK(slurp(dir1 / "phases.csv") == slurp(dir2 / "phases.csv"));
}

TEST_CASE("missing input exits with usage status 2 and names the path") {
    const fs::path dir = fresh_dir("missing");
    const std::string cmd = std::string(cli_path()) + " segment --input /no/such/file.pgm --out " +
                            dir.string() + " 2>" + (dir / "err.txt").string() + " >/dev/null";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
    CHECK(slurp(dir / "err.txt").find("/no/such/file.pgm") != std::string::npos);
}

TEST_CASE("compare requires at least two methods") {
    const fs::path dir = fresh_dir("compare_one");
    CHECK(run_cli("compare --synthetic two_rectangles --methods gac" + kQuick + " --out " +
                  dir.string()) == 2);
}

TEST_CASE("compare writes one row per method") {
    const fs::path dir = fresh_dir("compare");
    REQUIRE(run_cli("compare --synthetic two_rectangles --methods gac,gac_balloon" + kQuick +
                    " --out " + dir.string()) == 0);
    const std::string csv = slurp(dir / "comparison.csv");
    CHECK(csv.rfind("method,dice,hausdorff,iterations,psp,wall_ms\n", 0) == 0);
    CHECK(csv.find("\ngac,") != std::string::npos);
    CHECK(csv.find("\ngac_balloon,") != std::string::npos);
    CHECK(fs::exists(dir / "gac" / "trace.csv"));
    CHECK(fs::exists(dir / "gac_balloon" / "trace.csv"));
}

TEST_CASE("analyze emits edge indicator, quiver and critical points") {
    const fs::path dir = fresh_dir("analyze");
    REQUIRE(run_cli("analyze --synthetic two_rectangles --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "edge_indicator.png"));
    const std::string cps = slurp(dir / "critical_points.csv");
    CHECK(cps.find("saddle") != std::string::npos);

    // U-shape: the force field points horizontally in opposite directions
    // across the concavity mouth, i.e. the u component changes sign there.
    const fs::path dir2 = fresh_dir("analyze_u");
    REQUIRE(run_cli("analyze --synthetic ushape --out " + dir2.string()) == 0);
    std::istringstream quiver(slurp(dir2 / "quiver.csv"));
    std::string line;
    std::getline(quiver, line);  // header
    bool has_pos = false, has_neg = false;
    while (std::getline(quiver, line)) {
        int x = 0, y = 0;
        double u = 0.0, v = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &x, &y, &u, &v) != 4) continue;
        if (y == 24 && x > 29 && x < 51) {
            if (u > 0.3) has_pos = true;
            if (u < -0.3) has_neg = true;
        }
    }
    CHECK(has_pos);
    CHECK(has_neg);
}

TEST_CASE("analyze of a constant image yields a white indicator and no critical points") {
    const fs::path dir = fresh_dir("analyze_const");
    const fs::path img = dir / "flat.pgm";
    write_pgm(img.string(), ScalarField(40, 40, 128.0));
    REQUIRE(run_cli("analyze --input " + img.string() + " --out " + dir.string()) == 0);
    const ScalarField g = read_png((dir / "edge_indicator.png").string());
    for (double v : g.values) CHECK(v == 255.0);
    const std::string cps = slurp(dir / "critical_points.csv");
    CHECK(cps == "x,y,kind,grad_norm,hess_det\n");
}
