#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

std::string bin_path() {
    const char* p = std::getenv("KERRFORGE_BIN");
    REQUIRE(p != nullptr);
    return p;
}

std::string config_path(const std::string& name) {
    const char* p = std::getenv("KERRFORGE_CONFIGS");
    REQUIRE(p != nullptr);
    return std::string(p) + "/" + name;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = bin_path() + " " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) {
        res.output.append(buf, n);
    }
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("kerr-report --json on a single transmon") {
    const RunResult r =
        run("kerr-report --json " + config_path("storage_single.json"));
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    REQUIRE(j.contains("closed_form"));
    REQUIRE(j.contains("path_enumeration"));
    REQUIRE(j.contains("numeric"));

    // chi g^4 / (Delta^3 (Delta - chi)) with g = 0.1, Delta = 1, chi = -0.15.
    const double s_expected = -0.15 * 1e-4 / 1.15;
    const double s_closed = j["closed_form"]["self_kerr_ghz"][0];
    CHECK(s_closed == doctest::Approx(s_expected).epsilon(1e-9));
    const double s_paths = j["path_enumeration"]["self_kerr_ghz"][0];
    CHECK(s_paths == doctest::Approx(s_closed).epsilon(1e-10));
    const double s_num = j["numeric"]["self_kerr_ghz"][0];
    CHECK(s_num == doctest::Approx(s_closed).epsilon(0.1));

    CHECK(j["closed_form"]["cavities"][0] == "c1");
    CHECK(j["closed_form"]["cross_kerr_ghz"][0][0] == 0.0);
}

TEST_CASE("kerr-report output is deterministic") {
    const std::string args =
        "kerr-report --json --skip-numeric " + config_path("storage_balanced.json");
    const RunResult a = run(args);
    const RunResult b = run(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(!a.output.empty());
}

TEST_CASE("kerr-report on a multilevel device has no closed form") {
    const RunResult r = run("kerr-report --json --skip-numeric " +
                            config_path("storage_multilevel.json"));
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j["closed_form"].contains("unavailable"));
    CHECK(j["path_enumeration"]["self_kerr_ghz"].size() == 1);
}

TEST_CASE("validate reports per-pair dispersive diagnostics") {
    const RunResult r = run("validate " + config_path("storage_balanced.json"));
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    REQUIRE(j["diagnostics"].size() == 2);
    for (const auto& d : j["diagnostics"]) {
        CHECK(d["class"] == "dispersive");
        CHECK(d["g_over_delta"] == doctest::Approx(0.1).epsilon(1e-9));
        CHECK(d["degenerate"] == false);
        CHECK(d["pt_pole"] == false);
    }
}

TEST_CASE("exit codes classify the error") {
    // Missing config: usage error.
    CHECK(run("kerr-report /nonexistent/config.json").exit_code == 1);

    // Zero shift leaves the gate off: infeasible target.
    CHECK(run("gate --tunable q2 --shift 0 " + config_path("gate_pair_off.json"))
              .exit_code == 3);

    // Resonant cavity-qubit pair: perturbation theory poles.
    const auto resonant = temp_file("kerrforge_resonant.json");
    {
        std::ofstream os(resonant);
        os << R"({"schema_version": 1,
                  "cavities": [{"label": "c1", "frequency": 8.0, "fock_dim": 6}],
                  "devices": [{"label": "q1", "type": "two_level",
                               "frequency": 8.0}],
                  "couplings": [{"cavity": "c1", "device": "q1", "g": 0.1}],
                  "rwa": true})";
    }
    CHECK(run("kerr-report " + resonant.string()).exit_code == 2);
    std::filesystem::remove(resonant);
}

TEST_CASE("--json-errors wraps the message and exit code") {
    const RunResult r = run("--json-errors gate --tunable q2 --shift 0 " +
                                config_path("gate_pair_off.json"),
                            /*merge_stderr=*/true);
    CHECK(r.exit_code == 3);
    const json j = json::parse(r.output);
    CHECK(j["error"]["exit_code"] == 3);
    CHECK(!j["error"]["message"].get<std::string>().empty());
}

TEST_CASE("store-state writes a trace CSV with the column contract") {
    const auto csv = temp_file("kerrforge_trace.csv");
    const RunResult r = run("store-state --state coherent:1 --t-max 0.5 "
                            "--points 6 --trace-csv " +
                            csv.string() + " " +
                            config_path("storage_single.json"));
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j["cavity"] == "c1");
    CHECK(j["state"] == "coherent:1");
    CHECK(j["t_max_us"] == 0.5);
    CHECK(j["final_abs_a"].get<double>() > 0.0);
    CHECK(j["min_fidelity"].get<double>() > 0.0);
    CHECK(j["min_fidelity"].get<double>() <= 1.0 + 1e-9);

    std::ifstream is(csv);
    std::string header;
    std::getline(is, header);
    CHECK(header == "t_us,abs_a,fidelity");
    int rows = 0;
    for (std::string line; std::getline(is, line);) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 6);
    std::filesystem::remove(csv);
}

TEST_CASE("store-state writes a Wigner snapshot CSV") {
    const auto csv = temp_file("kerrforge_wigner.csv");
    const RunResult r = run("store-state --state coherent:1 --t-max 0.1 "
                            "--points 3 --wigner-side 5 --wigner-extent 2 "
                            "--wigner-csv " +
                            csv.string() + " " +
                            config_path("storage_single.json"));
    REQUIRE(r.exit_code == 0);
    const std::string content = read_file(csv);
    CHECK(content.rfind("re,im,W", 0) == 0);
    // 5x5 grid plus header.
    int lines = 0;
    for (char c : content) lines += (c == '\n');
    CHECK(lines == 26);
    std::filesystem::remove(csv);
}

TEST_CASE("gate reports the CPHASE schedule") {
    const RunResult r =
        run("gate --tunable q2 --shift 1.2 " + config_path("gate_pair_off.json"));
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j["tunable"] == "q2");
    CHECK(j["shift_ghz"] == 1.2);
    CHECK(j["x_on_ghz"].get<double>() ==
          doctest::Approx(-1.70154788442e-05).epsilon(1e-6));
    CHECK(j["gate_time_us"].get<double>() ==
          doctest::Approx(29.3850090602).epsilon(1e-6));
    CHECK(j["single_device_ratio"].get<double>() > 6.0);
    CHECK(j["single_device_ratio"].get<double>() < 11.0);
    CHECK(j["on_off_ratio"].get<double>() > 1e6);
    CHECK(std::abs(j["x_off_numeric_ghz"].get<double>()) < 1e-10);
    // The on-configuration carries the shifted tunable frequency.
    bool found = false;
    for (const auto& d : j["on_configuration"]["devices"]) {
        if (d["label"] == "q2") {
            CHECK(d["frequency"].get<double>() ==
                  doctest::Approx(11.4).epsilon(1e-9));
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("cancel-self retunes the partner device") {
    const RunResult r =
        run("cancel-self --tunable f1 --cavity c1 --min-freq 8.5 "
            "--max-freq 9.5 " +
            config_path("storage_balanced.json"));
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j["tunable"] == "f1");
    // Mirror symmetry: the balanced point sits at 9 GHz.
    CHECK(j["frequency_ghz"].get<double>() ==
          doctest::Approx(9.0).epsilon(1e-6));
    CHECK(std::abs(j["self_kerr_closed_form_ghz"].get<double>()) < 1e-9);
    CHECK(j["circuit"]["devices"].size() == 2);
}

TEST_CASE("array-design builds the requested chain") {
    const RunResult r = run("array-design " + config_path("array3.json"));
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    const json& rep = j["design_report"];
    REQUIRE(rep["effective_hamiltonian"]["frequencies_ghz"].size() == 3);
    REQUIRE(rep["effective_hamiltonian"]["cross_kerr_ghz"].size() == 2);
    for (const auto& x : rep["effective_hamiltonian"]["cross_kerr_ghz"]) {
        CHECK(x.get<double>() == doctest::Approx(-1e-5).epsilon(1e-5));
    }
    for (const auto& res : rep["residual_self_ghz"]) {
        CHECK(std::abs(res.get<double>()) < 1e-8);
    }
    for (const auto& res : rep["residual_cross_ghz"]) {
        CHECK(std::abs(res.get<double>()) < 1e-8);
    }
    CHECK(j["circuit"]["cavities"].size() == 3);
}
