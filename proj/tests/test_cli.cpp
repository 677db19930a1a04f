// Exit-code and artifact checks for the command line tool. The binary path
// comes in through IONET_CLI_PATH at compile time; every case shells out and
// inspects the status and the files left behind.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

static int g_checks = 0;
static int g_fails = 0;

#define CHECK(cond)                                                       \
    do {                                                                  \
        ++g_checks;                                                       \
        if (!(cond)) {                                                    \
            ++g_fails;                                                    \
            std::printf("FAIL %s:%d  %s\n", __FILE__, __LINE__, #cond);   \
        }                                                                 \
    } while (0)

static std::string g_dir;

static std::string cli() {
#ifdef IONET_CLI_PATH
    return IONET_CLI_PATH;
#else
    const char* p = std::getenv("IONET_CLI_PATH");
    return p ? p : "./ionet";
#endif
}

// Runs the tool, captures stdout, returns the exit status (-1 on abnormal
// termination).
static int run_cli(const std::string& args, const std::string& out_file = "") {
    std::string cmd = cli() + " " + args;
    cmd += " >" + (out_file.empty() ? g_dir + "/ignored.out" : out_file);
    cmd += " 2>" + g_dir + "/last.err";
    int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

static void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

static std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

static long count_lines(const std::string& text) {
    long n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

int main() {
    const char* tmp = std::getenv("TMPDIR");
    g_dir = std::string(tmp ? tmp : "/tmp") + "/ionet_cli_checks";
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);
    std::string out = g_dir + "/out";

    // backends reports the detected and the active kernel dispatch.
    CHECK(run_cli("backends", g_dir + "/backends.out") == 0);
    std::string b = slurp(g_dir + "/backends.out");
    CHECK(b.rfind("detected=", 0) == 0);
    CHECK(b.find(" active=") != std::string::npos);
    CHECK(!b.empty() && b.back() == '\n');

    // Argument errors are caught by the parser, before any stage runs.
    CHECK(run_cli("") != 0);
    CHECK(run_cli("nosuchstage") != 0);

    // Configuration problems exit with 2.
    CHECK(run_cli("simulate -c /nonexistent_ionet.ini") == 2);
    CHECK(run_cli("simulate -s notanassignment") == 2);

    write_text(g_dir + "/cfg.ini",
               "[io]\n"
               "outdir = " + out + "\n"
               "[simulate]\n"
               "nodes = 12\n"
               "n_periods = 3\n"
               "p_market = 0.35\n"
               "p_innov = 0.3\n"
               "seed = 9\n");

    CHECK(run_cli("simulate -c " + g_dir + "/cfg.ini") == 0);
    CHECK(fs::exists(out + "/market.csv"));
    CHECK(fs::exists(out + "/innovation.csv"));
    CHECK(fs::exists(out + "/manifest_simulate.txt"));

    // A leftover lock blocks the run.
    write_text(out + "/.lock", "busy\n");
    CHECK(run_cli("simulate -c " + g_dir + "/cfg.ini") == 2);
    fs::remove(out + "/.lock");

    CHECK(run_cli("ingest -c " + g_dir + "/cfg.ini") == 0);
    CHECK(count_lines(slurp(out + "/index.csv")) == 13); // header + 12 codes

    // Stage inputs missing: build before ingest in a fresh directory.
    write_text(g_dir + "/cfg_empty.ini",
               "[io]\noutdir = " + g_dir + "/empty_out\n");
    CHECK(run_cli("build -c " + g_dir + "/cfg_empty.ini") == 2);

    // Malformed data exits with 3.
    std::string bad = g_dir + "/bad_out";
    fs::create_directories(bad);
    write_text(bad + "/market.csv", "source,target,value,period\nA,B,abc,1\n");
    write_text(bad + "/innovation.csv", "source,target,value,period\nA,B,1.0,1\n");
    write_text(g_dir + "/cfg_bad.ini", "[io]\noutdir = " + bad + "\n");
    CHECK(run_cli("ingest -c " + g_dir + "/cfg_bad.ini") == 3);

    // Full chain over the simulated inputs.
    CHECK(run_cli("all -c " + g_dir + "/cfg.ini -s estimate.estimators=fe") == 0);
    CHECK(fs::exists(out + "/summary.txt"));
    CHECK(fs::exists(out + "/manifest_all.txt"));

    // Numerical failures exit with 4: a duplicated regressor cannot have full
    // rank.
    CHECK(run_cli("estimate -c " + g_dir + "/cfg.ini -s estimate.estimators=fe"
                  " -s estimate.regressors=spill_market_up,spill_market_up") == 4);

    std::printf("cli checks: %d run, %d failed\n", g_checks, g_fails);
    return g_fails == 0 ? 0 : 1;
}
