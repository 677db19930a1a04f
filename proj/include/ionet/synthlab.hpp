#pragma once

#include "ionet/econ.hpp"
#include "ionet/ingest.hpp"
#include "ionet/netcore.hpp"
#include "ionet/panel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ionet::synth {

// ---- dynamic panel generator -----------------------------------------------

// y_it = rho y_i,t-1 + sum_k beta_k x_kit + alpha_i + e_it,
// e_it = eps_it + ma1 eps_i,t-1, all shocks Gaussian. With burn_in > 0 the
// recursion starts at zero and runs burn_in warm-up periods before the first
// recorded one; with burn_in = 0 it starts at a N(0, y0_sd) draw.
struct DgpSpec {
    int n = 100;
    int t_periods = 8;
    double rho = 0.8;
    std::vector<double> beta;
    double fe_sd = 1.0;
    double noise_sd = 1.0;
    double x_sd = 1.0;
    double y0_sd = 1.0;
    double ma1 = 0.0;
    int burn_in = 50;
    std::uint64_t seed = 42;
};

// Columns "y" and "x1".."xK" on periods 1..T, all cells active.
panel::Panel gen_ar1_panel(const DgpSpec& spec);

// ---- duplex network generator ----------------------------------------------

struct DuplexSpec {
    int n_nodes = 50;
    std::vector<int> periods = {1, 2, 3};
    double p_market = 0.15;
    double p_innov = 0.10;
    double w_mean_market = 100.0;
    double w_mean_innov = 10.0;
    std::uint64_t seed = 1;
};

// Directed Bernoulli support with exponential weights, self links excluded,
// drawn independently per period and layer. Edges carry source = supplier.
struct DuplexDraw {
    std::vector<ingest::FlowEdge> market;
    std::vector<ingest::FlowEdge> innovation;
};

DuplexDraw gen_random_duplex(const DuplexSpec& spec);

// ---- reference solutions ---------------------------------------------------

// Stationary PageRank vector from a dense linear solve, built from the raw
// adjacency with its own column-stochastic construction. Used as an oracle
// for the iterative implementation.
std::vector<double> oracle_pagerank_dense(const net::SquareMat& adj, double damping);

// ---- Monte Carlo harness ---------------------------------------------------

struct McEstimatorSpec {
    enum class Kind { fe, ab, bb };
    std::string name;
    Kind kind = Kind::bb;
    econ::GmmOptions gmm;   // ab / bb
    econ::FeOptions fe;     // fe
};

struct McCell {
    std::string name;
    long n_ok = 0;
    long n_err = 0;
    double mean_rho = 0.0;
    double sd_rho = 0.0;
    // Rejection shares at the 5 percent level among draws with a finite p.
    double rej_ar1 = 0.0;
    double rej_ar2 = 0.0;
    double rej_sargan = 0.0;
    std::vector<double> rho_draws; // per successful replication, in order
};

struct McResult {
    int reps = 0;
    std::uint64_t master_seed = 0;
    std::vector<McCell> cells;
};

// Runs every estimator on the same draw in each replication. The replication
// seed depends only on (master_seed, rep), so extending the replication count
// leaves earlier draws unchanged. Estimator failures are counted, not fatal.
McResult montecarlo(const DgpSpec& dgp, int reps, std::uint64_t master_seed,
                    const std::vector<McEstimatorSpec>& estimators);

} // namespace ionet::synth
