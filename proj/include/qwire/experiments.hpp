#pragma once

// Experiment dispatch for the command-line front end, plus the small-system
// setups shared with the acceptance suite.

#include <optional>
#include <string>
#include <vector>

#include "qwire/config.hpp"
#include "qwire/fock.hpp"
#include "qwire/protocol.hpp"
#include "qwire/table.hpp"

namespace qwire {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Runs the configured experiment. Failures are rethrown as
/// std::runtime_error prefixed with the experiment name.
ResultTable run(const RunConfig& config);

/// round(3N/4), the increasing-site carrier for any N.
int oracle_wavenumber(int n);
/// (N+1)/3 sites: small enough that R_A and R_B stay disjoint.
int oracle_region(int n);

/// Plan for exact-oracle sizes: explicit width, region, wait and
/// wavenumber, no wait search.
ProtocolPlan oracle_plan(int n, int m, double sigma_sites, double wait, std::optional<int> region = std::nullopt,
                         std::optional<int> wavenumber = std::nullopt);

/// Normalised random messages from a seeded generator.
std::vector<Qubit> random_messages(int m, std::uint64_t seed);

/// Two co-moving Gaussian fermions, the first centred on site 3, the second
/// `separation` sites further on; each is cut to ±2 sites.
FockVector two_packet_state(int n, int separation, double sigma_sites, const FockBasis& basis);

struct MinWaitPoint {
    int n = 0;
    double t_star = 0.0;
    double bound = 0.0;
    std::string error;  // empty on success
};

/// min_wait_time for each N, evaluated concurrently; failures become rows
/// carrying the error text.
std::vector<MinWaitPoint> sweep_min_wait(const std::vector<int>& sizes, int m, const PacketBudget& budget,
                                         double target);

}  // namespace qwire
