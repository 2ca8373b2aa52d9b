#pragma once

#include "udm/certify.hpp"
#include "udm/checks.hpp"
#include "udm/lp.hpp"
#include "udm/menu.hpp"
#include "udm/pricing.hpp"

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

namespace udm {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;

/** Shortest decimal string that round-trips the double. */
std::string format_double(double v);

/** Deterministic serialization: sorted keys, two-space indent, newline at
 *  end. Rerunning a command with the same config yields identical bytes. */
std::string canonical_json(const nlohmann::json& j);

/** Parses a config file; schema_error on unreadable or non-object content. */
nlohmann::json load_config(const std::string& path);

/** Strict validation for one subcommand: schema_version must equal
 *  kConfigSchemaVersion, unknown fields are rejected, known fields are
 *  type-checked. Throws schema_error. */
void validate_config(const nlohmann::json& cfg, const std::string& command);

/** Builds a distribution from an in-config spec object. */
std::shared_ptr<const Cdf> distribution_from_config(const nlohmann::json& spec);

nlohmann::json to_json(const BundlePriceResult& r);
nlohmann::json to_json(const ThresholdResult& r);
nlohmann::json to_json(const OptimalityVerdict& v);
nlohmann::json to_json(const MonotonicityReport& rep);
nlohmann::json to_json(const CertificateReport& rep);
nlohmann::json to_json(const WitnessGap& wg);
nlohmann::json lp_summary(const LpSolution& sol);
nlohmann::json to_json(const MenuMechanism& menu);

/** CSV matrix: header row holds the column centers, first column the row
 *  centers, cell (r, c) the allocation probability. */
std::string heatmap_csv(const Heatmap& hm);

/** Self-contained SVG raster of the heatmap; CSV stays the canonical
 *  artifact. */
std::string heatmap_svg(const Heatmap& hm);

struct BoundaryScan {
    bool crossed = false;
    int index = -1;      // first diagonal cell whose total allocation >= threshold
    double value = 0.0;  // grid center at that cell (row axis)
    double cell = 0.0;   // grid spacing, the resolution of the estimate
    double threshold = 0.5;
};

/** Scans the diagonal cells (r, r) of the summed item allocations for the
 *  first crossing of `threshold`. All maps must share axes. */
BoundaryScan diagonal_boundary(const std::vector<Heatmap>& item_maps,
                               double threshold = 0.5);

struct FigureArtifact {
    std::string name;  // relative file name
    std::string content;
};

struct FigureBundle {
    std::string figure;
    nlohmann::json summary;
    std::vector<FigureArtifact> files;     // CSV + SVG artifacts plus summary
    std::vector<Heatmap> maps;             // in-process copies for assertions
    std::vector<BoundaryScan> boundaries;  // one per 2-D panel
};

/**
 * Reproduces one of the documented allocation figures from scratch:
 *   fig2  two i.i.d. uniform items on [0,1], 21x21 grid,
 *   fig3  power-law items x^(1/2) and x^2 on [0,1], 21x21 grid,
 *   fig4  three i.i.d. uniform items on [1,2], 12x12x12 grid, slices at the
 *         third value in {1.2, 1.5, 1.8}.
 * resolution = 0 keeps the documented grid. Each bundle records the scanned
 * sell boundary next to its analytic price oracle.
 */
FigureBundle reproduce_figure(const std::string& which, int resolution = 0);

/** Closed-form certificate, and for n in {2,3} the sampled upper-set test
 *  plus the hinge witness gap, merged into one report. Verdict is the shared
 *  verdict, or inconclusive when the parts disagree. */
CertificateReport combined_certificate(int n, double c, int samples = 200,
                                       std::uint64_t seed = 7);

/** Writes content to path, creating parent directories. Throws
 *  std::runtime_error on I/O failure. */
void write_text_file(const std::string& path, const std::string& content);

} // namespace udm
