#pragma once

// File containers: fields as a binary container (header + row-major node
// values) with a CSV twin, spectra and eigenvalue trajectories as CSV, and
// self-contained SVG line plots (no plotting runtime).

#include <string>

#include "hkfloer/dirac.hpp"
#include "hkfloer/dynamics.hpp"
#include "hkfloer/specflow.hpp"

namespace hkfloer {

/// Binary field container. Header: magic "HKFB", version, domain kind and
/// construction parameters, target, contractible flag, winding; then the
/// node values row-major (4n rows, P columns).
void write_field_binary(const std::string& path, const FieldMap& f);
FieldMap read_field_binary(const std::string& path);

/// CSV twin: node coordinates then value columns, one node per row.
void write_field_csv(const std::string& path, const FieldMap& f);

void write_spectrum_csv(const std::string& path, const SpectralDecomposition& s);

void write_eigentrack_csv(const std::string& path, const SpectralFlowResult& r);

/// Diagnostics per grid point: s, eps-action, |du/ds|_L2, oscillation.
void write_trajectory_csv(const std::string& path, const TrajectorySolution& u,
                          const HamiltonianSpec& H);
void write_trajectory_binary(const std::string& path, const TrajectorySolution& u);

struct SvgSeries {
    std::vector<double> x, y;
    std::string color = "#1f6fb2";
};

/// Minimal self-contained SVG line plot.
void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& xlabel,
                    const std::string& ylabel);

/// FNV-1a hash of a string, for config fingerprints.
std::uint64_t fnv1a(const std::string& s);

}  // namespace hkfloer
