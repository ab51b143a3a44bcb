#pragma once

#include "cheblat/lattice.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cheblat {

/// Writes `content` to a temporary file next to `path`, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Numeric CSV rows. A non-numeric first line is taken as a header; blank
/// lines and lines starting with '#' are skipped. Throws std::runtime_error
/// naming the line on malformed input.
std::vector<std::vector<double>> read_csv_rows(std::istream& in);

/// %.17g
std::string format_double(double v);

/// Header x1..xd, one lattice point per line.
void write_points_csv(std::ostream& os, const ChebyshevLattice& lat);

/// Samples as either one value per line in lattice order, or x1..xd,value
/// rows in any order (matched to lattice points to 1e-9).
std::vector<double> read_samples_csv(std::istream& in, const ChebyshevLattice& lat);
void write_samples_csv(std::ostream& os, const ChebyshevLattice& lat, std::span<const double> values,
                       const std::string& value_name = "value");

/// Header k1..kd,value; tie elements are written under their canonical index.
void write_coeffs_csv(std::ostream& os, const ChebyshevLattice& lat, std::span<const double> coeffs);
/// Rows k1..kd,value in any order; indices outside the basis are an error,
/// missing indices read as zero.
std::vector<double> read_coeffs_csv(std::istream& in, const ChebyshevLattice& lat);

/// {family, dim, resolution, npoints, basis, points, sublattices[, coefficients]}
/// in that order, reals at 17 significant digits.
void write_lattice_json(std::ostream& os, const ChebyshevLattice& lat, std::span<const double> coeffs = {});

}  // namespace cheblat
