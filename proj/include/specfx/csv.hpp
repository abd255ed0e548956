#pragma once

#include <string>
#include <vector>

#include "specfx/spectrum.hpp"

namespace specfx {

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

/// Writes `header wavenumber,<label1>,...` and one row per grid point.
/// The write is atomic (temp file + rename).
void write_spectra_csv(const std::string& path, const SpectrumSet& set);

/// Parses the spectra CSV format. Wavenumbers must be strictly increasing and
/// equidistant within relative tolerance 1e-6. Signals whose label appears in
/// `exclude_labels` are dropped. ParseError carries the 1-based line number.
SpectrumSet read_spectra_csv(const std::string& path,
                             const std::vector<std::string>& exclude_labels = {});

/// Writes `content` to `path` via a temp file in the same directory + rename.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

/// FNV-1a 64-bit content digest of a file, as 16 hex characters.
std::string fnv1a64_file(const std::string& path);

}  // namespace specfx
