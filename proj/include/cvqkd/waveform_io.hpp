#pragma once

// Waveform serialization: flat little-endian float64 samples plus a JSON
// sidecar (<path>.json) holding sample_rate and t0; CSV export for
// inspection.

#include <string>

#include "cvqkd/dsp.hpp"

namespace cvqkd {

/// Writes <path> (raw f64 LE) and <path>.json.
void write_waveform(const Waveform& w, const std::string& path);

/// Reads a waveform written by write_waveform.
Waveform read_waveform(const std::string& path);

/// Two-column CSV (t, value) with header row and LF line endings.
void write_waveform_csv(const Waveform& w, const std::string& path);

}  // namespace cvqkd
