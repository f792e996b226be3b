#pragma once

// Plain CSV tables and the tomography dataset format.
//
// Tomography CSV columns: basis_A,param_A,basis_D,param_D,counts,exposure
//   basis  Z or Phase
//   param  Z: 0 (early) or 1 (late); Phase: φ in radians, [0, 2π)
//   exposure  relative exposure s_j (pulses × ½ per phase-basis side)

#include <iosfwd>
#include <string>
#include <vector>

#include "swapsim/engine.hpp"
#include "swapsim/tomography.hpp"

namespace swapsim {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

/// Fields may not contain commas, quotes or newlines.
void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

/// Shortest round-trip decimal rendering of a double.
std::string format_number(double x);

void write_tomography_csv(std::ostream& out, const std::vector<TomographySetting>& data);
std::vector<TomographySetting> read_tomography_csv(std::istream& in);

/// One row per (setting, BSM outcome, A pattern, D pattern).
CsvTable records_table(const std::vector<CoincidenceRecord>& records);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace swapsim
