#include "swapsim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string.hpp>

#include "swapsim/error.hpp"

namespace swapsim {

namespace {

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("CSV: bad number '" + s + "' in " + what);
  return v;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error("CSV: missing column '" + name + "'");
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].find_first_of(",\"\n\r") != std::string::npos) {
        throw Error("CSV: field '" + fields[i] + "' contains a separator");
      }
      out << (i ? "," : "") << fields[i];
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) {
    if (r.size() != table.header.size()) throw Error("CSV: row width does not match header");
    line(r);
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string text;
  bool first = true;
  while (std::getline(in, text)) {
    boost::algorithm::trim_right_if(text, boost::is_any_of("\r"));
    if (text.empty()) continue;
    std::vector<std::string> fields;
    boost::algorithm::split(fields, text, boost::is_any_of(","));
    for (auto& f : fields) boost::algorithm::trim(f);
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != t.header.size()) throw Error("CSV: row width does not match header");
      t.rows.push_back(std::move(fields));
    }
  }
  if (first) throw Error("CSV: empty input");
  return t;
}

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error("format_number: conversion failed");
  return std::string(buf, ptr);
}

void write_tomography_csv(std::ostream& out, const std::vector<TomographySetting>& data) {
  CsvTable t;
  t.header = {"basis_A", "param_A", "basis_D", "param_D", "counts", "exposure"};
  auto basis = [](const Projector& p) { return p.basis() == Projector::Basis::Z ? "Z" : "Phase"; };
  auto param = [](const Projector& p) {
    return p.basis() == Projector::Basis::Z ? std::to_string(static_cast<int>(p.bin())) : format_number(p.phi());
  };
  for (const auto& s : data) {
    t.rows.push_back({basis(s.a), param(s.a), basis(s.d), param(s.d), std::to_string(s.counts),
                      format_number(s.exposure)});
  }
  write_csv(out, t);
}

std::vector<TomographySetting> read_tomography_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  const std::size_t ba = t.column("basis_A"), pa = t.column("param_A"), bd = t.column("basis_D"),
                    pd = t.column("param_D"), cn = t.column("counts"), ex = t.column("exposure");
  auto projector = [](const std::string& basis, const std::string& param) {
    if (basis == "Z") {
      if (param == "0") return Projector::z(TimeBin::Early);
      if (param == "1") return Projector::z(TimeBin::Late);
      throw Error("CSV: Z parameter must be 0 or 1, got '" + param + "'");
    }
    if (basis == "Phase") {
      const double phi = parse_double(param, "phase parameter");
      if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) throw Error("CSV: phase parameter outside [0, 2pi): " + param);
      return Projector::phase(phi);
    }
    throw Error("CSV: unknown basis '" + basis + "'");
  };
  std::vector<TomographySetting> out;
  for (const auto& r : t.rows) {
    TomographySetting s;
    s.a = projector(r[ba], r[pa]);
    s.d = projector(r[bd], r[pd]);
    const double c = parse_double(r[cn], "counts");
    if (c < 0.0 || c != std::floor(c)) throw Error("CSV: counts must be a nonnegative integer");
    s.counts = static_cast<std::uint64_t>(c);
    s.exposure = parse_double(r[ex], "exposure");
    out.push_back(s);
  }
  return out;
}

CsvTable records_table(const std::vector<CoincidenceRecord>& records) {
  CsvTable t;
  t.header = {"setting", "pulses", "bsm", "a_pattern", "d_pattern", "counts"};
  for (const auto& r : records) {
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t d = 0; d < 4; ++d) {
          t.rows.push_back({r.setting.label(), std::to_string(r.pulses), b == 0 ? "PsiMinus" : "PsiPlus",
                            std::to_string(a), std::to_string(d), std::to_string(r.counts[b][a][d])});
        }
      }
    }
  }
  return t;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace swapsim
