#include "swapsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "swapsim/error.hpp"

namespace swapsim {

namespace pt = boost::property_tree;

namespace {

/// Reads keys of one section and remembers which were consumed.
class Section {
 public:
  Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
    if (auto child = root.get_child_optional(name_)) tree_ = *child;
  }

  double number(const std::string& key) const { return parse_number(key, require(key)); }
  double number(const std::string& key, double fallback) const {
    auto v = optional(key);
    return v ? parse_number(key, *v) : fallback;
  }

  std::uint64_t integer(const std::string& key) const {
    const std::string text = require(key);
    try {
      std::size_t used = 0;
      const auto v = std::stoull(text, &used);
      if (used != text.size() || text.find('-') != std::string::npos) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(path(key), "expected a nonnegative integer, got '" + text + "'");
    }
  }

  bool boolean(const std::string& key, bool fallback) const {
    auto v = optional(key);
    if (!v) return fallback;
    const std::string s = boost::algorithm::to_lower_copy(*v);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(path(key), "expected true or false, got '" + *v + "'");
  }

  std::string word(const std::string& key, const std::string& fallback) const {
    auto v = optional(key);
    return v ? boost::algorithm::to_lower_copy(*v) : fallback;
  }

  std::vector<double> list(const std::string& key) const {
    const std::string text = require(key);
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::is_any_of(","));
    std::vector<double> out;
    for (auto& p : parts) {
      boost::algorithm::trim(p);
      if (p.empty()) continue;
      out.push_back(parse_number(key, p));
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, child] : tree_) {
      if (!used_.contains(key)) throw ConfigError(path(key), "unknown key");
    }
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

 private:
  std::optional<std::string> optional(const std::string& key) const {
    used_.insert(key);
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    std::string s = *v;
    boost::algorithm::trim(s);
    return s;
  }

  std::string require(const std::string& key) const {
    auto v = optional(key);
    if (!v) throw ConfigError(path(key), "missing required key");
    return *v;
  }

  double parse_number(const std::string& key, const std::string& text) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(path(key), "expected a number, got '" + text + "'");
    }
  }

  std::string name_;
  pt::ptree tree_;
  mutable std::set<std::string> used_;
};

SourceParams read_source(const Section& s, int& truncation) {
  SourceParams p;
  p.mu = s.number("mu");
  p.phase = s.number("phase");
  p.state_fidelity = s.number("state_fidelity");
  const std::string stats = s.word("statistics", "thermal");
  if (stats == "thermal") {
    p.statistics = PairStatistics::Thermal;
  } else if (stats == "poissonian") {
    p.statistics = PairStatistics::Poissonian;
  } else {
    throw ConfigError(s.path("statistics"), "expected thermal or poissonian");
  }
  const std::string noise = s.word("noise", "depolarizing");
  if (noise == "depolarizing") {
    p.noise = SourceNoise::Depolarizing;
  } else if (noise == "dephasing") {
    p.noise = SourceNoise::Dephasing;
  } else {
    throw ConfigError(s.path("noise"), "expected depolarizing or dephasing");
  }
  const double t = s.number("truncation", 4.0);
  if (t != std::floor(t)) throw ConfigError(s.path("truncation"), "expected an integer");
  truncation = static_cast<int>(t);
  return p;
}

DetectorConfig read_detector(const Section& s) {
  DetectorConfig d;
  d.efficiency = s.number("efficiency");
  d.dark_rate_hz = s.number("dark_rate_hz");
  d.jitter_fwhm_ps = s.number("jitter_fwhm_ps");
  d.window_ns = s.number("window_ns");
  return d;
}

void check_probability(double x, const std::string& path) {
  if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(path, "must lie in [0, 1]");
}

void check_positive(double x, const std::string& path) {
  if (!(x > 0.0)) throw ConfigError(path, "must be positive");
}

void validate_source(const SourceParams& p, const std::string& name) {
  if (!(p.mu >= 0.0 && p.mu < 1.0)) throw ConfigError(name + ".mu", "must lie in [0, 1)");
  check_probability(p.state_fidelity, name + ".state_fidelity");
  const double floor = p.noise == SourceNoise::Depolarizing ? 0.25 : 0.5;
  if (p.state_fidelity < floor) {
    throw ConfigError(name + ".state_fidelity", "below the reach of the selected noise channel");
  }
  if (!std::isfinite(p.phase)) throw ConfigError(name + ".phase", "must be finite");
}

void validate_detector(const DetectorConfig& d, const std::string& name) {
  check_probability(d.efficiency, name + ".efficiency");
  if (!(d.dark_rate_hz >= 0.0)) throw ConfigError(name + ".dark_rate_hz", "must be nonnegative");
  if (!(d.jitter_fwhm_ps >= 0.0)) throw ConfigError(name + ".jitter_fwhm_ps", "must be nonnegative");
  check_positive(d.window_ns, name + ".window_ns");
  check_probability(d.dark_rate_hz * d.window_ns * 1e-9, name + ".dark_rate_hz");
}

DetectorParams to_params(const DetectorConfig& d, double bin_separation_ns) {
  DetectorParams p;
  p.efficiency = d.efficiency;
  p.dark_rate_hz = d.dark_rate_hz;
  p.window_s = d.window_ns * 1e-9;
  p.misbin_prob = misbin_probability(d.jitter_fwhm_ps * 1e-12, bin_separation_ns * 1e-9);
  return p;
}

const char* stats_name(PairStatistics s) { return s == PairStatistics::Thermal ? "thermal" : "poissonian"; }
const char* noise_name(SourceNoise n) { return n == SourceNoise::Depolarizing ? "depolarizing" : "dephasing"; }

}  // namespace

void ExperimentConfig::validate() const {
  validate_source(source_ab, "source_ab");
  validate_source(source_cd, "source_cd");
  if (truncation < 2) throw ConfigError("source_ab.truncation", "must be at least 2 photons");
  if (truncation > 8) throw ConfigError("source_ab.truncation", "at most 8 photons per source are supported");
  check_probability(transmission_795, "channels.transmission_795");
  check_probability(transmission_1533, "channels.transmission_1533");
  check_probability(overlap, "bsm.overlap");
  validate_detector(detectors_795, "detectors_795");
  validate_detector(detectors_1533, "detectors_1533");
  check_positive(bin_separation_ns, "timing.bin_separation_ns");
  check_positive(heralding.pump_bandwidth_ghz, "heralding.pump_bandwidth_ghz");
  check_positive(heralding.filter_795_ghz, "heralding.filter_795_ghz");
  check_positive(heralding.filter_1533_ghz, "heralding.filter_1533_ghz");
  for (double f : heralding.loss_795) check_probability(f, "heralding.loss_795");
  for (double f : heralding.loss_1533) check_probability(f, "heralding.loss_1533");
  check_probability(heralding.measured_795, "heralding.measured_795");
  check_probability(heralding.measured_1533, "heralding.measured_1533");
  check_positive(spectrum.signal_wavelength_nm, "spectrum.signal_wavelength_nm");
  if (!(spectrum.signal_bandwidth_nm >= 0.0)) throw ConfigError("spectrum.signal_bandwidth_nm", "must be nonnegative");
  check_positive(spectrum.pump_wavelength_nm, "spectrum.pump_wavelength_nm");
  if (!(spectrum.pump_wavelength_nm < spectrum.signal_wavelength_nm)) {
    throw ConfigError("spectrum.pump_wavelength_nm", "must be shorter than the signal wavelength");
  }
  check_positive(spectrum.pump_duration_ps, "spectrum.pump_duration_ps");
  check_positive(spectrum.coherence_time_ps, "spectrum.coherence_time_ps");
  if (pulses == 0) throw ConfigError("run.pulses", "must be positive");
}

DetectorParams ExperimentConfig::detector_params_795() const {
  return to_params(detectors_795, bin_separation_ns);
}

DetectorParams ExperimentConfig::detector_params_1533() const {
  return to_params(detectors_1533, bin_separation_ns);
}

DetectionModel ExperimentConfig::detection_model() const {
  return make_detection_model(detector_params_795(), transmission_795, detector_params_1533(),
                              transmission_1533);
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os.precision(17);
  auto src = [&](const char* name, const SourceParams& p) {
    os << name << ".mu=" << p.mu << '\n'
       << name << ".phase=" << p.phase << '\n'
       << name << ".state_fidelity=" << p.state_fidelity << '\n'
       << name << ".statistics=" << stats_name(p.statistics) << '\n'
       << name << ".noise=" << noise_name(p.noise) << '\n';
  };
  auto det = [&](const char* name, const DetectorConfig& d) {
    os << name << ".efficiency=" << d.efficiency << '\n'
       << name << ".dark_rate_hz=" << d.dark_rate_hz << '\n'
       << name << ".jitter_fwhm_ps=" << d.jitter_fwhm_ps << '\n'
       << name << ".window_ns=" << d.window_ns << '\n';
  };
  auto list = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << '\n';
  };
  src("source_ab", source_ab);
  src("source_cd", source_cd);
  os << "truncation=" << truncation << '\n'
     << "channels.transmission_795=" << transmission_795 << '\n'
     << "channels.transmission_1533=" << transmission_1533 << '\n'
     << "bsm.overlap=" << overlap << '\n'
     << "bsm.accept_psi_plus=" << accept_psi_plus << '\n';
  det("detectors_795", detectors_795);
  det("detectors_1533", detectors_1533);
  os << "timing.bin_separation_ns=" << bin_separation_ns << '\n'
     << "heralding.pump_bandwidth_ghz=" << heralding.pump_bandwidth_ghz << '\n'
     << "heralding.filter_795_ghz=" << heralding.filter_795_ghz << '\n'
     << "heralding.filter_1533_ghz=" << heralding.filter_1533_ghz << '\n'
     << "heralding.loss_795=";
  list(heralding.loss_795);
  os << "heralding.loss_1533=";
  list(heralding.loss_1533);
  os << "heralding.measured_795=" << heralding.measured_795 << '\n'
     << "heralding.measured_1533=" << heralding.measured_1533 << '\n'
     << "spectrum.signal_wavelength_nm=" << spectrum.signal_wavelength_nm << '\n'
     << "spectrum.signal_bandwidth_nm=" << spectrum.signal_bandwidth_nm << '\n'
     << "spectrum.pump_wavelength_nm=" << spectrum.pump_wavelength_nm << '\n'
     << "spectrum.pump_duration_ps=" << spectrum.pump_duration_ps << '\n'
     << "spectrum.coherence_time_ps=" << spectrum.coherence_time_ps << '\n'
     << "spectrum.pump_convolution=" << spectrum.pump_convolution << '\n'
     << "run.pulses=" << pulses << '\n'
     << "run.seed=" << seed << '\n';
  return os.str();
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("<file>", std::string("line ") + std::to_string(e.line()) + ": " + e.message());
  }

  static const std::set<std::string> known = {"source_ab", "source_cd", "channels",  "bsm",
                                              "detectors_795", "detectors_1533", "timing", "heralding",
                                              "spectrum",  "run"};
  for (const auto& [name, child] : root) {
    if (!known.contains(name)) throw ConfigError(name, "unknown section");
  }

  ExperimentConfig c;
  std::vector<Section> sections;
  auto section = [&](const char* name) -> const Section& { return sections.emplace_back(root, name); };
  sections.reserve(known.size());

  int trunc_ab = 4, trunc_cd = 4;
  const Section& ab = section("source_ab");
  c.source_ab = read_source(ab, trunc_ab);
  const Section& cd = section("source_cd");
  c.source_cd = read_source(cd, trunc_cd);
  if (trunc_ab != trunc_cd) throw ConfigError("source_cd.truncation", "must equal source_ab.truncation");
  c.truncation = trunc_ab;

  const Section& ch = section("channels");
  c.transmission_795 = ch.number("transmission_795");
  c.transmission_1533 = ch.number("transmission_1533");

  const Section& bsm = section("bsm");
  c.overlap = bsm.number("overlap");
  c.accept_psi_plus = bsm.boolean("accept_psi_plus", false);

  c.detectors_795 = read_detector(section("detectors_795"));
  c.detectors_1533 = read_detector(section("detectors_1533"));

  c.bin_separation_ns = section("timing").number("bin_separation_ns");

  const Section& h = section("heralding");
  c.heralding.pump_bandwidth_ghz = h.number("pump_bandwidth_ghz");
  c.heralding.filter_795_ghz = h.number("filter_795_ghz");
  c.heralding.filter_1533_ghz = h.number("filter_1533_ghz");
  c.heralding.loss_795 = h.list("loss_795");
  c.heralding.loss_1533 = h.list("loss_1533");
  c.heralding.measured_795 = h.number("measured_795");
  c.heralding.measured_1533 = h.number("measured_1533");

  const Section& sp = section("spectrum");
  c.spectrum.signal_wavelength_nm = sp.number("signal_wavelength_nm");
  c.spectrum.signal_bandwidth_nm = sp.number("signal_bandwidth_nm");
  c.spectrum.pump_wavelength_nm = sp.number("pump_wavelength_nm");
  c.spectrum.pump_duration_ps = sp.number("pump_duration_ps");
  c.spectrum.coherence_time_ps = sp.number("coherence_time_ps");
  c.spectrum.pump_convolution = sp.boolean("pump_convolution", true);

  const Section& run = section("run");
  c.pulses = run.integer("pulses");
  c.seed = run.integer("seed");

  for (const auto& s : sections) s.reject_unknown();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file '" + path + "'");
  return parse_config(in);
}

ExperimentConfig paper_config() {
  ExperimentConfig c;
  c.source_ab.mu = 0.191;
  c.source_ab.phase = 0.0;
  c.source_ab.state_fidelity = 0.95;
  c.source_cd = c.source_ab;
  c.source_cd.phase = std::numbers::pi;
  c.truncation = 4;
  // Heralding efficiency divided by detector efficiency.
  c.transmission_795 = 0.0196 / 0.5;
  c.transmission_1533 = 0.058 / 0.5;
  c.overlap = 0.89;
  c.detectors_795 = {0.5, 300.0, 500.0, 1.4};
  c.detectors_1533 = {0.5, 10.0, 250.0, 1.4};
  c.bin_separation_ns = 1.4;
  c.heralding = {24.4, 6.0, 12.0, {0.50, 0.40, 0.85}, {0.70, 0.80, 0.85}, 0.0196, 0.058};
  c.spectrum = {795.0, 1.5, 523.5, 18.0, 37.0, true};
  c.pulses = 1000000000000ull;
  c.seed = 1;
  return c;
}

ExperimentConfig ideal_config() {
  ExperimentConfig c = paper_config();
  c.source_ab.mu = 1e-3;
  c.source_ab.state_fidelity = 1.0;
  c.source_cd.mu = 1e-3;
  c.source_cd.state_fidelity = 1.0;
  c.transmission_795 = 1.0;
  c.transmission_1533 = 1.0;
  c.overlap = 1.0;
  c.detectors_795 = {1.0, 0.0, 0.0, 1.4};
  c.detectors_1533 = {1.0, 0.0, 0.0, 1.4};
  c.pulses = 100000000ull;
  return c;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace swapsim
