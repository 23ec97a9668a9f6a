#include "ves/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace ves {

namespace {

constexpr int kPrec = std::numeric_limits<double>::max_digits10;

void write_curve_block(std::ostream& os, const GeneratingCurve& c) {
  os << std::setprecision(kPrec);
  os << "degree " << c.kv.degree << "\n";
  os << "knots " << c.kv.knots.size();
  for (double k : c.kv.knots) os << " " << k;
  os << "\n";
  os << "r " << c.r.size();
  for (double x : c.r) os << " " << x;
  os << "\n";
  os << "z " << c.z.size();
  for (double x : c.z) os << " " << x;
  os << "\n";
}

GeneratingCurve read_curve_block(std::istream& is) {
  GeneratingCurve c;
  std::string key;
  std::size_t n;
  if (!(is >> key >> c.kv.degree) || key != "degree")
    throw std::runtime_error("curve file: missing degree");
  if (!(is >> key >> n) || key != "knots")
    throw std::runtime_error("curve file: missing knots");
  c.kv.knots.resize(n);
  for (auto& k : c.kv.knots) is >> k;
  if (!(is >> key >> n) || key != "r")
    throw std::runtime_error("curve file: missing r block");
  c.r.resize(n);
  for (auto& x : c.r) is >> x;
  if (!(is >> key >> n) || key != "z")
    throw std::runtime_error("curve file: missing z block");
  c.z.resize(n);
  for (auto& x : c.z) is >> x;
  if (!is) throw std::runtime_error("curve file: truncated");
  c.validate();
  return c;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

}  // namespace

void write_curve(const std::string& path, const GeneratingCurve& curve) {
  auto os = open_out(path);
  os << "ves-curve 1\n";
  write_curve_block(os, curve);
}

GeneratingCurve read_curve(const std::string& path) {
  auto is = open_in(path);
  std::string magic;
  int version;
  if (!(is >> magic >> version) || magic != "ves-curve" || version != 1)
    throw std::runtime_error("not a curve snapshot: " + path);
  return read_curve_block(is);
}

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
  auto os = open_out(path);
  os << "ves-checkpoint 1\n";
  os << std::setprecision(kPrec) << "t " << cp.t << "\n";
  os << "spec " << (cp.spec_hash.empty() ? "-" : cp.spec_hash) << "\n";
  write_curve_block(os, cp.curve);
}

Checkpoint read_checkpoint(const std::string& path) {
  auto is = open_in(path);
  std::string magic, key;
  int version;
  if (!(is >> magic >> version) || magic != "ves-checkpoint" || version != 1)
    throw std::runtime_error("not a checkpoint: " + path);
  Checkpoint cp;
  if (!(is >> key >> cp.t) || key != "t")
    throw std::runtime_error("checkpoint: missing time");
  if (!(is >> key >> cp.spec_hash) || key != "spec")
    throw std::runtime_error("checkpoint: missing spec hash");
  if (cp.spec_hash == "-") cp.spec_hash.clear();
  cp.curve = read_curve_block(is);
  return cp;
}

Config read_config(const std::string& path) {
  auto is = open_in(path);
  Config cfg;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) cfg[key] = value;
  }
  return cfg;
}

void write_frames_csv(const std::string& path, const Trajectory& traj) {
  auto os = open_out(path);
  os << "t,energy,dissipation,volume,area,lambda_max,eig1,eig2,eig3\n";
  os << std::setprecision(kPrec);
  for (const auto& fr : traj.frames) {
    os << fr.t << "," << fr.energy << "," << fr.dissipation << ","
       << fr.volume << "," << fr.area << "," << fr.lambda_max;
    for (int i = 0; i < 3; ++i)
      os << "," << (fr.has_eigs ? fr.mobility_eigs(i) : 0.0);
    os << "\n";
  }
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows) {
  auto os = open_out(path);
  os << "R0,t_relax,regime\n";
  os << std::setprecision(kPrec);
  for (const auto& row : rows)
    os << row.R0 << "," << row.t_relax << "," << row.regime << "\n";
}

}  // namespace ves
