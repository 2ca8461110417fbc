#pragma once

// Text formats: flux trajectories and tables as CSV, covariance matrices as
// four whitespace-separated rows, density matrices as four rows of re+imi.

#include <cmath>
#include <complex>
#include <iomanip>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "cascade_thermo/common.hpp"
#include "cascade_thermo/gaussian_cascade.hpp"
#include "cascade_thermo/qubit_cascade.hpp"

namespace cascade_thermo::io {

inline constexpr int kDigits = 12;
inline constexpr const char* kFluxHeader = "t,j1,j2,j12,j_cascade,j_independent";

inline std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(kDigits) << x;
  return os.str();
}

inline void write_flux_csv(std::ostream& os, const FluxTrajectory& traj) {
  os << kFluxHeader << '\n';
  for (const auto& s : traj) {
    os << fmt(s.t) << ',' << fmt(s.j1) << ',' << fmt(s.j2) << ',' << fmt(s.j12) << ','
       << fmt(s.j_cascade()) << ',' << fmt(s.j_independent()) << '\n';
  }
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  return out;
}

inline double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("trailing characters in number: '" + s + "'");
  return v;
}

inline FluxTrajectory read_flux_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kFluxHeader)
    throw ConfigError(std::string("flux CSV must start with the header ") + kFluxHeader);
  FluxTrajectory traj;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 6) throw ConfigError("flux CSV row needs 6 columns: " + line);
    traj.push_back({parse_double(cells[0]), parse_double(cells[1]), parse_double(cells[2]),
                    parse_double(cells[3])});
  }
  return traj;
}

inline void write_cov(std::ostream& os, const gaussian::CovMatrix& c) {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) os << (j ? " " : "") << fmt(c(i, j));
    os << '\n';
  }
}

inline gaussian::CovMatrix read_cov(std::istream& is) {
  gaussian::Mat4 m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      std::string tok;
      if (!(is >> tok)) throw ConfigError("covariance block needs 16 numbers");
      m(i, j) = parse_double(tok);
    }
  }
  return gaussian::CovMatrix::from(m);
}

inline std::string fmt_complex(std::complex<double> z) {
  std::ostringstream os;
  os << std::setprecision(kDigits) << z.real() << (std::signbit(z.imag()) ? '-' : '+')
     << std::abs(z.imag()) << 'i';
  return os.str();
}

inline std::complex<double> parse_complex(const std::string& tok) {
  static const std::regex re(R"(^([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)([+-])([0-9.]+(?:[eE][+-]?[0-9]+)?)i$)");
  std::smatch m;
  if (!std::regex_match(tok, m, re)) throw ConfigError("not a complex number of the form re+imi: '" + tok + "'");
  const double im = parse_double(m[3]);
  return {parse_double(m[1]), m[2] == "-" ? -im : im};
}

inline void write_density(std::ostream& os, const qubit::DensityMatrix4& rho) {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) os << (j ? " " : "") << fmt_complex(rho(i, j));
    os << '\n';
  }
}

inline qubit::DensityMatrix4 read_density(std::istream& is) {
  qubit::CMat4 m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      std::string tok;
      if (!(is >> tok)) throw ConfigError("density block needs 16 entries");
      m(i, j) = parse_complex(tok);
    }
  }
  return qubit::DensityMatrix4::from(m);
}

struct MapPoint {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

inline void write_map_csv(std::ostream& os, const std::vector<MapPoint>& pts) {
  os << "x,y,value\n";
  for (const auto& p : pts) os << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.value) << '\n';
}

}  // namespace cascade_thermo::io
