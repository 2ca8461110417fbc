#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "cascade_thermo/gaussian_cascade.hpp"
#include "cascade_thermo/io.hpp"
#include "cascade_thermo/optimize.hpp"
#include "cascade_thermo/qubit_cascade.hpp"
#include "cascade_thermo/random_states.hpp"
#include "cascade_thermo/run_config.hpp"

using namespace cascade_thermo;

namespace {

config::RunConfig parse(const std::string& text) {
  std::istringstream is(text);
  return config::parse(is);
}

std::string error_of(const std::string& text) {
  try {
    config::validate(parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(FluxCsv, RoundTrip) {
  const gaussian::GaussianParams p{1.0, 0.2, 1.0};
  const auto traj = gaussian::simulate(gaussian::correlated_cov(1.0, 0.3, 0.1), p, uniform_grid(2.0, 0.25));
  std::stringstream ss;
  io::write_flux_csv(ss, traj);
  const auto back = io::read_flux_csv(ss);
  ASSERT_EQ(back.size(), traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    EXPECT_NEAR(back[k].j1, traj[k].j1, 1e-11 * (1.0 + std::abs(traj[k].j1)));
    EXPECT_NEAR(back[k].j12, traj[k].j12, 1e-11 * (1.0 + std::abs(traj[k].j12)));
  }
}

TEST(FluxCsv, HeaderIsTheColumnContract) {
  std::ostringstream os;
  io::write_flux_csv(os, {{0.0, 1.0, 2.0, 3.0}});
  EXPECT_EQ(os.str(), "t,j1,j2,j12,j_cascade,j_independent\n0,1,2,3,6,2\n");
}

TEST(FluxCsv, RejectsMalformedInput) {
  std::istringstream bad_header("t,j\n");
  EXPECT_THROW(io::read_flux_csv(bad_header), ConfigError);
  std::istringstream short_row(std::string(io::kFluxHeader) + "\n0,1,2\n");
  EXPECT_THROW(io::read_flux_csv(short_row), ConfigError);
  std::istringstream junk(std::string(io::kFluxHeader) + "\n0,1,2,x,4,5\n");
  EXPECT_THROW(io::read_flux_csv(junk), ConfigError);
}

TEST(Complex, ParseAndFormat) {
  EXPECT_EQ(io::parse_complex("1.5-2i"), std::complex<double>(1.5, -2.0));
  EXPECT_EQ(io::parse_complex("-0.25+1e-3i"), std::complex<double>(-0.25, 1e-3));
  EXPECT_THROW(io::parse_complex("1.5"), ConfigError);
  EXPECT_THROW(io::parse_complex("1+2j"), ConfigError);
  const std::complex<double> z(0.125, -0.0);
  EXPECT_EQ(io::fmt_complex(z), "0.125-0i");
  EXPECT_EQ(io::parse_complex(io::fmt_complex({3.0, 4.0})), std::complex<double>(3.0, 4.0));
}

TEST(Density, TextRoundTrip) {
  random::Rng rng(5);
  const auto rho = random::random_density_matrix(rng);
  std::stringstream ss;
  io::write_density(ss, rho);
  const auto back = io::read_density(ss);
  EXPECT_LT((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(MapCsv, Format) {
  std::ostringstream os;
  io::write_map_csv(os, {{0.5, -0.5, 0.1}});
  EXPECT_EQ(os.str(), "x,y,value\n0.5,-0.5,0.1\n");
}

TEST(RunConfig, ParsesKeysCommentsAndWhitespace) {
  const auto c = parse("# qubit run\nsystem = qubit\n  xi=0.5  # reservoir\n\nre-rho23 = -0.1\nmode = independent\n");
  EXPECT_EQ(c.system, config::System::qubit);
  EXPECT_EQ(c.mode, Coupling::independent);
  EXPECT_EQ(c.xi, 0.5);
  EXPECT_EQ(c.re_rho23, -0.1);
  EXPECT_FALSE(c.tmax.has_value());
}

TEST(RunConfig, RejectsUnknownAndDuplicateKeys) {
  EXPECT_THROW(parse("gama = 1\n"), ConfigError);
  EXPECT_THROW(parse("NS = 1\nNS = 2\n"), ConfigError);
  EXPECT_THROW(parse("NS 1\n"), ConfigError);
  EXPECT_THROW(parse("NS = one\n"), ConfigError);
  EXPECT_THROW(parse("system = spin\n"), ConfigError);
  try {
    parse("dt = 0.1\nfoo = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("foo"), std::string::npos);
  }
}

TEST(RunConfig, AutoHorizon) {
  auto c = parse("tmax = 12\n");
  ASSERT_TRUE(c.tmax.has_value());
  c = parse("tmax = auto\n");
  EXPECT_FALSE(c.tmax.has_value());
  EXPECT_EQ(config::horizon(c), 60.0);
  EXPECT_EQ(*config::resolved(c).tmax, 60.0);
  c.gamma = 2.0;
  EXPECT_DOUBLE_EQ(*config::resolved(c).tmax, 30.0);
  // Qubits at finite temperature: the slowest mode sets the horizon.
  c = parse("system = qubit\ngamma = 1\nxi = 0.5\n");
  const double slow = 1.5 - std::sqrt(2.25 - 2.0 * 0.25);
  EXPECT_NEAR(config::decay_rate(c), slow, 1e-10);
  const double tmax = *config::resolved(c).tmax;
  EXPECT_GE(tmax, 60.0 / slow);
  EXPECT_LT(tmax, 60.0 / slow + c.dt);
}

TEST(RunConfig, ValidationNamesTheBound) {
  EXPECT_NE(error_of("gamma = 0\n").find("gamma"), std::string::npos);
  EXPECT_NE(error_of("dt = -1\n").find("dt"), std::string::npos);
  EXPECT_NE(error_of("tmax = 0\n").find("tmax"), std::string::npos);
  EXPECT_NE(error_of("NS = 1\nc13 = 1.5\nc24 = 1.5\n").find("NS + 1/2"), std::string::npos);
  EXPECT_FALSE(error_of("system = qubit\nxi = 1.5\n").empty());
  EXPECT_FALSE(error_of("system = qubit\nxiS = 0.5\nre-rho23 = 0.9\n").empty());
  EXPECT_TRUE(error_of("system = qubit\nxiS = 0.5\nre-rho23 = 0.3\n").empty());
}

TEST(RunConfig, EchoReproducesTheConfiguration) {
  const auto c = config::resolved(parse("system = qubit\nxi = 0.7\nxiS = 0.3\nim-rho23 = 0.05\nout = a/b\n"));
  std::ostringstream os;
  config::write(os, c);
  const auto back = parse(os.str());
  std::ostringstream os2;
  config::write(os2, back);
  EXPECT_EQ(os.str(), os2.str());
  EXPECT_EQ(back.tmax, c.tmax);
  EXPECT_EQ(back.out, "a/b");
  EXPECT_EQ(config::grid(back).size(), config::grid(c).size());
}

TEST(Seed, EnvironmentOverride) {
  ::setenv("CASCADE_THERMO_SEED", "1234", 1);
  EXPECT_EQ(optimize::default_seed(), 1234u);
  ::unsetenv("CASCADE_THERMO_SEED");
  const auto s = optimize::default_seed();
  EXPECT_EQ(s, optimize::default_seed());
}
