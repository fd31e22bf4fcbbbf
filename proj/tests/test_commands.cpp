#include "anw/commands.hpp"

#include <doctest.h>

#include <sstream>

using namespace anw;

namespace {

// Data rows of CSV output (units comment and header skipped), split on ','.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    if (n++ < 2) continue;
    std::vector<std::string> fields;
    std::string f;
    std::istringstream ls(line);
    while (std::getline(ls, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

std::string header_of(const std::string& text) {
  const auto first = text.find('\n');
  return text.substr(first + 1, text.find('\n', first + 1) - first - 1);
}

}  // namespace

TEST_CASE("eigen command") {
  const auto j = json::parse(cmd_eigen(ArrayConfig<double>::homogeneous(5, 0.7, 0.025)));
  const auto lambda = j.at("basis").at("lambda").get<std::vector<double>>();
  REQUIRE(lambda.size() == 5);
  CHECK(lambda[0] == doctest::Approx(std::sqrt(3.0) * 0.7).epsilon(1e-12));
  CHECK(std::abs(lambda[2]) < 1e-10);
  CHECK(j.at("zero_supermode_index") == 3);

  const auto one = json::parse(cmd_eigen(ArrayConfig<double>::homogeneous(1, 0.7, 0.025)));
  CHECK(one.at("basis").at("lambda")[0] == 0.0);

  CHECK_THROWS_AS(cmd_eigen(ArrayConfig<double>::homogeneous(4, 0.7, 0.025), true), ValidationError);
  CHECK(json::parse(cmd_eigen(ArrayConfig<double>::homogeneous(4, 0.7, 0.025))).at("zero_supermode_index").is_null());
}

TEST_CASE("vlf command") {
  const auto cfg = ArrayConfig<double>::homogeneous(3, 0.7, 0.025);
  const auto zero = cmd_vlf(cfg, {0.0}, Variant::a, true, Format::csv);
  CHECK(zero.rfind("# units", 0) == 0);
  CHECK(header_of(zero) == "z,vlf_1,asymptote");
  const auto rows = csv_rows(zero);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == std::vector<std::string>{"0", "4", "4"});

  const auto curve = csv_rows(cmd_vlf(cfg, z_grid(0, 60, 121), Variant::a, true, Format::csv));
  REQUIRE(curve.size() == 121);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(std::stod(curve[i][1]) < 4.0);

  // l = 3 at 4ηz = 40: 8/3
  const auto far = csv_rows(cmd_vlf(ArrayConfig<double>::homogeneous(5, 0.7, 0.025), {400.0}, Variant::a, true,
                                    Format::csv));
  CHECK(std::stod(far[0].back()) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));

  const auto j = json::parse(cmd_vlf(cfg, {10.0}, Variant::a, true, Format::json));
  CHECK(j.at("units").at("length") == "mm");
  CHECK(j.at("reports")[0].contains("graph"));

  CHECK_THROWS_AS(cmd_vlf(ArrayConfig<double>::homogeneous(4, 0.7, 0.025), {1.0}, Variant::a, true, Format::csv),
                  ValidationError);
  CHECK_THROWS_AS(cmd_vlf(cfg, {}, Variant::a, true, Format::csv), ValidationError);
  CHECK_THROWS_AS(cmd_vlf(cfg, {-1.0}, Variant::a, true, Format::csv), ValidationError);
}

TEST_CASE("propagate command") {
  const auto cfg = ArrayConfig<double>::homogeneous(3, 0.7, 0.025);
  const auto j = json::parse(cmd_propagate(cfg, 5.0, Basis::individual, Format::json));
  CHECK(j.at("covariance").at("basis") == "individual");
  CHECK(j.at("physicality").at("pure") == true);
  const auto s = json::parse(cmd_propagate(cfg, 5.0, Basis::supermode, Format::json));
  CHECK(s.at("regimes")[1] == "zero-eigenvalue");
  CHECK(csv_rows(cmd_propagate(cfg, 5.0, Basis::individual, Format::csv)).size() == 6);
}

TEST_CASE("degenerate sweep equals a single vlf evaluation") {
  SweepSpec spec;
  spec.n = {5};
  spec.z = {17.0};
  spec.format = Format::json;
  const auto j = json::parse(cmd_sweep(spec));
  REQUIRE(j.at("points").size() == 1);
  const auto single = json::parse(cmd_vlf(ArrayConfig<double>::homogeneous(5, 0.7, 0.025), {17.0}, Variant::a, true,
                                          Format::json));
  CHECK(j.at("points")[0].at("report").at("values") == single.at("reports")[0].at("values"));
  CHECK(j.at("points")[0].at("report").at("asymptote") == single.at("reports")[0].at("asymptote"));
}

TEST_CASE("sweep records per-point errors and keeps going") {
  SweepSpec spec;
  spec.n = {3, 4, 5};
  spec.z = {1.0, 2.0};
  spec.variants = {Variant::a, Variant::b};
  const auto rows = csv_rows(cmd_sweep(spec));
  REQUIRE(rows.size() == 12);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i][0] == std::to_string(i));
  int errors = 0, ok = 0;
  for (const auto& r : rows) (r[6] == "ok" ? ok : errors)++;
  // N=4 has no zero supermode; variant b needs l >= 4, so N=3 and N=5 fail too
  CHECK(ok == 4);
  CHECK(errors == 8);
  CHECK(rows[1][6] == "validation_error");  // N=3, variant b
}

TEST_CASE("sweep output is independent of the worker count") {
  SweepSpec spec;
  spec.n = {3, 5, 7};
  spec.c0 = {0.5, 0.7};
  spec.z = z_grid(0, 40, 9);
  spec.workers = 1;
  const auto serial = cmd_sweep(spec);
  spec.workers = 4;
  CHECK(cmd_sweep(spec) == serial);
  CHECK(cmd_sweep(spec) == serial);
  spec.format = Format::json;
  CHECK(cmd_sweep(spec) == cmd_sweep(spec));
}

TEST_CASE("asymptotic sweep") {
  SweepSpec spec;
  spec.mode = SweepSpec::Mode::asymptotic;
  spec.l = {25, 50, 100};
  spec.z = z_grid(0, 200, 5);
  const auto rows = csv_rows(cmd_sweep(spec));
  REQUIRE(rows.size() == 15);
  CHECK(header_of(cmd_sweep(spec)) == "index,l,eta,z,status,unoptimized,optimized,message");
  CHECK(std::stod(rows[0][5]) == 4.0);
  spec.l = {1};
  CHECK_THROWS_AS(cmd_sweep(spec), ValidationError);
}

TEST_CASE("sweep spec from a config file") {
  const auto cfg = ConfigFile::parse(
      "sweep.N = 3, 5\n"
      "sweep.z.start = 0\n"
      "sweep.z.stop = 10\n"
      "sweep.z.steps = 11\n"
      "sweep.variant = a\n"
      "output.format = json\n"
      "output.path = out.json\n");
  const auto spec = sweep_spec_from(cfg);
  CHECK(spec.n == std::vector<int>{3, 5});
  CHECK(spec.z.size() == 11);
  CHECK(spec.format == Format::json);
  CHECK(spec.output_path == "out.json");
  CHECK(spec.points() == 22);
  CHECK_THROWS_AS(sweep_spec_from(ConfigFile::parse("sweep.N = 3.5")), ValidationError);
  CHECK_THROWS_AS(sweep_spec_from(ConfigFile::parse("sweep.mode = other")), ValidationError);
  CHECK_THROWS_AS(sweep_spec_from(ConfigFile::parse("output.format = xml")), ValidationError);
}

TEST_CASE("graph command") {
  GraphRequest req;
  req.l = 6;
  req.z = {20.0};
  const auto j = json::parse(cmd_graph(req, Format::json));
  CHECK(j.at("results")[0].at("graph").at("edges").size() == 9);
  CHECK(j.at("results")[0].at("components").size() == 1);

  req.variant = Variant::b;
  const auto b = json::parse(cmd_graph(req, Format::json));
  const auto comps = b.at("results")[0].at("components");
  REQUIRE(comps.size() == 2);
  CHECK(comps[0] == json::array({1, 3, 5}));
  CHECK(comps[1] == json::array({2, 4, 6}));

  req.z = {0.0, 200.0};
  const auto rows = csv_rows(cmd_graph(req, Format::csv));
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(std::stod(rows[1][6]) - 5.0) < 1e-6);
  CHECK(rows[1][7] == "5");

  GraphRequest finite;
  finite.config = ArrayConfig<double>::homogeneous(11, 0.7, 0.025);
  finite.z = {30.0};
  const auto f = json::parse(cmd_graph(finite, Format::json));
  CHECK(f.at("results")[0].at("graph").at("nodes").size() == 6);
}

TEST_CASE("nullifier command") {
  GraphRequest req;
  req.l = 4;
  req.z = {10.0};
  const auto rows = csv_rows(cmd_nullifiers(req, Format::csv));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0][5] == "true");   // 1-2
  CHECK(rows[1][5] == "false");  // 1-3
  const auto j = json::parse(cmd_nullifiers(req, Format::json));
  CHECK(j.at("results")[0].at("nullifiers").size() == 6);
}

TEST_CASE("structured errors") {
  const auto j = json::parse(error_json("validation", "bad \"input\""));
  CHECK(j.at("error").at("kind") == "validation");
  CHECK(j.at("error").at("message") == "bad \"input\"");
  CHECK_THROWS_AS(parse_format("xml"), ValidationError);
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/out.csv", "x"), ValidationError);
}
