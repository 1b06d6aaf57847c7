#include <doctest.h>

#include <string>

#include "hfsc/config.hpp"
#include "hfsc/io.hpp"

using namespace hfsc;

namespace {

const char* kFig1Config = R"(# one-soliton reference data
alpha1 = 1
alpha2 = 1
alpha3 = 1
k = 1
soliton = 0.2 0.3 1 0 0.5 0
axis = x -30 30 601
axis = t -30 30 601
fixed = y 0
)";

}  // namespace

TEST_CASE("reference one-soliton config parses and round-trips") {
  const RunConfig cfg = parse_config(kFig1Config);
  CHECK(cfg.alpha1 == 1.0);
  CHECK(cfg.k == 1.0);
  REQUIRE(cfg.solitons.size() == 1);
  CHECK(cfg.solitons[0].sigma == Complex(0.2, 0.3));
  CHECK(cfg.solitons[0].b == Complex(0.5, 0.0));
  REQUIRE(cfg.axes.size() == 2);
  CHECK(cfg.axes[0].name == 'x');
  CHECK(cfg.axes[1].count == 601);
  CHECK(cfg.evaluator == Evaluator::general);
  CHECK(cfg.make_model().alpha4 == -6.0);

  // parse -> serialize -> parse is the identity
  const std::string canon = serialize_config(cfg);
  const RunConfig cfg2 = parse_config(canon);
  CHECK(cfg2 == cfg);
  CHECK(serialize_config(cfg2) == canon);
}

TEST_CASE("round-trip preserves full double precision") {
  RunConfig cfg = parse_config(kFig1Config);
  cfg.fd_h = 0.1 + 0.2;  // not exactly 0.3
  cfg.prop_dt = 1.0 / 3.0;
  cfg.solitons[0].sigma = Complex(0.1 * 3.0, 2.0 / 7.0);
  const RunConfig back = parse_config(serialize_config(cfg));
  CHECK(back.fd_h == cfg.fd_h);
  CHECK(back.prop_dt == cfg.prop_dt);
  CHECK(back.solitons[0].sigma == cfg.solitons[0].sigma);
}

TEST_CASE("alpha4 cannot be set") {
  const std::string text = std::string(kFig1Config) + "alpha4 = -6\n";
  try {
    parse_config(text);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config_value);
    CHECK(std::string(e.what()).find("derived") != std::string::npos);
  }
}

TEST_CASE("spectrum validation errors carry the key path") {
  const std::string text = R"(alpha1 = 1
alpha2 = 1
alpha3 = 1
k = 1
soliton = 0.2 -0.3 1 0 1 0
)";
  try {
    parse_config(text);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::halfplane_violation);
    CHECK(std::string(e.what()).find("soliton[0]") != std::string::npos);
  }
}

TEST_CASE("unknown keys are hard errors with a line number") {
  const std::string text = std::string(kFig1Config) + "alpha_one = 2\n";
  try {
    parse_config(text);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config_parse);
    CHECK(std::string(e.what()).find("line 10") != std::string::npos);
    CHECK(std::string(e.what()).find("alpha_one") != std::string::npos);
  }
}

TEST_CASE("config-level validation failures") {
  // degenerate model
  CHECK_THROWS_AS(parse_config("alpha1 = 1\nalpha2 = 1\nalpha3 = -2\nk = 1\n"
                               "soliton = 0 1 1 0 1 0\n"),
                  Error);
  // no soliton entries
  CHECK_THROWS_AS(parse_config("alpha1 = 1\nalpha2 = 1\nalpha3 = 1\nk = 1\n"),
                  Error);
  // missing model keys
  CHECK_THROWS_AS(parse_config("soliton = 0 1 1 0 1 0\n"), Error);
  // malformed number
  CHECK_THROWS_AS(parse_config("alpha1 = zebra\nalpha2 = 1\nalpha3 = 1\n"
                               "k = 1\nsoliton = 0 1 1 0 1 0\n"),
                  Error);
  // wrong token count
  CHECK_THROWS_AS(parse_config("alpha1 = 1\nalpha2 = 1\nalpha3 = 1\nk = 1\n"
                               "soliton = 0 1 1 0\n"),
                  Error);
  // bad axis name
  CHECK_THROWS_AS(parse_config("alpha1 = 1\nalpha2 = 1\nalpha3 = 1\nk = 1\n"
                               "soliton = 0 1 1 0 1 0\naxis = z 0 1 5\n"),
                  Error);
}

TEST_CASE("defaults are applied and serialized") {
  const RunConfig cfg = parse_config(
      "alpha1 = 1\nalpha2 = 0\nalpha3 = 0\nk = 0\nsoliton = 0 1 1 0 1 0\n");
  CHECK(cfg.fd_h == 1e-3);
  CHECK(cfg.prop_modes == 1024);
  REQUIRE(cfg.verify_sigmas.size() == 1);
  CHECK(cfg.verify_sigmas[0] == Complex(1.0, 1.0));
  const std::string canon = serialize_config(cfg);
  CHECK(canon.find("verify_sigma = 1 1\n") != std::string::npos);
  CHECK(canon.find("prop_modes = 1024\n") != std::string::npos);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-6.0) == "-6");
  const double v = 1.0 / 3.0;
  double back = 0.0;
  const std::string s = format_double(v);
  std::from_chars(s.data(), s.data() + s.size(), back);
  CHECK(back == v);
}

TEST_CASE("field CSV schema and determinism") {
  const PhysicalModel model = build_model(1, 1, 1, 1);
  auto sp = validate_spectrum({{Complex(0.2, 0.3), Complex(1, 0), Complex(0.5, 0)}});

  SUBCASE("1x1 grid gives header plus one row") {
    GridSpec gs;
    gs.axes.push_back({'x', 0.0, 0.0, 1});
    const FieldGrid g = eval_grid(sp, model, gs);
    const std::string csv = field_csv(g);
    const Complex u = g.values[0];
    const std::string expected = "x,re_u,im_u,abs_u\n0," +
                                 format_double(u.real()) + "," +
                                 format_double(u.imag()) + "," +
                                 format_double(std::abs(u)) + "\n";
    CHECK(csv == expected);
    CHECK(std::abs(u - Complex(0.0, -0.48)) < 1e-15);
  }

  SUBCASE("rows follow storage order and repeat runs are byte-identical") {
    GridSpec gs;
    gs.axes.push_back({'x', 0.0, 1.0, 2});
    gs.axes.push_back({'t', 0.0, 1.0, 2});
    gs.fixed.push_back({'y', 0.0});
    const FieldGrid g = eval_grid(sp, model, gs);
    const std::string csv = field_csv(g);
    CHECK(csv.substr(0, 16) == "x,t,re_u,im_u,ab");
    CHECK(field_csv(eval_grid(sp, model, gs)) == csv);
    // one data line per node
    std::size_t lines = 0;
    for (char c : csv)
      if (c == '\n') ++lines;
    CHECK(lines == 5);
  }
}

TEST_CASE("JSON reports are deterministic and carry the schema version") {
  const RunConfig cfg = parse_config(kFig1Config);
  const Json j = report_header("verification_report", cfg);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["tool_version"] == std::string(kToolVersion));
  CHECK(j["config_echo"] == serialize_config(cfg));
  CHECK(dump_json(j) == dump_json(report_header("verification_report", cfg)));
}
