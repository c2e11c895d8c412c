#include "oracles.hpp"

#include "scq/digest.hpp"
#include "scq/errors.hpp"
#include "scq/report.hpp"
#include "scq/synthetic.hpp"
#include "scq/trace_file.hpp"
#include "scq/units.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <limits>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;
namespace io = scq::io;
namespace units = scq::units;
using units::Dimension;

TEST_CASE("R(T) file ingests into an RtTrace", "[io][ingest]") {
    const auto file = io::ingest(oracle::data_dir() / "rt_small.csv", io::TraceKind::Rt);
    CHECK(file.kind == io::TraceKind::Rt);
    CHECK(file.columns == std::vector<std::string>{"temperature", "resistance"});
    CHECK(file.header_value("sample") == "strip A");
    const auto rt = io::to_rt_trace(file);
    REQUIRE(rt.geometry().has_value());
    CHECK_THAT(rt.geometry()->width, WithinRel(10e-6, 1e-15));
    CHECK_THAT(rt.geometry()->thickness, WithinRel(100e-9, 1e-15));
    CHECK(rt.points().size() == file.rows());
}

TEST_CASE("S21 file without im_s21 is rejected by name", "[io][ingest][errors]") {
    REQUIRE_THROWS_AS(io::ingest(oracle::data_dir() / "s21_missing_im.csv"), scq::SchemaError);
    CHECK_THROWS_WITH(io::ingest(oracle::data_dir() / "s21_missing_im.csv"), ContainsSubstring("im_s21"));
}

TEST_CASE("header unit declaration rescales a column", "[io][ingest][units]") {
    const auto file = io::ingest(oracle::data_dir() / "iv_header_unit.csv", io::TraceKind::Iv);
    const auto& i = file.column("current");
    CHECK_THAT(i[1], WithinRel(10e-6, 1e-15));
    CHECK_THAT(i[3], WithinRel(40e-6, 1e-15));
    CHECK_THAT(file.column("voltage")[3], WithinRel(0.5e-3, 1e-15));
}

TEST_CASE("non-numeric cells cite the line", "[io][ingest][errors]") {
    REQUIRE_THROWS_AS(io::ingest(oracle::data_dir() / "decay_bad_cell.csv"), scq::SchemaError);
    CHECK_THROWS_WITH(io::ingest(oracle::data_dir() / "decay_bad_cell.csv"),
                      ContainsSubstring(":5:") && ContainsSubstring("abc"));
}

TEST_CASE("trace parser rejects malformed files", "[io][ingest][errors]") {
    CHECK_THROWS_WITH(io::parse_trace("# kind: spectrum\nx,y\n1,2\n"), ContainsSubstring("spectrum"));
    CHECK_THROWS_AS(io::parse_trace("temperature_K,resistance_ohm\n1,2\n"), scq::SchemaError);
    CHECK_THROWS_WITH(io::parse_trace("# kind: rt\ntemperature_furlong,resistance_ohm\n1,2\n"),
                      ContainsSubstring("furlong"));
    CHECK_THROWS_AS(io::parse_trace("# kind: rt\ntemperature_K,resistance_ohm\n1,2,3\n"), scq::SchemaError);
    CHECK_THROWS_AS(io::parse_trace("# kind: rt\ntemperature_K,resistance_ohm,extra\n1,2,3\n"), scq::SchemaError);
    CHECK_THROWS_AS(io::parse_trace("# kind: decay\ndelay_s,population\n0,1\n", io::TraceKind::Rt),
                    scq::SchemaError);
    CHECK_THROWS_AS(io::ingest("/nonexistent/trace.csv"), std::exception);
    CHECK_THROWS_AS(io::trace_kind_from_string("nope"), scq::SchemaError);
}

TEST_CASE("every trace kind has a schema", "[io][schema]") {
    for (const char* name :
         {"rt", "iv", "s21", "decay", "ramsey", "areas", "qi_power", "qi_temp", "anneal", "exposure"}) {
        const auto k = io::trace_kind_from_string(name);
        CHECK(io::to_string(k) == name);
        CHECK(io::schema(k).size() >= 2);
    }
}

TEST_CASE("ingest, serialize, ingest is the identity", "[io][roundtrip][property]") {
    scq::synthetic::Rng rng(11);
    scq::synthetic::S21Spec spec;
    spec.noise = 0.01;
    const auto s21 = scq::synthetic::s21_trace(spec, rng);
    std::vector<double> re, im;
    for (const auto& z : s21.y) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    const auto file = io::make_trace(io::TraceKind::S21, {{"frequency", s21.x}, {"re_s21", re}, {"im_s21", im}},
                                     {{"wafer_id", "W01"}, {"power_at_chip", "-140 dBm"}});
    const auto dir = oracle::scratch_dir("io_roundtrip");
    io::write_trace(dir / "s21.csv", file);
    const auto a = io::ingest(dir / "s21.csv");
    CHECK(a == file);
    const auto b = io::parse_trace(io::serialize(a));
    CHECK(a == b);
    CHECK(io::serialize(a) == io::serialize(b));

    SECTION("unit-bearing input normalizes once") {
        const auto raw = io::parse_trace("# kind: decay\n# delay_unit: us\ndelay,population\n0,1\n1.5,0.25\n");
        const auto again = io::parse_trace(io::serialize(raw));
        CHECK(raw.data == again.data);
        CHECK_FALSE(again.header_value("delay_unit").has_value());
        CHECK(again.column("delay")[1] == 1.5e-6);
    }
}

TEST_CASE("header quantities", "[io][units]") {
    const auto f = io::parse_trace("# kind: s21\n# power_at_chip: -140 dBm\n# temperature: 20 mK\n"
                                   "frequency_GHz,re_s21,im_s21\n6,1,0\n");
    CHECK_THAT(*f.quantity("power_at_chip", Dimension::Power), WithinRel(1e-17, 1e-12));
    CHECK_THAT(*f.quantity("temperature", Dimension::Temperature), WithinRel(0.02, 1e-15));
    CHECK_FALSE(f.quantity("missing", Dimension::Power).has_value());
}

TEST_CASE("unit parsing", "[io][units]") {
    CHECK_THAT(units::parse_quantity("10 um", Dimension::Length), WithinRel(10e-6, 1e-15));
    CHECK(units::parse_quantity("300", Dimension::Temperature) == 300.0);
    CHECK_THAT(units::parse_quantity("-95 dBm", Dimension::Power), WithinRel(std::pow(10.0, -9.5) * 1e-3, 1e-12));
    CHECK_THAT(units::parse_quantity("138 fF", Dimension::Capacitance), WithinRel(138e-15, 1e-15));
    CHECK_THAT(units::parse_quantity("3 GHz", Dimension::Frequency), WithinRel(3e9, 1e-15));
    CHECK(units::is_unit_of("uA", Dimension::Current));
    CHECK_FALSE(units::is_unit_of("uA", Dimension::Voltage));
    CHECK_THROWS_AS(units::to_si(1.0, "mV", Dimension::Current), scq::SchemaError);
    CHECK_THROWS_AS(units::parse_quantity("ten um", Dimension::Length), scq::SchemaError);
}

TEST_CASE("SHA-256 digests", "[io][digest]") {
    CHECK(scq::io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(scq::io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

namespace {

scq::report::AnalysisReport sample_report() {
    namespace rep = scq::report;
    rep::AnalysisReport r;
    r.toolkit_version = rep::toolkit_version();
    r.created_at = "2026-01-01T00:00:00Z";
    r.wafer_id = "W01";
    rep::FilmRow film;
    film.wafer_id = "W01";
    film.source = "rt.csv";
    film.digest = std::string(64, 'a');
    film.film.tc = 9.2000000000000011;
    film.film.tc_width = 0.021;
    film.film.rrr = 3.9;
    film.film.delta0 = 1.3951e-3;
    film.film.rho0 = 1.0 / 3.0 * 1e-7;
    r.film.push_back(film);

    rep::ResonatorRow res;
    res.wafer_id = "W01";
    res.source = "s21.csv";
    res.digest = std::string(64, 'b');
    res.f0 = 6.000000001e9;
    res.q_internal = 9e5;
    res.q_internal_uncertainty = std::numeric_limits<double>::infinity();
    res.reduced_chi2 = std::nan("");
    r.resonators.push_back(res);

    rep::QubitRow q;
    q.wafer_id = "W01";
    q.qubit_id = "Q1";
    q.record = scq::qubit::CoherenceRecord::make(3.1e9, 62.4e-6, 20e-6, 35e-6);
    q.inputs.push_back({"t1", "q1_t1.csv", std::string(64, 'c')});
    r.qubits.push_back(q);

    r.errors.push_back({"W01", "film", "missing.csv", "cannot open file"});
    r.provenance.push_back({"rt.csv", "rt", std::string(64, 'a')});
    r.status = "partial";
    return r;
}

} // namespace

TEST_CASE("report round trip is bit-identical", "[io][report][roundtrip]") {
    const auto r = sample_report();
    const auto text = scq::report::serialize(r);
    const auto back = scq::report::parse(text);
    CHECK(scq::report::serialize(back) == text);
    CHECK(back.film == r.film);
    CHECK(back.qubits == r.qubits);
    CHECK(back.errors == r.errors);
    CHECK(std::isinf(back.resonators[0].q_internal_uncertainty));
    CHECK(std::isnan(back.resonators[0].reduced_chi2));
    CHECK(back.resonators[0].f0 == r.resonators[0].f0);

    const auto dir = oracle::scratch_dir("report_roundtrip");
    scq::report::save(dir / "report.json", r);
    const auto loaded = scq::report::load(dir / "report.json");
    scq::report::save(dir / "again.json", loaded);
    std::ifstream a(dir / "report.json", std::ios::binary), b(dir / "again.json", std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
}

TEST_CASE("report parser rejects foreign documents", "[io][report][errors]") {
    CHECK_THROWS_AS(scq::report::parse("not json"), scq::SchemaError);
    CHECK_THROWS_AS(scq::report::parse(R"({"schema_version": 99})"), scq::SchemaError);
    CHECK(scq::report::AnalysisReport{}.empty());
    CHECK_FALSE(sample_report().empty());
}
