#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "plyap/io.hpp"
#include "support/generators.hpp"

namespace {

using plyap::PiecewiseWeight;
namespace io = plyap::io;

TEST(WeightJson, RoundTripIsByteIdempotent) {
    gen::Rng r(11);
    for (int t = 0; t < 50; ++t) {
        const auto w = gen::random_weight(r, r.uniform(0.5, 4.0), 1, 6);
        const std::string first = io::canonical(io::to_json(w));
        const auto back = io::weight_from_json(io::json::parse(first));
        EXPECT_EQ(io::canonical(io::to_json(back)), first);
        for (double x : {0.0, 0.3 * w.length(), w.length()}) EXPECT_EQ(back(x), w(x));
    }
}

TEST(WeightJson, NumericShorthand) {
    const auto w = io::weight_from_json(io::json(2.5), 3.0);
    EXPECT_DOUBLE_EQ(w.length(), 3.0);
    EXPECT_DOUBLE_EQ(w(1.7), 2.5);
    EXPECT_THROW(io::weight_from_json(io::json(2.5)), plyap::DomainError);
}

TEST(WeightJson, Errors) {
    auto bad = [](const char* text) { return io::weight_from_json(io::json::parse(text)); };
    EXPECT_THROW(bad(R"({"segments": []})"), plyap::DomainError);
    EXPECT_THROW(bad(R"({"L": 1, "segments": []})"), plyap::DomainError);
    EXPECT_THROW(bad(R"({"L": 1, "segments": [{"end": 1, "kind": "cubic", "params": {}}]})"), plyap::DomainError);
    EXPECT_THROW(bad(R"({"L": 1, "segments": [{"end": 0.5, "kind": "constant", "params": {"value": 1}}]})"),
                 plyap::DomainError);
    EXPECT_THROW(bad(R"({"L": 1, "segments": [{"end": 1, "kind": "constant", "params": {"value": "x"}}]})"),
                 plyap::DomainError);
    EXPECT_THROW(bad(R"({"L": 1, "segments": [{"end": 1, "kind": "linear", "params": {"left": 1}}]})"),
                 plyap::DomainError);
    EXPECT_THROW(bad(R"([1, 2])"), plyap::DomainError);
}

TEST(ProblemJson, DefaultsAndRoundTrip) {
    const auto f = io::problem_from_json(io::json::parse(R"({"L": 3.0, "rho": 1, "k": "2..4"})"));
    EXPECT_DOUBLE_EQ(f.p, 2.0);
    EXPECT_DOUBLE_EQ(f.a(1.0), 1.0);
    ASSERT_TRUE(f.k.has_value());
    EXPECT_EQ(f.k->first, 2);
    EXPECT_EQ(f.k->last, 4);
    const std::string once = io::canonical(io::to_json(f));
    const std::string twice = io::canonical(io::to_json(io::problem_from_json(io::json::parse(once))));
    EXPECT_EQ(once, twice);

    const auto g = io::problem_from_json(io::json::parse(
        R"({"p": 3, "rho": {"L": 2, "segments": [{"end": 2, "kind": "constant", "params": {"value": -1}}]}, "k": [1, 2], "m": 2, "n": 50})"));
    EXPECT_DOUBLE_EQ(g.L, 2.0);
    EXPECT_EQ(*g.m, 2);
    EXPECT_EQ(*g.n, 50);
}

TEST(ProblemJson, Errors) {
    auto bad = [](const char* text) { return io::problem_from_json(io::json::parse(text)); };
    EXPECT_THROW(bad(R"({"L": 1})"), plyap::DomainError);
    EXPECT_THROW(bad(R"({"rho": 1})"), plyap::DomainError);
    EXPECT_THROW(bad(R"({"L": -1, "rho": 1})"), plyap::DomainError);
    EXPECT_THROW(bad(R"({"p": 1, "L": 1, "rho": 1})"), plyap::DomainError);
    EXPECT_THROW(bad(R"({"L": 1, "rho": 1, "k": [3, 1]})"), plyap::DomainError);
    EXPECT_THROW(bad(R"({"L": 1, "rho": 1, "k": 1.5})"), plyap::DomainError);
    EXPECT_THROW(bad(R"({"L": 1, "rho": {"L": 2, "segments": [{"end": 2, "kind": "constant", "params": {"value": 1}}]}})"),
                 plyap::DomainError);
}

TEST(KRange, Parsing) {
    EXPECT_EQ(io::parse_k_range("3").first, 3);
    EXPECT_EQ(io::parse_k_range("1..5").last, 5);
    EXPECT_THROW(io::parse_k_range("0..2"), plyap::DomainError);
    EXPECT_THROW(io::parse_k_range("4..2"), plyap::DomainError);
    EXPECT_THROW(io::parse_k_range("a..b"), plyap::DomainError);
    EXPECT_THROW(io::parse_k_range("1..2x"), plyap::DomainError);
}

TEST(Files, ReadWriteAndErrors) {
    const auto dir = std::filesystem::temp_directory_path() / "plyap_test_io";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "w.json").string();
    io::write_text_file(path, "{\"x\": 1}");
    EXPECT_EQ(io::read_json_file(path)["x"], 1);
    io::write_text_file(path, "{not json");
    EXPECT_THROW(io::read_json_file(path), plyap::IoError);
    EXPECT_THROW(io::read_text_file((dir / "missing.json").string()), plyap::IoError);
    EXPECT_THROW(io::write_text_file((dir / "no" / "such" / "dir.txt").string(), "x"), plyap::IoError);
    std::filesystem::remove_all(dir);
}

TEST(Csv, FormatAndQuoting) {
    EXPECT_EQ(io::format_double(0.1), "0.1");
    EXPECT_EQ(io::format_double(INFINITY), "inf");
    EXPECT_EQ(io::format_double(-INFINITY), "-inf");
    EXPECT_EQ(io::format_double(NAN), "nan");
    EXPECT_EQ(std::stod(io::format_double(std::numbers::pi)), std::numbers::pi);

    io::CsvWriter w({"name", "value", "ok"});
    w.cell("a,b").cell(1.5).cell(true).end_row();
    w.cell("say \"hi\"").cell(2).cell(false).end_row();
    EXPECT_EQ(w.str(), "name,value,ok\n\"a,b\",1.5,true\n\"say \"\"hi\"\"\",2,false\n");
    EXPECT_EQ(w.str("plyap x 2020-01-01T00:00:00Z").rfind("# plyap x", 0), 0u);
    w.cell(1.0);
    EXPECT_THROW(w.end_row(), plyap::DomainError);
}

TEST(Csv, MetadataLineShape) {
    const std::string m = io::metadata_line("solve");
    ASSERT_EQ(m.size(), std::string("plyap solve 2026-01-01T00:00:00Z").size());
    EXPECT_EQ(m.rfind("plyap solve ", 0), 0u);
    EXPECT_EQ(m.back(), 'Z');
}

TEST(Json, NonFiniteBecomesNull) {
    plyap::SweepRow r;
    r.epsilon = 0.5;
    const std::string text = io::to_json(r).dump();
    EXPECT_NE(text.find("\"lambda\":null"), std::string::npos);
    EXPECT_NE(text.find("\"upper_bound\":null"), std::string::npos);
    EXPECT_EQ(text.find("inf"), std::string::npos);
}

TEST(Json, SweepCsvIsDeterministic) {
    plyap::SweepConfig cfg(plyap::make_problem(2.0, PiecewiseWeight::constant(1.0, 1.0),
                                               PiecewiseWeight::sinusoid(1.0, 1.0, 2 * std::numbers::pi, 0.0, 0.5)));
    cfg.epsilons = {0.5, 0.25};
    const std::string a = io::sweep_csv(plyap::sweep(cfg));
    const std::string b = io::sweep_csv(plyap::sweep(cfg));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.rfind("epsilon,k,sign,lambda,lower_bound,upper_bound,limit,abs_error\n", 0), 0u);
}

} // namespace
