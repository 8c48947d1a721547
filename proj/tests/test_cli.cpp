#include "doctest.h"

#include <sstream>

#include <json.hpp>

#include "qlu/cli.hpp"

using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = qlu::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

bool has_line(const std::string& text, const std::string& line)
{
    for (const auto& l : lines(text))
        if (l == line)
            return true;
    return false;
}

} // namespace

TEST_CASE("eval: little 0-Jacobi table")
{
    const auto r = run({"eval", "--family", "little0jacobi", "--a", "1/2", "--b", "1/4", "--n-max", "2", "--x-max", "2"});
    CHECK(r.code == qlu::cli::kPass);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 10);
    CHECK(ls[0] == "n,x,value,method");
    CHECK(has_line(r.out, "1,0,-3/4,closed"));
    CHECK(has_line(r.out, "2,1,-1,closed"));
    CHECK(has_line(r.out, "2,0,0,closed"));
}

TEST_CASE("eval: degree zero and the last q-Hahn column are all ones")
{
    const auto r0 = run({"eval", "--family", "littleqjacobi", "--a", "1/3", "--b", "-1/2", "--q", "1/2", "--n-max", "0",
                         "--x-max", "6"});
    CHECK(r0.code == 0);
    for (std::size_t i = 1; i < lines(r0.out).size(); ++i)
        CHECK(lines(r0.out)[i].find(",1,") != std::string::npos);

    const auto r = run({"eval", "--family", "qhahn", "--a", "1/2", "--b", "1/4", "--q", "1/2", "--N", "3", "--format",
                        "json"});
    CHECK(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["rows"].size() == 16);
    for (const auto& row : doc["rows"])
        if (row["x"] == 3)
            CHECK(row["value"] == "1");
}

TEST_CASE("eval: fraction literals force rational output, decimals give floats")
{
    const auto exact = run({"eval", "--family", "littleqjacobi", "--a", "1/2", "--b", "1/4", "--q", "1/2", "--n-max", "1",
                            "--x-max", "1", "--format", "json"});
    const auto doc = json::parse(exact.out);
    CHECK(doc["precision"] == "rational");
    CHECK(doc["rows"][3]["value"] == "1/8");

    const auto fl = run({"eval", "--family", "littleqjacobi", "--a", "0.5", "--b", "0.25", "--q", "0.5", "--n-max", "1",
                         "--x-max", "1", "--format", "json"});
    const auto fdoc = json::parse(fl.out);
    CHECK(fdoc["precision"] == "f64");
    CHECK(fdoc["rows"][3]["value"].get<double>() == doctest::Approx(0.125));
}

TEST_CASE("factor: q = 0 gives the bidiagonal factors")
{
    const auto r = run({"factor", "--family", "little0jacobi", "--a", "1/2", "--b", "1/4", "--cutoff", "3"});
    CHECK(r.code == 0);
    // diagonal 1, (1-ab)/(1-a) = 7/4, 1/(1-a) = 2; subdiagonal -a(1-b)/(1-a) = -3/4, -a/(1-a) = -1
    CHECK(has_line(r.out, "L0,0,0,1"));
    CHECK(has_line(r.out, "L0,1,1,7/4"));
    CHECK(has_line(r.out, "L0,2,2,2"));
    CHECK(has_line(r.out, "L0,1,0,-3/4"));
    CHECK(has_line(r.out, "L0,2,1,-1"));
    CHECK(has_line(r.out, "L0,2,0,0"));
    CHECK(has_line(r.out, "U0,1,3,1"));
}

TEST_CASE("factor: size-one system and q-Hahn residual")
{
    const auto one = run({"factor", "--family", "littleqjacobi", "--a", "1/2", "--b", "1/4", "--q", "1/2", "--cutoff", "0",
                          "--format", "json"});
    CHECK(one.code == 0);
    const auto d1 = json::parse(one.out);
    CHECK(d1["B"] == json::parse(R"([["1"]])"));
    CHECK(d1["D"] == json::parse(R"(["1"])"));
    CHECK(d1["C"] == json::parse(R"([["1"]])"));

    const auto h = run({"factor", "--family", "qhahn", "--a", "0.5", "--b", "0.25", "--q", "0.5", "--N", "4", "--format",
                        "json"});
    CHECK(h.code == 0);
    const auto dh = json::parse(h.out);
    CHECK(dh["residual"].get<double>() <= 1e-10);
    CHECK(dh["pass"] == true);

    const auto m = run({"factor", "--family", "qhahn", "--a", "1/2", "--b", "1/4", "--q", "1/2", "--N", "3", "--method",
                        "closed_hahn", "--format", "json"});
    CHECK(m.code == 0);
    CHECK(json::parse(m.out)["D"][1] == "64/21");
}

TEST_CASE("factor: truncated systems report a residual curve over cutoffs")
{
    const auto r = run({"factor", "--family", "littleqjacobi", "--a", "1/2", "--b", "1/4", "--q", "1/2", "--cutoff", "12",
                        "--format", "json"});
    CHECK(r.code == 0);
    const auto curve = json::parse(r.out)["cutoff_curve"];
    REQUIRE(curve.size() == 5);
    CHECK(curve[0]["cutoff"] == 1);
    CHECK(curve[4]["cutoff"] == 12);
    for (const auto& point : curve)
        CHECK(point["residual"] == "0");

    const auto h = run({"factor", "--family", "qhahn", "--a", "1/2", "--b", "1/4", "--q", "1/2", "--N", "3", "--format",
                        "json"});
    CHECK(!json::parse(h.out).contains("cutoff_curve"));
}

TEST_CASE("verify: product suite passes")
{
    const auto r = run({"verify", "product", "--a", "1/2", "--b", "1/4"});
    CHECK(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["pass"] == true);
    CHECK(!doc["records"].empty());
    for (const auto& rec : doc["records"]) {
        CHECK(rec["suite"] == "product");
        CHECK(rec.contains("params"));
        CHECK(rec.contains("check"));
        CHECK(rec.contains("bound"));
        CHECK(rec["pass"] == true);
        // rational reports carry residuals as strings
        CHECK(rec["residual"].is_string());
    }
}

TEST_CASE("verify: float inverse checks carry their rounding bounds")
{
    const auto r = run({"verify", "lu", "--a", "0.5", "--b", "0.25", "--q", "0.5"});
    CHECK(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["pass"] == true);
    int seen = 0;
    for (const auto& rec : doc["records"]) {
        const auto check = rec["check"].get<std::string>();
        if (check.find("inverse") != std::string::npos || check == "vandermonde") {
            ++seen;
            CHECK(rec["bound"].get<double>() >= (check == "vandermonde" ? 1e-12 : 1e-8));
            CHECK(rec["residual"].get<double>() <= rec["bound"].get<double>());
        }
    }
    CHECK(seen == 5);
}

TEST_CASE("verify: an empty parameter grid passes vacuously")
{
    const auto r = run({"verify", "all"});
    CHECK(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["records"].empty());
    CHECK(doc["pass"] == true);
    CHECK(doc.contains("seed"));
}

TEST_CASE("verify: limits at a small q stay within 10 q")
{
    const auto r = run({"verify", "limits", "--a", "0.5", "--b", "0.25", "--q", "1e-4"});
    CHECK(r.code == 0);
    const auto doc = json::parse(r.out);
    bool saw_q_limit = false;
    for (const auto& rec : doc["records"]) {
        CHECK(rec["pass"] == true);
        if (rec["check"].get<std::string>().find("q_to_zero") != std::string::npos) {
            saw_q_limit = true;
            CHECK(rec["bound"].get<double>() == doctest::Approx(1e-3));
            CHECK(rec["residual"].get<double>() <= 1e-3);
        }
    }
    CHECK(saw_q_limit);
}

TEST_CASE("verify: reports are reproducible from the seed")
{
    const std::vector<std::string> args{"verify", "product", "--seed", "11", "--draws", "2", "--x-max", "3", "--n-max", "3"};
    const auto first = run(args);
    const auto second = run(args);
    CHECK(first.out == second.out);
    CHECK(json::parse(first.out)["seed"] == 11);
    auto other = args;
    other[3] = "12";
    CHECK(run(other).out != first.out);

    const auto padic = run({"verify", "padic", "--seed", "5", "--draws", "3"});
    CHECK(padic.code == 0);
    CHECK(padic.out == run({"verify", "padic", "--seed", "5", "--draws", "3"}).out);
}

TEST_CASE("verify: p-adic point")
{
    const auto r = run({"verify", "padic", "--p", "3", "--d", "3", "--m", "1"});
    CHECK(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(!doc["records"].empty());
    CHECK(doc["pass"] == true);
}

TEST_CASE("usage and parameter errors exit with 2 and a JSON record")
{
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"eval", "--family", "nosuchfamily"},
             {},
             {"eval", "--family", "littleqjacobi", "--a", "2", "--b", "1/4"},
             {"eval", "--family", "littleqjacobi", "--b", "1/4"},
             {"eval", "--family", "qhahn", "--a", "1/2", "--b", "1/4", "--N", "3", "--n-max", "5"},
             {"verify", "nosuchsuite"},
             {"verify", "product", "--a", "1/2"},
             {"factor", "--family", "littleqjacobi", "--a", "1/2", "--b", "1/4", "--method", "nosuch"},
             {"eval", "--a", "one-half", "--b", "1/4"},
         }) {
        const auto r = run(args);
        CAPTURE(r.err);
        CHECK(r.code == qlu::cli::kUsageError);
        const auto e = json::parse(lines(r.err).at(0));
        CHECK(e["error"].contains("kind"));
        CHECK(e["error"].contains("message"));
    }
}

TEST_CASE("help goes to stdout with exit code 0")
{
    const auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("verify") != std::string::npos);
}
