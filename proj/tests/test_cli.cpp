#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::vector<json> lines() const {
        std::vector<json> v;
        size_t pos = 0;
        while (pos < out.size()) {
            size_t e = out.find('\n', pos);
            v.push_back(json::parse(out.substr(pos, e - pos)));
            pos = e + 1;
        }
        return v;
    }
};

Run cli(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " " HMIW_CLI " " + args + " 2>/dev/null";
    FILE* f = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
    int st = pclose(f);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string tmpdir(const std::string& tag) {
    auto d = std::filesystem::temp_directory_path() / ("hmiw_cli_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(d);
    return d.string();
}

}  // namespace

TEST(Cli, FieldConstants) {
    auto r = cli("field --d 2");
    ASSERT_EQ(r.code, 0);
    auto l = r.lines();
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[0]["config"]["command"], "field");
    EXPECT_EQ(l[1]["disc"], 8);
    EXPECT_EQ(l[1]["fund_unit"]["a"], "1");
    EXPECT_EQ(l[1]["fund_unit"]["b"], "1");
    EXPECT_EQ(l[1]["u_plus"]["a"], "3");
    EXPECT_EQ(l[1]["u_plus"]["b"], "2");
}

TEST(Cli, LValueFactorization) {
    auto r = cli("lvalue --d 2 --m 20149");
    ASSERT_EQ(r.code, 0);
    auto j = r.lines()[1];
    EXPECT_EQ(j["value"], "373322926540");
    EXPECT_EQ(j["factorization"], json::parse("[[2,2],[5,1],[281,1],[4951,1],[13417,1]]"));
}

TEST(Cli, ScanCandidates) {
    auto r = cli("scan-congruence --d 2 --m 20149");
    ASSERT_EQ(r.code, 0);
    auto l = r.lines();
    EXPECT_EQ(l.back()["candidates"], json::parse("[281,4951,13417]"));
    for (size_t i = 2; i + 1 < l.size(); ++i) EXPECT_TRUE(l[i].contains("verdict"));
}

TEST(Cli, PadicLambda) {
    auto r = cli("padic-lambda --series '{\"p\":5,\"N\":6,\"coeffs\":[5,0,1]}'");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.lines()[1].dump(), R"({"certified":true,"lambda":2,"mu":0})");
    EXPECT_EQ(cli("padic-lambda --series '{\"p\":5,\"N\":3,\"coeffs\":[0,0]}'").code, 3);
    EXPECT_EQ(cli("padic-lambda --series '{\"p\":5'").code, 2);
}

TEST(Cli, CheckDistribution) {
    auto r = cli("check-distribution --p 7 --m0 4 --depth 3");
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.lines()[1]["report"]["pass"].get<bool>());
    EXPECT_EQ(cli("check-distribution --p 7 --m0 4 --depth 3 --alpha 7").code, 2);
}

TEST(Cli, ConfigErrors) {
    EXPECT_EQ(cli("lvalue --m 4").code, 2);
    EXPECT_EQ(cli("verify-example --p 3").code, 2);
    EXPECT_EQ(cli("padic-l --p 7 --m 5 --strip '[\"P7split1\"]'").code, 2);
    EXPECT_EQ(cli("padic-l --p 7 --m 5 --method nope").code, 2);
    EXPECT_EQ(cli("").code, 2);
}

TEST(Cli, PadicLSeries) {
    auto r = cli("padic-l --p 7 --m 5 --N 6 --M 8 --strip '[\"3\"]'");
    ASSERT_EQ(r.code, 0);
    auto res = r.lines()[1]["result"];
    EXPECT_EQ(res["euler_factors"].size(), 1u);
    EXPECT_TRUE(res["additive"].get<bool>());
    EXPECT_EQ(res["product"]["series"]["coeffs"].size(), 8u);
}

TEST(Cli, VerifySmallExample) {
    auto r = cli("verify-example --m 5");
    ASSERT_EQ(r.code, 0);
    auto b = r.lines()[1];
    EXPECT_TRUE(b["substitution"].get<std::string>().find("out of scope") != std::string::npos);
    EXPECT_EQ(b["candidates"].size(), 0u);
    EXPECT_EQ(b["additivity_verdict"], "no primes");
    auto forced = cli("verify-example --m 5 --p 7");
    ASSERT_EQ(forced.code, 0);
    auto f = forced.lines()[1];
    ASSERT_EQ(f["branches"].size(), 1u);
    EXPECT_EQ(f["branches"][0]["p"], 7);
    EXPECT_EQ(f["additivity_verdict"], "pass");
}

TEST(Cli, CacheIsTransparent) {
    auto dir = tmpdir("cache");
    for (std::string args : {"lvalue --m 13", "padic-l --p 7 --m 5 --N 5 --M 6", "verify-example --m 13"}) {
        auto cold = cli(args);
        auto fill = cli("--cache-dir " + dir + " " + args);
        auto warm = cli(args, "HMIW_CACHE_DIR=" + dir);
        EXPECT_EQ(cold.out, fill.out) << args;
        EXPECT_EQ(cold.out, warm.out) << args;
        EXPECT_EQ(cold.code, warm.code) << args;
    }
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(dir) / "lvalue"));
    std::filesystem::remove_all(dir);
}

TEST(Cli, OutputFile) {
    auto dir = tmpdir("out");
    std::filesystem::create_directories(dir);
    auto path = dir + "/f.json";
    auto r = cli("--out " + path + " field --d 3");
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    EXPECT_TRUE(std::filesystem::file_size(path) > 0);
    std::filesystem::remove_all(dir);
}
