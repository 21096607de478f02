#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "conveyorlab/conveyorlab.hpp"
#include "support.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinULP;

namespace {

template <typename Fn>
cvl::parse_error expect_parse_error(Fn&& fn) {
    try {
        fn();
    } catch (const cvl::parse_error& e) {
        return e;
    }
    FAIL("expected a parse_error");
    throw std::logic_error("unreachable");
}

} // namespace

TEST_CASE("value suffix table", "[netlist]") {
    CHECK(cvl::parse_value("10k") == 1.0e4);
    CHECK_THAT(cvl::parse_value("10n"), WithinULP(1.0e-8, 1));
    CHECK_THAT(cvl::parse_value("13.2m"), WithinULP(1.32e-2, 1));
    CHECK_THAT(cvl::parse_value("5p"), WithinULP(5.0e-12, 1));
    CHECK_THAT(cvl::parse_value("2.2u"), WithinULP(2.2e-6, 1));
    CHECK(cvl::parse_value("1G") == 1.0e9);
    CHECK_THAT(cvl::parse_value("3.3Meg"), WithinULP(3.3e6, 1));
    CHECK(cvl::parse_value("2MEG") == 2.0e6);
    CHECK(cvl::parse_value("2meg") == 2.0e6);
    CHECK(cvl::parse_value("100") == 100.0);
    CHECK(cvl::parse_value("1e3") == 1000.0);
    CHECK(cvl::parse_value("-2.5") == -2.5);
    CHECK(cvl::parse_value("+5") == 5.0);
    CHECK(cvl::parse_value("1.5e-7") == 1.5e-7);
}

TEST_CASE("value parse failures", "[netlist]") {
    CHECK_THROWS_AS(cvl::parse_value(""), cvl::parse_error);
    CHECK_THROWS_AS(cvl::parse_value("abc"), cvl::parse_error);
    CHECK_THROWS_AS(cvl::parse_value("10kk"), cvl::parse_error);
    // the M/m ambiguity is rejected, not guessed
    CHECK_THROWS_WITH(cvl::parse_value("1M"), ContainsSubstring("unknown value suffix"));
    CHECK_THROWS_AS(cvl::parse_value("1K"), cvl::parse_error);
    CHECK_THROWS_AS(cvl::parse_value("1.2q"), cvl::parse_error);
    CHECK_THROWS_AS(cvl::parse_value("inf"), cvl::parse_error);
    CHECK_THROWS_AS(cvl::parse_value("nan"), cvl::parse_error);
    CHECK_THROWS_AS(cvl::parse_value("5e400"), cvl::parse_error);
}

TEST_CASE("render_value round-trips bit-exactly", "[netlist]") {
    for (double v : {1e-12, 2.2e-6, 1.0 / 3.0, 870.388, 1.32e-2, 6.82578e-4, 1e9, -3.75,
                     0.1219, 0.02585}) {
        CHECK(cvl::parse_value(cvl::render_value(v)) == v);
    }
    std::mt19937 gen(1234);
    std::uniform_int_distribution<int> sign(0, 1);
    for (int i = 0; i < 100; ++i) {
        double v = support::log_uniform(gen, 1e-12, 1e9) * (sign(gen) ? 1.0 : -1.0);
        CHECK(cvl::parse_value(cvl::render_value(v)) == v);
    }
}

TEST_CASE("minimal deck", "[netlist]") {
    cvl::Netlist nl = cvl::parse_netlist("R1 1 0 10k\nV1 1 0 AC 1\n.out 1\n");
    REQUIRE(nl.elements.size() == 2);
    const auto& r = std::get<cvl::Resistor>(nl.elements[0]);
    CHECK(r.name == "R1");
    CHECK(r.n_plus == "1");
    CHECK(r.n_minus == "0");
    CHECK(r.ohms == 1.0e4);
    const auto& v = std::get<cvl::VSource>(nl.elements[1]);
    CHECK(v.amplitude == 1.0);
    CHECK(v.active);
    CHECK(nl.sources == std::vector<std::string>{"V1"});
    CHECK(nl.out_node == "1");
    CHECK_FALSE(nl.title.has_value());
}

TEST_CASE("comments, blank lines, crlf and title", "[netlist]") {
    cvl::Netlist nl = cvl::parse_netlist(
        ".title  My Filter  \n"
        "# hash comment\n"
        "* star comment\n"
        "\n"
        "V1 a 0 AC 1\r\n"
        "R1 a 0 1k\n"
        ".out a\n");
    REQUIRE(nl.title.has_value());
    CHECK(*nl.title == "My Filter");
    CHECK(nl.elements.size() == 2);
}

TEST_CASE("conveyor card", "[netlist]") {
    cvl::Netlist nl =
        cvl::parse_netlist("V1 2 0 AC 1\nCC1 2 3 4 +\nR1 4 0 1k\nR2 3 0 1k\n.out 4\n");
    const auto& cc = std::get<cvl::Conveyor>(nl.elements[1]);
    CHECK(cc.y == "2");
    CHECK(cc.x == "3");
    CHECK(cc.z == "4");
    CHECK(cc.k == 1);
    CHECK(cc.b == 1.0);

    cvl::Netlist neg =
        cvl::parse_netlist("V1 2 0 AC 1\nCC1 2 3 4 -\nR1 4 0 1k\nR2 3 0 1k\n.out 4\n");
    CHECK(std::get<cvl::Conveyor>(neg.elements[1]).k == -1);
}

TEST_CASE("ota forms", "[netlist]") {
    SECTION("gm given directly") {
        cvl::Netlist nl = cvl::parse_netlist("V1 a 0 AC 1\nOTA1 a 0 b gm=1m\nR1 b 0 1k\n.out b\n");
        const auto& o = std::get<cvl::Ota>(nl.elements[1]);
        CHECK(o.gm == 1.0e-3);
        CHECK_FALSE(o.i_bias.has_value());
        CHECK_FALSE(o.vt.has_value());
    }
    SECTION("ibias resolves through the default thermal voltage") {
        cvl::Netlist nl =
            cvl::parse_netlist("V1 a 0 AC 1\nOTA1 a 0 b ibias=517u\nR1 b 0 1k\n.out b\n");
        const auto& o = std::get<cvl::Ota>(nl.elements[1]);
        REQUIRE(o.i_bias.has_value());
        CHECK(o.gm == cvl::gm_from_bias(cvl::parse_value("517u"), cvl::kDefaultVt));
        CHECK_THAT(o.gm, WithinULP(1.0e-2, 2));
    }
    SECTION("deck vt wins over the parse default") {
        cvl::Netlist nl = cvl::parse_netlist(
            "V1 a 0 AC 1\nOTA1 a 0 b ibias=1m vt=0.05\nR1 b 0 1k\n.out b\n", 0.03);
        const auto& o = std::get<cvl::Ota>(nl.elements[1]);
        CHECK(o.gm == cvl::gm_from_bias(1.0e-3, 0.05));
    }
    SECTION("parse default applies when the card has no vt") {
        cvl::Netlist nl = cvl::parse_netlist(
            "V1 a 0 AC 1\nOTA1 a 0 b ibias=1m\nR1 b 0 1k\n.out b\n", 0.03);
        CHECK(std::get<cvl::Ota>(nl.elements[1]).gm == cvl::gm_from_bias(1.0e-3, 0.03));
    }
}

TEST_CASE("negative source amplitude and ground output are legal", "[netlist]") {
    cvl::Netlist nl = cvl::parse_netlist("V1 a 0 AC -2.5\nR1 a 0 1k\n.out 0\n");
    CHECK(std::get<cvl::VSource>(nl.elements[0]).amplitude == -2.5);
    CHECK(nl.out_node == "0");
}

TEST_CASE("parse failures carry line numbers", "[netlist]") {
    auto e1 = expect_parse_error([] { cvl::parse_netlist("X1 a 0 5\nV1 a 0 AC 1\n.out a\n"); });
    CHECK(e1.line() == 1);
    CHECK_THAT(e1.what(), ContainsSubstring("unknown card"));
    CHECK_THAT(e1.what(), ContainsSubstring("(line 1)"));

    auto e2 = expect_parse_error([] { cvl::parse_netlist("V1 a 0 AC 1\nR1 a 0\n.out a\n"); });
    CHECK(e2.line() == 2);
    CHECK_THAT(e2.what(), ContainsSubstring("wrong field count"));

    auto e3 =
        expect_parse_error([] { cvl::parse_netlist("V1 a 0 AC 1\nR1 a 0 -5\n.out a\n"); });
    CHECK(e3.line() == 2);
    CHECK_THAT(e3.what(), ContainsSubstring("non-positive"));

    auto e4 = expect_parse_error([] { cvl::parse_netlist("V1 a 0 AC 1\nC1 a 0 0\n.out a\n"); });
    CHECK(e4.line() == 2);

    auto e5 = expect_parse_error([] { cvl::parse_netlist("V1 a 0 DC 1\nR1 a 0 1k\n.out a\n"); });
    CHECK(e5.line() == 1);
    CHECK_THAT(e5.what(), ContainsSubstring("expected AC"));

    auto e6 = expect_parse_error(
        [] { cvl::parse_netlist("V1 a 0 AC 1\nCC1 a b c x\nR1 c 0 1k\n.out a\n"); });
    CHECK(e6.line() == 2);
    CHECK_THAT(e6.what(), ContainsSubstring("polarity"));

    auto e7 = expect_parse_error(
        [] { cvl::parse_netlist("V1 a 0 AC 1\nR1 a 0 10x\n.out a\n"); });
    CHECK(e7.line() == 2);
    CHECK_THAT(e7.what(), ContainsSubstring("unknown value suffix"));

    auto e8 = expect_parse_error([] { cvl::parse_netlist("V1 a 0 AC 1\n.foo\n.out a\n"); });
    CHECK(e8.line() == 2);
}

TEST_CASE("ota parameter validation", "[netlist]") {
    auto both = expect_parse_error([] {
        cvl::parse_netlist("V1 a 0 AC 1\nOTA1 a 0 b gm=1m ibias=1u\n.out b\n");
    });
    CHECK(both.line() == 2);
    CHECK_THAT(both.what(), ContainsSubstring("not both"));

    auto vt_alone = expect_parse_error([] {
        cvl::parse_netlist("V1 a 0 AC 1\nOTA1 a 0 b gm=1m vt=0.026\n.out b\n");
    });
    CHECK_THAT(vt_alone.what(), ContainsSubstring("vt="));

    auto neither =
        expect_parse_error([] { cvl::parse_netlist("V1 a 0 AC 1\nOTA1 a 0 b\n.out b\n"); });
    CHECK(neither.line() == 2);

    auto bad_key = expect_parse_error(
        [] { cvl::parse_netlist("V1 a 0 AC 1\nOTA1 a 0 b foo=1\n.out b\n"); });
    CHECK_THAT(bad_key.what(), ContainsSubstring("unknown OTA parameter"));

    auto no_eq = expect_parse_error(
        [] { cvl::parse_netlist("V1 a 0 AC 1\nOTA1 a 0 b gm\n.out b\n"); });
    CHECK_THAT(no_eq.what(), ContainsSubstring("key=value"));

    auto dup_key = expect_parse_error([] {
        cvl::parse_netlist("V1 a 0 AC 1\nOTA1 a 0 b vt=0.02 vt=0.03\n.out b\n");
    });
    CHECK_THAT(dup_key.what(), ContainsSubstring("duplicate vt="));
}

TEST_CASE("deck-level validation", "[netlist]") {
    auto dup = expect_parse_error(
        [] { cvl::parse_netlist("R1 a 0 10k\nR1 a 0 5k\nV1 a 0 AC 1\n.out a\n"); });
    CHECK(dup.line() == 2);
    CHECK_THAT(dup.what(), ContainsSubstring("duplicate element name R1"));

    auto dup_out = expect_parse_error(
        [] { cvl::parse_netlist("V1 a 0 AC 1\n.out a\n.out a\n"); });
    CHECK(dup_out.line() == 3);
    CHECK_THAT(dup_out.what(), ContainsSubstring("duplicate .out"));

    auto dup_title = expect_parse_error(
        [] { cvl::parse_netlist(".title a\n.title b\nV1 a 0 AC 1\n.out a\n"); });
    CHECK(dup_title.line() == 2);

    auto no_out = expect_parse_error([] { cvl::parse_netlist("V1 a 0 AC 1\n"); });
    CHECK_THAT(no_out.what(), ContainsSubstring("missing .out"));

    auto no_src = expect_parse_error([] { cvl::parse_netlist("R1 a 0 1k\n.out a\n"); });
    CHECK_THAT(no_src.what(), ContainsSubstring("no voltage source"));

    auto dangling = expect_parse_error([] { cvl::parse_netlist("V1 a 0 AC 1\n.out b\n"); });
    CHECK(dangling.line() == 2);
    CHECK_THAT(dangling.what(), ContainsSubstring("not connected"));
}

TEST_CASE("serialize inverts parse", "[netlist]") {
    std::string text =
        ".title demo\nV1 in 0 AC 1\nR1 in x 1k\nCC1 0 x z +\nC2 z 0 100n\n"
        "OTA1 z 0 out ibias=1m vt=0.03\nR2 out 0 2k\n.out out\n";
    cvl::Netlist nl = cvl::parse_netlist(text);
    CHECK(cvl::parse_netlist(cvl::serialize(nl)) == nl);
    // canonical form is a fixed point
    CHECK(cvl::serialize(cvl::parse_netlist(cvl::serialize(nl))) == cvl::serialize(nl));
}

TEST_CASE("round-trip holds for randomized netlists", "[netlist]") {
    std::mt19937 gen(42);
    for (int i = 0; i < 100; ++i) {
        cvl::Netlist nl = support::random_netlist(gen);
        cvl::Netlist back = cvl::parse_netlist(cvl::serialize(nl));
        REQUIRE(back == nl);
    }
}
