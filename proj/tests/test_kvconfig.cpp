#include <doctest.h>

#include "ctxmatch/errors.hpp"
#include "ctxmatch/kvconfig.hpp"

using namespace ctxmatch;

TEST_CASE("kvconfig parses sections, comments, and quoted values") {
    KvConfig kv = KvConfig::parse_string(
        "# comment\n[alpha]\nx = 1\nname = \"two words\"\n\n[beta]\nflag = true\nrate = 0.25\n");
    CHECK(kv.get_int("alpha", "x", 0) == 1);
    CHECK(kv.get_string("alpha", "name", "") == "two words");
    CHECK(kv.get_bool("beta", "flag", false));
    CHECK(kv.get_double("beta", "rate", 0.0) == doctest::Approx(0.25));
}

TEST_CASE("kvconfig falls back when keys are absent") {
    KvConfig kv = KvConfig::parse_string("[s]\na = 1\n");
    CHECK(kv.get_int("s", "missing", 7) == 7);
    CHECK(kv.get_string("other", "a", "dflt") == "dflt");
    CHECK(!kv.has("s", "missing"));
    CHECK(kv.has("s", "a"));
}

TEST_CASE("kvconfig rejects malformed values through typed getters") {
    KvConfig kv = KvConfig::parse_string("[s]\na = notanumber\n");
    CHECK_THROWS_AS(kv.get_int("s", "a", 0), Error);
    CHECK_THROWS_AS(kv.get_double("s", "a", 0.0), Error);
    CHECK_THROWS_AS(kv.get_bool("s", "a", false), Error);
}

TEST_CASE("kvconfig emission is byte-stable and round-trips") {
    KvConfig kv;
    kv.set("zeta", "k", "v");
    kv.set_int("alpha", "n", 3);
    kv.set_double("alpha", "r", 0.5);
    kv.set_bool("alpha", "b", true);
    std::string s1 = kv.to_string();
    KvConfig back = KvConfig::parse_string(s1);
    CHECK(back.to_string() == s1);
    CHECK(back.get_int("alpha", "n", 0) == 3);
    CHECK(back.get_string("zeta", "k", "") == "v");
    // sections emitted sorted: alpha before zeta
    CHECK(s1.find("[alpha]") < s1.find("[zeta]"));
}
