#include <doctest.h>

#include <cmath>
#include <sstream>

#include "spectra/csv.hpp"
#include "spectra/errors.hpp"
#include "spectra/serialize.hpp"

using namespace spectra;

TEST_CASE("potential round trip preserves values") {
    const Potential cases[] = {
        Potential::zero(),
        Potential::square_well(0.5, 0.0, 1.0),
        Potential::wigner_von_neumann(),
        Potential::pearson_sparse({1.0, 0.5}, {2.0, 10.0}, BumpProfile{1.0, 2.0}),
        Potential::random_decay(0.25, 3, BumpProfile{1.0, 3.0}, 30),
        Potential::power_law(1.0, 0.7),
        Potential::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0}, {1.0, 0.0, -1.0}, {{1, 2.0, 0.5}}),
    };
    for (const auto& v : cases) {
        const json j = to_json(v);
        const auto w = potential_from_json(json::parse(j.dump()));
        CHECK(w.kind() == v.kind());
        for (double x : {0.0, 0.7, 1.0, 1.5, 2.5, 11.3, 25.5})
            CHECK(w.eval(x) == v.eval(x));
    }
}

TEST_CASE("potential parsing rejects junk") {
    CHECK_THROWS_AS(potential_from_json(json{{"kind", "nonsense"}}), ValidationError);
    CHECK_THROWS(potential_from_json(json{{"kind", "square_well"}, {"params", {{"depth", "deep"}}}}));
}

TEST_CASE("tree round trip") {
    const auto t = TreePotential::random(3, 5);
    const auto u = tree_from_json(json::parse(to_json(t).dump()));
    CHECK(u.labels() == t.labels());
}

TEST_CASE("non-finite numbers become null") {
    CHECK(number(std::nan("")).is_null());
    CHECK(number(INFINITY).is_null());
    CHECK(number(1.5) == 1.5);
}

TEST_CASE("csv numbers round-trip") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0}) CHECK(std::stod(csv::format(v)) == v);
    std::ostringstream os;
    csv::Writer w(os, {{"a", "1"}}, {"x", "y"});
    w.row({1.0, 2.0});
    CHECK(os.str() == "# a=1\nx,y\n1,2\n");
    CHECK_THROWS(w.row({1.0}));
}
