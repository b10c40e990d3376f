#include <doctest.h>

#include <cmath>

#include "kerrforge/circuit.hpp"

using namespace kerrforge;

namespace {

Circuit jc_circuit() {
    Circuit c;
    c.cavities.push_back({"c1", 8.0, 10});
    c.devices.push_back({"q1", Duffing{7.0, -0.15, 4}});
    c.couplings.push_back({"c1", "q1", 0.1});
    return c;
}

}  // namespace

TEST_CASE("device level energies follow each model") {
    DeviceSpec tl{"q", TwoLevel{5.0}};
    CHECK(tl.levels() == 2);
    CHECK(tl.level_energy(0) == doctest::Approx(0.0));
    CHECK(tl.level_energy(1) == doctest::Approx(5.0));
    CHECK(tl.transition_frequency() == doctest::Approx(5.0));

    DeviceSpec du{"q", Duffing{7.0, -0.15, 4}};
    CHECK(du.levels() == 4);
    // Level m at m w + chi m (m-1).
    CHECK(du.level_energy(2) == doctest::Approx(14.0 - 0.3));
    CHECK(du.level_energy(3) == doctest::Approx(21.0 - 0.9));
    // Nearest-neighbor sqrt(j+1) ladder weights.
    CHECK(du.transition_weight(0, 1) == doctest::Approx(1.0));
    CHECK(du.transition_weight(1, 2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(du.transition_weight(0, 2) == doctest::Approx(0.0));

    DeviceSpec ml{"q", Multilevel{{0.0, 10.2, 20.7, 31.5}, {}}};
    CHECK(ml.levels() == 4);
    CHECK(ml.level_energy(2) == doctest::Approx(20.7));
    CHECK(ml.transition_weight(1, 2) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("detuning is cavity minus device transition") {
    const Circuit c = jc_circuit();
    CHECK(detuning(c, "c1", "q1") == doctest::Approx(1.0));
}

TEST_CASE("structural validation catches malformed circuits") {
    CHECK_NOTHROW(validate_structure(jc_circuit()));

    Circuit dup = jc_circuit();
    dup.cavities.push_back({"c1", 9.0, 4});
    CHECK_THROWS_AS(validate_structure(dup), ValidationError);

    Circuit dangling = jc_circuit();
    dangling.couplings.push_back({"c1", "nope", 0.1});
    CHECK_THROWS_AS(validate_structure(dangling), ValidationError);

    Circuit doubled = jc_circuit();
    doubled.couplings.push_back({"c1", "q1", 0.2});
    CHECK_THROWS_AS(validate_structure(doubled), ValidationError);

    Circuit shallow = jc_circuit();
    std::get<Duffing>(shallow.devices[0].model).levels = 2;
    CHECK_THROWS_AS(validate_structure(shallow), ValidationError);

    Circuit negative = jc_circuit();
    negative.cavities[0].frequency = -1.0;
    CHECK_THROWS_AS(validate_structure(negative), ValidationError);
}

TEST_CASE("dispersive diagnostics classify coupling ratios") {
    Circuit c = jc_circuit();
    auto diags = validate_dispersive(c);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].ratio == doctest::Approx(0.1));
    CHECK(diags[0].cls == DispersiveClass::Dispersive);
    CHECK(!diags[0].degenerate);

    c.couplings[0].strength = 0.5;
    CHECK(validate_dispersive(c)[0].cls == DispersiveClass::NonDispersive);

    c.couplings[0].strength = 0.1;
    std::get<Duffing>(c.devices[0].model).frequency = 8.0;
    CHECK(validate_dispersive(c)[0].degenerate);
}

TEST_CASE("JSON config round trip preserves the circuit") {
    const Circuit c = jc_circuit();
    const std::string text = serialize_circuit(c);
    const Circuit back = parse_circuit(text);
    CHECK(back.cavities.size() == 1);
    CHECK(back.cavities[0].label == "c1");
    CHECK(back.cavities[0].frequency == doctest::Approx(8.0));
    CHECK(back.cavities[0].fock_dim == 10);
    const auto& du = std::get<Duffing>(back.device("q1").model);
    CHECK(du.frequency == doctest::Approx(7.0));
    CHECK(du.anharmonicity == doctest::Approx(-0.15));
    CHECK(du.levels == 4);
    CHECK(*back.coupling_strength("c1", "q1") == doctest::Approx(0.1));
    CHECK(back.rwa);
    // Serialization is stable.
    CHECK(serialize_circuit(back) == text);
}

TEST_CASE("parse rejects malformed configs") {
    CHECK_THROWS(parse_circuit("not json"));
    CHECK_THROWS(parse_circuit("{\"schema_version\": 99}"));
    CHECK_THROWS(parse_circuit(
        R"({"schema_version":1,"cavities":[],"devices":[{"label":"q","type":"warp"}],"couplings":[]})"));
}

TEST_CASE("fock_dim heuristic") {
    CHECK(fock_dim_for_amplitude(2.0) == 24);
    CHECK(fock_dim_for_amplitude(0.0) == 10);
}
