#include <doctest.h>

#include <cmath>
#include <limits>

#include "fcmvrp/errors.hpp"
#include "fcmvrp/lp_format.hpp"
#include "fcmvrp/milp.hpp"
#include "fcmvrp/rng.hpp"

using namespace fcmvrp;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("add_variable returns sequential ids and validates bounds") {
    MilpModel m;
    CHECK(m.add_variable("b0", VarKind::Binary, 0.0, 1.0, 1.0) == 0);
    CHECK(m.add_variable("c0", VarKind::Continuous, -1.0, 5.0, 0.0) == 1);
    CHECK_THROWS_AS(m.add_variable("bad", VarKind::Continuous, 2.0, 1.0, 0.0), ModelError);
    CHECK_THROWS_AS(m.add_variable("bad", VarKind::Binary, -0.5, 1.0, 0.0), ModelError);
    CHECK(m.num_variables() == 2);
}

TEST_CASE("add_constraint validates references and duplicates") {
    MilpModel m;
    m.add_variable("a", VarKind::Continuous, 0.0, 1.0, 0.0);
    LinearConstraint c;
    c.terms = {{0, 1.0}, {5, 2.0}};
    CHECK_THROWS_AS(m.add_constraint(c), ModelError); // unknown id
    c.terms = {{0, 1.0}, {0, 2.0}};
    CHECK_THROWS_AS(m.add_constraint(c), ModelError); // duplicate
    c.terms = {{0, 1.0}};
    c.sense = Sense::Ge;
    c.rhs = 0.5;
    CHECK(m.add_constraint(c) == 0);
}

TEST_CASE("relax flips binaries only and is idempotent") {
    MilpModel m;
    for (int i = 0; i < 6; ++i)
        m.add_variable("b" + std::to_string(i), VarKind::Binary, 0.0, 1.0, 1.0);
    for (int i = 0; i < 6; ++i)
        m.add_variable("c" + std::to_string(i), VarKind::Continuous, 0.0, 9.0, 2.0);
    LinearConstraint c;
    c.terms = {{0, 1.0}, {6, -1.0}};
    m.add_constraint(c);

    const MilpModel r = relax(m);
    CHECK(r.num_variables() == 12);
    CHECK(r.num_constraints() == 1);
    for (const auto& v : r.variables()) {
        CHECK(v.kind == VarKind::Continuous);
        CHECK(v.lower == m.variable(v.id).lower);
        CHECK(v.upper == m.variable(v.id).upper);
        CHECK(v.objective_coeff == m.variable(v.id).objective_coeff);
    }
    const MilpModel rr = relax(r);
    CHECK(write_lp(rr) == write_lp(r)); // idempotent
}

namespace {

MilpModel random_model(Rng& rng) {
    MilpModel m;
    const int n = 1 + static_cast<int>(rng.below(8));
    for (int j = 0; j < n; ++j) {
        const int shape = static_cast<int>(rng.below(5));
        double lo = 0.0, up = kInf;
        VarKind kind = VarKind::Continuous;
        switch (shape) {
            case 0: kind = VarKind::Binary; lo = 0.0; up = 1.0; break;
            case 1: lo = -5.0 + rng.uniform(10.0); up = lo + rng.uniform(10.0); break;
            case 2: lo = -kInf; up = rng.uniform(10.0); break;
            case 3: lo = -kInf; up = kInf; break;
            case 4: lo = rng.uniform(4.0); up = lo; break; // fixed
        }
        m.add_variable("v" + std::to_string(j), kind, lo, up,
                       std::round(rng.uniform(20.0) - 10.0) / 2.0);
    }
    const int rows = static_cast<int>(rng.below(6));
    for (int r = 0; r < rows; ++r) {
        LinearConstraint c;
        for (int j = 0; j < n; ++j)
            if (rng.below(2) == 0) c.terms.emplace_back(j, std::round(rng.uniform(8.0) - 4.0));
        c.sense = static_cast<Sense>(rng.below(3));
        c.rhs = std::round(rng.uniform(20.0) - 10.0) / 4.0;
        c.tag = "eq" + std::to_string(rng.below(16) + 1);
        m.add_constraint(c);
    }
    return m;
}

bool models_equal(const MilpModel& a, const MilpModel& b) {
    if (a.num_variables() != b.num_variables()) return false;
    if (a.num_constraints() != b.num_constraints()) return false;
    for (int j = 0; j < a.num_variables(); ++j) {
        const auto& va = a.variable(j);
        const auto& vb = b.variable(j);
        if (va.name != vb.name || va.kind != vb.kind || va.lower != vb.lower ||
            va.upper != vb.upper || va.objective_coeff != vb.objective_coeff)
            return false;
    }
    for (int r = 0; r < a.num_constraints(); ++r) {
        auto ca = a.constraint(r);
        auto cb = b.constraint(r);
        auto drop_zeros = [](LinearConstraint& c) {
            std::erase_if(c.terms, [](const auto& t) { return t.second == 0.0; });
        };
        drop_zeros(ca);
        drop_zeros(cb);
        if (ca.terms != cb.terms || ca.sense != cb.sense || ca.rhs != cb.rhs ||
            ca.tag != cb.tag)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("LP format round trip is lossless on random models") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const MilpModel m = random_model(rng);
        const std::string text = write_lp(m);
        MilpModel back;
        try {
            back = parse_lp(text);
        } catch (const std::exception& e) {
            INFO("model dump:\n" << text);
            FAIL("parse failed: " << e.what());
        }
        INFO("model dump:\n" << text);
        CHECK(models_equal(m, back));
    }
}

TEST_CASE("LP writer carries tags as comments") {
    MilpModel m;
    m.add_variable("x_0_1", VarKind::Binary, 0.0, 1.0, 2.5);
    m.add_variable("z_0_1", VarKind::Continuous, 0.0, kInf, 0.0);
    LinearConstraint c;
    c.terms = {{1, 1.0}, {0, -6.75}};
    c.sense = Sense::Le;
    c.rhs = 0.0;
    c.tag = "eq4";
    m.add_constraint(c);
    const std::string text = write_lp(m);
    CHECK(text.find("\\ tag=eq4") != std::string::npos);
    CHECK(text.find("Binary") != std::string::npos);
    const MilpModel back = parse_lp(text);
    CHECK(back.constraint(0).tag == "eq4");
    CHECK(back.variable(0).kind == VarKind::Binary);
}

TEST_CASE("LP parser reports malformed input") {
    CHECK_THROWS_AS(parse_lp("Maximize\n obj: x\nEnd\n"), ParseError);
    CHECK_THROWS_AS(parse_lp("Minimize\n obj: 3 +\nSubject To\nEnd\n"), ParseError);
}
