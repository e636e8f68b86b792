#include "minkenv/expr.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace minkenv;

namespace {

// Independent derivative oracle: central finite difference of the value.
double fd_derivative(const ExprAst& e, double t, double h = 1e-6) {
    return (e.eval(t + h) - e.eval(t - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("parsing and precedence") {
    CHECK(parse_expr("t^3").eval(2.0) == 8.0);
    CHECK(parse_expr("2*t+1").eval(3.0) == 7.0);
    CHECK(parse_expr("-t^2").eval(3.0) == -9.0);      // unary minus binds looser than ^
    CHECK(parse_expr("(-t)^2").eval(3.0) == 9.0);
    CHECK(parse_expr("2^3^2").eval(0.0) == 512.0);    // right-associative
    CHECK(parse_expr("t^-2").eval(2.0) == 0.25);
    CHECK(parse_expr("1-2-3").eval(0.0) == -4.0);     // left-associative
    CHECK(parse_expr("6/3/2").eval(0.0) == 1.0);
    CHECK(parse_expr("2e-1+1").eval(0.0) == Catch::Approx(1.2));
    CHECK(parse_expr(" sqrt( 1 + t^6 ) ").eval(1.0) == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("parse errors carry positions") {
    try {
        parse_expr("2-)");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position == 2);
    }
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("sin(t)"), ParseError);  // unknown function
    CHECK_THROWS_AS(parse_expr("(1+t"), ParseError);
    CHECK_THROWS_AS(parse_expr("1 2"), ParseError);
    CHECK_THROWS_AS(parse_expr("t*"), ParseError);
}

TEST_CASE("dual evaluation on the worked expressions") {
    // d/dt sqrt(1+t^6) = 3t^5/sqrt(1+t^6); at t = 1 both are computable by hand.
    const ExprAst e = parse_expr("sqrt(1+t^6)");
    const Dual d = e.eval_dual(1.0);
    CHECK(d.val == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(d.der == Catch::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::fabs(d.der - fd_derivative(e, 1.0)) <= 1e-6);

    const Dual r = parse_expr("2-t").eval_dual(0.5);
    CHECK(r.val == 1.5);
    CHECK(r.der == -1.0);

    const Dual c = parse_expr("cosh(t)").eval_dual(0.0);
    CHECK(c.val == 1.0);
    CHECK(c.der == 0.0);
}

TEST_CASE("constant expressions have exactly zero derivative") {
    for (const char* src : {"1", "2.5*3", "sqrt(2)", "cosh(1)-sinh(1)", "2^10", "1/3"}) {
        CHECK(parse_expr(src).eval_dual(0.7).der == 0.0);
        CHECK_FALSE(parse_expr(src).depends_on_t());
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(parse_expr("sqrt(t)").eval_dual(-1.0), DomainError);
    CHECK_THROWS_AS(parse_expr("sqrt(t)").eval_dual(0.0), DomainError);  // derivative blows up
    CHECK_THROWS_AS(parse_expr("log(t)").eval_dual(0.0), DomainError);
    CHECK_THROWS_AS(parse_expr("1/t").eval_dual(0.0), DomainError);
    CHECK_THROWS_AS(parse_expr("abs(t)").eval_dual(0.0), DomainError);
    CHECK_THROWS_AS(parse_expr("t^0.5").eval_dual(-2.0), DomainError);  // exp/log route
    CHECK(parse_expr("t^2").eval(-2.0) == 4.0);                         // integer route is fine
    CHECK(parse_expr("abs(t)").eval_dual(-2.0).der == -1.0);
}

namespace {

// Random expression generator for the AD-vs-FD property. Depth-limited;
// leans on functions with full domain so most drawn points are usable.
std::string random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
    std::uniform_real_distribution<double> C(0.2, 2.5);
    switch (pick(rng)) {
        case 0: return "t";
        case 1: return "t";
        case 2: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", C(rng));
            return buf;
        }
        case 3: return "(" + random_expr(rng, depth - 1) + "+" + random_expr(rng, depth - 1) + ")";
        case 4: return "(" + random_expr(rng, depth - 1) + "-" + random_expr(rng, depth - 1) + ")";
        case 5: return "(" + random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1) + ")";
        case 6: return "sinh(" + random_expr(rng, depth - 1) + ")";
        case 7: return "tanh(" + random_expr(rng, depth - 1) + ")";
        case 8: return "cosh(" + random_expr(rng, depth - 1) + ")";
        case 9: return "sqrt(1+(" + random_expr(rng, depth - 1) + ")^2)";
    }
    return "t";
}

}  // namespace

TEST_CASE("AD matches central finite differences on builtins and random composites") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> T(-1.5, 1.5);

    std::vector<std::string> sources = {"sqrt(1+t^2)", "sinh(t)",      "cosh(t)", "tanh(t)",
                                        "exp(t)",      "log(2+t)",     "abs(1+t^4)", "t^3",
                                        "t^-1",        "(1+t^2)^0.5",  "-t"};
    for (int k = 0; k < 100; ++k) sources.push_back(random_expr(rng, 3));

    for (const std::string& src : sources) {
        const ExprAst e = parse_expr(src);
        int used = 0;
        for (int k = 0; k < 200 && used < 50; ++k) {
            const double t = T(rng);
            double ad, fd;
            try {
                ad = e.eval_dual(t).der;
                fd = fd_derivative(e, t);
            } catch (const DomainError&) {
                continue;
            }
            if (std::fabs(ad) > 1e4) continue;  // FD step too coarse near a pole
            ++used;
            INFO(src << " at t = " << t);
            CHECK(std::fabs(ad - fd) <= 1e-5 * (1.0 + std::fabs(ad)));
        }
        CHECK(used > 0);
    }
}

TEST_CASE("print/parse round trip evaluates identically") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> T(-2.0, 2.0);
    std::vector<std::string> sources = {"t^3",
                                        "sqrt(1+t^6)",
                                        "2-t",
                                        "t^2/2+t^3/3",
                                        "-t^2*(t+2)/sqrt(1+t^2)",
                                        "cosh(t)*sinh(t)-tanh(t)/(2+t^2)",
                                        "t^-3",
                                        "2^t",
                                        "1-2-3-t",
                                        "exp(log(2+t^2))"};
    for (int k = 0; k < 40; ++k) sources.push_back(random_expr(rng, 4));

    for (const std::string& src : sources) {
        const ExprAst e = parse_expr(src);
        const ExprAst round = parse_expr(e.to_string());
        INFO(src << "  ->  " << e.to_string());
        int used = 0;
        while (used < 20) {
            const double t = T(rng);
            double a, b;
            try {
                a = e.eval(t);
                b = round.eval(t);
            } catch (const DomainError&) {
                continue;
            }
            CHECK(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a)));
            ++used;
        }
    }
}
