#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "../support/desk.hpp"
#include "nlsm/certify.hpp"

using namespace nlsm;

namespace {

Architecture base_arch(int K, std::vector<double> alpha, double p_w, double p_u)
{
    Architecture a;
    a.depth = 1;
    a.num_classes = K;
    a.input_dim = 2;
    a.alpha = std::move(alpha);
    a.p_w = p_w;
    a.p_u = p_u;
    return a;
}

}  // namespace

TEST_CASE("psi: hand examples")
{
    CHECK(psi(std::vector<double>{1.0}, std::vector<double>{2.0}, 3.0, 2.0, 4.0) == doctest::Approx(6.0));
    CHECK(psi(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 1.0}, 1.0, 2.0, 4.0) ==
          doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-14));
    CHECK(psi(std::vector<double>{3.0}, std::vector<double>{1.0}, 2.0, 2.0, 4.0) == doctest::Approx(8.0));
    CHECK_THROWS_AS(psi(std::vector<double>{1.0}, std::vector<double>{1.0}, 0.0, 2.0, 2.0), InvalidArgument);
    CHECK_THROWS_AS(psi(std::vector<double>{1.0}, std::vector<double>{1.0}, 1.0, 1.0, 2.0), InvalidArgument);
    CHECK_THROWS_AS(psi(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}, 1.0, 2.0, 2.0),
                    InvalidArgument);
}

TEST_CASE("psi stays below the plain sum")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const int n = 1 + static_cast<int>(u(rng) * 5);
        std::vector<double> alpha, delta;
        double plain = 0.0;
        const double tt = 0.05 + 3.0 * u(rng);
        for (int l = 0; l < n; ++l) {
            alpha.push_back(1.0 + 3.0 * u(rng));
            delta.push_back(0.05 + 2.0 * u(rng));
            plain += delta.back() * std::pow(tt, alpha.back());
        }
        const double p = 1.01 + 5.0 * u(rng), q = 1.01 + 5.0 * u(rng);
        CHECK(psi(alpha, delta, tt, p, q) <= plain * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("loose bounds: hand examples")
{
    Architecture a = base_arch(2, {2.0}, 3.0, 3.0);
    auto bc = bounds(a, 1.0, BoundMode::loose);
    CHECK(bc.xi1 == doctest::Approx(1.0));
    CHECK(bc.xi2 == doctest::Approx(2.0));

    a.alpha = {1.0};
    a.rho_w = 0.7;
    bc = bounds(a, 1.0, BoundMode::loose);
    CHECK(bc.xi1 == doctest::Approx(0.7));
    CHECK(bc.xi2 == doctest::Approx(0.7));
}

TEST_CASE("build_A: one-layer loose hand matrix")
{
    Architecture a = base_arch(2, {1.0, 2.0}, 3.0, 2.0);
    a.p_w = 2.0;
    BoundConstants bc;
    bc.mode = BoundMode::loose;
    bc.depth = 1;
    bc.xi1 = bc.c_w = 1.0;
    bc.xi2 = bc.c_u = 2.0;
    bc.alpha_inf = 2.0;
    const Matrix A = build_A(a, bc);
    Matrix want(3, 3);
    want << 4, 4, 12, 4, 4, 12, 6, 6, 10;
    CHECK(A == want);
}

TEST_CASE("spectral_radius and perron_vector")
{
    Matrix m(2, 2);
    m << 1, 2, 3, 4;
    CHECK(std::abs(spectral_radius(m) - (5.0 + std::sqrt(33.0)) / 2.0) < 1e-10);

    CHECK(spectral_radius(Matrix::Ones(3, 3)) == doctest::Approx(3.0).epsilon(1e-13));
    Matrix near(2, 2);
    near << 1, 1e-9, 1e-9, 1;
    CHECK(spectral_radius(near) == doctest::Approx(1.0 + 1e-9).epsilon(1e-12));

    const Vector ones = perron_vector(Matrix::Ones(4, 4));
    CHECK((ones.array() - 1.0).abs().maxCoeff() < 1e-12);
    Matrix sym(2, 2);
    sym << 2, 1, 1, 2;
    const Vector g = perron_vector(sym);
    CHECK(g(0) == doctest::Approx(1.0));
    CHECK(g(1) == doctest::Approx(1.0));

    Matrix bad(2, 2);
    bad << 1, 0, 1, 1;
    CHECK_THROWS_AS(spectral_radius(bad), InvalidArgument);
    CHECK_THROWS_AS(spectral_radius(Matrix::Ones(2, 3)), InvalidArgument);
}

TEST_CASE("perron_vector matches a dense eigensolver")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    for (int t = 0; t < 20; ++t) {
        Matrix m(3, 3);
        for (Eigen::Index i = 0; i < 9; ++i)
            m.data()[i] = u(rng);
        const Vector g = perron_vector(m);
        Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(m.transpose()));
        Eigen::Index best = 0;
        es.eigenvalues().real().maxCoeff(&best);
        Vector ref = es.eigenvectors().col(best).real();
        ref /= ref.maxCoeff() > 0 ? ref.maxCoeff() : ref.minCoeff();
        // sine of the angle, well conditioned near zero
        const double angle = (g.normalized() - ref.normalized()).norm();
        CHECK(angle < 1e-9);
        CHECK(spectral_radius(m) == doctest::Approx(es.eigenvalues().real().maxCoeff()).epsilon(1e-12));
    }
}

TEST_CASE("Collatz-Wielandt sandwich")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Matrix m(4, 4);
    for (Eigen::Index i = 0; i < 16; ++i)
        m.data()[i] = u(rng);
    const double rho = spectral_radius(m);
    for (int t = 0; t < 20; ++t) {
        Vector v(4);
        for (int i = 0; i < 4; ++i)
            v(i) = u(rng);
        const auto [lo, hi] = collatz_wielandt_bracket(m, v);
        CHECK(lo <= rho * (1 + 1e-12));
        CHECK(hi >= rho * (1 - 1e-12));
    }
    const auto [lo, hi] = collatz_wielandt_bracket(m, perron_vector(m));
    CHECK(hi - lo <= 1e-10 * rho);
}

TEST_CASE("min_p: hand thresholds and limits")
{
    Architecture a = base_arch(2, {1.0, 2.0}, 2.0, 2.0);
    BoundConstants bc;
    bc.mode = BoundMode::loose;
    bc.depth = 1;
    bc.xi1 = 1.0;
    bc.xi2 = 2.0;
    bc.alpha_inf = 2.0;
    const auto p = min_p(a, bc);
    CHECK(p.p_w == doctest::Approx(15.015).epsilon(1e-14));
    CHECK(p.p_u == doctest::Approx(35.035).epsilon(1e-14));

    bc.xi1 = bc.xi2 = 0.0;
    const auto lim = min_p(a, bc, 0.0);
    CHECK(lim.p_w == doctest::Approx(3.0));
    CHECK(lim.p_u == doctest::Approx(2.0 * 3 * 2.0 - 1.0));

    bc.mode = BoundMode::tight;
    CHECK_THROWS_AS(min_p(a, bc), InvalidArgument);
}

TEST_CASE("tight constants and matrices never exceed the loose ones")
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto ds = testing::synthetic_dataset(25, 5, 3, 4);
    for (int t = 0; t < 100; ++t) {
        const int depth = 1 + t % 2;
        Architecture a;
        a.depth = depth;
        a.num_classes = 3;
        a.input_dim = 5;
        a.alpha = make_alpha(2 + static_cast<int>(u(rng) * 8), 1.0 + 3.0 * u(rng) + 1e-9, rng());
        if (depth == 2)
            a.beta = make_alpha(2 + static_cast<int>(u(rng) * 8), 1.0 + 3.0 * u(rng) + 1e-9, rng());
        a.rho_w = 1.0 - u(rng);
        a.rho_v = 1.0 - u(rng);
        a.rho_u = 1.0 - u(rng);
        a = with_min_p(a, ds);
        const auto loose = bounds(a, ds, BoundMode::loose);
        const auto tight = bounds(a, ds, BoundMode::tight);
        CHECK(tight.rho_x <= loose.rho_x * (1 + 1e-15));
        if (depth == 1) {
            CHECK(tight.c_w <= loose.xi1 * (1 + 1e-12));
            CHECK(tight.c_u <= loose.xi2 * (1 + 1e-12));
        } else {
            CHECK(tight.c_w <= loose.zeta1 * (1 + 1e-12));
            CHECK(tight.c_v <= loose.zeta2 * (1 + 1e-12));
        }
        const Matrix At = build_A(a, tight), Al = build_A(a, loose);
        CHECK(((At.array() <= Al.array() * (1 + 1e-12))).all());
        CHECK((At.array() > 0.0).all());
        CHECK(spectral_radius(At) <= spectral_radius(Al) * (1 + 1e-12));
    }
}

TEST_CASE("certify on the desk instance")
{
    const auto ds = testing::desk_dataset();
    for (int depth : {1, 2}) {
        const auto a = testing::desk_architecture(ds, depth);
        for (auto mode : {BoundMode::loose, BoundMode::tight}) {
            const auto c = certify(a, ds, mode);
            CHECK(c.valid);
            CHECK(c.rho_A < 1.0);
            CHECK(c.A.rows() == a.num_blocks());
            CHECK(c.gamma.maxCoeff() == doctest::Approx(1.0));
            CHECK(c.gamma.minCoeff() > 0.0);
            const Vector res = c.A.transpose() * c.gamma - c.rho_A * c.gamma;
            CHECK(res.cwiseAbs().maxCoeff() <= 1e-10 * c.rho_A);
        }
        auto small = a;
        small.p_w = small.p_u = small.p_v = 2.0;
        CHECK_FALSE(certify(small, ds, BoundMode::loose).valid);
    }
}

TEST_CASE("bound mode names")
{
    CHECK(parse_bound_mode("loose") == BoundMode::loose);
    CHECK(parse_bound_mode("tight") == BoundMode::tight);
    CHECK(to_string(BoundMode::tight) == "tight");
    CHECK_THROWS_AS(parse_bound_mode("medium"), InvalidArgument);
}
