#include <doctest.h>

#include "../support/desk.hpp"
#include "nlsm/search.hpp"

using namespace nlsm;

TEST_CASE("sampled candidates stay in the box and certify after min_p")
{
    const auto ds = testing::synthetic_dataset(30, 4, 3, 2);
    for (int depth : {1, 2}) {
        const auto box = SearchBox::for_depth(depth);
        const auto archs = sample_candidates(box, depth, 3, 4, 50, 7);
        REQUIRE(archs.size() == 50);
        for (const auto& a : archs) {
            CHECK(a.n1() >= box.n1_min);
            CHECK(a.n1() <= box.n1_max);
            CHECK(a.alpha.back() <= box.alpha_max);
            CHECK(a.rho_w > 0.0);
            CHECK(a.rho_w <= 1.0);
            CHECK(a.rho_u <= 1.0);
            if (depth == 2) {
                CHECK(a.n2() >= 2);
                CHECK(a.n2() <= 10);
                CHECK(a.rho_v <= 1.0);
            }
            CHECK(certify(with_min_p(a, ds), ds, BoundMode::loose).valid);
        }
        const auto again = sample_candidates(box, depth, 3, 4, 50, 7);
        CHECK(again[13].alpha == archs[13].alpha);
    }
}

TEST_CASE("search box errors")
{
    SearchBox box;
    CHECK_THROWS_AS(sample_candidates(box, 1, 2, 2, 0, 0), InvalidArgument);
    box.n1_min = 5;
    box.n1_max = 4;
    CHECK_THROWS_AS(sample_candidates(box, 1, 2, 2, 3, 0), InvalidArgument);
    box = SearchBox{};
    box.alpha_max = 1.0;
    CHECK_THROWS_AS(sample_candidates(box, 1, 2, 2, 3, 0), InvalidArgument);
    box = SearchBox{};
    box.rho_max = 0.0;
    CHECK_THROWS_AS(sample_candidates(box, 1, 2, 2, 3, 0), InvalidArgument);
}

TEST_CASE("cross_validate is reproducible and picks by mean accuracy")
{
    auto raw = testing::synthetic_dataset(60, 3, 2, 9);
    CvOptions opt;
    opt.budget = 8;
    opt.folds = 3;
    opt.seed = 4;
    const auto a = cross_validate(raw, opt);
    const auto b = cross_validate(raw, opt);
    REQUIRE(a.candidates.size() == 8);
    CHECK(a.best == b.best);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(a.candidates[i].index == static_cast<int>(i));
        CHECK(a.candidates[i].fold_accuracy == b.candidates[i].fold_accuracy);
        CHECK_FALSE(a.candidates[i].failed);
        CHECK(a.candidates[i].rho_A < 1.0);
    }
    const auto& best = a.candidates[a.best];
    for (const auto& c : a.candidates) {
        CHECK(c.mean_accuracy <= best.mean_accuracy);
        if (c.mean_accuracy == best.mean_accuracy)
            CHECK(c.arch.n1() >= best.arch.n1());
    }

    opt.budget = 1;
    const auto one = cross_validate(raw, opt);
    CHECK(one.best == 0);
    opt.folds = 1;
    CHECK_THROWS_AS(cross_validate(raw, opt), InvalidArgument);
}

TEST_CASE("evaluate_holdout reports a majority baseline")
{
    const auto raw = testing::synthetic_dataset(80, 3, 2, 10);
    CvOptions opt;
    opt.budget = 4;
    opt.folds = 3;
    const auto h = evaluate_holdout(raw, 0.25, opt);
    CHECK(h.test_size == 20);
    CHECK(h.train_size == 60);
    CHECK(h.test_accuracy >= 0.0);
    CHECK(h.test_accuracy <= 1.0);
    CHECK(h.majority_baseline >= 0.5);
    CHECK(h.final.model.certificate.valid);
}
