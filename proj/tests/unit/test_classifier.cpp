#include "cnmf/classifier.hpp"
#include "cnmf/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace cnmf;

namespace {

PairModel model_from(Mat w, Mat h, std::vector<Label> labels) {
    auto classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return PairModel{classes, NonNegMatrix(std::move(w)), NonNegMatrix(std::move(h)), std::move(labels), 0.5};
}

std::vector<double> as_vector(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("project") {
    SUBCASE("orthonormal columns recover the code") {
        Mat w = Mat::Zero(4, 2);
        w(0, 0) = 1.0;
        w(3, 1) = 1.0;
        Vec h(2);
        h << 0.25, 0.75;
        const Vec x = w * h;
        const Vec got = project(NonNegMatrix(w), as_vector(x));
        CHECK((got - h).norm() < 1e-8);
    }
    SUBCASE("zero sample") {
        std::mt19937_64 rng(1);
        const NonNegMatrix w(oracle::random_nonneg(5, 3, rng));
        const std::vector<double> zero(5, 0.0);
        CHECK(project(w, zero).isZero(0.0));
    }
    SUBCASE("normal equations by hand") {
        const std::vector<double> x{1.0, 3.0};
        const Vec got = project(NonNegMatrix{{1}, {1}}, x, 0.0);
        CHECK(got(0) == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("codes may be negative") {
        const std::vector<double> x{0.0, 1.0};
        const Vec got = project(NonNegMatrix{{1, 1}, {0, 1}}, x, 0.0);
        CHECK(got(0) == doctest::Approx(-1.0));
        CHECK(got(1) == doctest::Approx(1.0));
    }
    SUBCASE("round trip on random full-rank bases") {
        std::mt19937_64 rng(4);
        for (int trial = 0; trial < 20; ++trial) {
            const NonNegMatrix w(oracle::random_nonneg(20, 5, rng));
            const Vec h = oracle::random_real(5, 1, rng);
            const Vec got = project(w, as_vector(w.mat() * h), 0.0);
            CHECK((got - h).norm() <= 1e-8 * h.norm());
        }
    }
    CHECK_THROWS_AS(project(NonNegMatrix{{1}, {1}}, std::vector<double>{1.0}), ContractError);
    CHECK_THROWS_AS(project(NonNegMatrix{{1, 1}, {1, 1}}, std::vector<double>{1.0, 2.0}, 0.0), SingularError);
}

TEST_CASE("knn_label") {
    const PairModel m = model_from(Mat{{1.0, 1.0}}, Mat{{0.0, 10.0}}, {3, 8});
    Vec h(1);
    h << 10.0;
    CHECK(knn_label(h, m) == 8);
    h << 1.0;
    CHECK(knn_label(h, m) == 3);
    h << 5.0;  // equidistant: lower column index
    CHECK(knn_label(h, m) == 3);

    const PairModel tie = model_from(Mat{{1.0, 1.0}}, Mat{{2.0, 2.0, 0.0}}, {8, 3, 3});
    h << 2.0;
    CHECK(knn_label(h, tie) == 8);

    SUBCASE("k > 1 takes the majority of the nearest k") {
        const PairModel m3 = model_from(Mat{{1.0}}, Mat{{0.0, 0.1, 0.2, 5.0, 5.1}}, {1, 2, 2, 1, 1});
        Vec q(1);
        q << 0.0;
        CHECK(knn_label(q, m3, 1) == 1);
        CHECK(knn_label(q, m3, 3) == 2);
        CHECK(knn_label(q, m3, 5) == 1);
        CHECK_THROWS_AS(knn_label(q, m3, 6), ContractError);
        CHECK_THROWS_AS(knn_label(q, m3, 0), ContractError);
    }
}

TEST_CASE("knn_label agrees with a brute-force scan") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const Mat codes = oracle::random_real(3, 15, rng);
        std::vector<Label> labels(15);
        for (auto& l : labels) l = coin(rng);
        const Vec h = oracle::random_real(3, 1, rng);
        const auto best = oracle::nearest_column(oracle::to_dense(codes), {h(0), h(1), h(2)});
        CHECK(knn_label(h, codes, labels) == labels[best]);
    }
}

TEST_CASE("majority_vote") {
    CHECK(majority_vote(std::vector<Label>{1, 1, 2}).winner == 1);
    CHECK(majority_vote(std::vector<Label>{4}).winner == 4);
    CHECK(majority_vote(std::vector<Label>{5, 2}).winner == 2);
    CHECK(majority_vote(std::vector<Label>{3, 1, 2}).winner == 1);
    const auto tally = majority_vote(std::vector<Label>{7, 2, 7, 2, 9});
    CHECK(tally.winner == 2);
    CHECK(tally.counts.at(7) == 2);
    CHECK(tally.counts.at(9) == 1);
    CHECK_THROWS_AS(majority_vote(std::vector<Label>{}), ContractError);
}

TEST_CASE("predict") {
    // three classes on one feature: class c sits near 0.1 + 0.4c
    const Mat w{{1.0}};
    const PairModel m01 = model_from(w, Mat{{0.1, 0.5}}, {0, 1});
    const PairModel m02 = model_from(w, Mat{{0.1, 0.9}}, {0, 2});
    const PairModel m12 = model_from(w, Mat{{0.5, 0.9}}, {1, 2});
    const std::vector<PairModel> models{m01, m02, m12};

    const std::vector<double> x{0.85};
    CHECK(collect_votes(x, models).size() == 3);
    CHECK(predict(x, models) == 2);
    CHECK(predict(std::vector<double>{0.45}, models) == 1);
    CHECK(predict(std::vector<double>{0.0}, models) == 0);

    const std::vector<PairModel> single{m12};
    CHECK(predict(x, single) == knn_label(project(m12.w, x), m12));

    CHECK_THROWS_AS(predict(x, std::vector<PairModel>{}), ContractError);
    CHECK_THROWS_AS(predict(std::vector<double>{0.1, 0.2}, models), ContractError);

    // a pair with a singular basis abstains
    const PairModel broken = model_from(Mat{{1.0, 1.0}}, Mat{{0.1, 0.5}, {0.0, 0.0}}, {0, 1});
    const std::vector<PairModel> with_broken{broken, m02, m12};
    CHECK(collect_votes(x, with_broken, 1, 0.0).size() == 2);
    CHECK(predict(x, with_broken, 1, 0.0) == 2);
    const std::vector<PairModel> only_broken{broken};
    CHECK_THROWS_AS(predict(x, only_broken, 1, 0.0), SingularError);

    CHECK(predict(x, models) == predict(x, models));
}

TEST_CASE("PairModel::validate") {
    CHECK_NOTHROW(model_from(Mat{{1.0}}, Mat{{0.1, 0.5}}, {0, 1}).validate());
    PairModel bad = model_from(Mat{{1.0}}, Mat{{0.1, 0.5}}, {0, 1});
    bad.labels = {0, 0};
    CHECK_THROWS_AS(bad.validate(), ContractError);
}
