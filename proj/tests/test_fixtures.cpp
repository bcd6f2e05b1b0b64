#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "netcond/dataset.hpp"
#include "netcond/fixtures.hpp"
#include "netcond/norms.hpp"
#include "oracles.hpp"

using namespace netcond;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

bool identical(const Dataset& a, const Dataset& b) {
    if (a.size() != b.size() || a.labels != b.labels || a.class_count != b.class_count)
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a.features[i] == b.features[i])) return false;
    return true;
}

} // namespace

TEST(BlobCenters, RegularSimplexScaledByFour) {
    const std::vector<Tensor> centers = blob_centers(4, 6);
    const double expected = 4.0 * std::sqrt(2.0); // pairwise distance of Helmert rows
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            EXPECT_NEAR(l2_norm(centers[i] - centers[j]), expected, 1e-12);
}

TEST(BlobCenters, DimensionTooSmallRejected) {
    EXPECT_THROW(blob_centers(4, 2), InvalidArgument);
    EXPECT_NO_THROW(blob_centers(4, 3));
}

TEST(MakeBlobs, ZeroSpreadPointsEqualCenters) {
    const Dataset ds = make_blobs(10, 3, 2, 0.0, 5);
    const std::vector<Tensor> centers = blob_centers(3, 2);
    for (std::size_t i = 0; i < ds.size(); ++i)
        EXPECT_EQ(ds.features[i], centers[ds.labels[i]]);
    EXPECT_DOUBLE_EQ(oracles::nearest_center_accuracy(ds.features, ds.labels, centers), 1.0);
}

TEST(MakeBlobs, DeterministicForSeed) {
    EXPECT_TRUE(identical(make_blobs(25, 3, 4, 0.5, 99), make_blobs(25, 3, 4, 0.5, 99)));
    EXPECT_FALSE(identical(make_blobs(25, 3, 4, 0.5, 99), make_blobs(25, 3, 4, 0.5, 100)));
}

TEST(MakeBlobs, NearestCenterAccuracyPinned) {
    // Centers sit 4*sqrt(2) apart; spread 0.5 leaves clusters well separated.
    const Dataset ds = make_blobs(200, 3, 2, 0.5, 31); // 600 points
    const double acc =
        oracles::nearest_center_accuracy(ds.features, ds.labels, blob_centers(3, 2));
    EXPECT_DOUBLE_EQ(acc, 1.0); // frozen from the oracle on this seed
}

TEST(MakeBlobs, InvalidArgumentsRejected) {
    EXPECT_THROW(make_blobs(0, 3, 2, 0.5, 1), InvalidArgument);
    EXPECT_THROW(make_blobs(10, 3, 1, 0.5, 1), InvalidArgument); // dim < k-1
    EXPECT_THROW(make_blobs(10, 3, 2, -0.5, 1), InvalidArgument);
}

TEST(TwoSpirals, ExactClassBalance) {
    const Dataset ds = make_two_spirals(500, 0.1, 8);
    std::size_t zeros = 0;
    for (std::size_t label : ds.labels)
        if (label == 0) ++zeros;
    EXPECT_EQ(zeros, 250u);
    EXPECT_EQ(ds.size() - zeros, 250u);
}

TEST(TwoSpirals, DeterministicForSeed) {
    EXPECT_TRUE(identical(make_two_spirals(300, 0.05, 4), make_two_spirals(300, 0.05, 4)));
}

TEST(TwoSpirals, NoiselessArmsStaySeparated) {
    const Dataset ds = make_two_spirals(400, 0.0, 1);
    // Outside the origin region, each point's nearest same-class neighbour is
    // closer than any other-class point.
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (l2_norm(ds.features[i]) < 1.0) continue;
        double nearest_same = HUGE_VAL, nearest_other = HUGE_VAL;
        for (std::size_t j = 0; j < ds.size(); ++j) {
            if (j == i) continue;
            const double d = l2_norm(ds.features[i] - ds.features[j]);
            if (ds.labels[j] == ds.labels[i])
                nearest_same = std::min(nearest_same, d);
            else
                nearest_other = std::min(nearest_other, d);
        }
        ASSERT_LT(nearest_same, nearest_other) << "point " << i;
    }
}

TEST(AssignSplit, StratifiedAndDeterministic) {
    Dataset a = make_blobs(100, 3, 2, 0.5, 12);
    Dataset b = make_blobs(100, 3, 2, 0.5, 12);
    assign_split(a, 0.25, 9);
    assign_split(b, 0.25, 9);
    EXPECT_EQ(a.split, b.split);
    for (std::size_t c = 0; c < 3; ++c) {
        std::size_t test_count = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.labels[i] == c && a.split[i] == Split::test) ++test_count;
        EXPECT_EQ(test_count, 25u) << "class " << c;
    }
}

TEST(DatasetIo, RoundTripsExactly) {
    Dataset ds = make_blobs(20, 3, 4, 0.7, 55);
    assign_split(ds, 0.2, 1);
    const std::string path = temp_path("netcond_ds_roundtrip.csv");
    save_dataset(ds, path);
    const Dataset loaded = load_dataset(path);
    EXPECT_TRUE(identical(ds, loaded));
    EXPECT_EQ(ds.split, loaded.split);
    std::remove(path.c_str());
}

TEST(DatasetIo, ParseErrorsCarryContext) {
    const std::string path = temp_path("netcond_ds_bad.csv");
    {
        std::ofstream out(path);
        out << "f0,f1,split,label\n";
        out << "1.0,2.0,train,0\n";
        out << "1.0,oops,train,1\n";
    }
    try {
        load_dataset(path);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("line 3"), std::string::npos);
        EXPECT_NE(what.find("f1"), std::string::npos);
    }
    std::remove(path.c_str());
}

TEST(DatasetIo, WrongColumnCountRejected) {
    const std::string path = temp_path("netcond_ds_cols.csv");
    {
        std::ofstream out(path);
        out << "f0,f1,split,label\n";
        out << "1.0,train,0\n";
    }
    EXPECT_THROW(load_dataset(path), ParseError);
    std::remove(path.c_str());
}

TEST(TrainMlp, ReachesPinnedAccuracyOnTightBlobs) {
    const Dataset ds = make_blobs(60, 3, 2, 0.1, 2);
    const Network net = train_mlp({2, 16, 3}, Layer::relu(), ds, 200, 0.05, 11);
    EXPECT_GE(accuracy(net, ds, Split::train), 0.99);
}

TEST(TrainMlp, ZeroLearningRateKeepsInit) {
    const Dataset ds = make_blobs(30, 2, 2, 0.3, 21);
    const Network init = train_mlp({2, 8, 2}, Layer::relu(), ds, 0, 0.05, 77);
    const Network frozen = train_mlp({2, 8, 2}, Layer::relu(), ds, 25, 0.0, 77);
    ASSERT_EQ(init.layer_count(), frozen.layer_count());
    for (std::size_t i = 0; i < init.layer_count(); ++i) {
        EXPECT_EQ(init.layers()[i].weight, frozen.layers()[i].weight);
        EXPECT_EQ(init.layers()[i].bias, frozen.layers()[i].bias);
    }
}

TEST(TrainMlp, BitIdenticalForSeed) {
    const Dataset ds = make_blobs(40, 3, 3, 0.4, 9);
    const Network a = train_mlp({3, 10, 3}, Layer::tanh(), ds, 30, 0.03, 123);
    const Network b = train_mlp({3, 10, 3}, Layer::tanh(), ds, 30, 0.03, 123);
    for (std::size_t i = 0; i < a.layer_count(); ++i) {
        EXPECT_EQ(a.layers()[i].weight, b.layers()[i].weight);
        EXPECT_EQ(a.layers()[i].bias, b.layers()[i].bias);
    }
}

TEST(TrainMlp, WidthsMustComposeWithData) {
    const Dataset ds = make_blobs(10, 3, 2, 0.3, 1);
    EXPECT_THROW(train_mlp({3, 8, 3}, Layer::relu(), ds, 5, 0.05, 1), InvalidArgument);
    EXPECT_THROW(train_mlp({2, 8, 4}, Layer::relu(), ds, 5, 0.05, 1), InvalidArgument);
}

TEST(TrainMlp, DivergenceIsReported) {
    const Dataset ds = make_blobs(30, 3, 2, 0.5, 3);
    EXPECT_THROW(train_mlp({2, 16, 3}, Layer::relu(), ds, 60, 1e6, 5), TrainingDiverged);
}
