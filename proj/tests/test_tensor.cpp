#include "cinekit/tensor.hpp"

#include <gtest/gtest.h>

using ck::Tensor;

TEST(Tensor, ConstructsWithFillAndShape) {
    Tensor t({2, 3, 4}, 1.5);
    EXPECT_EQ(t.rank(), 3);
    EXPECT_EQ(t.size(), 24);
    EXPECT_EQ(t.dim(0), 2);
    EXPECT_EQ(t.dim(2), 4);
    for (std::int64_t i = 0; i < t.size(); ++i) EXPECT_EQ(t[i], 1.5);
}

TEST(Tensor, RowMajorIndexing) {
    Tensor t({2, 3});
    t.at({1, 2}) = 7.0;
    EXPECT_EQ(t[5], 7.0);
    t.at({0, 1}) = 3.0;
    EXPECT_EQ(t[1], 3.0);
}

TEST(Tensor, FromDataValidatesLength) {
    EXPECT_NO_THROW(Tensor::from_data({2, 2}, {1, 2, 3, 4}));
    EXPECT_THROW(Tensor::from_data({2, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST(Tensor, RejectsNonPositiveExtents) {
    EXPECT_THROW(Tensor({2, 0}), std::invalid_argument);
    EXPECT_THROW(Tensor({-1}), std::invalid_argument);
}

TEST(Tensor, CheckedAccessRejectsBadIndices) {
    Tensor t({2, 3});
    EXPECT_THROW(t.at({2, 0}), std::invalid_argument);
    EXPECT_THROW(t.at({0, 3}), std::invalid_argument);
    EXPECT_THROW(t.at({0}), std::invalid_argument);
}

TEST(Tensor, SameShape) {
    EXPECT_TRUE(Tensor({2, 3}).same_shape(Tensor({2, 3})));
    EXPECT_FALSE(Tensor({2, 3}).same_shape(Tensor({3, 2})));
}
