#include <gtest/gtest.h>

#include "mreg/problems.hpp"

namespace mreg {
namespace {

// Dense singular values of the full-size matrices; each takes tens of seconds.
TEST(FullScale, PhillipsConditionNumber)
{
    const auto p = build_problem(ProblemName::phillips);
    ASSERT_EQ(p.A.rows(), 3000);
    ASSERT_EQ(p.A.cols(), 2501);
    EXPECT_GE(condition_estimate(p), 1e7);
}

TEST(FullScale, GreenConditionNumber)
{
    const auto p = build_problem(ProblemName::green);
    ASSERT_EQ(p.A.rows(), 4000);
    ASSERT_EQ(p.A.cols(), 3501);
    EXPECT_GE(condition_estimate(p), 1e5);
}

}  // namespace
}  // namespace mreg
