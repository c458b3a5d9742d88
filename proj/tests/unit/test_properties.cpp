#include <gtest/gtest.h>

#include "sgn/verify/acceptance.hpp"

TEST(PropertySuite, CleanBuildPasses) {
  for (const auto& r : sgn::run_property_suite(false)) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
}

TEST(PropertySuite, InjectedFaultIsNamed) {
  bool found = false;
  for (const auto& r : sgn::run_property_suite(true)) {
    if (r.name.find("faulty_relu") != std::string::npos) {
      found = true;
      EXPECT_FALSE(r.passed);
    } else {
      EXPECT_TRUE(r.passed) << r.name;
    }
  }
  EXPECT_TRUE(found);
}
