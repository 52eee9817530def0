#include <gtest/gtest.h>

#include <filesystem>

#include "optidesign/errors.hpp"
#include "optidesign/pool_io.hpp"
#include "oracles.hpp"

using namespace optidesign;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "optidesign_pool_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(PoolIo, LoadsFixture) {
  const Pool pool = load_pool(OPTIDESIGN_FIXTURES "/p1.json");
  ASSERT_EQ(pool.size(), 2u);
  EXPECT_DOUBLE_EQ(pool.experiment(1).M()(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(pool.experiment(2).M()(0, 0), 1.0);
}

TEST(PoolIo, RoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Pool pool = oracle::random_pool(seed);
    const fs::path path = scratch("rt_" + std::to_string(seed) + ".json");
    save_pool(pool, path);
    const Pool back = load_pool(path);
    EXPECT_EQ(pool_hash(back), pool_hash(pool));
    ASSERT_EQ(back.size(), pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      EXPECT_EQ(back.at(i).A(), pool.at(i).A());
      EXPECT_EQ(back.at(i).R().matrix(), pool.at(i).R().matrix());
    }
    EXPECT_EQ(back.prior_cov().matrix(), pool.prior_cov().matrix());
    EXPECT_EQ(back.target(), pool.target());
  }
}

TEST(PoolIo, HashDistinguishesPools) {
  EXPECT_NE(pool_hash(oracle::random_pool(1)), pool_hash(oracle::random_pool(2)));
  EXPECT_EQ(pool_hash(oracle::random_pool(1)).size(), 16u);
}

TEST(PoolIo, MalformedDocumentsRejected) {
  EXPECT_THROW(pool_from_json(json::parse(R"([1,2])")), ParseError);
  EXPECT_THROW(pool_from_json(json::parse(R"({"p":1,"prior_mean":[0],"prior_cov":[[1]],"target":[[1]]})")),
               ParseError);
  EXPECT_THROW(pool_from_json(json::parse(
                   R"({"p":1,"prior_mean":[0],"prior_cov":[[1]],"target":[[1]],"experiments":[{"id":1,"A":[[1,2]],"R":[[1]]}]})")),
               DimensionMismatch);
  EXPECT_THROW(pool_from_json(json::parse(
                   R"({"p":1,"prior_mean":[0],"prior_cov":[[1]],"target":[[1]],"experiments":[{"id":1,"A":[["x"]],"R":[[1]]}]})")),
               ParseError);
  const fs::path bad = scratch("bad.json");
  write_file_atomic(bad, "{ not json");
  EXPECT_THROW(load_pool(bad), ParseError);
}

TEST(PoolIo, DesignRoundTrip) {
  Design d;
  d.add(3, 2);
  d.add(1);
  const json j = design_to_json(d);
  EXPECT_EQ(j.dump(), R"([{"count":1,"id":1},{"count":2,"id":3}])");
  EXPECT_EQ(design_from_json(j), d);
}

TEST(PoolIo, AtomicWriteReplacesContent) {
  const fs::path path = scratch("atomic.txt");
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  EXPECT_EQ(read_file(path), "second");
  for (const auto& entry : fs::directory_iterator(path.parent_path())) {
    EXPECT_EQ(entry.path().filename().string().find(".tmp"), std::string::npos) << entry.path();
  }
}
