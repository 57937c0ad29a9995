#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "bcpinn/net.hpp"

using namespace bcpinn;

TEST_CASE("parameter count matches the dimension formula") {
  const auto p = xavier_init({2, 200, 200, 200, 200, 1}, 7);
  CHECK(p.parameter_count() == 121401);

  // independent count straight off the stored matrices
  std::int64_t direct = 0;
  for (int l = 0; l < p.layer_count(); ++l)
    direct += p.weights[l].size() + p.biases[l].size();
  CHECK(direct == p.parameter_count());
}

TEST_CASE("xavier biases are zero and identical seeds reproduce bitwise") {
  const auto a = xavier_init({2, 1, 1}, 42);
  for (const auto& b : a.biases) CHECK(b.isZero(0.0));

  const auto b = xavier_init({2, 33, 17, 1}, 9001);
  const auto c = xavier_init({2, 33, 17, 1}, 9001);
  CHECK(b.to_flat() == c.to_flat());
  const auto d = xavier_init({2, 33, 17, 1}, 9002);
  CHECK(b.to_flat() != d.to_flat());
}

TEST_CASE("xavier first-layer sample variance tracks 2/(fan_in+fan_out)") {
  double sum = 0.0, sum_sq = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 128; ++seed) {
    const auto p = xavier_init({2, 64, 1}, seed);
    for (Eigen::Index i = 0; i < p.weights[0].size(); ++i) {
      const double w = p.weights[0].data()[i];
      sum += w;
      sum_sq += w * w;
      ++count;
    }
  }
  const double mean = sum / count;
  const double variance = sum_sq / count - mean * mean;
  const double expected = 2.0 / 66.0;
  CHECK(variance == doctest::Approx(expected).epsilon(0.20));
}

TEST_CASE("xavier rejects degenerate layer dims") {
  CHECK_THROWS_AS(xavier_init({2, 1}, 0), std::invalid_argument);
  CHECK_THROWS_AS(xavier_init({2, 0, 1}, 0), std::invalid_argument);
  CHECK_THROWS_AS(xavier_init({}, 0), std::invalid_argument);
}

TEST_CASE("min-max normalization endpoints and scale factors") {
  const DomainBox box(-1.0, 1.0, 0.0, 1.0);
  CHECK(normalize(-1.0, 0.0, box) == std::pair{0.0, 0.0});
  CHECK(normalize(1.0, 1.0, box) == std::pair{1.0, 1.0});
  CHECK(normalize(0.0, 0.5, box).first == doctest::Approx(0.5));
  CHECK(box.x_scale() == doctest::Approx(0.5));
  CHECK(box.t_scale() == doctest::Approx(1.0));
  // outside points map affinely, no clamping
  CHECK(normalize(3.0, 2.0, box) == std::pair{2.0, 2.0});
  CHECK_THROWS_AS(DomainBox(1.0, -1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("forward matches hand-evaluated single-unit nets") {
  MlpParameters p;
  p.layer_dims = {2, 1, 1};
  p.weights = {Eigen::MatrixXd{{1.0, 0.0}}, Eigen::MatrixXd{{1.0}}};
  p.biases = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};

  CHECK(forward(p, 0.0, 0.0)[0] == doctest::Approx(0.0));
  CHECK(forward(p, 1.0, 0.0)[0] == doctest::Approx(0.761594155955765).epsilon(1e-12));

  // zero weights: output equals the output bias everywhere
  p.weights[0].setZero();
  p.weights[1].setZero();
  p.biases[1][0] = 3.25;
  CHECK(forward(p, 0.3, 0.9)[0] == 3.25);
  CHECK(forward(p, -2.0, 5.0)[0] == 3.25);
}

TEST_CASE("checkpoint round-trips bitwise and rejects corruption") {
  namespace fs = std::filesystem;
  const auto p = xavier_init({2, 17, 9, 2}, 77);
  const std::string path = (fs::temp_directory_path() / "bcpinn_ckpt_test.bin").string();
  write_checkpoint(p, path);
  const auto q = read_checkpoint(path);
  CHECK(p.layer_dims == q.layer_dims);
  CHECK(p.to_flat() == q.to_flat());

  // truncation
  fs::resize_file(path, fs::file_size(path) / 2);
  CHECK_THROWS(read_checkpoint(path));

  // bad magic
  {
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    std::fputs("XXXX", f);
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(read_checkpoint(path),
                       doctest::Contains("bad magic"), std::runtime_error);
  fs::remove(path);
}

TEST_CASE("flat round trip preserves parameters") {
  auto p = xavier_init({2, 5, 4, 1}, 3);
  const Eigen::VectorXd theta = p.to_flat();
  auto q = xavier_init({2, 5, 4, 1}, 99);
  q.set_from_flat(theta);
  CHECK(q.to_flat() == theta);
  CHECK_THROWS_AS(q.set_from_flat(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}
