#include <cmath>

#include "doctest.h"
#include "fawcon/fusion_conv.hpp"
#include "fawcon/oracle.hpp"
#include "support.hpp"

using namespace fawcon;

namespace {

struct Cloud {
  std::vector<Vec3> positions;
  SceneStore store;
  GlobalIndex index;
  OctreeForest forest;
};

Cloud random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed, double extent = 0.4) {
  Cloud c{testing::uniform_cloud(n, seed, 0.0, extent),
          SceneStore(SceneConfig{.input_dim = dim, .class_count = 2, .best_dim = 4}), GlobalIndex{},
          OctreeForest{}};
  std::mt19937_64 rng(seed + 1);
  for (const auto& p : c.positions) {
    const PointId id = c.store.allocate_point(p, testing::random_feature(dim, rng));
    c.index.insert(id, p);
    c.forest.rebuild_affected(id, c.index);
  }
  return c;
}

double max_rel_error(const std::vector<double>& got, const std::vector<double>& want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double scale = std::max(1.0, std::abs(want[i]));
    worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
  }
  return worst;
}

}  // namespace

TEST_SUITE("fusion_conv") {
  TEST_CASE("weight function parsing") {
    CHECK(WeightFunction::parse("const").describe() == "const");
    CHECK(std::holds_alternative<WeightFunction::Gaussian>(WeightFunction::parse("gauss:0.05").kind()));
    CHECK_THROWS_AS(WeightFunction::parse("gauss:"), DomainError);
    CHECK_THROWS_AS(WeightFunction::parse("gauss:-1"), DomainError);
    CHECK_THROWS_AS(WeightFunction::parse("cubic"), DomainError);
    CHECK_THROWS(WeightFunction::parse("mlp:/nonexistent/w.fawp"));
  }

  TEST_CASE("constant and gaussian weights") {
    std::vector<double> w(3);
    WeightFunction::constant().evaluate({0.1, 0.2, 0.3}, w);
    CHECK(w == std::vector<double>{1, 1, 1});
    WeightFunction::gaussian(0.05).evaluate({0.0, 0.0, 0.0}, w);
    CHECK(w[0] == 1.0);
    WeightFunction::gaussian(0.05).evaluate({0.05, 0.0, 0.0}, w);
    CHECK(w[2] == doctest::Approx(std::exp(-0.5)));
  }

  TEST_CASE("isolated point convolves to its own feature") {
    auto c = random_cloud(1, 5, 3);
    const auto out = fpc(point_id(0), 2, WeightFunction::constant(), c.store, c.forest);
    const auto& f = c.store.fused(point_id(0));
    REQUIRE(out.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(out[i] == doctest::Approx(f[i]));
  }

  TEST_CASE("equal features sum to ring size times the feature") {
    SceneStore store(SceneConfig{.input_dim = 2, .class_count = 2, .best_dim = 4});
    GlobalIndex index;
    OctreeForest forest;
    const std::vector<Vec3> pts{{0, 0, 0}, {0.03, 0, 0}, {-0.03, 0, 0}, {0, 0.03, 0}, {0, -0.03, 0.01}};
    for (const auto& p : pts) {
      const PointId id = store.allocate_point(p, std::vector<float>{1.5f, -2.0f});
      index.insert(id, p);
      forest.rebuild_affected(id, index);
    }
    const auto ring = forest.ring(point_id(0), 1);
    const double k = static_cast<double>(ring.members.size());
    const auto out = fpc(point_id(0), 1, WeightFunction::constant(), store, forest);
    CHECK(out[0] == doctest::Approx(1.5 * k));
    CHECK(out[1] == doctest::Approx(-2.0 * k));
  }

  TEST_CASE("fpc matches the naive sum for every kernel") {
    auto c = random_cloud(500, 6, 17);
    const std::vector<std::size_t> sizes{3, 16, 6};
    const Mlp net = Mlp::random(sizes, 99);
    const std::vector<std::pair<WeightFunction, oracle::NaiveKernel>> kernels{
        {WeightFunction::constant(), {oracle::NaiveKernel::Kind::Constant, 1.0, {}}},
        {WeightFunction::gaussian(0.05), {oracle::NaiveKernel::Kind::Gaussian, 0.05, {}}},
        {WeightFunction::learned(net), {oracle::NaiveKernel::Kind::Learned, 1.0, net.layers()}}};
    for (const auto& [weight, kernel] : kernels) {
      for (std::size_t i = 0; i < 500; i += 13) {
        const PointId p = point_id(i);
        const auto members = c.forest.ring(p, 2).members;
        std::vector<Vec3> pos;
        std::vector<Feature> feat;
        for (PointId m : members) {
          pos.push_back(c.store.position(m));
          feat.push_back(c.store.fused(m));
        }
        const auto want = oracle::naive_convolution(c.store.position(p), pos, feat, kernel);
        const auto got = fpc(p, 2, weight, c.store, c.forest);
        REQUIRE(max_rel_error(got, want) < 1e-6);
      }
    }
  }

  TEST_CASE("softmax distribution") {
    const std::vector<double> flat{0.0, 0.0, 0.0, 0.0};
    const auto u = softmax_distribution(flat);
    for (double p : u.probabilities) CHECK(p == doctest::Approx(0.25));
    CHECK(u.uncertainty == doctest::Approx(1.0));
    CHECK(u.label == 0);

    const std::vector<double> spike{0.0, 1000.0, 0.0};
    const auto s = softmax_distribution(spike);
    CHECK(s.label == 1);
    CHECK(s.uncertainty == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(s.probabilities[1] == doctest::Approx(1.0));

    const std::vector<double> single{3.0};
    CHECK(softmax_distribution(single).uncertainty == 0.0);
  }

  TEST_CASE("classification head") {
    const auto head = ClassificationHead::random(6, 3, 42);
    CHECK(head.input_dim() == 6);
    CHECK(head.class_count() == 3);
    const std::vector<double> x{0.1, -0.2, 0.3, 0.0, 1.0, -1.0};
    const auto a = classify(x, head);
    const auto b = classify(x, head);
    CHECK(a.feature.size() == 128);
    CHECK(a.feature == b.feature);
    CHECK(a.distribution.probabilities == b.distribution.probabilities);
    double sum = 0.0;
    for (double p : a.distribution.probabilities) sum += p;
    CHECK(sum == doctest::Approx(1.0));
    const std::vector<double> wrong(5, 0.0);
    CHECK_THROWS_AS(classify(wrong, head), DimensionError);
  }

  TEST_CASE("zero classifier gives maximal uncertainty") {
    const auto head = ClassificationHead::random(4, 5, 1);
    Mlp net = head.as_network();
    auto layers = net.layers();
    std::fill(layers.back().weights.begin(), layers.back().weights.end(), 0.0f);
    std::fill(layers.back().bias.begin(), layers.back().bias.end(), 0.0f);
    const auto flat = ClassificationHead::from_network(Mlp(layers));
    const std::vector<double> x{1, 2, 3, 4};
    const auto out = classify(x, flat);
    CHECK(out.distribution.uncertainty == doctest::Approx(1.0));
    for (double p : out.distribution.probabilities) CHECK(p == doctest::Approx(0.2));
  }

  TEST_CASE("head parameter files round trip") {
    testing::TempDir dir("head");
    const auto head = ClassificationHead::random(7, 3, 5, 32);
    head.save(dir / "h.fawp");
    const auto loaded = ClassificationHead::load(dir / "h.fawp");
    const std::vector<double> x{1, 0, 0, 0.5, 0.25, 0, 1};
    CHECK(classify(x, head).feature == classify(x, loaded).feature);
    CHECK(loaded.as_network().sizes() == std::vector<std::size_t>{7, 32, 32, 128, 3});
  }

  TEST_CASE("malformed parameter files") {
    testing::TempDir dir("bad");
    {
      std::ofstream(dir / "a.fawp") << "FAWP1 3,4\n" << "abc";
    }
    CHECK_THROWS_AS(read_parameter_file(dir / "a.fawp"), ParseError);
    {
      std::ofstream(dir / "b.fawp") << "NOPE 3,4\n";
    }
    CHECK_THROWS_AS(read_parameter_file(dir / "b.fawp"), ParseError);
    CHECK_THROWS_AS(read_parameter_file(dir / "missing.fawp"), IoError);
    write_parameter_file(dir / "c.fawp", Mlp::random(std::vector<std::size_t>{3, 2}, 1));
    {
      std::ofstream(dir / "c.fawp", std::ios::app | std::ios::binary) << 'x';
    }
    CHECK_THROWS_AS(read_parameter_file(dir / "c.fawp"), ParseError);
  }

  TEST_CASE("frame fusion") {
    SceneStore store(SceneConfig{.input_dim = 1, .class_count = 2, .best_dim = 2});
    const PointId p = store.allocate_point({0, 0, 0}, std::vector<float>{0});
    const std::vector<double> first{3, 1};
    CHECK(frame_fuse(p, first, store) == first);
    store.record_best(p, std::vector<float>{0, 5}, 0.4);
    CHECK(frame_fuse(p, first, store) == std::vector<double>{3, 5});
    const std::vector<double> wrong{1, 2, 3};
    CHECK_THROWS_AS(frame_fuse(p, wrong, store), DimensionError);
  }

  TEST_CASE("fused feature dominates current and best") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SceneStore store(SceneConfig{.input_dim = 1, .class_count = 2, .best_dim = 8});
    const PointId p = store.allocate_point({0, 0, 0}, std::vector<float>{0});
    for (int step = 0; step < 50; ++step) {
      std::vector<double> current(8);
      for (auto& v : current) v = u(rng) * 4.0 - 2.0;
      const auto fused = frame_fuse(p, current, store);
      for (std::size_t i = 0; i < 8; ++i) {
        REQUIRE(fused[i] >= current[i]);
        if (store.at(p).best_feature) REQUIRE(fused[i] >= (*store.at(p).best_feature)[i]);
      }
      const auto f = testing::random_feature(8, rng);
      store.record_best(p, f, u(rng));
    }
  }
}
