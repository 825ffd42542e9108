#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gravpano/errors.hpp"
#include "gravpano/solvers.hpp"
#include "gravpano/synthbench.hpp"
#include "support.hpp"

using namespace gravpano;
using gravpano::testing::contains_truth;
using gravpano::testing::random_instance;
using gravpano::testing::Truth;

namespace {

const SolverId kGeneral[] = {SolverId::kH1f, SolverId::kH2f1f2, SolverId::kH2lambda,
                             SolverId::kH3l1l2};
const SolverId kAligned[] = {SolverId::kH1fAligned, SolverId::kH2f1f2Aligned,
                             SolverId::kH2lambdaAligned, SolverId::kH3l1l2Aligned};

Scene fixed_scene(double f1, double f2, double l1, double l2, bool aligned, std::uint64_t seed) {
  SceneConfig cfg;
  cfg.n_points = 10;
  cfg.n_holdout = 0;
  cfg.f1_gt = f1;
  cfg.f2_gt = f2;
  cfg.lambda1_gt = l1;
  cfg.lambda2_gt = l2;
  cfg.aligned = aligned;
  return generate_scene(cfg, seed);
}

Truth truth_of(const Scene& s) {
  return {s.truth.s, s.truth.f1, s.truth.f2, s.truth.lambda1, s.truth.lambda2};
}

Correspondence pixel_pair(double u1, double v1, double u2, double v2) {
  return {{u1, v1, 1000.0}, {u2, v2, 1000.0}, {}, {}};
}

}  // namespace

TEST(Registry, NamesAndSizes) {
  for (SolverId id : kGeneral) {
    EXPECT_EQ(parse_solver(solver_name(id)), id);
    EXPECT_EQ(parse_solver(solver_name(aligned_variant(id))), aligned_variant(id));
    EXPECT_EQ(sample_size(id), sample_size(aligned_variant(id)));
    EXPECT_TRUE(is_aligned(aligned_variant(id)));
    EXPECT_FALSE(is_aligned(id));
  }
  EXPECT_EQ(sample_size(SolverId::kH1f), 1);
  EXPECT_EQ(sample_size(SolverId::kH2f1f2), 2);
  EXPECT_EQ(sample_size(SolverId::kH2lambda), 2);
  EXPECT_EQ(sample_size(SolverId::kH3l1l2), 3);
  EXPECT_EQ(sample_size(SolverId::kH4dlt), 4);
  EXPECT_EQ(max_raw_solutions(SolverId::kH1f), 4);
  EXPECT_EQ(max_raw_solutions(SolverId::kH2f1f2), 4);
  EXPECT_EQ(max_raw_solutions(SolverId::kH2lambda), 8);
  EXPECT_EQ(max_candidates(SolverId::kH2lambda), 6);
  EXPECT_EQ(max_raw_solutions(SolverId::kH3l1l2), 6);
  for (SolverId id : kAligned) EXPECT_EQ(max_raw_solutions(id), 2);
  EXPECT_FALSE(parse_solver("h5").has_value());
  EXPECT_THROW(aligned_variant(SolverId::kH4dlt), InvalidInput);
}

TEST(H1f, FixedFocalRecovered) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scene s = fixed_scene(1000, 1000, 0, 0, false, seed);
    const auto set = solve_h1f(s.correspondences[0]);
    EXPECT_TRUE(contains_truth(set, truth_of(s))) << seed;
  }
}

TEST(H1f, IdentityMotionIsDegenerate) {
  const Correspondence c = pixel_pair(120, -80, 120, -80);
  EXPECT_THROW(solve_h1f(c), DegenerateConfiguration);
}

TEST(H2f1f2, DifferentFocalsRecovered) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scene s = fixed_scene(800, 1200, 0, 0, false, seed);
    const auto set = solve_h2f1f2(s.correspondences[0], s.correspondences[1]);
    EXPECT_TRUE(contains_truth(set, truth_of(s))) << seed;
  }
}

TEST(H2f1f2, DuplicatedCorrespondenceIsDegenerate) {
  const Scene s = fixed_scene(800, 1200, 0, 0, false, 3);
  EXPECT_THROW(solve_h2f1f2(s.correspondences[0], s.correspondences[0]), DegenerateConfiguration);
}

TEST(H2lambda, DistortedSceneRecovered) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scene s = fixed_scene(1000, 1000, -0.4, -0.4, false, seed);
    const auto set = solve_h2lambda(s.correspondences[0], s.correspondences[1]);
    EXPECT_TRUE(contains_truth(set, truth_of(s))) << seed;
  }
}

TEST(H2lambda, CenterPointsAreRejected) {
  const Correspondence c = pixel_pair(0, 0, 0, 0);
  EXPECT_THROW(solve_h2lambda(c, c), InvalidInput);
}

TEST(H3l1l2, AllFiveParametersRecovered) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scene s = fixed_scene(900, 1100, -0.3, -0.5, false, seed);
    const auto& cs = s.correspondences;
    const auto set = solve_h3l1l2(cs[0], cs[1], cs[2]);
    EXPECT_TRUE(contains_truth(set, truth_of(s))) << seed;
  }
}

TEST(H3l1l2, DuplicatedPointsAreDegenerate) {
  const Scene s = fixed_scene(900, 1100, -0.3, -0.5, false, 4);
  const auto& c = s.correspondences[0];
  EXPECT_THROW(solve_h3l1l2(c, c, c), DegenerateConfiguration);
}

TEST(Solvers, RandomInstancesExactWithinBounds) {
  std::mt19937_64 rng(21);
  for (SolverId id : kGeneral) {
    for (SolverId v : {id, aligned_variant(id)}) {
      int exact = 0;
      const int n = 1000;
      for (int i = 0; i < n; ++i) {
        const auto inst = random_instance(v, rng);
        SolverCandidateSet set;
        try {
          set = solve(v, inst.scene.correspondences);
        } catch (const Error& e) {
          ADD_FAILURE() << solver_name(v) << " instance " << i << ": " << e.what();
          continue;
        }
        EXPECT_EQ(set.solver_id, v);
        EXPECT_LE(set.raw_count, max_raw_solutions(v));
        EXPECT_LE(static_cast<int>(set.candidates.size()), max_candidates(v));
        ASSERT_EQ(set.candidates.size(), set.residuals.size());
        for (double r : set.residuals) EXPECT_LT(r, 1e-7) << solver_name(v);
        if (contains_truth(set, inst.truth)) ++exact;
      }
      EXPECT_GE(exact, n - 3) << solver_name(v);
    }
  }
}

TEST(Solvers, CandidatesSatisfyCheirality) {
  std::mt19937_64 rng(22);
  for (SolverId id : kGeneral) {
    for (int i = 0; i < 100; ++i) {
      const auto inst = random_instance(id, rng);
      const auto set = solve(id, inst.scene.correspondences);
      for (const auto& m : set.candidates) {
        for (int k = 0; k < sample_size(id); ++k) {
          EXPECT_TRUE(positive_depth(m, inst.scene.correspondences[k]));
        }
      }
    }
  }
}

TEST(Solvers, NotEnoughCorrespondences) {
  const Scene s = fixed_scene(1000, 1000, 0, 0, false, 1);
  const std::vector<Correspondence> one(s.correspondences.begin(), s.correspondences.begin() + 1);
  EXPECT_THROW(solve(SolverId::kH2f1f2, one), InvalidInput);
  EXPECT_THROW(solve(SolverId::kH4dlt, one), InvalidInput);
}

TEST(Aligned, ExactRecovery) {
  const Scene s = fixed_scene(900, 1100, -0.3, -0.5, true, 9);
  const Scene e = fixed_scene(1000, 1000, -0.4, -0.4, true, 9);
  const Scene z = fixed_scene(800, 1200, 0, 0, true, 9);
  const Scene z1 = fixed_scene(1000, 1000, 0, 0, true, 9);
  EXPECT_TRUE(contains_truth(solve_aligned(SolverId::kH1f, z1.correspondences), truth_of(z1)));
  EXPECT_TRUE(contains_truth(solve_aligned(SolverId::kH2f1f2, z.correspondences), truth_of(z)));
  EXPECT_TRUE(contains_truth(solve_aligned(SolverId::kH2lambda, e.correspondences), truth_of(e)));
  EXPECT_TRUE(contains_truth(solve_aligned(SolverId::kH3l1l2, s.correspondences), truth_of(s)));
}

TEST(Aligned, ZeroYawIsARootOfTheQuadratic) {
  SceneConfig cfg;
  cfg.n_points = 5;
  cfg.n_holdout = 0;
  cfg.aligned = true;
  cfg.yaw_min_deg = cfg.yaw_max_deg = 0.0;
  cfg.f1_gt = 800;
  cfg.f2_gt = 1200;
  const Scene s = generate_scene(cfg, 3);
  EXPECT_EQ(s.truth.s, 0.0);
  const UniPoly q = elimination::aligned_quadratic(SolverId::kH2f1f2Aligned, s.correspondences);
  EXPECT_LT(std::abs(q(0.0)), 1e-12 * q.norm_inf());
}

TEST(Aligned, NonIdentityPriorsRejected) {
  const Scene s = fixed_scene(1000, 1000, 0, 0, false, 2);
  EXPECT_THROW(solve_aligned(SolverId::kH1f, s.correspondences), InvalidInput);
}

TEST(Aligned, DuplicatedCorrespondenceIsDegenerate) {
  const Scene s = fixed_scene(800, 1200, 0, 0, true, 5);
  const std::vector<Correspondence> dup = {s.correspondences[0], s.correspondences[0]};
  EXPECT_THROW(solve_aligned(SolverId::kH2f1f2, dup), DegenerateConfiguration);
}

TEST(Aligned, AtMostTwoCandidates) {
  std::mt19937_64 rng(23);
  for (SolverId id : kAligned) {
    for (int i = 0; i < 1000; ++i) {
      const auto set = solve(id, random_instance(id, rng).scene.correspondences);
      EXPECT_LE(set.raw_count, 2);
      EXPECT_LE(static_cast<int>(set.candidates.size()), 2);
    }
  }
}

TEST(Elimination, PolynomialDegrees) {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 100; ++i) {
    auto cs = random_instance(SolverId::kH1f, rng).scene.correspondences;
    EXPECT_EQ(elimination::h1f_sextic(cs[0]).degree(), 6);
    cs = random_instance(SolverId::kH2f1f2, rng).scene.correspondences;
    EXPECT_EQ(polymat_det(elimination::h2f1f2_matrix(cs[0], cs[1])).degree(), 4);
    cs = random_instance(SolverId::kH2lambda, rng).scene.correspondences;
    EXPECT_EQ(deflate_one_plus_s2(elimination::h2lambda_raw(cs[0], cs[1])).degree(), 8);
    cs = random_instance(SolverId::kH3l1l2, rng).scene.correspondences;
    const PolyMat C = elimination::h3l1l2_matrix(cs[0], cs[1], cs[2]);
    EXPECT_LE(C.max_entry_degree(), 2);
    EXPECT_EQ(polymat_det(C).degree(), 6);
  }
}

namespace {

// Random homography close to a rotation-like map and four generic points.
Mat3 random_homography(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-0.2, 0.2);
  Mat3 H = Mat3::Identity();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) H(r, c) += U(rng);
  }
  H(0, 2) *= 500.0;
  H(1, 2) *= 500.0;
  H(2, 0) /= 2000.0;
  H(2, 1) /= 2000.0;
  return H / H(2, 2);
}

std::vector<Correspondence> mapped_points(const Mat3& H, std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(-800.0, 800.0);
  std::vector<Correspondence> cs;
  while (static_cast<int>(cs.size()) < n) {
    const Vec3 p(U(rng), U(rng), 1.0);
    const Vec3 q = H * p;
    if (q.z() <= 0.0) continue;
    cs.push_back(pixel_pair(p.x(), p.y(), q.x() / q.z(), q.y() / q.z()));
  }
  return cs;
}

}  // namespace

TEST(H4dlt, RecoversKnownHomography) {
  std::mt19937_64 rng(25);
  for (int i = 0; i < 100; ++i) {
    const Mat3 H = random_homography(rng);
    const auto cs = mapped_points(H, rng, 4);
    const Mat3 E = solve_h4dlt(cs);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(E(r, c), H(r, c), 1e-9 * std::max(1.0, std::abs(H(r, c)))) << i;
      }
    }
  }
}

TEST(H4dlt, IdentityMapping) {
  const std::vector<Correspondence> cs = {pixel_pair(-300, -200, -300, -200),
                                          pixel_pair(400, -100, 400, -100),
                                          pixel_pair(250, 350, 250, 350),
                                          pixel_pair(-150, 300, -150, 300)};
  EXPECT_LT((solve_h4dlt(cs) - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(H4dlt, OverdeterminedMatchesMinimal) {
  std::mt19937_64 rng(26);
  const Mat3 H = random_homography(rng);
  const auto cs = mapped_points(H, rng, 20);
  const Mat3 all = solve_h4dlt(cs);
  const Mat3 four = solve_h4dlt(std::span(cs).first(4));
  EXPECT_LT((all - four).cwiseAbs().maxCoeff(), 1e-9 * H.cwiseAbs().maxCoeff());
}

TEST(H4dlt, DegenerateInputs) {
  const auto c = pixel_pair(10, 20, 30, 40);
  EXPECT_THROW(solve_h4dlt(std::vector<Correspondence>{c, c, c, c}), DegenerateConfiguration);
  const std::vector<Correspondence> collinear = {pixel_pair(0, 0, 0, 0), pixel_pair(1, 1, 1, 1),
                                                 pixel_pair(2, 2, 2, 2), pixel_pair(3, 3, 3, 3)};
  EXPECT_THROW(solve_h4dlt(collinear), DegenerateConfiguration);
  EXPECT_THROW(solve_h4dlt(std::vector<Correspondence>{c, c, c}), InvalidInput);
}

TEST(H4dlt, ModelFromRotationHomography) {
  const Scene s = fixed_scene(900, 1300, 0, 0, false, 6);
  const auto set = solve(SolverId::kH4dlt, s.correspondences);
  ASSERT_EQ(set.candidates.size(), 1u);
  const StitchModel& m = set.candidates[0];
  EXPECT_FALSE(m.parametric);
  EXPECT_NEAR(m.f1, 900, 1e-6 * 900);
  EXPECT_NEAR(m.f2, 1300, 1e-6 * 1300);
  EXPECT_NEAR(m.theta, s.truth.theta, 1e-6);
}
