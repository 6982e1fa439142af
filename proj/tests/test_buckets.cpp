#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>

#include "paclab/bench.hpp"
#include "paclab/buckets.hpp"

using namespace paclab;

namespace {

BucketParams tiny_params(uint32_t branching, BigRational low, BigRational high) {
  BucketParams p;
  p.branching = branching;
  p.low_frac = low;
  p.high_frac = high;
  return p;
}

std::vector<IndexVector> members_of(const Bucket& b, EnumerationBudget budget = {}) {
  std::vector<IndexVector> out;
  checked_vector_count(b.m, b.n, budget);
  IndexVector iv;
  iv.m = b.m;
  for_each_index_vector(b.m, b.n, [&](const std::vector<uint32_t>& entries) {
    iv.entries = entries;
    if (b.contains(iv)) out.push_back(iv);
  });
  return out;
}

}  // namespace

TEST_CASE("leaf bucket membership by enumeration") {
  // m=3, n=2, list (1), target 2: vectors with two distinct values, 1 present
  auto params = tiny_params(2, BigRational(1, 3), BigRational(2, 3));
  Bucket b = build_bucket(2, {1}, {}, {}, params, 3, 2);
  auto members = members_of(b);
  REQUIRE(members.size() == 4);
  CHECK(members[0].entries == std::vector<uint32_t>{1, 2});
  CHECK(members[1].entries == std::vector<uint32_t>{1, 3});
  CHECK(members[2].entries == std::vector<uint32_t>{2, 1});
  CHECK(members[3].entries == std::vector<uint32_t>{3, 1});
}

TEST_CASE("full-scale bucket structure at one level") {
  // C=20, one level: 19 leaves, each requiring 19 indices (18 kept groups +
  // the head) and forbidding exactly 1.
  std::vector<uint32_t> list(20);
  for (uint32_t i = 0; i < 20; ++i) list[i] = i + 1;
  Bucket b = build_bucket(50, list, {}, {}, BucketParams{}, 2000, 1000);
  REQUIRE(b.leaves.size() == 19);
  for (const auto& leaf : b.leaves) {
    CHECK(leaf.required.size() == 19);
    CHECK(leaf.forbidden.size() == 1);
    CHECK(std::binary_search(leaf.required.begin(), leaf.required.end(), 1u));  // head index
  }
}

TEST_CASE("bucket below the forced distinct count is empty") {
  auto params = tiny_params(2, BigRational(1, 3), BigRational(2, 3));
  // |U u {head}| = 2 forces |D(I)| >= 2; target 1 is unreachable
  Bucket b = build_bucket(1, {1}, {2}, {}, params, 4, 3);
  CHECK(members_of(b).empty());
  CHECK(!bucket_witness(b).has_value());
}

TEST_CASE("constructive witness at full scale") {
  std::vector<uint32_t> list(400);  // 20^2, the list length for m = 40000
  for (uint32_t i = 0; i < 400; ++i) list[i] = i + 1;
  Bucket b = build_bucket(5000, list, {}, {}, BucketParams{}, 40000, 6000);
  auto witness = bucket_witness(b);
  REQUIRE(witness.has_value());
  CHECK(b.contains(*witness));
}

TEST_CASE("build_bucket validates its list") {
  auto params = tiny_params(2, BigRational(1, 2), BigRational(1, 2));
  CHECK_THROWS_AS(build_bucket(1, {1, 2, 3}, {}, {}, params, 4, 2), InvalidList);   // not a power of 2
  CHECK_THROWS_AS(build_bucket(1, {1, 1}, {}, {}, params, 4, 2), InvalidList);      // repeated entry
  CHECK_THROWS_AS(build_bucket(1, {1, 9}, {}, {}, params, 4, 2), InvalidList);      // outside [1, m]
  CHECK_THROWS_AS(build_bucket(1, {1}, {2}, {2}, params, 4, 2), std::invalid_argument);
}

TEST_CASE("structural checks count leaves and verify coverage") {
  std::vector<uint32_t> list20(20), list400(400);
  for (uint32_t i = 0; i < 20; ++i) list20[i] = i + 1;
  for (uint32_t i = 0; i < 400; ++i) list400[i] = i + 1;

  StructureReport one = structural_checks(list20, BucketParams{});
  CHECK(one.leaf_count == 19);
  CHECK(one.ok());

  StructureReport two = structural_checks(list400, BucketParams{});
  CHECK(two.leaf_count == 361);
  CHECK(two.ok());

  StructureReport base = structural_checks({7}, BucketParams{});
  CHECK(base.leaf_count == 1);
  CHECK(base.ok());
}

TEST_CASE("each child owns an equal share of the leaves") {
  // C=3, two levels: 4 leaves, each top-level group forbidden in exactly half
  auto params = tiny_params(3, BigRational(9, 12), BigRational(9, 12));
  std::vector<uint32_t> list{1, 2, 3, 4, 5, 6, 7, 8, 9};
  Bucket b = build_bucket(9, list, {}, {}, params, 12, 12);
  REQUIRE(b.leaves.size() == 4);
  auto forbidden_covers = [&](const BucketLeaf& leaf, uint32_t from, uint32_t to) {
    for (uint32_t e = from; e <= to; ++e)
      if (!std::binary_search(leaf.forbidden.begin(), leaf.forbidden.end(), e)) return false;
    return true;
  };
  size_t child1 = 0, child2 = 0;
  for (const auto& leaf : b.leaves) {
    if (forbidden_covers(leaf, 4, 6)) ++child1;  // group {4,5,6} excluded
    if (forbidden_covers(leaf, 7, 9)) ++child2;  // group {7,8,9} excluded
  }
  CHECK(child1 == 2);
  CHECK(child2 == 2);
}

TEST_CASE("family assembly on the regime boundary") {
  BucketParams defaults;
  BucketFamily f2 = assemble_family(100, 2, defaults);
  CHECK(f2.lo == 1);
  CHECK(f2.hi == 90);
  CHECK(f2.list_len == 1);  // largest power of 20 at most 1
  CHECK(f2.outlier_mass == BigRational(0));  // |D| in {1,2} always inside [1, 90]
  CHECK(f2.total_mass() == BigRational(1));

  BucketFamily f100 = assemble_family(100, 100, defaults);
  CHECK(f100.outlier_mass <= BigRational(1, 6));
  CHECK(f100.outlier_mass > BigRational(0));
  CHECK(f100.total_mass() == BigRational(1));
}

TEST_CASE("leftover mass stays under one sixth in the regime") {
  BucketParams defaults;
  CHECK(outlier_mass(100, 2, defaults) == BigRational(0));
  CHECK(outlier_mass(100, 100, defaults) <= BigRational(1, 6));
  CHECK(outlier_mass(200, 4, defaults) <= BigRational(1, 6));  // n = 0.02 m
}

TEST_CASE("two-stage uniformity holds on every tiny fixture") {
  EnumerationBudget budget;
  for (const auto& fx : tiny_family_fixtures()) {
    BucketFamily fam = assemble_family(fx.m, fx.n, params_for(fx));
    UniformityResult res = check_two_stage_uniform(fam, budget);
    INFO(fx.name);
    CHECK(res.uniform);
  }
}

TEST_CASE("single-vector domain is trivially uniform") {
  auto params = tiny_params(2, BigRational(1, 1), BigRational(1, 1));
  BucketFamily fam = assemble_family(1, 3, params);
  CHECK(check_two_stage_uniform(fam, EnumerationBudget{}).uniform);
}

TEST_CASE("corrupted masses are caught with a counterexample") {
  auto fx = tiny_family_fixtures()[4];  // m9n3C3l3 has nonzero leftover mass
  BucketFamily fam = assemble_family(fx.m, fx.n, params_for(fx));
  REQUIRE(fam.outlier_mass > BigRational(0));
  fam.outlier_mass += BigRational(1, 100);
  UniformityResult res = check_two_stage_uniform(fam, EnumerationBudget{});
  CHECK_FALSE(res.uniform);
  CHECK(res.counterexample.has_value());
  CHECK(res.got != res.expected);
}

TEST_CASE("bucket symmetry at tiny scale") {
  // fixed distinct target: every vector with that |D| lies in equally many
  // buckets and all buckets have the same cardinality
  auto fx = tiny_family_fixtures()[3];  // m=4 n=2 C=2 list_len=2
  BucketFamily fam = assemble_family(fx.m, fx.n, params_for(fx));
  REQUIRE(fam.list_len == 2);
  uint32_t d = 2;
  std::map<std::vector<uint32_t>, int> membership;
  std::vector<size_t> sizes;
  detail::for_each_ordered_list(fam.m, fam.list_len, [&](const std::vector<uint32_t>& list) {
    Bucket b = build_bucket(d, list, {}, {}, fam.params, fam.m, fam.n);
    auto members = members_of(b);
    sizes.push_back(members.size());
    for (const auto& iv : members) ++membership[iv.entries];
  });
  REQUIRE(!sizes.empty());
  for (size_t s : sizes) CHECK(s == sizes.front());
  REQUIRE(!membership.empty());
  int first = membership.begin()->second;
  CHECK(first > 0);
  for (const auto& [entries, count] : membership) CHECK(count == first);
  // every vector with |D| = 2 is covered
  CHECK(membership.size() == 12);
}

TEST_CASE("bucket voter on explicit and enumerated buckets") {
  auto cls = ConceptClass::threshold_ray(TiePolicy::midpoint());
  TrainingSet s;
  s.examples = {{Point::from_scalar(0.1), Label::negative},
                {Point::from_scalar(0.5), Label::positive},
                {Point::from_scalar(0.9), Label::positive}};

  SECTION("single-vector bucket reduces to one ERM call") {
    Bucket b = Bucket::from_vectors(3, 2, {IndexVector{{2, 3}, 3}});
    VotingClassifier v = bucket_voter(s, b, cls, EnumerationBudget{});
    CHECK(v.size() == 1);
  }
  SECTION("the all-vectors bucket reproduces the full enumeration") {
    std::vector<IndexVector> all;
    IndexVector iv;
    iv.m = 3;
    for_each_index_vector(3, 2, [&](const std::vector<uint32_t>& e) {
      iv.entries = e;
      all.push_back(iv);
    });
    Bucket b = Bucket::from_vectors(3, 2, std::move(all));
    VotingClassifier v = bucket_voter(s, b, cls, EnumerationBudget{});
    VotingClassifier g = all_bootstraps_voter(s, 2, cls, EnumerationBudget{});
    REQUIRE(v.size() == g.size());
    for (size_t i = 0; i < v.size(); ++i)
      CHECK(v.members()[i].threshold() == g.members()[i].threshold());
  }
  SECTION("leaf bucket voter holds its four members in lexicographic order") {
    auto params = tiny_params(2, BigRational(1, 3), BigRational(2, 3));
    Bucket b = build_bucket(2, {1}, {}, {}, params, 3, 2);
    VotingClassifier v = bucket_voter(s, b, cls, EnumerationBudget{});
    CHECK(v.size() == 4);
  }
  SECTION("empty bucket is an error") {
    Bucket b = Bucket::from_vectors(3, 2, {});
    CHECK_THROWS_AS(bucket_voter(s, b, cls, EnumerationBudget{}), EmptyBucket);
  }
}

TEST_CASE("margin transfer: vacuous when the voter is confident everywhere") {
  auto fx = tiny_family_fixtures()[0];
  BucketFamily fam = assemble_family(fx.m, fx.n, params_for(fx));
  // first-consistent ERM on an all-negative class picks the target itself
  TransferFixture tf = make_transfer_fixture(fx.m);
  ConceptClass benign = ConceptClass::finite_explicit(
      [&] {
        std::vector<std::vector<int8_t>> tables;
        tables.emplace_back(fx.m, int8_t{-1});
        return tables;
      }(),
      1, TiePolicy::first_consistent());
  MarginTransferReport rep =
      margin_transfer_check(tf.sample, fam, tf.dist, tf.target, benign, EnumerationBudget{});
  CHECK(rep.precondition_ok);
  CHECK(rep.checked_points == 0);
  CHECK(rep.violations.empty());
}

TEST_CASE("margin transfer holds exactly on the adversarial fixtures") {
  for (const auto& fx : tiny_family_fixtures()) {
    if (!fx.transfer_eligible) continue;
    BucketFamily fam = assemble_family(fx.m, fx.n, params_for(fx));
    TransferFixture tf = make_transfer_fixture(fx.m);
    MarginTransferReport rep =
        margin_transfer_check(tf.sample, fam, tf.dist, tf.target, tf.cls, EnumerationBudget{});
    INFO(fx.name);
    CHECK(rep.precondition_ok);
    CHECK(rep.checked_points >= 1);  // the heavy atom has low margin by construction
    CHECK(rep.violations.empty());
  }
}

TEST_CASE("margin transfer rejects families with heavy leftover mass") {
  auto fx = tiny_family_fixtures()[0];
  BucketFamily fam = assemble_family(fx.m, fx.n, params_for(fx));
  fam.outlier_mass = BigRational(1, 5);  // beyond 1/6
  TransferFixture tf = make_transfer_fixture(fx.m);
  MarginTransferReport rep =
      margin_transfer_check(tf.sample, fam, tf.dist, tf.target, tf.cls, EnumerationBudget{});
  CHECK_FALSE(rep.precondition_ok);
}
