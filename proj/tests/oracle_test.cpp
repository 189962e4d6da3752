// SPDX-License-Identifier: MIT
#include "cqd/codec.hpp"
#include "cqd/errors.hpp"
#include "cqd/experiments.hpp"
#include "cqd/oracle.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace cqd {
namespace {

struct Fixture {
    Tensor3 target;
    Bytes query;
};

Fixture make_fixture(std::uint64_t key, const Shape3& shape = {4, 4, 4}) {
    RandomStream rng(key);
    Fixture f{random_tensor(shape, rng), {}};
    f.query = encode_core(random_tensor({2, 2, 2}, rng), 5, 11, 0.2);
    return f;
}

SimulatedOracle make_oracle(const Fixture& f, double sigma, MeanMap map = MeanMap::IdentityCompletion,
                            std::uint64_t seed = 17) {
    SimulatedOracle oracle({sigma, seed, map});
    oracle.register_task(5, f.target);
    return oracle;
}

TEST(OracleTest, ZeroNoiseReturnsMeanExactly) {
    const Fixture f = make_fixture(81);
    const SimulatedOracle oracle = make_oracle(f, 0.0);
    DrawCounter counter;
    const OracleResponse a = oracle_infer(oracle, f.query, counter);
    const OracleResponse b = oracle_infer(oracle, f.query, counter);
    EXPECT_EQ(a.payload, f.target);
    EXPECT_EQ(b.payload, f.target);
    EXPECT_EQ(counter.next, 2u);
    EXPECT_EQ(a.draws_used, 1u);
    EXPECT_EQ(a.query_checksum_echo, decode(f.query).checksum);
}

TEST(OracleTest, ResidualMeanMapSubtractsLiftedCore) {
    const Fixture f = make_fixture(82);
    const SimulatedOracle oracle = make_oracle(f, 0.0, MeanMap::Residual);
    const Query q = decode(f.query);
    Tensor3 expected = f.target;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k) expected(i, j, k) -= q.core(i, j, k);
    EXPECT_EQ(oracle.infer(f.query, 0).payload, expected);
}

TEST(OracleTest, LiftCorePlacesLeadingBlock) {
    const Tensor3 core({1, 2, 1}, {3.0, 4.0});
    const Tensor3 lifted = lift_core(core, {2, 3, 2});
    EXPECT_EQ(lifted(0, 0, 0), 3.0);
    EXPECT_EQ(lifted(0, 1, 0), 4.0);
    EXPECT_EQ(lifted.squared_norm(), 25.0);
    EXPECT_THROW(lift_core(core, {1, 1, 1}), ArgumentError);
}

TEST(OracleTest, NoiseIsPureFunctionOfDrawIndex) {
    const Fixture f = make_fixture(83);
    const SimulatedOracle oracle = make_oracle(f, 0.5);
    EXPECT_EQ(oracle.infer(f.query, 3).payload, oracle.infer(f.query, 3).payload);
    EXPECT_NE(oracle.infer(f.query, 3).payload, oracle.infer(f.query, 4).payload);
    const SimulatedOracle other = make_oracle(f, 0.5, MeanMap::IdentityCompletion, 18);
    EXPECT_NE(oracle.infer(f.query, 3).payload, other.infer(f.query, 3).payload);
}

TEST(OracleTest, NoiseMomentsMatchConfiguration) {
    const Fixture f = make_fixture(84);
    const double sigma = 0.3;
    const SimulatedOracle oracle = make_oracle(f, sigma);
    const int draws = 4000;
    const std::size_t d = f.target.size();
    double energy = 0.0;
    Tensor3 mean(f.target.shape());
    for (int i = 0; i < draws; ++i) {
        const Tensor3 xi = oracle.infer(f.query, static_cast<std::uint64_t>(i)).payload - f.target;
        energy += xi.squared_norm();
        mean += xi;
    }
    EXPECT_NEAR(energy / draws, sigma * sigma, 0.05 * sigma * sigma);
    mean *= 1.0 / draws;
    const double coord_se = sigma / std::sqrt(static_cast<double>(d)) / std::sqrt(static_cast<double>(draws));
    int outside = 0;
    for (double v : mean.data()) outside += std::abs(v) > 3.0 * coord_se;
    // At 3 standard errors about 0.3% of coordinates fall outside.
    EXPECT_LE(outside, 2);
}

TEST(OracleTest, UnknownTaskAndCorruptQuery) {
    const Fixture f = make_fixture(85);
    SimulatedOracle oracle({0.1, 0, MeanMap::IdentityCompletion});
    EXPECT_THROW(oracle.infer(f.query, 0), ProtocolError);
    oracle.register_task(5, f.target);
    Bytes bad = f.query;
    bad[25] ^= 1;
    EXPECT_THROW(oracle.infer(bad, 0), IntegrityError);
    EXPECT_THROW(SimulatedOracle({-1.0, 0, MeanMap::IdentityCompletion}), ArgumentError);
}

TEST(OracleTest, ResidualRanksBeyondAmbientRejected) {
    const Fixture f = make_fixture(86, {1, 4, 4});
    const SimulatedOracle oracle = make_oracle(f, 0.0, MeanMap::Residual);
    EXPECT_THROW(oracle.infer(f.query, 0), ProtocolError);
}

TEST(EnsembleTest, SizeOneEqualsSingleDraw) {
    const Fixture f = make_fixture(87);
    const SimulatedOracle oracle = make_oracle(f, 0.4);
    DrawCounter a;
    DrawCounter b;
    a.next = b.next = 9;
    EXPECT_EQ(ensemble_infer(oracle, f.query, 1, Aggregator::Mean, a).payload,
              oracle_infer(oracle, f.query, b).payload);
    EXPECT_EQ(a.next, b.next);
    EXPECT_THROW(ensemble_infer(oracle, f.query, 0, Aggregator::Mean, a), ArgumentError);
}

TEST(EnsembleTest, ZeroNoiseAnySize) {
    const Fixture f = make_fixture(88);
    const SimulatedOracle oracle = make_oracle(f, 0.0);
    DrawCounter c;
    for (std::uint32_t m : {1u, 3u, 8u}) {
        const OracleResponse r = ensemble_infer(oracle, f.query, m, Aggregator::Median, c);
        EXPECT_EQ(r.payload, f.target);
        EXPECT_EQ(r.draws_used, m);
    }
    EXPECT_EQ(c.next, 12u);
}

TEST(EnsembleTest, MeanVarianceShrinksAsOneOverM) {
    const Fixture f = make_fixture(89);
    const double sigma = 0.5;
    const SimulatedOracle oracle = make_oracle(f, sigma);
    DrawCounter c;
    const int trials = 500;
    const std::uint32_t m = 25;
    double energy = 0.0;
    for (int t = 0; t < trials; ++t)
        energy += (ensemble_infer(oracle, f.query, m, Aggregator::Mean, c).payload - f.target).squared_norm();
    const double expected = sigma * sigma / m;
    EXPECT_NEAR(energy / trials, expected, 0.1 * expected);
}

TEST(AggregateTest, MeanAndMedianByHand) {
    const std::vector<Tensor3> xs{Tensor3({1, 1, 2}, {1.0, 10.0}), Tensor3({1, 1, 2}, {2.0, -4.0}),
                                  Tensor3({1, 1, 2}, {9.0, 0.0})};
    EXPECT_EQ(aggregate(xs, Aggregator::Mean), Tensor3({1, 1, 2}, {4.0, 2.0}));
    EXPECT_EQ(aggregate(xs, Aggregator::Median), Tensor3({1, 1, 2}, {2.0, 0.0}));
    const std::vector<Tensor3> even{xs[0], xs[1]};
    EXPECT_EQ(aggregate(even, Aggregator::Median), Tensor3({1, 1, 2}, {1.5, 3.0}));
}

TEST(AggregateTest, Errors) {
    EXPECT_THROW(aggregate(std::vector<Tensor3>{}, Aggregator::Mean), ArgumentError);
    const std::vector<Tensor3> mixed{Tensor3({1, 1, 2}), Tensor3({2, 1, 1})};
    EXPECT_THROW(aggregate(mixed, Aggregator::Median), ArgumentError);
}

}  // namespace
}  // namespace cqd
