// Copyright 2026 The hetgl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "dense_oracle.hpp"
#include "gradcheck.hpp"
#include "hetgl/errors.hpp"
#include "hetgl/hgnn/hgnn.hpp"

namespace hetgl {
namespace {

using testing::DenseLayer;

Tensor random_table(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  return testing::random_tensor(n, d, rng);
}

hgnn::LayerVars bind(Tape& tape, const DenseLayer& l) {
  hgnn::LayerVars v{tape.constant(l.w_social), tape.constant(l.b_social), {}, {},
                    tape.constant(l.w_similar), tape.constant(l.b_similar)};
  for (std::size_t k = 0; k < l.w_rating.size(); ++k) {
    v.w_rating.push_back(tape.constant(l.w_rating[k]));
    v.b_rating.push_back(tape.constant(l.b_rating[k]));
  }
  return v;
}

std::vector<std::size_t> sample_ids(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  return all;
}

struct OracleCase {
  std::size_t layers;
  bool refine;
};

void PrintTo(const OracleCase& c, std::ostream* os) {
  *os << "T=" << c.layers << (c.refine ? " refined" : " initial");
}

class HgnnOracle : public ::testing::TestWithParam<OracleCase> {};

TEST_P(HgnnOracle, BatchedMatchesDenseWholeGraph) {
  const auto [layers, refine] = GetParam();
  const std::size_t n = 14, m = 11, levels = 3, d = 4;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    const HeteroGraph g = testing::random_hetero_graph(n, m, levels, rng);
    const Tensor p = random_table(n, d, rng), q = random_table(m, d, rng);
    std::vector<DenseLayer> ws;
    for (std::size_t l = 0; l < layers; ++l) ws.push_back(testing::random_dense_layer(d, levels, rng));

    const auto tu = sample_ids(n, 4, rng), ti = sample_ids(m, 3, rng);
    hgnn::RefinedRows ru, ri;
    if (refine) {
      // Arbitrary replacement rows, including an empty one.
      for (std::size_t i = 0; i < tu.size(); ++i) {
        ru.targets.push_back(tu[i]);
        std::vector<std::size_t> nb;
        if (i > 0)
          for (std::size_t c : sample_ids(n, 3, rng))
            if (c != tu[i]) nb.push_back(c);
        std::sort(nb.begin(), nb.end());
        ru.neighbors.push_back(nb);
      }
      for (std::size_t v : ti) {
        ri.targets.push_back(v);
        std::vector<std::size_t> nb;
        for (std::size_t c : sample_ids(m, 2, rng))
          if (c != v) nb.push_back(c);
        std::sort(nb.begin(), nb.end());
        ri.neighbors.push_back(nb);
      }
    }
    const auto* pu = refine ? &ru : nullptr;
    const auto* pi = refine ? &ri : nullptr;

    const auto dg = testing::dense_graph(g, pu, pi);
    Tensor up = p, vq = q;
    for (const auto& w : ws) std::tie(up, vq) = testing::dense_layer(dg, up, vq, w);

    const auto sg = hgnn::build_batch_subgraph(g, pu, pi, tu, ti, layers);
    Tape tape;
    std::vector<hgnn::LayerVars> vars;
    for (const auto& w : ws) vars.push_back(bind(tape, w));
    std::mt19937_64 drng(0);
    const auto out = hgnn::hgnn_forward(sg, tape.constant(p), tape.constant(q), vars, 0.4,
                                        drng, /*training=*/false);
    const Tensor& bu = out.user_layers.back().value();
    const Tensor& bi = out.item_layers.back().value();
    ASSERT_EQ(bu.rows(), tu.size());
    ASSERT_EQ(bi.rows(), ti.size());
    for (std::size_t i = 0; i < tu.size(); ++i)
      for (std::size_t c = 0; c < d; ++c) EXPECT_NEAR(bu(i, c), up(tu[i], c), 1e-10);
    for (std::size_t i = 0; i < ti.size(); ++i)
      for (std::size_t c = 0; c < d; ++c) EXPECT_NEAR(bi(i, c), vq(ti[i], c), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Layers, HgnnOracle,
                         ::testing::Values(OracleCase{1, false}, OracleCase{2, false},
                                           OracleCase{3, false}, OracleCase{1, true},
                                           OracleCase{2, true}),
                         [](const ::testing::TestParamInfo<OracleCase>& info) {
                           return "T" + std::to_string(info.param.layers) +
                                  (info.param.refine ? "Refined" : "Initial");
                         });

// Hop h+1 = hop h plus every neighbor under any edge type, by set closure.
TEST(Subgraph, HopsMatchBfsClosure) {
  std::mt19937_64 rng(7);
  const HeteroGraph g = testing::random_hetero_graph(20, 15, 2, rng, 0.1, 0.1, 0.1);
  const std::vector<std::size_t> tu{3, 0, 11}, ti{7, 2};
  const auto sg = hgnn::build_batch_subgraph(g, nullptr, nullptr, tu, ti, 3);
  std::set<std::size_t> us(tu.begin(), tu.end()), is(ti.begin(), ti.end());
  ASSERT_EQ(sg.user_hops.size(), 4u);
  for (std::size_t h = 1; h <= 3; ++h) {
    std::set<std::size_t> nu = us, ni = is;
    for (std::size_t u : us) {
      for (std::size_t x : g.social(u)) nu.insert(x);
      for (std::size_t k = 1; k <= 2; ++k)
        for (std::size_t v : g.items_rated(u, k)) ni.insert(v);
    }
    for (std::size_t v : is) {
      for (std::size_t x : g.similar(v)) ni.insert(x);
      for (std::size_t k = 1; k <= 2; ++k)
        for (std::size_t u : g.raters(v, k)) nu.insert(u);
    }
    us = nu;
    is = ni;
    EXPECT_EQ(std::set<std::size_t>(sg.user_hops[h].begin(), sg.user_hops[h].end()), us);
    EXPECT_EQ(std::set<std::size_t>(sg.item_hops[h].begin(), sg.item_hops[h].end()), is);
    EXPECT_EQ(sg.user_hops[h].size(), us.size());
    // Predecessor nodes come first, in the same order.
    EXPECT_TRUE(std::equal(sg.user_hops[h - 1].begin(), sg.user_hops[h - 1].end(),
                           sg.user_hops[h].begin()));
    EXPECT_TRUE(std::equal(sg.item_hops[h - 1].begin(), sg.item_hops[h - 1].end(),
                           sg.item_hops[h].begin()));
  }
  EXPECT_EQ(sg.user_hops[0], tu);
  EXPECT_EQ(sg.item_hops[0], ti);
}

TEST(Subgraph, DuplicateTargetsCollapse) {
  HeteroGraph g(3, 2, 1);
  const std::vector<std::size_t> tu{1, 1, 2}, ti{0};
  const auto sg = hgnn::build_batch_subgraph(g, nullptr, nullptr, tu, ti, 1);
  EXPECT_EQ(sg.user_hops[0], (std::vector<std::size_t>{1, 2}));
}

TEST(Subgraph, RejectsOutOfRange) {
  HeteroGraph g(3, 2, 1);
  const std::vector<std::size_t> bad{3}, ok{0};
  EXPECT_THROW(hgnn::build_batch_subgraph(g, nullptr, nullptr, bad, ok, 1), BoundsError);
  hgnn::RefinedRows r{{0}, {{5}}};
  EXPECT_THROW(hgnn::build_batch_subgraph(g, &r, nullptr, ok, ok, 1), BoundsError);
  hgnn::RefinedRows mismatched{{0, 1}, {{2}}};
  EXPECT_THROW(hgnn::build_batch_subgraph(g, &mismatched, nullptr, ok, ok, 1), ContractError);
}

TEST(Hgnn, IsolatedUserKeepsOnlyBiases) {
  // User 0 has no edges at all; every aggregation contributes its bias only.
  HeteroGraph g(2, 1, 2);
  g.add_edge(NodeId::user(1), NodeId::item(0), EdgeType::rating(1));
  std::mt19937_64 rng(3);
  DenseLayer w = testing::random_dense_layer(3, 2, rng);
  const std::vector<std::size_t> tu{0}, ti{0};
  const auto sg = hgnn::build_batch_subgraph(g, nullptr, nullptr, tu, ti, 1);
  Tape tape;
  std::mt19937_64 drng(0);
  const auto out = hgnn::hgnn_forward(sg, tape.constant(random_table(2, 3, rng)),
                                      tape.constant(random_table(1, 3, rng)), {bind(tape, w)},
                                      0.0, drng, false);
  const Tensor& u = out.user_layers[1].value();
  for (std::size_t c = 0; c < 3; ++c) {
    const double expect = std::max(0.0, (w.b_social[c] + w.b_rating[0][c] + w.b_rating[1][c]) / 3.0);
    EXPECT_NEAR(u(0, c), expect, 1e-14);
  }
}

TEST(Hgnn, ZeroWeightsGiveReluOfMeanBias) {
  std::mt19937_64 rng(4);
  const HeteroGraph g = testing::random_hetero_graph(6, 5, 2, rng);
  DenseLayer w = testing::random_dense_layer(3, 2, rng);
  for (Tensor* t : {&w.w_social, &w.w_similar, &w.w_rating[0], &w.w_rating[1]}) t->fill(0.0);
  const std::vector<std::size_t> tu{0, 1, 2}, ti{4};
  const auto sg = hgnn::build_batch_subgraph(g, nullptr, nullptr, tu, ti, 1);
  Tape tape;
  std::mt19937_64 drng(0);
  const auto out = hgnn::hgnn_forward(sg, tape.constant(random_table(6, 3, rng)),
                                      tape.constant(random_table(5, 3, rng)), {bind(tape, w)},
                                      0.0, drng, false);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t c = 0; c < 3; ++c)
      EXPECT_NEAR(out.user_layers[1].value()(i, c),
                  std::max(0.0, (w.b_social[c] + w.b_rating[0][c] + w.b_rating[1][c]) / 3.0),
                  1e-14);
  for (std::size_t c = 0; c < 3; ++c)
    EXPECT_NEAR(out.item_layers[1].value()(0, c),
                std::max(0.0, (w.b_similar[c] + w.b_rating[0][c] + w.b_rating[1][c]) / 3.0),
                1e-14);
}

TEST(Hgnn, SymmetricUsersGetEqualEmbeddings) {
  // Users 0 and 1 are friends with identical ratings and identical inputs.
  HeteroGraph g(2, 2, 1);
  g.add_edge(NodeId::user(0), NodeId::user(1), EdgeType::social());
  for (std::size_t u = 0; u < 2; ++u)
    for (std::size_t v = 0; v < 2; ++v)
      g.add_edge(NodeId::user(u), NodeId::item(v), EdgeType::rating(1));
  std::mt19937_64 rng(5);
  Tensor p(2, 3);
  const Tensor row = random_table(1, 3, rng);
  for (std::size_t c = 0; c < 3; ++c) p(0, c) = p(1, c) = row(0, c);
  const Tensor q = random_table(2, 3, rng);
  const DenseLayer w = testing::random_dense_layer(3, 1, rng);
  const std::vector<std::size_t> tu{0, 1}, ti{0};
  const auto sg = hgnn::build_batch_subgraph(g, nullptr, nullptr, tu, ti, 2);
  Tape tape;
  std::mt19937_64 drng(0);
  const auto out = hgnn::hgnn_forward(sg, tape.constant(p), tape.constant(q),
                                      {bind(tape, w), bind(tape, w)}, 0.0, drng, false);
  const Tensor& u = out.user_layers[2].value();
  for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(u(0, c), u(1, c));
}

TEST(Hgnn, LayerCountMismatchThrows) {
  HeteroGraph g(2, 2, 1);
  const std::vector<std::size_t> t{0};
  const auto sg = hgnn::build_batch_subgraph(g, nullptr, nullptr, t, t, 2);
  std::mt19937_64 rng(1);
  const DenseLayer w = testing::random_dense_layer(2, 1, rng);
  Tape tape;
  EXPECT_THROW(hgnn::hgnn_forward(sg, tape.constant(Tensor(2, 2)), tape.constant(Tensor(2, 2)),
                                  {bind(tape, w)}, 0.0, rng, false),
               ContractError);
  DenseLayer wrong = testing::random_dense_layer(2, 2, rng);
  const auto sg1 = hgnn::build_batch_subgraph(g, nullptr, nullptr, t, t, 1);
  EXPECT_THROW(hgnn::hgnn_forward(sg1, tape.constant(Tensor(2, 2)), tape.constant(Tensor(2, 2)),
                                  {bind(tape, wrong)}, 0.0, rng, false),
               ContractError);
}

TEST(Hgnn, TrainingDropoutOnlyWhenTraining) {
  std::mt19937_64 rng(9);
  const HeteroGraph g = testing::random_hetero_graph(8, 6, 2, rng);
  const DenseLayer w = testing::random_dense_layer(4, 2, rng);
  const Tensor p = random_table(8, 4, rng), q = random_table(6, 4, rng);
  const std::vector<std::size_t> tu{0, 1, 2, 3}, ti{0, 1};
  const auto sg = hgnn::build_batch_subgraph(g, nullptr, nullptr, tu, ti, 1);
  auto run = [&](bool training, std::uint64_t s) {
    Tape tape;
    std::mt19937_64 drng(s);
    return hgnn::hgnn_forward(sg, tape.constant(p), tape.constant(q), {bind(tape, w)}, 0.5, drng,
                              training)
        .user_layers[1]
        .value();
  };
  EXPECT_EQ(run(false, 1), run(false, 2));
  EXPECT_NE(run(true, 1), run(false, 1));
  EXPECT_EQ(run(true, 3), run(true, 3));
}

TEST(Hgnn, TwoLayerGradientCheck) {
  std::mt19937_64 rng(11);
  const std::size_t n = 7, m = 6, levels = 2, d = 3;
  const HeteroGraph g = testing::random_hetero_graph(n, m, levels, rng, 0.35, 0.35, 0.35);
  const std::vector<std::size_t> tu{0, 3, 5}, ti{1, 4};
  const auto sg = hgnn::build_batch_subgraph(g, nullptr, nullptr, tu, ti, 2);
  const Tensor target_u = random_table(tu.size(), d, rng);
  const Tensor target_i = random_table(ti.size(), d, rng);

  std::vector<Tensor> inputs{random_table(n, d, rng), random_table(m, d, rng)};
  for (std::size_t l = 0; l < 2; ++l) {
    const DenseLayer w = testing::random_dense_layer(d, levels, rng);
    for (const Tensor* t : {&w.w_social, &w.b_social, &w.w_similar, &w.b_similar, &w.w_rating[0],
                            &w.b_rating[0], &w.w_rating[1], &w.b_rating[1]})
      inputs.push_back(*t);
  }
  auto loss = [&](Tape& tape, const std::vector<Var>& v) {
    std::vector<hgnn::LayerVars> vars;
    for (std::size_t l = 0; l < 2; ++l) {
      const std::size_t o = 2 + 8 * l;
      vars.push_back({v[o], v[o + 1], {v[o + 4], v[o + 6]}, {v[o + 5], v[o + 7]}, v[o + 2],
                      v[o + 3]});
    }
    std::mt19937_64 drng(0);
    const auto out = hgnn::hgnn_forward(sg, v[0], v[1], vars, 0.0, drng, false);
    Var du = ops::sub(out.user_layers[2], tape.constant(target_u));
    Var di = ops::sub(out.item_layers[2], tape.constant(target_i));
    return ops::add(ops::sum(ops::square(du)), ops::sum(ops::square(di)));
  };
  EXPECT_LT(testing::max_grad_error(inputs, loss), 1e-6);
}

}  // namespace
}  // namespace hetgl
