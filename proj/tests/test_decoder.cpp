#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ruleproof/decoder.hpp"

using namespace ruleproof;

namespace {

// Layout F1, R1, R2, NAF with F1, R1, R2 selected.
Potentials three_node(double f1r1, double f1r2, double r1r2, double r2r1) {
  Potentials p;
  p.layout = {1, 2};
  p.node_prob = {0.9, 0.9, 0.9, 0.1};
  p.edge_prob.assign(4, std::vector<double>(4, 0.0));
  p.edge_prob[0][1] = f1r1;
  p.edge_prob[0][2] = f1r2;
  p.edge_prob[1][2] = r1r2;
  p.edge_prob[2][1] = r2r1;
  return p;
}

ProofGraph edges(std::initializer_list<std::pair<const char*, const char*>> es) {
  ProofGraph g;
  for (const auto& [a, b] : es) g.add_edge(ProofNode::parse(a), ProofNode::parse(b));
  return g;
}

std::vector<IndexPair> index_edges(const NodeLayout& layout, const ProofGraph& g) {
  std::vector<IndexPair> out;
  for (const auto& [a, b] : g.edges) out.emplace_back(layout.index_of(a), layout.index_of(b));
  std::sort(out.begin(), out.end());
  return out;
}

using oracle::random_instance;
using oracle::RandomInstance;

}  // namespace

TEST(SelectNodes, ThresholdAndFallback) {
  EXPECT_EQ(select_nodes({0.9, 0.9, 0.9}), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(select_nodes({0.5, 0.49, 0.2}), (std::vector<int>{0}));
  EXPECT_EQ(select_nodes({0.1, 0.1, 0.1}), (std::vector<int>{0}));
  EXPECT_EQ(select_nodes({0.1, 0.3, 0.3}), (std::vector<int>{1}));
}

TEST(Decode, SingleNodeHasNoEdges) {
  Potentials p;
  p.layout = {1, 1};
  p.node_prob = {0.9, 0.1, 0.2};
  p.edge_prob = {{0, 0.9, 0}, {0, 0, 0}, {0, 0.9, 0}};
  DecodeResult r = decode_proof(p);
  EXPECT_EQ(r.proof, ProofGraph::single(ProofNode::fact(1)));
  EXPECT_TRUE(r.optimal);
  ASSERT_TRUE(r.certificate);
  EXPECT_EQ(r.certificate->value, 1.0);
}

TEST(Decode, ConnectedUnconstrainedOptimum) {
  Potentials p = three_node(0.9, 0.4, 0.9, 0.1);
  DecodeResult r = decode_proof(p);
  EXPECT_EQ(r.proof, edges({{"F1", "R1"}, {"R1", "R2"}}));
  EXPECT_NEAR(r.objective, 3.3, 1e-12);
  EXPECT_EQ(r.stats.repair_edges, 0u);
  auto oracle = oracle::brute_force_decode_full(p, {0, 1, 2}, true);
  EXPECT_NEAR(oracle.objective, 3.3, 1e-12);
}

TEST(Decode, RepairsDisconnectedOptimum) {
  Potentials p = three_node(0.9, 0.2, 0.15, 0.1);
  DecodeResult unrepaired = decode_proof(p, {false});
  EXPECT_EQ(unrepaired.proof.edges.size(), 1u);
  EXPECT_FALSE(is_connected_undirected(unrepaired.proof));
  DecodeResult r = decode_proof(p);
  EXPECT_EQ(r.proof, edges({{"F1", "R1"}, {"F1", "R2"}}));
  EXPECT_NEAR(r.objective, 2.85, 1e-12);
  EXPECT_EQ(r.stats.components, 2u);
  EXPECT_EQ(r.stats.repair_edges, 1u);
  auto oracle = oracle::brute_force_decode_full(p, {0, 1, 2}, true);
  EXPECT_NEAR(oracle.objective, 2.85, 1e-12);
}

TEST(Decode, InfeasibleNodeSetFallsBack) {
  Potentials p;
  p.layout = {2, 1};
  p.node_prob = {0.9, 0.9, 0.1, 0.1};
  p.edge_prob.assign(4, std::vector<double>(4, 0.3));
  EXPECT_THROW(decode_proof(p), ConnectivityInfeasible);
  DecodeResult r = decode_with_fallback(p);
  EXPECT_TRUE(r.connectivity_relaxed);
  EXPECT_TRUE(r.proof.edges.empty());
  EXPECT_EQ(r.proof.nodes.size(), 2u);
  EXPECT_FALSE(r.certificate);
}

TEST(Decode, InvalidPotentialsRejected) {
  Potentials p = three_node(0.9, 0.4, 0.9, 1.2);
  EXPECT_THROW(decode_proof(p), DataError);
  p = three_node(0.9, 0.4, 0.9, 0.1);
  p.node_prob.pop_back();
  EXPECT_THROW(decode_proof(p), DataError);
}

TEST(DecodeUnconstrained, IgnoresTyping) {
  Potentials p;
  p.layout = {2, 1};
  p.node_prob = {0.9, 0.9, 0.1, 0.1};
  p.edge_prob.assign(4, std::vector<double>(4, 0.0));
  p.edge_prob[0][1] = 0.9;
  DecodeResult r = decode_unconstrained(p);
  EXPECT_EQ(r.proof, edges({{"F1", "F2"}}));
  p.edge_prob[0][1] = 0.3;
  EXPECT_TRUE(decode_unconstrained(p).proof.edges.empty());
}

TEST(DecodeUnconstrained, MatchesConstrainedWhenConstraintsInactive) {
  Potentials p = three_node(0.9, 0.4, 0.9, 0.1);
  EXPECT_EQ(decode_unconstrained(p).proof, decode_proof(p).proof);
}

TEST(Decode, ReductionOracleAgreesWithFullEnumeration) {
  std::mt19937_64 rng(8);
  int compared = 0;
  for (int trial = 0; trial < 400; ++trial) {
    RandomInstance inst = random_instance(rng, 4, trial % 2 == 0);
    for (bool connectivity : {true, false}) {
      auto full = oracle::brute_force_decode_full(inst.p, inst.nodes, connectivity);
      auto reduced = oracle::brute_force_decode(inst.p, inst.nodes, connectivity);
      ASSERT_EQ(full.feasible, reduced.feasible);
      if (!full.feasible) continue;
      ASSERT_NEAR(full.objective, reduced.objective, 1e-9);
      ASSERT_EQ(full.edges, reduced.edges);
      ++compared;
    }
  }
  EXPECT_GT(compared, 500);
}

TEST(Decode, ExactAgainstExhaustiveEnumeration) {
  std::mt19937_64 rng(42);
  int disconnected = 0, infeasible = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    RandomInstance inst = random_instance(rng, 6, trial % 3 != 0);
    ASSERT_EQ(select_nodes(inst.p.node_prob), inst.nodes);
    auto oracle = oracle::brute_force_decode(inst.p, inst.nodes, true);
    if (!oracle.feasible) {
      EXPECT_THROW(decode_proof(inst.p), ConnectivityInfeasible);
      ++infeasible;
      continue;
    }
    DecodeResult r = decode_proof(inst.p);
    ASSERT_NEAR(r.objective, oracle.objective, 1e-9) << "trial " << trial;
    EXPECT_EQ(index_edges(inst.p.layout, r.proof), oracle.edges) << "trial " << trial;
    EXPECT_TRUE(validate_structure(r.proof).empty());
    disconnected += r.stats.components > 1;

    auto free = oracle::brute_force_decode(inst.p, inst.nodes, false);
    DecodeResult relaxed = decode_proof(inst.p, {false});
    ASSERT_NEAR(relaxed.objective, free.objective, 1e-9);
    EXPECT_EQ(index_edges(inst.p.layout, relaxed.proof), free.edges);
  }
  EXPECT_GT(disconnected, 100);
  EXPECT_GT(infeasible, 0);
}

TEST(FlowCertificate, VerifiedForConnectedOutputsAndRejectsTampering) {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    RandomInstance inst = random_instance(rng, 6, true);
    DecodeResult r;
    try {
      r = decode_proof(inst.p);
    } catch (const ConnectivityInfeasible&) {
      continue;
    }
    ASSERT_TRUE(r.certificate);
    IlpInstance ilp = IlpInstance::build(inst.p, inst.nodes);
    const auto es = index_edges(inst.p.layout, r.proof);
    ASSERT_TRUE(verify_flow_certificate(ilp, es, *r.certificate));
    EXPECT_DOUBLE_EQ(r.certificate->value, static_cast<double>(inst.nodes.size()));
    ++checked;
    if (!r.certificate->flow.empty()) {
      FlowCertificate broken = *r.certificate;
      broken.flow.begin()->second += 1.0;  // conservation fails
      EXPECT_FALSE(verify_flow_certificate(ilp, es, broken));
      // dropping the coupled edge breaks e(m,n) + e(n,m) >= f/|N|
      const IndexPair arc = r.certificate->flow.begin()->first;
      std::vector<IndexPair> fewer;
      for (const auto& e : es)
        if (e != arc && e != IndexPair{arc.second, arc.first}) fewer.push_back(e);
      EXPECT_FALSE(verify_flow_certificate(ilp, fewer, *r.certificate));
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(FlowCertificate, AbsentForDisconnectedEdges) {
  Potentials p = three_node(0.9, 0.2, 0.15, 0.1);
  IlpInstance ilp = IlpInstance::build(p, {0, 1, 2});
  EXPECT_FALSE(build_flow_certificate(ilp, {{0, 1}}));
  EXPECT_EQ(ilp.capacity(IlpInstance::kSource, 0), 3.0);
  EXPECT_EQ(ilp.capacity(IlpInstance::kSource, 1), 0.0);
  EXPECT_EQ(ilp.capacity(2, IlpInstance::kSink), 1.0);
  EXPECT_EQ(ilp.capacity(3, IlpInstance::kSink), 0.0);
  EXPECT_EQ(ilp.capacity(1, 2), 3.0);
}

TEST(Decode, DeterministicOutput) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    RandomInstance inst = random_instance(rng, 6, true);
    const auto a = dump_line(prediction_record("t", "Q1", true, decode_with_fallback(inst.p)));
    const auto b = dump_line(prediction_record("t", "Q1", true, decode_with_fallback(inst.p)));
    EXPECT_EQ(a, b);
  }
}

TEST(Decode, PredictionRecordFields) {
  Potentials p = three_node(0.9, 0.4, 0.9, 0.1);
  Json j = prediction_record("t7", "Q2", false, decode_proof(p));
  EXPECT_EQ(dump_line(j),
            R"({"theory_id":"t7","question_id":"Q2","answer":false,"nodes":["F1","R1","R2"],)"
            R"("edges":[["F1","R1"],["R1","R2"]],"objective":3.3,"connectivity_relaxed":false})");
}
