#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "rigour/core/files.hpp"
#include "rigour/embed.hpp"
#include "support/local_server.hpp"
#include "support/oracles.hpp"

using namespace rigour;
using namespace rigour::embed;
namespace fs = std::filesystem;

namespace {

MockEmbeddingProvider onehot(std::size_t dim = 64) {
  return MockEmbeddingProvider({.dim = dim, .scheme = TokenScheme::OneHot});
}

std::vector<double> as_vector(const EmbeddingVector& v) { return {v.values().begin(), v.values().end()}; }

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("rigour-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

http::RetryPolicy fast_retry(int retries = 3) {
  http::RetryPolicy r;
  r.max_retries = retries;
  r.initial_backoff = std::chrono::milliseconds(1);
  r.timeout = std::chrono::seconds(5);
  return r;
}

}  // namespace

TEST(Pooling, QueryOfTwoOneHotsPlusOffset) {
  auto e = onehot();
  const auto v = embed_query("instr", "a b", e);
  auto expected = e.token_vector("a");
  const auto b = e.token_vector("b");
  const auto off = e.offset_vector();
  for (std::size_t k = 0; k < expected.size(); ++k) expected[k] = (expected[k] + b[k]) / 2 + off[k];
  EXPECT_EQ(as_vector(v), expected);
  EXPECT_EQ(v.provenance().pooling, Pooling::QueryTokenMean);
  EXPECT_EQ(v.provenance().instruction, "instr");
}

TEST(Pooling, SingletonQuery) {
  auto e = onehot();
  auto expected = e.token_vector("a");
  expected.back() += e.offset_vector().back();
  EXPECT_EQ(as_vector(embed_query("instr", "a", e)), expected);
}

TEST(Pooling, DocumentWeightedByOccurrence) {
  auto e = onehot();
  auto expected = e.token_vector("a");
  const auto b = e.token_vector("b");
  for (std::size_t k = 0; k < expected.size(); ++k) expected[k] = (2 * expected[k] + b[k]) / 3;
  const auto v = embed_document("a a b", e);
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(v[k], expected[k], 1e-15);
  EXPECT_EQ(v.provenance().pooling, Pooling::DocumentMean);
  EXPECT_FALSE(v.provenance().instruction);
}

TEST(Pooling, RandomQueriesMatchTokenLoop) {
  MockEmbeddingProvider e({.dim = 48, .seed = 3});
  const auto tv = [&](const std::string& t) { return e.token_vector(t); };
  const auto off = e.offset_vector();
  Rng rng(23);
  const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta", "iota"};
  for (int i = 0; i < 100; ++i) {
    std::string q;
    const auto n = 1 + rng.below(12);
    for (std::size_t k = 0; k < n; ++k) q += (k ? " " : "") + vocab[rng.below(vocab.size())];
    EXPECT_EQ(as_vector(embed_query("Find it:", q, e)), oracle::token_mean(text::words(q), tv, &off)) << q;
    EXPECT_EQ(as_vector(embed_document(q, e)), oracle::token_mean(text::words(q), tv)) << q;
  }
}

TEST(Pooling, DocumentModeNeverCarriesInstruction) {
  MockEmbeddingProvider e;
  embed_document("some text here", e);
  embed_query("instr", "query words", e);
  std::vector<std::string> texts = {"one doc", "two docs"};
  embed_documents(texts, e);
  for (const auto& c : e.calls()) {
    if (c.mode == EmbeddingMode::Document) {
      EXPECT_FALSE(c.instruction);
    }
  }
  const auto bad = EmbeddingRequest{"t", std::string("i"), EmbeddingMode::Document};
  EXPECT_THROW(e.embed(std::span(&bad, 1)), std::invalid_argument);
}

TEST(Pooling, ConcatenationFallbackRecorded) {
  MockEmbeddingProvider e({.supports_instruction = false});
  const auto v = embed_query("Instr.", "query", e);
  EXPECT_EQ(v.provenance().pooling, Pooling::ConcatenationFallback);
  const auto calls = e.calls();
  ASSERT_EQ(calls.size(), 1u);
  EXPECT_EQ(calls[0].text, "Instr.\nquery");
  EXPECT_FALSE(calls[0].instruction);
}

TEST(Pooling, EmptyInputRejected) {
  MockEmbeddingProvider e;
  EXPECT_THROW(embed_document("  ,, ", e), std::invalid_argument);
  EXPECT_THROW(embed_query("instr", "", e), std::invalid_argument);
}

TEST(Pooling, ChunkedMeanEqualsGlobalMean) {
  MockEmbeddingProvider e({.dim = 32, .max_tokens = 7});
  const auto tv = [&](const std::string& t) { return e.token_vector(t); };
  const std::string text =
      "Alpha beta gamma delta. Epsilon zeta eta theta iota kappa lambda mu nu xi omicron. Pi rho. "
      "Sigma tau upsilon phi chi psi omega alpha beta. Short one.";
  const auto v = embed_document(text, e);
  EXPECT_EQ(v.provenance().pooling, Pooling::ChunkedDocumentMean);
  const auto expected = oracle::token_mean(text::words(text), tv);
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(v[k], expected[k], 1e-12);
  for (const auto& c : e.calls()) EXPECT_LE(e.count_tokens(c.text), 7u);
  EXPECT_GT(e.call_count(), 1u);
}

TEST(Cosine, Examples) {
  const EmbeddingVector a({1, 2, 2}), b({2, 1, 2});
  EXPECT_DOUBLE_EQ(cosine_similarity(a, a), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(EmbeddingVector({1, 0}), EmbeddingVector({0, 1})), 0.0);
  EXPECT_NEAR(cosine_similarity(a, b), 8.0 / 9.0, 1e-15);
}

TEST(Cosine, Errors) {
  EXPECT_THROW(cosine_similarity(EmbeddingVector({0, 0}), EmbeddingVector({1, 0})), ZeroVector);
  EXPECT_THROW(cosine_similarity(EmbeddingVector({1, 0}), EmbeddingVector({1, 0, 0})), DimensionMismatch);
  EXPECT_THROW(EmbeddingVector({1, std::nan("")}), std::invalid_argument);
}

TEST(Cosine, ScaleInvariantAndSymmetric) {
  Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> a(8), b(8);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    const double alpha = 0.01 + rng.uniform() * 100, beta = 0.01 + rng.uniform() * 100;
    std::vector<double> sa(a), sb(b);
    for (auto& x : sa) x *= alpha;
    for (auto& x : sb) x *= beta;
    const double c = cosine_similarity(EmbeddingVector(a), EmbeddingVector(b));
    EXPECT_NEAR(c, cosine_similarity(EmbeddingVector(sa), EmbeddingVector(sb)), 1e-9);
    EXPECT_DOUBLE_EQ(c, cosine_similarity(EmbeddingVector(b), EmbeddingVector(a)));
    EXPECT_NEAR(c, oracle::cosine(a, b), 1e-12);
  }
}

namespace {
class VaryingDimension final : public EmbeddingProvider {
 public:
  std::string id() const override { return "varying"; }

 protected:
  std::vector<std::vector<double>> do_embed(std::span<const EmbeddingRequest> r) override {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < r.size(); ++i) out.emplace_back(2 + calls_, 1.0);
    ++calls_;
    return out;
  }
  std::size_t calls_ = 0;
};
}  // namespace

TEST(Provider, DimensionFixedPerSession) {
  VaryingDimension p;
  embed_document("a", p);
  EXPECT_EQ(p.dimension(), 2u);
  EXPECT_THROW(embed_document("b", p), DimensionMismatch);
}

TEST(Cache, TransparentAndPersistent) {
  const auto dir = temp_dir("cache");
  auto inner = std::make_shared<MockEmbeddingProvider>(MockEmbeddingOptions{.dim = 16});
  std::vector<std::string> texts = {"first text", "second text"};
  std::vector<double> fresh_doc, fresh_query;
  {
    CachingEmbeddingProvider c(inner, std::make_shared<EmbeddingCache>(dir / "e.jsonl"));
    fresh_doc = as_vector(embed_documents(texts, c)[1]);
    fresh_query = as_vector(embed_query("i", "second text", c));
    EXPECT_EQ(c.misses(), 3u);
    EXPECT_EQ(as_vector(embed_documents(texts, c)[1]), fresh_doc);
    EXPECT_EQ(c.hits(), 2u);
  }
  inner->clear_calls();
  CachingEmbeddingProvider c(inner, std::make_shared<EmbeddingCache>(dir / "e.jsonl"));
  EXPECT_EQ(as_vector(embed_documents(texts, c)[1]), fresh_doc);
  EXPECT_EQ(as_vector(embed_query("i", "second text", c)), fresh_query);
  EXPECT_EQ(inner->call_count(), 0u);
  // A different instruction is a different key.
  embed_query("j", "second text", c);
  EXPECT_EQ(inner->call_count(), 1u);
}

TEST(Cache, KeyCoversEveryField) {
  const auto d = EmbeddingRequest::document("t");
  const auto q = EmbeddingRequest::query("t", std::nullopt);
  const auto qi = EmbeddingRequest::query("t", "i");
  const auto qe = EmbeddingRequest::query("t", "");
  std::set<std::string> keys = {cache_key("p", d), cache_key("p", q), cache_key("p", qi), cache_key("p", qe),
                                cache_key("p2", d), cache_key("p", EmbeddingRequest::document("u"))};
  EXPECT_EQ(keys.size(), 6u);
}

TEST(Cache, RecordFormatAndTruncatedTail) {
  const auto dir = temp_dir("cache-tail");
  const auto path = dir / "e.jsonl";
  {
    EmbeddingCache cache(path);
    cache.put("k1", {1.0, 2.0});
  }
  const auto line = files::read(path);
  const auto j = nlohmann::json::parse(line.substr(0, line.find('\n')));
  EXPECT_EQ(j["key"], "k1");
  EXPECT_EQ(j["dim"], 2);
  EXPECT_EQ(j["values"], (std::vector<double>{1.0, 2.0}));
  {
    std::ofstream out(path, std::ios::app);
    out << R"({"key":"k2","dim":2,"val)";
  }
  EmbeddingCache reloaded(path);
  EXPECT_EQ(reloaded.size(), 1u);
  EXPECT_EQ(reloaded.get("k1"), (std::vector<double>{1.0, 2.0}));
}

TEST(HttpEmbeddings, WireFormatAndBatching) {
  testsupport::LocalServer server("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json data = nlohmann::json::array();
    for (const auto& t : body["input"]) {
      const double len = static_cast<double>(t.get<std::string>().size());
      data.push_back({{"embedding", {len, body["instruction"].is_null() ? 0.0 : 1.0, 1.0}}});
    }
    testsupport::reply_json(res, {{"data", data}});
  });
  HttpEmbeddingProvider p({.base_url = server.url("/v1"), .model = "m1", .api_key = "sekret", .batch_size = 2,
                           .max_in_flight = 1, .retry = fast_retry()});
  std::vector<std::string> docs = {"a", "bb", "ccc", "dddd", "eeeee"};
  const auto v = embed_documents(docs, p);
  ASSERT_EQ(v.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(v[i][0], static_cast<double>(i + 1));
  const auto q = embed_query("Instr", "query", p);
  EXPECT_EQ(q[1], 1.0);

  const auto bodies = server.bodies();
  ASSERT_EQ(bodies.size(), 4u);
  for (std::size_t b = 0; b < 3; ++b) {
    EXPECT_EQ(bodies[b]["model"], "m1");
    EXPECT_TRUE(bodies[b]["instruction"].is_null());
    EXPECT_LE(bodies[b]["input"].size(), 2u);
  }
  EXPECT_EQ(bodies[3]["instruction"], "Instr");
  EXPECT_EQ(bodies[3]["input"], nlohmann::json::array({"query"}));
  for (const auto& a : server.authorization()) EXPECT_EQ(a, "Bearer sekret");
}

TEST(HttpEmbeddings, RetriesTransientFailures) {
  std::atomic<int> calls{0};
  testsupport::LocalServer server("/embeddings", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ < 2) {
      res.status = 503;
      return;
    }
    testsupport::reply_json(res, {{"data", {{{"embedding", {1.0, 0.0}}}}}});
  });
  HttpEmbeddingProvider p({.base_url = server.url(), .model = "m", .api_key = std::nullopt, .retry = fast_retry()});
  EXPECT_EQ(embed_document("x", p)[0], 1.0);
  EXPECT_EQ(calls.load(), 3);
}

TEST(HttpEmbeddings, PermanentFailuresAndMalformedReplies) {
  testsupport::LocalServer bad("/embeddings", [](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content("nope", "text/plain");
  });
  HttpEmbeddingProvider p({.base_url = bad.url(), .model = "m", .api_key = std::nullopt, .retry = fast_retry()});
  EXPECT_THROW(embed_document("x", p), ProviderError);
  EXPECT_EQ(bad.requests(), 1u);

  testsupport::LocalServer short_reply("/embeddings", [](const httplib::Request&, httplib::Response& res) {
    testsupport::reply_json(res, {{"data", nlohmann::json::array()}});
  });
  HttpEmbeddingProvider q({.base_url = short_reply.url(), .model = "m", .api_key = std::nullopt, .retry = fast_retry()});
  EXPECT_THROW(embed_document("x", q), ProviderError);

  testsupport::LocalServer always_down("/embeddings",
                                   [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  HttpEmbeddingProvider r({.base_url = always_down.url(), .model = "m", .api_key = std::nullopt, .retry = fast_retry(2)});
  EXPECT_THROW(embed_document("x", r), ProviderError);
  EXPECT_EQ(always_down.requests(), 3u);
}
