#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "rigour/embed.hpp"
#include "rigour/fixtures/synthetic.hpp"
#include "rigour/mask.hpp"
#include "support/oracles.hpp"

using namespace rigour;
using namespace rigour::mask;

namespace {

Document stripped(std::string id, std::string abstract, std::string intro = "Nothing else here.") {
  Document d;
  d.id = std::move(id);
  d.abstract = std::move(abstract);
  d.introduction = std::move(intro);
  d.state = DocumentState::Stripped;
  return d;
}

embed::MockEmbeddingProvider onehot() {
  return embed::MockEmbeddingProvider({.dim = 4096, .scheme = embed::TokenScheme::OneHot});
}

std::vector<TopicKeyword> keywords(std::initializer_list<const char*> surfaces) {
  std::vector<TopicKeyword> out;
  for (auto s : surfaces) out.push_back({s, 0.5});
  return out;
}

bool contains_sequence(const std::vector<std::string>& tokens, const std::vector<std::string>& seq) {
  if (seq.empty() || tokens.size() < seq.size()) return false;
  for (std::size_t i = 0; i + seq.size() <= tokens.size(); ++i) {
    if (std::equal(seq.begin(), seq.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) return true;
  }
  return false;
}

}  // namespace

TEST(Candidates, UnigramsAndAdjacentBigrams) {
  EXPECT_EQ(keyword_candidates("Deep parsing models, the graph."),
            (std::vector<std::string>{"deep", "deep parsing", "graph", "models", "parsing", "parsing models"}));
}

TEST(Candidates, MaskTokenNeverACandidate) {
  for (const auto& c : keyword_candidates("deep [MASK] models")) EXPECT_EQ(c.find("MASK"), std::string::npos) << c;
}

TEST(Extract, DominantAxisRanksFirst) {
  auto e = onehot();
  const auto d = stripped("d", "parsing parsing parsing parsing models data", "parsing graph");
  const auto kws = extract_topic_keywords(d, e, 3);
  ASSERT_FALSE(kws.empty());
  EXPECT_EQ(kws[0].surface, "parsing");
}

TEST(Extract, ClampsToCandidateCount) {
  auto e = onehot();
  const auto d = stripped("d", "parsing models", "graph");
  const auto n = keyword_candidates(d.text()).size();
  EXPECT_EQ(extract_topic_keywords(d, e, 1000).size(), n);
}

TEST(Extract, KeywordInvariants) {
  auto e = embed::MockEmbeddingProvider();
  const auto corpus = fixtures::keyword_corpus();
  for (std::size_t i = 0; i < 10; ++i) {
    auto doc = corpus.documents()[i];
    doc.state = DocumentState::Stripped;
    for (const auto& k : extract_topic_keywords(doc, e, 10)) {
      EXPECT_FALSE(k.surface.empty());
      EXPECT_EQ(k.surface.find("[MASK]"), std::string::npos);
      EXPECT_TRUE(std::isfinite(k.score));
      EXPECT_LE(std::abs(k.score), 1.0);
      EXPECT_EQ(k.surface, text::lower(k.surface));
    }
  }
}

TEST(Extract, Errors) {
  auto e = onehot();
  Document raw = stripped("r", "parsing");
  raw.state = DocumentState::Raw;
  EXPECT_THROW(extract_topic_keywords(raw, e, 3), InvalidState);
  EXPECT_THROW(extract_topic_keywords(stripped("s", "the a of", "and to"), e, 3), NoCandidates);
  EXPECT_THROW(extract_topic_keywords(stripped("k", "parsing"), e, 0), std::invalid_argument);
}

// Every candidate scored against the whole-document token mean, computed
// without the provider's pooling code.
TEST(Extract, MatchesBruteForceScoringOnFiveDocuments) {
  auto e = embed::MockEmbeddingProvider({.dim = 128});
  const auto tv = [&](const std::string& t) { return e.token_vector(t); };
  const std::vector<Document> docs = {
      stripped("a", "Graph networks propagate messages between nodes.", "Message passing on graph nodes scales."),
      stripped("b", "Speech recognition with noisy audio.", "Audio features feed a speech decoder."),
      stripped("c", "Protein folding predicts structure.", "Folding models use protein sequence data."),
      stripped("d", "Robot grasping in clutter.", "Grasping policies train in simulation before robot trials."),
      stripped("e", "Legal documents are long.", "We summarize legal contracts and court documents."),
  };
  for (const auto& d : docs) {
    const auto got = extract_topic_keywords(d, e, 3);
    const auto doc_vec = oracle::token_mean(text::words(d.text()), tv);
    std::vector<std::pair<double, std::string>> all;
    for (const auto& c : keyword_candidates(d.text())) {
      all.emplace_back(oracle::cosine(oracle::token_mean(text::words(c), tv), doc_vec), c);
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    ASSERT_EQ(got.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_EQ(got[k].surface, all[k].second) << d.id;
      EXPECT_NEAR(got[k].score, all[k].first, 1e-12);
    }
  }
}

TEST(Extract, CorpusLevelList) {
  auto e = embed::MockEmbeddingProvider({.dim = 64});
  std::vector<Document> docs = {stripped("a", "graph nodes"), stripped("b", "speech audio")};
  const auto kws = extract_corpus_keywords(Corpus(docs), e, 4);
  EXPECT_EQ(kws.size(), 4u);
}

TEST(MaskDocument, SingleOccurrence) {
  const auto m = mask_document(stripped("d", "deep parsing models"), keywords({"parsing"}));
  EXPECT_EQ(m.abstract, "deep [MASK] models");
  EXPECT_EQ(m.state, DocumentState::Masked);
}

TEST(MaskDocument, LongestFirst) {
  EXPECT_EQ(mask_document(stripped("d", "a neural network"), keywords({"network", "neural network"})).abstract,
            "a [MASK]");
  EXPECT_EQ(mask_document(stripped("d", "a neural network"), keywords({"neural network", "network"})).abstract,
            "a [MASK]");
}

TEST(MaskDocument, CaseInsensitiveWholeWord) {
  const auto m = mask_document(stripped("d", "Parsing, PARSING and parsings."), keywords({"parsing"}));
  EXPECT_EQ(m.abstract, "[MASK], [MASK] and parsings.");
}

TEST(MaskDocument, RawRejected) {
  auto d = stripped("d", "x");
  d.state = DocumentState::Raw;
  EXPECT_THROW(mask_document(d, keywords({"x"})), InvalidState);
}

TEST(MaskDocument, IdempotentOnTwentyDocuments) {
  auto e = embed::MockEmbeddingProvider({.dim = 64});
  const auto corpus = fixtures::keyword_corpus();
  for (std::size_t i = 0; i < 20; ++i) {
    auto d = corpus.documents()[i];
    d.state = DocumentState::Stripped;
    const auto kws = extract_topic_keywords(d, e, 10);
    const auto once = mask_document(d, kws);
    const auto twice = mask_document(once, kws);
    EXPECT_EQ(once, twice);
  }
}

// Random texts over a tiny vocabulary so keywords overlap and repeat.
TEST(MaskProperties, RandomTexts) {
  const std::vector<std::string> vocab = {"neural", "network", "graph", "model", "deep", "learning", "data"};
  const std::vector<std::string> seps = {" ", "  ", ", ", ". ", "\n", " (", ") "};
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    std::string src;
    const auto n = 1 + rng.below(30);
    for (std::size_t i = 0; i < n; ++i) {
      std::string w = vocab[rng.below(vocab.size())];
      if (rng.bernoulli(0.2)) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      src += w + seps[rng.below(seps.size())];
    }
    std::vector<TopicKeyword> kws;
    const auto k = 1 + rng.below(3);
    for (std::size_t i = 0; i < k; ++i) {
      std::string s = vocab[rng.below(vocab.size())];
      if (rng.bernoulli(0.5)) s += " " + vocab[rng.below(vocab.size())];
      kws.push_back({s, 0.0});
    }

    MaskStats stats;
    const auto out = mask_document(stripped("d", src, "x"), kws, &stats).abstract;

    // Nothing left to mask: a second pass finds no occurrence.
    MaskStats again;
    mask_document(stripped("d", out, "x"), kws, &again);
    EXPECT_EQ(again.total(), 0u) << src;
    const auto out_tokens = oracle::tokens_with_masks(out);

    // Text outside the masked spans is unchanged and in order.
    std::size_t pos = 0;
    std::string_view rest = out;
    while (!rest.empty()) {
      const auto cut = rest.find("[MASK]");
      const auto piece = rest.substr(0, cut);
      const auto at = src.find(piece, pos);
      ASSERT_NE(at, std::string::npos) << src << " => " << out;
      pos = at + piece.size();
      rest = cut == std::string_view::npos ? std::string_view{} : rest.substr(cut + 6);
    }

    // Token count drops by occurrences x (keyword length - 1).
    std::size_t expected_drop = 0;
    for (const auto& [surface, count] : stats.occurrences) expected_drop += count * (text::words(surface).size() - 1);
    const auto before = oracle::tokens_with_masks(src).size();
    EXPECT_EQ(before - out_tokens.size(), expected_drop) << src;
    EXPECT_EQ(std::count(out_tokens.begin(), out_tokens.end(), "[MASK]"), static_cast<long>(stats.total()));
  }
}

TEST(MaskProperties, NoWholeWordSurvivorOnFixture) {
  auto e = embed::MockEmbeddingProvider({.dim = 64});
  const auto corpus = fixtures::keyword_corpus();
  for (std::size_t i = 0; i < 20; ++i) {
    auto d = corpus.documents()[i];
    d.state = DocumentState::Stripped;
    const auto kws = extract_topic_keywords(d, e, 10);
    const auto m = mask_document(d, kws);
    // Adjacent-word check: split the masked text at non-space punctuation
    // so a bigram can only match inside one whitespace-joined run.
    for (const auto& field : {m.abstract, m.introduction}) {
      std::vector<std::string> runs(1);
      for (char c : field) {
        if (text::is_alnum(c) || text::is_space(c)) runs.back().push_back(c);
        else runs.emplace_back();
      }
      for (const auto& run : runs) {
        const auto toks = text::words(run);
        for (const auto& kw : kws) EXPECT_FALSE(contains_sequence(toks, text::words(kw.surface))) << kw.surface;
      }
    }
  }
}
